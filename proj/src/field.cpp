#include "magpauli/field.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

namespace magpauli::field {

namespace {
bool near(cplx a, cplx b, double tol = 1e-12) { return std::abs(a - b) <= tol * (1.0 + std::abs(a) + std::abs(b)); }
}  // namespace

ExpField make_field(std::vector<ExpTerm> terms, bool declared_real, std::optional<elliptic::RectLattice> lattice) {
  ExpField f;
  f.terms = std::move(terms);
  f.lattice = lattice;
  f.periodic_flag = !f.terms.empty();
  f.real_linear = true;
  for (const auto& t : f.terms) {
    if (!near(t.k, std::conj(t.p))) f.periodic_flag = false;
    const cplx a = t.alpha(), b = t.beta();
    if (std::abs(a.imag()) > 1e-12 * (1 + std::abs(a)) || std::abs(b.imag()) > 1e-12 * (1 + std::abs(b)))
      f.real_linear = false;
    f.forms.push_back({a.real(), b.real()});
  }
  if (!f.real_linear) f.forms.clear();
  if (declared_real) {
    double worst = 0.0, scale = 1.0;
    for (int j = 0; j < 17; ++j)
      for (int i = 0; i < 17; ++i) {
        const PlanarPoint p{-2.0 + 0.25 * i + 0.013, -2.0 + 0.25 * j + 0.007};
        const cplx c = eval_c(f, p);
        worst = std::max(worst, std::abs(c.imag()));
        scale = std::max(scale, std::abs(c));
      }
    if (worst > 1e-12 * scale) fail(ErrorKind::Domain, "field declared real but Im c does not vanish");
    f.real_flag = true;
  }
  return f;
}

ExpField trig_field(const std::vector<cplx>& a, const std::vector<cplx>& l) {
  if (a.size() != l.size()) fail(ErrorKind::Domain, "weights and exponents differ in length");
  std::vector<ExpTerm> t{{1.0, 0.0, 0.0}};
  for (std::size_t j = 0; j < a.size(); ++j) {
    t.push_back({a[j], -std::conj(l[j]), -l[j]});
    t.push_back({std::conj(a[j]), std::conj(l[j]), l[j]});
  }
  return make_field(std::move(t), true);
}

ExpField fig6_field() { return trig_field({0.2, 0.2}, {0.5, cplx(0.0, 0.5)}); }

ExpField fig2b_field() {
  // e^x + e^y + e^{-x-y}
  return make_field({{1.0, 0.5, -0.5}, {1.0, -0.5 * I, -0.5 * I}, {1.0, cplx(-0.5, 0.5), cplx(0.5, 0.5)}}, true);
}

Derivs derivs(const ExpField& f, PlanarPoint p) {
  const cplx z = p.z();
  Derivs d{0.0, 0.0, 0.0, 0.0};
  for (const auto& t : f.terms) {
    const cplx e = t.kappa * std::exp(t.exponent(z));
    d.c += e;
    d.dc += 2.0 * t.p * e;
    d.dbc += -2.0 * t.k * e;
    d.ddbc += -4.0 * t.p * t.k * e;
  }
  return d;
}

cplx eval_c(const ExpField& f, PlanarPoint p) { return derivs(f, p).c; }

namespace {
void require_nonzero(cplx c) {
  if (std::abs(c) < 1e-300 || !std::isfinite(std::abs(c))) fail(ErrorKind::Singular, "zero of c at evaluation point");
}
}  // namespace

cplx eval_phi(const ExpField& f, PlanarPoint p) {
  const cplx c = eval_c(f, p);
  require_nonzero(c);
  return 0.5 * std::log(c);
}

std::array<cplx, 3> eval_phi_derivs(const ExpField& f, PlanarPoint p) {
  const Derivs d = derivs(f, p);
  require_nonzero(d.c);
  const cplx dphi = 0.5 * d.dc / d.c, dbphi = 0.5 * d.dbc / d.c;
  const cplx lap = 0.5 * (d.ddbc / d.c - d.dc * d.dbc / (d.c * d.c));
  return {0.5 * (dphi + dbphi), 0.5 * I * (dphi - dbphi), lap};
}

double eval_b(const ExpField& f, PlanarPoint p) { return eval_phi_derivs(f, p)[2].real(); }

Tropical tropical_indicator(const ExpField& f, double phi) {
  if (!f.real_linear) fail(ErrorKind::Domain, "tropical indicator needs real exponents");
  if (f.forms.empty()) fail(ErrorKind::Domain, "empty field");
  double mx = -1e300;
  for (const auto& w : f.forms) mx = std::max(mx, w[0] * std::cos(phi) + w[1] * std::sin(phi));
  return {mx, std::max(mx, 0.0)};
}

namespace {
using P2 = std::array<double, 2>;
double cross(const P2& o, const P2& a, const P2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

std::vector<P2> convex_hull(std::vector<P2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const P2& a, const P2& b) { return std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) < 1e-12; }),
            pts.end());
  if (pts.size() < 3) return pts;
  std::vector<P2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 1e-14) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= 1e-14) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}
}  // namespace

bool Polytope::contains(double alpha, double beta, bool strict) const {
  if (!closure_nonempty) return false;
  const P2 q{alpha, beta};
  const double tol = 1e-12;
  if (polygon.size() == 2) {
    if (strict) return false;
    const P2 &a = polygon[0], &b = polygon[1];
    if (std::abs(cross(a, b, q)) > tol) return false;
    const double t = ((q[0] - a[0]) * (b[0] - a[0]) + (q[1] - a[1]) * (b[1] - a[1])) /
                     ((b[0] - a[0]) * (b[0] - a[0]) + (b[1] - a[1]) * (b[1] - a[1]));
    return t >= -tol && t <= 1.0 + tol;
  }
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const double c = cross(polygon[i], polygon[(i + 1) % polygon.size()], q);
    if (strict ? c <= tol : c < -tol) return false;
  }
  return true;
}

Polytope shift_polytope(const ExpField& f) {
  if (!f.real_linear) fail(ErrorKind::Domain, "shift polytope needs real exponents");
  Polytope T;
  T.hull = convex_hull(f.forms);
  for (const auto& p : T.hull) T.polygon.push_back({-p[0], -p[1]});
  // negation by a point reflection keeps counterclockwise order
  T.closure_nonempty = T.hull.size() >= 2;
  T.interior_nonempty = T.hull.size() >= 3;
  return T;
}

FluxReport flux_disk(const ExpField& f, double radius, int n_phi, double tol) {
  if (!f.real_flag) fail(ErrorKind::Domain, "flux_disk needs a real field");
  using Gauss = boost::math::quadrature::gauss<double, 15>;
  auto quad = [&](int nphi, int panels) {
    double total = 0.0;
    for (int pnl = 0; pnl < panels; ++pnl) {
      const double a = radius * pnl / panels, b = radius * (pnl + 1) / panels;
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      auto ring = [&](double r) {
        double s = 0.0;
        for (int k = 0; k < nphi; ++k) {
          const double t = 2.0 * PI * (k + 0.5) / nphi;
          s += eval_b(f, {r * std::cos(t), r * std::sin(t)});
        }
        return s * 2.0 * PI / nphi * r;
      };
      const auto& x = Gauss::abscissa();
      const auto& w = Gauss::weights();
      for (std::size_t k = 0; k < x.size(); ++k) {
        total += w[k] * half * ring(mid + half * x[k]);
        if (x[k] != 0.0) total += w[k] * half * ring(mid - half * x[k]);
      }
    }
    return total;
  };
  const int panels = std::max(4, static_cast<int>(std::ceil(radius)));
  FluxReport rep;
  rep.radius = radius;
  const double coarse = quad(n_phi, panels);
  rep.flux = quad(2 * n_phi, 2 * panels);
  rep.quadrature_error = std::abs(rep.flux - coarse);
  if (rep.quadrature_error > tol * (1.0 + std::abs(rep.flux)))
    fail(ErrorKind::Numerical, "flux quadrature not converged; increase n_phi");
  if (f.real_linear) {
    const int m = 20000;
    double s = 0.0, sp = 0.0;
    for (int k = 0; k < m; ++k) {
      const auto t = tropical_indicator(f, 2.0 * PI * (k + 0.5) / m);
      s += t.i_prime;
      sp += t.i;
    }
    rep.tropical_integral = s * 2.0 * PI / m;
    rep.predicted_paper = -0.5 * radius * sp * 2.0 * PI / m;
    rep.predicted_boundary = 0.5 * radius * rep.tropical_integral;
    rep.residual = rep.flux - rep.predicted_boundary;
  }
  return rep;
}

double cell_flux(const ExpField& f, double period_x, double period_y, int n) {
  double s = 0.0;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) s += eval_b(f, {period_x * i / n, period_y * j / n});
  return s * period_x * period_y / (static_cast<double>(n) * n);
}

}  // namespace magpauli::field
