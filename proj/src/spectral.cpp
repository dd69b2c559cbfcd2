#include "magpauli/spectral.hpp"

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <sstream>

namespace magpauli::spectral {

using elliptic::sigma;
using elliptic::zeta;

void validate(const SpectralDataG0& d) {
  if (d.crossings.size() != d.divisor.size() + 1)
    fail(ErrorKind::Schema, "genus-0 data needs l+1 crossings for a divisor of degree l");
  for (std::size_t s = 0; s < d.crossings.size(); ++s) {
    for (std::size_t t = s + 1; t < d.crossings.size(); ++t)
      if (std::abs(d.crossings[s].k - d.crossings[t].k) < 1e-12) fail(ErrorKind::Domain, "crossings not distinct");
    for (const cplx a : d.divisor)
      if (std::abs(a - d.crossings[s].k) < 1e-10) fail(ErrorKind::Domain, "divisor point on a crossing");
  }
}

Interp psi_prime_interp(const SpectralDataG0& d, cplx k, PlanarPoint z, double max_cond) {
  validate(d);
  const int n = static_cast<int>(d.crossings.size());
  const int l = n - 1;
  const cplx zz = z.z(), zb = std::conj(zz);
  Eigen::MatrixXcd M(n, n);
  Eigen::VectorXcd rhs(n);
  for (int s = 0; s < n; ++s) {
    const cplx ks = d.crossings[s].k;
    cplx prod = 1.0;
    for (const cplx a : d.divisor) prod *= ks - a;
    rhs(s) = std::exp(d.crossings[s].p * zz - ks * zb) * prod;
    for (int i = 0; i <= l; ++i) M(s, i) = std::pow(ks, l - i);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Interp out;
  out.cond = sv(0) / sv(n - 1);
  if (!(out.cond <= max_cond)) {
    std::ostringstream msg;
    msg << "degenerate interpolation data, condition number " << out.cond;
    fail(ErrorKind::Singular, msg.str());
  }
  const Eigen::VectorXcd w = svd.solve(rhs);
  out.w.assign(w.data(), w.data() + n);
  cplx num = 0.0, den = 1.0;
  for (int i = 0; i <= l; ++i) num = num * k + out.w[i];
  for (const cplx a : d.divisor) {
    if (std::abs(k - a) < 1e-14) fail(ErrorKind::Singular, "k at a divisor point");
    den *= k - a;
  }
  out.value = std::exp(k * zb) * num / den;
  return out;
}

WeightedBA weighted_from_field(const field::ExpField& c) { return {c.terms}; }

WeightedBA weighted_from_g0(const SpectralDataG0& d) {
  validate(d);
  WeightedBA w;
  for (std::size_t s = 0; s < d.crossings.size(); ++s) {
    const cplx ks = d.crossings[s].k;
    cplx num = 1.0, den = 1.0;
    for (const cplx a : d.divisor) num *= ks - a;
    for (std::size_t m = 0; m < d.crossings.size(); ++m)
      if (m != s) den *= ks - d.crossings[m].k;
    w.terms.push_back({num / den, d.crossings[s].p, ks});
  }
  return w;
}

cplx g0_normalization(const SpectralDataG0& d, cplx k) {
  cplx v = k;
  for (const cplx a : d.divisor) v *= k - a;
  for (const auto& c : d.crossings) v /= k - c.k;
  return v;
}

namespace {
void check_pole(const WeightedBA& w, cplx k) {
  for (const auto& t : w.terms)
    if (std::abs(k - t.k) < 1e-13) fail(ErrorKind::Singular, "evaluation at a pole of psi'");
}
}  // namespace

cplx psi_over_k(const WeightedBA& w, cplx k, PlanarPoint z) {
  check_pole(w, k);
  const cplx zz = z.z(), zb = std::conj(zz);
  cplx s = 0.0;
  for (const auto& t : w.terms) s += t.kappa * std::exp(t.p * zz + (k - t.k) * zb) / (k - t.k);
  return s;
}

cplx psi_prime_weighted(const WeightedBA& w, cplx k, PlanarPoint z) { return k * psi_over_k(w, k, z); }

cplx weighted_c(const WeightedBA& w, PlanarPoint z) {
  const cplx zz = z.z(), zb = std::conj(zz);
  cplx s = 0.0;
  for (const auto& t : w.terms) s += t.kappa * std::exp(t.p * zz - t.k * zb);
  return s;
}

cplx dbar_identity_residual(const WeightedBA& w, cplx k, PlanarPoint z) {
  check_pole(w, k);
  const cplx zz = z.z(), zb = std::conj(zz);
  cplx dbar = 0.0;
  for (const auto& t : w.terms) {
    const cplx term = t.kappa * std::exp(t.p * zz + (k - t.k) * zb) / (k - t.k);
    dbar += 2.0 * (k - t.k) * term;
  }
  return dbar - 2.0 * weighted_c(w, z) * std::exp(k * zb);
}

cplx qplus_ratio(const WeightedBA& w, cplx k, PlanarPoint z) {
  const cplx pp = psi_prime_weighted(w, k, z);
  const cplx c = weighted_c(w, z);
  if (std::abs(pp) < 1e-300) fail(ErrorKind::Singular, "zero of psi'");
  if (std::abs(c) < 1e-300) fail(ErrorKind::Singular, "zero of c");
  return -2.0 * c * k * std::exp(k * std::conj(z.z())) / pp;
}

// ---- genus 1 ----

cplx EllipticData::p_sum() const {
  cplx s = 0.0;
  for (const cplx v : p_div) s += v;
  return s;
}

cplx EllipticData::q_sum() const {
  cplx s = 0.0;
  for (const cplx v : q) s += v;
  return s;
}

void validate(const EllipticData& d) {
  if (d.q.empty() || d.q.size() != d.r.size() || d.p_div.size() + 1 != d.q.size())
    fail(ErrorKind::Schema, "genus-1 data needs n+1 crossings on each sheet and n divisor points");
}

namespace {
cplx sig(const EllipticData& d, cplx w) {
  const cplx s = sigma(d.lattice, w);
  if (std::abs(s) < 1e-300) fail(ErrorKind::Singular, "evaluation at a sigma zero");
  return s;
}

// prod_{t != s} sigma(Q_s - Q_t) / prod_l sigma(Q_s + P_l)
cplx dfac(const EllipticData& d, std::size_t s) {
  cplx v = 1.0;
  for (std::size_t t = 0; t < d.q.size(); ++t)
    if (t != s) v *= sig(d, d.q[s] - d.q[t]);
  for (const cplx pl : d.p_div) v /= sig(d, d.q[s] + pl);
  return v;
}
}  // namespace

cplx psi_second(const EllipticData& d, cplx p, PlanarPoint z) {
  const cplx zz = z.z();
  return std::exp(-zz * zeta(d.lattice, p)) * sigma(d.lattice, p + zz + d.p) /
         (sig(d, zz + d.p) * sig(d, p + d.p));
}

std::vector<cplx> crossing_weights(const EllipticData& d, PlanarPoint z) {
  validate(d);
  const cplx zb = std::conj(z.z());
  const cplx shift = d.p_sum() + d.q_sum();
  const cplx sz = sig(d, zb + shift);
  std::vector<cplx> w(d.q.size());
  // the crossing system is diagonal in this basis
  for (std::size_t s = 0; s < d.q.size(); ++s)
    w[s] = psi_second(d, d.r[s], z) * std::exp(zb * zeta(d.lattice, d.q[s])) / (dfac(d, s) * sz);
  return w;
}

cplx psi_first(const EllipticData& d, const std::vector<cplx>& w, cplx k, PlanarPoint z) {
  const cplx zb = std::conj(z.z());
  const cplx shift = d.p_sum() + d.q_sum();
  cplx sum = 0.0;
  for (std::size_t j = 0; j < d.q.size(); ++j) {
    cplx prod = 1.0;
    for (std::size_t s = 0; s < d.q.size(); ++s)
      if (s != j) prod *= sigma(d.lattice, k - d.q[s]);
    sum += w[j] * sigma(d.lattice, k + zb + shift - d.q[j]) * prod;
  }
  cplx den = 1.0;
  for (const cplx pl : d.p_div) den *= sig(d, k + pl);
  return std::exp(-zb * zeta(d.lattice, k)) * sum / den;
}

cplx psi_first(const EllipticData& d, cplx k, PlanarPoint z) { return psi_first(d, crossing_weights(d, z), k, z); }

double crossing_residual(const EllipticData& d, PlanarPoint z) {
  const auto w = crossing_weights(d, z);
  double worst = 0.0;
  for (std::size_t s = 0; s < d.q.size(); ++s) {
    const cplx a = psi_first(d, w, d.q[s], z), b = psi_second(d, d.r[s], z);
    worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(b)));
  }
  return worst;
}

cplx g1_c(const EllipticData& d, PlanarPoint z) {
  const auto w = crossing_weights(d, z);
  const cplx zb = std::conj(z.z());
  const cplx shift = d.p_sum() + d.q_sum();
  cplx sum = 0.0;
  for (std::size_t j = 0; j < d.q.size(); ++j) {
    cplx prod = 1.0;
    for (std::size_t s = 0; s < d.q.size(); ++s)
      if (s != j) prod *= sigma(d.lattice, -d.q[s]);
    sum += w[j] * sigma(d.lattice, zb + shift - d.q[j]) * prod;
  }
  cplx den = 1.0;
  for (const cplx pl : d.p_div) den *= sig(d, pl);
  return sum / den;
}

Tilde c_tilde(const EllipticData& d, PlanarPoint z) {
  validate(d);
  const cplx zz = z.z(), zb = std::conj(zz);
  const cplx shift = d.p_sum() + d.q_sum();
  cplx pden = 1.0;
  for (const cplx pl : d.p_div) pden *= sig(d, pl);
  Tilde t{0.0, 0.0, 0.0, 0.0};
  for (std::size_t s = 0; s < d.q.size(); ++s) {
    cplx num = 1.0;
    for (std::size_t u = 0; u < d.q.size(); ++u)
      if (u != s) num *= sigma(d.lattice, -d.q[u]);
    const cplx C = num / (pden * sig(d, d.r[s] + d.p) * dfac(d, s));
    const cplx a = zeta(d.lattice, d.q[s]), b = zeta(d.lattice, d.r[s]);
    const cplx u1 = zz + d.p + d.r[s], v1 = zb + shift - d.q[s];
    const cplx T = C * std::exp(zb * a - zz * b) * sigma(d.lattice, u1) * sigma(d.lattice, v1);
    const cplx gz = -b + zeta(d.lattice, u1), gzb = a + zeta(d.lattice, v1);
    t.c += T;
    t.cz += T * gz;
    t.czb += T * gzb;
    t.czzb += T * gz * gzb;
  }
  return t;
}

double b_tilde(const EllipticData& d, PlanarPoint z) {
  const Tilde t = c_tilde(d, z);
  if (std::abs(t.c) < 1e-300) fail(ErrorKind::Singular, "zero of c~");
  return (2.0 * (t.czzb / t.c - t.cz * t.czb / (t.c * t.c))).real();
}

double cell_flux_tilde(const EllipticData& d, PlanarPoint corner, int nodes_per_edge) {
  using Gauss = boost::math::quadrature::gauss<double, 20>;
  const double wx = 2.0 * d.lattice.omega, wy = 2.0 * d.lattice.omega_prime;
  const int panels = std::max(1, nodes_per_edge / 20);
  // edges counterclockwise: start, direction, outward normal, length
  struct Edge {
    double x0, y0, tx, ty, nx, ny, len;
  };
  const Edge edges[4] = {{corner.x, corner.y, 1, 0, 0, -1, wx},
                         {corner.x + wx, corner.y, 0, 1, 1, 0, wy},
                         {corner.x + wx, corner.y + wy, -1, 0, 0, 1, wx},
                         {corner.x, corner.y + wy, 0, -1, -1, 0, wy}};
  double total = 0.0;
  for (const Edge& e : edges) {
    for (int p = 0; p < panels; ++p) {
      const double a = e.len * p / panels, b = e.len * (p + 1) / panels;
      auto f = [&](double s) {
        const Tilde t = c_tilde(d, {e.x0 + e.tx * s, e.y0 + e.ty * s});
        if (std::abs(t.c) < 1e-300) fail(ErrorKind::Singular, "c~ vanishes on the cell boundary");
        const cplx gx = (t.cz + t.czb) / t.c, gy = I * (t.cz - t.czb) / t.c;
        return (gx * e.nx + gy * e.ny).real();
      };
      total += Gauss::integrate(f, a, b);
    }
  }
  return 0.5 * total;
}

PlanarPoint flux_cell_corner(const EllipticData& d) {
  const double wx = 2.0 * d.lattice.omega, wy = 2.0 * d.lattice.omega_prime;
  PlanarPoint best{-0.5 * wx, -0.5 * wy};
  double best_min = -1.0;
  const int m = 24, edge = 96;
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < m; ++i) {
      const PlanarPoint c{-wx + wx * i / m, -wy + wy * j / m};
      double mn = 1e300;
      for (int k = 0; k < edge && mn > best_min; ++k) {
        const double s = double(k) / edge;
        for (PlanarPoint p : {PlanarPoint{c.x + wx * s, c.y}, PlanarPoint{c.x, c.y + wy * s}}) {
          double v;
          try {
            v = std::abs(c_tilde(d, p).c);
          } catch (const Error&) {
            v = 0.0;
          }
          mn = std::min(mn, v);
        }
      }
      if (mn > best_min) {
        best_min = mn;
        best = c;
      }
    }
  return best;
}

SpecialRoot special_root(const elliptic::RectLattice& lat, int m) {
  const cplx target = I * PI * double(m) / 4.0;
  auto g = [&](cplx q) { return lat.omega * zeta(lat, q) - lat.eta * q - target; };
  // Im g(it) changes sign between consecutive scan points
  const int n = 400;
  double prev_t = 0.0, prev = 0.0;
  cplx q = 0.0;
  bool found = false;
  for (int i = 1; i < n; ++i) {
    const double t = lat.omega_prime * i / n;
    const double v = g(cplx(0.0, t)).imag();
    if (!std::isfinite(v)) continue;
    if (i > 1 && prev * v < 0.0) {
      q = cplx(0.0, 0.5 * (prev_t + t));
      found = true;
      break;
    }
    prev_t = t;
    prev = v;
  }
  if (!found) fail(ErrorKind::Domain, "no root of omega zeta(q) - eta q = i pi m / 4 on the imaginary half-period segment");
  for (int it = 0; it < 50; ++it) {
    const cplx f = g(q);
    const cplx df = -lat.omega * elliptic::wp(lat, q) - lat.eta;
    const cplx step = f / df;
    q -= step;
    if (std::abs(step) < 1e-15) break;
  }
  const double res = std::abs(g(q));
  if (!(res < 1e-11)) fail(ErrorKind::Numerical, "Newton iteration for the special root did not converge");
  return {q, res};
}

EllipticData special_n1(const elliptic::RectLattice& lat, cplx P, int m) {
  const cplx q = special_root(lat, m).q;
  EllipticData d;
  d.lattice = lat;
  d.q = {q, -q};
  d.r = {-q, q};
  d.p_div = {P};
  d.p = P;
  return d;
}

cplx psi_ext(const field::ExpField& c, const elliptic::RectLattice& lat, cplx u, cplx p, cplx R, int sign,
             PlanarPoint z) {
  const cplx cv = field::eval_c(c, z);
  if (std::abs(cv.imag()) > 1e-12 * (1.0 + std::abs(cv)) || cv.real() <= 0.0)
    fail(ErrorKind::Singular, "sqrt(c) needs real positive c");
  const double root = std::sqrt(cv.real());
  const cplx zz = z.z();
  const cplx den = sigma(lat, zz + R);
  if (std::abs(den) < 1e-300) fail(ErrorKind::Singular, "evaluation at a zero of sigma(z + R)");
  const cplx core = std::exp(u * zz - zeta(lat, p) * zz) * sigma(lat, zz + p + R) / den;
  return (sign >= 0 ? root : 1.0 / root) * core;
}

cplx singular_gauge_factor(const elliptic::RectLattice& lat, cplx P, PlanarPoint z) {
  const cplx s = sigma(lat, z.z() - P);
  if (std::abs(s) < 1e-300) fail(ErrorKind::Singular, "singular gauge evaluated at P");
  return s / std::abs(s);
}

cplx singular_gauge(cplx value, const elliptic::RectLattice& lat, cplx P, PlanarPoint z) {
  return value * singular_gauge_factor(lat, P, z);
}

double radial_exponent(const PointFn& f, PlanarPoint center, double r_min, double r_max, int samples) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < samples; ++i) {
    const double r = r_min * std::pow(r_max / r_min, double(i) / (samples - 1));
    double mx = 0.0;
    for (int a = 0; a < 16; ++a) {
      const double t = 2.0 * PI * (a + 0.5) / 16;
      mx = std::max(mx, std::abs(f({center.x + r * std::cos(t), center.y + r * std::sin(t)})));
    }
    const double x = std::log(r), y = std::log(mx);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (samples * sxy - sx * sy) / (samples * sxx - sx * sx);
}

}  // namespace magpauli::spectral
