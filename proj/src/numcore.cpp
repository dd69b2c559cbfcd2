#include "magpauli/numcore.hpp"

#include <fftw3.h>

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <mutex>

namespace magpauli::numcore {

namespace {

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

struct D1 {
  cplx fx, fy, fxx, fyy;
};

D1 diffs(const PointFn& f, PlanarPoint p, double h) {
  auto at = [&](double dx, double dy) { return f({p.x + dx, p.y + dy}); };
  const cplx c = at(0, 0);
  const cplx xp1 = at(h, 0), xm1 = at(-h, 0), xp2 = at(2 * h, 0), xm2 = at(-2 * h, 0);
  const cplx yp1 = at(0, h), ym1 = at(0, -h), yp2 = at(0, 2 * h), ym2 = at(0, -2 * h);
  D1 d;
  d.fx = (-xp2 + 8.0 * xp1 - 8.0 * xm1 + xm2) / (12.0 * h);
  d.fy = (-yp2 + 8.0 * yp1 - 8.0 * ym1 + ym2) / (12.0 * h);
  d.fxx = (-xp2 + 16.0 * xp1 - 30.0 * c + 16.0 * xm1 - xm2) / (12.0 * h * h);
  d.fyy = (-yp2 + 16.0 * yp1 - 30.0 * c + 16.0 * ym1 - ym2) / (12.0 * h * h);
  return d;
}

// derivative of order `order` along `axis` by FFT
Field spectral(const Field& a, int axis, int order) {
  const Grid& g = a.grid;
  if (!g.periodic) fail(ErrorKind::Domain, "spectral differentiation needs a periodic grid");
  const int nx = g.nx, ny = g.ny;
  std::vector<cplx> buf(a.v);
  fftw_plan fwd, bwd;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fwd = fftw_plan_dft_2d(ny, nx, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_2d(ny, nx, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  const int n = axis == 0 ? nx : ny;
  const double L = axis == 0 ? g.period_x() : g.period_y();
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int idx = axis == 0 ? i : j;
      int m = idx <= n / 2 ? idx : idx - n;
      cplx factor;
      const double k = 2.0 * PI * m / L;
      if (order == 1) {
        if (n % 2 == 0 && idx == n / 2) m = 0;
        factor = I * (2.0 * PI * m / L);
      } else {
        factor = -k * k;
      }
      buf[g.index(i, j)] *= factor / static_cast<double>(nx * ny);
    }
  fftw_execute(bwd);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  Field out(g);
  out.v = std::move(buf);
  return out;
}

Field deriv(const Field& a, int axis, int order, Scheme s) {
  if (s == Scheme::Spectral) return spectral(a, axis, order);
  return kernels::stencil(a, axis, order, s == Scheme::Central2 ? 2 : 4);
}

}  // namespace

cplx wirtinger(const PointFn& f, PlanarPoint p, Wirt which, double h) {
  const D1 d = diffs(f, p, h);
  return which == Wirt::D ? d.fx - I * d.fy : d.fx + I * d.fy;
}

cplx laplacian_at(const PointFn& f, PlanarPoint p, double h) {
  const D1 d = diffs(f, p, h);
  return d.fxx + d.fyy;
}

Scheme default_scheme(const Grid& g) { return g.periodic ? Scheme::Spectral : Scheme::Central4; }

Field dx(const Field& a, Scheme s) { return deriv(a, 0, 1, s); }
Field dy(const Field& a, Scheme s) { return deriv(a, 1, 1, s); }
Field dxx(const Field& a, Scheme s) { return deriv(a, 0, 2, s); }
Field dyy(const Field& a, Scheme s) { return deriv(a, 1, 2, s); }
Field laplacian(const Field& a, Scheme s) { return dxx(a, s) + dyy(a, s); }
Field d(const Field& a, Scheme s) { return dx(a, s) - I * dy(a, s); }
Field dbar(const Field& a, Scheme s) { return dx(a, s) + I * dy(a, s); }

Field MagneticCoeffs::a_z() const { return (-1.0) * (phi_x - I * phi_y); }

MagneticCoeffs MagneticCoeffs::from_samples(const Field& phi, Scheme s) {
  MagneticCoeffs m;
  m.grid = phi.grid;
  m.scheme = s;
  m.phi = phi;
  m.phi_x = dx(phi, s);
  m.phi_y = dy(phi, s);
  m.lap_phi = laplacian(phi, s);
  return m;
}

MagneticCoeffs MagneticCoeffs::from_closed_form(const Grid& g, Scheme s, const PointFn& phi, const PointFn& phi_x,
                                                const PointFn& phi_y, const PointFn& lap_phi) {
  MagneticCoeffs m;
  m.grid = g;
  m.scheme = s;
  m.phi = kernels::sample(g, phi);
  m.phi_x = kernels::sample(g, phi_x);
  m.phi_y = kernels::sample(g, phi_y);
  m.lap_phi = kernels::sample(g, lap_phi);
  return m;
}

Field apply_q(const MagneticCoeffs& m, const Field& f) {
  return d(f, m.scheme) + (m.phi_x - I * m.phi_y) * f;
}

Field apply_qplus(const MagneticCoeffs& m, const Field& f) {
  return (-1.0) * dbar(f, m.scheme) + (m.phi_x + I * m.phi_y) * f;
}

namespace {
Field assembled(const MagneticCoeffs& m, const Field& f, double sector) {
  const Field fx = dx(f, m.scheme), fy = dy(f, m.scheme);
  const Field lap = laplacian(f, m.scheme);
  Field out(f.grid);
  for (std::size_t k = 0; k < out.v.size(); ++k) {
    const cplx px = m.phi_x.v[k], py = m.phi_y.v[k];
    out.v[k] = -lap.v[k] + 2.0 * I * (py * fx.v[k] - px * fy.v[k]) + (px * px + py * py) * f.v[k] +
               sector * m.lap_phi.v[k] * f.v[k];
  }
  return out;
}
}  // namespace

Field apply_lplus(const MagneticCoeffs& m, const Field& f) { return assembled(m, f, +1.0); }
Field apply_lminus(const MagneticCoeffs& m, const Field& f) { return assembled(m, f, -1.0); }

Pair apply_pauli(const MagneticCoeffs& m, const Pair& p) { return {apply_lplus(m, p.plus), apply_lminus(m, p.minus)}; }

Pair apply_s(const MagneticCoeffs& m, const Pair& p) { return {Field(p.plus.grid), apply_qplus(m, p.plus)}; }

Pair apply_sstar(const MagneticCoeffs& m, const Pair& p) { return {apply_q(m, p.minus), Field(p.minus.grid)}; }

Pair anticommutator(const MagneticCoeffs& m, const Pair& p) {
  const Pair a = apply_s(m, apply_sstar(m, p));
  const Pair b = apply_sstar(m, apply_s(m, p));
  return {a.plus + b.plus, a.minus + b.minus};
}

namespace {
cplx l_at(const PointFn& Phi, const PointFn& f, PlanarPoint p, double h, double sector) {
  const D1 df = diffs(f, p, h);
  const D1 dp = diffs(Phi, p, h);
  const cplx v = f(p);
  return -(df.fxx + df.fyy) + 2.0 * I * (dp.fy * df.fx - dp.fx * df.fy) + (dp.fx * dp.fx + dp.fy * dp.fy) * v +
         sector * (dp.fxx + dp.fyy) * v;
}
}  // namespace

cplx lplus_at(const PointFn& Phi, const PointFn& f, PlanarPoint p, double h) { return l_at(Phi, f, p, h, +1.0); }
cplx lminus_at(const PointFn& Phi, const PointFn& f, PlanarPoint p, double h) { return l_at(Phi, f, p, h, -1.0); }

cplx covariant_normal(const PointFn& Phi, const PointFn& f, PlanarPoint p, double theta, double h) {
  const D1 df = diffs(f, p, h);
  const D1 dp = diffs(Phi, p, h);
  const cplx v = f(p);
  const double nx = std::cos(theta), ny = std::sin(theta);
  return nx * (df.fx - I * dp.fy * v) + ny * (df.fy + I * dp.fx * v);
}

std::vector<Contour> Region::boundary(int n) const {
  std::vector<Contour> out;
  out.push_back(circle(center, r_outer, n, true));
  if (kind == Kind::Annulus) out.push_back(circle(center, r_inner, n, false));
  return out;
}

cplx green_residual(const PointFn& Phi, const PointFn& psi, const PointFn& phi, const Region& region, int n,
                    int sector) {
  if (region.kind == Region::Kind::Annulus && !(region.r_inner > 0.0 && region.r_inner < region.r_outer))
    fail(ErrorKind::Domain, "annulus radii out of order");
  const double sec = sector >= 0 ? 1.0 : -1.0;
  cplx line = 0.0;
  // trapezoid in the angle is spectrally accurate on circles
  auto circle_term = [&](double r, double orient) {
    for (int k = 0; k < n; ++k) {
      const double t = 2.0 * PI * k / n;
      const PlanarPoint p{region.center.x + r * std::cos(t), region.center.y + r * std::sin(t)};
      const double th = orient > 0 ? t : t + PI;
      const cplx psi1 = covariant_normal(Phi, psi, p, th), psi2 = psi(p);
      const cplx phi1 = covariant_normal(Phi, phi, p, th), phi2 = phi(p);
      line += (psi1 * std::conj(phi2) - psi2 * std::conj(phi1)) * (2.0 * PI * r / n);
    }
  };
  circle_term(region.r_outer, +1.0);
  if (region.kind == Region::Kind::Annulus) circle_term(region.r_inner, -1.0);
  using Gauss = boost::math::quadrature::gauss<double, 20>;
  const double r0 = region.kind == Region::Kind::Annulus ? region.r_inner : 0.0;
  const int panels = 8;
  cplx area = 0.0;
  for (int pnl = 0; pnl < panels; ++pnl) {
    const double a = r0 + (region.r_outer - r0) * pnl / panels;
    const double b = r0 + (region.r_outer - r0) * (pnl + 1) / panels;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    auto accumulate = [&](double node, double weight) {
      const double r = mid + half * node;
      cplx ring = 0.0;
      for (int k = 0; k < n; ++k) {
        const double t = 2.0 * PI * k / n;
        const PlanarPoint p{region.center.x + r * std::cos(t), region.center.y + r * std::sin(t)};
        const cplx lpsi = l_at(Phi, psi, p, 1e-3, sec);
        const cplx lphi = l_at(Phi, phi, p, 1e-3, sec);
        ring += lpsi * std::conj(phi(p)) - psi(p) * std::conj(lphi);
      }
      area += weight * half * r * ring * (2.0 * PI / n);
    };
    const auto& x = Gauss::abscissa();
    const auto& w = Gauss::weights();
    for (std::size_t k = 0; k < x.size(); ++k) {
      accumulate(x[k], w[k]);
      if (x[k] != 0.0) accumulate(-x[k], w[k]);
    }
  }
  return line + area;
}

double loop_flux_phase(const PointFn& f, const Contour& c) {
  double total = 0.0;
  std::function<double(PlanarPoint, PlanarPoint, cplx, cplx, int)> seg = [&](PlanarPoint a, PlanarPoint b, cplx fa,
                                                                             cplx fb, int depth) -> double {
    const double dphi = std::arg(fb / fa);
    if (std::abs(dphi) < 0.5 || depth > 30) return dphi;
    const PlanarPoint m{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    const cplx fm = f(m);
    if (std::abs(fm) == 0.0) fail(ErrorKind::Singular, "contour passes through a zero of the field");
    return seg(a, m, fa, fm, depth + 1) + seg(m, b, fm, fb, depth + 1);
  };
  cplx prev = f(c.points[0]);
  for (std::size_t k = 1; k < c.points.size(); ++k) {
    const cplx cur = f(c.points[k]);
    if (std::abs(cur) == 0.0 || std::abs(prev) == 0.0)
      fail(ErrorKind::Singular, "contour passes through a zero of the field");
    total += seg(c.points[k - 1], c.points[k], prev, cur, 0);
    prev = cur;
  }
  return total;
}

double loop_flux_vector(const VecFn& a, const Contour& c) {
  double total = 0.0;
  for (std::size_t k = 1; k < c.points.size(); ++k) {
    const PlanarPoint p = c.points[k - 1], q = c.points[k];
    const PlanarPoint m{0.5 * (p.x + q.x), 0.5 * (p.y + q.y)};
    const auto ap = a(p), aq = a(q), am = a(m);
    const double dx = q.x - p.x, dy = q.y - p.y;
    // Simpson on each segment
    total += ((ap[0] + 4.0 * am[0] + aq[0]) * dx + (ap[1] + 4.0 * am[1] + aq[1]) * dy) / 6.0;
  }
  return total;
}

VecFn real_vector_potential(const PointFn& Phi, double h) {
  return [Phi, h](PlanarPoint p) {
    const D1 d = diffs(Phi, p, h);
    return std::array<double, 2>{-d.fy.real(), d.fx.real()};
  };
}

double PoissonLog::evaluate(PlanarPoint p) const {
  return kernels::log_potential({p}, src, charge, grid.hx, grid.hy, kernels::Exec::Serial)[0];
}

std::vector<double> PoissonLog::evaluate(const std::vector<PlanarPoint>& pts, kernels::Exec exec) const {
  return kernels::log_potential(pts, src, charge, grid.hx, grid.hy, exec);
}

PoissonLog poisson_log(const Field& b, kernels::Exec exec) {
  const Grid& g = b.grid;
  if (g.periodic) fail(ErrorKind::Domain, "poisson_log expects a box grid");
  PoissonLog out;
  out.grid = g;
  double bmax = 0.0;
  for (const cplx& v : b.v) bmax = std::max(bmax, std::abs(v));
  double edge = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (i < 2 || j < 2 || i >= g.nx - 2 || j >= g.ny - 2) edge = std::max(edge, std::abs(b(i, j)));
  if (bmax > 0.0 && edge > 1e-8 * bmax) fail(ErrorKind::Domain, "source not settled at the box boundary");

  const double cell = g.hx * g.hy;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (b(i, j).real() != 0.0) {
        out.src.push_back(g.point(i, j));
        out.charge.push_back(b(i, j).real() * cell);
        out.flux += b(i, j).real() * cell;
      }
  out.r = Field(g);
  if (out.src.empty()) return out;

  // Dirichlet ring from quadrature
  std::vector<PlanarPoint> ring;
  std::vector<std::pair<int, int>> ring_idx;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1) {
        ring.push_back(g.point(i, j));
        ring_idx.emplace_back(i, j);
      }
  const auto rv = kernels::log_potential(ring, out.src, out.charge, g.hx, g.hy, exec);
  for (std::size_t k = 0; k < ring.size(); ++k) out.r(ring_idx[k].first, ring_idx[k].second) = rv[k];

  // interior: five-point equation, sine transform
  const int mx = g.nx - 2, my = g.ny - 2;
  const double ix2 = 1.0 / (g.hx * g.hx), iy2 = 1.0 / (g.hy * g.hy);
  std::vector<double> rhs(static_cast<std::size_t>(mx) * my);
  for (int j = 1; j <= my; ++j)
    for (int i = 1; i <= mx; ++i) {
      double v = b(i, j).real();
      if (i == 1) v -= out.r(0, j).real() * ix2;
      if (i == mx) v -= out.r(g.nx - 1, j).real() * ix2;
      if (j == 1) v -= out.r(i, 0).real() * iy2;
      if (j == my) v -= out.r(i, g.ny - 1).real() * iy2;
      rhs[static_cast<std::size_t>(j - 1) * mx + (i - 1)] = v;
    }
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = fftw_plan_r2r_2d(my, mx, rhs.data(), rhs.data(), FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  for (int q = 0; q < my; ++q)
    for (int p = 0; p < mx; ++p) {
      const double lam = (2.0 * std::cos(PI * (p + 1) / (mx + 1)) - 2.0) * ix2 +
                         (2.0 * std::cos(PI * (q + 1) / (my + 1)) - 2.0) * iy2;
      rhs[static_cast<std::size_t>(q) * mx + p] /= lam * 4.0 * (mx + 1) * (my + 1);
    }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }
  for (int j = 1; j <= my; ++j)
    for (int i = 1; i <= mx; ++i) out.r(i, j) = rhs[static_cast<std::size_t>(j - 1) * mx + (i - 1)];
  return out;
}

}  // namespace magpauli::numcore
