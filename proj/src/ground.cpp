#include "magpauli/ground.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>

namespace magpauli::ground {

ACProblem make_ac_problem(const Field& b) {
  ACProblem p;
  p.b = b;
  double s = 0.0;
  for (const cplx& v : b.v) s += v.real();
  p.flux = s * b.grid.hx * b.grid.hy;
  p.m = static_cast<int>(std::floor(std::abs(p.flux) / (2.0 * PI)));
  return p;
}

ACResult ac_states(const ACProblem& p, kernels::Exec exec) {
  ACResult res;
  res.r = numcore::poisson_log(p.b, exec);
  const double q = std::abs(p.flux) / (2.0 * PI);
  res.borderline = std::abs(q - std::round(q)) < 1e-3;
  const int sector = p.flux >= 0 ? +1 : -1;
  for (int l = 0; l <= p.m; ++l) {
    ACState s;
    s.l = l;
    s.sector = sector;
    s.predicted_exponent = 2.0 * l - std::abs(p.flux) / PI;
    s.admissible = s.predicted_exponent < -2.0;
    if (s.admissible) res.states.push_back(s);
  }
  return res;
}

namespace {
cplx ac_from_r(double r, int l, int sector, cplx z) {
  return sector > 0 ? std::pow(z, l) * std::exp(-r) : std::pow(std::conj(z), l) * std::exp(r);
}
}  // namespace

cplx ac_value(const ACResult& res, const ACState& s, PlanarPoint z) {
  return ac_from_r(res.r.evaluate(z), s.l, s.sector, z.z());
}

double fit_decay(const ACResult& res, int l, int sector, double r_min, double r_max, int radii, int angles) {
  std::vector<PlanarPoint> pts;
  for (int i = 0; i < radii; ++i) {
    const double r = r_min * std::pow(r_max / r_min, double(i) / (radii - 1));
    for (int a = 0; a < angles; ++a) {
      const double t = 2.0 * PI * (a + 0.5) / angles;
      pts.push_back({r * std::cos(t), r * std::sin(t)});
    }
  }
  const auto rv = res.r.evaluate(pts);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < radii; ++i) {
    double mean = 0.0;
    for (int a = 0; a < angles; ++a) {
      const std::size_t k = static_cast<std::size_t>(i) * angles + a;
      mean += std::norm(ac_from_r(rv[k], l, sector, pts[k].z()));
    }
    const double x = std::log(std::hypot(pts[i * angles].x, pts[i * angles].y));
    const double y = std::log(mean / angles);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (radii * sxy - sx * sy) / (radii * sxx - sx * sx);
}

// ---- Dubrovin-Novikov ----

SigmaPotential sigma_potential(const Field& b, const elliptic::RectLattice& lat) {
  const Grid& g = b.grid;
  if (!g.periodic) fail(ErrorKind::Domain, "sigma potential expects a periodic cell grid");
  if (std::abs(g.period_x() - 2.0 * lat.omega) > 1e-9 || std::abs(g.period_y() - 2.0 * lat.omega_prime) > 1e-9)
    fail(ErrorKind::Domain, "grid periods differ from the lattice periods");
  SigmaPotential r;
  r.lattice = lat;
  r.hx = g.hx;
  r.hy = g.hy;
  const double cell = g.hx * g.hy;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double q = b(i, j).real() * cell;
      if (q == 0.0) continue;
      const PlanarPoint w = g.point(i, j);
      r.src.push_back(w);
      r.charge.push_back(q);
      r.flux += q;
      r.moment_x += q * w.x;
      r.moment_y += q * w.y;
    }
  return r;
}

double SigmaPotential::value(PlanarPoint z) const {
  const double self = kernels::cell_mean_log(hx, hy);
  double s = 0.0;
  for (std::size_t j = 0; j < src.size(); ++j) {
    const cplx u = z.z() - src[j].z();
    if (std::abs(u) < 1e-12 * (hx + hy))
      s += charge[j] * self;
    else
      s += charge[j] * elliptic::log_sigma(lattice, u).real();
  }
  return s / (2.0 * PI);
}

std::array<double, 2> SigmaPotential::gradient(PlanarPoint z) const {
  // d_x ln|sigma| = Re zeta, d_y ln|sigma| = -Im zeta
  double gx = 0.0, gy = 0.0;
  for (std::size_t j = 0; j < src.size(); ++j) {
    const cplx u = z.z() - src[j].z();
    if (std::abs(u) < 1e-12 * (hx + hy)) continue;
    const cplx zt = elliptic::zeta(lattice, u);
    gx += charge[j] * zt.real();
    gy -= charge[j] * zt.imag();
  }
  return {gx / (2.0 * PI), gy / (2.0 * PI)};
}

cplx unitarity_params(const std::vector<cplx>& zeros, const SigmaPotential& r) {
  cplx s = 0.0;
  for (const cplx a : zeros) s += a;
  const auto& L = r.lattice;
  const double re = (L.eta / L.omega) * (s.real() - r.moment_x / (2.0 * PI));
  const double im = (L.eta_prime / L.omega_prime) * (s.imag() - r.moment_y / (2.0 * PI));
  return {re, im};
}

cplx DNState::value(PlanarPoint z) const {
  cplx v = lambda * std::exp(a * z.z() - r.value(z));
  for (const cplx aj : zeros) v *= elliptic::sigma(r.lattice, z.z() - aj);
  return v;
}

double gauge_phase(const SigmaPotential& r, cplx g, PlanarPoint origin, PlanarPoint z) {
  using Gauss = boost::math::quadrature::gauss<double, 10>;
  const double dx = z.x - origin.x, dy = z.y - origin.y;
  auto integrand = [&](double t) {
    const PlanarPoint p{origin.x + t * dx, origin.y + t * dy};
    const auto g1 = r.gradient(PlanarPoint::of(p.z() + g));
    const auto g0 = r.gradient(p);
    // dPhi = -(R(z+g) - R(z))
    const double dphix = -(g1[0] - g0[0]), dphiy = -(g1[1] - g0[1]);
    return dphiy * dx - dphix * dy;
  };
  return Gauss::integrate(integrand, 0.0, 1.0);
}

cplx measure_multiplier(const DNState& s, cplx g, PlanarPoint origin, PlanarPoint z) {
  const double f = gauge_phase(s.r, g, origin, z);
  const cplx v0 = s.value(z);
  if (std::abs(v0) < 1e-300) fail(ErrorKind::Singular, "base point at a zero of Psi");
  return s.value(PlanarPoint::of(z.z() + g)) * std::exp(-I * f) / v0;
}

DNState dn_state(const Field& b, const elliptic::RectLattice& lat, const std::vector<cplx>& zeros, cplx lambda,
                 std::optional<cplx> a) {
  DNState s;
  s.r = sigma_potential(b, lat);
  const double m = s.r.flux / (2.0 * PI);
  s.m = static_cast<int>(std::lround(m));
  if (s.m < 1 || std::abs(m - s.m) > 1e-6) fail(ErrorKind::Domain, "cell flux must be 2 pi m with m >= 1");
  if (static_cast<int>(zeros.size()) != s.m) fail(ErrorKind::Domain, "number of zeros must equal the flux quantum m");
  s.zeros = zeros;
  s.lambda = lambda;
  s.a = a ? *a : unitarity_params(zeros, s.r);

  const Grid& g = b.grid;
  const PlanarPoint origin{g.x0 + 0.37 * g.period_x(), g.y0 + 0.29 * g.period_y()};
  const PlanarPoint bases[3] = {origin,
                                {g.x0 + 0.61 * g.period_x(), g.y0 + 0.83 * g.period_y()},
                                {g.x0 + 0.13 * g.period_x(), g.y0 + 0.57 * g.period_y()}};
  const cplx periods[2] = {lat.period1(), lat.period2()};
  for (int k = 0; k < 2; ++k) {
    cplx first = 0.0;
    for (int bi = 0; bi < 3; ++bi) {
      const cplx v = measure_multiplier(s, periods[k], origin, bases[bi]);
      if (bi == 0)
        first = v;
      else
        s.base_point_spread = std::max(s.base_point_spread, std::abs(v - first));
    }
    s.multipliers[k] = first;
  }
  s.quasimomentum = {std::arg(s.multipliers[0]) / (2.0 * lat.omega),
                     std::arg(s.multipliers[1]) / (2.0 * lat.omega_prime)};
  return s;
}

cplx wrap_quasimomentum(const elliptic::RectLattice& lat, cplx dp) {
  auto wrap = [](double v, double period) { return v - period * std::round(v / period); };
  return {wrap(dp.real(), PI / lat.omega), wrap(dp.imag(), PI / lat.omega_prime)};
}

cplx quasimomentum_difference(const DNState& s0, const DNState& s1) {
  const cplx d{s1.quasimomentum[0] - s0.quasimomentum[0], s1.quasimomentum[1] - s0.quasimomentum[1]};
  return wrap_quasimomentum(s0.r.lattice, d);
}

cplx predicted_quasimomentum_difference(const DNState& s0, const DNState& s1) {
  cplx d = 0.0;
  for (const cplx a : s1.zeros) d += a;
  for (const cplx a : s0.zeros) d -= a;
  return wrap_quasimomentum(s0.r.lattice, 2.0 * PI * I / s0.r.lattice.cell_area * d);
}

// ---- periodic pair ----

std::array<cplx, 2> pair_residuals(const field::ExpField& c, PlanarPoint z) {
  const auto d = field::derivs(c, z);
  if (std::abs(d.c) < 1e-300) fail(ErrorKind::Singular, "c vanishes");
  const cplx root = std::sqrt(d.c);
  // Phi = 1/2 log c
  const cplx dphi = 0.5 * d.dc / d.c, dbphi = 0.5 * d.dbc / d.c;
  const cplx dbar_root = 0.5 * d.dbc / root;
  const cplx d_inv = -0.5 * d.dc / (d.c * root);
  return {-dbar_root + dbphi * root, d_inv + dphi / root};
}

PeriodicPair periodic_pair(const field::ExpField& c, double period_x, double period_y, int probes) {
  if (!c.real_flag) fail(ErrorKind::Domain, "periodic pair needs a real field");
  PeriodicPair out;
  out.c = c;
  double mn = 1e300, mx = -1e300;
  for (int j = 0; j < probes; ++j)
    for (int i = 0; i < probes; ++i) {
      const PlanarPoint z{period_x * (i + 0.5) / probes, period_y * (j + 0.5) / probes};
      const double v = field::eval_c(c, z).real();
      mn = std::min(mn, v);
      mx = std::max(mx, v);
    }
  if (mn * mx <= 0.0) fail(ErrorKind::Singular, "c vanishes in the cell; use the singular pipeline");
  if (mx < 0.0) fail(ErrorKind::Domain, "negative c: pass -c");
  for (int j = 0; j < probes; ++j)
    for (int i = 0; i < probes; ++i) {
      const auto r = pair_residuals(c, {period_x * (i + 0.5) / probes, period_y * (j + 0.5) / probes});
      out.max_residual_qplus = std::max(out.max_residual_qplus, std::abs(r[0]));
      out.max_residual_q = std::max(out.max_residual_q, std::abs(r[1]));
    }
  return out;
}

}  // namespace magpauli::ground
