#include "magpauli/foliation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>

#include "magpauli/field.hpp"

namespace magpauli::foliation {

namespace {

// F = sum coef e^{alpha zbar + beta z}; the sum is real term-pairwise
struct Term {
  cplx coef, alpha, beta;
};

std::vector<Term> f_terms(const FoliationData& d) {
  const cplx k = d.k, kb = std::conj(d.k);
  std::vector<Term> t{{1.0 / std::norm(k), k, kb}};
  for (std::size_t j = 0; j < d.a.size(); ++j) {
    const cplx l = d.l[j], lb = std::conj(l), a = d.a[j];
    t.push_back({a / ((k + l) * (kb - lb)), l + k, -lb + kb});
    t.push_back({std::conj(a) / ((k - l) * (kb + lb)), -l + k, lb + kb});
  }
  return t;
}

// sum of coef * m(alpha, beta) * e^{...}, with the exponent shifted by -shift (zbar) and -conj(shift) (z)
cplx term_sum(const std::vector<Term>& ts, PlanarPoint p, const std::function<cplx(const Term&)>& m, cplx shift = 0.0) {
  const cplx z = p.z(), zb = std::conj(z);
  cplx s = 0.0;
  for (const auto& t : ts) s += t.coef * m(t) * std::exp((t.alpha - shift) * zb + (t.beta - std::conj(shift)) * z);
  return s;
}

cplx dx_factor(const Term& t) { return t.alpha + t.beta; }
cplx dy_factor(const Term& t) { return I * (t.beta - t.alpha); }

// periodic part F e^{-2 Re(k zbar)}
double p_eval(const std::vector<Term>& ts, cplx k, PlanarPoint z) {
  return term_sum(ts, z, [](const Term&) { return cplx(1.0); }, k).real();
}

cplx reduce(const FoliationData& d, cplx v) {
  return {v.real() - d.period_x * std::round(v.real() / d.period_x),
          v.imag() - d.period_y * std::round(v.imag() / d.period_y)};
}

double dist_point_segment(cplx q, cplx a, cplx b) {
  const cplx ab = b - a;
  const double n = std::norm(ab);
  double t = n > 0.0 ? ((q - a) * std::conj(ab)).real() / n : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(q - (a + t * ab));
}

double shoelace(const std::vector<PlanarPoint>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& a = p[i];
    const auto& b = p[(i + 1) % p.size()];
    s += a.x * b.y - b.x * a.y;
  }
  return 0.5 * s;
}

}  // namespace

spectral::WeightedBA FoliationData::weighted() const {
  return spectral::weighted_from_field(field::trig_field(a, l));
}

void validate(const FoliationData& d) {
  if (d.a.size() != d.l.size()) fail(ErrorKind::Domain, "weights and exponents differ in length");
  if (std::abs(d.k) < 1e-14) fail(ErrorKind::Singular, "k = 0 is excluded");
  if (!(d.period_x > 0.0) || !(d.period_y > 0.0)) fail(ErrorKind::Domain, "periods must be positive");
  for (const cplx l : d.l) {
    if (std::abs(d.k - l) < 1e-12 || std::abs(d.k + l) < 1e-12) fail(ErrorKind::Singular, "k coincides with +-l_j");
    // l zbar - conj(l) z = 2 i Im(l zbar) must advance by 2 pi Z over each period
    for (const cplx g : {cplx(d.period_x, 0.0), cplx(0.0, d.period_y)}) {
      const double turns = 2.0 * std::imag(l * std::conj(g)) / (2 * PI);
      if (std::abs(turns - std::round(turns)) > 1e-9) fail(ErrorKind::Domain, "exponent not periodic on the cell");
    }
  }
}

FoliationData fig6_data(cplx k) { return {{0.2, 0.2}, {0.5, cplx(0.0, 0.5)}, k, 2 * PI, 2 * PI}; }

double f_eval(const FoliationData& d, PlanarPoint z) {
  return term_sum(f_terms(d), z, [](const Term&) { return cplx(1.0); }).real();
}

std::array<double, 2> f_grad(const FoliationData& d, PlanarPoint z) {
  const auto ts = f_terms(d);
  return {term_sum(ts, z, dx_factor).real(), term_sum(ts, z, dy_factor).real()};
}

std::array<double, 3> f_hessian(const FoliationData& d, PlanarPoint z) {
  const auto ts = f_terms(d);
  return {term_sum(ts, z, [](const Term& t) { return dx_factor(t) * dx_factor(t); }).real(),
          term_sum(ts, z, [](const Term& t) { return dx_factor(t) * dy_factor(t); }).real(),
          term_sum(ts, z, [](const Term& t) { return dy_factor(t) * dy_factor(t); }).real()};
}

double f_scale(const FoliationData& d, PlanarPoint z) {
  return std::exp(2.0 * std::real(d.k * std::conj(z.z()))) / std::norm(d.k);
}

cplx psi_prime(const FoliationData& d, PlanarPoint z) { return spectral::psi_prime_weighted(d.weighted(), d.k, z); }

std::array<cplx, 2> grad_identity_residual(const FoliationData& d, PlanarPoint z) {
  const auto ts = f_terms(d);
  const cplx dF = term_sum(ts, z, [](const Term& t) { return 2.0 * t.beta; });
  const cplx dbF = term_sum(ts, z, [](const Term& t) { return 2.0 * t.alpha; });
  const cplx pp = psi_prime(d, z);
  const cplx zz = z.z();
  return {dF - 2.0 * pp / d.k * std::exp(std::conj(d.k) * zz),
          dbF - 2.0 * std::conj(pp) / std::conj(d.k) * std::exp(d.k * std::conj(zz))};
}

double multiplier_defect(const FoliationData& d, PlanarPoint z, cplx g) {
  const double kappa2 = std::exp(2.0 * std::real(d.k * std::conj(g)));
  const PlanarPoint zg = PlanarPoint::of(z.z() + g);
  const double lhs = f_eval(d, zg), rhs = kappa2 * f_eval(d, z);
  return std::abs(lhs - rhs) / std::max(std::abs(lhs), f_scale(d, zg));
}

// ---- critical points ----

std::vector<CriticalPoint> critical_points(const FoliationData& d, int n) {
  validate(d);
  const auto w = d.weighted();
  // offset keeps symmetric zeros off the scan lines
  const double ox = 0.3819660112501051, oy = 0.2763932022500210;
  std::vector<cplx> psi((n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      psi[i + (n + 1) * j] =
          spectral::psi_prime_weighted(w, d.k, {d.period_x * (i + ox) / n, d.period_y * (j + oy) / n});
  std::vector<CriticalPoint> out;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const cplx c[4] = {psi[i + (n + 1) * j], psi[i + 1 + (n + 1) * j], psi[i + 1 + (n + 1) * (j + 1)],
                         psi[i + (n + 1) * (j + 1)]};
      double turn = 0.0;
      for (int e = 0; e < 4; ++e) turn += std::arg(c[(e + 1) % 4] / c[e]);
      if (std::lround(turn / (2 * PI)) == 0) continue;
      PlanarPoint p{d.period_x * (i + ox + 0.5) / n, d.period_y * (j + oy + 0.5) / n};
      bool ok = false;
      for (int it = 0; it < 60; ++it) {
        const auto g = f_grad(d, p);
        const auto h = f_hessian(d, p);
        const double det = h[0] * h[2] - h[1] * h[1];
        if (det == 0.0) break;
        const double dx = -(h[2] * g[0] - h[1] * g[1]) / det, dy = -(-h[1] * g[0] + h[0] * g[1]) / det;
        p.x += dx;
        p.y += dy;
        if (std::hypot(dx, dy) < 1e-14 * (d.period_x + d.period_y)) {
          ok = true;
          break;
        }
      }
      if (!ok) {
        std::ostringstream os;
        os << "Newton did not converge from candidate cell (" << i << ", " << j << ") near (" << p.x << ", " << p.y << ")";
        fail(ErrorKind::Numerical, os.str());
      }
      const cplx r = reduce(d, p.z() - cplx(0.5 * d.period_x, 0.5 * d.period_y)) + cplx(0.5 * d.period_x, 0.5 * d.period_y);
      const PlanarPoint q = PlanarPoint::of(r);
      bool dup = false;
      for (const auto& e : out)
        if (std::abs(reduce(d, e.position.z() - q.z())) < 1e-8) dup = true;
      if (dup) continue;
      const auto h = f_hessian(d, q);
      CriticalPoint cp;
      cp.position = q;
      cp.hessian_det = h[0] * h[2] - h[1] * h[1];
      cp.f_value = f_eval(d, q);
      const double hn = h[0] * h[0] + h[2] * h[2] + 2 * h[1] * h[1];
      cp.kind = std::abs(cp.hessian_det) < 1e-8 * hn ? CriticalKind::Degenerate
                : cp.hessian_det > 0.0               ? CriticalKind::Center
                                                     : CriticalKind::Saddle;
      out.push_back(cp);
    }
  return out;
}

int index_sum(const std::vector<CriticalPoint>& cps) {
  int s = 0;
  for (const auto& c : cps) s += c.index();
  return s;
}

KScan k_scan(const FoliationData& d, cplx kmin, cplx kmax, int n, int grid) {
  KScan r{kmin, kmax, n, std::vector<int>(static_cast<std::size_t>(n) * n, 0)};
#pragma omp parallel for schedule(dynamic) collapse(2)
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      FoliationData e = d;
      e.k = {kmin.real() + (kmax.real() - kmin.real()) * (n > 1 ? double(i) / (n - 1) : 0.0),
             kmin.imag() + (kmax.imag() - kmin.imag()) * (n > 1 ? double(j) / (n - 1) : 0.0)};
      int count = -1;
      try {
        count = static_cast<int>(critical_points(e, grid).size());
      } catch (const Error&) {
      }
      r.counts[i + static_cast<std::size_t>(n) * j] = count;
    }
  return r;
}

// ---- leaves ----

std::string leaf_kind_name(LeafKind k) {
  switch (k) {
    case LeafKind::ClosedNullHomotopic: return "closed-null-homotopic";
    case LeafKind::ClosedEssential: return "closed-essential";
    case LeafKind::OpenQuasiperiodic: return "open-quasiperiodic";
    case LeafKind::Separatrix: return "separatrix";
  }
  return "?";
}

namespace {

struct Tracer {
  const FoliationData& d;
  std::vector<Term> ts;
  double level;
  int orientation;

  std::array<double, 2> grad(PlanarPoint p) const {
    return {term_sum(ts, p, dx_factor).real(), term_sum(ts, p, dy_factor).real()};
  }
  double f(PlanarPoint p) const {
    return term_sum(ts, p, [](const Term&) { return cplx(1.0); }).real();
  }
  cplx tangent(PlanarPoint p) const {
    const auto g = grad(p);
    const double n = std::hypot(g[0], g[1]);
    if (!(n > 0.0)) fail(ErrorKind::Singular, "gradient of F vanishes on the leaf");
    return double(orientation) * cplx(-g[1], g[0]) / n;
  }
  PlanarPoint rk4(PlanarPoint p, double h) const {
    const cplx z = p.z();
    const cplx k1 = tangent(p);
    const cplx k2 = tangent(PlanarPoint::of(z + 0.5 * h * k1));
    const cplx k3 = tangent(PlanarPoint::of(z + 0.5 * h * k2));
    const cplx k4 = tangent(PlanarPoint::of(z + h * k3));
    return PlanarPoint::of(z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
  }
  PlanarPoint project(PlanarPoint p) const {
    for (int it = 0; it < 6; ++it) {
      const double r = f(p) - level;
      const auto g = grad(p);
      const double n2 = g[0] * g[0] + g[1] * g[1];
      if (!(n2 > 0.0)) break;
      p.x -= r * g[0] / n2;
      p.y -= r * g[1] / n2;
      if (std::abs(r) * std::sqrt(1.0 / n2) < 1e-16 * (1.0 + std::abs(p.z()))) break;
    }
    return p;
  }
};

}  // namespace

Trajectory trace_leaf(const FoliationData& d, PlanarPoint start, double max_length, TraceOptions opt) {
  validate(d);
  const std::vector<CriticalPoint> crit = opt.critical ? *opt.critical : critical_points(d, 48);
  Tracer tr{d, f_terms(d), opt.level ? *opt.level : f_eval(d, start), opt.orientation >= 0 ? 1 : -1};
  const double radius = 10.0 * opt.h0;

  auto nearest_saddle = [&](PlanarPoint p, int& which, cplx& shift) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < crit.size(); ++i) {
      if (crit[i].kind == CriticalKind::Center) continue;
      const cplx diff = p.z() - crit[i].position.z();
      const cplx red = reduce(d, diff);
      const double r = std::abs(red);
      if (r < best) {
        best = r;
        which = static_cast<int>(i);
        shift = diff - red;
      }
    }
    return best;
  };
  if (opt.start_guard)
    for (const auto& c : crit)
      if (std::abs(reduce(d, start.z() - c.position.z())) < 2.0 * opt.h0)
        fail(ErrorKind::Singular, "start within 2h of a critical point");

  Trajectory t;
  t.f_level = tr.level;
  PlanarPoint p = opt.level ? tr.project(start) : start;
  const PlanarPoint p0 = p;
  const cplx t0 = tr.tangent(p0);
  t.points.push_back(p);
  double h = opt.h0;
  auto drift = [&](PlanarPoint q) {
    return std::abs(tr.f(q) - tr.level) / std::max(std::abs(tr.level), f_scale(d, q));
  };
  const double min_period = std::min(d.period_x, d.period_y);
  bool done = false;
  while (t.length < max_length && !done) {
    PlanarPoint b;
    for (;;) {
      const PlanarPoint a = tr.rk4(p, h);
      b = tr.rk4(tr.rk4(p, 0.5 * h), 0.5 * h);
      const double err = std::abs(a.z() - b.z());
      if (err <= opt.tol || h <= opt.h_min) {
        if (err > opt.tol) fail(ErrorKind::Numerical, "step collapse while tracing a leaf");
        const double grow = err > 0.0 ? 0.9 * std::pow(opt.tol / err, 0.2) : 2.0;
        h = std::clamp(h * std::min(2.0, grow), opt.h_min, opt.h_max);
        break;
      }
      h = std::max(opt.h_min, h * std::max(0.2, 0.9 * std::pow(opt.tol / err, 0.2)));
    }
    const PlanarPoint q = tr.project(b);
    t.length += std::abs(q.z() - p.z());
    t.max_drift = std::max(t.max_drift, drift(q));

    if (opt.stop_cells) {
      const double cx = std::abs(q.x - p0.x) / d.period_x, cy = std::abs(q.y - p0.y) / d.period_y;
      if (std::max(cx, cy) >= *opt.stop_cells) done = true;
    }

    if (opt.stop_on_closure && t.length > 4.0 * opt.h_max) {
      const cplx rel = q.z() - p0.z();
      const int m = static_cast<int>(std::lround(rel.real() / d.period_x));
      const int n = static_cast<int>(std::lround(rel.imag() / d.period_y));
      const cplx target = p0.z() + cplx(m * d.period_x, n * d.period_y);
      const double sp = ((p.z() - target) * std::conj(t0)).real(), sq = ((q.z() - target) * std::conj(t0)).real();
      const double lateral = dist_point_segment(target, p.z(), q.z());
      if (sp < 0.0 && sq >= 0.0 && lateral < 0.1 * min_period * 1e-2 + 1e-3 * std::abs(q.z() - p.z())) {
        const PlanarPoint tp = PlanarPoint::of(target);
        const bool level_ok = drift(tp) < 1e-7;
        const bool dir_ok = (tr.tangent(q) * std::conj(t0)).real() > 0.9;
        if (level_ok && dir_ok) {
          t.points.push_back(tp);
          t.kind = (m == 0 && n == 0) ? LeafKind::ClosedNullHomotopic : LeafKind::ClosedEssential;
          t.homology = std::array<int, 2>{m, n};
          return t;
        }
      }
    }

    if (t.length > opt.saddle_grace) {
      int which = -1;
      cplx shift;
      if (nearest_saddle(q, which, shift) < radius) {
        t.points.push_back(q);
        t.kind = LeafKind::Separatrix;
        t.end_critical = which;
        t.end_shift = shift;
        return t;
      }
    }
    t.points.push_back(q);
    p = q;
  }
  const PlanarPoint e = t.points.back();
  const double dxc = (e.x - p0.x) / d.period_x, dyc = (e.y - p0.y) / d.period_y;
  if (std::abs(dyc) > 1e-12 * std::abs(dxc))
    t.rotation_estimate = dxc / dyc;
  else
    t.rotation_estimate = std::numeric_limits<double>::infinity();
  t.kind = LeafKind::OpenQuasiperiodic;
  return t;
}

RotationNumber rotation_number(const FoliationData& d, PlanarPoint start, int cells) {
  TraceOptions opt;
  opt.stop_cells = cells;
  opt.stop_on_closure = true;
  const double diag = std::hypot(d.period_x, d.period_y);
  const auto t = trace_leaf(d, start, 40.0 * cells * diag, opt);
  RotationNumber r;
  if (t.kind == LeafKind::ClosedEssential) {
    const auto& hm = *t.homology;
    r.rho = hm[1] != 0 ? double(hm[0]) / hm[1] : std::numeric_limits<double>::infinity();
    r.locked = hm;
    return r;
  }
  if (t.kind != LeafKind::OpenQuasiperiodic) fail(ErrorKind::Numerical, "leaf closed or hit a separatrix; rotation undefined");
  auto ratio = [&](std::size_t upto) {
    const auto& e = t.points[upto];
    const double dx = (e.x - t.points[0].x) / d.period_x, dy = (e.y - t.points[0].y) / d.period_y;
    return std::abs(dy) > 1e-12 * std::abs(dx) ? dx / dy : std::numeric_limits<double>::infinity();
  };
  r.rho = ratio(t.points.size() - 1);
  const double half = ratio(t.points.size() / 2);
  r.confidence = std::isfinite(r.rho) && std::isfinite(half) ? std::abs(r.rho - half) : 0.0;
  for (int q = 1; q <= 3 && !r.locked; ++q)
    for (int pnum = -3 * q; pnum <= 3 * q; ++pnum)
      if (std::gcd(std::abs(pnum), q) == 1 && std::isfinite(r.rho) &&
          std::abs(r.rho - double(pnum) / q) < 10.0 * r.confidence + 1e-6) {
        r.locked = std::array<int, 2>{pnum, q};
        break;
      }
  if (!std::isfinite(r.rho)) r.locked = std::array<int, 2>{1, 0};
  return r;
}

std::vector<Trajectory> limit_cycle_scan(const FoliationData& d, int n) {
  validate(d);
  const auto ts = f_terms(d);
  std::vector<double> pv(static_cast<std::size_t>(n + 1) * n);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= n; ++i)
      pv[i + static_cast<std::size_t>(n + 1) * j] = p_eval(ts, d.k, {d.period_x * i / n, d.period_y * j / n});

  std::vector<PlanarPoint> seeds;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      double a = pv[i + static_cast<std::size_t>(n + 1) * j], b = pv[i + 1 + static_cast<std::size_t>(n + 1) * j];
      if (a * b > 0.0 || (a == 0.0 && b == 0.0)) continue;
      const double y = d.period_y * j / n;
      double lo = d.period_x * i / n, hi = d.period_x * (i + 1) / n;
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double v = p_eval(ts, d.k, {mid, y});
        if ((v < 0.0) == (a < 0.0))
          lo = mid, a = v;
        else
          hi = mid;
      }
      seeds.push_back({0.5 * (lo + hi), y});
    }

  const auto crit = critical_points(d, 48);
  std::vector<char> covered(seeds.size(), 0);
  std::vector<Trajectory> out;
  int traces = 0;
  for (std::size_t s = 0; s < seeds.size() && traces < 64; ++s) {
    if (covered[s]) continue;
    TraceOptions opt;
    opt.level = 0.0;
    opt.critical = crit;
    opt.start_guard = false;
    Trajectory t;
    try {
      t = trace_leaf(d, seeds[s], 10.0 * (d.period_x + d.period_y), opt);
    } catch (const Error&) {
      covered[s] = 1;
      continue;
    }
    ++traces;
    covered[s] = 1;
    for (std::size_t o = 0; o < seeds.size(); ++o) {
      if (covered[o]) continue;
      for (std::size_t i = 0; i + 1 < t.points.size(); ++i) {
        const cplx a = t.points[i].z();
        const cplx q = a + reduce(d, seeds[o].z() - a);
        if (dist_point_segment(q, a, t.points[i + 1].z()) < 1e-3) {
          covered[o] = 1;
          break;
        }
      }
    }
    if (t.kind == LeafKind::ClosedEssential) out.push_back(std::move(t));
  }
  return out;
}

std::vector<double> approach_distances(const FoliationData& d, const Trajectory& cycle, double eps, int periods) {
  if (cycle.kind != LeafKind::ClosedEssential || !cycle.homology) fail(ErrorKind::Domain, "needs an essential closed cycle");
  cplx g((*cycle.homology)[0] * d.period_x, (*cycle.homology)[1] * d.period_y);
  if (std::real(d.k * std::conj(g)) < 0.0) g = -g;
  const cplx gh = g / std::abs(g);
  const auto ts = f_terms(d);
  Tracer tr{d, ts, 0.0, 1};
  const PlanarPoint p0 = cycle.points.front();
  tr.level = eps * f_scale(d, p0);
  const PlanarPoint s = tr.project(p0);
  TraceOptions opt;
  opt.level = tr.level;
  opt.stop_on_closure = false;
  opt.start_guard = false;
  opt.orientation = (tr.tangent(s) * std::conj(gh)).real() > 0.0 ? 1 : -1;
  const auto leaf = trace_leaf(d, s, 1.5 * (periods + 1) * cycle.length, opt);

  Tracer zero{d, ts, 0.0, 1};
  std::vector<double> dist(periods + 1, -1.0);
  for (const auto& q : leaf.points) {
    const double u = ((q.z() - p0.z()) * std::conj(gh)).real() / std::abs(g);
    const int w = static_cast<int>(std::floor(u));
    if (w < 0 || w > periods) continue;
    const PlanarPoint foot = zero.project(q);
    dist[w] = std::max(dist[w], std::abs(foot.z() - q.z()));
  }
  for (double v : dist)
    if (v < 0.0) fail(ErrorKind::Numerical, "epsilon trajectory did not traverse the requested periods");
  return dist;
}

std::optional<Trajectory> separatrix_cycle(const FoliationData& d, int max_edges) {
  const auto crit = critical_points(d, 64);
  std::vector<int> saddles;
  for (std::size_t i = 0; i < crit.size(); ++i)
    if (crit[i].kind == CriticalKind::Saddle) saddles.push_back(static_cast<int>(i));
  if (saddles.empty()) return std::nullopt;

  struct Edge {
    int from, to;
    int m, n;
    std::vector<PlanarPoint> pts;
  };
  std::vector<Edge> edges;
  const double delta = 1e-3 * std::min(d.period_x, d.period_y) / (2 * PI);
  const auto ts = f_terms(d);
  for (const int si : saddles) {
    const auto& c = crit[si];
    const auto h = f_hessian(d, c.position);
    const double a = h[0], b = h[1], cc = h[2];
    std::vector<cplx> dirs;
    if (std::abs(cc) > 1e-12 * (std::abs(a) + std::abs(b) + std::abs(cc))) {
      const double disc = std::sqrt(std::max(0.0, b * b - a * cc));
      dirs = {cplx(1.0, (-b + disc) / cc), cplx(1.0, (-b - disc) / cc)};
    } else {
      dirs = {cplx(0.0, 1.0), cplx(1.0, -a / (2.0 * b))};
    }
    for (cplx v : dirs)
      for (int sg : {1, -1}) {
        const cplx vh = double(sg) * v / std::abs(v);
        const PlanarPoint st = PlanarPoint::of(c.position.z() + delta * vh);
        Tracer tr{d, ts, c.f_value, 1};
        TraceOptions opt;
        opt.level = c.f_value;
        opt.critical = crit;
        opt.stop_on_closure = false;
        opt.start_guard = false;
        opt.saddle_grace = 30.0 * opt.h0;
        opt.orientation = (tr.tangent(st) * std::conj(vh)).real() > 0.0 ? 1 : -1;
        Trajectory t;
        try {
          t = trace_leaf(d, st, 3.0 * (d.period_x + d.period_y), opt);
        } catch (const Error&) {
          continue;
        }
        if (t.kind != LeafKind::Separatrix || crit[t.end_critical].kind != CriticalKind::Saddle) continue;
        Edge e;
        e.from = si;
        e.to = t.end_critical;
        e.m = static_cast<int>(std::lround(t.end_shift.real() / d.period_x));
        e.n = static_cast<int>(std::lround(t.end_shift.imag() / d.period_y));
        e.pts.push_back(c.position);
        e.pts.insert(e.pts.end(), t.points.begin(), t.points.end());
        e.pts.push_back(PlanarPoint::of(crit[e.to].position.z() + t.end_shift));
        edges.push_back(std::move(e));
      }
  }

  const double cell = d.period_x * d.period_y;
  std::optional<Trajectory> best;
  double best_gap = std::numeric_limits<double>::infinity();
  struct Node {
    int s, m, n;
    bool operator==(const Node& o) const { return s == o.s && m == o.m && n == o.n; }
  };
  std::vector<int> path;
  std::vector<Node> nodes;
  std::function<void(Node)> dfs = [&](Node u) {
    if (static_cast<int>(path.size()) >= max_edges) return;
    for (std::size_t ei = 0; ei < edges.size(); ++ei) {
      const auto& e = edges[ei];
      if (e.from != u.s) continue;
      const Node v{e.to, u.m + e.m, u.n + e.n};
      if (v == nodes.front() && path.size() >= 2) {
        path.push_back(static_cast<int>(ei));
        std::vector<PlanarPoint> loop;
        Node at = nodes.front();
        for (const int pe : path) {
          const cplx off(at.m * d.period_x, at.n * d.period_y);
          for (std::size_t i = 0; i + 1 < edges[pe].pts.size(); ++i)
            loop.push_back(PlanarPoint::of(edges[pe].pts[i].z() + off));
          at = {edges[pe].to, at.m + edges[pe].m, at.n + edges[pe].n};
        }
        const double area = std::abs(shoelace(loop));
        const double gap = std::abs(area / cell - 1.0);
        if (gap < best_gap) {
          best_gap = gap;
          Trajectory t;
          t.points = loop;
          t.points.push_back(loop.front());
          t.f_level = crit[nodes.front().s].f_value;
          t.kind = LeafKind::ClosedNullHomotopic;
          t.homology = std::array<int, 2>{0, 0};
          t.separatrix_cycle = true;
          t.enclosed_area = area;
          for (std::size_t i = 0; i + 1 < t.points.size(); ++i)
            t.length += std::abs(t.points[i + 1].z() - t.points[i].z());
          best = std::move(t);
        }
        path.pop_back();
        continue;
      }
      if (std::find(nodes.begin(), nodes.end(), v) != nodes.end()) continue;
      path.push_back(static_cast<int>(ei));
      nodes.push_back(v);
      dfs(v);
      nodes.pop_back();
      path.pop_back();
    }
  };
  for (const int si : saddles) {
    nodes = {Node{si, 0, 0}};
    path.clear();
    dfs(nodes.front());
  }
  return best;
}

LeafVerdict classify_leaf(const Trajectory& t, const FoliationData& d) {
  LeafVerdict v;
  const double cell = d.period_x * d.period_y;
  if (t.separatrix_cycle) {
    v.area_ratio = t.enclosed_area / cell;
    if (std::abs(v.area_ratio - 1.0) < 0.01) {
      v.kase = LeafCase::MaximalSeparatrix;
      v.admissible = true;
      v.note = "null-homotopic separatrix cycle bounding the full cell area";
    } else {
      v.note = "separatrix cycle does not bound the full cell area";
    }
    return v;
  }
  const auto w = d.weighted();
  auto logpsi = [&](PlanarPoint p) { return std::log(std::abs(spectral::psi_prime_weighted(w, d.k, p))); };
  double scale_max = 0.0;
  for (const auto& p : t.points) scale_max = std::max(scale_max, f_scale(d, p));

  if (t.kind == LeafKind::ClosedEssential && t.homology) {
    const cplx g((*t.homology)[0] * d.period_x, (*t.homology)[1] * d.period_y);
    const int M = 3;
    double s = 0.0;
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& p : t.points) {
      const double l0 = logpsi(p), l1 = logpsi(PlanarPoint::of(p.z() + double(M) * g));
      s += (l1 - l0) / (M * std::abs(g));
      lo = std::min(lo, l0);
      hi = std::max(hi, l0);
    }
    v.growth_rate = s / t.points.size();
    if (v.growth_rate < 0.0) v.growth_rate = -v.growth_rate;  // reported along the growth direction
    v.sup_over_inf = std::exp(hi - lo);
    const bool zero_level = std::abs(t.f_level) <= 1e-8 * scale_max;
    if (zero_level && v.growth_rate > 1e-6) {
      v.kase = LeafCase::EssentialZero;
      v.note = "essential cycle on F = 0: psi' grows exponentially along it";
    } else if (v.growth_rate < 1e-8) {
      v.kase = LeafCase::BoundedOpen;
      v.admissible = true;
      v.note = "essential closed leaf with unimodular multiplier; psi' bounded";
    } else {
      v.note = "mixed evidence on closed essential leaf";
    }
    return v;
  }
  if (t.kind == LeafKind::OpenQuasiperiodic) {
    const std::size_t n = t.points.size();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo, hi1 = -lo, hi2 = -lo;
    for (std::size_t i = 0; i < n; ++i) {
      const double l = logpsi(t.points[i]);
      lo = std::min(lo, l);
      hi = std::max(hi, l);
      (i < n / 2 ? hi1 : hi2) = std::max(i < n / 2 ? hi1 : hi2, l);
    }
    v.sup_over_inf = std::exp(hi - lo);
    const bool away_from_zero = std::abs(t.f_level) > 1e-8 * scale_max;
    if (away_from_zero && hi2 - hi1 < 1.0 && v.sup_over_inf < 1e6) {
      v.kase = LeafCase::BoundedOpen;
      v.admissible = true;
      v.note = "open leaf with psi' bounded along the lift";
    } else {
      v.note = "psi' not bounded along the open leaf";
    }
    return v;
  }
  v.note = t.kind == LeafKind::ClosedNullHomotopic ? "null-homotopic closed leaf around a center"
                                                   : "leaf terminates at a saddle";
  return v;
}

}  // namespace magpauli::foliation
