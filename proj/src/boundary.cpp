#include "magpauli/boundary.hpp"

#include <fftw3.h>

#include <Eigen/SVD>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace magpauli::boundary {

// ---- circle functions ----

CircleFn circle_deriv(const CircleFn& f) {
  const int n = static_cast<int>(f.size());
  CircleFn spec(n), out(n);
  auto* in = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(f.data()));
  auto* sp = reinterpret_cast<fftw_complex*>(spec.data());
  fftw_plan fw = fftw_plan_dft_1d(n, in, sp, FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(fw);
  fftw_destroy_plan(fw);
  for (int m = 0; m < n; ++m) {
    const int w = m <= n / 2 ? m : m - n;
    spec[m] *= (2 * w == n) ? cplx(0.0) : I * double(w) / double(n);
  }
  fftw_plan bw = fftw_plan_dft_1d(n, sp, reinterpret_cast<fftw_complex*>(out.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(bw);
  fftw_destroy_plan(bw);
  return out;
}

CircleFn circle_sample(int n, const std::function<cplx(double)>& f) {
  CircleFn out(n);
  for (int i = 0; i < n; ++i) out[i] = f(2.0 * PI * i / n);
  return out;
}

namespace {

CircleFn mul(const CircleFn& a, const CircleFn& b) {
  CircleFn o(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) o[i] = a[i] * b[i];
  return o;
}
CircleFn add(const CircleFn& a, const CircleFn& b) {
  CircleFn o(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) o[i] = a[i] + b[i];
  return o;
}
CircleFn scale(cplx s, const CircleFn& a) {
  CircleFn o(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) o[i] = s * a[i];
  return o;
}
CircleFn conj(const CircleFn& a) {
  CircleFn o(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) o[i] = std::conj(a[i]);
  return o;
}
double sup(const CircleFn& a) {
  double m = 0.0;
  for (const cplx v : a) m = std::max(m, std::abs(v));
  return m;
}

// real or complex trigonometric polynomial with |m| <= modes
CircleFn random_trig(std::mt19937_64& rng, int n, int modes, double amp, bool real) {
  std::normal_distribution<double> g(0.0, amp);
  std::vector<std::pair<int, cplx>> c;
  for (int m = -modes; m <= modes; ++m) c.push_back({m, cplx(g(rng), g(rng))});
  return circle_sample(n, [&](double t) {
    cplx s = 0.0;
    for (const auto& [m, v] : c) s += v * std::exp(I * double(m) * t);
    return real ? cplx(s.real(), 0.0) : s;
  });
}

// i(alpha d_t + alpha'/2) + v as an operator record
CircleOp symmetric_op(const CircleFn& alpha, const CircleFn& v) {
  const CircleFn da = circle_deriv(alpha);
  CircleOp op;
  op.a = alpha;
  op.b = add(scale(0.5 * I, da), v);
  return op;
}

}  // namespace

CircleFn CircleOp::apply(const CircleFn& f) const { return add(scale(I, mul(a, circle_deriv(f))), mul(b, f)); }

CircleOp CircleOp::adjoint() const {
  // (i a d + b)+ f = i (conj(a) f)' + conj(b) f
  CircleOp o;
  o.a = conj(a);
  o.b = add(scale(I, circle_deriv(o.a)), conj(b));
  return o;
}

bool CircleOp::zero_order(double tol) const { return sup(a) <= tol; }

// ---- records ----

std::string variant_name(const BoundaryCondition& bc) {
  struct V {
    std::string operator()(const Dirichlet&) const { return "dirichlet"; }
    std::string operator()(const Neumann&) const { return "neumann"; }
    std::string operator()(const Leontovich&) const { return "leontovich"; }
    std::string operator()(const DBar&) const { return "dbar"; }
    std::string operator()(const GeneralLocal&) const { return "general_local"; }
    std::string operator()(const MixingUltralocal& m) const { return "mixing_ultralocal_" + std::to_string(m.kind); }
    std::string operator()(const MixingLocal&) const { return "mixing_local"; }
  };
  return std::visit(V{}, bc);
}

int circle_size(const BoundaryCondition& bc) {
  struct V {
    int operator()(const Dirichlet&) const { return 0; }
    int operator()(const Neumann&) const { return 0; }
    int operator()(const Leontovich& r) const { return int(r.alpha.size()); }
    int operator()(const DBar& r) const { return int(r.v.size()); }
    int operator()(const GeneralLocal& r) const { return int(r.u.b.size()); }
    int operator()(const MixingUltralocal& r) const { return int(r.r.size()); }
    int operator()(const MixingLocal& r) const { return int(r.a.size()); }
  };
  return std::visit(V{}, bc);
}

bool is_mixing(const BoundaryCondition& bc) {
  return std::holds_alternative<MixingUltralocal>(bc) || std::holds_alternative<MixingLocal>(bc);
}

namespace {
double max_imag(const CircleFn& f) {
  double m = 0.0;
  for (const cplx v : f) m = std::max(m, std::abs(v.imag()));
  return m;
}
}  // namespace

double hermiticity_defect(const CircleOp& u, const CircleOp& v, int basis) {
  const int n = static_cast<int>(u.b.size());
  const CircleOp ua = u.adjoint(), va = v.adjoint();
  double worst = 0.0;
  for (int q = -basis / 2; q < basis / 2; ++q) {
    const CircleFn e = circle_sample(n, [q](double t) { return std::exp(I * double(q) * t); });
    const CircleFn x = add(u.apply(va.apply(e)), scale(-1.0, v.apply(ua.apply(e))));
    for (int m = -basis / 2; m < basis / 2; ++m) {
      cplx s = 0.0;
      for (int i = 0; i < n; ++i) s += std::exp(-I * double(m) * (2.0 * PI * i / n)) * x[i];
      worst = std::max(worst, std::abs(s) / n);
    }
  }
  return worst;
}

std::string check_record(const BoundaryCondition& bc, double tol) {
  if (const auto* r = std::get_if<Leontovich>(&bc)) {
    if (r->alpha.size() != r->beta.size()) return "alpha and beta lengths differ";
    if (max_imag(r->alpha) > tol || max_imag(r->beta) > tol) return "Leontovich coefficients must be real";
    for (std::size_t i = 0; i < r->alpha.size(); ++i)
      if (std::abs(r->alpha[i]) + std::abs(r->beta[i]) <= tol) return "(alpha, beta) vanishes";
  } else if (const auto* r = std::get_if<DBar>(&bc)) {
    if (r->sign != 1 && r->sign != -1) return "d-bar sign must be +1 or -1";
    if (max_imag(r->v) > tol) return "d-bar v must be real";
  } else if (const auto* r = std::get_if<GeneralLocal>(&bc)) {
    const double scale_uv = std::max(1.0, sup(r->u.a) + sup(r->u.b)) * std::max(1.0, sup(r->v.a) + sup(r->v.b));
    if (hermiticity_defect(r->u, r->v) > tol * 1e3 * scale_uv) return "U V+ != V U+";
  } else if (const auto* r = std::get_if<MixingUltralocal>(&bc)) {
    if (r->kind == 3) {
      if (std::abs(std::norm(r->a) + std::norm(r->b) - 1.0) > 1e-9) return "(a, b) not a unit vector";
      if (std::abs(r->a * std::conj(r->c) + r->b * std::conj(r->d)) > tol) return "a conj(c) + b conj(d) != 0";
    } else if (r->kind == 1 || r->kind == 2) {
      for (const auto& m : r->r)
        if (std::abs(m[0].imag()) > tol || std::abs(m[3].imag()) > tol || std::abs(m[1] - std::conj(m[2])) > tol)
          return "R is not Hermitian";
    } else {
      return "unknown mixing kind";
    }
  } else if (const auto* r = std::get_if<MixingLocal>(&bc)) {
    if (max_imag(r->alpha_plus) > tol || max_imag(r->a) > tol || max_imag(r->d) > tol)
      return "alpha+, a, d must be real";
    for (std::size_t i = 0; i < r->b.size(); ++i)
      if (std::abs(r->c[i] - std::conj(r->b[i])) > tol) return "c != conj(b)";
  }
  return {};
}

std::vector<BoundarySample> lagrangian_samples(const BoundaryCondition& bc, std::mt19937_64& rng, int count) {
  int n = circle_size(bc);
  if (n == 0) n = 128;
  std::vector<BoundarySample> out;
  for (int c = 0; c < count; ++c) {
    const CircleFn chi = random_trig(rng, n, 6, 1.0, false);
    const CircleFn chi2 = random_trig(rng, n, 6, 1.0, false);
    const CircleFn zero(n, 0.0);
    BoundarySample s;
    if (std::holds_alternative<Dirichlet>(bc)) {
      s.p1 = chi;
      s.p2 = zero;
    } else if (std::holds_alternative<Neumann>(bc)) {
      s.p1 = zero;
      s.p2 = chi;
    } else if (const auto* r = std::get_if<Leontovich>(&bc)) {
      s.p1 = scale(-1.0, mul(r->beta, chi));
      s.p2 = mul(r->alpha, chi);
    } else if (const auto* r = std::get_if<DBar>(&bc)) {
      s.p2 = chi;
      s.p1 = add(scale(double(r->sign) * I, circle_deriv(chi)), mul(r->v, chi));
    } else if (const auto* r = std::get_if<GeneralLocal>(&bc)) {
      auto divide = [](const CircleFn& num, const CircleFn& den) {
        CircleFn o(num.size());
        for (std::size_t i = 0; i < num.size(); ++i) {
          if (std::abs(den[i]) < 1e-12) fail(ErrorKind::Singular, "zero-order operator not invertible");
          o[i] = num[i] / den[i];
        }
        return o;
      };
      if (r->u.zero_order()) {
        s.p2 = chi;
        s.p1 = divide(r->v.apply(chi), r->u.b);
      } else if (r->v.zero_order()) {
        s.p1 = chi;
        s.p2 = divide(r->u.apply(chi), r->v.b);
      } else {
        fail(ErrorKind::Domain, "sampler needs a zero-order U or V");
      }
    } else if (const auto* r = std::get_if<MixingUltralocal>(&bc)) {
      if (r->kind == 3) {
        s.p1 = scale(-r->b, chi);
        s.m1 = scale(r->a, chi);
        s.p2 = scale(-r->d, chi2);
        s.m2 = scale(r->c, chi2);
      } else {
        CircleFn x1 = chi, x2 = chi2, y1(n), y2(n);
        for (int i = 0; i < n; ++i) {
          const auto& m = r->r[i];
          y1[i] = m[0] * x1[i] + m[1] * x2[i];
          y2[i] = m[2] * x1[i] + m[3] * x2[i];
        }
        if (r->kind == 1) {
          s.p2 = x1, s.m2 = x2, s.p1 = y1, s.m1 = y2;
        } else {
          s.p1 = x1, s.m1 = x2, s.p2 = y1, s.m2 = y2;
        }
      }
    } else if (const auto* r = std::get_if<MixingLocal>(&bc)) {
      const CircleOp ap = symmetric_op(r->alpha_plus, r->a);
      s.p2 = chi;
      s.m1 = chi2;
      s.p1 = add(ap.apply(chi), mul(r->b, chi2));
      s.m2 = scale(-1.0, add(mul(r->c, chi), mul(r->d, chi2)));
    }
    out.push_back(std::move(s));
  }
  return out;
}

double relation_residual(const BoundaryCondition& bc, const std::vector<BoundarySample>& samples) {
  double worst = 0.0;
  for (const auto& s : samples) {
    const double nrm = std::max({1e-300, sup(s.p1), sup(s.p2), s.m1.empty() ? 0.0 : sup(s.m1), s.m2.empty() ? 0.0 : sup(s.m2)});
    double r = 0.0;
    if (std::holds_alternative<Dirichlet>(bc)) {
      r = sup(s.p2);
    } else if (std::holds_alternative<Neumann>(bc)) {
      r = sup(s.p1);
    } else if (const auto* b = std::get_if<Leontovich>(&bc)) {
      r = sup(add(mul(b->alpha, s.p1), mul(b->beta, s.p2)));
    } else if (const auto* b = std::get_if<DBar>(&bc)) {
      r = sup(add(s.p1, scale(-1.0, add(scale(double(b->sign) * I, circle_deriv(s.p2)), mul(b->v, s.p2)))));
    } else if (const auto* b = std::get_if<GeneralLocal>(&bc)) {
      r = sup(add(b->u.apply(s.p1), scale(-1.0, b->v.apply(s.p2))));
    } else if (const auto* b = std::get_if<MixingUltralocal>(&bc)) {
      if (b->kind == 3) {
        r = std::max(sup(add(scale(b->a, s.p1), scale(b->b, s.m1))), sup(add(scale(b->c, s.p2), scale(b->d, s.m2))));
      } else {
        const CircleFn &x1 = b->kind == 1 ? s.p2 : s.p1, &x2 = b->kind == 1 ? s.m2 : s.m1;
        const CircleFn &y1 = b->kind == 1 ? s.p1 : s.p2, &y2 = b->kind == 1 ? s.m1 : s.m2;
        for (std::size_t i = 0; i < x1.size(); ++i) {
          const auto& m = b->r[i];
          r = std::max(r, std::abs(y1[i] - m[0] * x1[i] - m[1] * x2[i]));
          r = std::max(r, std::abs(y2[i] - m[2] * x1[i] - m[3] * x2[i]));
        }
      }
    } else if (const auto* b = std::get_if<MixingLocal>(&bc)) {
      const CircleOp ap = symmetric_op(b->alpha_plus, b->a);
      r = std::max(sup(add(s.p1, scale(-1.0, add(ap.apply(s.p2), mul(b->b, s.m1))))),
                   sup(add(s.m2, add(mul(b->c, s.p2), mul(b->d, s.m1)))));
    }
    worst = std::max(worst, r / nrm);
  }
  return worst;
}

double lagrangian_residual(const BoundaryCondition& bc, const std::vector<BoundarySample>& samples) {
  const bool mixing = is_mixing(bc);
  auto form = [mixing](const BoundarySample& u, const BoundarySample& v) {
    const std::size_t n = u.p1.size();
    cplx s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      s += u.p1[i] * std::conj(v.p2[i]) - u.p2[i] * std::conj(v.p1[i]);
      if (mixing) s += u.m1[i] * std::conj(v.m2[i]) - u.m2[i] * std::conj(v.m1[i]);
    }
    return s * (2.0 * PI / double(n));
  };
  auto norm = [mixing](const BoundarySample& u) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.p1.size(); ++i) {
      s += std::norm(u.p1[i]) + std::norm(u.p2[i]);
      if (mixing) s += std::norm(u.m1[i]) + std::norm(u.m2[i]);
    }
    return std::sqrt(s * 2.0 * PI / double(u.p1.size()));
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i)
    for (std::size_t j = i; j < samples.size(); ++j)
      worst = std::max(worst, std::abs(form(samples[i], samples[j])) / (norm(samples[i]) * norm(samples[j])));
  return worst;
}

BoundaryCondition random_record(const std::string& variant, std::mt19937_64& rng, int n) {
  std::uniform_int_distribution<int> wind(-2, 2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  if (variant == "dirichlet") return Dirichlet{};
  if (variant == "neumann") return Neumann{};
  if (variant == "leontovich") {
    const int w = wind(rng);
    const CircleFn wob = random_trig(rng, n, 2, 0.15, true), rad = random_trig(rng, n, 2, 0.1, true);
    Leontovich r;
    r.alpha.resize(n);
    r.beta.resize(n);
    for (int i = 0; i < n; ++i) {
      const double t = 2.0 * PI * i / n, ang = w * t + wob[i].real(), rr = 1.0 + rad[i].real();
      r.alpha[i] = rr * std::cos(ang);
      r.beta[i] = rr * std::sin(ang);
    }
    return r;
  }
  if (variant == "dbar") return DBar{random_trig(rng, n, 3, 0.5, true), u(rng) < 0 ? -1 : 1};
  if (variant == "general_local") {
    const CircleFn lx = random_trig(rng, n, 2, 0.1, false);
    CircleFn x(n);
    for (int i = 0; i < n; ++i) x[i] = std::exp(lx[i]);
    const CircleOp s = symmetric_op(random_trig(rng, n, 2, 0.4, true), random_trig(rng, n, 3, 0.5, true));
    CircleOp mult{CircleFn(n, 0.0), x}, xs{mul(x, s.a), mul(x, s.b)};
    return u(rng) < 0 ? GeneralLocal{mult, xs} : GeneralLocal{xs, mult};
  }
  if (variant.rfind("mixing_ultralocal_", 0) == 0) {
    MixingUltralocal r;
    r.kind = std::stoi(variant.substr(18));
    if (r.kind == 3) {
      cplx a{u(rng), u(rng)}, b{u(rng), u(rng)};
      const double nr = std::sqrt(std::norm(a) + std::norm(b));
      a /= nr;
      b /= nr;
      const cplx ph = std::exp(I * PI * u(rng));
      r.a = a, r.b = b, r.c = -std::conj(b) * ph, r.d = std::conj(a) * ph;
    } else {
      const CircleFn r11 = random_trig(rng, n, 2, 0.5, true), r22 = random_trig(rng, n, 2, 0.5, true);
      const CircleFn r12 = random_trig(rng, n, 2, 0.5, false);
      for (int i = 0; i < n; ++i) r.r.push_back({r11[i], r12[i], std::conj(r12[i]), r22[i]});
    }
    return r;
  }
  if (variant == "mixing_local") {
    MixingLocal r;
    r.alpha_plus = random_trig(rng, n, 2, 0.4, true);
    r.a = random_trig(rng, n, 2, 0.5, true);
    r.b = random_trig(rng, n, 2, 0.5, false);
    r.c = conj(r.b);
    r.d = random_trig(rng, n, 2, 0.5, true);
    return r;
  }
  fail(ErrorKind::Schema, "unknown boundary-condition variant: " + variant);
}

BoundaryCondition corrupt(const BoundaryCondition& bc, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.2, 0.4);
  const double e = u(rng);
  if (const auto* r = std::get_if<Leontovich>(&bc)) {
    Leontovich o = *r;
    for (std::size_t i = 0; i < o.beta.size(); ++i) o.beta[i] += e * I * o.alpha[i] + 0.1 * e * I;
    return o;
  }
  if (const auto* r = std::get_if<DBar>(&bc)) {
    DBar o = *r;
    for (auto& v : o.v) v += e * I;
    return o;
  }
  if (const auto* r = std::get_if<GeneralLocal>(&bc)) {
    GeneralLocal o = *r;
    CircleOp& target = o.u.zero_order() ? o.v : o.u;
    const CircleOp& mult = o.u.zero_order() ? o.u : o.v;
    for (std::size_t i = 0; i < target.b.size(); ++i) target.b[i] += e * I * mult.b[i];
    return o;
  }
  if (const auto* r = std::get_if<MixingUltralocal>(&bc)) {
    MixingUltralocal o = *r;
    if (o.kind == 3) {
      o.c += e * o.a;
      o.d += e * o.b;
    } else {
      for (auto& m : o.r) m[0] += e * I;
    }
    return o;
  }
  if (const auto* r = std::get_if<MixingLocal>(&bc)) {
    MixingLocal o = *r;
    for (auto& v : o.c) v += e;
    return o;
  }
  fail(ErrorKind::Domain, variant_name(bc) + " has no coefficients to corrupt");
}

int leontovich_charge(const std::vector<double>& alpha, const std::vector<double>& beta) {
  const std::size_t n = alpha.size();
  if (n < 3 || beta.size() != n) fail(ErrorKind::Domain, "alpha and beta need equal lengths >= 3");
  double mx = 0.0, mn = 1e300;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::hypot(alpha[i], beta[i]);
    mx = std::max(mx, r);
    mn = std::min(mn, r);
  }
  if (mn <= 1e-8 * mx) fail(ErrorKind::Singular, "(alpha, beta) nearly vanishes; charge ill-defined");
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    double d = std::atan2(beta[j], alpha[j]) - std::atan2(beta[i], alpha[i]);
    // line angle: reduce modulo pi into (-pi/2, pi/2]
    d -= PI * std::round(d / PI);
    total += d;
  }
  const double w = total / (2.0 * PI);
  if (std::abs(w - std::round(w)) > 0.25) fail(ErrorKind::Numerical, "half-integer line winding (sign flip in samples)");
  return static_cast<int>(std::lround(w));
}

// ---- d-bar and leaf forms ----

DBarReport dbar_extract(const std::function<cplx(PlanarPoint)>& qplus_ratio, const Contour& c) {
  DBarReport rep;
  const std::size_t n = c.points.size();
  const std::size_t segs = c.closed ? n : n - 1;
  for (std::size_t i = 0; i < segs; ++i) {
    const PlanarPoint a = c.points[i], b = c.points[(i + 1) % n];
    const double tangent = std::atan2(b.y - a.y, b.x - a.x);
    const PlanarPoint m{0.5 * (a.x + b.x), 0.5 * (a.y + b.y)};
    const cplx v = std::exp(-I * (tangent - PI / 2)) * qplus_ratio(m);
    rep.v.push_back(v);
    rep.max_imag = std::max(rep.max_imag, std::abs(v.imag()));
  }
  return rep;
}

namespace {

// fourth-order central differences
cplx fd(const PointFn& f, PlanarPoint p, int axis, double h) {
  auto at = [&](double s) { return f(axis == 0 ? PlanarPoint{p.x + s, p.y} : PlanarPoint{p.x, p.y + s}); };
  return (-at(2 * h) + 8.0 * at(h) - 8.0 * at(-h) + at(-2 * h)) / (12.0 * h);
}

}  // namespace

FormCoeffs leaf_form_scalar(const PointFn& psi, const PointFn& phi, PlanarPoint p, double h) {
  const cplx v = psi(p);
  if (std::abs(v) < 1e-300) fail(ErrorKind::Singular, "zero of psi");
  const double tx = (fd(psi, p, 0, h) / v).imag(), ty = (fd(psi, p, 1, h) / v).imag();
  const double fx = fd(phi, p, 0, h).real(), fy = fd(phi, p, 1, h).real();
  return {ty + fx, -tx + fy};
}

FormCoeffs leaf_form_mixing(const PointFn& psi_plus, const PointFn& psi_minus, const PointFn& phi, PlanarPoint p,
                            double h) {
  const cplx a = psi_plus(p), b = psi_minus(p);
  const double nrm = std::norm(a) + std::norm(b);
  if (nrm < 1e-300) fail(ErrorKind::Singular, "simultaneous zero of both components");
  // |psi|^2 theta_x = Im(conj(psi) psi_x)
  const double ax = (std::conj(a) * fd(psi_plus, p, 0, h)).imag(), ay = (std::conj(a) * fd(psi_plus, p, 1, h)).imag();
  const double bx = (std::conj(b) * fd(psi_minus, p, 0, h)).imag(), by = (std::conj(b) * fd(psi_minus, p, 1, h)).imag();
  const double fx = fd(phi, p, 0, h).real(), fy = fd(phi, p, 1, h).real();
  return {nrm * fx + ay + by, nrm * fy - ax - bx};
}

double form_residual(const std::function<FormCoeffs(PlanarPoint)>& form, const Contour& c) {
  const std::size_t n = c.points.size();
  const std::size_t segs = c.closed ? n : n - 1;
  double worst = 0.0;
  for (std::size_t i = 0; i < segs; ++i) {
    const PlanarPoint a = c.points[i], b = c.points[(i + 1) % n];
    const double dx = b.x - a.x, dy = b.y - a.y, len = std::hypot(dx, dy);
    if (len == 0.0) continue;
    const FormCoeffs w = form({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
    const double wn = std::hypot(w.dx, w.dy);
    if (wn == 0.0) continue;
    worst = std::max(worst, std::abs(w.dx * dx + w.dy * dy) / (wn * len));
  }
  return worst;
}

Contour trace_form_leaf(const std::function<FormCoeffs(PlanarPoint)>& form, PlanarPoint start, double step, int steps) {
  std::array<double, 2> prev{0.0, 0.0};
  auto dir = [&](PlanarPoint p) {
    const FormCoeffs w = form(p);
    const double n = std::hypot(w.dx, w.dy);
    if (n < 1e-300) fail(ErrorKind::Singular, "singular point of the foliation");
    std::array<double, 2> d{w.dy / n, -w.dx / n};
    if (d[0] * prev[0] + d[1] * prev[1] < 0.0) d = {-d[0], -d[1]};
    return d;
  };
  std::vector<PlanarPoint> pts{start};
  PlanarPoint p = start;
  for (int s = 0; s < steps; ++s) {
    const auto k1 = dir(p);
    prev = k1;
    const auto k2 = dir({p.x + 0.5 * step * k1[0], p.y + 0.5 * step * k1[1]});
    const auto k3 = dir({p.x + 0.5 * step * k2[0], p.y + 0.5 * step * k2[1]});
    const auto k4 = dir({p.x + step * k3[0], p.y + step * k3[1]});
    p = {p.x + step * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) / 6.0, p.y + step * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) / 6.0};
    pts.push_back(p);
  }
  return make_contour(std::move(pts), false);
}

std::array<cplx, 3> psi_prime_grad(const spectral::WeightedBA& w, cplx k, PlanarPoint z) {
  const cplx zz = z.z(), zb = std::conj(zz);
  cplx v = 0.0, vx = 0.0, vy = 0.0;
  for (const auto& t : w.terms) {
    const cplx d = k - t.k;
    cplx f;
    if (t.k == cplx(0.0, 0.0) && t.p == cplx(0.0, 0.0))
      f = t.kappa * std::exp(k * zb);
    else if (std::abs(d) < 1e-300)
      fail(ErrorKind::Singular, "k at a pole of psi'");
    else
      f = k * t.kappa * std::exp(t.p * zz + d * zb) / d;
    v += f;
    vx += (t.p + d) * f;
    vy += I * (t.p - d) * f;
  }
  return {v, vx, vy};
}

cplx ZeroModePair::plus(PlanarPoint z) const {
  const cplx c = spectral::weighted_c(w, z);
  return psi_prime_grad(w, k, z)[0] / std::sqrt(c);
}

cplx ZeroModePair::minus(PlanarPoint z) const {
  if (lambda == cplx(0.0, 0.0)) return 0.0;
  return lambda * spectral::qplus_ratio(w, k, z) * plus(z);
}

double ZeroModePair::phi(PlanarPoint z) const { return -0.5 * std::log(std::abs(spectral::weighted_c(w, z))); }

// ---- Example 1 ----

spectral::WeightedBA SpecialContourData1::weighted() const {
  spectral::WeightedBA w;
  w.terms.push_back({kappa[0], 0.0, 0.0});
  for (int j = 0; j < n; ++j) {
    const cplx p{a, b[j]};
    w.terms.push_back({kappa[j + 1], p, std::conj(p)});
    w.terms.push_back({kappa[j + 1], -p, -std::conj(p)});
  }
  return w;
}

double SpecialContourData1::y_period() const { return PI / std::abs(a); }

SpecialContourData1 special_contour_kind1(int n, double a, const std::vector<double>& b, double k) {
  if (n < 1 || static_cast<int>(b.size()) != n) fail(ErrorKind::Domain, "need n values b_j");
  if (a == 0.0 || k == 0.0) fail(ErrorKind::Domain, "a and k must be nonzero");
  for (int i = 0; i < n; ++i) {
    if (b[i] == 0.0) fail(ErrorKind::Domain, "b_j must be nonzero");
    for (int j = 0; j < i; ++j)
      if (std::abs(b[i] - b[j]) < 1e-12) fail(ErrorKind::Domain, "b_j must be distinct");
  }
  SpecialContourData1 d;
  d.n = n;
  d.a = a;
  d.b = b;
  d.k = k;

  // g = Im F and g_x = Im F_x on x = 0, F = psi' e^{-k zbar}; projected on cos(2ay), sin(2ay)
  const int m = 64;
  const double T = PI / std::abs(a);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(5, n);
  std::vector<cplx> uj(n), wj(n);
  for (int j = 0; j < n; ++j) {
    const cplx kj{a, -b[j]};
    uj[j] = k / (k - kj);
    wj[j] = k / (k + kj);
    for (int s = 0; s < m; ++s) {
      const double y = T * s / m, th = 2.0 * a * y;
      const cplx e = std::exp(I * th);
      const double g = (uj[j] * e + wj[j] * std::conj(e)).imag();
      const double gx = (2.0 * I * b[j] * (uj[j] * e - wj[j] * std::conj(e))).imag();
      A(0, j) += 2.0 / m * g * std::cos(th);
      A(1, j) += 2.0 / m * g * std::sin(th);
      A(2, j) += 2.0 / m * gx * std::cos(th);
      A(3, j) += 2.0 / m * gx * std::sin(th);
    }
    A(4, j) = 1.0;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto sv = svd.singularValues();
  for (int i = 0; i < sv.size(); ++i) d.singular_values.push_back(sv(i));
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-12 * sv(0)) ++rank;
  d.nullspace_dim = n - rank;
  if (d.nullspace_dim < 1)
    fail(ErrorKind::Domain, "nullspace empty for n = " + std::to_string(n) + " (solvable for n > 5)");
  Eigen::VectorXd kap = svd.matrixV().col(n - 1);
  for (int j = 0; j < n; ++j)
    if (std::abs(kap(j)) > 1e-12) {
      if (kap(j) < 0) kap = -kap;
      break;
    }
  // kappa_0 keeps c and Re F on x = 0 positive; it does not enter the four equations
  double k0 = 1.0;
  for (int j = 0; j < n; ++j) k0 += std::abs(kap(j)) * (2.0 + std::abs(uj[j]) + std::abs(wj[j]));
  d.kappa.push_back(k0);
  for (int j = 0; j < n; ++j) d.kappa.push_back(kap(j));
  return d;
}

Kind1Report verify_kind1(const SpecialContourData1& d, int samples) {
  const auto w = d.weighted();
  const double T = d.y_period();
  Kind1Report r;
  const cplx mult = std::exp(-I * d.k * T);
  for (int s = 0; s < samples; ++s) {
    const PlanarPoint z{0.0, T * s / (samples - 1)};
    const auto g = psi_prime_grad(w, d.k, z);
    r.max_im_ratio = std::max(r.max_im_ratio, std::abs((g[1] / g[0]).imag()));
    const cplx shifted = psi_prime_grad(w, d.k, {0.0, z.y + T})[0];
    r.multiplier_defect = std::max(r.multiplier_defect, std::abs(shifted / g[0] - mult));
    const cplx c = spectral::weighted_c(w, z);
    r.max_c_deviation = std::max(r.max_c_deviation, std::abs(c - d.kappa[0]));
    cplx cy = 0.0;
    for (const auto& t : w.terms) cy += I * (t.p + t.k) * t.kappa * std::exp(t.exponent(z.z()));
    r.max_phi_y = std::max(r.max_phi_y, std::abs(0.5 * cy / c));
  }
  return r;
}

// ---- superposition ----

cplx psi_second_g0(const spectral::WeightedBA& w, cplx k, PlanarPoint z) {
  return -2.0 * k * spectral::weighted_c(w, z) * std::exp(k * std::conj(z.z()));
}

cplx superpose(const SuperposeSpec& s, Domain kind, PlanarPoint z) {
  if (std::abs(s.g) == 0.0) fail(ErrorKind::Domain, "g must be nonzero");
  auto term = [&](cplx k, cplx p, cplx q) {
    cplx v = 0.0;
    if (p != cplx(0.0, 0.0)) v += p * psi_prime_grad(s.w, k, z)[0];
    if (q != cplx(0.0, 0.0)) v += q * psi_second_g0(s.w, k, z);
    return v;
  };
  if (kind == Domain::IV) {
    if (s.pm.size() != s.qm.size() || s.pm.size() % 2 == 0) fail(ErrorKind::Domain, "IV weights need 2M+1 entries");
    const int M = static_cast<int>(s.pm.size() / 2);
    cplx v = 0.0;
    for (int m = -M; m <= M; ++m) v += term(s.k0 + 2.0 * PI * I * double(m) / std::conj(s.g), s.pm[m + M], s.qm[m + M]);
    return v;
  }
  const cplx dirk = I * s.g / std::abs(s.g);
  auto f = [&](double t, bool imag) {
    const cplx p = s.p ? s.p(t) : cplx(0.0), q = s.q ? s.q(t) : cplx(0.0);
    const cplx v = term(t * dirk, p, q);
    return imag ? v.imag() : v.real();
  };
  const double inf = std::numeric_limits<double>::infinity();
  double lo = kind == Domain::I ? 0.0 : -inf, hi = kind == Domain::II ? 0.0 : inf;
  if (s.s_min > -1e299) lo = std::max(lo, s.s_min);
  if (s.s_max < 1e299) hi = std::min(hi, s.s_max);
  if (!(lo < hi)) return 0.0;
  for (const auto& t : s.w.terms) {
    if (std::abs(t.k) == 0.0) continue;
    const cplx along = t.k / dirk;
    if (std::abs(along.imag()) < 1e-12 && along.real() >= lo && along.real() <= hi)
      fail(ErrorKind::Singular, "pole k_j on the superposition contour inside the density support");
  }
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double err_re = 0.0, err_im = 0.0, l1 = 0.0;
  const double re = GK::integrate([&](double t) { return f(t, false); }, lo, hi, 15, s.tol, &err_re, &l1);
  const double im = GK::integrate([&](double t) { return f(t, true); }, lo, hi, 15, s.tol, &err_im);
  const double scale_v = std::max(1.0, std::hypot(re, im));
  if (!std::isfinite(re) || !std::isfinite(im) || std::max(err_re, err_im) > 1e3 * s.tol * scale_v)
    fail(ErrorKind::Numerical, "superposition quadrature did not converge (densities not decaying?)");
  return {re, im};
}

}  // namespace magpauli::boundary
