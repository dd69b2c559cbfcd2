#include "magpauli/laplace.hpp"

#include <algorithm>
#include <cmath>

namespace magpauli::laplace {

using numcore::Scheme;

namespace {

Field real_part(const Field& f) {
  return map(f, [](cplx v) { return cplx(v.real(), 0.0); });
}

double sup(const Field& f) {
  double m = 0.0;
  for (const cplx& v : f.v) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

double cell_mean(const Field& f) {
  double s = 0.0;
  for (const cplx& v : f.v) s += v.real();
  return s / static_cast<double>(f.v.size());
}

LaplaceState laplace_step(const LaplaceState& s, Scheme scheme) {
  if (!s.w.grid.periodic || !s.w.grid.same_as(s.b.grid)) fail(ErrorKind::Domain, "B and W need one periodic grid");
  double lo = 1e300, hi = -1e300;
  for (const cplx& v : s.w.v) {
    lo = std::min(lo, v.real());
    hi = std::max(hi, v.real());
  }
  if (lo * hi <= 0.0) fail(ErrorKind::Singular, "W vanishes on the grid");
  const Field logw = map(s.w, [](cplx v) { return cplx(std::log(std::abs(v.real())), 0.0); });
  LaplaceState out;
  out.b = real_part(s.b + 0.5 * numcore::laplacian(logw, scheme));
  out.w = real_part(s.w + out.b);
  return out;
}

double state_distance(const LaplaceState& a, const LaplaceState& b) {
  const double db = sup(a.b - b.b) / std::max(1.0, sup(b.b));
  const double dw = sup(a.w - b.w) / std::max(1.0, sup(b.w));
  return std::max(db, dw);
}

bool w_constant(const Field& w, double tol) {
  double lo = 1e300, hi = -1e300;
  for (const cplx& v : w.v) {
    lo = std::min(lo, v.real());
    hi = std::max(hi, v.real());
  }
  return hi - lo <= tol * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
}

ChainReport laplace_chain(const LaplaceState& s, int n, double cycle_tol, Scheme scheme) {
  ChainReport rep;
  rep.states.push_back(s);
  rep.factorizable.push_back(w_constant(s.w));
  for (int j = 1; j <= n; ++j) {
    try {
      rep.states.push_back(laplace_step(rep.states.back(), scheme));
    } catch (const Error& e) {
      rep.truncated_at = j;
      rep.message = e.what();
      break;
    }
    rep.factorizable.push_back(w_constant(rep.states.back().w));
    if (!rep.cycle_index && state_distance(rep.states.back(), s) < cycle_tol) rep.cycle_index = j;
  }
  return rep;
}

Field intertwine_residual(const numcore::MagneticCoeffs& m, const Field& psi) {
  return numcore::apply_lminus(m, numcore::apply_qplus(m, psi)) - numcore::apply_qplus(m, numcore::apply_lplus(m, psi));
}

ManakovRhs manakov_rhs(const ManakovState& st, Scheme scheme, double constraint_tol) {
  using numcore::dx;
  using numcore::dy;
  const Field gx = dx(st.g, scheme), gy = dy(st.g, scheme);
  const Field sx = dx(st.s, scheme), sy = dy(st.s, scheme);
  const Field fx = dx(st.f, scheme), fy = dy(st.f, scheme);
  const Field ax = dx(st.a, scheme), ay = dy(st.a, scheme);

  ManakovRhs out;
  // products expanded so spectral derivatives stay alias-free
  out.g_t = numcore::dxx(st.g, scheme) - numcore::dyy(st.g, scheme) + 0.5 * (st.f * fx) - 2.0 * (st.g * gx) - ax +
            2.0 * sy;
  out.s_t = numcore::dyy(st.s, scheme) - numcore::dxx(st.s, scheme) - 2.0 * (gx * st.s + st.g * sx) +
            (fy * st.s + st.f * sy);
  out.constraint_f = sup(fx - 2.0 * gy);
  out.constraint_a = sup(ay - 2.0 * sx);
  out.constraint_warning = std::max(out.constraint_f, out.constraint_a) > constraint_tol;
  return out;
}

}  // namespace magpauli::laplace
