#include "magpauli/elliptic.hpp"

#include <cmath>

namespace magpauli::elliptic {

namespace {

// theta_1 and its first two v-derivatives for real nome q.
struct Theta {
  cplx t0, t1, t2;
};

Theta theta1(double q, cplx v) {
  Theta th{0.0, 0.0, 0.0};
  double mag = 0.0;
  for (int n = 0; n < 64; ++n) {
    const double e = (n + 0.5) * (n + 0.5);
    const double qn = std::pow(q, e);
    const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
    const double k = 2.0 * n + 1.0;
    const cplx s = std::sin(k * v);
    const cplx c = std::cos(k * v);
    th.t0 += sgn * qn * s;
    th.t1 += sgn * qn * k * c;
    th.t2 -= sgn * qn * k * k * s;
    const double term = qn * std::exp(k * std::abs(v.imag())) * k * k;
    mag = std::max(mag, term);
    if (n > 1 && term < 1e-18 * mag) break;
  }
  th.t0 *= 2.0;
  th.t1 *= 2.0;
  th.t2 *= 2.0;
  return th;
}

double theta1_d3_at0(double q) {
  double s = 0.0;
  for (int n = 0; n < 64; ++n) {
    const double qn = std::pow(q, (n + 0.5) * (n + 0.5));
    const double k = 2.0 * n + 1.0;
    const double t = ((n % 2 == 0) ? 1.0 : -1.0) * qn * k * k * k;
    s -= t;
    if (std::abs(t) < 1e-20) break;
  }
  return 2.0 * s;
}

// Canonical orientation: real half-period c_omega, nome = exp(-pi*omega'/omega) <= e^{-pi}.
cplx c_sigma(const RectLattice& L, cplx w) {
  const cplx v = PI * w / (2.0 * L.c_omega);
  const Theta th = theta1(L.nome, v);
  return (2.0 * L.c_omega / PI) * std::exp(L.c_eta * w * w / (2.0 * L.c_omega)) * th.t0 / L.c_theta1p0;
}

cplx c_log_sigma(const RectLattice& L, cplx w) {
  const cplx v = PI * w / (2.0 * L.c_omega);
  const Theta th = theta1(L.nome, v);
  return std::log(2.0 * L.c_omega / PI) + L.c_eta * w * w / (2.0 * L.c_omega) + std::log(th.t0 / L.c_theta1p0);
}

cplx c_zeta(const RectLattice& L, cplx w) {
  const cplx v = PI * w / (2.0 * L.c_omega);
  const Theta th = theta1(L.nome, v);
  return L.c_eta * w / L.c_omega + (PI / (2.0 * L.c_omega)) * th.t1 / th.t0;
}

cplx c_wp(const RectLattice& L, cplx w) {
  const cplx v = PI * w / (2.0 * L.c_omega);
  const Theta th = theta1(L.nome, v);
  const double f = PI / (2.0 * L.c_omega);
  const cplx r = th.t1 / th.t0;
  return -L.c_eta / L.c_omega + f * f * (r * r - th.t2 / th.t0);
}

cplx sigma0(const RectLattice& L, cplx w) { return L.rotated ? -I * c_sigma(L, I * w) : c_sigma(L, w); }
cplx log_sigma0(const RectLattice& L, cplx w) {
  return L.rotated ? std::log(-I) + c_log_sigma(L, I * w) : c_log_sigma(L, w);
}
cplx zeta0(const RectLattice& L, cplx w) { return L.rotated ? I * c_zeta(L, I * w) : c_zeta(L, w); }
cplx wp0(const RectLattice& L, cplx w) { return L.rotated ? -c_wp(L, I * w) : c_wp(L, w); }

bool is_lattice_point(const RectLattice& L, cplx w0) {
  return std::abs(w0) < 1e-14 * (L.omega + L.omega_prime);
}

}  // namespace

RectLattice make_lattice(double omega, double omega_prime) {
  if (!(omega > 0.0) || !(omega_prime > 0.0) || !std::isfinite(omega) || !std::isfinite(omega_prime))
    fail(ErrorKind::Domain, "lattice half-periods must be positive and finite");
  RectLattice L;
  L.omega = omega;
  L.omega_prime = omega_prime;
  L.cell_area = 4.0 * omega * omega_prime;
  L.rotated = omega_prime < omega;
  L.c_omega = L.rotated ? omega_prime : omega;
  const double c_omega_prime = L.rotated ? omega : omega_prime;
  L.nome = std::exp(-PI * c_omega_prime / L.c_omega);
  L.c_theta1p0 = theta1(L.nome, 0.0).t1.real();
  L.c_eta = -(PI * PI / (12.0 * L.c_omega)) * theta1_d3_at0(L.nome) / L.c_theta1p0;
  // eta' straight from zeta at the imaginary half-period, so the Legendre relation stays a check
  const cplx zc = c_zeta(L, cplx(0.0, c_omega_prime));
  const double c_eta_prime = zc.imag();
  if (L.rotated) {
    L.eta = -c_eta_prime;
    L.eta_prime = -L.c_eta;
  } else {
    L.eta = L.c_eta;
    L.eta_prime = c_eta_prime;
  }
  return L;
}

Reduction reduce(const RectLattice& L, cplx w) {
  Reduction r;
  r.m = std::lround(w.real() / (2.0 * L.omega));
  r.n = std::lround(w.imag() / (2.0 * L.omega_prime));
  r.w0 = w - cplx(2.0 * L.omega * r.m, 2.0 * L.omega_prime * r.n);
  return r;
}

cplx log_sigma(const RectLattice& L, cplx w) {
  const Reduction r = reduce(L, w);
  if (is_lattice_point(L, r.w0)) fail(ErrorKind::Singular, "log sigma at a lattice point");
  const cplx H(2.0 * L.eta * r.m, 2.0 * L.eta_prime * r.n);
  const cplx half(L.omega * r.m, L.omega_prime * r.n);
  const long parity = (r.m + r.n + r.m * r.n) & 1L;
  return log_sigma0(L, r.w0) + H * (r.w0 + half) + (parity ? cplx(0.0, PI) : cplx(0.0));
}

cplx sigma(const RectLattice& L, cplx w) {
  const Reduction r = reduce(L, w);
  if (r.m == 0 && r.n == 0) return sigma0(L, r.w0);
  const cplx H(2.0 * L.eta * r.m, 2.0 * L.eta_prime * r.n);
  const cplx half(L.omega * r.m, L.omega_prime * r.n);
  const long parity = (r.m + r.n + r.m * r.n) & 1L;
  const cplx s = std::exp(H * (r.w0 + half)) * sigma0(L, r.w0);
  return parity ? -s : s;
}

cplx zeta(const RectLattice& L, cplx w) {
  const Reduction r = reduce(L, w);
  if (is_lattice_point(L, r.w0)) fail(ErrorKind::Singular, "zeta at a lattice point");
  return zeta0(L, r.w0) + cplx(2.0 * L.eta * r.m, 2.0 * L.eta_prime * r.n);
}

cplx wp(const RectLattice& L, cplx w) {
  const Reduction r = reduce(L, w);
  if (is_lattice_point(L, r.w0)) fail(ErrorKind::Singular, "wp at a lattice point");
  return wp0(L, r.w0);
}

}  // namespace magpauli::elliptic
