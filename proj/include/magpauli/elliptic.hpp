#pragma once

#include "magpauli/types.hpp"

namespace magpauli::elliptic {

// Rectangular lattice {2*omega*m + 2i*omega_prime*n}.
// eta = zeta(omega), i*eta_prime = zeta(i*omega_prime).
struct RectLattice {
  double omega = 1.0;
  double omega_prime = 1.0;
  double eta = 0.0;
  double eta_prime = 0.0;
  double cell_area = 4.0;

  cplx period1() const { return {2.0 * omega, 0.0}; }
  cplx period2() const { return {0.0, 2.0 * omega_prime}; }
  double legendre_defect() const { return eta * omega_prime - eta_prime * omega - PI / 2.0; }

  // theta-series data for the orientation with the smaller nome
  bool rotated = false;
  double nome = 0.0;
  double c_omega = 1.0;
  double c_eta = 0.0;
  double c_theta1p0 = 1.0;
};

RectLattice make_lattice(double omega, double omega_prime);

struct Reduction {
  cplx w0;  // representative with |Re| <= omega, |Im| <= omega'
  long m = 0;
  long n = 0;
};

Reduction reduce(const RectLattice& lat, cplx w);

cplx sigma(const RectLattice& lat, cplx w);
cplx zeta(const RectLattice& lat, cplx w);

// log sigma without overflow for arguments far from the fundamental cell;
// the imaginary part is continuous only within one reduction class.
cplx log_sigma(const RectLattice& lat, cplx w);

// d/dw of zeta is -wp; exposed for tests of the differential equation.
cplx wp(const RectLattice& lat, cplx w);

}  // namespace magpauli::elliptic
