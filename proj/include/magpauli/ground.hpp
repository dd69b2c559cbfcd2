#pragma once

#include <array>
#include <optional>
#include <vector>

#include "magpauli/elliptic.hpp"
#include "magpauli/field.hpp"
#include "magpauli/numcore.hpp"

namespace magpauli::ground {

// ---- Aharonov-Casher ----

struct ACProblem {
  Field b;  // box grid, compact support
  double flux = 0.0;
  int m = 0;  // m <= |flux|/2pi < m+1
};

ACProblem make_ac_problem(const Field& b);

struct ACState {
  int l = 0;
  int sector = +1;                // +1: Q+ Psi = 0 with Psi = z^l e^{-R}; -1: Q Psi = 0 with Psi = zbar^l e^{R}
  double predicted_exponent = 0;  // decay exponent of |Psi|^2: 2l - |flux|/pi
  bool admissible = false;        // predicted_exponent < -2
};

struct ACResult {
  numcore::PoissonLog r;
  std::vector<ACState> states;  // admissible states only
  bool borderline = false;      // flux within 1e-3 of a multiple of 2pi
};

ACResult ac_states(const ACProblem& p, kernels::Exec exec = kernels::Exec::Parallel);

cplx ac_value(const ACResult& res, const ACState& s, PlanarPoint z);
// least-squares slope of log of the angular mean of |Psi|^2 against log r
double fit_decay(const ACResult& res, int l, int sector, double r_min, double r_max, int radii = 12, int angles = 16);

// ---- Dubrovin-Novikov ----

// R(z) = (1/2pi) sum_j W_j B_j ln|sigma(z - w_j)| over the nodes of one periodic cell
struct SigmaPotential {
  elliptic::RectLattice lattice;
  std::vector<PlanarPoint> src;
  std::vector<double> charge;  // B_j * cell area of the node
  double hx = 0.0, hy = 0.0;
  double flux = 0.0;
  double moment_x = 0.0, moment_y = 0.0;  // iint x B, iint y B

  double value(PlanarPoint z) const;
  std::array<double, 2> gradient(PlanarPoint z) const;
};

SigmaPotential sigma_potential(const Field& b, const elliptic::RectLattice& lat);

// Re a = (eta/omega)[sum Re a_j - (1/2pi) iint x B], Im a = (eta'/omega')[sum Im a_j - (1/2pi) iint y B]
cplx unitarity_params(const std::vector<cplx>& zeros, const SigmaPotential& r);

struct DNState {
  SigmaPotential r;
  int m = 0;
  cplx a{0.0, 0.0};
  std::vector<cplx> zeros;
  cplx lambda{1.0, 0.0};
  std::array<cplx, 2> multipliers{};
  std::array<double, 2> quasimomentum{};
  double base_point_spread = 0.0;  // max spread of measured multipliers over base points

  cplx value(PlanarPoint z) const;
};

// Gauge phase f with grad f = (d_y dPhi, -d_x dPhi), dPhi(z) = Phi(z + g) - Phi(z), Phi = -R,
// integrated from `origin` along the straight segment.
double gauge_phase(const SigmaPotential& r, cplx g, PlanarPoint origin, PlanarPoint z);
cplx measure_multiplier(const DNState& s, cplx g, PlanarPoint origin, PlanarPoint z);

DNState dn_state(const Field& b, const elliptic::RectLattice& lat, const std::vector<cplx>& zeros, cplx lambda,
                 std::optional<cplx> a = std::nullopt);

// quasimomentum difference (p1 + i p2)(s1) - (p1 + i p2)(s0) reduced modulo (pi/omega, pi/omega')
cplx quasimomentum_difference(const DNState& s0, const DNState& s1);
cplx predicted_quasimomentum_difference(const DNState& s0, const DNState& s1);
cplx wrap_quasimomentum(const elliptic::RectLattice& lat, cplx dp);

// ---- periodic pair ----

struct PeriodicPair {
  field::ExpField c;
  double max_residual_qplus = 0.0;  // |Q+ sqrt(c)| with Phi = 1/2 log c, closed form
  double max_residual_q = 0.0;      // |Q (1/sqrt c)|
};

// closed-form residuals at one point
std::array<cplx, 2> pair_residuals(const field::ExpField& c, PlanarPoint z);
PeriodicPair periodic_pair(const field::ExpField& c, double period_x, double period_y, int probes = 32);

}  // namespace magpauli::ground
