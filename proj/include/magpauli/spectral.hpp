#pragma once

#include <vector>

#include "magpauli/elliptic.hpp"
#include "magpauli/field.hpp"

namespace magpauli::spectral {

// ---- genus 0 ----

struct Crossing {
  cplx k, p;
};

struct SpectralDataG0 {
  std::vector<Crossing> crossings;  // l + 1 points
  std::vector<cplx> divisor;        // a_1..a_l
};

void validate(const SpectralDataG0& d);

struct Interp {
  cplx value;
  std::vector<cplx> w;  // w_0..w_l, w_0 = c
  double cond = 1.0;
};

// psi' = e^{k zbar} (w_0 k^l + ... + w_l) / prod(k - a_i) with psi'(k_s) = e^{p_s z}
Interp psi_prime_interp(const SpectralDataG0& d, cplx k, PlanarPoint z, double max_cond = 1e10);

// psi' = k e^{k zbar} sum_j kappa_j e^{p_j z - k_j zbar} / (k - k_j)
struct WeightedBA {
  std::vector<field::ExpTerm> terms;
};

WeightedBA weighted_from_field(const field::ExpField& c);
// same rational function up to the z-independent factor k prod(k - a_i) / prod(k - k_s)
WeightedBA weighted_from_g0(const SpectralDataG0& d);
cplx g0_normalization(const SpectralDataG0& d, cplx k);

cplx psi_over_k(const WeightedBA& w, cplx k, PlanarPoint z);
cplx psi_prime_weighted(const WeightedBA& w, cplx k, PlanarPoint z);
cplx weighted_c(const WeightedBA& w, PlanarPoint z);
// dbar(psi'/k) - 2 c e^{k zbar}
cplx dbar_identity_residual(const WeightedBA& w, cplx k, PlanarPoint z);
// Q+ psi / psi for psi = psi'/sqrt(c), potential Phi = -(1/2) log c
cplx qplus_ratio(const WeightedBA& w, cplx k, PlanarPoint z);

// ---- genus 1 ----

struct EllipticData {
  elliptic::RectLattice lattice;
  std::vector<cplx> q;      // Q_0..Q_n on Gamma'
  std::vector<cplx> r;      // R_0..R_n on Gamma''
  std::vector<cplx> p_div;  // P_1..P_n
  cplx p{0.0, 0.0};         // divisor of Gamma''

  cplx p_sum() const;
  cplx q_sum() const;
};

void validate(const EllipticData& d);

// psi'' = e^{-z zeta(p)} sigma(p + z + P) / (sigma(z + P) sigma(p + P))
cplx psi_second(const EllipticData& d, cplx p, PlanarPoint z);
// weights w_j(z, zbar) from the crossing conditions psi'(Q_s) = psi''(R_s)
std::vector<cplx> crossing_weights(const EllipticData& d, PlanarPoint z);
cplx psi_first(const EllipticData& d, const std::vector<cplx>& w, cplx k, PlanarPoint z);
cplx psi_first(const EllipticData& d, cplx k, PlanarPoint z);
double crossing_residual(const EllipticData& d, PlanarPoint z);

// c = lim_{k->0} psi' e^{zbar zeta(k)}
cplx g1_c(const EllipticData& d, PlanarPoint z);

struct Tilde {
  cplx c, cz, czb, czzb;  // c~ and its holomorphic-sense derivatives d/dz, d/dzbar, d2/dz dzbar
};
// c~ = c sigma(zbar + Q~ + P~) sigma(z + P)
Tilde c_tilde(const EllipticData& d, PlanarPoint z);
double b_tilde(const EllipticData& d, PlanarPoint z);
// (1/2) oint d_n log|c~| around the period cell with lower-left corner `corner`
double cell_flux_tilde(const EllipticData& d, PlanarPoint corner, int nodes_per_edge = 400);
// corner that keeps c~ away from zero on the cell boundary
PlanarPoint flux_cell_corner(const EllipticData& d);

struct SpecialRoot {
  cplx q;
  double residual = 0.0;
};
// omega zeta(Q0) - eta Q0 = i pi m / 4, searched on the imaginary half-period segment.
// m = 0 is the literal equation; every m keeps the two terms of c~ on one quasi-periodic multiplier.
SpecialRoot special_root(const elliptic::RectLattice& lat, int m = -4);
// n = 1: Q0 = -Q1 = q, R0 = Q1, R1 = Q0, P1 = P
EllipticData special_n1(const elliptic::RectLattice& lat, cplx P, int m = -4);

// psi''_ext,+- = f (sqrt c)^{+-1} e^{u z - zeta(p) z} sigma(z + p + R) / sigma(z + R), f = 1
cplx psi_ext(const field::ExpField& c, const elliptic::RectLattice& lat, cplx u, cplx p, cplx R, int sign,
             PlanarPoint z);

// unimodular factor sqrt(sigma(z - P) / conj(sigma(z - P))) taken as sigma/|sigma|
cplx singular_gauge_factor(const elliptic::RectLattice& lat, cplx P, PlanarPoint z);
cplx singular_gauge(cplx value, const elliptic::RectLattice& lat, cplx P, PlanarPoint z);

// fitted exponent s in |f| ~ r^s on a radial scan around `center`
double radial_exponent(const PointFn& f, PlanarPoint center, double r_min, double r_max, int samples = 16);

}  // namespace magpauli::spectral
