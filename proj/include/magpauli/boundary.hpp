#pragma once

#include <array>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "magpauli/grid.hpp"
#include "magpauli/spectral.hpp"

namespace magpauli::boundary {

// Functions on the boundary circle, sampled at t_i = 2 pi i / N.
using CircleFn = std::vector<cplx>;

CircleFn circle_deriv(const CircleFn& f);
CircleFn circle_sample(int n, const std::function<cplx(double)>& f);

// first-order circle operator i a(t) d_t + b(t)
struct CircleOp {
  CircleFn a, b;
  CircleFn apply(const CircleFn& f) const;
  CircleOp adjoint() const;
  bool zero_order(double tol = 0.0) const;
};

// ---- boundary-condition records ----

struct Dirichlet {};
struct Neumann {};
struct Leontovich {
  CircleFn alpha, beta;  // alpha psi_1 + beta psi_2 = 0
};
struct DBar {
  CircleFn v;  // psi_1 = (sign i d_t + v) psi_2
  int sign = -1;
};
struct GeneralLocal {
  CircleOp u, v;  // U psi_1 = V psi_2
};
struct MixingUltralocal {
  int kind = 1;                          // 1: psi_1 = R psi_2, 2: psi_2 = R psi_1, 3: unit vectors
  std::vector<std::array<cplx, 4>> r;    // R(t) row-major, kinds 1 and 2
  cplx a{1.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{1.0, 0.0};  // a psi_1+ + b psi_1- = 0, c psi_2+ + d psi_2- = 0
};
// grad_n psi+ = A+ psi+ + b grad_n psi-, -psi- = c psi+ + d grad_n psi-,
// A+ = i(alpha+ d_t + alpha+'/2) + a
struct MixingLocal {
  CircleFn alpha_plus, a, b, c, d;
};

using BoundaryCondition = std::variant<Dirichlet, Neumann, Leontovich, DBar, GeneralLocal, MixingUltralocal, MixingLocal>;

std::string variant_name(const BoundaryCondition& bc);
int circle_size(const BoundaryCondition& bc);
bool is_mixing(const BoundaryCondition& bc);

// record invariants; empty string when valid
std::string check_record(const BoundaryCondition& bc, double tol = 1e-12);

// Galerkin matrix of U V+ - V U+ on e^{imt}, |m| < basis/2
double hermiticity_defect(const CircleOp& u, const CircleOp& v, int basis = 32);

// boundary data psi_1 = grad_n psi, psi_2 = psi; minus components empty in the scalar case
struct BoundarySample {
  CircleFn p1, p2, m1, m2;
};

// pairs constructed to satisfy the record's relation exactly
std::vector<BoundarySample> lagrangian_samples(const BoundaryCondition& bc, std::mt19937_64& rng, int count = 6);
// largest relation violation of the samples
double relation_residual(const BoundaryCondition& bc, const std::vector<BoundarySample>& s);
// max over pairs of |oint [psi_1 conj(phi_2) - psi_2 conj(phi_1)] dt| / (|psi| |phi|)
double lagrangian_residual(const BoundaryCondition& bc, const std::vector<BoundarySample>& s);

BoundaryCondition random_record(const std::string& variant, std::mt19937_64& rng, int n = 128);
BoundaryCondition corrupt(const BoundaryCondition& bc, std::mt19937_64& rng);

// winding of the vector (alpha, beta) over one circuit, computed from the line angle in RP^1
int leontovich_charge(const std::vector<double>& alpha, const std::vector<double>& beta);

// ---- d-bar extraction and leaf forms ----

struct DBarReport {
  std::vector<cplx> v;
  double max_imag = 0.0;
};

// v(t) = e^{-i theta(t)} (Q+ psi / psi), theta = tangent angle - pi/2; evaluated at segment midpoints
DBarReport dbar_extract(const std::function<cplx(PlanarPoint)>& qplus_ratio, const Contour& c);

struct FormCoeffs {
  double dx = 0.0, dy = 0.0;
};

// Omega = (theta_y + Phi_x) dx + (-theta_x + Phi_y) dy, theta = arg psi
FormCoeffs leaf_form_scalar(const PointFn& psi, const PointFn& phi, PlanarPoint p, double h = 1e-3);
// omega = (|psi+|^2 + |psi-|^2) dPhi + |psi+|^2 *dtheta+ + |psi-|^2 *dtheta-, *dx = -dy, *dy = dx
FormCoeffs leaf_form_mixing(const PointFn& psi_plus, const PointFn& psi_minus, const PointFn& phi, PlanarPoint p,
                            double h = 1e-3);
// max over segments of |form(midpoint) . chord| / (|form| |chord|)
double form_residual(const std::function<FormCoeffs(PlanarPoint)>& form, const Contour& c);
// integral curve of form = 0 (direction (form_y, -form_x)), RK4
Contour trace_form_leaf(const std::function<FormCoeffs(PlanarPoint)>& form, PlanarPoint start, double step, int steps);

// psi+ = psi'/sqrt(c), psi- = lambda Q+ psi+ with Phi = -1/2 log c
struct ZeroModePair {
  spectral::WeightedBA w;
  cplx k{0.0, 0.0};
  cplx lambda{0.0, 0.0};

  cplx plus(PlanarPoint z) const;
  cplx minus(PlanarPoint z) const;
  double phi(PlanarPoint z) const;
};

// closed-form psi', d_x psi', d_y psi'
std::array<cplx, 3> psi_prime_grad(const spectral::WeightedBA& w, cplx k, PlanarPoint z);

// ---- Example 1 ----

struct SpecialContourData1 {
  int n = 0;
  double a = 0.0;
  std::vector<double> b;
  double k = 0.0;
  std::vector<double> kappa;  // kappa_0..kappa_n
  int nullspace_dim = 0;
  std::vector<double> singular_values;

  spectral::WeightedBA weighted() const;
  double y_period() const;
};

struct Kind1Report {
  double max_im_ratio = 0.0;       // max_y |Im(psi'_x / psi')| on x = 0
  double multiplier_defect = 0.0;  // |psi'(0, y+T)/psi'(0, y) - e^{-ikT}|
  double max_c_deviation = 0.0;    // |c(0, y) - kappa_0|
  double max_phi_y = 0.0;          // |Phi_y| on x = 0, so grad_n = d_n there
};

// c = kappa_0 + 2 sum kappa_j cos(2(b_j x + a y)); solves g = g_x = 0 on x = 0 with sum kappa_j = 0
SpecialContourData1 special_contour_kind1(int n, double a, const std::vector<double>& b, double k);
Kind1Report verify_kind1(const SpecialContourData1& d, int samples = 257);

// ---- superposition ----

enum class Domain { I, II, III, IV };

struct SuperposeSpec {
  spectral::WeightedBA w;
  cplx g{0.0, 1.0};                    // contour direction; k runs along i s g/|g|
  std::function<cplx(double)> p, q;    // densities in s (kinds I-III)
  double s_min = -1e300, s_max = 1e300;  // support window of the densities
  cplx k0{0.0, 0.0};                   // kind IV base point, k_m = k0 + 2 pi i m / conj(g)
  std::vector<cplx> pm, qm;            // kind IV weights, m = -M..M
  double tol = 1e-10;
};

// psi'' = sqrt(c) Q+ (psi'/sqrt c), the second component carried with the same multiplier
cplx psi_second_g0(const spectral::WeightedBA& w, cplx k, PlanarPoint z);
cplx superpose(const SuperposeSpec& s, Domain kind, PlanarPoint z);

}  // namespace magpauli::boundary
