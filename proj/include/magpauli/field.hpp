#pragma once

#include <array>
#include <optional>
#include <vector>

#include "magpauli/elliptic.hpp"
#include "magpauli/grid.hpp"

namespace magpauli::field {

// kappa * exp(p z - k zbar) = kappa * exp(alpha x + beta y)
struct ExpTerm {
  cplx kappa{1.0, 0.0};
  cplx p{0.0, 0.0};
  cplx k{0.0, 0.0};

  cplx alpha() const { return p - k; }
  cplx beta() const { return I * (p + k); }
  cplx exponent(cplx z) const { return p * z - k * std::conj(z); }
};

struct ExpField {
  std::vector<ExpTerm> terms;
  bool real_flag = false;
  bool periodic_flag = false;
  bool real_linear = false;
  std::vector<std::array<double, 2>> forms;  // (alpha_s, beta_s) when real_linear
  std::optional<elliptic::RectLattice> lattice;
};

// Validates declared reality on a probe grid and caches the real forms.
ExpField make_field(std::vector<ExpTerm> terms, bool declared_real = false,
                    std::optional<elliptic::RectLattice> lattice = std::nullopt);

// c = 1 + sum_j (a_j e^{l_j zbar - conj(l_j) z} + c.c.)
ExpField trig_field(const std::vector<cplx>& a, const std::vector<cplx>& l);
ExpField fig6_field();
ExpField fig2b_field();

struct Derivs {
  cplx c, dc, dbc, ddbc;  // c, d c, dbar c, d dbar c
};

Derivs derivs(const ExpField& f, PlanarPoint p);
cplx eval_c(const ExpField& f, PlanarPoint p);
// Phi = (1/2) log c, so that B = Laplacian(Phi)
cplx eval_phi(const ExpField& f, PlanarPoint p);
// (Phi_x, Phi_y, Laplacian Phi) in closed form
std::array<cplx, 3> eval_phi_derivs(const ExpField& f, PlanarPoint p);
double eval_b(const ExpField& f, PlanarPoint p);

struct Tropical {
  double i_prime = 0.0;
  double i = 0.0;
};
Tropical tropical_indicator(const ExpField& f, double phi);

struct Polytope {
  std::vector<std::array<double, 2>> hull;     // convex hull of the exponent forms, counterclockwise
  std::vector<std::array<double, 2>> polygon;  // admissible shifts = -hull
  bool closure_nonempty = false;
  bool interior_nonempty = false;

  // membership of a shift (alpha, beta)
  bool contains(double alpha, double beta, bool strict) const;
};
Polytope shift_polytope(const ExpField& f);

struct FluxReport {
  double radius = 0.0;
  double flux = 0.0;
  double tropical_integral = 0.0;   // oint I'(phi) dphi
  double predicted_paper = 0.0;     // -(R/2) oint I dphi
  double predicted_boundary = 0.0;  // +(R/2) oint I' dphi from the boundary form of the flux
  double residual = 0.0;            // flux - predicted_boundary
  double quadrature_error = 0.0;
};
FluxReport flux_disk(const ExpField& f, double radius, int n_phi = 2048, double tol = 1e-6);

// cell flux of B over a period rectangle by the trapezoid rule
double cell_flux(const ExpField& f, double period_x, double period_y, int n);

}  // namespace magpauli::field
