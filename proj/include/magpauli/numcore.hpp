#pragma once

#include <array>
#include <vector>

#include "magpauli/grid.hpp"
#include "magpauli/kernels.hpp"

namespace magpauli::numcore {

// d = d/dx - i d/dy and dbar = d/dx + i d/dy, so d z = 2, dbar zbar = 2 and d dbar = Laplacian.
enum class Wirt { D, Dbar };

cplx wirtinger(const PointFn& f, PlanarPoint p, Wirt which, double h = 1e-3);
cplx laplacian_at(const PointFn& f, PlanarPoint p, double h = 1e-3);

enum class Scheme { Spectral, Central2, Central4 };

Scheme default_scheme(const Grid& g);

Field dx(const Field& a, Scheme s);
Field dy(const Field& a, Scheme s);
Field dxx(const Field& a, Scheme s);
Field dyy(const Field& a, Scheme s);
Field laplacian(const Field& a, Scheme s);
Field d(const Field& a, Scheme s);
Field dbar(const Field& a, Scheme s);

// Potential Phi with B = Laplacian(Phi). The Lorenz-gauge potential is
// A_1 = i Phi_y, A_2 = -i Phi_x, A_z = A_1 - i A_2 = -d Phi, covariant derivative D = grad - A.
//   Q  = d - A_z = d + (d Phi)          annihilates e^{-Phi} * antiholomorphic
//   Q+ = -dbar + (dbar Phi)             annihilates e^{+Phi} * holomorphic
//   L+ = Q Q+ = -D^2 + B,  L- = Q+ Q = -D^2 - B.
struct MagneticCoeffs {
  Grid grid;
  Scheme scheme = Scheme::Spectral;
  Field phi, phi_x, phi_y, lap_phi;

  Field a_z() const;
  const Field& b() const { return lap_phi; }

  static MagneticCoeffs from_samples(const Field& phi, Scheme s);
  static MagneticCoeffs from_closed_form(const Grid& g, Scheme s, const PointFn& phi, const PointFn& phi_x,
                                         const PointFn& phi_y, const PointFn& lap_phi);
};

Field apply_q(const MagneticCoeffs& m, const Field& f);
Field apply_qplus(const MagneticCoeffs& m, const Field& f);
// second-order assembled forms
Field apply_lplus(const MagneticCoeffs& m, const Field& f);
Field apply_lminus(const MagneticCoeffs& m, const Field& f);

struct Pair {
  Field plus, minus;
};

Pair apply_pauli(const MagneticCoeffs& m, const Pair& p);
// S = Q+ on the upper component, S* = Q on the lower component
Pair apply_s(const MagneticCoeffs& m, const Pair& p);
Pair apply_sstar(const MagneticCoeffs& m, const Pair& p);
Pair anticommutator(const MagneticCoeffs& m, const Pair& p);

// Pointwise operators for closed-form fields (fourth-order differences of step h).
cplx lplus_at(const PointFn& Phi, const PointFn& f, PlanarPoint p, double h = 1e-3);
cplx lminus_at(const PointFn& Phi, const PointFn& f, PlanarPoint p, double h = 1e-3);
// psi_1 = D_n psi on a contour point with outward normal angle theta
cplx covariant_normal(const PointFn& Phi, const PointFn& f, PlanarPoint p, double theta, double h = 1e-3);

struct Region {
  enum class Kind { Disc, Annulus } kind = Kind::Disc;
  PlanarPoint center;
  double r_inner = 0.0;
  double r_outer = 1.0;

  // outer circle counterclockwise, inner circle clockwise: normals point out of the region
  std::vector<Contour> boundary(int n) const;
};

// oint [psi1 conj(phi2) - psi2 conj(phi1)] dt + iint [(L psi) conj(phi) - psi conj(L phi)] dA
// with psi1 = D_n psi, psi2 = psi, outward normal; vanishes for exact fields.
cplx green_residual(const PointFn& Phi, const PointFn& psi, const PointFn& phi, const Region& region, int n,
                    int sector = +1);

// Unwrapped phase increment of f along the contour.
double loop_flux_phase(const PointFn& f, const Contour& c);
using VecFn = std::function<std::array<double, 2>(PlanarPoint)>;
double loop_flux_vector(const VecFn& a, const Contour& c);
// real potential a = (-Phi_y, Phi_x), curl a = B
VecFn real_vector_potential(const PointFn& Phi, double h = 1e-4);

// Solution of Laplacian(R) = b on a box grid: discrete five-point equation solved
// exactly in the interior with Dirichlet values from direct log-kernel quadrature.
struct PoissonLog {
  Grid grid;
  Field r;
  double flux = 0.0;
  std::vector<PlanarPoint> src;
  std::vector<double> charge;

  // direct quadrature of the log kernel, valid off the grid
  double evaluate(PlanarPoint p) const;
  std::vector<double> evaluate(const std::vector<PlanarPoint>& pts, kernels::Exec exec = kernels::Exec::Parallel) const;
};

PoissonLog poisson_log(const Field& b, kernels::Exec exec = kernels::Exec::Parallel);

}  // namespace magpauli::numcore
