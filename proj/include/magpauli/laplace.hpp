#pragma once

#include <optional>
#include <string>
#include <vector>

#include "magpauli/numcore.hpp"

namespace magpauli::laplace {

// Gauge invariants of L = -D^2 + W on a periodic grid (real parts used).
struct LaplaceState {
  Field b, w;
};

// B~ = B + 1/2 Laplacian log|W|,  W~ = W + B~
LaplaceState laplace_step(const LaplaceState& s, numcore::Scheme scheme = numcore::Scheme::Spectral);

double cell_mean(const Field& f);
// relative sup distance max|a - b| / max(1, max|b|) over B and W
double state_distance(const LaplaceState& a, const LaplaceState& b);
bool w_constant(const Field& w, double tol = 1e-8);

struct ChainReport {
  std::vector<LaplaceState> states;  // states[0] is the input
  std::optional<int> cycle_index;    // first j > 0 with states[j] == states[0] within cycle_tol
  std::vector<bool> factorizable;    // W constant at step j
  std::optional<int> truncated_at;   // W vanished at this step
  std::string message;
};

ChainReport laplace_chain(const LaplaceState& s, int n, double cycle_tol = 1e-6,
                          numcore::Scheme scheme = numcore::Scheme::Spectral);

// L~(Q+ psi) - Q+(L psi) with L = L+ = QQ+ and L~ = L- = Q+Q (W constant)
Field intertwine_residual(const numcore::MagneticCoeffs& m, const Field& psi);

// Hyperbolic-variable system with constraints F_x = 2 G_y, A_y = 2 S_x.
struct ManakovState {
  Field g, s, f, a;
};

struct ManakovRhs {
  Field g_t, s_t;
  double constraint_f = 0.0;  // max|F_x - 2 G_y|
  double constraint_a = 0.0;  // max|A_y - 2 S_x|
  bool constraint_warning = false;
};

// G_t = G_xx - G_yy + (F^2/4)_x - (G^2)_x - A_x + 2 S_y
// S_t = S_yy - S_xx - 2 (G S)_x + (F S)_y
ManakovRhs manakov_rhs(const ManakovState& st, numcore::Scheme scheme = numcore::Scheme::Spectral,
                       double constraint_tol = 1e-6);

}  // namespace magpauli::laplace
