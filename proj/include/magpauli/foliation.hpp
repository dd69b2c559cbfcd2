#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "magpauli/spectral.hpp"

namespace magpauli::foliation {

// c = 1 + sum (a_j e^{l_j zbar - conj(l_j) z} + c.c.) on the rectangular cell [0,Px) x [0,Py)
struct FoliationData {
  std::vector<cplx> a, l;
  cplx k{0.0, 1.0};
  double period_x = 2 * PI, period_y = 2 * PI;

  spectral::WeightedBA weighted() const;
};

void validate(const FoliationData& d);
FoliationData fig6_data(cplx k = cplx(0.0, 0.55));

double f_eval(const FoliationData& d, PlanarPoint z);
std::array<double, 2> f_grad(const FoliationData& d, PlanarPoint z);
// F_xx, F_xy, F_yy
std::array<double, 3> f_hessian(const FoliationData& d, PlanarPoint z);
// natural size of F near z: e^{2 Re(k zbar)} / |k|^2
double f_scale(const FoliationData& d, PlanarPoint z);
cplx psi_prime(const FoliationData& d, PlanarPoint z);

// dF - 2 (psi'/k) e^{conj(k) z} and dbar F - 2 (conj(psi')/conj(k)) e^{k zbar}
std::array<cplx, 2> grad_identity_residual(const FoliationData& d, PlanarPoint z);
// |F(z+g) - |kappa(g)|^2 F(z)| / max(|F(z+g)|, scale), kappa(g) = e^{k conj(g)}
double multiplier_defect(const FoliationData& d, PlanarPoint z, cplx g);

enum class CriticalKind { Center, Saddle, Degenerate };

struct CriticalPoint {
  PlanarPoint position;
  CriticalKind kind = CriticalKind::Degenerate;
  double hessian_det = 0.0;
  double f_value = 0.0;
  int index() const { return kind == CriticalKind::Center ? 1 : kind == CriticalKind::Saddle ? -1 : 0; }
};

// zeros of psi' in the cell: winding scan on an n x n grid, Newton on grad F = 0
std::vector<CriticalPoint> critical_points(const FoliationData& d, int n = 64);
int index_sum(const std::vector<CriticalPoint>& cps);
// N* estimate: has_critical[i + n * j] for k = kmin + (i, j) spacing over the window
struct KScan {
  cplx kmin, kmax;
  int n = 0;
  std::vector<int> counts;
};
KScan k_scan(const FoliationData& d, cplx kmin, cplx kmax, int n = 64, int grid = 32);

enum class LeafKind { ClosedNullHomotopic, ClosedEssential, OpenQuasiperiodic, Separatrix };
std::string leaf_kind_name(LeafKind k);

struct Trajectory {
  std::vector<PlanarPoint> points;
  double f_level = 0.0;
  LeafKind kind = LeafKind::OpenQuasiperiodic;
  std::optional<double> rotation_estimate;      // (dx / Px) / (dy / Py) of the lift
  std::optional<std::array<int, 2>> homology;  // lattice class on closure
  double length = 0.0;
  double max_drift = 0.0;        // max |F - level| / max(|level|, f_scale)
  bool separatrix_cycle = false;  // assembled from saddle separatrices
  double enclosed_area = 0.0;
  int end_critical = -1;  // separatrix: index of the saddle reached
  cplx end_shift{0.0, 0.0};
};

struct TraceOptions {
  double h0 = 0.02, h_min = 1e-7, h_max = 0.05;
  double tol = 1e-9;  // local position error per step
  int orientation = 1;
  std::optional<double> level;  // defaults to F(start)
  std::optional<std::vector<CriticalPoint>> critical;  // computed when absent
  bool stop_on_closure = true;
  bool start_guard = true;            // refuse starts within 2 h0 of a critical point
  double saddle_grace = 0.0;          // arclength before saddle proximity ends the trace
  std::optional<double> stop_cells;   // stop once the lift has crossed this many cells
};

Trajectory trace_leaf(const FoliationData& d, PlanarPoint start, double max_length, TraceOptions opt = {});

struct RotationNumber {
  double rho = 0.0;
  double confidence = 0.0;  // |rho(full) - rho(half)|
  std::optional<std::array<int, 2>> locked;
};
RotationNumber rotation_number(const FoliationData& d, PlanarPoint start, int cells = 50);

std::vector<Trajectory> limit_cycle_scan(const FoliationData& d, int n = 128);

// foot-point distance to the F = 0 level, max per traversed period along the growth direction
std::vector<double> approach_distances(const FoliationData& d, const Trajectory& cycle, double eps, int periods = 3);

// null-homotopic cycle of separatrices whose enclosed area is closest to the cell area
std::optional<Trajectory> separatrix_cycle(const FoliationData& d, int max_edges = 8);

enum class LeafCase { BoundedOpen = 1, MaximalSeparatrix = 2, EssentialZero = 3, Unknown = 0 };

struct LeafVerdict {
  LeafCase kase = LeafCase::Unknown;
  bool admissible = false;
  double sup_over_inf = 0.0;  // |psi'| along the lift
  double growth_rate = 0.0;   // d log|psi'| per unit displacement along the homology vector
  double area_ratio = 0.0;
  std::string note;
};

LeafVerdict classify_leaf(const Trajectory& t, const FoliationData& d);

}  // namespace magpauli::foliation
