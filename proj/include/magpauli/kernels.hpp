#pragma once

#include <vector>

#include "magpauli/grid.hpp"

// Grid sweeps with an OpenMP path and a serial reference path.
// Each output value is produced by exactly one iteration in a fixed
// summation order, so both paths agree bit for bit.
namespace magpauli::kernels {

enum class Exec { Serial, Parallel };

// Worker cap from MAGPAULI_THREADS (0 when unset).
int thread_cap();
void apply_thread_cap();

Field sample(const Grid& g, const PointFn& f, Exec exec = Exec::Parallel);

// Centered difference of order `deriv` (1 or 2) along `axis` (0 = x, 1 = y)
// with accuracy 2 or 4. Box grids get NaN where the stencil leaves the grid.
Field stencil(const Field& a, int axis, int deriv, int accuracy, Exec exec = Exec::Parallel);

// R(t) = (1/2pi) sum_j q_j ln|t - s_j|, where q_j already carries the cell area.
// A target on a source node uses the cell average of ln r over an hx-by-hy cell.
std::vector<double> log_potential(const std::vector<PlanarPoint>& targets, const std::vector<PlanarPoint>& sources,
                                  const std::vector<double>& charges, double hx, double hy,
                                  Exec exec = Exec::Parallel);

double cell_mean_log(double hx, double hy);

}  // namespace magpauli::kernels
