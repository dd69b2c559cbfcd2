#include "magpauli/kernels.hpp"

#include <omp.h>

#include <cmath>
#include <cstdlib>
#include <limits>

namespace magpauli::kernels {

int thread_cap() {
  const char* s = std::getenv("MAGPAULI_THREADS");
  if (!s || !*s) return 0;
  const int n = std::atoi(s);
  return n > 0 ? n : 0;
}

void apply_thread_cap() {
  const int n = thread_cap();
  if (n > 0) omp_set_num_threads(n);
}

Field sample(const Grid& g, const PointFn& f, Exec exec) {
  Field out(g);
  const int ny = g.ny, nx = g.nx;
  if (exec == Exec::Serial) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) out(i, j) = f(g.point(i, j));
    return out;
  }
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) out(i, j) = f(g.point(i, j));
  return out;
}

namespace {

cplx stencil_at(const Field& a, int i, int j, int axis, int deriv, int acc) {
  const Grid& g = a.grid;
  const int n = axis == 0 ? g.nx : g.ny;
  const int c = axis == 0 ? i : j;
  const double h = axis == 0 ? g.hx : g.hy;
  const int half = acc == 2 ? 1 : 2;
  if (!g.periodic && (c < half || c >= n - half)) return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  auto at = [&](int off) {
    int k = c + off;
    if (g.periodic) k = ((k % n) + n) % n;
    return axis == 0 ? a(k, j) : a(i, k);
  };
  if (deriv == 1) {
    if (acc == 2) return (at(1) - at(-1)) / (2.0 * h);
    return (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
  }
  if (acc == 2) return (at(1) - 2.0 * at(0) + at(-1)) / (h * h);
  return (-at(2) + 16.0 * at(1) - 30.0 * at(0) + 16.0 * at(-1) - at(-2)) / (12.0 * h * h);
}

}  // namespace

Field stencil(const Field& a, int axis, int deriv, int accuracy, Exec exec) {
  if ((deriv != 1 && deriv != 2) || (accuracy != 2 && accuracy != 4) || (axis != 0 && axis != 1))
    fail(ErrorKind::Domain, "unsupported stencil");
  Field out(a.grid);
  const int ny = a.grid.ny, nx = a.grid.nx;
  if (exec == Exec::Serial) {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) out(i, j) = stencil_at(a, i, j, axis, deriv, accuracy);
    return out;
  }
#pragma omp parallel for schedule(static)
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) out(i, j) = stencil_at(a, i, j, axis, deriv, accuracy);
  return out;
}

double cell_mean_log(double hx, double hy) {
  const double a = hx / 2.0, b = hy / 2.0;
  const double full = 2.0 * (a * b * (std::log(a * a + b * b) - 3.0) + a * a * std::atan(b / a) + b * b * std::atan(a / b));
  return full / (4.0 * a * b);
}

namespace {

double potential_at(const PlanarPoint& t, const std::vector<PlanarPoint>& src, const std::vector<double>& q,
                    double self_log, double tiny) {
  double s = 0.0;
  for (std::size_t k = 0; k < src.size(); ++k) {
    const double dx = t.x - src[k].x, dy = t.y - src[k].y;
    const double r2 = dx * dx + dy * dy;
    s += q[k] * (r2 < tiny ? self_log : 0.5 * std::log(r2));
  }
  return s / (2.0 * PI);
}

}  // namespace

std::vector<double> log_potential(const std::vector<PlanarPoint>& targets, const std::vector<PlanarPoint>& sources,
                                  const std::vector<double>& charges, double hx, double hy, Exec exec) {
  if (sources.size() != charges.size()) fail(ErrorKind::Domain, "sources and charges differ in length");
  std::vector<double> out(targets.size());
  const double self_log = cell_mean_log(hx, hy);
  const double tiny = 1e-20 * (hx * hx + hy * hy);
  const long n = static_cast<long>(targets.size());
  if (exec == Exec::Serial) {
    for (long k = 0; k < n; ++k) out[k] = potential_at(targets[k], sources, charges, self_log, tiny);
    return out;
  }
#pragma omp parallel for schedule(dynamic, 16)
  for (long k = 0; k < n; ++k) out[k] = potential_at(targets[k], sources, charges, self_log, tiny);
  return out;
}

}  // namespace magpauli::kernels
