#pragma once

#include <functional>
#include <vector>

#include "magpauli/types.hpp"

namespace magpauli {

// Rectangular sample lattice. Periodic grids exclude the right/top endpoint
// (h = L/n); box grids include both ends (h = L/(n-1)).
struct Grid {
  double x0 = 0.0, y0 = 0.0;
  double hx = 1.0, hy = 1.0;
  int nx = 8, ny = 8;
  bool periodic = true;

  static Grid make_periodic(double period_x, double period_y, int nx, int ny, double x0 = 0.0, double y0 = 0.0);
  static Grid make_box(double xmin, double xmax, double ymin, double ymax, int nx, int ny);

  double period_x() const { return hx * nx; }
  double period_y() const { return hy * ny; }
  double x(int i) const { return x0 + hx * i; }
  double y(int j) const { return y0 + hy * j; }
  PlanarPoint point(int i, int j) const { return {x(i), y(j)}; }
  std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  Grid refined() const;
  bool same_as(const Grid& o) const;
};

// Complex samples, row-major with rows along y.
struct Field {
  Grid grid;
  std::vector<cplx> v;

  Field() = default;
  explicit Field(const Grid& g, cplx fill = 0.0) : grid(g), v(g.size(), fill) {}
  cplx& operator()(int i, int j) { return v[grid.index(i, j)]; }
  const cplx& operator()(int i, int j) const { return v[grid.index(i, j)]; }
};

using PointFn = std::function<cplx(PlanarPoint)>;

Field operator+(const Field& a, const Field& b);
Field operator-(const Field& a, const Field& b);
Field operator*(const Field& a, const Field& b);
Field operator*(cplx s, const Field& a);
Field map(const Field& a, const std::function<cplx(cplx)>& f);

// Sup and RMS norms over the nodes at least `margin` nodes away from the edge
// (margin ignored on periodic grids). Non-finite values inside the region yield NaN.
double norm_inf(const Field& a, int margin = 0);
double norm_rms(const Field& a, int margin = 0);

// Convergence order from residual norms at h and h/2.
double observed_order(double coarse, double fine);

// Polyline with unwrapped Frenet angle (direction of the normal n, tangent rotated by +pi/2).
struct Contour {
  std::vector<PlanarPoint> points;
  bool closed = false;
  std::vector<double> frenet_angle;

  // arclength parameter of each point
  std::vector<double> arclength() const;
  double length() const;
};

Contour make_contour(std::vector<PlanarPoint> pts, bool closed);
Contour resample(const Contour& c, double max_spacing);
Contour circle(PlanarPoint center, double radius, int n, bool counterclockwise = true);

}  // namespace magpauli
