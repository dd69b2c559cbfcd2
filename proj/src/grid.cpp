#include "magpauli/grid.hpp"

#include <algorithm>
#include <cmath>

namespace magpauli {

Grid Grid::make_periodic(double period_x, double period_y, int nx, int ny, double x0, double y0) {
  if (nx < 8 || ny < 8) fail(ErrorKind::Domain, "grid needs at least 8 nodes per direction");
  if (!(period_x > 0.0) || !(period_y > 0.0)) fail(ErrorKind::Domain, "grid periods must be positive");
  Grid g;
  g.x0 = x0;
  g.y0 = y0;
  g.nx = nx;
  g.ny = ny;
  g.hx = period_x / nx;
  g.hy = period_y / ny;
  g.periodic = true;
  return g;
}

Grid Grid::make_box(double xmin, double xmax, double ymin, double ymax, int nx, int ny) {
  if (nx < 8 || ny < 8) fail(ErrorKind::Domain, "grid needs at least 8 nodes per direction");
  if (!(xmax > xmin) || !(ymax > ymin)) fail(ErrorKind::Domain, "empty box");
  Grid g;
  g.x0 = xmin;
  g.y0 = ymin;
  g.nx = nx;
  g.ny = ny;
  g.hx = (xmax - xmin) / (nx - 1);
  g.hy = (ymax - ymin) / (ny - 1);
  g.periodic = false;
  return g;
}

Grid Grid::refined() const {
  Grid g = *this;
  g.hx *= 0.5;
  g.hy *= 0.5;
  if (periodic) {
    g.nx = 2 * nx;
    g.ny = 2 * ny;
  } else {
    g.nx = 2 * nx - 1;
    g.ny = 2 * ny - 1;
  }
  return g;
}

bool Grid::same_as(const Grid& o) const {
  return nx == o.nx && ny == o.ny && periodic == o.periodic && x0 == o.x0 && y0 == o.y0 && hx == o.hx &&
         hy == o.hy;
}

namespace {
void check_same(const Field& a, const Field& b) {
  if (!a.grid.same_as(b.grid)) fail(ErrorKind::Domain, "field shape mismatch");
}
}  // namespace

Field operator+(const Field& a, const Field& b) {
  check_same(a, b);
  Field r(a.grid);
  for (std::size_t k = 0; k < r.v.size(); ++k) r.v[k] = a.v[k] + b.v[k];
  return r;
}

Field operator-(const Field& a, const Field& b) {
  check_same(a, b);
  Field r(a.grid);
  for (std::size_t k = 0; k < r.v.size(); ++k) r.v[k] = a.v[k] - b.v[k];
  return r;
}

Field operator*(const Field& a, const Field& b) {
  check_same(a, b);
  Field r(a.grid);
  for (std::size_t k = 0; k < r.v.size(); ++k) r.v[k] = a.v[k] * b.v[k];
  return r;
}

Field operator*(cplx s, const Field& a) {
  Field r(a.grid);
  for (std::size_t k = 0; k < r.v.size(); ++k) r.v[k] = s * a.v[k];
  return r;
}

Field map(const Field& a, const std::function<cplx(cplx)>& f) {
  Field r(a.grid);
  for (std::size_t k = 0; k < r.v.size(); ++k) r.v[k] = f(a.v[k]);
  return r;
}

namespace {
template <class Acc>
double reduce_interior(const Field& a, int margin, Acc acc) {
  const Grid& g = a.grid;
  const int m = g.periodic ? 0 : margin;
  for (int j = m; j < g.ny - m; ++j)
    for (int i = m; i < g.nx - m; ++i) {
      const cplx v = a(i, j);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return std::nan("");
      acc(std::abs(v));
    }
  return 0.0;
}
}  // namespace

double norm_inf(const Field& a, int margin) {
  double mx = 0.0;
  const double bad = reduce_interior(a, margin, [&](double v) { mx = std::max(mx, v); });
  return std::isnan(bad) ? bad : mx;
}

double norm_rms(const Field& a, int margin) {
  double s = 0.0;
  std::size_t n = 0;
  const double bad = reduce_interior(a, margin, [&](double v) {
    s += v * v;
    ++n;
  });
  if (std::isnan(bad)) return bad;
  return n ? std::sqrt(s / n) : 0.0;
}

double observed_order(double coarse, double fine) { return std::log2(coarse / fine); }

std::vector<double> Contour::arclength() const {
  std::vector<double> s(points.size(), 0.0);
  for (std::size_t k = 1; k < points.size(); ++k)
    s[k] = s[k - 1] + std::hypot(points[k].x - points[k - 1].x, points[k].y - points[k - 1].y);
  return s;
}

double Contour::length() const {
  const auto s = arclength();
  return s.empty() ? 0.0 : s.back();
}

Contour make_contour(std::vector<PlanarPoint> pts, bool closed) {
  if (pts.size() < 2) fail(ErrorKind::Domain, "contour needs at least two points");
  Contour c;
  c.closed = closed;
  if (closed) {
    const auto& a = pts.front();
    const auto& b = pts.back();
    if (std::hypot(a.x - b.x, a.y - b.y) > 1e-12 * (1.0 + std::hypot(a.x, a.y))) pts.push_back(a);
  }
  c.points = std::move(pts);
  const std::size_t n = c.points.size();
  c.frenet_angle.resize(n);
  auto tangent = [&](std::size_t k) {
    std::size_t a = k == 0 ? (closed ? n - 2 : 0) : k - 1;
    std::size_t b = k + 1 == n ? (closed ? 1 : n - 1) : k + 1;
    if (!closed && k == 0) a = 0;
    return std::atan2(c.points[b].y - c.points[a].y, c.points[b].x - c.points[a].x);
  };
  double prev = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double th = tangent(k) - PI / 2.0;
    if (k > 0) th = prev + std::remainder(th - prev, 2.0 * PI);
    c.frenet_angle[k] = th;
    prev = th;
  }
  return c;
}

Contour resample(const Contour& c, double max_spacing) {
  const auto s = c.arclength();
  const double L = s.back();
  const int n = std::max(2, static_cast<int>(std::ceil(L / max_spacing)) + 1);
  std::vector<PlanarPoint> out;
  out.reserve(n);
  std::size_t seg = 0;
  for (int k = 0; k < n; ++k) {
    const double t = L * k / (n - 1);
    while (seg + 2 < s.size() && s[seg + 1] < t) ++seg;
    const double ds = s[seg + 1] - s[seg];
    const double u = ds > 0 ? (t - s[seg]) / ds : 0.0;
    out.push_back({c.points[seg].x + u * (c.points[seg + 1].x - c.points[seg].x),
                   c.points[seg].y + u * (c.points[seg + 1].y - c.points[seg].y)});
  }
  if (c.closed) out.back() = out.front();
  return make_contour(std::move(out), c.closed);
}

Contour circle(PlanarPoint center, double radius, int n, bool counterclockwise) {
  std::vector<PlanarPoint> pts;
  pts.reserve(n + 1);
  const double sgn = counterclockwise ? 1.0 : -1.0;
  for (int k = 0; k <= n; ++k) {
    const double t = sgn * 2.0 * PI * k / n;
    pts.push_back({center.x + radius * std::cos(t), center.y + radius * std::sin(t)});
  }
  pts.back() = pts.front();
  return make_contour(std::move(pts), true);
}

}  // namespace magpauli
