#include <cmath>
#include <random>

#include "doctest.h"
#include "magpauli/foliation.hpp"

using namespace magpauli;
using namespace magpauli::foliation;

namespace {

FoliationData plain(cplx k) {
  FoliationData d;
  d.k = k;
  return d;
}

// F e^{-2 Re(k zbar)} = 1/|k|^2 + B cos x + 2 Re(w e^{-iy}) for the Fig 6 exponents and k = i s
double fig6_periodic_part(double s, double a, PlanarPoint z) {
  const double B = 2.0 * a / (s * s - 0.25);
  const cplx w = -a / std::pow(cplx(0.5, s), 2);
  return 1.0 / (s * s) + B * std::cos(z.x) + 2.0 * std::real(w * std::exp(cplx(0.0, -z.y)));
}

// F = e^{2y} kappa (alpha + cos x)(beta + cos y) at k = i, built from four exponents
FoliationData product_data(double alpha, double beta) {
  FoliationData d = plain(cplx(0.0, 1.0));
  const double kappa = 1.0 / (alpha * beta);
  const cplx ls[4] = {0.5, cplx(0.0, 0.5), cplx(-0.5, 0.5), cplx(0.5, 0.5)};
  const double coef[4] = {kappa * alpha, kappa * beta, kappa / 2, kappa / 2};
  for (int j = 0; j < 4; ++j) {
    d.l.push_back(ls[j]);
    d.a.push_back(0.5 * coef[j] * (d.k + ls[j]) * (std::conj(d.k) - std::conj(ls[j])));
  }
  return d;
}

int winding(const FoliationData& d, PlanarPoint c, double r) {
  double turn = 0.0;
  const int n = 64;
  cplx prev = psi_prime(d, {c.x + r, c.y});
  for (int i = 1; i <= n; ++i) {
    const double t = 2 * PI * i / n;
    const cplx v = psi_prime(d, {c.x + r * std::cos(t), c.y + r * std::sin(t)});
    turn += std::arg(v / prev);
    prev = v;
  }
  return static_cast<int>(std::lround(turn / (2 * PI)));
}

}  // namespace

TEST_CASE("F for c = 1 is a single exponential") {
  const auto d = plain(cplx(0.4, -0.3));
  for (const PlanarPoint z : {PlanarPoint{0.1, 0.2}, PlanarPoint{-1.5, 2.0}}) {
    const double want = std::exp(2.0 * std::real(d.k * std::conj(z.z()))) / std::norm(d.k);
    CHECK(std::abs(f_eval(d, z) - want) < 1e-14 * want);
  }
  CHECK(critical_points(d).empty());
  const auto t = trace_leaf(d, {0.3, 0.1}, 20.0);
  const double c0 = std::real(d.k * std::conj(t.points[0].z()));
  double worst = 0.0;
  for (const auto& p : t.points) worst = std::max(worst, std::abs(std::real(d.k * std::conj(p.z())) - c0));
  CHECK(worst < 1e-12);
  CHECK(t.kind == LeafKind::OpenQuasiperiodic);
}

TEST_CASE("F at the Fig 6 parameters") {
  const auto d = fig6_data();
  CHECK(std::abs(f_eval(d, {0.0, 0.0}) - fig6_periodic_part(0.55, 0.2, {0.0, 0.0})) < 1e-12);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    const PlanarPoint z{u(rng), u(rng)};
    const double want = fig6_periodic_part(0.55, 0.2, z) * std::exp(1.1 * z.y);
    CHECK(std::abs(f_eval(d, z) - want) < 1e-12 * f_scale(d, z));
  }
}

TEST_CASE("gradient and Hessian against finite differences") {
  const auto d = fig6_data(cplx(0.3, 0.7));
  const double h = 1e-4;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 10; ++i) {
    const PlanarPoint z{u(rng), u(rng)};
    const auto g = f_grad(d, z);
    const double fx = (f_eval(d, {z.x + h, z.y}) - f_eval(d, {z.x - h, z.y})) / (2 * h);
    const double fy = (f_eval(d, {z.x, z.y + h}) - f_eval(d, {z.x, z.y - h})) / (2 * h);
    const double n = std::hypot(g[0], g[1]);
    CHECK(std::hypot(fx - g[0], fy - g[1]) < 1e-6 * n);
    const auto H = f_hessian(d, z);
    const auto gp = f_grad(d, {z.x + h, z.y}), gm = f_grad(d, {z.x - h, z.y});
    const auto gq = f_grad(d, {z.x, z.y + h}), gr = f_grad(d, {z.x, z.y - h});
    const double hn = std::abs(H[0]) + std::abs(H[1]) + std::abs(H[2]);
    CHECK(std::abs((gp[0] - gm[0]) / (2 * h) - H[0]) < 1e-6 * hn);
    CHECK(std::abs((gp[1] - gm[1]) / (2 * h) - H[1]) < 1e-6 * hn);
    CHECK(std::abs((gq[1] - gr[1]) / (2 * h) - H[2]) < 1e-6 * hn);
  }
}

TEST_CASE("gradient identity and multiplier law") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 2 * PI);
  const auto d = fig6_data();
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto r = grad_identity_residual(d, {u(rng), u(rng)});
    worst = std::max({worst, std::abs(r[0]), std::abs(r[1])});
  }
  CHECK(worst < 1e-10);

  std::uniform_real_distribution<double> w(-0.3, 0.3);
  for (int trial = 0; trial < 5; ++trial) {
    FoliationData e;
    e.k = cplx(0.8 + w(rng), 0.5 + w(rng));
    e.l = {0.5, cplx(0.0, 0.5), cplx(0.5, 0.5)};
    e.a = {cplx(w(rng), w(rng)), cplx(w(rng), w(rng)), cplx(w(rng), w(rng))};
    for (int i = 0; i < 20; ++i) {
      const PlanarPoint z{u(rng), u(rng)};
      const auto r = grad_identity_residual(e, z);
      CHECK(std::abs(r[0]) < 1e-10 * std::max(1.0, f_scale(e, z)));
      for (const cplx g : {cplx(2 * PI, 0.0), cplx(0.0, 2 * PI), cplx(-2 * PI, 4 * PI)})
        CHECK(multiplier_defect(e, z, g) < 1e-10);
    }
  }
  CHECK_THROWS_AS(validate(fig6_data(cplx(0.5, 0.0))), Error);
  FoliationData bad = fig6_data();
  bad.l[0] = 0.37;
  CHECK_THROWS_AS(validate(bad), Error);
}

TEST_CASE("critical points are centers and saddles with zero index sum") {
  CHECK(critical_points(fig6_data()).empty());
  for (double s : {0.62, 0.65, 0.7}) {
    const auto d = fig6_data(cplx(0.0, s));
    const auto cps = critical_points(d);
    REQUIRE(cps.size() == 2);
    CHECK(index_sum(cps) == 0);
    for (const auto& c : cps) {
      CHECK(c.kind != CriticalKind::Degenerate);
      CHECK(std::abs(psi_prime(d, c.position)) < 1e-10);
      // the index of grad F is minus the winding of psi'
      CHECK(winding(d, c.position, 0.05) == -c.index());
    }
  }
  const auto pd = product_data(0.5, 0.5);
  const auto cps = critical_points(pd);
  CHECK(cps.size() == 8);
  CHECK(index_sum(cps) == 0);
}

TEST_CASE("k scan marks the singular set") {
  const auto d = fig6_data();
  const auto s = k_scan(d, cplx(0.0, 0.5), cplx(0.0, 0.8), 4, 32);
  REQUIRE(s.counts.size() == 16);
  // column i = 0 is k = i t, t = 0.5, 0.6, 0.7, 0.8
  CHECK(s.counts[0 + 4 * 1] == 0);
  CHECK(s.counts[0 + 4 * 2] == 2);
}

TEST_CASE("closed leaf around a center") {
  const auto d = fig6_data(cplx(0.0, 0.65));
  const auto cps = critical_points(d);
  const CriticalPoint* center = nullptr;
  for (const auto& c : cps)
    if (c.kind == CriticalKind::Center) center = &c;
  REQUIRE(center != nullptr);
  const auto t = trace_leaf(d, {center->position.x + 0.15, center->position.y}, 50.0);
  CHECK(t.kind == LeafKind::ClosedNullHomotopic);
  CHECK(t.max_drift < 1e-10);
  // the enclosed point has winding of psi' equal to -1, i.e. index +1
  double cx = 0.0, cy = 0.0;
  for (const auto& p : t.points) cx += p.x, cy += p.y;
  CHECK(std::hypot(cx / t.points.size() - center->position.x, cy / t.points.size() - center->position.y) < 0.15);
  CHECK_THROWS_AS(trace_leaf(d, center->position, 1.0), Error);
}

TEST_CASE("rotation numbers") {
  const auto r0 = rotation_number(plain(0.7), {0.2, 0.3});
  CHECK(std::abs(r0.rho) < 1e-12);
  REQUIRE(r0.locked);
  CHECK((*r0.locked)[0] == 0);
  CHECK((*r0.locked)[1] == 1);

  const cplx kbig = 25.0 * std::polar(1.0, PI / 3);
  const auto rb = rotation_number(fig6_data(kbig), {0.3, 0.2});
  const auto rp = rotation_number(plain(kbig), {0.3, 0.2});
  CHECK(std::abs(rp.rho - kbig.imag() / -kbig.real()) < 1e-9);
  CHECK(std::abs(rb.rho - rp.rho) < 1e-3);
  CHECK_FALSE(rb.locked);

  const auto r6 = rotation_number(fig6_data(), {1.0, 0.3});
  REQUIRE(r6.locked);
  CHECK((*r6.locked)[0] == 0);
}

TEST_CASE("leaves conserve F over 50 cells") {
  TraceOptions opt;
  opt.stop_cells = 50;
  const auto big = fig6_data(25.0 * std::polar(1.0, PI / 3));
  const auto t = trace_leaf(big, {0.3, 0.2}, 1e9, opt);
  CHECK(t.max_drift < 1e-8);
  const auto v = classify_leaf(t, big);
  CHECK(v.kase == LeafCase::BoundedOpen);
  CHECK(v.sup_over_inf < 10.0);

  const auto d = fig6_data();
  const auto t6 = trace_leaf(d, {1.0, 0.3}, 1e9, opt);
  CHECK(t6.max_drift < 1e-8);
}

TEST_CASE("Fig 6 limit cycles") {
  const auto d = fig6_data();
  const auto cycles = limit_cycle_scan(d);
  REQUIRE(cycles.size() >= 1);
  for (const auto& c : cycles) {
    REQUIRE(c.homology);
    CHECK((*c.homology)[0] == 0);
    CHECK(std::abs((*c.homology)[1]) == 1);
    for (double eps : {1e-3, -1e-3}) {
      const auto dist = approach_distances(d, c, eps);
      for (std::size_t i = 0; i + 1 < dist.size(); ++i) CHECK(dist[i] >= 2.0 * dist[i + 1]);
    }
    const auto v = classify_leaf(c, d);
    CHECK(v.kase == LeafCase::EssentialZero);
    CHECK_FALSE(v.admissible);
    // |psi'| ~ e^{Re(k zbar)} = e^{0.55 y}
    CHECK(std::abs(v.growth_rate - 0.55) < 1e-6);
  }
  const auto again = limit_cycle_scan(d);
  REQUIRE(again.size() == cycles.size());
  CHECK(again[0].points.size() == cycles[0].points.size());

  CHECK(limit_cycle_scan(plain(cplx(0.0, 0.55))).empty());
  FoliationData small = d;
  small.a = {0.01, 0.01};
  CHECK(limit_cycle_scan(small).empty());
}

TEST_CASE("maximal separatrix cycle") {
  const auto d = product_data(0.5, 0.5);
  const auto sc = separatrix_cycle(d);
  REQUIRE(sc);
  const auto v = classify_leaf(*sc, d);
  CHECK(v.kase == LeafCase::MaximalSeparatrix);
  CHECK(std::abs(v.area_ratio - 1.0) < 0.01);
  // Fig 6 k = 0.65i: one saddle, its separatrices do not bound a full cell
  const auto d2 = fig6_data(cplx(0.0, 0.65));
  const auto s2 = separatrix_cycle(d2);
  if (s2) CHECK(classify_leaf(*s2, d2).kase != LeafCase::MaximalSeparatrix);
}
