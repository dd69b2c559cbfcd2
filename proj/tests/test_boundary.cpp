#include <cmath>
#include <random>

#include "doctest.h"
#include "magpauli/boundary.hpp"
#include "magpauli/field.hpp"

using namespace magpauli;
using namespace magpauli::boundary;

namespace {

const char* kVariants[] = {"dirichlet",           "neumann",
                           "leontovich",          "dbar",
                           "general_local",       "mixing_ultralocal_1",
                           "mixing_ultralocal_2", "mixing_ultralocal_3",
                           "mixing_local"};

// winding of alpha + i beta from unwrapped argument, independent of the RP^1 reduction
int winding_oracle(const std::vector<double>& a, const std::vector<double>& b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::size_t j = (i + 1) % a.size();
    total += std::arg(cplx(a[j], b[j]) / cplx(a[i], b[i]));
  }
  return static_cast<int>(std::lround(total / (2 * PI)));
}

spectral::WeightedBA fig6_weighted() { return spectral::weighted_from_field(field::fig6_field()); }

}  // namespace

TEST_CASE("circle operators") {
  const auto e3 = circle_sample(64, [](double t) { return std::exp(3.0 * I * t); });
  const auto d = circle_deriv(e3);
  for (int i = 0; i < 64; ++i) CHECK(std::abs(d[i] - 3.0 * I * e3[i]) < 1e-12);

  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  auto trig = [&](int modes) {
    std::vector<cplx> c(2 * modes + 1);
    for (auto& v : c) v = {g(rng), g(rng)};
    return circle_sample(128, [c, modes](double t) {
      cplx s = 0.0;
      for (int m = -modes; m <= modes; ++m) s += c[m + modes] * std::exp(I * double(m) * t);
      return s;
    });
  };
  const CircleOp op{trig(2), trig(3)};
  const auto f = trig(5), h = trig(5);
  auto inner = [](const CircleFn& a, const CircleFn& b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
  };
  CHECK(std::abs(inner(f, op.apply(h)) - inner(op.adjoint().apply(f), h)) < 1e-9);
}

TEST_CASE("Lagrangian residual on valid and corrupted records") {
  std::mt19937_64 rng(2024);
  for (const char* name : kVariants) {
    CAPTURE(name);
    for (int r = 0; r < 20; ++r) {
      const auto bc = random_record(name, rng);
      CHECK(check_record(bc).empty());
      const auto s = lagrangian_samples(bc, rng);
      CHECK(relation_residual(bc, s) < 1e-12);
      CHECK(lagrangian_residual(bc, s) < 1e-10);
      if (std::string(name) == "dirichlet" || std::string(name) == "neumann") continue;
      const auto bad = corrupt(bc, rng);
      CHECK_FALSE(check_record(bad).empty());
      const auto sb = lagrangian_samples(bad, rng);
      CHECK(relation_residual(bad, sb) < 1e-12);
      CHECK(lagrangian_residual(bad, sb) > 1e-4);
    }
  }
}

TEST_CASE("Leontovich with complex beta is not Lagrangian") {
  std::mt19937_64 rng(8);
  Leontovich r;
  r.alpha = circle_sample(128, [](double t) { return cplx(1.0 + 0.3 * std::cos(t)); });
  r.beta = circle_sample(128, [](double t) { return cplx(std::sin(2 * t), 0.5); });
  const BoundaryCondition bc = r;
  CHECK_FALSE(check_record(bc).empty());
  CHECK(lagrangian_residual(bc, lagrangian_samples(bc, rng)) > 1e-3);
}

TEST_CASE("Leontovich charge") {
  const int n = 256;
  auto ts = [n](const std::function<double(double)>& f) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = f(2 * PI * i / n);
    return v;
  };
  CHECK(leontovich_charge(std::vector<double>(n, 1.0), std::vector<double>(n, 0.0)) == 0);
  CHECK(leontovich_charge(ts([](double t) { return std::cos(t); }), ts([](double t) { return std::sin(t); })) == 1);
  CHECK(leontovich_charge(ts([](double t) { return std::cos(2 * t); }), ts([](double t) { return std::sin(2 * t); })) ==
        2);

  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    const auto bc = std::get<Leontovich>(random_record("leontovich", rng, n));
    std::vector<double> a, b, a2, b2;
    for (int i = 0; i < n; ++i) {
      a.push_back(bc.alpha[i].real());
      b.push_back(bc.beta[i].real());
      // small homotopy
      a2.push_back(a.back() + 0.05 * std::sin(3.0 * 2 * PI * i / n));
      b2.push_back(b.back() - 0.05 * std::cos(2 * PI * i / n));
    }
    const int q = leontovich_charge(a, b);
    CHECK(q == winding_oracle(a, b));
    CHECK(leontovich_charge(a2, b2) == q);
  }
  CHECK_THROWS_AS(leontovich_charge(ts([](double t) { return std::cos(t); }), ts([](double) { return 0.0; })), Error);
}

TEST_CASE("d-bar extraction") {
  // c = 1, psi' = e^{k zbar}, vertical contour: v = -2k
  spectral::WeightedBA one{{field::ExpTerm{1.0, 0.0, 0.0}}};
  const double k = 0.7;
  std::vector<PlanarPoint> pts;
  for (int i = 0; i <= 50; ++i) pts.push_back({0.4, -1.0 + 0.04 * i});
  const auto rep = dbar_extract([&](PlanarPoint z) { return spectral::qplus_ratio(one, k, z); }, make_contour(pts, false));
  CHECK(rep.max_imag < 1e-12);
  CHECK(std::abs(rep.v[0] - (-2.0 * k)) < 1e-12);

  // leaves of the d-bar direction field for Fig 6 data and a transversal control line
  const auto w = fig6_weighted();
  const cplx kk{0.0, 0.55};
  const auto ratio = [&](PlanarPoint z) { return spectral::qplus_ratio(w, kk, z); };
  const auto form = [&](PlanarPoint z) {
    const cplx r = ratio(z);
    return FormCoeffs{r.real(), r.imag()};
  };
  const auto leaf = trace_form_leaf(form, {0.3, 0.2}, 2e-3, 1500);
  CHECK(dbar_extract(ratio, leaf).max_imag < 1e-6);
  std::vector<PlanarPoint> line;
  const cplx r0 = ratio({0.3, 0.2});
  for (int i = 0; i <= 200; ++i) {
    const double s = 0.01 * i;
    line.push_back({0.3 + s * r0.real() / std::abs(r0), 0.2 + s * r0.imag() / std::abs(r0)});
  }
  CHECK(dbar_extract(ratio, make_contour(line, false)).max_imag > 0.1);
}

TEST_CASE("scalar and mixing leaf forms") {
  const PointFn pos = [](PlanarPoint p) { return cplx(2.0 + std::sin(p.x) * std::cos(p.y)); };
  const PointFn cst = [](PlanarPoint) { return cplx(0.7); };
  const auto f0 = leaf_form_scalar(pos, cst, {0.3, -0.4});
  CHECK(std::abs(f0.dx) < 1e-12);
  CHECK(std::abs(f0.dy) < 1e-12);

  const auto w = fig6_weighted();
  ZeroModePair pair{w, cplx(0.0, 0.55), 0.0};
  const PointFn pp = [&](PlanarPoint z) { return pair.plus(z); };
  const PointFn pm = [&](PlanarPoint z) { return pair.minus(z); };
  const PointFn ph = [&](PlanarPoint z) { return cplx(pair.phi(z)); };
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int i = 0; i < 20; ++i) {
    const PlanarPoint z{u(rng), u(rng)};
    const auto s = leaf_form_scalar(pp, ph, z);
    const auto m = leaf_form_mixing(pp, pm, ph, z);
    const double cross = s.dx * m.dy - s.dy * m.dx;
    CHECK(std::abs(cross) / (std::hypot(s.dx, s.dy) * std::hypot(m.dx, m.dy)) < 1e-10);
  }

  // lambda -> infinity: the psi- only form
  ZeroModePair big{w, cplx(0.0, 0.55), 1e6};
  ZeroModePair unit{w, cplx(0.0, 0.55), 1.0};
  const PointFn zero = [](PlanarPoint) { return cplx(0.0); };
  for (int i = 0; i < 5; ++i) {
    const PlanarPoint z{u(rng), u(rng)};
    const auto a = leaf_form_mixing(pp, [&](PlanarPoint q) { return big.minus(q); }, ph, z);
    const auto b = leaf_form_mixing(zero, [&](PlanarPoint q) { return unit.minus(q); }, ph, z);
    CHECK(std::abs(a.dx / 1e12 - b.dx) < 1e-8 * (1 + std::abs(b.dx)));
    CHECK(std::abs(a.dy / 1e12 - b.dy) < 1e-8 * (1 + std::abs(b.dy)));
  }

  // lambda = 1: traced mixed leaf
  const auto form = [&](PlanarPoint z) {
    return leaf_form_mixing(pp, [&](PlanarPoint q) { return unit.minus(q); }, ph, z);
  };
  const auto leaf = trace_form_leaf(form, {0.1, 0.4}, 1e-3, 1600);
  CHECK(form_residual(form, leaf) < 1e-6);

  // negative control: a random straight contour
  std::vector<PlanarPoint> line;
  for (int i = 0; i <= 100; ++i) line.push_back({-1.0 + 0.02 * i, 0.3 + 0.013 * i});
  CHECK(form_residual([&](PlanarPoint z) { return leaf_form_scalar(pp, ph, z); }, make_contour(line, false)) > 0.1);
}

TEST_CASE("special contours of the first kind") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.3, 1.5);
  for (int draw = 0; draw < 5; ++draw) {
    const double a = u(rng), k = u(rng) * (draw % 2 ? 1 : -1);
    std::vector<double> b;
    for (int j = 0; j < 6; ++j) b.push_back(u(rng) * (j % 2 ? 1 : -1) + 0.1 * j);
    const auto d = special_contour_kind1(6, a, b, k);
    CHECK(d.nullspace_dim >= 1);
    double sum = 0.0;
    for (int j = 1; j <= 6; ++j) sum += d.kappa[j];
    CHECK(std::abs(sum) < 1e-12);
    const auto rep = verify_kind1(d);
    CHECK(rep.max_im_ratio < 1e-8);
    CHECK(rep.multiplier_defect < 1e-10);
    CHECK(rep.max_c_deviation < 1e-10);
    CHECK(rep.max_phi_y < 1e-10);

    // homogeneity
    auto scaled = d;
    for (auto& v : scaled.kappa) v *= 3.0;
    CHECK(verify_kind1(scaled).max_im_ratio < 1e-8);

    // Lemma 4 form along x = 0 with the solved kappa
    const auto w = d.weighted();
    const PointFn psi = [&](PlanarPoint z) { return psi_prime_grad(w, k, z)[0]; };
    const PointFn phi = [&](PlanarPoint z) { return cplx(-0.5 * std::log(spectral::weighted_c(w, z).real())); };
    double worst = 0.0;
    for (int i = 0; i < 40; ++i) worst = std::max(worst, std::abs(leaf_form_scalar(psi, phi, {0.0, 0.1 * i}).dy));
    CHECK(worst < 1e-8);
  }
  CHECK_THROWS_AS(special_contour_kind1(2, 0.7, {0.4, -0.9}, 0.5), Error);
}

TEST_CASE("superposition integrals") {
  const auto w = fig6_weighted();
  SuperposeSpec s;
  s.w = w;
  s.g = cplx(0.0, 2 * PI);
  const double center = -1.3, width = 1e-3;
  s.p = [=](double t) { return cplx(std::exp(-0.5 * std::pow((t - center) / width, 2)) / (width * std::sqrt(2 * PI))); };
  s.s_min = center - 12 * width;
  s.s_max = center + 12 * width;
  const PlanarPoint z{0.4, -0.3};
  // k = i s g/|g| = -s
  const cplx want = psi_prime_grad(w, cplx(-center, 0.0), z)[0];
  CHECK(std::abs(superpose(s, Domain::III, z) - want) < 1e-5 * std::abs(want));
  CHECK(std::abs(superpose(s, Domain::II, z) - want) < 1e-5 * std::abs(want));
  CHECK(std::abs(superpose(s, Domain::I, z)) == 0.0);

  // IV: common multiplier along g
  SuperposeSpec iv;
  iv.w = w;
  iv.g = cplx(0.0, 2 * PI);
  iv.k0 = 0.3;
  iv.pm = {0.2, -0.5, 1.0, 0.7, 0.1};
  iv.qm = {0.0, 0.3, 0.0, -0.2, 0.05};
  const cplx kappa = std::exp(iv.k0 * std::conj(iv.g));
  CHECK(std::abs(std::abs(kappa) - 1.0) < 1e-14);
  for (const PlanarPoint q : {PlanarPoint{0.1, 0.2}, PlanarPoint{-0.7, 1.1}}) {
    const cplx a = superpose(iv, Domain::IV, q), b = superpose(iv, Domain::IV, PlanarPoint::of(q.z() + iv.g));
    CHECK(std::abs(b / a - kappa) < 1e-8);
  }

  // II with a Gaussian on s < 0 decays into x < 0; support kept clear of the pole k = 0.5
  SuperposeSpec ii;
  ii.w = w;
  ii.g = cplx(0.0, 2 * PI);
  ii.p = [](double t) { return cplx(std::exp(-0.5 * std::pow((t + 2.0) / 0.2, 2))); };
  ii.s_min = -3.5;
  ii.s_max = -1.0;
  double prev = 1e300;
  for (double x : {0.0, -1.0, -2.0, -3.0, -4.0}) {
    const double v = std::abs(superpose(ii, Domain::II, {x, 0.3}));
    CHECK(v < 0.6 * prev);
    prev = v;
  }
  ii.s_max = 0.0;
  CHECK_THROWS_AS(superpose(ii, Domain::II, {0.0, 0.3}), Error);
}
