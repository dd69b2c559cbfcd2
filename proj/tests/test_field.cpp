#include <cmath>
#include <random>

#include "doctest.h"
#include "magpauli/field.hpp"
#include "magpauli/numcore.hpp"
#include "oracles.hpp"

using namespace magpauli;
using namespace magpauli::field;

TEST_CASE("closed-form B") {
  const auto one = make_field({{1.0, 0.0, 0.0}}, true);
  CHECK(std::abs(eval_c(one, {0.3, 0.2}) - 1.0) < 1e-15);
  CHECK(eval_b(one, {0.3, 0.2}) == 0.0);

  const auto f6 = fig6_field();
  CHECK(f6.real_flag);
  CHECK(f6.periodic_flag);
  CHECK(std::abs(eval_c(f6, {0.7, -1.1}) - (1.0 + 0.4 * std::cos(0.7) + 0.4 * std::cos(-1.1))) < 1e-14);
  CHECK(std::abs(eval_b(f6, {0, 0}) - 0.5 * (-0.8 / 1.8)) < 1e-14);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int k = 0; k < 20; ++k) {
    const auto f = oracle::random_trig_field(rng, 4);
    const PlanarPoint p{u(rng), u(rng)};
    const PointFn logc = [&](PlanarPoint q) { return std::log(eval_c(f, q)); };
    CHECK(std::abs(eval_b(f, p) - 0.5 * numcore::laplacian_at(logc, p).real()) < 1e-7);
  }
}

TEST_CASE("gauge covariance") {
  const auto f = fig2b_field();
  const double a = 0.7, b = -1.3, g = 0.4;
  std::vector<ExpTerm> t = f.terms;
  for (auto& s : t) {
    s.kappa *= std::exp(g);
    s.p += cplx(a, -b) / 2.0;
    s.k += cplx(-a, -b) / 2.0;
  }
  const auto h = make_field(t, true);
  for (PlanarPoint p : {PlanarPoint{0.3, 0.1}, PlanarPoint{-2, 1.5}, PlanarPoint{4, -3}}) {
    CHECK(std::abs(eval_c(h, p) - eval_c(f, p) * std::exp(g + a * p.x + b * p.y)) < 1e-12 * std::abs(eval_c(h, p)));
    CHECK(std::abs(eval_b(h, p) - eval_b(f, p)) < 1e-12);
  }
}

TEST_CASE("declared reality is enforced") {
  CHECK_THROWS_AS(make_field({{1.0, 0.0, 0.0}, {cplx(0.0, 0.3), 0.5, -0.5}}, true), Error);
  const auto zero = make_field({{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}});
  CHECK_THROWS_AS(eval_b(zero, {0, 0}), Error);
  try {
    eval_phi(zero, {0, 0});
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Singular);
  }
}

TEST_CASE("periodic cell average of B vanishes") {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 5; ++k) CHECK(std::abs(cell_flux(oracle::random_trig_field(rng), 2 * PI, 2 * PI, 64)) < 1e-10);
  CHECK(std::abs(cell_flux(fig6_field(), 2 * PI, 2 * PI, 64)) < 1e-10);
}

TEST_CASE("tropical indicator") {
  const auto f = fig2b_field();
  for (int k = 0; k < 720; ++k) {
    const double phi = 2 * PI * k / 720;
    const auto t = tropical_indicator(f, phi);
    const double ref = std::max({std::cos(phi), std::sin(phi), -std::cos(phi) - std::sin(phi)});
    CHECK(std::abs(t.i_prime - ref) < 1e-14);
    CHECK(t.i_prime > 0.0);
    bool attained = false;
    for (const auto& w : f.forms) {
      const double v = w[0] * std::cos(phi) + w[1] * std::sin(phi);
      CHECK(t.i_prime >= v - 1e-15);
      attained = attained || std::abs(t.i_prime - v) < 1e-15;
    }
    CHECK(attained);
  }
  const auto anti = make_field({{1.0, 0.5, -0.5}, {1.0, -0.5, 0.5}}, true);
  CHECK(std::abs(tropical_indicator(anti, 0.3).i_prime - std::abs(std::cos(0.3))) < 1e-14);
  CHECK(std::abs(tropical_indicator(anti, PI / 2).i_prime) < 1e-15);
  CHECK(tropical_indicator(make_field({{1.0, 0.0, 0.0}}), 1.0).i_prime == 0.0);
  CHECK_THROWS_AS(tropical_indicator(fig6_field(), 0.0), Error);
}

TEST_CASE("shift polytope") {
  const auto T = shift_polytope(fig2b_field());
  REQUIRE(T.hull.size() == 3);
  CHECK(T.interior_nonempty);
  CHECK(T.contains(0, 0, true));
  CHECK(!T.contains(2, 0, false));
  const auto S = shift_polytope(make_field({{1.0, 0.5, -0.5}, {1.0, -0.5, 0.5}}));
  CHECK(S.closure_nonempty);
  CHECK(!S.interior_nonempty);
  CHECK(S.contains(0, 0, false));
  CHECK(!S.contains(0, 0, true));
  CHECK(!shift_polytope(make_field({{1.0, 0.2, -0.2}})).closure_nonempty);
}

TEST_CASE("flux asymptotics") {
  const auto one = make_field({{1.0, 0.0, 0.0}}, true);
  CHECK(flux_disk(one, 10.0, 64).flux == 0.0);
  const auto f = fig2b_field();
  // B decays along a generic ray
  const double b30 = std::abs(eval_b(f, {30 * std::cos(0.4), 30 * std::sin(0.4)}));
  CHECK(b30 < 1e-6);
  CHECK(std::abs(eval_b(f, {60 * std::cos(0.4), 60 * std::sin(0.4)})) < 1e-4 * b30);
  const auto r20 = flux_disk(f, 20.0), r40 = flux_disk(f, 40.0);
  const double slope = (r40.flux - r20.flux) / 20.0;
  CHECK(std::abs(slope - 0.5 * r40.tropical_integral) < 0.02 * 0.5 * r40.tropical_integral);
  CHECK(std::abs(r40.flux / 40.0 - 0.5 * r40.tropical_integral) < 0.02 * 0.5 * r40.tropical_integral);
  // residual stays O(1)
  CHECK(std::abs(r40.residual - r20.residual) < 0.5);
}
