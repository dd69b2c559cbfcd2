#include <cmath>
#include <random>

#include "doctest.h"
#include "magpauli/kernels.hpp"
#include "magpauli/laplace.hpp"
#include "oracles.hpp"

using namespace magpauli;
using namespace magpauli::laplace;

namespace {

Field sampled(const Grid& g, const oracle::TrigSum& f) {
  return kernels::sample(g, [&](PlanarPoint p) { return f(p); });
}

Field real_sampled(const Grid& g, const oracle::TrigSum& f) {
  return kernels::sample(g, [&](PlanarPoint p) { return cplx(f(p).real(), 0.0); });
}

double max_diff(const Field& a, const PointFn& f) {
  double m = 0.0;
  for (int j = 0; j < a.grid.ny; ++j)
    for (int i = 0; i < a.grid.nx; ++i) m = std::max(m, std::abs(a(i, j) - f(a.grid.point(i, j))));
  return m;
}

}  // namespace

TEST_CASE("laplace step trivial cases") {
  const Grid g = Grid::make_periodic(2 * PI, 2 * PI, 32, 32);
  std::mt19937_64 rng(3);
  const auto bt = oracle::random_trig(rng, 4, 3, true);
  const LaplaceState s{real_sampled(g, bt), Field(g, 2.5)};
  const auto t = laplace_step(s);
  CHECK(norm_inf(t.b - s.b) < 1e-12);
  CHECK(norm_inf(t.w - (s.w + s.b)) < 1e-12);

  const LaplaceState fixed{Field(g, 0.0), Field(g, 1.0)};
  const auto f1 = laplace_step(fixed);
  CHECK(norm_inf(f1.b) < 1e-14);
  CHECK(norm_inf(f1.w - fixed.w) < 1e-14);
}

TEST_CASE("laplace step invariant formula and mean of B") {
  const Grid g = Grid::make_periodic(2 * PI, 2 * PI, 32, 32);
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto bt = oracle::random_trig(rng, 4, 3, true);
    const auto ut = oracle::random_trig(rng, 4, 3, true);
    // W = exp(u) > 0, so 1/2 Laplacian log W = 1/2 lap(u)
    const LaplaceState s{real_sampled(g, bt), kernels::sample(g, [&](PlanarPoint p) { return std::exp(ut(p).real()); })};
    const auto t = laplace_step(s);
    CHECK(max_diff(t.b, [&](PlanarPoint p) { return bt(p).real() + 0.5 * ut.lap(p).real(); }) < 1e-10);
    CHECK(max_diff(t.w, [&](PlanarPoint p) { return std::exp(ut(p).real()) + bt(p).real() + 0.5 * ut.lap(p).real(); }) <
          1e-10);
    CHECK(std::abs(cell_mean(t.b) - cell_mean(s.b)) < 1e-10);
  }
  const LaplaceState bad{Field(g, 0.0), kernels::sample(g, [](PlanarPoint p) { return cplx(std::cos(p.x)); })};
  CHECK_THROWS_AS(laplace_step(bad), Error);
}

TEST_CASE("laplace chain") {
  const Grid g = Grid::make_periodic(2 * PI, 2 * PI, 32, 32);
  const LaplaceState c0{kernels::sample(g, [](PlanarPoint p) { return cplx(0.3 * std::sin(p.y)); }), Field(g, 2.0)};
  const auto r0 = laplace_chain(c0, 3);
  CHECK(r0.factorizable[0]);

  const auto fixed = laplace_chain({Field(g, 0.0), Field(g, 1.0)}, 4);
  REQUIRE(fixed.cycle_index.has_value());
  CHECK(*fixed.cycle_index == 1);

  const LaplaceState drift{Field(g, 0.0), kernels::sample(g, [](PlanarPoint p) { return cplx(1.0 + 0.1 * std::cos(p.x)); })};
  const auto a = laplace_chain(drift, 10);
  const auto b = laplace_chain(drift, 10);
  CHECK(a.states.size() >= 2);
  CHECK_FALSE(a.factorizable[0]);
  REQUIRE(a.states.size() == b.states.size());
  bool same = true;
  for (std::size_t j = 0; j < a.states.size(); ++j) same = same && a.states[j].b.v == b.states[j].b.v && a.states[j].w.v == b.states[j].w.v;
  CHECK(same);
  for (std::size_t j = 1; j < a.states.size(); ++j) CHECK(std::abs(cell_mean(a.states[j].b)) < 1e-10);

  const LaplaceState dies{Field(g, -1.2), kernels::sample(g, [](PlanarPoint p) { return cplx(1.0 + 0.5 * std::cos(p.x)); })};
  const auto d = laplace_chain(dies, 3);
  REQUIRE(d.truncated_at.has_value());
  CHECK(*d.truncated_at == 2);
}

TEST_CASE("intertwining is second order") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    const auto phi = oracle::random_trig(rng, 3, 2, true);
    const auto psi = oracle::random_trig(rng, 3, 2, false);
    double r[2];
    for (int k = 0; k < 2; ++k) {
      const Grid g = Grid::make_periodic(2 * PI, 2 * PI, 64 << k, 64 << k);
      const auto m = numcore::MagneticCoeffs::from_samples(real_sampled(g, phi), numcore::Scheme::Central2);
      r[k] = norm_inf(intertwine_residual(m, sampled(g, psi)));
    }
    CHECK(observed_order(r[0], r[1]) >= 1.9);
  }
  // zero mode psi = e^{Phi}: Q+ psi = 0 at O(h^2)
  const auto phi = oracle::random_trig(rng, 3, 2, true);
  const Grid g = Grid::make_periodic(2 * PI, 2 * PI, 128, 128);
  const Field ph = real_sampled(g, phi);
  const auto m = numcore::MagneticCoeffs::from_samples(ph, numcore::Scheme::Spectral);
  CHECK(norm_inf(intertwine_residual(m, map(ph, [](cplx v) { return std::exp(v); }))) < 1e-8);
}

TEST_CASE("manakov rhs") {
  const Grid g = Grid::make_periodic(2 * PI, 2 * PI, 32, 32);
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const auto phi = oracle::random_trig(rng, 4, 3, true);
    const auto chi = oracle::random_trig(rng, 4, 3, true);
    // G = phi_x, F = 2 phi_y, S = chi_y, A = 2 chi_x satisfy both constraints
    const auto G = phi.deriv(1, 0), S = chi.deriv(0, 1);
    const auto Fh = phi.deriv(0, 1), Ah = chi.deriv(1, 0);
    ManakovState st{real_sampled(g, G), real_sampled(g, S), 2.0 * real_sampled(g, Fh), 2.0 * real_sampled(g, Ah)};
    const auto rhs = manakov_rhs(st);
    CHECK_FALSE(rhs.constraint_warning);
    auto re = [](const oracle::TrigSum& t, int ax, int ay, PlanarPoint p) { return t.deriv(ax, ay)(p).real(); };
    const PointFn gt = [&](PlanarPoint p) {
      const double g0 = re(G, 0, 0, p), gx = re(G, 1, 0, p), f = 2 * re(Fh, 0, 0, p), fx = 2 * re(Fh, 1, 0, p);
      return cplx(re(G, 2, 0, p) - re(G, 0, 2, p) + f * fx / 2 - 2 * g0 * gx - 2 * re(Ah, 1, 0, p) + 2 * re(S, 0, 1, p));
    };
    const PointFn stf = [&](PlanarPoint p) {
      const double s0 = re(S, 0, 0, p), g0 = re(G, 0, 0, p), f = 2 * re(Fh, 0, 0, p);
      return cplx(re(S, 0, 2, p) - re(S, 2, 0, p) - 2 * (re(G, 1, 0, p) * s0 + g0 * re(S, 1, 0, p)) +
                  2 * re(Fh, 0, 1, p) * s0 + f * re(S, 0, 1, p));
    };
    CHECK(max_diff(rhs.g_t, gt) < 1e-10);
    CHECK(max_diff(rhs.s_t, stf) < 1e-10);

    // S = 0 reduction
    ManakovState red = st;
    red.s = Field(g, 0.0);
    red.a = Field(g, 0.0);
    const auto r2 = manakov_rhs(red);
    bool zero = true;
    for (const cplx& v : r2.s_t.v) zero = zero && v == cplx(0.0, 0.0);
    CHECK(zero);

    // G = S = 0 leaves (F^2/4)_x - A_x
    ManakovState drop{Field(g, 0.0), Field(g, 0.0), st.f, st.a};
    const auto r3 = manakov_rhs(drop);
    CHECK(max_diff(r3.g_t, [&](PlanarPoint p) {
            return cplx(2 * re(Fh, 0, 0, p) * re(Fh, 1, 0, p) - 2 * re(Ah, 1, 0, p));
          }) < 1e-10);
  }
  ManakovState broken{Field(g, 0.0), Field(g, 0.0),
                      kernels::sample(g, [](PlanarPoint p) { return cplx(std::sin(p.x)); }), Field(g, 0.0)};
  CHECK(manakov_rhs(broken).constraint_warning);
}
