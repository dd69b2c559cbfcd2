#include <cmath>
#include <random>

#include "doctest.h"
#include "magpauli/numcore.hpp"
#include "magpauli/spectral.hpp"
#include "oracles.hpp"

using namespace magpauli;
using namespace magpauli::spectral;

namespace {

SpectralDataG0 random_g0(std::mt19937_64& rng, int l) {
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  SpectralDataG0 d;
  for (int s = 0; s <= l; ++s) d.crossings.push_back({cplx(u(rng), u(rng)), cplx(u(rng), u(rng))});
  for (int i = 0; i < l; ++i) d.divisor.push_back(cplx(u(rng), u(rng)));
  return d;
}

WeightedBA random_weighted(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  WeightedBA w;
  for (int j = 0; j < n; ++j) w.terms.push_back({cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(u(rng), u(rng))});
  return w;
}

}  // namespace

TEST_CASE("genus-0 interpolation") {
  SpectralDataG0 trivial{{{0.0, 0.0}}, {}};
  const auto r = psi_prime_interp(trivial, cplx(0.3, 0.2), {0.4, -0.1});
  CHECK(std::abs(r.w[0] - 1.0) < 1e-15);
  CHECK(std::abs(r.value - std::exp(cplx(0.3, 0.2) * cplx(0.4, 0.1))) < 1e-14);

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto d = random_g0(rng, 3);
    const PlanarPoint z{0.3 * trial - 1.0, 0.2};
    const auto it = psi_prime_interp(d, cplx(0.1, 2.0), z);
    // Lagrange leading coefficient
    cplx c = 0.0;
    for (std::size_t s = 0; s < d.crossings.size(); ++s) {
      cplx kap = 1.0;
      for (const cplx a : d.divisor) kap *= d.crossings[s].k - a;
      for (std::size_t m = 0; m < d.crossings.size(); ++m)
        if (m != s) kap /= d.crossings[s].k - d.crossings[m].k;
      c += kap * std::exp(d.crossings[s].p * z.z() - d.crossings[s].k * std::conj(z.z()));
    }
    CHECK(std::abs(it.w[0] - c) < 1e-8 * (1.0 + std::abs(c)));
    // interpolation conditions
    for (const auto& cr : d.crossings) {
      cplx num = 0.0, den = 1.0;
      for (const cplx w : it.w) num = num * cr.k + w;
      for (const cplx a : d.divisor) den *= cr.k - a;
      CHECK(std::abs(std::exp(cr.k * std::conj(z.z())) * num / den - std::exp(cr.p * z.z())) < 1e-9);
    }
    // matched weighted form
    const auto w = weighted_from_g0(d);
    for (cplx k : {cplx(0.7, -2.1), cplx(-3.0, 0.4)}) {
      const cplx a = psi_prime_weighted(w, k, z), b = psi_prime_interp(d, k, z).value * g0_normalization(d, k);
      CHECK(std::abs(a - b) < 1e-8 * (1.0 + std::abs(a)));
    }
  }
  // large k: psi' e^{-k zbar} -> c
  const auto d = random_g0(rng, 2);
  const PlanarPoint z{0.5, 0.0};
  const cplx k{0.0, 1e6};
  const auto it = psi_prime_interp(d, k, z);
  CHECK(std::abs(it.value * std::exp(-k * std::conj(z.z())) - it.w[0]) < 1e-5 * (1.0 + std::abs(it.w[0])));
  // degenerate data
  SpectralDataG0 bad{{{1.0, 0.0}, {1.0 + 1e-11, 0.5}}, {cplx(3.0, 0.0)}};
  CHECK_THROWS_AS(psi_prime_interp(bad, 0.5, z, 1e10), Error);
}

TEST_CASE("weighted normalization on the Fig 6 data") {
  const auto w = weighted_from_field(field::fig6_field());
  const cplx k{0.0, 0.55};
  const cplx ref = 1.0 / k + 0.2 / (k + 0.5) + 0.2 / (k - 0.5) + 0.2 / (k + 0.5 * I) + 0.2 / (k - 0.5 * I);
  CHECK(std::abs(psi_over_k(w, k, {0, 0}) - ref) < 1e-14);
  WeightedBA one{{{1.0, 0.0, 0.0}}};
  CHECK(std::abs(psi_prime_weighted(one, k, {0.3, 0.8}) - std::exp(k * cplx(0.3, -0.8))) < 1e-14);
  CHECK_THROWS_AS(psi_over_k(w, cplx(0.5, 0.0), {0, 0}), Error);
}

TEST_CASE("master dbar identity") {
  const auto w6 = weighted_from_field(field::fig6_field());
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int i = 0; i < 100; ++i) {
    const cplx k{u(rng), u(rng)};
    const PlanarPoint z{u(rng), u(rng)};
    CHECK(std::abs(dbar_identity_residual(w6, k, z)) < 1e-12 * (1.0 + std::abs(std::exp(k * std::conj(z.z())))));
  }
  for (int trial = 0; trial < 3; ++trial) {
    const auto w = random_weighted(rng, 6);
    for (int i = 0; i < 100; ++i) {
      const cplx k{u(rng), u(rng)};
      const PlanarPoint z{u(rng), u(rng)};
      CHECK(std::abs(dbar_identity_residual(w, k, z)) < 1e-10);
    }
    // finite-difference oracle
    const cplx k{0.3, -0.8};
    const PlanarPoint z{0.2, 0.5};
    const PointFn f = [&](PlanarPoint p) { return psi_over_k(w, k, p); };
    const cplx num = numcore::wirtinger(f, z, numcore::Wirt::Dbar);
    CHECK(std::abs(num - 2.0 * weighted_c(w, z) * std::exp(k * std::conj(z.z()))) < 1e-8);
  }
}

TEST_CASE("bloch property of weighted psi'") {
  const auto w = weighted_from_field(field::fig6_field());
  const cplx k{0.3, 0.55};
  const PlanarPoint z{0.4, -0.2};
  for (cplx g : {cplx(2 * PI, 0), cplx(0, 2 * PI)}) {
    const cplx ratio = psi_prime_weighted(w, k, PlanarPoint::of(z.z() + g)) / psi_prime_weighted(w, k, z);
    CHECK(std::abs(ratio - std::exp(k * std::conj(g))) < 1e-10 * std::abs(ratio));
  }
}

TEST_CASE("q+ ratio and L+ zero mode") {
  WeightedBA one{{{1.0, 0.0, 0.0}}};
  CHECK(std::abs(qplus_ratio(one, cplx(0.2, 0.7), {1, 2}) + 2.0 * cplx(0.2, 0.7)) < 1e-13);

  const auto c = field::fig6_field();
  const auto w = weighted_from_field(c);
  const cplx k{0.0, 0.55};
  const PointFn Phi = [&](PlanarPoint p) { return -0.5 * std::log(field::eval_c(c, p)); };
  const PointFn psi = [&](PlanarPoint p) { return psi_prime_weighted(w, k, p) / std::sqrt(field::eval_c(c, p)); };
  for (PlanarPoint p : {PlanarPoint{0.3, 0.4}, PlanarPoint{-1.2, 2.0}}) {
    CHECK(std::abs(numcore::lplus_at(Phi, psi, p)) < 1e-7);
    const cplx qp = -numcore::wirtinger(psi, p, numcore::Wirt::Dbar) +
                    numcore::wirtinger(Phi, p, numcore::Wirt::Dbar) * psi(p);
    CHECK(std::abs(qp / psi(p) - qplus_ratio(w, k, p)) < 1e-8);
  }
  // grid cross-check against apply_qplus
  double res[2];
  for (int r = 0; r < 2; ++r) {
    const int n = 33 << r;
    const Grid g = Grid::make_box(0.2, 1.8, 0.1, 1.7, n, n);
    const auto m = numcore::MagneticCoeffs::from_samples(kernels::sample(g, Phi), numcore::Scheme::Central2);
    const Field f = kernels::sample(g, psi);
    const Field ref = kernels::sample(g, [&](PlanarPoint p) { return qplus_ratio(w, k, p) * psi(p); });
    Field diff = numcore::apply_qplus(m, f) - ref;
    double worst = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double x = g.x(i), y = g.y(j);
        if (x > 0.5 && x < 1.5 && y > 0.4 && y < 1.4) worst = std::max(worst, std::abs(diff(i, j)));
      }
    res[r] = worst;
  }
  CHECK(observed_order(res[0], res[1]) >= 1.9);
}

TEST_CASE("genus-1 construction") {
  const auto lat = elliptic::make_lattice(1.0, 0.5);
  const auto root = special_root(lat);
  CHECK(root.residual < 1e-12);
  CHECK(std::abs(root.q.real()) < 1e-14);
  const auto d = special_n1(lat, 0.25);
  for (PlanarPoint z : {PlanarPoint{0.41, -0.13}, PlanarPoint{-0.7, 0.3}}) {
    CHECK(crossing_residual(d, z) < 1e-8);
    const cplx alt = g1_c(d, z) * elliptic::sigma(lat, std::conj(z.z()) + d.p_sum() + d.q_sum()) *
                     elliptic::sigma(lat, z.z() + d.p);
    CHECK(std::abs(c_tilde(d, z).c - alt) < 1e-10 * std::abs(alt));
  }
  // a general data set with n = 2 also satisfies the crossing conditions
  EllipticData g;
  g.lattice = elliptic::make_lattice(PI / 2, 1.0);
  g.q = {cplx(0.2, 0.1), cplx(-0.5, 0.3), cplx(0.7, -0.4)};
  g.r = {cplx(0.1, 0.6), cplx(0.9, -0.2), cplx(-0.3, -0.5)};
  g.p_div = {cplx(0.35, 0.45), cplx(-0.25, 0.15)};
  g.p = cplx(0.15, -0.35);
  CHECK(crossing_residual(g, {0.3, 0.2}) < 1e-8);

  // flux quantum of B~
  CHECK(std::abs(cell_flux_tilde(d, flux_cell_corner(d)) - 2 * PI) < 1e-4);
  // B~ equals B away from the removed singularity
  const PointFn logc = [&](PlanarPoint p) { return cplx(std::log(std::abs(g1_c(d, p)))); };
  for (PlanarPoint z : {PlanarPoint{0.7, 0.2}, PlanarPoint{0.1, 0.1}, PlanarPoint{-0.5, 0.3}}) {
    CHECK(std::abs(b_tilde(d, z) - 0.5 * numcore::laplacian_at(logc, z).real()) < 1e-8);
  }
  // winding of sigma(z + P) around its zero z = -P
  const PointFn s = [&](PlanarPoint p) { return elliptic::sigma(lat, p.z() + d.p); };
  CHECK(std::abs(numcore::loop_flux_phase(s, circle(PlanarPoint::of(-d.p), 0.05, 64)) - 2 * PI) < 1e-6);
  // psi'' near p = 0
  const PlanarPoint z{0.2, 0.1};
  auto defect = [&](double p) {
    return std::abs(psi_second(d, p, z) * std::exp(z.z() * elliptic::zeta(lat, p)) * elliptic::sigma(lat, d.p) - 1.0);
  };
  CHECK(defect(1e-3) < 1e-2);
  CHECK(defect(1e-3) < 0.15 * defect(1e-2));
}

TEST_CASE("extended bloch functions") {
  const auto c = field::fig6_field();
  const auto lat = elliptic::make_lattice(PI, PI);
  const cplx u{0.1, -0.2}, p{0.4, 0.3}, R{1.1, 2.3};
  const PointFn Phi = [&](PlanarPoint q) { return -0.5 * std::log(field::eval_c(c, q)); };
  const PointFn minus = [&](PlanarPoint q) { return psi_ext(c, lat, u, p, R, -1, q); };
  for (PlanarPoint q : {PlanarPoint{0.3, 0.4}, PlanarPoint{-0.5, -0.8}}) {
    const cplx qp = -numcore::wirtinger(minus, q, numcore::Wirt::Dbar) +
                    numcore::wirtinger(Phi, q, numcore::Wirt::Dbar) * minus(q);
    CHECK(std::abs(qp) < 1e-8 * (1.0 + std::abs(minus(q))));
  }
  // grid residual at second order
  double res[2];
  for (int r = 0; r < 2; ++r) {
    const Grid g = Grid::make_box(-1.0, 1.0, -1.0, 1.0, 41 << r, 41 << r);
    const auto m = numcore::MagneticCoeffs::from_samples(kernels::sample(g, Phi), numcore::Scheme::Central2);
    res[r] = norm_inf(numcore::apply_qplus(m, kernels::sample(g, minus)), 2 << r);
  }
  CHECK(observed_order(res[0], res[1]) >= 1.9);
  // multiplier independent of the base point
  for (cplx g : {lat.period1(), lat.period2()}) {
    auto mult = [&](PlanarPoint q) { return minus(PlanarPoint::of(q.z() + g)) / minus(q); };
    CHECK(std::abs(mult({0.3, 0.4}) - mult({-0.7, 0.9})) < 1e-8 * std::abs(mult({0.3, 0.4})));
  }
  const auto one = field::make_field({{1.0, 0.0, 0.0}}, true);
  CHECK_THROWS_AS(psi_ext(one, lat, u, p, R, 1, PlanarPoint::of(-R)), Error);
}

TEST_CASE("singular gauge") {
  const auto lat = elliptic::make_lattice(1.0, 1.0);
  const cplx P{0.3, -0.2};
  for (PlanarPoint z : {PlanarPoint{0.0, 0.0}, PlanarPoint{0.9, 0.4}})
    CHECK(std::abs(std::abs(singular_gauge_factor(lat, P, z)) - 1.0) < 1e-15);
  const Contour loop = circle(PlanarPoint::of(P), 0.1, 64);
  const PointFn fac = [&](PlanarPoint z) { return singular_gauge_factor(lat, P, z); };
  CHECK(std::abs(numcore::loop_flux_phase(fac, loop) - 2 * PI) < 1e-9);
  // a function with the opposite winding becomes single-valued in phase
  const PointFn anti = [&](PlanarPoint z) { return std::conj(elliptic::sigma(lat, z.z() - P)); };
  const PointFn fixed = [&](PlanarPoint z) { return singular_gauge(anti(z), lat, P, z); };
  CHECK(std::abs(numcore::loop_flux_phase(anti, loop) + 2 * PI) < 1e-9);
  CHECK(std::abs(numcore::loop_flux_phase(fixed, loop)) < 1e-9);
  CHECK_THROWS_AS(singular_gauge_factor(lat, P, PlanarPoint::of(P)), Error);
  // radial scan: the modulus is untouched by the unimodular factor
  const PointFn weak = [&](PlanarPoint z) { return 1.0 / std::sqrt(std::abs(elliptic::sigma(lat, z.z() - P))); };
  const PointFn weak_g = [&](PlanarPoint z) { return singular_gauge(weak(z), lat, P, z); };
  CHECK(std::abs(radial_exponent(weak, PlanarPoint::of(P), 1e-4, 1e-2) + 0.5) < 1e-3);
  CHECK(std::abs(radial_exponent(weak_g, PlanarPoint::of(P), 1e-4, 1e-2) + 0.5) < 1e-3);
}
