#include "magpauli/verify.hpp"

#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "magpauli/foliation.hpp"
#include "magpauli/ground.hpp"
#include "magpauli/kernels.hpp"
#include "magpauli/laplace.hpp"
#include "magpauli/numcore.hpp"
#include "magpauli/spectral.hpp"

namespace magpauli::verify {

namespace {

Check make(const std::string& name, double measured, const std::string& rel, double threshold, std::string note = {}) {
  bool pass = false;
  if (rel == "<") pass = measured < threshold;
  else if (rel == ">") pass = measured > threshold;
  else if (rel == ">=") pass = measured >= threshold;
  else if (rel == "==") pass = measured == threshold;
  return {name, measured, rel, threshold, pass && std::isfinite(measured), std::move(note)};
}

Check skipped(const std::string& name, const std::string& why) { return {name, 0.0, "skip", 0.0, true, why}; }

double sup_diff(const Field& a, const Field& b) { return norm_inf(a - b); }

}  // namespace

std::vector<Check> run_suite(const scenario::Scenario& s, scenario::Params& p) {
  const int seed = p.integer("seed", 1);
  const int samples = p.integer("samples", 100);
  const int zero_mode_points = p.integer("zero_mode_points", 1000);
  const int order_n = p.integer("order_n", 64);
  const int pauli_n = p.integer("pauli_n", 64);
  const double tol_identity = p.number("tol_identity", 1e-10);
  const double min_order = p.number("min_order", 1.9);
  const double tol_legendre = p.number("tol_legendre", 1e-9);
  const double tol_pauli = p.number("tol_pauli", 1e-8);
  const double tol_drift = p.number("tol_drift", 1e-8);
  const int drift_cells = p.integer("drift_cells", 50);
  const cplx drift_seed = p.complex("drift_seed", cplx(1.0, 0.3));
  const int scan_n = p.integer("scan_n", 128);
  const int min_cycles = p.integer("min_limit_cycles", 0);
  const double eps = p.number("eps", 1e-3);
  const double min_approach = p.number("min_approach_ratio", 2.0);
  if (samples < 1 || zero_mode_points < 1 || order_n < 8 || pauli_n < 8) fail(ErrorKind::Schema, "task_params: sample counts too small");

  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Check> out;
  const double Px = s.period_x(), Py = s.period_y();

  {
    const PointFn z = [](PlanarPoint q) { return q.z(); };
    const PointFn zb = [](PlanarPoint q) { return std::conj(q.z()); };
    const PlanarPoint q{0.3, -0.7};
    out.push_back(make("convention d z = 2", std::abs(numcore::wirtinger(z, q, numcore::Wirt::D) - 2.0), "<", tol_identity));
    out.push_back(make("convention dbar zbar = 2", std::abs(numcore::wirtinger(zb, q, numcore::Wirt::Dbar) - 2.0), "<",
                       tol_identity));
  }

  const auto lat = s.lattice ? *s.lattice : elliptic::make_lattice(Px / 2, Py / 2);
  out.push_back(make("legendre relation", std::abs(lat.legendre_defect()), "<", tol_legendre));
  {
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      const cplx w{(2 * u01(rng) - 1) * lat.omega, (2 * u01(rng) - 1) * lat.omega_prime};
      const cplx r = elliptic::sigma(lat, w + lat.period1()) /
                     (-std::exp(2.0 * lat.eta * (w + lat.omega)) * elliptic::sigma(lat, w));
      worst = std::max(worst, std::abs(r - 1.0));
    }
    out.push_back(make("sigma quasi-periodicity", worst, "<", tol_identity));
  }

  if (!s.field) {
    out.push_back(skipped("field checks", "no field in the scenario"));
    return out;
  }
  const auto f = s.field->build();
  const bool periodic = s.field->trigonometric();

  if (periodic) {
    const PointFn phi = [&](PlanarPoint q) { return cplx(field::eval_phi(f, q).real()); };
    const PointFn phix = [&](PlanarPoint q) { return field::eval_phi_derivs(f, q)[0]; };
    const PointFn phiy = [&](PlanarPoint q) { return field::eval_phi_derivs(f, q)[1]; };
    const PointFn lap = [&](PlanarPoint q) { return field::eval_phi_derivs(f, q)[2]; };
    const double wx = 2 * PI / Px, wy = 2 * PI / Py;
    const PointFn g = [&](PlanarPoint q) { return std::exp(I * (wx * q.x + 2 * wy * q.y)) + 0.5 * std::cos(wy * q.y); };
    auto exact_l = [&](PlanarPoint q, double sector) {
      const cplx e = std::exp(I * (wx * q.x + 2 * wy * q.y));
      const double c = std::cos(wy * q.y), sn = std::sin(wy * q.y);
      const cplx gx = I * wx * e, gy = 2.0 * I * wy * e - 0.5 * wy * sn;
      const cplx glap = -(wx * wx + 4 * wy * wy) * e - 0.5 * wy * wy * c;
      const cplx px = phix(q), py = phiy(q);
      return -glap + 2.0 * I * (py * gx - px * gy) + (px * px + py * py) * g(q) + sector * lap(q) * g(q);
    };
    double rd[2], rp[2], rm[2];
    for (int r = 0; r < 2; ++r) {
      const Grid gr = Grid::make_periodic(Px, Py, order_n << r, order_n << r);
      const Field ph = kernels::sample(gr, phi);
      rd[r] = sup_diff(numcore::d(numcore::dbar(ph, numcore::Scheme::Central2), numcore::Scheme::Central2),
                       kernels::sample(gr, lap));
      const auto m = numcore::MagneticCoeffs::from_closed_form(gr, numcore::Scheme::Central2, phi, phix, phiy, lap);
      const Field G = kernels::sample(gr, g);
      rp[r] = sup_diff(numcore::apply_q(m, numcore::apply_qplus(m, G)),
                       kernels::sample(gr, [&](PlanarPoint q) { return exact_l(q, 1); }));
      rm[r] = sup_diff(numcore::apply_qplus(m, numcore::apply_q(m, G)),
                       kernels::sample(gr, [&](PlanarPoint q) { return exact_l(q, -1); }));
    }
    out.push_back(make("d dbar = Laplacian, order", observed_order(rd[0], rd[1]), ">=", min_order));
    out.push_back(make("Q Q+ = L+, order", observed_order(rp[0], rp[1]), ">=", min_order));
    out.push_back(make("Q+ Q = L-, order", observed_order(rm[0], rm[1]), ">=", min_order));

    const Grid gs = Grid::make_periodic(Px, Py, pauli_n, pauli_n);
    const auto ms = numcore::MagneticCoeffs::from_samples(kernels::sample(gs, phi), numcore::Scheme::Spectral);
    const numcore::Pair pr{kernels::sample(gs, g), kernels::sample(gs, [&](PlanarPoint q) { return std::conj(g(q)); })};
    const auto a = numcore::anticommutator(ms, pr), b = numcore::apply_pauli(ms, pr);
    out.push_back(make("S S* + S* S = L^P", std::max(sup_diff(a.plus, b.plus), sup_diff(a.minus, b.minus)), "<", tol_pauli));

    out.push_back(make("cell flux of B", std::abs(field::cell_flux(f, Px, Py, 256)), "<", tol_identity));

    const Field B = kernels::sample(gs, [&](PlanarPoint q) { return cplx(field::eval_b(f, q)); });
    const Field W = kernels::sample(gs, [&](PlanarPoint q) { return cplx(std::exp(0.3 * std::cos(wx * q.x) * std::cos(wy * q.y))); });
    const auto t = laplace::laplace_step({B, W});
    out.push_back(make("Laplace step preserves mean B", std::abs(laplace::cell_mean(t.b) - laplace::cell_mean(B)), "<",
                       tol_identity));
  } else {
    out.push_back(skipped("grid convergence orders", "field is not periodic"));
  }

  if (f.real_flag) {
    double worst = 0.0;
    for (int i = 0; i < zero_mode_points; ++i) {
      const PlanarPoint q{u01(rng) * Px, u01(rng) * Py};
      if (!(field::eval_c(f, q).real() > 0.0)) fail(ErrorKind::Singular, "c is not positive; zero modes undefined");
      const auto r = ground::pair_residuals(f, q);
      worst = std::max({worst, std::abs(r[0]), std::abs(r[1])});
    }
    out.push_back(make("zero modes Q+ sqrt(c), Q c^{-1/2}", worst, "<", tol_identity));
  }

  {
    const auto w = spectral::weighted_from_field(f);
    double worst = 0.0;
    for (int i = 0; i < samples; ++i) {
      const cplx k = (i == 0 && s.k) ? *s.k : cplx(4 * u01(rng) - 2, 4 * u01(rng) - 2);
      const PlanarPoint q{u01(rng) * Px, u01(rng) * Py};
      const double scale = 1.0 + std::abs(std::exp(k * std::conj(q.z())));
      worst = std::max(worst, std::abs(spectral::dbar_identity_residual(w, k, q)) / scale);
    }
    out.push_back(make("master dbar identity", worst, "<", tol_identity));
  }

  if (!periodic || !s.k) {
    out.push_back(skipped("foliation checks", periodic ? "no spectral.k" : "field is not trigonometric"));
    return out;
  }
  const auto d = s.foliation_data();
  {
    double gi = 0.0, ml = 0.0;
    for (int i = 0; i < samples; ++i) {
      const PlanarPoint q{u01(rng) * Px, u01(rng) * Py};
      const auto r = foliation::grad_identity_residual(d, q);
      gi = std::max(gi, std::max(std::abs(r[0]), std::abs(r[1])) / std::max(1.0, foliation::f_scale(d, q)));
      for (const cplx g : {cplx(Px, 0.0), cplx(0.0, Py), cplx(-Px, 2 * Py)})
        ml = std::max(ml, foliation::multiplier_defect(d, q, g));
    }
    out.push_back(make("gradient identity dF = 2 psi'/k e^{conj(k) z}", gi, "<", tol_identity));
    out.push_back(make("F multiplier law", ml, "<", tol_identity));
  }
  const auto cps = foliation::critical_points(d);
  out.push_back(make("Poincare-Hopf index sum", foliation::index_sum(cps), "==", 0.0,
                     std::to_string(cps.size()) + " critical points"));
  {
    foliation::TraceOptions opt;
    opt.stop_cells = drift_cells;
    opt.critical = cps;
    try {
      const auto t = foliation::trace_leaf(d, PlanarPoint::of(drift_seed), 1e9, opt);
      out.push_back(make("leaf F drift", t.max_drift, "<", tol_drift, foliation::leaf_kind_name(t.kind)));
    } catch (const Error& e) {
      out.push_back({"leaf F drift", NAN, "<", tol_drift, false, e.what()});
    }
  }
  const auto cycles = foliation::limit_cycle_scan(d, scan_n);
  out.push_back(make("essential F = 0 cycles found", double(cycles.size()), ">=", double(min_cycles)));
  if (cycles.empty()) return out;
  int bad_class = 0;
  double approach = 1e300, growth = 1e300;
  for (const auto& c : cycles) {
    if (!c.homology || ((*c.homology)[0] == 0 && (*c.homology)[1] == 0)) ++bad_class;
    for (const double e : {eps, -eps}) {
      const auto dist = foliation::approach_distances(d, c, e);
      for (std::size_t i = 0; i + 1 < dist.size(); ++i) approach = std::min(approach, dist[i] / dist[i + 1]);
    }
    growth = std::min(growth, foliation::classify_leaf(c, d).growth_rate);
  }
  out.push_back(make("cycles without a homology class", bad_class, "==", 0.0));
  out.push_back(make("eps-leaf approach ratio per period", approach, ">=", min_approach));
  out.push_back(make("psi' growth rate along cycles", growth, ">", 0.0));
  return out;
}

std::string table(const std::vector<Check>& checks) {
  std::ostringstream o;
  o << std::left << std::setw(48) << "check" << std::setw(24) << "measured" << std::setw(6) << "rel" << std::setw(12)
    << "threshold" << "result\n";
  for (const auto& c : checks) {
    o << std::setw(48) << c.name << std::setw(24) << (c.relation == "skip" ? "-" : io::num(c.measured)) << std::setw(6)
      << c.relation << std::setw(12) << (c.relation == "skip" ? "-" : io::num(c.threshold))
      << (c.relation == "skip" ? "SKIP" : c.pass ? "PASS" : "FAIL");
    if (!c.note.empty()) o << "  (" << c.note << ")";
    o << '\n';
  }
  return o.str();
}

io::json to_json(const std::vector<Check>& checks) {
  io::json a = io::json::array();
  for (const auto& c : checks)
    a.push_back({{"name", c.name},
                 {"measured", c.measured},
                 {"relation", c.relation},
                 {"threshold", c.threshold},
                 {"pass", c.pass},
                 {"note", c.note}});
  return a;
}

}  // namespace magpauli::verify
