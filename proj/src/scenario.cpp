#include "magpauli/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "magpauli/boundary.hpp"
#include "magpauli/ground.hpp"
#include "magpauli/kernels.hpp"
#include "magpauli/laplace.hpp"
#include "magpauli/verify.hpp"

namespace magpauli::scenario {

namespace {

void require_keys(const json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) fail(ErrorKind::Schema, where + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key)) fail(ErrorKind::Schema, where + ": unknown key '" + key + "'");
}

std::vector<cplx> complex_list(const json& j, const std::string& what) {
  if (!j.is_array()) fail(ErrorKind::Schema, what + ": expected an array");
  std::vector<cplx> out;
  for (const auto& v : j) out.push_back(io::cplx_of(v, what));
  return out;
}

FieldSpec parse_field(const json& j) {
  require_keys(j, "field", {"preset", "a", "l", "terms", "real"});
  FieldSpec f;
  const int forms = int(j.contains("preset")) + int(j.contains("a") || j.contains("l")) + int(j.contains("terms"));
  if (forms != 1) fail(ErrorKind::Schema, "field: give exactly one of preset, (a, l) or terms");
  if (j.contains("preset")) {
    if (!j["preset"].is_string()) fail(ErrorKind::Schema, "field.preset: expected a string");
    f.preset = j["preset"];
    if (f.preset == "fig6") {
      const auto d = foliation::fig6_data();
      f.a = d.a;
      f.l = d.l;
    } else if (f.preset != "fig2b") {
      fail(ErrorKind::Schema, "field.preset: unknown preset '" + f.preset + "'");
    }
  } else if (j.contains("terms")) {
    if (!j["terms"].is_array() || j["terms"].empty()) fail(ErrorKind::Schema, "field.terms: expected a nonempty array");
    for (const auto& t : j["terms"]) {
      require_keys(t, "field.terms[]", {"kappa", "p", "k"});
      if (!t.contains("kappa")) fail(ErrorKind::Schema, "field.terms[]: kappa is required");
      f.terms.push_back({io::cplx_of(t["kappa"], "kappa"), io::cplx_of(t.value("p", json(0.0)), "p"),
                         io::cplx_of(t.value("k", json(0.0)), "k")});
    }
    if (j.contains("real")) {
      if (!j["real"].is_boolean()) fail(ErrorKind::Schema, "field.real: expected a boolean");
      f.declared_real = j["real"];
    }
  } else {
    if (!j.contains("a") || !j.contains("l")) fail(ErrorKind::Schema, "field: a and l go together");
    f.a = complex_list(j["a"], "field.a");
    f.l = complex_list(j["l"], "field.l");
    if (f.a.size() != f.l.size()) fail(ErrorKind::Schema, "field: a and l differ in length");
  }
  if (!f.terms.empty() || !j.contains("real")) return f;
  fail(ErrorKind::Schema, "field.real applies to terms only");
}

}  // namespace

const std::vector<std::string>& task_names() {
  static const std::vector<std::string> names{"field", "groundstate", "bloch", "laplace", "boundary", "foliate", "verify"};
  return names;
}

field::ExpField FieldSpec::build() const {
  if (preset == "fig2b") return field::fig2b_field();
  if (!terms.empty()) return field::make_field(terms, declared_real);
  return field::trig_field(a, l);
}

bool Scenario::wants(const std::string& format) const {
  return std::find(formats.begin(), formats.end(), format) != formats.end();
}

foliation::FoliationData Scenario::foliation_data() const {
  if (!field || !field->trigonometric()) fail(ErrorKind::Schema, "this task needs a trigonometric field (a, l)");
  if (!k) fail(ErrorKind::Schema, "this task needs spectral.k");
  foliation::FoliationData d{field->a, field->l, *k, period_x(), period_y()};
  foliation::validate(d);
  return d;
}

Scenario parse(const json& j) {
  require_keys(j, "scenario", {"version", "lattice", "field", "spectral", "task", "task_params", "output"});
  Scenario s;
  if (!j.contains("version") || !j["version"].is_number_integer() || j["version"] != 1)
    fail(ErrorKind::Schema, "version: expected 1");
  if (!j.contains("task") || !j["task"].is_string()) fail(ErrorKind::Schema, "task: expected a string");
  s.task = j["task"];
  const auto& names = task_names();
  if (std::find(names.begin(), names.end(), s.task) == names.end())
    fail(ErrorKind::Schema, "task: unknown task '" + s.task + "'");
  if (j.contains("lattice")) {
    const auto& l = j["lattice"];
    require_keys(l, "lattice", {"omega", "omega_prime"});
    if (!l.contains("omega") || !l.contains("omega_prime") || !l["omega"].is_number() || !l["omega_prime"].is_number())
      fail(ErrorKind::Schema, "lattice: omega and omega_prime are required numbers");
    const double w = l["omega"], wp = l["omega_prime"];
    if (!(w > 0.0) || !(wp > 0.0)) fail(ErrorKind::Schema, "lattice: half-periods must be positive");
    s.lattice = elliptic::make_lattice(w, wp);
  }
  if (j.contains("field")) s.field = parse_field(j["field"]);
  if (j.contains("spectral")) {
    require_keys(j["spectral"], "spectral", {"k"});
    if (j["spectral"].contains("k")) s.k = io::cplx_of(j["spectral"]["k"], "spectral.k");
  }
  if (j.contains("task_params")) {
    if (!j["task_params"].is_object()) fail(ErrorKind::Schema, "task_params: expected an object");
    s.task_params = j["task_params"];
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    require_keys(o, "output", {"dir", "formats"});
    if (o.contains("dir")) {
      if (!o["dir"].is_string() || o["dir"].get<std::string>().empty())
        fail(ErrorKind::Schema, "output.dir: expected a nonempty string");
      s.out_dir = o["dir"];
    }
    if (o.contains("formats")) {
      if (!o["formats"].is_array()) fail(ErrorKind::Schema, "output.formats: expected an array");
      s.formats.clear();
      for (const auto& f : o["formats"]) {
        if (!f.is_string() || (f != "csv" && f != "json" && f != "svg"))
          fail(ErrorKind::Schema, "output.formats: allowed values are csv, json, svg");
        s.formats.push_back(f);
      }
    }
  }
  return s;
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) fail(ErrorKind::Schema, "override '" + assignment + "': expected key=value");
  const std::string key = assignment.substr(0, eq), text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) fail(ErrorKind::Schema, "override '" + assignment + "': empty key segment");
    if (!node->is_object()) fail(ErrorKind::Schema, "override '" + assignment + "': " + part + " is not inside an object");
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

// ---- Params ----

Params::Params(const json& j, std::string where) : j_(j.is_null() ? json::object() : j), where_(std::move(where)) {
  if (!j_.is_object()) fail(ErrorKind::Schema, where_ + ": expected an object");
}

const json* Params::get(const std::string& key) {
  used_.push_back(key);
  return j_.contains(key) ? &j_[key] : nullptr;
}

bool Params::has(const std::string& key) const { return j_.contains(key); }

double Params::number(const std::string& key, double def) {
  const json* v = get(key);
  if (v && !v->is_number()) fail(ErrorKind::Schema, where_ + "." + key + ": expected a number");
  const double r = v ? v->get<double>() : def;
  echo_[key] = r;
  return r;
}

int Params::integer(const std::string& key, int def) {
  const json* v = get(key);
  if (v && !v->is_number_integer()) fail(ErrorKind::Schema, where_ + "." + key + ": expected an integer");
  const int r = v ? v->get<int>() : def;
  echo_[key] = r;
  return r;
}

bool Params::flag(const std::string& key, bool def) {
  const json* v = get(key);
  if (v && !v->is_boolean()) fail(ErrorKind::Schema, where_ + "." + key + ": expected a boolean");
  const bool r = v ? v->get<bool>() : def;
  echo_[key] = r;
  return r;
}

std::string Params::text(const std::string& key, const std::string& def) {
  const json* v = get(key);
  if (v && !v->is_string()) fail(ErrorKind::Schema, where_ + "." + key + ": expected a string");
  const std::string r = v ? v->get<std::string>() : def;
  echo_[key] = r;
  return r;
}

cplx Params::complex(const std::string& key, cplx def) {
  const json* v = get(key);
  const cplx r = v ? io::cplx_of(*v, where_ + "." + key) : def;
  echo_[key] = io::to_json(r);
  return r;
}

std::vector<double> Params::numbers(const std::string& key, const std::vector<double>& def) {
  const json* v = get(key);
  std::vector<double> r = def;
  if (v) {
    if (!v->is_array()) fail(ErrorKind::Schema, where_ + "." + key + ": expected an array of numbers");
    r.clear();
    for (const auto& e : *v) {
      if (!e.is_number()) fail(ErrorKind::Schema, where_ + "." + key + ": expected an array of numbers");
      r.push_back(e);
    }
  }
  echo_[key] = r;
  return r;
}

std::vector<cplx> Params::complexes(const std::string& key, const std::vector<cplx>& def) {
  const json* v = get(key);
  const std::vector<cplx> r = v ? complex_list(*v, where_ + "." + key) : def;
  echo_[key] = json::array();
  for (const cplx z : r) echo_[key].push_back(io::to_json(z));
  return r;
}

std::vector<std::string> Params::texts(const std::string& key, const std::vector<std::string>& def) {
  const json* v = get(key);
  std::vector<std::string> r = def;
  if (v) {
    if (!v->is_array()) fail(ErrorKind::Schema, where_ + "." + key + ": expected an array of strings");
    r.clear();
    for (const auto& e : *v) {
      if (!e.is_string()) fail(ErrorKind::Schema, where_ + "." + key + ": expected an array of strings");
      r.push_back(e);
    }
  }
  echo_[key] = r;
  return r;
}

Params Params::child(const std::string& key) {
  const json* v = get(key);
  return Params(v ? *v : json::object(), where_ + "." + key);
}

void Params::adopt(const std::string& key, const Params& sub) { echo_[key] = sub.echo_; }

void Params::finish() {
  for (const auto& [key, _] : j_.items())
    if (std::find(used_.begin(), used_.end(), key) == used_.end())
      fail(ErrorKind::Schema, where_ + ": unknown key '" + key + "'");
}

// ---- tasks ----

namespace {

using Rows = std::vector<std::vector<double>>;

json field_json(const Scenario& s) {
  json f = json::object();
  if (!s.field) return f;
  if (!s.field->preset.empty()) f["preset"] = s.field->preset;
  if (s.field->trigonometric()) {
    f["a"] = json::array();
    f["l"] = json::array();
    for (std::size_t j = 0; j < s.field->a.size(); ++j) {
      f["a"].push_back(io::to_json(s.field->a[j]));
      f["l"].push_back(io::to_json(s.field->l[j]));
    }
  }
  return f;
}

json base_report(const Scenario& s) {
  json r;
  r["task"] = s.task;
  if (s.task_params_ignored) r["task_params_ignored"] = true;
  r["field"] = field_json(s);
  if (s.lattice)
    r["lattice"] = {{"omega", s.lattice->omega},
                    {"omega_prime", s.lattice->omega_prime},
                    {"eta", s.lattice->eta},
                    {"eta_prime", s.lattice->eta_prime}};
  if (s.k) r["k"] = io::to_json(*s.k);
  return r;
}

field::ExpField require_field(const Scenario& s) {
  if (!s.field) fail(ErrorKind::Schema, "task '" + s.task + "' needs a field");
  return s.field->build();
}

RunOutput run_field(const Scenario& s, Params& p) {
  const auto f = require_field(s);
  const int n = p.integer("n", 64);
  const auto box = p.numbers("box", {0.0, s.period_x(), 0.0, s.period_y()});
  const int flux_nodes = p.integer("flux_nodes", 256);
  p.finish();
  if (n < 8) fail(ErrorKind::Schema, "task_params.n: at least 8");
  if (box.size() != 4 || !(box[1] > box[0]) || !(box[3] > box[2]))
    fail(ErrorKind::Schema, "task_params.box: expected [xmin, xmax, ymin, ymax]");

  const Grid g = Grid::make_box(box[0], box[1], box[2], box[3], n, n);
  Rows rows;
  double cmin = 1e300, cmax = -1e300, bmin = 1e300, bmax = -1e300;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const PlanarPoint z = g.point(i, j);
      const cplx c = field::eval_c(f, z);
      if (!(c.real() > 0.0)) fail(ErrorKind::Singular, "c is not positive at (" + io::num(z.x) + ", " + io::num(z.y) + ")");
      const double b = field::eval_b(f, z);
      cmin = std::min(cmin, c.real()), cmax = std::max(cmax, c.real());
      bmin = std::min(bmin, b), bmax = std::max(bmax, b);
      rows.push_back({z.x, z.y, c.real(), c.imag(), b});
    }
  RunOutput out;
  json r = base_report(s);
  r["params"] = p.echo();
  r["c_range"] = {cmin, cmax};
  r["b_range"] = {bmin, bmax};
  if (s.field->trigonometric()) r["cell_flux"] = field::cell_flux(f, s.period_x(), s.period_y(), flux_nodes);
  try {
    const auto T = field::shift_polytope(f);
    r["polytope"] = {{"hull", T.hull},
                     {"closure_nonempty", T.closure_nonempty},
                     {"interior_nonempty", T.interior_nonempty},
                     {"origin_interior", T.interior_nonempty && T.contains(0.0, 0.0, true)}};
  } catch (const Error& e) {
    r["polytope"] = {{"unavailable", e.what()}};
  }
  if (s.wants("csv")) out.artifacts.push_back({"field.csv", io::csv({"x", "y", "c_re", "c_im", "B"}, rows)});
  out.report = r;
  return out;
}

RunOutput run_groundstate(const Scenario& s, Params& p) {
  const std::string mode = p.text("mode", s.field ? "periodic" : "ac");
  RunOutput out;
  json r = base_report(s);
  if (mode == "periodic") {
    const auto f = require_field(s);
    const int probes = p.integer("probes", 32);
    const double tol = p.number("tol", 1e-10);
    p.finish();
    const auto pp = ground::periodic_pair(f, s.period_x(), s.period_y(), probes);
    r["params"] = p.echo();
    r["max_residual_qplus_sqrt_c"] = pp.max_residual_qplus;
    r["max_residual_q_inv_sqrt_c"] = pp.max_residual_q;
    r["states"] = 2;
    r["passed"] = pp.max_residual_qplus < tol && pp.max_residual_q < tol;
    out.passed = r["passed"];
  } else if (mode == "ac") {
    const double flux_over_pi = p.number("flux_over_pi", 5.0);
    const double width = p.number("width", 1.0);
    const double half = p.number("half", 8.0);
    const int n = p.integer("n", 161);
    const double r_min = p.number("r_min", 10.0), r_max = p.number("r_max", 100.0);
    p.finish();
    if (n < 9 || !(width > 0.0) || !(half > 4 * width)) fail(ErrorKind::Schema, "task_params: need n >= 9 and half > 4 width");
    const double amp = flux_over_pi / (2.0 * width * width);
    const Grid g = Grid::make_box(-half, half, -half, half, n, n);
    const Field b = kernels::sample(g, [&](PlanarPoint z) {
      return cplx(amp * std::exp(-0.5 * (z.x * z.x + z.y * z.y) / (width * width)));
    });
    const auto prob = ground::make_ac_problem(b);
    const auto res = ground::ac_states(prob);
    Rows rows;
    r["params"] = p.echo();
    r["flux"] = prob.flux;
    r["m"] = prob.m;
    r["borderline"] = res.borderline;
    r["states"] = json::array();
    for (const auto& st : res.states) {
      const double fit = ground::fit_decay(res, st.l, st.sector, r_min, r_max);
      r["states"].push_back(
          {{"l", st.l}, {"sector", st.sector}, {"predicted_exponent", st.predicted_exponent}, {"fitted_exponent", fit}});
      rows.push_back({double(st.l), double(st.sector), st.predicted_exponent, fit});
    }
    if (s.wants("csv")) out.artifacts.push_back({"states.csv", io::csv({"l", "sector", "predicted", "fitted"}, rows)});
  } else {
    fail(ErrorKind::Schema, "task_params.mode: expected ac or periodic");
  }
  out.report = r;
  return out;
}

RunOutput run_bloch(const Scenario& s, Params& p) {
  if (!s.lattice) fail(ErrorKind::Schema, "bloch needs a lattice");
  const auto& lat = *s.lattice;
  const int m = p.integer("m", 1);
  const double ripple = p.number("ripple", 0.5);
  const int n = p.integer("n", 24);
  const auto zeros = p.complexes("zeros", {cplx(0.2, 0.1)});
  const cplx lambda = p.complex("lambda", 1.0);
  const double tol = p.number("tol", 1e-6);
  p.finish();
  if (n < 8) fail(ErrorKind::Schema, "task_params.n: at least 8");
  const Grid g = Grid::make_periodic(2 * lat.omega, 2 * lat.omega_prime, n, n, -lat.omega, -lat.omega_prime);
  const double b0 = 2 * PI * m / lat.cell_area;
  const Field b = kernels::sample(g, [&](PlanarPoint z) {
    return cplx(b0 * (1.0 + ripple * std::cos(PI * z.x / lat.omega) * std::sin(PI * z.y / lat.omega_prime)));
  });
  const auto st = ground::dn_state(b, lat, zeros, lambda);
  RunOutput out;
  json r = base_report(s);
  r["params"] = p.echo();
  r["m"] = st.m;
  r["a"] = io::to_json(st.a);
  r["multipliers"] = {io::to_json(st.multipliers[0]), io::to_json(st.multipliers[1])};
  r["multiplier_moduli"] = {std::abs(st.multipliers[0]), std::abs(st.multipliers[1])};
  r["quasimomentum"] = st.quasimomentum;
  r["base_point_spread"] = st.base_point_spread;
  r["passed"] = std::abs(std::abs(st.multipliers[0]) - 1.0) < tol && std::abs(std::abs(st.multipliers[1]) - 1.0) < tol;
  out.passed = r["passed"];
  if (s.wants("csv")) {
    Rows rows;
    const int h = 2 * n;
    // cell centers of a 2n x 2n subdivision, away from the potential's source nodes
    for (int j = 0; j < h; ++j)
      for (int i = 0; i < h; ++i) {
        const PlanarPoint z{-lat.omega + 2 * lat.omega * (i + 0.5) / h, -lat.omega_prime + 2 * lat.omega_prime * (j + 0.5) / h};
        const cplx v = st.value(z);
        rows.push_back({z.x, z.y, v.real(), v.imag()});
      }
    out.artifacts.push_back({"bloch.csv", io::csv({"x", "y", "re", "im"}, rows)});
  }
  out.report = r;
  return out;
}

RunOutput run_laplace(const Scenario& s, Params& p) {
  const int n = p.integer("n", 32);
  const int steps = p.integer("steps", 4);
  const double w0 = p.number("w0", 2.0), w1 = p.number("w1", 0.0);
  const double b0 = p.number("b0", 0.0);
  const double cycle_tol = p.number("cycle_tol", 1e-6);
  p.finish();
  if (n < 8 || steps < 1) fail(ErrorKind::Schema, "task_params: need n >= 8 and steps >= 1");
  const Grid g = Grid::make_periodic(s.period_x(), s.period_y(), n, n);
  std::optional<field::ExpField> f;
  if (s.field) f = s.field->build();
  const laplace::LaplaceState st{
      kernels::sample(g, [&](PlanarPoint z) { return cplx(b0 + (f ? field::eval_b(*f, z) : 0.0)); }),
      kernels::sample(g, [&](PlanarPoint z) {
        return cplx(w0 + w1 * std::cos(2 * PI * z.x / g.period_x()) * std::cos(2 * PI * z.y / g.period_y()));
      })};
  const auto chain = laplace::laplace_chain(st, steps, cycle_tol);
  Rows rows;
  json r = base_report(s);
  r["params"] = p.echo();
  r["steps"] = json::array();
  for (std::size_t j = 0; j < chain.states.size(); ++j) {
    const auto& c = chain.states[j];
    double wmin = 1e300, wmax = -1e300;
    for (const cplx v : c.w.v) wmin = std::min(wmin, v.real()), wmax = std::max(wmax, v.real());
    const bool fac = j < chain.factorizable.size() && chain.factorizable[j];
    rows.push_back({double(j), laplace::cell_mean(c.b), laplace::cell_mean(c.w), wmin, wmax, fac ? 1.0 : 0.0});
    r["steps"].push_back({{"mean_b", laplace::cell_mean(c.b)}, {"min_w", wmin}, {"max_w", wmax}, {"factorizable", fac}});
  }
  r["cycle_index"] = chain.cycle_index ? json(*chain.cycle_index) : json(nullptr);
  r["truncated_at"] = chain.truncated_at ? json(*chain.truncated_at) : json(nullptr);
  r["message"] = chain.message;
  RunOutput out;
  if (s.wants("csv"))
    out.artifacts.push_back({"chain.csv", io::csv({"step", "mean_b", "mean_w", "min_w", "max_w", "factorizable"}, rows)});
  out.report = r;
  return out;
}

RunOutput run_boundary(const Scenario& s, Params& p) {
  const std::string mode = p.text("mode", "check");
  RunOutput out;
  json r = base_report(s);
  if (mode == "kind1") {
    const int n = p.integer("n", 6);
    const double a = p.number("a", 0.7);
    std::vector<double> bdef;
    for (int j = 0; j < n; ++j) bdef.push_back((j % 2 ? -1.0 : 1.0) * (0.4 + 0.23 * j));
    const auto b = p.numbers("b", bdef);
    const double k = p.number("k", 0.5);
    const int samples = p.integer("samples", 257);
    const double tol = p.number("tol", 1e-8);
    p.finish();
    const auto d = boundary::special_contour_kind1(n, a, b, k);
    const auto rep = boundary::verify_kind1(d, samples);
    r["params"] = p.echo();
    r["kappa"] = d.kappa;
    r["nullspace_dim"] = d.nullspace_dim;
    r["singular_values"] = d.singular_values;
    r["y_period"] = d.y_period();
    r["max_im_ratio"] = rep.max_im_ratio;
    r["multiplier_defect"] = rep.multiplier_defect;
    r["max_c_deviation"] = rep.max_c_deviation;
    r["max_phi_y"] = rep.max_phi_y;
    r["passed"] = rep.max_im_ratio < tol;
    out.passed = r["passed"];
    if (s.wants("csv")) {
      Rows rows;
      const auto w = d.weighted();
      for (int i = 0; i < samples; ++i) {
        const double y = d.y_period() * i / (samples - 1);
        const auto g3 = boundary::psi_prime_grad(w, k, {0.0, y});
        rows.push_back({y, g3[0].real(), g3[0].imag(), std::imag(g3[1] / g3[0])});
      }
      out.artifacts.push_back({"kind1.csv", io::csv({"y", "psi_re", "psi_im", "im_ratio"}, rows)});
    }
  } else if (mode == "check") {
    const auto variants = p.texts("variants", {"dirichlet", "neumann", "leontovich", "dbar", "general_local",
                                               "mixing_ultralocal_1", "mixing_ultralocal_2", "mixing_ultralocal_3",
                                               "mixing_local"});
    const int count = p.integer("count", 20);
    const int n = p.integer("n", 128);
    const int seed = p.integer("seed", 1);
    const double valid_tol = p.number("valid_tol", 1e-10), corrupt_min = p.number("corrupt_min", 1e-4);
    p.finish();
    std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
    r["params"] = p.echo();
    r["variants"] = json::array();
    bool ok = true;
    Rows rows;
    for (std::size_t vi = 0; vi < variants.size(); ++vi) {
      double worst_valid = 0.0, least_corrupt = 1e300;
      for (int i = 0; i < count; ++i) {
        const auto bc = boundary::random_record(variants[vi], rng, n);
        worst_valid = std::max(worst_valid, boundary::lagrangian_residual(bc, boundary::lagrangian_samples(bc, rng)));
        if (variants[vi] == "dirichlet" || variants[vi] == "neumann") continue;
        const auto bad = boundary::corrupt(bc, rng);
        least_corrupt = std::min(least_corrupt, boundary::lagrangian_residual(bad, boundary::lagrangian_samples(bad, rng)));
      }
      const bool has_corrupt = least_corrupt < 1e300;
      const bool pass = worst_valid < valid_tol && (!has_corrupt || least_corrupt > corrupt_min);
      ok = ok && pass;
      r["variants"].push_back({{"variant", variants[vi]},
                               {"max_valid_residual", worst_valid},
                               {"min_corrupted_residual", has_corrupt ? json(least_corrupt) : json(nullptr)},
                               {"pass", pass}});
      rows.push_back({double(vi), worst_valid, has_corrupt ? least_corrupt : 0.0});
    }
    r["passed"] = ok;
    out.passed = ok;
    if (s.wants("csv"))
      out.artifacts.push_back({"boundary.csv", io::csv({"variant", "max_valid", "min_corrupted"}, rows)});
  } else {
    fail(ErrorKind::Schema, "task_params.mode: expected kind1 or check");
  }
  out.report = r;
  return out;
}

std::string kind_color(foliation::LeafCase c, foliation::LeafKind k) {
  if (c == foliation::LeafCase::EssentialZero) return "#c0392b";
  if (c == foliation::LeafCase::MaximalSeparatrix) return "#8e44ad";
  if (k == foliation::LeafKind::ClosedNullHomotopic) return "#27ae60";
  if (c == foliation::LeafCase::BoundedOpen) return "#2c6fbb";
  return "#777";
}

Rows leaf_rows(const foliation::FoliationData& d, const foliation::Trajectory& t) {
  Rows rows;
  double arc = 0.0;
  for (std::size_t i = 0; i < t.points.size(); ++i) {
    if (i) arc += std::hypot(t.points[i].x - t.points[i - 1].x, t.points[i].y - t.points[i - 1].y);
    rows.push_back({arc, t.points[i].x, t.points[i].y, foliation::f_eval(d, t.points[i])});
  }
  return rows;
}

json trajectory_json(const foliation::Trajectory& t, const foliation::LeafVerdict& v) {
  json j = {{"kind", foliation::leaf_kind_name(t.kind)},
            {"level", t.f_level},
            {"points", t.points.size()},
            {"length", t.length},
            {"max_drift", t.max_drift},
            {"case", int(v.kase)},
            {"admissible", v.admissible},
            {"sup_over_inf", v.sup_over_inf},
            {"growth_rate", v.growth_rate},
            {"note", v.note}};
  if (t.homology) j["homology"] = *t.homology;
  if (t.rotation_estimate) j["rotation_estimate"] = *t.rotation_estimate;
  if (t.separatrix_cycle) j["area_ratio"] = v.area_ratio;
  return j;
}

// polyline pieces of a lift reduced to the cell [0, Px) x [0, Py)
std::vector<std::vector<PlanarPoint>> on_torus(const std::vector<PlanarPoint>& pts, double px, double py) {
  std::vector<std::vector<PlanarPoint>> out;
  long ci = 0, cj = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const long mi = long(std::floor(pts[i].x / px)), mj = long(std::floor(pts[i].y / py));
    if (i == 0 || mi != ci || mj != cj) out.emplace_back();
    ci = mi, cj = mj;
    out.back().push_back({pts[i].x - mi * px, pts[i].y - mj * py});
  }
  return out;
}

std::string pad3(std::size_t i) {
  std::string s = std::to_string(i);
  return std::string(s.size() < 3 ? 3 - s.size() : 0, '0') + s;
}

RunOutput run_foliate(const Scenario& s, Params& p) {
  const auto d = s.foliation_data();
  const int crit_n = p.integer("critical_grid", 64);
  const int scan_n = p.integer("scan_n", 128);
  const auto seeds = p.complexes("seeds", {cplx(1.0, 0.3), cplx(2.0, 4.0), cplx(4.5, 1.5)});
  const double max_length = p.number("max_length", 60.0);
  const double eps = p.number("eps", 1e-3);
  const int periods = p.integer("periods", 3);
  const int rotation_cells = p.integer("rotation_cells", 50);
  const bool separatrices = p.flag("separatrices", true);
  Params tp = p.child("trace");
  foliation::TraceOptions opt;
  opt.h0 = tp.number("h0", opt.h0);
  opt.h_min = tp.number("h_min", opt.h_min);
  opt.h_max = tp.number("h_max", opt.h_max);
  opt.tol = tp.number("tol", opt.tol);
  tp.finish();
  p.adopt("trace", tp);
  Params sk = p.child("scan_k");
  const bool do_scan = p.has("scan_k");
  const cplx kmin = sk.complex("kmin", d.k - cplx(0.25, 0.25));
  const cplx kmax = sk.complex("kmax", d.k + cplx(0.25, 0.25));
  const int kn = sk.integer("n", 16), kgrid = sk.integer("grid", 32);
  sk.finish();
  if (do_scan) p.adopt("scan_k", sk);
  p.finish();
  if (crit_n < 4 || scan_n < 4) fail(ErrorKind::Schema, "task_params: grids need at least 4 nodes");

  const auto cps = foliation::critical_points(d, crit_n);
  opt.critical = cps;
  RunOutput out;
  json r = base_report(s);
  r["params"] = p.echo();
  r["periods"] = {d.period_x, d.period_y};
  r["critical_points"] = json::array();
  for (const auto& c : cps)
    r["critical_points"].push_back({{"x", c.position.x},
                                    {"y", c.position.y},
                                    {"index", c.index()},
                                    {"hessian_det", c.hessian_det},
                                    {"F", c.f_value}});
  r["index_sum"] = foliation::index_sum(cps);

  std::vector<io::Polyline> lines;
  std::vector<io::Marker> markers;
  auto draw = [&](const std::vector<PlanarPoint>& pts, const std::string& color, double width) {
    for (auto& piece : on_torus(pts, d.period_x, d.period_y)) lines.push_back({std::move(piece), color, width, false});
  };

  r["leaves"] = json::array();
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto t = foliation::trace_leaf(d, PlanarPoint::of(seeds[i]), max_length, opt);
    const auto v = foliation::classify_leaf(t, d);
    json lj = trajectory_json(t, v);
    lj["seed"] = io::to_json(seeds[i]);
    if (t.kind == foliation::LeafKind::OpenQuasiperiodic) {
      const auto rot = foliation::rotation_number(d, PlanarPoint::of(seeds[i]), rotation_cells);
      lj["rotation_number"] = {{"rho", rot.rho}, {"confidence", rot.confidence}};
      if (rot.locked) lj["rotation_number"]["locked"] = *rot.locked;
    }
    r["leaves"].push_back(lj);
    if (s.wants("csv")) out.artifacts.push_back({"leaf_" + pad3(i) + ".csv", io::csv({"t", "x", "y", "F"}, leaf_rows(d, t))});
    draw(t.points, kind_color(v.kase, t.kind), 1.0);
  }

  const auto cycles = foliation::limit_cycle_scan(d, scan_n);
  r["limit_cycles"] = json::array();
  for (std::size_t i = 0; i < cycles.size(); ++i) {
    const auto& c = cycles[i];
    const auto v = foliation::classify_leaf(c, d);
    json cj = trajectory_json(c, v);
    for (const double e : {eps, -eps}) {
      const auto dist = foliation::approach_distances(d, c, e, periods);
      double worst = 1e300;
      for (std::size_t q = 0; q + 1 < dist.size(); ++q) worst = std::min(worst, dist[q] / dist[q + 1]);
      cj[e > 0 ? "approach_plus" : "approach_minus"] = {{"distances", dist}, {"min_ratio", dist.size() > 1 ? json(worst) : json(nullptr)}};
    }
    r["limit_cycles"].push_back(cj);
    if (s.wants("csv")) out.artifacts.push_back({"cycle_" + pad3(i) + ".csv", io::csv({"t", "x", "y", "F"}, leaf_rows(d, c))});
    draw(c.points, "#c0392b", 2.0);
  }

  if (separatrices && !cps.empty()) {
    const auto sc = foliation::separatrix_cycle(d);
    if (sc) {
      const auto v = foliation::classify_leaf(*sc, d);
      r["separatrix_cycle"] = trajectory_json(*sc, v);
      draw(sc->points, "#8e44ad", 1.5);
    } else {
      r["separatrix_cycle"] = nullptr;
    }
  }
  for (const auto& c : cps)
    markers.push_back({{c.position.x - std::floor(c.position.x / d.period_x) * d.period_x,
                        c.position.y - std::floor(c.position.y / d.period_y) * d.period_y}, c.kind == foliation::CriticalKind::Center ? "#27ae60" : "#000", 3.0});

  if (do_scan) {
    const auto ks = foliation::k_scan(d, kmin, kmax, kn, kgrid);
    Rows rows;
    int singular = 0;
    for (int j = 0; j < ks.n; ++j)
      for (int i = 0; i < ks.n; ++i) {
        const double fr = ks.n > 1 ? 1.0 / (ks.n - 1) : 0.0;
        const cplx k{kmin.real() + (kmax.real() - kmin.real()) * i * fr, kmin.imag() + (kmax.imag() - kmin.imag()) * j * fr};
        const int cnt = ks.counts[i + ks.n * j];
        singular += cnt > 0;
        rows.push_back({k.real(), k.imag(), double(cnt)});
      }
    r["k_scan"] = {{"n", ks.n}, {"with_critical_points", singular}};
    if (s.wants("csv")) out.artifacts.push_back({"k_scan.csv", io::csv({"k_re", "k_im", "critical_points"}, rows)});
  }

  if (s.wants("svg")) {
    // cell frame
    lines.insert(lines.begin(), io::Polyline{{{0, 0}, {d.period_x, 0}, {d.period_x, d.period_y}, {0, d.period_y}}, "#bbb", 0.8, true});
    const double pad = 0.03 * std::max(d.period_x, d.period_y);
    out.artifacts.push_back({"foliation.svg", io::svg(lines, markers, -pad, d.period_x + pad, -pad, d.period_y + pad)});
  }
  out.report = r;
  return out;
}

RunOutput run_verify(const Scenario& s, Params& p) {
  const auto checks = verify::run_suite(s, p);
  p.finish();
  RunOutput out;
  json r = base_report(s);
  r["params"] = p.echo();
  r["checks"] = verify::to_json(checks);
  bool ok = true;
  for (const auto& c : checks) ok = ok && c.pass;
  r["passed"] = ok;
  out.passed = ok;
  out.artifacts.push_back({"verify.txt", verify::table(checks)});
  out.report = r;
  return out;
}

}  // namespace

RunOutput run(const Scenario& s) {
  Params p(s.task_params_ignored ? json::object() : s.task_params, "task_params");
  RunOutput out;
  if (s.task == "field") out = run_field(s, p);
  else if (s.task == "groundstate") out = run_groundstate(s, p);
  else if (s.task == "bloch") out = run_bloch(s, p);
  else if (s.task == "laplace") out = run_laplace(s, p);
  else if (s.task == "boundary") out = run_boundary(s, p);
  else if (s.task == "foliate") out = run_foliate(s, p);
  else if (s.task == "verify") out = run_verify(s, p);
  else fail(ErrorKind::Schema, "unknown task '" + s.task + "'");
  out.artifacts.push_back({"report.json", out.report.dump(2) + "\n"});
  return out;
}

}  // namespace magpauli::scenario
