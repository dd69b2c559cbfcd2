#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "magpauli/kernels.hpp"
#include "magpauli/scenario.hpp"

using namespace magpauli;
using io::json;

namespace {

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Schema:
    case ErrorKind::Domain:
      return 2;
    case ErrorKind::Numerical:
      return 3;
    case ErrorKind::Singular:
      return 4;
  }
  return 3;
}

std::vector<double> number_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorKind::Schema, what + ": '" + text + "' is not a comma-separated list of numbers");
    }
  }
  return out;
}

struct Options {
  std::string scenario, out, k, scan_k;
  std::vector<std::string> sets;
  bool svg = false, quiet = false;
};

int run(const std::string& command, const Options& o) {
  json j = io::parse_json(io::read_file(o.scenario), o.scenario);
  if (!j.is_object()) fail(ErrorKind::Schema, o.scenario + ": expected a JSON object");
  for (const auto& s : o.sets) scenario::apply_override(j, s);
  if (!o.out.empty()) j["output"]["dir"] = o.out;
  if (!o.k.empty()) {
    const auto v = number_list(o.k, "--k");
    if (v.size() != 2) fail(ErrorKind::Schema, "--k expects re,im");
    j["spectral"]["k"] = {v[0], v[1]};
  }
  if (!o.scan_k.empty()) {
    const auto v = number_list(o.scan_k, "--scan-k");
    if (v.size() != 4 && v.size() != 5) fail(ErrorKind::Schema, "--scan-k expects kmin_re,kmin_im,kmax_re,kmax_im[,n]");
    json sk = {{"kmin", {v[0], v[1]}}, {"kmax", {v[2], v[3]}}};
    if (v.size() == 5) sk["n"] = static_cast<int>(v[4]);
    j["task_params"]["scan_k"] = sk;
  }
  if (o.svg) {
    json& f = j["output"]["formats"];
    if (f.is_null()) f = {"csv", "json"};
    if (f.is_array() && std::find(f.begin(), f.end(), "svg") == f.end()) f.push_back("svg");
  }
  auto s = scenario::parse(j);
  if (command != s.task) {
    if (command != "verify")
      fail(ErrorKind::Schema, "scenario task is '" + s.task + "' but the command is '" + command + "'");
    s.task = "verify";
    s.task_params_ignored = true;
    s.out_dir = (std::filesystem::path(s.out_dir) / "verify").string();
  }
  const auto result = scenario::run(s);
  const json meta = {{"command", command},
                     {"scenario", std::filesystem::path(o.scenario).filename().string()},
                     {"version", s.version}};
  io::write_artifacts(s.out_dir, result.artifacts, meta);
  if (!o.quiet) {
    for (const auto& a : result.artifacts)
      if (a.name == "verify.txt") std::cout << a.content;
    std::cout << "wrote " << result.artifacts.size() + 1 << " artifacts to " << s.out_dir << '\n';
  }
  if (!result.passed) {
    std::cerr << "magpauli: " << command << ": checks failed, see " << s.out_dir << "/report.json\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  kernels::apply_thread_cap();
  CLI::App app{"magnetic Pauli operators from algebro-geometric data"};
  app.require_subcommand(1);
  Options o;
  const std::pair<const char*, const char*> commands[] = {
      {"field", "sample c and B, shift polytope"},
      {"groundstate", "zero modes: periodic pair or Aharonov-Casher states"},
      {"bloch", "magnetic Bloch states on a lattice"},
      {"laplace", "Laplace transformation chain"},
      {"boundary", "boundary-condition records and special contours"},
      {"foliate", "foliation of F: critical points, leaves, limit cycles"},
      {"verify", "invariant suite"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("scenario", o.scenario, "scenario JSON file")->required();
    sub->add_option("--set", o.sets, "override, dotted.key=value (value parsed as JSON when possible)");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--k", o.k, "spectral parameter re,im");
    sub->add_flag("-q,--quiet", o.quiet, "no summary on stdout");
    if (std::string(name) == "foliate") {
      sub->add_option("--scan-k", o.scan_k, "critical-point scan over k: kmin_re,kmin_im,kmax_re,kmax_im[,n]");
      sub->add_flag("--svg", o.svg, "also write foliation.svg");
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, o);
  } catch (const Error& e) {
    std::cerr << "magpauli: error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "magpauli: error: " << e.what() << '\n';
    return 3;
  }
}
