#pragma once

#include <optional>
#include <string>
#include <vector>

#include "magpauli/elliptic.hpp"
#include "magpauli/field.hpp"
#include "magpauli/foliation.hpp"
#include "magpauli/io.hpp"

namespace magpauli::scenario {

using io::json;

const std::vector<std::string>& task_names();

// c either from a preset, the trigonometric form (a_j, l_j) or raw exponential terms
struct FieldSpec {
  std::string preset;
  std::vector<cplx> a, l;
  std::vector<field::ExpTerm> terms;
  bool declared_real = false;

  bool trigonometric() const { return terms.empty() && preset != "fig2b"; }
  field::ExpField build() const;
};

struct Scenario {
  int version = 1;
  std::optional<elliptic::RectLattice> lattice;
  std::optional<FieldSpec> field;
  std::optional<cplx> k;  // spectral.k
  std::string task;
  json task_params = json::object();
  bool task_params_ignored = false;  // verify run on a scenario written for another task
  std::string out_dir = "out";
  std::vector<std::string> formats{"csv", "json"};

  double period_x() const { return lattice ? 2 * lattice->omega : 2 * PI; }
  double period_y() const { return lattice ? 2 * lattice->omega_prime : 2 * PI; }
  bool wants(const std::string& format) const;
  foliation::FoliationData foliation_data() const;
};

Scenario parse(const json& j);
// key=value with a dotted key; the value is read as JSON when it parses, else as a string
void apply_override(json& j, const std::string& assignment);

// Typed access to a parameter object; every value read (or defaulted) is echoed,
// and finish() rejects keys that were never read.
class Params {
 public:
  Params(const json& j, std::string where);
  double number(const std::string& key, double def);
  int integer(const std::string& key, int def);
  bool flag(const std::string& key, bool def);
  std::string text(const std::string& key, const std::string& def);
  cplx complex(const std::string& key, cplx def);
  std::vector<double> numbers(const std::string& key, const std::vector<double>& def);
  std::vector<cplx> complexes(const std::string& key, const std::vector<cplx>& def);
  std::vector<std::string> texts(const std::string& key, const std::vector<std::string>& def);
  bool has(const std::string& key) const;
  Params child(const std::string& key);
  void finish();
  const json& echo() const { return echo_; }
  void adopt(const std::string& key, const Params& sub);

 private:
  const json* get(const std::string& key);
  json j_, echo_ = json::object();
  std::string where_;
  std::vector<std::string> used_;
};

struct RunOutput {
  std::vector<io::Artifact> artifacts;
  json report;
  bool passed = true;  // false when a verify check fails
};

RunOutput run(const Scenario& s);

}  // namespace magpauli::scenario
