#pragma once

#include "magpauli/scenario.hpp"

namespace magpauli::verify {

struct Check {
  std::string name;
  double measured = 0.0;
  std::string relation;  // "<", ">=", "==", ">"
  double threshold = 0.0;
  bool pass = false;
  std::string note;
};

std::vector<Check> run_suite(const scenario::Scenario& s, scenario::Params& p);
std::string table(const std::vector<Check>& checks);
io::json to_json(const std::vector<Check>& checks);

}  // namespace magpauli::verify
