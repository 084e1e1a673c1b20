#include <algorithm>
#include <cmath>
#include <fstream>

#include "orbitedge/errors.hpp"
#include "orbitedge/oracle.hpp"

namespace orbitedge::oracle {

const OracleCase& OracleReport::add(const std::string& id, double oracle_value, double system_value, double tolerance,
                                    double floor) {
  OracleCase c;
  c.id = id;
  c.oracle_value = oracle_value;
  c.system_value = system_value;
  c.tolerance = tolerance;
  c.rel_error = std::fabs(system_value - oracle_value) / std::max(std::fabs(oracle_value), floor);
  c.pass = c.rel_error <= tolerance;
  cases.push_back(c);
  return cases.back();
}

const OracleCase& OracleReport::add_check(const std::string& id, bool ok) {
  OracleCase c;
  c.id = id;
  c.oracle_value = 1.0;
  c.system_value = ok ? 1.0 : 0.0;
  c.rel_error = ok ? 0.0 : 1.0;
  c.pass = ok;
  cases.push_back(c);
  return cases.back();
}

bool OracleReport::all_pass() const { return failures() == 0; }

std::size_t OracleReport::failures() const {
  return static_cast<std::size_t>(std::count_if(cases.begin(), cases.end(), [](const auto& c) { return !c.pass; }));
}

nlohmann::json OracleReport::to_json() const {
  nlohmann::json j;
  j["suite"] = suite;
  j["cases"] = nlohmann::json::array();
  for (const auto& c : cases)
    j["cases"].push_back({{"id", c.id},
                          {"oracle", c.oracle_value},
                          {"system", c.system_value},
                          {"rel_error", c.rel_error},
                          {"tolerance", c.tolerance},
                          {"verdict", c.pass ? "pass" : "fail"}});
  j["failures"] = failures();
  return j;
}

void OracleReport::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << to_json().dump(2) << '\n';
}

}  // namespace orbitedge::oracle
