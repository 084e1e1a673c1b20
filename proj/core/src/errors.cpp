#include "orbitedge/errors.hpp"

namespace orbitedge {

namespace {

std::string join(const std::vector<std::string>& problems) {
  std::string s = problems.size() == 1 ? "1 problem:" : std::to_string(problems.size()) + " problems:";
  for (const auto& p : problems) s += "\n  - " + p;
  return s;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : ConfigError(join(problems)), problems_(std::move(problems)) {}

}  // namespace orbitedge
