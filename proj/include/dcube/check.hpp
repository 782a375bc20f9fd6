#pragma once

#include <string>
#include <vector>

namespace dcube {

enum class CheckStatus { Pass, Fail, HypothesesUnmet, Inconclusive };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::HypothesesUnmet: return "hypotheses unmet";
    case CheckStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

// One named verdict of a verification battery. `detail` carries the witness
// or a short summary; it must be deterministic.
struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string detail;

  bool passed() const { return status == CheckStatus::Pass; }
};

inline CheckResult pass(std::string name, std::string detail = {}) {
  return {std::move(name), CheckStatus::Pass, std::move(detail)};
}
inline CheckResult fail(std::string name, std::string detail) {
  return {std::move(name), CheckStatus::Fail, std::move(detail)};
}
inline CheckResult unmet(std::string name, std::string detail) {
  return {std::move(name), CheckStatus::HypothesesUnmet, std::move(detail)};
}
inline CheckResult verdict(std::string name, bool ok, std::string detail) {
  return {std::move(name), ok ? CheckStatus::Pass : CheckStatus::Fail, std::move(detail)};
}

using CheckList = std::vector<CheckResult>;

}  // namespace dcube
