#pragma once

#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace surplus {

/// One violated weight inequality, attributed to a node (1-based).
struct WeightViolation {
  std::string rule;  // "P1", "P2" or "P3"
  int node = 0;
  std::string detail;
};

struct ValidationReport {
  std::vector<WeightViolation> violations;

  bool ok() const noexcept { return violations.empty(); }

  std::string to_string() const {
    if (ok()) return "weights valid";
    std::ostringstream out;
    out << violations.size() << " weight violation(s):";
    for (const auto& v : violations)
      out << "\n  [" << v.rule << "] node " << v.node << ": " << v.detail;
    return out.str();
  }
};

/// Weights fail (P1)-(P3) on the given digraph. Carries the full report;
/// step_index() is set when the failure surfaced during a timed run.
class WeightError : public std::runtime_error {
 public:
  explicit WeightError(ValidationReport report, std::optional<long> step_index = std::nullopt)
      : std::runtime_error(format(report, step_index)),
        report_(std::move(report)),
        step_index_(step_index) {}

  const ValidationReport& report() const noexcept { return report_; }
  std::optional<long> step_index() const noexcept { return step_index_; }

 private:
  static std::string format(const ValidationReport& report, std::optional<long> k) {
    std::string msg = report.to_string();
    if (k) msg = "at step " + std::to_string(*k) + ": " + msg;
    return msg;
  }

  ValidationReport report_;
  std::optional<long> step_index_;
};

/// Vector/matrix sizes disagree with the digraph or with each other.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A config file (or one of its fields) cannot be parsed or fails validation.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error("config field '" + field + "': " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace surplus
