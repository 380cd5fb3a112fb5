#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace smoothprob {

// One row of an experiment table.  `sigma` is the discrepancy against the
// reference in standard errors (when both exist); `flagged` marks rows that
// failed their own check, which the CLI turns into a failure exit code.
struct PointEstimate {
  std::string label;
  double parameter = 0.0;
  double estimate = 0.0;
  double stderr_value = 0.0;
  std::optional<double> reference;
  double sigma = 0.0;
  bool flagged = false;
};

// Monte-Carlo row: flags beyond 4 sigma, but only when the reference is an
// exact same-size value; references that are asymptotic limits stay
// informational no matter the distance (the limit is not reachable at any
// finite sample size).
PointEstimate make_mc_point(std::string label, double parameter, double estimate,
                            double stderr_value, std::optional<double> reference,
                            bool reference_is_exact);

// Deterministic row: flags when |estimate - reference| exceeds the absolute
// tolerance; pass tolerance 0 for informational rows.
PointEstimate make_deterministic_point(std::string label, double parameter,
                                       double estimate, std::optional<double> reference,
                                       double flag_tolerance);

struct ExperimentReport {
  std::string experiment;
  nlohmann::json parameters = nlohmann::json::object();
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  std::vector<PointEstimate> points;
  std::map<std::string, double> metrics;
  double wall_seconds = 0.0;
  std::string timestamp;  // empty = omit timestamp and wall_seconds entirely

  bool any_flagged() const;

  // Lossless: from_json(to_json()) reproduces every field bit for bit.
  nlohmann::json to_json() const;
  static ExperimentReport from_json(const nlohmann::json& j);

  // Points table, one row per point, numbers at 12 significant digits.
  std::string to_csv() const;
};

// Current UTC time, e.g. 2026-08-17T12:00:00Z.
std::string utc_timestamp();

}  // namespace smoothprob
