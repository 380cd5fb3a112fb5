#include "smoothprob/report.hpp"

#include <cmath>
#include <cstdio>
#include <ctime>

namespace smoothprob {

PointEstimate make_mc_point(std::string label, double parameter, double estimate,
                            double stderr_value, std::optional<double> reference,
                            bool reference_is_exact) {
  PointEstimate p;
  p.label = std::move(label);
  p.parameter = parameter;
  p.estimate = estimate;
  p.stderr_value = stderr_value;
  p.reference = reference;
  if (reference && stderr_value > 0.0) {
    p.sigma = std::abs(estimate - *reference) / stderr_value;
    p.flagged = reference_is_exact && p.sigma > 4.0;
  }
  return p;
}

PointEstimate make_deterministic_point(std::string label, double parameter,
                                       double estimate, std::optional<double> reference,
                                       double flag_tolerance) {
  PointEstimate p;
  p.label = std::move(label);
  p.parameter = parameter;
  p.estimate = estimate;
  p.reference = reference;
  if (reference && flag_tolerance > 0.0) {
    p.flagged = std::abs(estimate - *reference) > flag_tolerance;
  }
  return p;
}

bool ExperimentReport::any_flagged() const {
  for (const PointEstimate& p : points) {
    if (p.flagged) return true;
  }
  return false;
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["parameters"] = parameters;
  j["seed"] = seed;
  j["samples"] = samples;
  nlohmann::json rows = nlohmann::json::array();
  for (const PointEstimate& p : points) {
    nlohmann::json row;
    row["label"] = p.label;
    row["parameter"] = p.parameter;
    row["estimate"] = p.estimate;
    row["stderr"] = p.stderr_value;
    if (p.reference) {
      row["reference"] = *p.reference;
    } else {
      row["reference"] = nullptr;
    }
    row["sigma"] = p.sigma;
    row["flagged"] = p.flagged;
    rows.push_back(std::move(row));
  }
  j["points"] = std::move(rows);
  j["metrics"] = metrics;
  if (!timestamp.empty()) {
    j["timestamp"] = timestamp;
    j["wall_seconds"] = wall_seconds;
  }
  return j;
}

ExperimentReport ExperimentReport::from_json(const nlohmann::json& j) {
  ExperimentReport r;
  r.experiment = j.value("experiment", std::string{});
  r.parameters = j.value("parameters", nlohmann::json::object());
  r.seed = j.value("seed", std::uint64_t{0});
  r.samples = j.value("samples", std::uint64_t{0});
  if (j.contains("points")) {
    for (const nlohmann::json& row : j.at("points")) {
      PointEstimate p;
      p.label = row.value("label", std::string{});
      p.parameter = row.value("parameter", 0.0);
      p.estimate = row.value("estimate", 0.0);
      p.stderr_value = row.value("stderr", 0.0);
      if (row.contains("reference") && !row.at("reference").is_null()) {
        p.reference = row.at("reference").get<double>();
      }
      p.sigma = row.value("sigma", 0.0);
      p.flagged = row.value("flagged", false);
      r.points.push_back(std::move(p));
    }
  }
  if (j.contains("metrics")) {
    r.metrics = j.at("metrics").get<std::map<std::string, double>>();
  }
  r.timestamp = j.value("timestamp", std::string{});
  r.wall_seconds = j.value("wall_seconds", 0.0);
  return r;
}

namespace {

std::string format_g12(double x) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", x);
  return buffer;
}

}  // namespace

std::string ExperimentReport::to_csv() const {
  std::string out = "label,parameter,estimate,stderr,reference,sigma,flagged\n";
  for (const PointEstimate& p : points) {
    out += p.label;
    out += ',';
    out += format_g12(p.parameter);
    out += ',';
    out += format_g12(p.estimate);
    out += ',';
    out += format_g12(p.stderr_value);
    out += ',';
    if (p.reference) out += format_g12(*p.reference);
    out += ',';
    out += format_g12(p.sigma);
    out += ',';
    out += p.flagged ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm parts{};
  gmtime_r(&now, &parts);
  char buffer[32];
  std::strftime(buffer, sizeof(buffer), "%Y-%m-%dT%H:%M:%SZ", &parts);
  return buffer;
}

}  // namespace smoothprob
