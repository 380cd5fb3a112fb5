#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "smoothprob/experiments.hpp"
#include "smoothprob/model.hpp"
#include "smoothprob/primes.hpp"
#include "smoothprob/report.hpp"
#include "smoothprob/rng.hpp"
#include "smoothprob/specfun.hpp"

using namespace smoothprob;

namespace {
const PrimeTable& table() {
  static const PrimeTable t = build_prime_table(10'000);
  return t;
}

const SpecialFunctionTable& rho() {
  static const SpecialFunctionTable t = build_dickman_table(20.0, 1e-10);
  return t;
}

const SpecialFunctionTable& buchstab() {
  static const SpecialFunctionTable t = build_buchstab_table(8.0, 1e-10);
  return t;
}

const PointEstimate& point_with_label(const ExperimentReport& r,
                                      const std::string& label) {
  for (const auto& p : r.points) {
    if (p.label == label) return p;
  }
  REQUIRE_MESSAGE(false, "missing point: " << label);
  return r.points.front();
}
}  // namespace

TEST_SUITE("experiments") {

TEST_CASE("ks statistic on hand-checkable samples") {
  const auto identity = [](double x) { return x; };
  CHECK(ks_statistic({0.5}, identity) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(ks_statistic({0.25, 0.75}, identity) ==
        doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(ks_statistic({}, identity), std::invalid_argument);
  CHECK_THROWS_AS(ks_statistic({0.75, 0.25}, identity), std::invalid_argument);
}

TEST_CASE("ks statistic of true uniforms sits in the calibrated band") {
  RandomStream rng(55);
  std::vector<double> u(2000);
  for (double& x : u) x = rng.next_unit();
  std::sort(u.begin(), u.end());
  const double ks = ks_statistic(u, [](double x) { return x; });
  CHECK(ks > 0.002);  // P ~ 1e-7 for real uniforms
  CHECK(ks < 0.060);  // P ~ 5e-7
}

TEST_CASE("dickman convergence report: exact mean reference within noise") {
  const std::vector<MeasureSpec> specs = {{30, std::nullopt}, {30, 2}};
  const auto r = run_dickman_convergence(table(), rho(), specs, 20'000, 99);
  CHECK(r.experiment == "dickman-convergence");
  CHECK(r.points.size() == 6);
  const auto& ks = point_with_label(r, "ks N=30");
  CHECK(ks.estimate > 0.0);
  CHECK(ks.estimate < 1.0);
  CHECK(!ks.flagged);
  for (const char* label : {"mean N=30", "mean N=30 k=2"}) {
    const auto& mean = point_with_label(r, label);
    REQUIRE(mean.reference.has_value());
    CHECK(mean.stderr_value > 0.0);
    CHECK(mean.sigma < 6.0);  // exact reference, fixed seed
  }
  // conditioning on squarefree shrinks the mean
  CHECK(point_with_label(r, "mean N=30 k=2").estimate <
        point_with_label(r, "mean N=30").estimate);
}

TEST_CASE("dickman convergence is bit-identical across thread counts") {
  const std::vector<MeasureSpec> specs = {{50, std::nullopt}};
  const auto a = run_dickman_convergence(table(), rho(), specs, 20'000, 7, 1);
  const auto b = run_dickman_convergence(table(), rho(), specs, 20'000, 7, 4);
  CHECK(a.to_json().dump() == b.to_json().dump());
}

TEST_CASE("ratio-pplus report has an informational survival row") {
  const auto r = run_ratio_pplus(table(), rho(), {50}, 10'000, 3);
  CHECK(r.experiment == "ratio-pplus");
  CHECK(r.points.size() == 2);
  const auto& surv = point_with_label(r, "survival2 N=50");
  REQUIRE(surv.reference.has_value());
  CHECK(surv.estimate > 0.0);
  CHECK(surv.estimate < 1.0);
  CHECK(!surv.flagged);  // asymptotic reference never flags
  CHECK(point_with_label(r, "ks N=50").estimate > 0.0);
}

TEST_CASE("buchstab profile matches the exact cdf at small s") {
  const auto r =
      run_buchstab_profile(table(), buchstab(), {30}, {1.5, 2.5}, 1'000'000, 11);
  CHECK(r.experiment == "buchstab-profile");
  CHECK(r.points.size() == 4);
  for (double s : {1.5, 2.5}) {
    const std::string at = "N=30 s=" + std::string(s == 1.5 ? "1.5" : "2.5");
    const auto& cdf = point_with_label(r, "cdf " + at);
    REQUIRE(cdf.reference.has_value());
    CHECK(*cdf.reference ==
          doctest::Approx(exact_ratio_cdf_piecewise(table(), 30, s))
              .epsilon(1e-15));
    CHECK(cdf.sigma < 5.0);  // exact sampler vs exact formula, fixed seed
    const auto& prof = point_with_label(r, "profile " + at);
    REQUIRE(prof.reference.has_value());
    CHECK(!prof.flagged);
  }
}

TEST_CASE("mertens check ratios decrease toward 1") {
  const auto r = run_mertens_check(table(), {100, 1000, 10000});
  CHECK(r.experiment == "mertens-check");
  CHECK(r.points.size() == 12);
  CHECK(!r.any_flagged());
  double prev = 1e9;
  for (int n : {100, 1000, 10000}) {
    const auto& row = point_with_label(r, "ratio-logn N=" + std::to_string(n));
    CHECK(row.estimate > 1.0);
    CHECK(row.estimate < prev);
    prev = row.estimate;
    const auto& pn = point_with_label(r, "ratio-logpn N=" + std::to_string(n));
    CHECK(pn.estimate > 1.0);
    CHECK(pn.estimate < row.estimate);  // log p_N is the sharper normalizer
    const auto& second =
        point_with_label(r, "second-theorem N=" + std::to_string(n));
    REQUIRE(second.reference.has_value());
    CHECK(std::fabs(second.estimate - *second.reference) < 1e-2);
  }
}

TEST_CASE("density agreement stays within a percent at 1e5") {
  const auto r = run_density_agreement(100'000, 5, 42);
  CHECK(r.experiment == "density-agreement");
  CHECK(r.points.size() == 9);  // 4 canonical + 5 random events
  CHECK(!r.any_flagged());
  REQUIRE(r.metrics.count("max_abs_error") == 1);
  CHECK(r.metrics.at("max_abs_error") < 0.01);
  for (const auto& p : r.points) REQUIRE(p.reference.has_value());
}

TEST_CASE("smoothness disagreement function is nonnegative with interior max") {
  std::vector<double> grid;
  for (double s = 1.0; s <= 6.0 + 1e-9; s += 0.1) grid.push_back(s);
  const auto r = run_smoothness_disagreement(rho(), grid);
  CHECK(r.experiment == "smoothness-disagreement");
  CHECK(!r.any_flagged());
  for (const auto& p : r.points) CHECK(p.estimate >= -1e-12);
  CHECK(std::fabs(r.metrics.at("H_at_1")) < 1e-12);
  CHECK(r.metrics.at("max_H") > 0.13);
  CHECK(r.metrics.at("max_H") < 0.15);
  CHECK(r.metrics.at("argmax_s") > 1.6);
  CHECK(r.metrics.at("argmax_s") < 2.0);
  CHECK(std::fabs(r.metrics.at("derivative_at_exp_gamma")) < 1e-4);
}

TEST_CASE("report json round-trip is lossless") {
  ExperimentReport r;
  r.experiment = "demo";
  r.parameters["alpha"] = 3;
  r.seed = 17;
  r.samples = 1000;
  r.points.push_back(make_mc_point("a", 1.0, 1.0 / 3.0, 0.001, 0.3334, true));
  r.points.push_back(make_deterministic_point("b", 2.0, 0.5, std::nullopt, 0.0));
  r.metrics["worst"] = 1.25e-9;
  r.timestamp = "2026-01-01T00:00:00Z";
  r.wall_seconds = 1.25;
  const auto j = r.to_json();
  const auto back = ExperimentReport::from_json(j);
  CHECK(back.to_json().dump() == j.dump());
  CHECK(back.points[1].reference == std::nullopt);
  // timestamp omitted entirely when empty
  ExperimentReport bare;
  CHECK(!bare.to_json().contains("timestamp"));
  CHECK(!bare.to_json().contains("wall_seconds"));
}

TEST_CASE("csv rows carry 12 significant digits") {
  ExperimentReport r;
  r.points.push_back(make_mc_point("a", 1.0, 1.0 / 3.0, 0.001, std::nullopt, true));
  const std::string csv = r.to_csv();
  CHECK(csv.rfind("label,parameter,estimate,stderr,reference,sigma,flagged\n",
                  0) == 0);
  CHECK(csv.find("0.333333333333") != std::string::npos);
  CHECK(csv.find(",,") != std::string::npos);  // empty reference cell
}

TEST_CASE("flag policy: exact references flag at 4 sigma, limits never") {
  CHECK(make_mc_point("x", 0, 10.0, 1.0, 3.0, true).flagged);
  CHECK(make_mc_point("x", 0, 10.0, 1.0, 3.0, true).sigma ==
        doctest::Approx(7.0));
  CHECK(!make_mc_point("x", 0, 10.0, 1.0, 3.0, false).flagged);
  CHECK(!make_mc_point("x", 0, 10.0, 0.0, 3.0, true).flagged);
  CHECK(!make_mc_point("x", 0, 10.0, 1.0, std::nullopt, true).flagged);
  CHECK(make_deterministic_point("y", 0, 1.05, 1.0, 0.01).flagged);
  CHECK(!make_deterministic_point("y", 0, 1.05, 1.0, 0.1).flagged);
  CHECK(!make_deterministic_point("y", 0, 1.05, 1.0, 0.0).flagged);
}

TEST_CASE("experiment input validation") {
  CHECK_THROWS_AS(run_dickman_convergence(table(), rho(), {{30, std::nullopt}},
                                          100, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_dickman_convergence(table(), rho(), {{0, std::nullopt}},
                                          20'000, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(run_ratio_pplus(table(), rho(), {50}, 100, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      run_buchstab_profile(table(), buchstab(), {30}, {1.5}, 1000, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      run_buchstab_profile(table(), buchstab(), {30}, {0.5}, 1'000'000, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      run_buchstab_profile(table(), buchstab(), {30}, {100.0}, 1'000'000, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(run_density_agreement(100, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(run_density_agreement(100'000, 5000, 1),
                  std::invalid_argument);
}

}  // TEST_SUITE
