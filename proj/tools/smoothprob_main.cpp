// Command-line front end: special-function evaluations, exact model
// computations, censuses, and the Monte-Carlo experiment harness.
//
// Exit codes: 0 success, 2 usage or parameter error, 3 resource limit,
// 4 a numeric self-check failed (a flagged report row).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <new>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smoothprob/errors.hpp"
#include "smoothprob/experiments.hpp"
#include "smoothprob/model.hpp"
#include "smoothprob/numerics.hpp"
#include "smoothprob/oracle.hpp"
#include "smoothprob/primes.hpp"
#include "smoothprob/report.hpp"
#include "smoothprob/specfun.hpp"

namespace {

using namespace smoothprob;

// Documented default seed: every run is reproducible unless --seed overrides.
constexpr std::uint64_t kDefaultSeed = 271828;

struct CommonOpts {
  std::string out_path;
  std::string format = "json";
  bool no_timestamp = false;
  std::uint64_t seed = kDefaultSeed;
  int threads = 1;
};

void add_output_opts(CLI::App* sub, CommonOpts* o) {
  sub->add_option("--out", o->out_path,
                  "output file (default: $SMOOTHPROB_OUT_DIR or . / <subcommand>.<format>)");
  sub->add_option("--format", o->format, "output format")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  sub->add_flag("--no-timestamp", o->no_timestamp,
                "omit timestamp and wall_seconds so reruns are byte-identical");
}

void add_seed_opt(CLI::App* sub, CommonOpts* o) {
  sub->add_option("--seed", o->seed, "random seed (default 271828)")
      ->capture_default_str();
}

void add_threads_opt(CLI::App* sub, CommonOpts* o) {
  sub->add_option("--threads", o->threads, "worker thread cap")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();
}

std::string output_path(const CommonOpts& o, const std::string& subcommand) {
  if (!o.out_path.empty()) return o.out_path;
  const char* env = std::getenv("SMOOTHPROB_OUT_DIR");
  std::filesystem::path dir = (env != nullptr && *env != '\0') ? env : ".";
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);  // best effort; write reports failures
  return (dir / (subcommand + "." + o.format)).string();
}

void write_text_once(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ResourceError("cannot open output file: " + path);
  out << content;
  out.flush();
  if (!out) throw ResourceError("failed writing output file: " + path);
}

// Stamps, serializes, and writes the report; returns the path written.
std::string write_report(ExperimentReport& report, const CommonOpts& o,
                         const std::string& subcommand,
                         std::chrono::steady_clock::time_point started) {
  if (!o.no_timestamp) {
    report.timestamp = utc_timestamp();
    report.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started)
            .count();
  }
  const std::string content = o.format == "json"
                                  ? report.to_json().dump(2) + "\n"
                                  : report.to_csv();
  const std::string path = output_path(o, subcommand);
  write_text_once(path, content);
  return path;
}

std::string fmt10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10f", v);
  return buf;
}

std::string fmtg(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

int finish(ExperimentReport& report, const CommonOpts& o,
           const std::string& subcommand,
           std::chrono::steady_clock::time_point started,
           const std::string& summary) {
  const std::string path = write_report(report, o, subcommand, started);
  const bool flagged = report.any_flagged();
  std::printf("%s%s  [wrote %s]\n", summary.c_str(),
              flagged ? "  [FLAGGED]" : "", path.c_str());
  return flagged ? 4 : 0;
}

std::string factorization_string(const PrimeTable& table, const FactoredInteger& n) {
  if (n.is_one()) return "1";
  std::string s;
  for (std::size_t i = 0; i < n.exponents.size(); ++i) {
    if (i > 0) s += "*";
    s += std::to_string(table.prime(n.exponents[i].first));
    if (n.exponents[i].second > 1) {
      s += "^" + std::to_string(n.exponents[i].second);
    }
  }
  return s;
}

// ---- subcommand bodies ----------------------------------------------------

int run_rho(double s, double tol, const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const double s_max = std::max(20.0, std::ceil(s));
  const auto table = build_dickman_table(s_max, tol);
  const double value = dickman_rho(table, s);
  const double total = dickman_total_integral(table);

  ExperimentReport report;
  report.experiment = "rho";
  report.parameters = {{"s", s}, {"tol", tol}, {"s_max", s_max}};
  report.points.push_back(
      make_deterministic_point("rho s=" + fmtg(s), s, value, std::nullopt, 0.0));
  // Self-check: the full integral must reproduce e^gamma.
  report.points.push_back(make_deterministic_point("total-integral", 0.0, total,
                                                   exp_gamma(), 1e-8));
  report.metrics["total_integral_error"] = std::fabs(total - exp_gamma());
  return finish(report, o, "rho", t0,
                "rho(" + fmtg(s) + ") = " + fmt10(value));
}

int run_omega(double s, double tol, const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const double s_max = std::max(12.0, std::ceil(s));
  const auto table = build_buchstab_table(s_max, tol);
  const double value = buchstab_omega(table, s);

  ExperimentReport report;
  report.experiment = "omega";
  report.parameters = {{"s", s}, {"tol", tol}, {"s_max", s_max}};
  report.points.push_back(
      make_deterministic_point("omega s=" + fmtg(s), s, value, std::nullopt, 0.0));
  report.points.push_back(make_deterministic_point(
      "limit-gap", s, value, exp_neg_gamma(), 0.0));  // informational
  return finish(report, o, "omega", t0,
                "omega(" + fmtg(s) + ") = " + fmt10(value));
}

int run_lambda(int level, double s, double tol, const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const double value = lambda_L(level, s, tol);

  ExperimentReport report;
  report.experiment = "lambda";
  report.parameters = {{"L", level}, {"s", s}, {"tol", tol}};
  report.points.push_back(make_deterministic_point(
      "lambda L=" + std::to_string(level) + " s=" + fmtg(s), s, value,
      std::nullopt, 0.0));
  if (s >= std::floor(s) && s - std::floor(s) < 1e-12 && s <= 64.0 && s >= 1.0) {
    report.metrics["buchstab_series"] = buchstab_series(s, tol);
  }
  return finish(report, o, "lambda", t0,
                "lambda_" + std::to_string(level) + "(" + fmtg(s) +
                    ") = " + fmt10(value));
}

int run_laplace(double t, double tol, const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const double value = dickman_laplace(t, tol);

  ExperimentReport report;
  report.experiment = "laplace";
  report.parameters = {{"t", t}, {"tol", tol}};
  report.points.push_back(
      make_deterministic_point("laplace t=" + fmtg(t), t, value, std::nullopt, 0.0));
  return finish(report, o, "laplace", t0,
                "laplace(" + fmtg(t) + ") = " + fmt10(value));
}

int run_mertens(const std::vector<int>& prime_counts, const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  int max_n = 3;
  for (int n : prime_counts) max_n = std::max(max_n, n);
  const auto table = build_prime_table(static_cast<std::size_t>(max_n));
  ExperimentReport report = run_mertens_check(table, prime_counts);
  const int last = prime_counts.back();
  const MertensRatios r = mertens_ratio(table, static_cast<std::size_t>(last));
  return finish(report, o, "mertens", t0,
                "C_N/(e^gamma log p_N) = " + fmt10(r.vs_log_pn) +
                    " at N=" + std::to_string(last));
}

int run_sample(int prime_count, std::optional<int> kfree_order,
               std::uint64_t samples, const CommonOpts& o) {
  if (samples == 0 || samples > 1'000'000) {
    throw std::invalid_argument("sample: --samples must lie in [1, 10^6]");
  }
  const auto table = build_prime_table(static_cast<std::size_t>(prime_count));
  const Measure measure(table, MeasureSpec{prime_count, kfree_order});

  RandomStream rng(o.seed, 0);
  FactoredInteger scratch;
  nlohmann::json rows = nlohmann::json::array();
  std::string csv = "index,log_n,ratio_pplus,ratio_pminus,n\n";
  KahanSum mean_log;
  char buf[160];
  for (std::uint64_t i = 0; i < samples; ++i) {
    measure.sample_into(rng, scratch);
    const double rp = ratio_to_largest_prime(table, scratch);
    const double rm = ratio_to_smallest_prime(table, scratch);
    mean_log.add(scratch.log_value);
    const std::string n_str = factorization_string(table, scratch);
    if (o.format == "json") {
      rows.push_back({{"index", i},
                      {"log_n", scratch.log_value},
                      {"ratio_pplus", rp},
                      {"ratio_pminus", rm},
                      {"n", n_str}});
    } else {
      std::snprintf(buf, sizeof(buf), "%llu,%.12g,%.12g,%.12g,%s\n",
                    static_cast<unsigned long long>(i), scratch.log_value, rp,
                    rm, n_str.c_str());
      csv += buf;
    }
  }
  const double mean = mean_log.value() / static_cast<double>(samples);

  std::string content;
  if (o.format == "json") {
    nlohmann::json j;
    j["experiment"] = "sample";
    j["parameters"] = {{"prime_count", prime_count},
                       {"kfree_order", kfree_order ? nlohmann::json(*kfree_order)
                                                   : nlohmann::json(nullptr)},
                       {"samples", samples}};
    j["seed"] = o.seed;
    j["samples"] = samples;
    j["mean_log_n"] = mean;
    if (!o.no_timestamp) j["timestamp"] = utc_timestamp();
    j["rows"] = std::move(rows);
    content = j.dump(2) + "\n";
  } else {
    content = csv;
  }
  const std::string path = output_path(o, "sample");
  write_text_once(path, content);
  std::printf("sampled %llu draws from P_%d%s: mean log n = %.6f  [wrote %s]\n",
              static_cast<unsigned long long>(samples), prime_count,
              kfree_order ? (" (" + std::to_string(*kfree_order) + "-free)").c_str()
                          : "",
              mean, path.c_str());
  return 0;
}

int run_exact_prob(int prime_count, std::optional<int> kfree_order,
                   unsigned long long value, const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto table = build_prime_table(static_cast<std::size_t>(prime_count));
  const Measure measure(table, MeasureSpec{prime_count, kfree_order});
  auto [factored, cofactor] = divide_out_primes(table, prime_count, value);
  if (cofactor != 1) {
    throw std::domain_error("exact-prob: " + std::to_string(value) +
                            " is not smooth over the first " +
                            std::to_string(prime_count) + " primes");
  }
  const double prob = measure.exact_probability_of(factored);

  ExperimentReport report;
  report.experiment = "exact-prob";
  report.parameters = {{"prime_count", prime_count},
                       {"kfree_order", kfree_order ? nlohmann::json(*kfree_order)
                                                   : nlohmann::json(nullptr)},
                       {"value", value}};
  report.points.push_back(make_deterministic_point(
      "P(" + std::to_string(value) + ")", static_cast<double>(value), prob,
      std::nullopt, 0.0));
  report.metrics["log_probability"] = measure.log_probability_of(factored);
  report.metrics["log_normalizer"] = measure.log_normalizer();
  char buf[96];
  std::snprintf(buf, sizeof(buf), "P(%llu) = %.10g", value, prob);
  return finish(report, o, "exact-prob", t0, buf);
}

int run_ratio_cdf(int prime_count, double s, const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto table = build_prime_table(static_cast<std::size_t>(prime_count));
  const double value = exact_ratio_cdf_piecewise(table, prime_count, s);

  ExperimentReport report;
  report.experiment = "ratio-cdf";
  report.parameters = {{"prime_count", prime_count}, {"s", s}};
  report.points.push_back(
      make_deterministic_point("F s=" + fmtg(s), s, value, std::nullopt, 0.0));
  return finish(report, o, "ratio-cdf", t0,
                "F_" + std::to_string(prime_count) + "(" + fmtg(s) +
                    ") = " + fmt10(value));
}

int run_census_smooth(unsigned long long limit, double s, const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(s >= 1.0 && s <= 64.0)) {
    throw std::invalid_argument("census-smooth: --s must lie in [1, 64]");
  }
  const auto sieve = build_factor_sieve(limit);
  const SmoothCensus census = census_smooth(sieve, s);
  const auto rho = build_dickman_table(std::max(20.0, std::ceil(s)), 1e-12);
  const double reference = dickman_rho(rho, s);

  ExperimentReport report;
  report.experiment = "census-smooth";
  report.parameters = {{"limit", limit}, {"s", s}};
  // Asymptotic references: informational, never flagged.
  report.points.push_back(make_deterministic_point("self-density s=" + fmtg(s), s,
                                                   census.self_density, reference,
                                                   0.0));
  report.points.push_back(make_deterministic_point("fixed-density s=" + fmtg(s), s,
                                                   census.fixed_density, reference,
                                                   0.0));
  report.metrics["self_count"] = static_cast<double>(census.self_count);
  report.metrics["fixed_count"] = static_cast<double>(census.fixed_count);
  return finish(report, o, "census-smooth", t0,
                "smooth density(s=" + fmtg(s) + ", X=" + std::to_string(limit) +
                    ") = " + fmt10(census.self_density) + " vs rho(s) = " +
                    fmt10(reference));
}

int run_census_rough(unsigned long long limit, double s, const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(s > 1.0 && s <= 64.0)) {
    throw std::invalid_argument("census-rough: --s must lie in (1, 64]");
  }
  const auto sieve = build_factor_sieve(limit);
  const RoughCensus census = census_rough(sieve, s);
  const auto vt = build_buchstab_table(std::max(12.0, std::ceil(s)), 1e-12);
  const double reference = vt.value(s);  // s * omega(s)
  const LogweightedRoughCensus lw = census_rough_logweighted(sieve, s, reference);

  ExperimentReport report;
  report.experiment = "census-rough";
  report.parameters = {{"limit", limit}, {"s", s}};
  report.points.push_back(make_deterministic_point(
      "normalized s=" + fmtg(s), s, census.normalized, reference, 0.0));
  report.points.push_back(make_deterministic_point(
      "logweighted-ratio s=" + fmtg(s), s, lw.ratio, 1.0, 0.0));
  report.metrics["count"] = static_cast<double>(census.count);
  report.metrics["logweighted_sum"] = lw.weighted_sum;
  return finish(report, o, "census-rough", t0,
                "rough normalized(s=" + fmtg(s) + ", X=" + std::to_string(limit) +
                    ") = " + fmt10(census.normalized) + " vs s*omega(s) = " +
                    fmt10(reference));
}

int run_census_kfree(unsigned long long limit, int order, const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const KfreeCensus census = census_kfree(limit, order);

  ExperimentReport report;
  report.experiment = "census-kfree";
  report.parameters = {{"limit", limit}, {"k", order}};
  report.points.push_back(make_deterministic_point("density k=" + std::to_string(order),
                                                   order, census.density,
                                                   census.reference, 0.0));
  report.metrics["count"] = static_cast<double>(census.count);
  return finish(report, o, "census-kfree", t0,
                "kfree density(k=" + std::to_string(order) + ", X=" +
                    std::to_string(limit) + ") = " + fmt10(census.density) +
                    " vs 1/zeta(k) = " + fmt10(census.reference));
}

int run_census_appendix(unsigned long long limit, unsigned long long prime,
                        int exponent, int order, const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const AppendixCensus census = census_appendix(limit, prime, exponent, order);

  ExperimentReport report;
  report.experiment = "census-appendix";
  report.parameters = {
      {"limit", limit}, {"p", prime}, {"l", exponent}, {"k", order}};
  report.points.push_back(make_deterministic_point(
      "conditional-density", static_cast<double>(prime), census.density,
      census.reference, 0.0));
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "P(p^l | n among %d-free, p=%llu, l=%d) = %.10f vs %.10f", order,
                prime, exponent, census.density, census.reference);
  return finish(report, o, "census-appendix", t0, buf);
}

int run_exp_dickman(const std::vector<int>& prime_counts, std::optional<int> kfree,
                    std::uint64_t samples, const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  int max_n = 3;
  for (int n : prime_counts) max_n = std::max(max_n, n);
  const auto table = build_prime_table(static_cast<std::size_t>(max_n));
  const auto rho = build_dickman_table(32.0, 1e-12);

  std::vector<MeasureSpec> specs;
  for (int n : prime_counts) specs.push_back({n, std::nullopt});
  if (kfree) {
    for (int n : prime_counts) specs.push_back({n, kfree});
  }
  ExperimentReport report = run_dickman_convergence(table, rho, specs, samples,
                                                    o.seed, o.threads);
  double final_ks = 0.0;
  for (const auto& p : report.points) {
    if (p.label.rfind("ks N=", 0) == 0) final_ks = p.estimate;
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "exp-dickman: last KS = %.6f", final_ks);
  return finish(report, o, "exp-dickman", t0, buf);
}

int run_exp_pplus(const std::vector<int>& prime_counts, std::uint64_t samples,
                  const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  int max_n = 3;
  for (int n : prime_counts) max_n = std::max(max_n, n);
  const auto table = build_prime_table(static_cast<std::size_t>(max_n));
  const auto rho = build_dickman_table(32.0, 1e-12);
  ExperimentReport report =
      run_ratio_pplus(table, rho, prime_counts, samples, o.seed, o.threads);
  double final_ks = 0.0;
  for (const auto& p : report.points) {
    if (p.label.rfind("ks N=", 0) == 0) final_ks = p.estimate;
  }
  char buf[96];
  std::snprintf(buf, sizeof(buf), "exp-pplus: last KS = %.6f", final_ks);
  return finish(report, o, "exp-pplus", t0, buf);
}

int run_exp_buchstab(const std::vector<int>& prime_counts,
                     const std::vector<double>& s_grid, std::uint64_t samples,
                     const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  int max_n = 3;
  for (int n : prime_counts) max_n = std::max(max_n, n);
  const auto table = build_prime_table(static_cast<std::size_t>(max_n));
  const auto vt = build_buchstab_table(12.0, 1e-12);
  ExperimentReport report = run_buchstab_profile(table, vt, prime_counts, s_grid,
                                                 samples, o.seed, o.threads);
  double worst_sigma = 0.0;
  for (const auto& p : report.points) {
    if (p.label.rfind("cdf ", 0) == 0) worst_sigma = std::max(worst_sigma, p.sigma);
  }
  char buf[112];
  std::snprintf(buf, sizeof(buf),
                "exp-buchstab: worst |MC - exact| = %.2f standard errors",
                worst_sigma);
  return finish(report, o, "exp-buchstab", t0, buf);
}

int run_exp_density(unsigned long long limit, int trials, const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport report = run_density_agreement(limit, trials, o.seed);
  char buf[96];
  std::snprintf(buf, sizeof(buf), "exp-density: max |census - limit| = %.6f",
                report.metrics.at("max_abs_error"));
  return finish(report, o, "exp-density", t0, buf);
}

int run_exp_gap(double s_max, double step, const CommonOpts& o) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(s_max >= 2.0 && s_max <= 64.0)) {
    throw std::invalid_argument("exp-gap: --s-max must lie in [2, 64]");
  }
  if (!(step >= 1e-3 && step <= 1.0)) {
    throw std::invalid_argument("exp-gap: --step must lie in [1e-3, 1]");
  }
  std::vector<double> grid;
  for (double s = 1.0; s <= s_max + 1e-12; s += step) grid.push_back(s);
  const auto rho = build_dickman_table(std::max(20.0, std::ceil(s_max) + 1.0), 1e-12);
  ExperimentReport report = run_smoothness_disagreement(rho, grid);
  char buf[128];
  std::snprintf(buf, sizeof(buf),
                "exp-gap: H(1) = %.2e, H'(e^gamma) = %.2e, max H = %.6f at s = %.2f",
                report.metrics.at("H_at_1"),
                report.metrics.at("derivative_at_exp_gamma"),
                report.metrics.at("max_H"), report.metrics.at("argmax_s"));
  return finish(report, o, "exp-gap", t0, buf);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "smoothprob: a probabilistic model of smooth integers, the Dickman and "
      "Buchstab functions, and census/Monte-Carlo verification of their "
      "classical limit laws"};
  app.require_subcommand(1);
  int rc = 0;

  // rho
  CommonOpts rho_o;
  double rho_s = 2.0, rho_tol = 1e-10;
  auto* rho_c = app.add_subcommand(
      "rho", "Dickman's function rho(s) from its delay equation x rho'(x) = -rho(x-1)");
  rho_c->add_option("--s", rho_s, "evaluation point, s >= 0")->required();
  rho_c->add_option("--tol", rho_tol, "table tolerance")->capture_default_str();
  add_output_opts(rho_c, &rho_o);
  rho_c->callback([&] { rc = run_rho(rho_s, rho_tol, rho_o); });

  // omega
  CommonOpts om_o;
  double om_s = 2.0, om_tol = 1e-10;
  auto* om_c = app.add_subcommand(
      "omega", "Buchstab's function omega(s) from (s omega(s))' = omega(s-1)");
  om_c->add_option("--s", om_s, "evaluation point, s >= 1")->required();
  om_c->add_option("--tol", om_tol, "table tolerance")->capture_default_str();
  add_output_opts(om_c, &om_o);
  om_c->callback([&] { rc = run_omega(om_s, om_tol, om_o); });

  // lambda
  CommonOpts la_o;
  int la_level = 2;
  double la_s = 3.0, la_tol = 1e-10;
  auto* la_c = app.add_subcommand(
      "lambda",
      "nested logarithmic integral Lambda_L(s); the partial sums over L "
      "reproduce s*omega(s) (Buchstab representation)");
  la_c->add_option("--L", la_level, "nesting level, 1 <= L <= 40")->required();
  la_c->add_option("--s", la_s, "evaluation point, s >= L")->required();
  la_c->add_option("--tol", la_tol, "march tolerance")->capture_default_str();
  add_output_opts(la_c, &la_o);
  la_c->callback([&] { rc = run_lambda(la_level, la_s, la_tol, la_o); });

  // laplace
  CommonOpts lp_o;
  double lp_t = 1.0, lp_tol = 1e-12;
  auto* lp_c = app.add_subcommand(
      "laplace",
      "Laplace transform of the Dickman distribution, "
      "exp(-int_0^1 (1-e^{-tx})/x dx)");
  lp_c->add_option("--t", lp_t, "transform argument, t >= 0")->required();
  lp_c->add_option("--tol", lp_tol, "quadrature tolerance")->capture_default_str();
  add_output_opts(lp_c, &lp_o);
  lp_c->callback([&] { rc = run_laplace(lp_t, lp_tol, lp_o); });

  // mertens
  CommonOpts me_o;
  std::vector<int> me_n = {100, 1000, 10000, 100000};
  auto* me_c = app.add_subcommand(
      "mertens",
      "Mertens' product C_N = prod (1-1/p_j)^{-1} against e^gamma log N, "
      "e^gamma log p_N, e^gamma H_N, and Mertens' second theorem");
  me_c->add_option("--n", me_n, "prime counts N")->capture_default_str();
  add_output_opts(me_c, &me_o);
  me_c->callback([&] { rc = run_mertens(me_n, me_o); });

  // sample
  CommonOpts sa_o;
  int sa_n = 100;
  int sa_k = 0;
  std::uint64_t sa_samples = 1000;
  auto* sa_c = app.add_subcommand(
      "sample",
      "draw random integers with independent geometric prime exponents "
      "(mass proportional to 1/n on the smooth integers)");
  sa_c->add_option("--n", sa_n, "prime count N >= 1")->required();
  sa_c->add_option("--k", sa_k, "condition on k-free (k >= 2; 0 = off)");
  sa_c->add_option("--samples", sa_samples, "number of draws")->capture_default_str();
  add_seed_opt(sa_c, &sa_o);
  add_output_opts(sa_c, &sa_o);
  sa_c->callback([&] {
    rc = run_sample(sa_n, sa_k > 0 ? std::optional<int>(sa_k) : std::nullopt,
                    sa_samples, sa_o);
  });

  // exact-prob
  CommonOpts ep_o;
  int ep_n = 100;
  int ep_k = 0;
  unsigned long long ep_value = 1;
  auto* ep_c = app.add_subcommand(
      "exact-prob",
      "exact probability of one integer under the smooth model: "
      "P(n) = 1/(C_N n), or its k-free truncation");
  ep_c->add_option("--n", ep_n, "prime count N >= 1")->required();
  ep_c->add_option("--k", ep_k, "condition on k-free (k >= 2; 0 = off)");
  ep_c->add_option("--value", ep_value, "the integer n")->required();
  add_output_opts(ep_c, &ep_o);
  ep_c->callback([&] {
    rc = run_exact_prob(ep_n, ep_k > 0 ? std::optional<int>(ep_k) : std::nullopt,
                        ep_value, ep_o);
  });

  // ratio-cdf
  CommonOpts rc_o;
  int rc_n = 3;
  double rc_s = 1.5;
  auto* rc_c = app.add_subcommand(
      "ratio-cdf",
      "exact CDF of log n / log p^-(n) under the smooth model "
      "(closed pieces for s < 3)");
  rc_c->add_option("--n", rc_n, "prime count N >= 1")->required();
  rc_c->add_option("--s", rc_s, "threshold, 1 <= s < 3")->required();
  add_output_opts(rc_c, &rc_o);
  rc_c->callback([&] { rc = run_ratio_cdf(rc_n, rc_s, rc_o); });

  // census-smooth
  CommonOpts cs_o;
  unsigned long long cs_x = 10'000'000ull;
  double cs_s = 2.0;
  auto* cs_c = app.add_subcommand(
      "census-smooth",
      "census of n <= X with p^+(n) <= n^{1/s} (and fixed threshold X^{1/s}) "
      "against the Dickman density rho(s)");
  cs_c->add_option("--x", cs_x, "census limit X")->capture_default_str();
  cs_c->add_option("--s", cs_s, "smoothness parameter s >= 1")->required();
  add_output_opts(cs_c, &cs_o);
  cs_c->callback([&] { rc = run_census_smooth(cs_x, cs_s, cs_o); });

  // census-rough
  CommonOpts cr_o;
  unsigned long long cr_x = 10'000'000ull;
  double cr_s = 2.0;
  auto* cr_c = app.add_subcommand(
      "census-rough",
      "census of n <= X with p^-(n) >= n^{1/s}, normalized by log X / X, "
      "against s*omega(s) (Buchstab), plus the 1/n-weighted variant");
  cr_c->add_option("--x", cr_x, "census limit X")->capture_default_str();
  cr_c->add_option("--s", cr_s, "roughness parameter s > 1")->required();
  add_output_opts(cr_c, &cr_o);
  cr_c->callback([&] { rc = run_census_rough(cr_x, cr_s, cr_o); });

  // census-kfree
  CommonOpts ck_o;
  unsigned long long ck_x = 10'000'000ull;
  int ck_k = 2;
  auto* ck_c = app.add_subcommand(
      "census-kfree", "density of k-free integers against 1/zeta(k)");
  ck_c->add_option("--x", ck_x, "census limit X")->capture_default_str();
  ck_c->add_option("--k", ck_k, "k-free order, k >= 2")->required();
  add_output_opts(ck_c, &ck_o);
  ck_c->callback([&] { rc = run_census_kfree(ck_x, ck_k, ck_o); });

  // census-appendix
  CommonOpts ca_o;
  unsigned long long ca_x = 10'000'000ull;
  unsigned long long ca_p = 3;
  int ca_l = 1, ca_k = 2;
  auto* ca_c = app.add_subcommand(
      "census-appendix",
      "among k-free n <= X, the fraction divisible by p^l against "
      "(p^-l - p^-k)/(1 - p^-k)");
  ca_c->add_option("--x", ca_x, "census limit X")->capture_default_str();
  ca_c->add_option("--p", ca_p, "prime p")->required();
  ca_c->add_option("--l", ca_l, "exponent l, 1 <= l < k")->required();
  ca_c->add_option("--k", ca_k, "k-free order")->required();
  add_output_opts(ca_c, &ca_o);
  ca_c->callback([&] { rc = run_census_appendix(ca_x, ca_p, ca_l, ca_k, ca_o); });

  // exp-dickman
  CommonOpts ed_o;
  std::vector<int> ed_n = {100, 1000, 10000, 100000};
  int ed_k = 0;
  std::uint64_t ed_samples = 1'000'000;
  auto* ed_c = app.add_subcommand(
      "exp-dickman",
      "Monte-Carlo convergence of log I / log N to the Dickman distribution "
      "(KS trend plus exact-mean cross-check)");
  ed_c->add_option("--n-grid", ed_n, "prime counts N")->capture_default_str();
  ed_c->add_option("--k", ed_k, "also run the k-free conditional (0 = off)");
  ed_c->add_option("--samples", ed_samples, "draws per N")->capture_default_str();
  add_seed_opt(ed_c, &ed_o);
  add_threads_opt(ed_c, &ed_o);
  add_output_opts(ed_c, &ed_o);
  ed_c->callback([&] {
    rc = run_exp_dickman(ed_n, ed_k > 0 ? std::optional<int>(ed_k) : std::nullopt,
                         ed_samples, ed_o);
  });

  // exp-pplus
  CommonOpts ep2_o;
  std::vector<int> ep2_n = {100, 1000, 10000, 100000};
  std::uint64_t ep2_samples = 1'000'000;
  auto* ep2_c = app.add_subcommand(
      "exp-pplus",
      "Monte-Carlo convergence of log n / log p^+(n) to the shifted Dickman "
      "law 1 - e^{-gamma} int_{s-1}^inf rho");
  ep2_c->add_option("--n-grid", ep2_n, "prime counts N")->capture_default_str();
  ep2_c->add_option("--samples", ep2_samples, "draws per N")->capture_default_str();
  add_seed_opt(ep2_c, &ep2_o);
  add_threads_opt(ep2_c, &ep2_o);
  add_output_opts(ep2_c, &ep2_o);
  ep2_c->callback([&] { rc = run_exp_pplus(ep2_n, ep2_samples, ep2_o); });

  // exp-buchstab
  CommonOpts eb_o;
  std::vector<int> eb_n = {1000, 10000, 100000};
  std::vector<double> eb_s = {1.25, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0};
  std::uint64_t eb_samples = 1'000'000;
  auto* eb_c = app.add_subcommand(
      "exp-buchstab",
      "Monte-Carlo CDF of log n / log p^-(n): exact closed-formula check for "
      "s < 3 and the normalized profile against s*omega(s)");
  eb_c->add_option("--n-grid", eb_n, "prime counts N")->capture_default_str();
  eb_c->add_option("--s-grid", eb_s, "thresholds s")->capture_default_str();
  eb_c->add_option("--samples", eb_samples, "draws per N")->capture_default_str();
  add_seed_opt(eb_c, &eb_o);
  add_threads_opt(eb_c, &eb_o);
  add_output_opts(eb_c, &eb_o);
  eb_c->callback([&] { rc = run_exp_buchstab(eb_n, eb_s, eb_samples, eb_o); });

  // exp-density
  CommonOpts de_o;
  unsigned long long de_limit = 10'000'000ull;
  int de_trials = 20;
  auto* de_c = app.add_subcommand(
      "exp-density",
      "natural-density censuses of events {beta_p >= m} within the k-free "
      "integers against the exact truncated-geometric limit");
  de_c->add_option("--limit", de_limit, "census limit X")->capture_default_str();
  de_c->add_option("--trials", de_trials, "random events")->capture_default_str();
  add_seed_opt(de_c, &de_o);
  add_output_opts(de_c, &de_o);
  de_c->callback([&] { rc = run_exp_density(de_limit, de_trials, de_o); });

  // exp-gap
  CommonOpts eg_o;
  double eg_smax = 12.0, eg_step = 0.05;
  auto* eg_c = app.add_subcommand(
      "exp-gap",
      "gap H(s) = e^{-gamma} int_{s-1}^inf rho - rho(s): nonnegative, zero at "
      "s = 1, stationary at s = e^gamma");
  eg_c->add_option("--s-max", eg_smax, "grid end")->capture_default_str();
  eg_c->add_option("--step", eg_step, "grid step")->capture_default_str();
  add_output_opts(eg_c, &eg_o);
  eg_c->callback([&] { rc = run_exp_gap(eg_smax, eg_step, eg_o); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ResourceError& e) {
    std::fprintf(stderr, "resource error: %s\n", e.what());
    return 3;
  } catch (const ToleranceError& e) {
    std::fprintf(stderr, "tolerance error: %s\n", e.what());
    return 4;
  } catch (const std::bad_alloc&) {
    std::fprintf(stderr, "resource error: out of memory\n");
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return 2;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return 2;
  }
  return rc;
}
