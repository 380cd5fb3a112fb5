#include "smoothprob/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <thread>

#include "smoothprob/numerics.hpp"
#include "smoothprob/oracle.hpp"
#include "smoothprob/rng.hpp"

namespace smoothprob {
namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::vector<std::size_t> batch_counts(std::size_t total, int batches) {
  std::vector<std::size_t> counts(batches, total / batches);
  for (std::size_t r = 0; r < total % batches; ++r) ++counts[r];
  return counts;
}

// Runs fn(0..batches-1), each call writing only its own preallocated slot;
// merging afterwards in index order keeps results thread-count independent.
template <class Fn>
void for_each_batch(int batches, int threads, Fn&& fn) {
  if (threads <= 1) {
    for (int b = 0; b < batches; ++b) fn(b);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int width = std::min(threads, batches);
  pool.reserve(width);
  for (int w = 0; w < width; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int b = next.fetch_add(1);
        if (b >= batches) return;
        fn(b);
      }
    });
  }
  for (auto& t : pool) t.join();
}

struct MeanStderr {
  double mean = 0.0;
  double stderr_value = 0.0;
};

MeanStderr batch_stats(const std::vector<double>& means) {
  const double b = static_cast<double>(means.size());
  KahanSum sum;
  for (double m : means) sum.add(m);
  const double mean = sum.value() / b;
  KahanSum ss;
  for (double m : means) {
    const double d = m - mean;
    ss.add(d * d);
  }
  return {mean, std::sqrt(ss.value() / (b * (b - 1.0)))};
}

// E[X] for one exponent: 1/(p-1) geometric, and with values truncated to
// {0..k-1}, (sum_{l=1}^{k-1} p^-l - (k-1) p^-k) / (1 - p^-k).
double expected_exponent(double p, std::optional<int> kfree_order) {
  if (!kfree_order) return 1.0 / (p - 1.0);
  const int k = *kfree_order;
  const double pk = std::pow(p, -static_cast<double>(k));
  const double geo = (1.0 / p - pk) / (1.0 - 1.0 / p);
  return (geo - (k - 1.0) * pk) / (1.0 - pk);
}

std::string spec_tag(const MeasureSpec& spec) {
  std::string tag = "N=" + std::to_string(spec.prime_count);
  if (spec.kfree_order) tag += " k=" + std::to_string(*spec.kfree_order);
  return tag;
}

void validate_prime_counts(const PrimeTable& table, const std::vector<int>& ns,
                           const char* who) {
  if (ns.empty()) {
    throw std::invalid_argument(std::string(who) + ": empty prime_count list");
  }
  for (int n : ns) {
    if (n < 3 || static_cast<std::size_t>(n) > table.size()) {
      throw std::invalid_argument(std::string(who) +
                                  ": prime_count outside [3, table size]");
    }
  }
}

nlohmann::json json_int_list(const std::vector<int>& v) {
  return nlohmann::json(v);
}

}  // namespace

double ks_statistic(const std::vector<double>& sorted_samples,
                    const std::function<double(double)>& cdf) {
  const std::size_t n = sorted_samples.size();
  if (n == 0) throw std::invalid_argument("ks_statistic: empty sample");
  const double inv = 1.0 / static_cast<double>(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i + 1 < n && sorted_samples[i] > sorted_samples[i + 1]) {
      throw std::invalid_argument("ks_statistic: sample must be sorted ascending");
    }
    const double f = cdf(sorted_samples[i]);
    const double lo = std::fabs(static_cast<double>(i) * inv - f);
    const double hi = std::fabs(static_cast<double>(i + 1) * inv - f);
    worst = std::max(worst, std::max(lo, hi));
  }
  return worst;
}

ExperimentReport run_dickman_convergence(const PrimeTable& table,
                                         const SpecialFunctionTable& rho,
                                         const std::vector<MeasureSpec>& specs,
                                         std::size_t samples, std::uint64_t seed,
                                         int threads) {
  if (specs.empty()) {
    throw std::invalid_argument("run_dickman_convergence: empty spec list");
  }
  if (samples < 10'000) {
    throw std::invalid_argument("run_dickman_convergence: needs >= 10^4 samples");
  }
  for (const auto& spec : specs) {
    if (spec.prime_count < 3 ||
        static_cast<std::size_t>(spec.prime_count) > table.size()) {
      throw std::invalid_argument(
          "run_dickman_convergence: prime_count outside [3, table size]");
    }
  }

  ExperimentReport report;
  report.experiment = "dickman-convergence";
  report.seed = seed;
  report.samples = samples;
  {
    nlohmann::json jspecs = nlohmann::json::array();
    for (const auto& spec : specs) {
      nlohmann::json js;
      js["prime_count"] = spec.prime_count;
      if (spec.kfree_order) {
        js["kfree_order"] = *spec.kfree_order;
      } else {
        js["kfree_order"] = nullptr;
      }
      jspecs.push_back(std::move(js));
    }
    report.parameters["specs"] = std::move(jspecs);
    report.parameters["samples"] = samples;
  }

  const auto counts = batch_counts(samples, kExperimentBatches);
  std::uint64_t stream = 0;
  for (const auto& spec : specs) {
    const Measure measure(table, spec);
    const int n = spec.prime_count;
    const double log_n = std::log(static_cast<double>(n));
    const double log_pn = table.log_prime(n);

    std::vector<std::vector<double>> stats(kExperimentBatches);
    std::vector<double> means(kExperimentBatches, 0.0);
    for_each_batch(kExperimentBatches, threads, [&](int b) {
      RandomStream rng(seed, stream + static_cast<std::uint64_t>(b));
      auto& out = stats[b];
      out.reserve(counts[b]);
      FactoredInteger scratch;
      KahanSum sum;
      for (std::size_t i = 0; i < counts[b]; ++i) {
        measure.sample_into(rng, scratch);
        const double stat = scratch.log_value / log_n;
        out.push_back(stat);
        sum.add(stat);
      }
      means[b] = sum.value() / static_cast<double>(counts[b]);
    });
    stream += kExperimentBatches;

    std::vector<double> pooled;
    pooled.reserve(samples);
    for (auto& batch : stats) pooled.insert(pooled.end(), batch.begin(), batch.end());
    std::sort(pooled.begin(), pooled.end());

    const auto limit_cdf = [&](double s) { return dickman_cdf(rho, s); };
    const double ks = ks_statistic(pooled, limit_cdf);
    const double rescale = log_n / log_pn;
    for (double& s : pooled) s *= rescale;
    const double ks_logp = ks_statistic(pooled, limit_cdf);

    // Exact finite-size mean of log I / log N: sum E[X_j] log p_j / log N.
    KahanSum mref;
    for (int j = 1; j <= n; ++j) {
      mref.add(expected_exponent(static_cast<double>(table.prime(j)),
                                 spec.kfree_order) *
               table.log_prime(j));
    }
    const double mean_ref = mref.value() / log_n;
    const MeanStderr ms = batch_stats(means);

    const std::string tag = spec_tag(spec);
    report.points.push_back(
        make_deterministic_point("ks " + tag, n, ks, std::nullopt, 0.0));
    report.points.push_back(
        make_deterministic_point("ks-logp " + tag, n, ks_logp, std::nullopt, 0.0));
    report.points.push_back(
        make_mc_point("mean " + tag, n, ms.mean, ms.stderr_value, mean_ref, true));
  }
  return report;
}

ExperimentReport run_ratio_pplus(const PrimeTable& table,
                                 const SpecialFunctionTable& rho,
                                 const std::vector<int>& prime_counts,
                                 std::size_t samples, std::uint64_t seed,
                                 int threads) {
  validate_prime_counts(table, prime_counts, "run_ratio_pplus");
  if (samples < 10'000) {
    throw std::invalid_argument("run_ratio_pplus: needs >= 10^4 samples");
  }

  ExperimentReport report;
  report.experiment = "ratio-pplus";
  report.seed = seed;
  report.samples = samples;
  report.parameters["prime_counts"] = json_int_list(prime_counts);
  report.parameters["samples"] = samples;

  // Limit law of log n / log p^+(n): 1 - e^{-gamma} int_{s-1}^inf rho.
  const auto limit_cdf = [&](double s) {
    return s < 1.0 ? 0.0 : 1.0 - dickman_tail(rho, s - 1.0);
  };
  const double survival2_limit = dickman_tail(rho, 1.0);

  const auto counts = batch_counts(samples, kExperimentBatches);
  std::uint64_t stream = 0;
  for (int n : prime_counts) {
    const Measure measure(table, MeasureSpec{n, std::nullopt});

    std::vector<std::vector<double>> stats(kExperimentBatches);
    std::vector<double> survival(kExperimentBatches, 0.0);
    for_each_batch(kExperimentBatches, threads, [&](int b) {
      RandomStream rng(seed, stream + static_cast<std::uint64_t>(b));
      auto& out = stats[b];
      out.reserve(counts[b]);
      FactoredInteger scratch;
      std::size_t hits = 0;
      for (std::size_t i = 0; i < counts[b]; ++i) {
        measure.sample_into(rng, scratch);
        const double stat = ratio_to_largest_prime(table, scratch);
        out.push_back(stat);
        if (stat >= 2.0) ++hits;
      }
      survival[b] = static_cast<double>(hits) / static_cast<double>(counts[b]);
    });
    stream += kExperimentBatches;

    std::vector<double> pooled;
    pooled.reserve(samples);
    for (auto& batch : stats) pooled.insert(pooled.end(), batch.begin(), batch.end());
    std::sort(pooled.begin(), pooled.end());
    const double ks = ks_statistic(pooled, limit_cdf);
    const MeanStderr ms = batch_stats(survival);

    const std::string tag = "N=" + std::to_string(n);
    report.points.push_back(
        make_deterministic_point("ks " + tag, n, ks, std::nullopt, 0.0));
    report.points.push_back(make_mc_point("survival2 " + tag, n, ms.mean,
                                          ms.stderr_value, survival2_limit,
                                          false));
  }
  return report;
}

ExperimentReport run_buchstab_profile(const PrimeTable& table,
                                      const SpecialFunctionTable& buchstab,
                                      const std::vector<int>& prime_counts,
                                      const std::vector<double>& s_grid,
                                      std::size_t samples, std::uint64_t seed,
                                      int threads) {
  validate_prime_counts(table, prime_counts, "run_buchstab_profile");
  if (samples < 1'000'000) {
    throw std::invalid_argument("run_buchstab_profile: needs >= 10^6 samples");
  }
  if (s_grid.empty()) {
    throw std::invalid_argument("run_buchstab_profile: empty s grid");
  }
  for (double s : s_grid) {
    if (!(s >= 1.0 && s <= buchstab.support_max())) {
      throw std::invalid_argument(
          "run_buchstab_profile: s outside [1, table support]");
    }
  }

  ExperimentReport report;
  report.experiment = "buchstab-profile";
  report.seed = seed;
  report.samples = samples;
  report.parameters["prime_counts"] = json_int_list(prime_counts);
  report.parameters["s_grid"] = nlohmann::json(s_grid);
  report.parameters["samples"] = samples;

  const auto counts = batch_counts(samples, kExperimentBatches);
  const std::size_t ns = s_grid.size();
  std::uint64_t stream = 0;
  for (int n : prime_counts) {
    const Measure measure(table, MeasureSpec{n, std::nullopt});
    const double log_n = std::log(static_cast<double>(n));
    const double profile_scale = log_n / (exp_neg_gamma() * std::log(log_n));

    std::vector<std::vector<double>> freq(kExperimentBatches,
                                          std::vector<double>(ns, 0.0));
    for_each_batch(kExperimentBatches, threads, [&](int b) {
      RandomStream rng(seed, stream + static_cast<std::uint64_t>(b));
      std::vector<std::size_t> hits(ns, 0);
      FactoredInteger scratch;
      for (std::size_t i = 0; i < counts[b]; ++i) {
        measure.sample_into(rng, scratch);
        const double stat = ratio_to_smallest_prime(table, scratch);
        for (std::size_t si = 0; si < ns; ++si) {
          if (stat <= s_grid[si]) ++hits[si];
        }
      }
      for (std::size_t si = 0; si < ns; ++si) {
        freq[b][si] =
            static_cast<double>(hits[si]) / static_cast<double>(counts[b]);
      }
    });
    stream += kExperimentBatches;

    const std::string tag = "N=" + std::to_string(n);
    std::vector<double> means(kExperimentBatches);
    for (std::size_t si = 0; si < ns; ++si) {
      for (int b = 0; b < kExperimentBatches; ++b) means[b] = freq[b][si];
      const MeanStderr ms = batch_stats(means);
      const double s = s_grid[si];
      const std::string at = tag + " s=" + fmt_double(s);

      std::optional<double> exact;
      if (s < 3.0) exact = exact_ratio_cdf_piecewise(table, n, s);
      report.points.push_back(make_mc_point("cdf " + at, s, ms.mean,
                                            ms.stderr_value, exact, true));
      report.points.push_back(make_mc_point(
          "profile " + at, s, ms.mean * profile_scale,
          ms.stderr_value * profile_scale, buchstab.value(s), false));
    }
  }
  return report;
}

ExperimentReport run_mertens_check(const PrimeTable& table,
                                   const std::vector<int>& prime_counts) {
  validate_prime_counts(table, prime_counts, "run_mertens_check");

  ExperimentReport report;
  report.experiment = "mertens-check";
  report.parameters["prime_counts"] = json_int_list(prime_counts);

  for (int n : prime_counts) {
    const MertensRatios r = mertens_ratio(table, static_cast<std::size_t>(n));
    KahanSum harmonic;
    for (int i = 1; i <= n; ++i) harmonic.add(1.0 / static_cast<double>(i));
    const double c_n = mertens_product(table, static_cast<std::size_t>(n));
    const double vs_harmonic = c_n / (exp_gamma() * harmonic.value());

    const std::string tag = "N=" + std::to_string(n);
    report.points.push_back(make_deterministic_point("ratio-logn " + tag, n,
                                                     r.vs_log_n, 1.0, 0.0));
    report.points.push_back(make_deterministic_point("ratio-logpn " + tag, n,
                                                     r.vs_log_pn, 1.0, 0.0));
    report.points.push_back(make_deterministic_point("ratio-harmonic " + tag, n,
                                                     vs_harmonic, 1.0, 0.0));
    report.points.push_back(make_deterministic_point(
        "second-theorem " + tag, n,
        mertens_second_check(table, static_cast<std::size_t>(n)),
        0.26149721284764278, 0.0));
  }
  return report;
}

ExperimentReport run_density_agreement(unsigned long long limit, int trials,
                                       std::uint64_t seed) {
  if (limit < 10'000 || limit > 100'000'000ull) {
    throw std::invalid_argument(
        "run_density_agreement: limit must lie in [10^4, 10^8]");
  }
  if (trials < 0 || trials > 1000) {
    throw std::invalid_argument("run_density_agreement: trials must lie in [0, 1000]");
  }

  ExperimentReport report;
  report.experiment = "density-agreement";
  report.seed = seed;
  report.parameters["limit"] = limit;
  report.parameters["trials"] = trials;

  struct Event {
    int order;
    std::vector<BetaFactor> factors;
  };
  std::vector<Event> events;
  // Canonical events first, then random ones over the first four primes.
  events.push_back({2, {}});
  events.push_back({2, {{2, 1}}});
  events.push_back({3, {{3, 2}}});
  events.push_back({3, {{2, 1}, {5, 2}}});

  RandomStream rng(seed, 0);
  const unsigned long long small_primes[4] = {2, 3, 5, 7};
  for (int t = 0; t < trials; ++t) {
    Event ev;
    ev.order = 2 + static_cast<int>(rng.next_u64() % 3);
    const int npick = static_cast<int>(rng.next_u64() % 3);
    std::vector<int> idx = {0, 1, 2, 3};
    for (int i = 0; i < npick; ++i) {
      const int j = i + static_cast<int>(rng.next_u64() % (4 - i));
      std::swap(idx[i], idx[j]);
      const int m = 1 + static_cast<int>(rng.next_u64() %
                                         static_cast<unsigned>(ev.order - 1));
      ev.factors.push_back({small_primes[idx[i]], m});
    }
    std::sort(ev.factors.begin(), ev.factors.end(),
              [](const BetaFactor& a, const BetaFactor& b) {
                return a.prime < b.prime;
              });
    events.push_back(std::move(ev));
  }

  double worst = 0.0;
  for (const Event& ev : events) {
    const ConditionalJointCensus census =
        census_joint_conditional(limit, ev.order, ev.factors);
    const double density =
        static_cast<double>(census.joint_count) / static_cast<double>(limit);
    const double reference =
        census.reference / std::riemann_zeta(static_cast<double>(ev.order));

    std::string label = "k=" + std::to_string(ev.order);
    for (const BetaFactor& f : ev.factors) {
      label += " " + std::to_string(f.prime) + "^" + std::to_string(f.exponent);
    }
    report.points.push_back(
        make_deterministic_point(label, ev.order, density, reference, 1e-2));
    worst = std::max(worst, std::fabs(density - reference));
  }
  report.metrics["max_abs_error"] = worst;
  return report;
}

ExperimentReport run_smoothness_disagreement(const SpecialFunctionTable& rho,
                                             const std::vector<double>& s_grid) {
  if (s_grid.empty()) {
    throw std::invalid_argument("run_smoothness_disagreement: empty s grid");
  }
  for (double s : s_grid) {
    if (!(s >= 1.0)) {
      throw std::invalid_argument("run_smoothness_disagreement: needs s >= 1");
    }
  }

  ExperimentReport report;
  report.experiment = "smoothness-disagreement";
  report.parameters["s_grid"] = nlohmann::json(s_grid);

  double best = -1.0;
  double best_s = 1.0;
  for (double s : s_grid) {
    const double h = density_gap(rho, s);
    PointEstimate point;
    point.label = "H s=" + fmt_double(s);
    point.parameter = s;
    point.estimate = h;
    point.flagged = h < -1e-12;  // H must be nonnegative
    report.points.push_back(std::move(point));
    if (h > best) {
      best = h;
      best_s = s;
    }
  }

  const double stationary = exp_gamma();
  const double delta = 1e-4;
  const double slope = (density_gap(rho, stationary + delta) -
                        density_gap(rho, stationary - delta)) /
                       (2.0 * delta);
  report.metrics["H_at_1"] = density_gap(rho, 1.0);
  report.metrics["argmax_s"] = best_s;
  report.metrics["max_H"] = best;
  report.metrics["derivative_at_exp_gamma"] = slope;
  return report;
}

}  // namespace smoothprob
