#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "smoothprob/model.hpp"
#include "smoothprob/primes.hpp"
#include "smoothprob/report.hpp"
#include "smoothprob/specfun.hpp"

namespace smoothprob {

// Standard errors come from batch means over this many independent streams;
// results are bit-identical for any thread count because each batch owns
// the stream keyed by its index and merges happen in index order.
inline constexpr int kExperimentBatches = 64;

// sup_i max(|i/n - F(x_i)|, |(i-1)/n - F(x_i)|); requires a nonempty,
// ascending sample.
double ks_statistic(const std::vector<double>& sorted_samples,
                    const std::function<double(double)>& cdf);

// KS of log I / log N against the Dickman distribution for each measure in
// specs, plus the sample mean against its exact finite-size expectation and
// a diagnostic KS with log p_N in the denominator.
ExperimentReport run_dickman_convergence(const PrimeTable& table,
                                         const SpecialFunctionTable& rho,
                                         const std::vector<MeasureSpec>& specs,
                                         std::size_t samples, std::uint64_t seed,
                                         int threads = 1);

// KS of log n / log p^+(n) against 1 - e^{-gamma} int_{s-1}^inf rho, with
// the survival probability at s = 2 tabulated against the limit value.
ExperimentReport run_ratio_pplus(const PrimeTable& table,
                                 const SpecialFunctionTable& rho,
                                 const std::vector<int>& prime_counts,
                                 std::size_t samples, std::uint64_t seed,
                                 int threads = 1);

// Monte-Carlo CDF of log n / log p^-(n) at each s, checked against the
// exact closed formulas for s < 3, plus the normalized profile
// estimate * log N / (e^{-gamma} log log N) against s*omega(s).
ExperimentReport run_buchstab_profile(const PrimeTable& table,
                                      const SpecialFunctionTable& buchstab,
                                      const std::vector<int>& prime_counts,
                                      const std::vector<double>& s_grid,
                                      std::size_t samples, std::uint64_t seed,
                                      int threads = 1);

// Deterministic table of the three Mertens-product normalizations
// C_N/(e^gamma log N), C_N/(e^gamma log p_N), C_N/(e^gamma H_N), and the
// second-theorem constant check.
ExperimentReport run_mertens_check(const PrimeTable& table,
                                   const std::vector<int>& prime_counts);

// Random events {beta_{p_j} >= m_j} intersected with the k-free set:
// census density over [1, limit] against the k-free limit value
// (1/zeta(k)) * prod (p^-m - p^-k)/(1 - p^-k), flagged beyond 1e-2.
ExperimentReport run_density_agreement(unsigned long long limit, int trials,
                                       std::uint64_t seed);

// H(s) = e^{-gamma} int_{s-1}^inf rho - rho(s) on the grid: nonnegative
// everywhere, zero at s = 1, stationary exactly at s = e^gamma.
ExperimentReport run_smoothness_disagreement(const SpecialFunctionTable& rho,
                                             const std::vector<double>& s_grid);

}  // namespace smoothprob
