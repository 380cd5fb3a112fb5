#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "smoothprob/primes.hpp"
#include "smoothprob/rng.hpp"

namespace smoothprob {

// A positive integer carried as its prime factorization over table indices:
// (index, exponent) pairs sorted by index, exponents >= 1.  Values can
// exceed any machine word; statistics only ever need exponents and logs.
struct FactoredInteger {
  std::vector<std::pair<int, int>> exponents;
  double log_value = 0.0;
  int min_prime_index = 0;  // index of the smallest prime factor, 0 for n = 1
  int max_prime_index = 0;  // index of the largest prime factor, 0 for n = 1

  bool is_one() const { return exponents.empty(); }
  int exponent_of(int prime_index) const;
};

// Random-integer law: prime_count independent geometric exponents, or the
// k-free conditional with exponents truncated to {0, .., kfree_order - 1}.
struct MeasureSpec {
  int prime_count = 1;
  std::optional<int> kfree_order;
};

// The probability measure giving n mass (1/normalizer)(1/n) on the smooth
// integers for the first prime_count primes, optionally conditioned on
// k-freeness.  Sampling walks the prime list by exponential skips, so a
// draw costs O(sum 1/p_j) index hits instead of prime_count variates.
class Measure {
 public:
  Measure(const PrimeTable& table, MeasureSpec spec);

  const MeasureSpec& spec() const { return spec_; }
  const PrimeTable& table() const { return *table_; }
  int prime_count() const { return spec_.prime_count; }

  // log of the normalizing constant: log C_N unconditioned, and the
  // conditional analogue log(C_N * prod(1 - p^-k)^-1 ...) when truncated;
  // in both cases P(n) = exp(-log n - log_normalizer()).
  double log_normalizer() const { return log_normalizer_; }

  double log_probability_of(const FactoredInteger& n) const;
  double exact_probability_of(const FactoredInteger& n) const;

  FactoredInteger sample(RandomStream& rng) const;
  void sample_into(RandomStream& rng, FactoredInteger& out) const;

 private:
  void validate_member(const FactoredInteger& n) const;
  int sample_positive_exponent(RandomStream& rng, int index) const;

  const PrimeTable* table_;
  MeasureSpec spec_;
  double log_normalizer_ = 0.0;
  // hit_prefix_[j] = -sum_{i<=j} log P(X_i = 0); the skip sampler places
  // exponential arrivals on this increasing scale and binary-searches them.
  std::vector<double> hit_prefix_;
};

// Depth-first enumeration (by nondecreasing prime index) of every smooth
// integer <= bound for the first prime_count primes, optionally k-free.
// The visitor receives the value and a scratch factorization valid only
// during the call.  Throws ResourceError past cap results.
void enumerate_smooth(
    const PrimeTable& table, int prime_count, unsigned long long bound,
    std::optional<int> kfree_order, std::size_t cap,
    const std::function<void(unsigned long long, const FactoredInteger&)>& visit);

// Convenience form collecting the values in increasing order.
std::vector<unsigned long long> enumerate_smooth_values(
    const PrimeTable& table, int prime_count, unsigned long long bound,
    std::optional<int> kfree_order = std::nullopt, std::size_t cap = 50'000'000);

struct ProbabilityInterval {
  double lower = 0.0;
  double upper = 0.0;
};

// Brackets P(predicate) by exact enumeration up to bound (lower) plus a
// Rankin-type tilted-product bound on all mass beyond bound (upper):
// sum_{n > bound} 1/n <= bound^{-delta} * prod_j sum_l p_j^{l(delta-1)}.
ProbabilityInterval exact_event_probability(
    const Measure& measure,
    const std::function<bool(unsigned long long, const FactoredInteger&)>& predicate,
    unsigned long long bound, double rankin_delta = 0.5,
    std::size_t cap = 50'000'000);

// Exact P(log n / log p^-(n) <= s) for the unconditioned measure, with the
// convention that n = 1 has ratio 0.  Closed pieces: on [1,2) only n = 1
// and primes qualify; at s = 2 the prime squares join; on (2,3) also
// n = p_a * p_l with p_l <= p_a^{s-1}.  s >= 3 would need triple sums and
// raises std::out_of_range (Monte Carlo covers it instead).
double exact_ratio_cdf_piecewise(const PrimeTable& table, int prime_count,
                                 double s);

// One draw of the perpetuity D = U(1 + D), via the series expansion
// D = U_1 + U_1 U_2 + U_1 U_2 U_3 + ..., truncated once the prefix product
// (which bounds the entire remaining tail) drops below 1e-12.
double perpetuity_sample(RandomStream& rng);

struct ConditionalAtom {
  FactoredInteger n;
  double probability = 0.0;
};

// The full finite support of the k-free conditional measure: one atom per
// exponent vector in {0..k-1}^prime_count.  Throws ResourceError when the
// support size k^prime_count exceeds cap.
std::vector<ConditionalAtom> exact_conditional_distribution(
    const PrimeTable& table, int prime_count, int kfree_order,
    std::size_t cap = std::size_t{1} << 22);

// Factorizes n over the first prime_count primes: the factored smooth part
// plus the remaining cofactor (1 exactly when n is smooth for the range).
std::pair<FactoredInteger, unsigned long long> divide_out_primes(
    const PrimeTable& table, int prime_count, unsigned long long n);

// Sample statistics: log n over the log of the largest (smallest) prime
// factor, with ratio 0 for n = 1.
double ratio_to_largest_prime(const PrimeTable& table, const FactoredInteger& n);
double ratio_to_smallest_prime(const PrimeTable& table, const FactoredInteger& n);

}  // namespace smoothprob
