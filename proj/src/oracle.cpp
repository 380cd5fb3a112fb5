#include "smoothprob/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "smoothprob/errors.hpp"
#include "smoothprob/numerics.hpp"

namespace smoothprob {

namespace {

constexpr unsigned long long kSieveCap = 100'000'000ull;

bool is_prime_u64(unsigned long long n) {
  if (n < 2) return false;
  for (unsigned long long d = 2; d * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

std::optional<unsigned long long> checked_pow(unsigned long long base, int exponent,
                                              unsigned long long cap) {
  unsigned long long acc = 1;
  for (int i = 0; i < exponent; ++i) {
    if (acc > cap / base) return std::nullopt;
    acc *= base;
  }
  return acc;
}

void validate_distinct_factors(const std::vector<BetaFactor>& factors, int max_exponent) {
  for (std::size_t i = 0; i < factors.size(); ++i) {
    if (!is_prime_u64(factors[i].prime)) {
      throw std::invalid_argument("census factors: every base must be prime");
    }
    if (factors[i].exponent < 1) {
      throw std::invalid_argument("census factors: exponents must be >= 1");
    }
    if (max_exponent > 0 && factors[i].exponent >= max_exponent) {
      throw std::domain_error("census factors: exponent must be below the k-free order");
    }
    for (std::size_t j = i + 1; j < factors.size(); ++j) {
      if (factors[i].prime == factors[j].prime) {
        throw std::invalid_argument("census factors: primes must be distinct");
      }
    }
  }
}

}  // namespace

FactorSieve::FactorSieve(unsigned long long limit) : limit_(limit) {
  if (limit < 2) {
    throw std::invalid_argument("FactorSieve: limit must be >= 2");
  }
  if (limit > kSieveCap) {
    throw ResourceError("FactorSieve: limit capped at 1e8");
  }
  spf_.assign(limit + 1, 0);
  lpf_.assign(limit + 1, 0);
  std::vector<std::uint32_t> primes;
  for (unsigned long long i = 2; i <= limit; ++i) {
    if (spf_[i] == 0) {
      spf_[i] = static_cast<std::uint32_t>(i);
      lpf_[i] = static_cast<std::uint32_t>(i);
      primes.push_back(static_cast<std::uint32_t>(i));
    }
    for (const std::uint32_t p : primes) {
      if (p > spf_[i] || i * p > limit) break;
      spf_[i * p] = p;       // p <= every prime of i, so it is the smallest
      lpf_[i * p] = lpf_[i];
    }
  }
}

std::uint32_t FactorSieve::smallest_factor(unsigned long long n) const {
  if (n < 2 || n > limit_) {
    throw std::invalid_argument("FactorSieve: argument outside [2, limit]");
  }
  return spf_[n];
}

std::uint32_t FactorSieve::largest_factor(unsigned long long n) const {
  if (n < 2 || n > limit_) {
    throw std::invalid_argument("FactorSieve: argument outside [2, limit]");
  }
  return lpf_[n];
}

bool FactorSieve::is_prime(unsigned long long n) const {
  return smallest_factor(n) == n;
}

std::size_t FactorSieve::count_primes() const {
  std::size_t count = 0;
  for (unsigned long long n = 2; n <= limit_; ++n) {
    count += spf_[n] == n;
  }
  return count;
}

FactorSieve build_factor_sieve(unsigned long long limit) {
  return FactorSieve(limit);
}

int compare_pow(unsigned long long p, double s, unsigned long long n) {
  const double whole = std::round(s);
  if (s == whole && whole >= 1.0 && whole <= 64.0) {
    unsigned long long acc = 1;
    for (int i = 0; i < static_cast<int>(whole); ++i) {
      if (acc > n / p) return 1;  // acc*p already exceeds n and p^s only grows
      acc *= p;
    }
    return acc == n ? 0 : (acc < n ? -1 : 1);
  }
  const double doubled = std::round(2.0 * s);
  if (2.0 * s == doubled && doubled >= 1.0 && doubled <= 127.0) {
    const unsigned __int128 n2 = static_cast<unsigned __int128>(n) * n;
    unsigned __int128 acc = 1;
    for (int i = 0; i < static_cast<int>(doubled); ++i) {
      if (acc > n2 / p) return 1;
      acc *= p;
    }
    return acc == n2 ? 0 : (acc < n2 ? -1 : 1);
  }
  const long double lhs = static_cast<long double>(s) * logl(static_cast<long double>(p));
  const long double rhs = logl(static_cast<long double>(n));
  if (lhs == rhs) return 0;
  return lhs < rhs ? -1 : 1;
}

SmoothCensus census_smooth(const FactorSieve& sieve, double s) {
  if (!(s >= 1.0)) {
    throw std::invalid_argument("census_smooth: requires s >= 1");
  }
  const unsigned long long limit = sieve.limit();
  SmoothCensus out;
  out.limit = limit;
  out.s = s;
  out.self_count = 1;   // n = 1 is vacuously smooth
  out.fixed_count = 1;
  // largest prime p with p^s <= limit, so the fixed test is one compare
  unsigned long long lo = 1;
  unsigned long long hi = limit;
  while (lo < hi) {  // invariant: p^s <= limit for p <= lo ... binary search upper edge
    const unsigned long long mid = lo + (hi - lo + 1) / 2;
    if (compare_pow(mid, s, limit) <= 0) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  const unsigned long long fixed_threshold = lo;
  for (unsigned long long n = 2; n <= limit; ++n) {
    const unsigned long long big = sieve.largest_factor(n);
    out.self_count += compare_pow(big, s, n) <= 0;
    out.fixed_count += big <= fixed_threshold;
  }
  out.self_density = static_cast<double>(out.self_count) / static_cast<double>(limit);
  out.fixed_density = static_cast<double>(out.fixed_count) / static_cast<double>(limit);
  return out;
}

RoughCensus census_rough(const FactorSieve& sieve, double s) {
  if (!(s > 1.0)) {
    throw std::invalid_argument("census_rough: requires s > 1");
  }
  const unsigned long long limit = sieve.limit();
  RoughCensus out;
  out.limit = limit;
  out.s = s;
  for (unsigned long long n = 2; n <= limit; ++n) {
    out.count += compare_pow(sieve.smallest_factor(n), s, n) >= 0;
  }
  out.normalized = static_cast<double>(out.count) *
                   std::log(static_cast<double>(limit)) / static_cast<double>(limit);
  return out;
}

LogweightedRoughCensus census_rough_logweighted(const FactorSieve& sieve, double s,
                                                double reference_s_omega) {
  if (!(s > 1.0)) {
    throw std::invalid_argument("census_rough_logweighted: requires s > 1");
  }
  if (!(reference_s_omega > 0.0)) {
    throw std::invalid_argument("census_rough_logweighted: reference must be positive");
  }
  const unsigned long long limit = sieve.limit();
  KahanSum recip;
  for (unsigned long long n = 2; n <= limit; ++n) {
    if (compare_pow(sieve.smallest_factor(n), s, n) >= 0) {
      recip.add(1.0 / static_cast<double>(n));
    }
  }
  LogweightedRoughCensus out;
  out.limit = limit;
  out.s = s;
  const double log_limit = std::log(static_cast<double>(limit));
  out.weighted_sum = recip.value() / log_limit;
  out.reference = std::log(log_limit) * reference_s_omega / log_limit;
  out.ratio = out.weighted_sum / out.reference;
  return out;
}

std::vector<std::uint8_t> kth_power_marks(unsigned long long limit, int order) {
  if (limit < 1 || limit > kSieveCap) {
    throw std::invalid_argument("kth_power_marks: limit must lie in [1, 1e8]");
  }
  if (order < 2) {
    throw std::invalid_argument("kth_power_marks: order must be >= 2");
  }
  std::vector<std::uint8_t> marked(limit + 1, 0);
  // primes up to the order-th root of limit
  unsigned long long root = static_cast<unsigned long long>(
      std::pow(static_cast<double>(limit), 1.0 / order));
  while (checked_pow(root + 1, order, limit)) ++root;
  while (root >= 2 && !checked_pow(root, order, limit)) --root;
  if (root < 2) return marked;
  std::vector<std::uint8_t> composite(root + 1, 0);
  for (unsigned long long p = 2; p <= root; ++p) {
    if (composite[p]) continue;
    for (unsigned long long m = p * p; m <= root; m += p) composite[m] = 1;
    const unsigned long long pk = *checked_pow(p, order, limit);
    for (unsigned long long m = pk; m <= limit; m += pk) marked[m] = 1;
  }
  return marked;
}

KfreeCensus census_kfree(unsigned long long limit, int order) {
  const std::vector<std::uint8_t> marked = kth_power_marks(limit, order);
  KfreeCensus out;
  out.limit = limit;
  out.order = order;
  for (unsigned long long n = 1; n <= limit; ++n) {
    out.count += marked[n] == 0;
  }
  out.density = static_cast<double>(out.count) / static_cast<double>(limit);
  out.reference = 1.0 / std::riemann_zeta(static_cast<double>(order));
  return out;
}

AppendixCensus census_appendix(unsigned long long limit, unsigned long long prime,
                               int exponent, int order) {
  if (!is_prime_u64(prime)) {
    throw std::invalid_argument("census_appendix: first base must be prime");
  }
  if (order < 2) {
    throw std::invalid_argument("census_appendix: order must be >= 2");
  }
  if (exponent < 1 || exponent >= order) {
    throw std::domain_error("census_appendix: requires 1 <= exponent < order");
  }
  const std::vector<std::uint8_t> marked = kth_power_marks(limit, order);
  AppendixCensus out;
  out.limit = limit;
  out.prime = prime;
  out.exponent = exponent;
  out.order = order;
  for (unsigned long long n = 1; n <= limit; ++n) {
    out.kfree_count += marked[n] == 0;
  }
  if (const auto pl = checked_pow(prime, exponent, limit)) {
    for (unsigned long long n = *pl; n <= limit; n += *pl) {
      out.divisible_count += marked[n] == 0;
    }
  }
  out.density = static_cast<double>(out.divisible_count) /
                static_cast<double>(out.kfree_count);
  const double p = static_cast<double>(prime);
  out.reference = (std::pow(p, -exponent) - std::pow(p, -order)) /
                  (1.0 - std::pow(p, -order));
  return out;
}

BetaJointCensus census_beta_joint(unsigned long long limit,
                                  const std::vector<BetaFactor>& factors) {
  if (limit < 1) {
    throw std::invalid_argument("census_beta_joint: limit must be >= 1");
  }
  validate_distinct_factors(factors, 0);
  BetaJointCensus out;
  out.limit = limit;
  unsigned long long divisor = 1;
  bool fits = true;
  double log_reference = 0.0;
  for (const BetaFactor& f : factors) {
    log_reference -= f.exponent * std::log(static_cast<double>(f.prime));
    if (fits) {
      if (const auto scaled = checked_pow(f.prime, f.exponent, limit / divisor)) {
        divisor *= *scaled;
      } else {
        fits = false;  // divisor exceeds limit, so no n <= limit qualifies
      }
    }
  }
  out.count = fits ? limit / divisor : 0;
  out.density = static_cast<double>(out.count) / static_cast<double>(limit);
  out.reference = std::exp(log_reference);
  return out;
}

ConditionalJointCensus census_joint_conditional(unsigned long long limit, int order,
                                                const std::vector<BetaFactor>& factors) {
  if (order < 2) {
    throw std::invalid_argument("census_joint_conditional: order must be >= 2");
  }
  validate_distinct_factors(factors, order);
  const std::vector<std::uint8_t> marked = kth_power_marks(limit, order);
  ConditionalJointCensus out;
  out.limit = limit;
  out.order = order;
  for (unsigned long long n = 1; n <= limit; ++n) {
    out.kfree_count += marked[n] == 0;
  }
  unsigned long long divisor = 1;
  bool fits = true;
  double reference = 1.0;
  for (const BetaFactor& f : factors) {
    const double p = static_cast<double>(f.prime);
    reference *= (std::pow(p, -f.exponent) - std::pow(p, -order)) /
                 (1.0 - std::pow(p, -order));
    if (fits) {
      if (const auto scaled = checked_pow(f.prime, f.exponent, limit / divisor)) {
        divisor *= *scaled;
      } else {
        fits = false;
      }
    }
  }
  if (fits) {
    for (unsigned long long n = divisor; n <= limit; n += divisor) {
      out.joint_count += marked[n] == 0;
    }
  }
  out.density = static_cast<double>(out.joint_count) /
                static_cast<double>(out.kfree_count);
  out.reference = reference;
  return out;
}

}  // namespace smoothprob
