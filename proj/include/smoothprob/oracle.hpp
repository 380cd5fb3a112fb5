#pragma once

#include <cstdint>
#include <vector>

namespace smoothprob {

// Smallest and largest prime factor of every n in [2, limit], built by a
// linear sieve (each composite is visited once, through its smallest prime).
class FactorSieve {
 public:
  explicit FactorSieve(unsigned long long limit);

  unsigned long long limit() const { return limit_; }

  // n must lie in [2, limit]; throws std::invalid_argument otherwise.
  std::uint32_t smallest_factor(unsigned long long n) const;
  std::uint32_t largest_factor(unsigned long long n) const;
  bool is_prime(unsigned long long n) const;

  std::size_t count_primes() const;

 private:
  unsigned long long limit_;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint32_t> lpf_;
};

// Sieve limit is capped at 1e8 (two 4-byte arrays); beyond that throws
// ResourceError.
FactorSieve build_factor_sieve(unsigned long long limit);

// Sign of p^s - n, exact when s is an integer (64-bit power ladder) or a
// half-integer (128-bit comparison of p^{2s} with n^2); long double logs
// otherwise.  Exactness matters because census thresholds sit on prime
// powers where rounded pow() misclassifies.
int compare_pow(unsigned long long p, double s, unsigned long long n);

struct SmoothCensus {
  unsigned long long limit = 0;
  double s = 1.0;
  unsigned long long self_count = 0;   // p+(n) <= n^{1/s}, n = 1 included
  unsigned long long fixed_count = 0;  // p+(n) <= limit^{1/s}, n = 1 included
  double self_density = 0.0;
  double fixed_density = 0.0;
};

// Counts n <= limit that are n^{1/s}-smooth (self threshold) and
// limit^{1/s}-smooth (the classical fixed-threshold count); both densities
// approach the Dickman value rho(s).
SmoothCensus census_smooth(const FactorSieve& sieve, double s);

struct RoughCensus {
  unsigned long long limit = 0;
  double s = 1.0;
  unsigned long long count = 0;  // p-(n) >= n^{1/s}, n >= 2
  double normalized = 0.0;       // count * log(limit) / limit, approaches s*omega(s)
};

RoughCensus census_rough(const FactorSieve& sieve, double s);

struct LogweightedRoughCensus {
  unsigned long long limit = 0;
  double s = 1.0;
  double weighted_sum = 0.0;  // (1/log limit) * sum of 1/n over the rough set
  double reference = 0.0;     // log log limit * reference_s_omega / log limit
  double ratio = 0.0;         // weighted_sum / reference
};

// The 1/n-weighted rough census; reference_s_omega supplies the target
// profile value s*omega(s) so this module stays independent of the tables.
LogweightedRoughCensus census_rough_logweighted(const FactorSieve& sieve, double s,
                                                double reference_s_omega);

// marked[n] = 1 iff some p^order divides n; index range [0, limit].
std::vector<std::uint8_t> kth_power_marks(unsigned long long limit, int order);

struct KfreeCensus {
  unsigned long long limit = 0;
  int order = 2;
  unsigned long long count = 0;
  double density = 0.0;
  double reference = 0.0;  // 1/zeta(order)
};

KfreeCensus census_kfree(unsigned long long limit, int order);

struct AppendixCensus {
  unsigned long long limit = 0;
  unsigned long long prime = 2;
  int exponent = 1;  // l
  int order = 2;     // k
  unsigned long long kfree_count = 0;
  unsigned long long divisible_count = 0;
  double density = 0.0;    // divisible / kfree
  double reference = 0.0;  // (p^-l - p^-k) / (1 - p^-k)
};

// Among the order-free n <= limit, the fraction divisible by prime^exponent;
// requires 1 <= exponent < order (domain error otherwise) and prime prime.
AppendixCensus census_appendix(unsigned long long limit, unsigned long long prime,
                               int exponent, int order);

struct BetaFactor {
  unsigned long long prime = 2;
  int exponent = 1;
};

struct BetaJointCensus {
  unsigned long long limit = 0;
  unsigned long long count = 0;
  double density = 0.0;
  double reference = 0.0;  // prod p^-m
};

// Exact count floor(limit / prod p^m) of n divisible by every p^m; primes
// must be distinct (parameter error otherwise).  An empty factor list gives
// density 1.
BetaJointCensus census_beta_joint(unsigned long long limit,
                                  const std::vector<BetaFactor>& factors);

struct ConditionalJointCensus {
  unsigned long long limit = 0;
  int order = 2;
  unsigned long long kfree_count = 0;
  unsigned long long joint_count = 0;
  double density = 0.0;    // joint / kfree
  double reference = 0.0;  // prod (p^-m - p^-k)/(1 - p^-k)
};

// Among the order-free n <= limit, the fraction divisible by every p^m;
// exponents must satisfy 1 <= m < order and primes must be distinct.
ConditionalJointCensus census_joint_conditional(unsigned long long limit, int order,
                                                const std::vector<BetaFactor>& factors);

}  // namespace smoothprob
