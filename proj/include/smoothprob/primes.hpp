#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace smoothprob {

// First N primes with the prefix aggregates every other module consumes.
// Prefix arrays have length N+1 and are 1-indexed by prime rank, so
// prefix_recip[a] is the sum over the first a primes and entry 0 is 0.
// All prefix sums are accumulated with compensated (Kahan) addition.
struct PrimeTable {
  std::vector<std::uint64_t> primes;             // p_1 .. p_N
  std::vector<double> log_primes;                // log p_j
  std::vector<double> prefix_recip;              // sum 1/p_j
  std::vector<double> prefix_recip_sq;           // sum 1/p_j^2
  std::vector<double> prefix_log_one_minus;      // sum log(1 - 1/p_j)

  std::size_t size() const { return primes.size(); }

  // 1-based rank accessors, j in [1, size()].
  std::uint64_t prime(std::size_t j) const { return primes[j - 1]; }
  double log_prime(std::size_t j) const { return log_primes[j - 1]; }
};

inline constexpr std::uint64_t kDefaultSieveLimit = 1ull << 28;

// Sieve of Eratosthenes, sized by the Rosser bound p_N < N(log N + log log N)
// for N >= 6.  Throws ResourceError when the required sieve exceeds
// max_sieve_limit, std::invalid_argument for count == 0.
PrimeTable build_prime_table(std::size_t count,
                             std::uint64_t max_sieve_limit = kDefaultSieveLimit);

// C_n = prod_{j<=n} (1 - 1/p_j)^{-1}, evaluated in log space.  C_0 = 1.
double mertens_product(const PrimeTable& table, std::size_t n);

struct MertensRatios {
  double vs_log_n;    // C_n / (e^gamma log n)
  double vs_log_pn;   // C_n / (e^gamma log p_n)
};

// Both normalizations of the Mertens product limit; requires n >= 2.
MertensRatios mertens_ratio(const PrimeTable& table, std::size_t n);

// sum_{j<=n} 1/p_j - log log p_n, which approaches the Mertens constant
// 0.26149721...; requires n >= 2.
double mertens_second_check(const PrimeTable& table, std::size_t n);

}  // namespace smoothprob
