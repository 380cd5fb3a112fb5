#include "smoothprob/primes.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "smoothprob/errors.hpp"
#include "smoothprob/numerics.hpp"

namespace smoothprob {

namespace {

std::uint64_t sieve_bound_for(std::size_t count) {
  if (count < 6) return 15;  // p_5 = 11
  const double n = static_cast<double>(count);
  const double bound = n * (std::log(n) + std::log(std::log(n)));
  return static_cast<std::uint64_t>(bound) + 16;
}

}  // namespace

PrimeTable build_prime_table(std::size_t count, std::uint64_t max_sieve_limit) {
  if (count == 0) throw std::invalid_argument("build_prime_table: count == 0");
  const std::uint64_t bound = sieve_bound_for(count);
  if (bound + 1 > max_sieve_limit) {
    throw ResourceError("build_prime_table: sieve limit " +
                        std::to_string(bound) + " exceeds budget " +
                        std::to_string(max_sieve_limit));
  }

  std::vector<std::uint8_t> composite(bound + 1, 0);
  PrimeTable table;
  table.primes.reserve(count);
  for (std::uint64_t p = 2; p <= bound && table.primes.size() < count; ++p) {
    if (composite[p]) continue;
    table.primes.push_back(p);
    for (std::uint64_t m = p * p; m <= bound; m += p) composite[m] = 1;
  }
  if (table.primes.size() < count) {
    // Rosser's bound guarantees this cannot happen; guard regardless.
    throw ResourceError("build_prime_table: sieve bound too small");
  }

  table.log_primes.reserve(count);
  table.prefix_recip.reserve(count + 1);
  table.prefix_recip_sq.reserve(count + 1);
  table.prefix_log_one_minus.reserve(count + 1);
  table.prefix_recip.push_back(0.0);
  table.prefix_recip_sq.push_back(0.0);
  table.prefix_log_one_minus.push_back(0.0);

  KahanSum recip, recip_sq, log_one_minus;
  for (std::uint64_t p : table.primes) {
    const double pd = static_cast<double>(p);
    table.log_primes.push_back(std::log(pd));
    recip.add(1.0 / pd);
    recip_sq.add(1.0 / (pd * pd));
    log_one_minus.add(std::log1p(-1.0 / pd));
    table.prefix_recip.push_back(recip.value());
    table.prefix_recip_sq.push_back(recip_sq.value());
    table.prefix_log_one_minus.push_back(log_one_minus.value());
  }
  return table;
}

double mertens_product(const PrimeTable& table, std::size_t n) {
  if (n > table.size()) {
    throw std::invalid_argument("mertens_product: n exceeds table size");
  }
  return std::exp(-table.prefix_log_one_minus[n]);
}

MertensRatios mertens_ratio(const PrimeTable& table, std::size_t n) {
  if (n < 2 || n > table.size()) {
    throw std::invalid_argument("mertens_ratio: need 2 <= n <= table size");
  }
  const double cn = mertens_product(table, n);
  const double eg = exp_gamma();
  return MertensRatios{
      cn / (eg * std::log(static_cast<double>(n))),
      cn / (eg * table.log_primes[n - 1]),
  };
}

double mertens_second_check(const PrimeTable& table, std::size_t n) {
  if (n < 2 || n > table.size()) {
    throw std::invalid_argument(
        "mertens_second_check: need 2 <= n <= table size");
  }
  return table.prefix_recip[n] - std::log(table.log_primes[n - 1]);
}

}  // namespace smoothprob
