#include "smoothprob/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smoothprob/errors.hpp"
#include "smoothprob/numerics.hpp"

namespace smoothprob {

int FactoredInteger::exponent_of(int prime_index) const {
  const auto it = std::lower_bound(
      exponents.begin(), exponents.end(), prime_index,
      [](const std::pair<int, int>& entry, int index) { return entry.first < index; });
  return (it != exponents.end() && it->first == prime_index) ? it->second : 0;
}

Measure::Measure(const PrimeTable& table, MeasureSpec spec)
    : table_(&table), spec_(spec) {
  if (spec_.prime_count < 1) {
    throw std::invalid_argument("Measure: prime_count must be >= 1");
  }
  if (static_cast<std::size_t>(spec_.prime_count) > table.size()) {
    throw std::invalid_argument("Measure: prime table does not cover prime_count");
  }
  if (spec_.kfree_order && *spec_.kfree_order < 2) {
    throw std::invalid_argument("Measure: kfree_order must be >= 2");
  }
  const int n = spec_.prime_count;
  hit_prefix_.assign(n + 1, 0.0);
  KahanSum acc;
  for (int j = 1; j <= n; ++j) {
    const double p = static_cast<double>(table.prime(j));
    double log_zero = std::log1p(-1.0 / p);  // log P(X_j = 0)
    if (spec_.kfree_order) {
      log_zero -= std::log1p(-std::pow(p, -static_cast<double>(*spec_.kfree_order)));
    }
    acc.add(-log_zero);
    hit_prefix_[j] = acc.value();
  }
  // P(n) = exp(-log n) * prod P(X_j = 0), so the normalizer is the full prefix.
  log_normalizer_ = hit_prefix_[n];
}

void Measure::validate_member(const FactoredInteger& n) const {
  int prev = 0;
  for (const auto& [index, exponent] : n.exponents) {
    if (index <= prev || index > spec_.prime_count) {
      throw std::domain_error("Measure: prime index out of the measure's support");
    }
    if (exponent < 1) {
      throw std::domain_error("Measure: factorization exponents must be >= 1");
    }
    if (spec_.kfree_order && exponent >= *spec_.kfree_order) {
      throw std::domain_error("Measure: integer is not k-free under the conditional measure");
    }
    prev = index;
  }
}

double Measure::log_probability_of(const FactoredInteger& n) const {
  validate_member(n);
  KahanSum log_n;
  for (const auto& [index, exponent] : n.exponents) {
    log_n.add(exponent * table_->log_prime(index));
  }
  return -log_n.value() - log_normalizer_;
}

double Measure::exact_probability_of(const FactoredInteger& n) const {
  return std::exp(log_probability_of(n));
}

int Measure::sample_positive_exponent(RandomStream& rng, int index) const {
  const double log_p = table_->log_prime(index);
  if (!spec_.kfree_order) {
    // geometric tail: P(X >= 1 + t | X >= 1) = p^{-t}
    return 1 + static_cast<int>(rng.next_exponential() / log_p);
  }
  const int k = *spec_.kfree_order;
  if (k == 2) return 1;
  // inversion of the truncated geometric on {1, .., k-1}
  const double c = -std::expm1(-static_cast<double>(k - 1) * log_p);
  const double a = -std::log1p(-rng.next_unit() * c) / log_p;
  const int y = static_cast<int>(std::ceil(a)) - 1;
  return 1 + std::clamp(y, 0, k - 2);
}

void Measure::sample_into(RandomStream& rng, FactoredInteger& out) const {
  out.exponents.clear();
  const int n = spec_.prime_count;
  KahanSum log_value;
  int cur = 0;
  double position = 0.0;
  for (;;) {
    // Exponential race over -log P(X_j = 0): the next index with a nonzero
    // exponent is the first j > cur whose prefix passes the arrival point.
    position += rng.next_exponential();
    const auto begin = hit_prefix_.begin();
    const auto it = std::lower_bound(begin + cur + 1, begin + n + 1, position);
    if (it == begin + n + 1) break;
    const int j = static_cast<int>(it - begin);
    const int e = sample_positive_exponent(rng, j);
    out.exponents.emplace_back(j, e);
    log_value.add(e * table_->log_prime(j));
    cur = j;
    position = hit_prefix_[j];
    if (cur == n) break;
  }
  out.log_value = log_value.value();
  out.min_prime_index = out.exponents.empty() ? 0 : out.exponents.front().first;
  out.max_prime_index = out.exponents.empty() ? 0 : out.exponents.back().first;
}

FactoredInteger Measure::sample(RandomStream& rng) const {
  FactoredInteger out;
  sample_into(rng, out);
  return out;
}

namespace {

struct SmoothEnumerator {
  const PrimeTable* table = nullptr;
  int n = 0;
  unsigned long long bound = 1;
  int kfree = 0;  // 0 = unbounded exponents
  std::size_t cap = 0;
  std::size_t count = 0;
  const std::function<void(unsigned long long, const FactoredInteger&)>* visit = nullptr;
  FactoredInteger scratch;

  void emit(unsigned long long value, double log_value) {
    if (++count > cap) {
      throw ResourceError("enumerate_smooth: result cap exceeded");
    }
    scratch.log_value = log_value;
    scratch.min_prime_index = scratch.exponents.empty() ? 0 : scratch.exponents.front().first;
    scratch.max_prime_index = scratch.exponents.empty() ? 0 : scratch.exponents.back().first;
    (*visit)(value, scratch);
  }

  void dfs(int start, unsigned long long value, double log_value) {
    emit(value, log_value);
    for (int i = start; i <= n; ++i) {
      const unsigned long long p = table->prime(i);
      if (value > bound / p) break;  // primes increase, so no later i fits
      const double log_p = table->log_prime(i);
      unsigned long long v = value * p;
      int e = 1;
      for (;;) {
        if (kfree != 0 && e >= kfree) break;
        scratch.exponents.emplace_back(i, e);
        dfs(i + 1, v, log_value + e * log_p);
        scratch.exponents.pop_back();
        if (v > bound / p) break;
        v *= p;
        ++e;
      }
    }
  }
};

}  // namespace

void enumerate_smooth(
    const PrimeTable& table, int prime_count, unsigned long long bound,
    std::optional<int> kfree_order, std::size_t cap,
    const std::function<void(unsigned long long, const FactoredInteger&)>& visit) {
  if (prime_count < 1 || static_cast<std::size_t>(prime_count) > table.size()) {
    throw std::invalid_argument("enumerate_smooth: prime_count outside the table");
  }
  if (bound < 1) {
    throw std::invalid_argument("enumerate_smooth: bound must be >= 1");
  }
  if (kfree_order && *kfree_order < 2) {
    throw std::invalid_argument("enumerate_smooth: kfree_order must be >= 2");
  }
  if (cap < 1) {
    throw std::invalid_argument("enumerate_smooth: cap must be >= 1");
  }
  SmoothEnumerator en;
  en.table = &table;
  en.n = prime_count;
  en.bound = bound;
  en.kfree = kfree_order.value_or(0);
  en.cap = cap;
  en.visit = &visit;
  en.dfs(1, 1, 0.0);
}

std::vector<unsigned long long> enumerate_smooth_values(
    const PrimeTable& table, int prime_count, unsigned long long bound,
    std::optional<int> kfree_order, std::size_t cap) {
  std::vector<unsigned long long> values;
  enumerate_smooth(table, prime_count, bound, kfree_order, cap,
                   [&values](unsigned long long value, const FactoredInteger&) {
                     values.push_back(value);
                   });
  std::sort(values.begin(), values.end());
  return values;
}

ProbabilityInterval exact_event_probability(
    const Measure& measure,
    const std::function<bool(unsigned long long, const FactoredInteger&)>& predicate,
    unsigned long long bound, double rankin_delta, std::size_t cap) {
  if (!(rankin_delta > 0.0 && rankin_delta < 1.0)) {
    throw std::invalid_argument("exact_event_probability: rankin_delta must lie in (0, 1)");
  }
  const PrimeTable& table = measure.table();
  KahanSum recip;
  enumerate_smooth(table, measure.prime_count(), bound, measure.spec().kfree_order,
                   cap, [&](unsigned long long value, const FactoredInteger& n) {
                     if (predicate(value, n)) {
                       recip.add(1.0 / static_cast<double>(value));
                     }
                   });
  const double scale = std::exp(-measure.log_normalizer());

  // All mass beyond bound is conceded to the event, bounded by Rankin's
  // tilt: sum_{n > bound} 1/n <= bound^{-delta} prod_j sum_l p_j^{l(delta-1)}.
  const double dm1 = rankin_delta - 1.0;
  KahanSum log_tilt;
  for (int j = 1; j <= measure.prime_count(); ++j) {
    const double log_p = table.log_prime(j);
    log_tilt.add(-std::log1p(-std::exp(dm1 * log_p)));
    if (measure.spec().kfree_order) {
      log_tilt.add(std::log1p(
          -std::exp(static_cast<double>(*measure.spec().kfree_order) * dm1 * log_p)));
    }
  }
  const double tail = scale * std::exp(log_tilt.value() -
                                       rankin_delta * std::log(static_cast<double>(bound)));
  const double lower = scale * recip.value();
  return {lower, lower + tail};
}

double exact_ratio_cdf_piecewise(const PrimeTable& table, int prime_count, double s) {
  if (prime_count < 2 || static_cast<std::size_t>(prime_count) > table.size()) {
    throw std::invalid_argument(
        "exact_ratio_cdf_piecewise: needs 2 <= prime_count <= table size");
  }
  if (!(s >= 1.0)) {
    throw std::invalid_argument("exact_ratio_cdf_piecewise: requires s >= 1");
  }
  if (s >= 3.0) {
    throw std::out_of_range(
        "exact_ratio_cdf_piecewise: closed pieces stop below s = 3");
  }
  const int n = prime_count;
  double sum = 1.0 + table.prefix_recip[n];  // n = 1 (ratio 0) and the primes
  if (s >= 2.0) {
    sum += table.prefix_recip_sq[n];  // prime squares sit exactly at ratio 2
    // pairs p_a * p_l with a < l and p_l <= p_a^{s-1}
    KahanSum pairs;
    const auto end = table.primes.begin() + n;
    for (int a = 1; a <= n; ++a) {
      const long double threshold =
          powl(static_cast<long double>(table.prime(a)), static_cast<long double>(s - 1.0));
      const auto it = std::upper_bound(
          table.primes.begin(), end, threshold,
          [](long double t, std::uint64_t p) { return t < static_cast<long double>(p); });
      const int top = static_cast<int>(it - table.primes.begin());
      if (top > a) {
        pairs.add((table.prefix_recip[top] - table.prefix_recip[a]) /
                  static_cast<double>(table.prime(a)));
      }
    }
    sum += pairs.value();
  }
  return std::exp(table.prefix_log_one_minus[n]) * sum;
}

double perpetuity_sample(RandomStream& rng) {
  // Forward expansion D = sum_k U_1..U_k: the prefix product bounds the
  // whole truncated tail, so stopping below 1e-12 adds O(1e-12) bias.
  // (Stopping the backward iteration d <- u(1+d) on the same running
  // product would size-bias the outermost factor and halve the mean.)
  double d = 0.0;
  double prefix = 1.0;
  do {
    prefix *= rng.next_unit();
    d += prefix;
  } while (prefix >= 1e-12);
  return d;
}

std::vector<ConditionalAtom> exact_conditional_distribution(
    const PrimeTable& table, int prime_count, int kfree_order, std::size_t cap) {
  if (prime_count < 1 || prime_count > 20 ||
      static_cast<std::size_t>(prime_count) > table.size()) {
    throw std::invalid_argument(
        "exact_conditional_distribution: prime_count must lie in [1, 20] within the table");
  }
  if (kfree_order < 2) {
    throw std::invalid_argument("exact_conditional_distribution: kfree_order must be >= 2");
  }
  std::size_t total = 1;
  for (int j = 0; j < prime_count; ++j) {
    if (total > cap / static_cast<std::size_t>(kfree_order)) {
      throw ResourceError("exact_conditional_distribution: support exceeds cap");
    }
    total *= static_cast<std::size_t>(kfree_order);
  }

  // weight[j][l] = P(X_j = l) for the truncated geometric
  std::vector<std::vector<double>> weight(prime_count);
  for (int j = 0; j < prime_count; ++j) {
    const double p = static_cast<double>(table.prime(j + 1));
    std::vector<double>& w = weight[j];
    w.resize(kfree_order);
    w[0] = std::exp(std::log1p(-1.0 / p) -
                    std::log1p(-std::pow(p, -static_cast<double>(kfree_order))));
    for (int l = 1; l < kfree_order; ++l) w[l] = w[l - 1] / p;
  }

  std::vector<ConditionalAtom> atoms;
  atoms.reserve(total);
  std::vector<int> exponent(prime_count, 0);
  for (std::size_t idx = 0; idx < total; ++idx) {
    ConditionalAtom atom;
    double probability = 1.0;
    KahanSum log_value;
    for (int j = 0; j < prime_count; ++j) {
      probability *= weight[j][exponent[j]];
      if (exponent[j] > 0) {
        atom.n.exponents.emplace_back(j + 1, exponent[j]);
        log_value.add(exponent[j] * table.log_prime(j + 1));
      }
    }
    atom.n.log_value = log_value.value();
    atom.n.min_prime_index = atom.n.exponents.empty() ? 0 : atom.n.exponents.front().first;
    atom.n.max_prime_index = atom.n.exponents.empty() ? 0 : atom.n.exponents.back().first;
    atom.probability = probability;
    atoms.push_back(std::move(atom));
    for (int j = 0; j < prime_count; ++j) {  // odometer increment
      if (++exponent[j] < kfree_order) break;
      exponent[j] = 0;
    }
  }
  return atoms;
}

std::pair<FactoredInteger, unsigned long long> divide_out_primes(
    const PrimeTable& table, int prime_count, unsigned long long n) {
  if (n == 0) {
    throw std::invalid_argument("divide_out_primes: n must be >= 1");
  }
  if (prime_count < 1 || static_cast<std::size_t>(prime_count) > table.size()) {
    throw std::invalid_argument("divide_out_primes: prime_count outside the table");
  }
  FactoredInteger f;
  KahanSum log_value;
  unsigned long long rem = n;
  for (int j = 1; j <= prime_count && rem > 1; ++j) {
    const unsigned long long p = table.prime(j);
    if (p > rem) break;
    int e = 0;
    while (rem % p == 0) {
      rem /= p;
      ++e;
    }
    if (e > 0) {
      f.exponents.emplace_back(j, e);
      log_value.add(e * table.log_prime(j));
    }
  }
  f.log_value = log_value.value();
  f.min_prime_index = f.exponents.empty() ? 0 : f.exponents.front().first;
  f.max_prime_index = f.exponents.empty() ? 0 : f.exponents.back().first;
  return {f, rem};
}

double ratio_to_largest_prime(const PrimeTable& table, const FactoredInteger& n) {
  if (n.is_one()) return 0.0;
  return n.log_value / table.log_prime(n.max_prime_index);
}

double ratio_to_smallest_prime(const PrimeTable& table, const FactoredInteger& n) {
  if (n.is_one()) return 0.0;
  return n.log_value / table.log_prime(n.min_prime_index);
}

}  // namespace smoothprob
