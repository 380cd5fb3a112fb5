// Acceptance gate: 13 numbered criteria, one [PASS]/[FAIL] line each, with
// the measured values printed so a failing line is an analysis, not a shrug.
// Exit code = number of failing criteria.  --criterion N runs one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "smoothprob/experiments.hpp"
#include "smoothprob/model.hpp"
#include "smoothprob/numerics.hpp"
#include "smoothprob/oracle.hpp"
#include "smoothprob/primes.hpp"
#include "smoothprob/report.hpp"
#include "smoothprob/rng.hpp"
#include "smoothprob/specfun.hpp"

using namespace smoothprob;

namespace {

constexpr std::uint64_t kSeed = 271828;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string strf(const char* format, ...) {
  va_list args;
  va_start(args, format);
  char buf[1024];
  std::vsnprintf(buf, sizeof(buf), format, args);
  va_end(args);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

const PointEstimate* find_point(const ExperimentReport& r,
                                const std::string& label) {
  for (const auto& p : r.points) {
    if (p.label == label) return &p;
  }
  return nullptr;
}

// ---- criterion 1: Dickman table ------------------------------------------

Outcome criterion_1(int) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto rho = build_dickman_table(30.0, 1e-10);
  const double build_secs = seconds_since(t0);

  const double total_err = std::fabs(dickman_total_integral(rho) - exp_gamma());
  const double rho2_err = std::fabs(dickman_rho(rho, 2.0) - (1.0 - std::log(2.0)));
  bool envelope = true;
  double worst_ratio = 0.0;
  for (int i = 0; i <= 300; ++i) {
    const double s = 0.1 * i;
    const double v = dickman_rho(rho, s);
    const double cap = std::exp(-std::lgamma(s + 1.0));
    if (!(v > 0.0) || v > cap * (1.0 + 1e-9)) envelope = false;
    worst_ratio = std::max(worst_ratio, v / cap);
  }
  Outcome o;
  o.pass = total_err <= 1e-8 && rho2_err <= 1e-10 && envelope &&
           build_secs < 5.0;
  o.detail = strf(
      "|total - e^gamma| = %.2e (tol 1e-8), |rho(2) - (1-log 2)| = %.2e "
      "(tol 1e-10), 0 < rho <= 1/Gamma(s+1) on [0,30] %s (max ratio %.3f), "
      "build %.2fs (tol 5s)",
      total_err, rho2_err, envelope ? "holds" : "VIOLATED", worst_ratio,
      build_secs);
  return o;
}

// ---- criterion 2: Buchstab table ------------------------------------------

Outcome criterion_2(int) {
  const auto v = build_buchstab_table(12.0, 1e-12);
  const double limit_err = std::fabs(buchstab_omega(v, 10.0) - exp_neg_gamma());
  const double closed_err =
      std::fabs(buchstab_omega(v, 2.5) - (1.0 + std::log(1.5)) / 2.5);
  Outcome o;
  o.pass = limit_err <= 1e-6 && closed_err <= 1e-10;
  o.detail = strf(
      "|omega(10) - e^-gamma| = %.2e (tol 1e-6), "
      "|omega(2.5) - (1+log 1.5)/2.5| = %.2e (tol 1e-10)",
      limit_err, closed_err);
  return o;
}

// ---- criterion 3: nested-integral representation --------------------------

Outcome criterion_3(int) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto v = build_buchstab_table(12.0, 1e-12);
  double sup = 0.0;
  double sup_s = 1.0;
  for (int i = 10; i <= 120; ++i) {
    const double s = 0.1 * i;
    const double diff = std::fabs(v.value(s) - buchstab_series(s, 1e-10));
    if (diff > sup) {
      sup = diff;
      sup_s = s;
    }
  }
  const double secs = seconds_since(t0);
  Outcome o;
  o.pass = sup <= 1e-6 && secs < 30.0;
  o.detail = strf(
      "sup |s*omega(s) - sum Lambda_L(s)| = %.2e at s = %.1f on [1,12] "
      "grid 0.1 (tol 1e-6), %.2fs (tol 30s)",
      sup, sup_s, secs);
  return o;
}

// ---- criterion 4: Laplace transform ----------------------------------------

Outcome criterion_4(int) {
  const auto rho = build_dickman_table(30.0, 1e-10);
  double worst = 0.0;
  for (double t : {0.5, 1.0, 2.0}) {
    KahanSum integral;  // int_0^30 e^{-ts} rho(s) ds, one panel per unit
    for (int j = 0; j < 30; ++j) {
      integral.add(adaptive_simpson(
          [&](double s) { return std::exp(-t * s) * dickman_rho(rho, s); },
          static_cast<double>(j), static_cast<double>(j + 1), 1e-13));
    }
    const double reference = exp_neg_gamma() * integral.value();
    worst = std::max(worst, std::fabs(dickman_laplace(t) - reference));
  }
  Outcome o;
  o.pass = worst <= 1e-8;
  o.detail = strf(
      "max |laplace(t) - e^-gamma int e^{-ts} rho| = %.2e over "
      "t in {0.5, 1, 2} (tol 1e-8)",
      worst);
  return o;
}

// ---- criterion 5: goodness of fit of the sampler ---------------------------

Outcome criterion_5(int) {
  const auto table = build_prime_table(10);
  const Measure m(table, MeasureSpec{3, std::nullopt});
  const auto cells = enumerate_smooth_values(table, 3, 10'000);
  std::vector<double> expected(cells.size() + 1, 0.0);
  KahanSum covered;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto [f, cof] = divide_out_primes(table, 3, cells[i]);
    (void)cof;
    expected[i] = m.exact_probability_of(f);
    covered.add(expected[i]);
  }
  expected.back() = 1.0 - covered.value();  // everything above 10^4

  const std::size_t draws = 10'000'000;
  std::vector<std::uint64_t> counts(cells.size() + 1, 0);
  RandomStream rng(kSeed);
  FactoredInteger scratch;
  for (std::size_t i = 0; i < draws; ++i) {
    m.sample_into(rng, scratch);
    unsigned long long value = 1;
    bool over = false;
    for (auto [idx, e] : scratch.exponents) {
      const auto p = table.prime(idx);
      for (int rep = 0; rep < e && !over; ++rep) {
        value *= p;
        if (value > 10'000) over = true;
      }
      if (over) break;
    }
    if (over) {
      ++counts.back();
    } else {
      const auto it = std::lower_bound(cells.begin(), cells.end(), value);
      ++counts[static_cast<std::size_t>(it - cells.begin())];
    }
  }

  KahanSum chi2;
  double min_expected = 1e18;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double e = expected[i] * static_cast<double>(draws);
    const double d = static_cast<double>(counts[i]) - e;
    chi2.add(d * d / e);
    min_expected = std::min(min_expected, e);
  }
  const double dof = static_cast<double>(cells.size());
  const double p = chi_square_pvalue(chi2.value(), dof);
  Outcome o;
  o.pass = p >= 1e-3;
  o.detail = strf(
      "chi^2 = %.1f on %.0f dof over %zu cells + overflow, p = %.3g "
      "(gate 1e-3), min expected count %.0f, 10^7 draws",
      chi2.value(), dof, cells.size(), p, min_expected);
  return o;
}

// ---- criterion 6: Monte Carlo vs exact ratio CDF ---------------------------

Outcome criterion_6(int threads) {
  const auto table = build_prime_table(10'000);
  const auto v = build_buchstab_table(8.0, 1e-10);
  const auto r = run_buchstab_profile(table, v, {10'000}, {1.5, 2.5},
                                      10'000'000, kSeed, threads);
  const auto* a = find_point(r, "cdf N=10000 s=1.5");
  const auto* b = find_point(r, "cdf N=10000 s=2.5");
  Outcome o;
  if (!a || !b) {
    o.pass = false;
    o.detail = "cdf rows missing from the report";
    return o;
  }
  o.pass = !a->flagged && !b->flagged;
  o.detail = strf(
      "MC cdf vs exact formula at N = 10^4: sigma(s=1.5) = %.2f, "
      "sigma(s=2.5) = %.2f (gate 4 sigma, 10^7 draws)",
      a->sigma, b->sigma);
  return o;
}

// ---- criteria 7/8: KS convergence ------------------------------------------

std::string fmt_sequence(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out += strf(i + 1 < xs.size() ? "%.4f, " : "%.4f", xs[i]);
  }
  return out;
}

bool strictly_decreasing(const std::vector<double>& xs) {
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] < xs[i - 1])) return false;
  }
  return true;
}

Outcome criterion_7(int threads) {
  const auto table = build_prime_table(100'000);
  const auto rho = build_dickman_table(30.0, 1e-10);
  const std::vector<int> ns = {100, 1000, 10'000, 100'000};
  std::vector<MeasureSpec> specs;
  for (int n : ns) specs.push_back({n, std::nullopt});
  for (int n : ns) specs.push_back({n, 2});
  const auto r = run_dickman_convergence(table, rho, specs, 1'000'000, kSeed,
                                         threads);
  std::vector<double> plain, kfree;
  for (int n : ns) {
    plain.push_back(find_point(r, "ks N=" + std::to_string(n))->estimate);
    kfree.push_back(
        find_point(r, "ks N=" + std::to_string(n) + " k=2")->estimate);
  }
  const bool decreasing = strictly_decreasing(plain) && strictly_decreasing(kfree);
  const double final_ks = std::max(plain.back(), kfree.back());
  Outcome o;
  o.pass = decreasing && final_ks <= 0.05;
  o.detail = strf(
      "KS(log I / log N) over N = 10^2..10^5: [%s], k-free [%s]; "
      "decreasing %s; final %.4f vs gate 0.05 (the N-vs-p_N normalization "
      "gap keeps KS near |1 - log N / log p_N| ~ log log N / log N, so the "
      "gate needs astronomically large N)",
      fmt_sequence(plain).c_str(), fmt_sequence(kfree).c_str(),
      decreasing ? "yes" : "NO", final_ks);
  return o;
}

Outcome criterion_8(int threads) {
  const auto table = build_prime_table(100'000);
  const auto rho = build_dickman_table(30.0, 1e-10);
  const std::vector<int> ns = {100, 1000, 10'000, 100'000};
  const auto r = run_ratio_pplus(table, rho, ns, 1'000'000, kSeed, threads);
  std::vector<double> ks;
  for (int n : ns) {
    ks.push_back(find_point(r, "ks N=" + std::to_string(n))->estimate);
  }
  const bool decreasing = strictly_decreasing(ks);
  Outcome o;
  o.pass = decreasing && ks.back() <= 0.05;
  o.detail = strf(
      "KS(log n / log p^+(n)) over N = 10^2..10^5: [%s]; decreasing %s; "
      "final %.4f vs gate 0.05 (the limit CDF is approached at rate "
      "~1/log N; the gate would need N far beyond table range)",
      fmt_sequence(ks).c_str(), decreasing ? "yes" : "NO", ks.back());
  return o;
}

// ---- criterion 9: Buchstab profile drifts toward its limit -----------------

Outcome criterion_9(int threads) {
  const auto table = build_prime_table(100'000);
  const auto v = build_buchstab_table(8.0, 1e-10);
  const std::vector<int> ns = {1000, 10'000, 100'000};
  const auto r =
      run_buchstab_profile(table, v, ns, {2.0}, 1'000'000, kSeed, threads);
  std::vector<double> prof;
  for (int n : ns) {
    prof.push_back(
        find_point(r, "profile N=" + std::to_string(n) + " s=2")->estimate);
  }
  bool above = true;
  for (double e : prof) above = above && e > 1.0;
  std::vector<double> dist;
  for (double e : prof) dist.push_back(std::fabs(e - 1.0));
  const bool closing = strictly_decreasing(dist);
  Outcome o;
  o.pass = above && closing;
  o.detail = strf(
      "normalized profile at s = 2 over N = 10^3..10^5: [%s]; all above the "
      "limit value 1 %s, monotone toward it %s",
      fmt_sequence(prof).c_str(), above ? "yes" : "NO", closing ? "yes" : "NO");
  return o;
}

// ---- criterion 10: Mertens normalizations ----------------------------------

Outcome criterion_10(int) {
  const auto table = build_prime_table(100'000);
  const std::vector<int> ns = {100, 1000, 10'000, 100'000};
  const auto r = run_mertens_check(table, ns);
  std::vector<double> logn;
  for (int n : ns) {
    logn.push_back(find_point(r, "ratio-logn N=" + std::to_string(n))->estimate);
  }
  bool above = true;
  for (double e : logn) above = above && e > 1.0;
  const bool decreasing = strictly_decreasing(logn);
  const double pn_err =
      std::fabs(find_point(r, "ratio-logpn N=100000")->estimate - 1.0);
  Outcome o;
  o.pass = above && decreasing && pn_err <= 1e-3;
  o.detail = strf(
      "C_N / (e^gamma log N) over N = 10^2..10^5: [%s], decreasing %s, all "
      "> 1 %s; |C_N / (e^gamma log p_N) - 1| = %.2e at N = 10^5 (tol 1e-3)",
      fmt_sequence(logn).c_str(), decreasing ? "yes" : "NO",
      above ? "yes" : "NO", pn_err);
  return o;
}

// ---- criterion 11: integer censuses at 10^7 --------------------------------

Outcome criterion_11(int) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto sieve = build_factor_sieve(10'000'000ull);
  const auto rho = build_dickman_table(20.0, 1e-10);
  const auto v = build_buchstab_table(8.0, 1e-10);

  struct Sub {
    std::string text;
    bool pass;
  };
  std::vector<Sub> subs;

  for (auto [s, tol] : {std::pair{2.0, 0.05}, std::pair{3.0, 0.08}}) {
    const auto census = census_smooth(sieve, s);
    const double target = dickman_rho(rho, s);
    const double rel = census.self_density / target - 1.0;
    subs.push_back({strf("smooth s=%.0f rel %+.1f%% (tol %.0f%%)", s,
                         100.0 * rel, 100.0 * tol),
                    std::fabs(rel) <= tol});
  }
  for (double s : {2.0, 3.0}) {
    const auto census = census_rough(sieve, s);
    const double rel = census.normalized / v.value(s) - 1.0;
    subs.push_back(
        {strf("rough s=%.0f rel %+.1f%% (tol 10%%)", s, 100.0 * rel),
         std::fabs(rel) <= 0.10});
  }
  for (int k : {2, 3}) {
    const auto census = census_kfree(10'000'000ull, k);
    const double err = std::fabs(census.density - census.reference);
    subs.push_back({strf("kfree k=%d err %.1e (tol 1e-3)", k, err),
                    err <= 1e-3});
  }
  {
    const auto census = census_appendix(10'000'000ull, 3, 1, 2);
    const double err = std::fabs(census.density - census.reference);
    subs.push_back({strf("conditional divisibility err %.1e (tol 1e-3)", err),
                    err <= 1e-3});
  }
  const double secs = seconds_since(t0);

  Outcome o;
  o.pass = secs < 120.0;
  o.detail = "X = 10^7: ";
  for (const auto& sub : subs) {
    o.pass = o.pass && sub.pass;
    o.detail += sub.text + (sub.pass ? "" : " <- FAIL") + "; ";
  }
  o.detail += strf(
      "%.1fs (tol 120s).  The self-threshold smooth densities converge like "
      "1/log X and sit ~11%% low at X = 10^7; the stated tolerance needs X "
      "beyond 10^15",
      secs);
  return o;
}

// ---- criterion 12: tail-density disagreement function ----------------------

Outcome criterion_12(int) {
  const auto rho = build_dickman_table(30.0, 1e-10);
  bool nonneg = true;
  double min_h = 1e18;
  for (int i = 0; i <= 220; ++i) {
    const double s = 1.0 + 0.05 * i;
    const double h = density_gap(rho, s);
    min_h = std::min(min_h, h);
    if (h < -1e-12) nonneg = false;
  }
  const double at_1 = std::fabs(density_gap(rho, 1.0));
  const double g = exp_gamma();
  const double slope =
      (density_gap(rho, g + 1e-4) - density_gap(rho, g - 1e-4)) / 2e-4;
  Outcome o;
  o.pass = nonneg && at_1 <= 1e-9 && std::fabs(slope) <= 1e-6;
  o.detail = strf(
      "H(s) = e^-gamma int_{s-1}^inf rho - rho(s) on [1,12]: min %.2e "
      "(>= -1e-12), |H(1)| = %.2e (tol 1e-9), |H'(e^gamma)| = %.2e "
      "(tol 1e-6, central difference)",
      min_h, at_1, std::fabs(slope));
  return o;
}

// ---- criterion 13: perpetuity matches the Dickman distribution -------------

Outcome criterion_13(int) {
  const auto rho = build_dickman_table(30.0, 1e-10);
  RandomStream rng(kSeed);
  std::vector<double> samples(1'000'000);
  for (double& x : samples) x = perpetuity_sample(rng);
  std::sort(samples.begin(), samples.end());
  const double ks =
      ks_statistic(samples, [&](double x) { return dickman_cdf(rho, x); });
  Outcome o;
  o.pass = ks <= 0.002;
  o.detail = strf(
      "KS of 10^6 draws of D = U(1+D) against e^-gamma int_0^s rho: %.5f "
      "(gate 0.002)",
      ks);
  return o;
}

using CriterionFn = Outcome (*)(int);
constexpr CriterionFn kCriteria[13] = {
    criterion_1, criterion_2, criterion_3,  criterion_4,  criterion_5,
    criterion_6, criterion_7, criterion_8,  criterion_9,  criterion_10,
    criterion_11, criterion_12, criterion_13};

}  // namespace

int main(int argc, char** argv) {
  int criterion = 0;  // 0 = run all
  int threads = 1;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      criterion = std::atoi(argv[++i]);
    } else if (arg == "--threads" && i + 1 < argc) {
      threads = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N] [--threads T]\n",
                   argv[0]);
      return 2;
    }
  }
  if (criterion < 0 || criterion > 13 || threads < 1) {
    std::fprintf(stderr, "criterion must be 1..13, threads >= 1\n");
    return 2;
  }

  int failures = 0;
  for (int i = 1; i <= 13; ++i) {
    if (criterion != 0 && i != criterion) continue;
    const auto t0 = std::chrono::steady_clock::now();
    const Outcome o = kCriteria[i - 1](threads);
    std::printf("[%s] criterion %d: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", i,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures;
}
