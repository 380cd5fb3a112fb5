#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace smoothprob {

inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

inline double exp_gamma() { return std::exp(kEulerGamma); }
inline double exp_neg_gamma() { return std::exp(-kEulerGamma); }

// Compensated accumulator for long sums of mixed-magnitude terms.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double x) {
    const double y = x - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }

  double value() const { return sum; }
};

namespace detail {

template <class F>
double simpson_step(F& f, double a, double fa, double b, double fb, double m,
                    double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double err = left + right - whole;
  if (depth <= 0 || std::abs(err) <= 15.0 * tol) {
    return left + right + err / 15.0;
  }
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Classic adaptive Simpson with the (S2-S1)/15 error estimate and Richardson
// correction on accept.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol,
                        int max_depth = 48) {
  if (!(b >= a)) throw std::invalid_argument("adaptive_simpson: b < a");
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x)/Gamma(a).
// Series for x < a+1, Lentz continued fraction otherwise.
double regularized_gamma_q(double a, double x);

// Survival p-value of a chi-square statistic with `dof` degrees of freedom.
inline double chi_square_pvalue(double chi2, double dof) {
  if (!(chi2 >= 0.0) || !(dof > 0.0)) {
    throw std::invalid_argument("chi_square_pvalue: bad arguments");
  }
  return regularized_gamma_q(0.5 * dof, 0.5 * chi2);
}

}  // namespace smoothprob
