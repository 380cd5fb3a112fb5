#pragma once

#include <cstddef>
#include <vector>

namespace smoothprob {

enum class TableKind { dickman_rho, buchstab_v };

inline constexpr double kDefaultGridStep = 1.0 / 1024.0;

// Uniform-grid table for the Dickman function rho or for V(s) = s*omega(s)
// with omega the Buchstab function.  Both satisfy delay equations with unit
// breakpoints, so interpolation stencils are clamped inside each unit
// interval and never straddle a breakpoint.
//
// Construction marches panel by panel with a derivative-corrected trapezoid
// (two-point Euler-Maclaurin, O(h^5) per panel); the delayed endpoint data
// is always on-grid, so the march never interpolates.  rho is advanced
// through the windowed identity x*rho(x) = integral of rho over [x-1, x],
// which keeps *relative* accuracy even where rho underflows toward 1e-44;
// the textbook forward subtraction loses all significant digits there.
class SpecialFunctionTable {
 public:
  TableKind kind() const { return kind_; }
  double grid_step() const { return h_; }
  double support_min() const { return s_min_; }
  double support_max() const { return s_max_; }
  double tolerance() const { return tol_; }

  // Table value: exact 1 on the initial flat piece, clamped cubic
  // interpolation elsewhere.  Throws std::invalid_argument below the
  // support, std::out_of_range above it.
  double value(double s) const;

  // Derivative of the interpolant (0 on the flat piece).
  double derivative(double s) const;

 private:
  friend SpecialFunctionTable build_dickman_table(double, double, double);
  friend SpecialFunctionTable build_buchstab_table(double, double, double);
  friend double dickman_total_integral(const SpecialFunctionTable&);
  friend double dickman_cdf(const SpecialFunctionTable&, double);
  friend double dickman_tail(const SpecialFunctionTable&, double);

  double interpolate(double s, double* deriv) const;
  double partial_panel_integral(long node, double s) const;

  TableKind kind_ = TableKind::dickman_rho;
  double s_min_ = 0.0;
  double s_max_ = 0.0;
  double h_ = kDefaultGridStep;
  double tol_ = 1e-10;
  long steps_per_unit_ = 1024;
  std::vector<double> values_;   // node k holds f(s_min + k*h)
  std::vector<double> panels_;   // rho only: panels_[k] = int_{x_{k-1}}^{x_k} rho
  std::vector<double> prefix_;   // rho only: int_0^{x_k} rho
  std::vector<double> suffix_;   // rho only: int_{x_k}^inf rho, incl. tail bound
};

// Builds rho on [0, ceil(s_max)].  Preconditions: 2 <= s_max <= 100,
// 1e-14 <= tol <= 1e-6, 1/grid_step a whole number in [8, 2^20].
SpecialFunctionTable build_dickman_table(double s_max, double tol,
                                         double grid_step = kDefaultGridStep);

// Builds V(s) = s*omega(s) on [1, ceil(s_max)]; same parameter rules.
SpecialFunctionTable build_buchstab_table(double s_max, double tol,
                                          double grid_step = kDefaultGridStep);

// rho(s) for s >= 0 within the table support.
double dickman_rho(const SpecialFunctionTable& table, double s);

// int_0^inf rho, as table panels plus a certified Gamma-decay tail bound
// (s+1)/(s*Gamma(s+1)) at the support edge; the overshoot is at most that
// bound, which is below double noise once the support reaches 20 or so.
double dickman_total_integral(const SpecialFunctionTable& table);

// Dickman distribution: CDF(s) = e^{-gamma} int_0^s rho, tail = complement.
// CDF + tail reproduces e^{-gamma} * total integral identically.
double dickman_cdf(const SpecialFunctionTable& table, double s);
double dickman_tail(const SpecialFunctionTable& table, double s);

// omega(s) = V(s)/s from a buchstab_v table.
double buchstab_omega(const SpecialFunctionTable& table, double s);

// Laplace transform of the Dickman distribution,
// E e^{-tD} = exp(-int_0^1 (1-e^{-tx})/x dx), via adaptive Simpson with a
// series head below x = 1e-4 where the integrand is a removable 0/0.
double dickman_laplace(double t, double tol = 1e-12);

// Nested logarithmic integrals: level 1 is the constant 1 on s >= 1,
// level 2 is log(s-1) on s >= 2, and each further level satisfies
// Lambda_L(s) = int_{L-1}^{s-1} Lambda_{L-1}(u)/u du on s >= L.
// Levels >= 3 are marched onto uniform grids; all levels share the grid
// step, so every delayed lookup during a march is on-grid.
class LambdaTables {
 public:
  explicit LambdaTables(double tol, double grid_step = kDefaultGridStep);

  // Grows the stored grids to cover levels up to max_level on [level, s_max].
  void ensure(int max_level, double s_max);

  // Lambda_level(s); requires ensure() to have covered (level, s).
  double value(int level, double s) const;

  double tolerance() const { return tol_; }
  long built_top() const { return s_top_; }
  int built_levels() const { return static_cast<int>(grids_.size()) + 1; }

 private:
  double tol_;
  double h_;
  long m_;
  long s_top_ = 0;
  // grids_[i] holds level i+2 on [level, s_top_]; level 1 stays closed-form.
  std::vector<std::vector<double>> grids_;
};

// Convenience wrappers over a per-thread LambdaTables cache.
// lambda_L: 1 <= level <= 40, s >= level (1e-9 slack), tol as for tables.
double lambda_L(int level, double s, double tol = 1e-10);

// Partial sum sum_{L=1}^{floor(s)} Lambda_L(s), which reproduces s*omega(s).
double buchstab_series(double s, double tol = 1e-10);

// H(s) = e^{-gamma} int_{s-1}^inf rho  -  rho(s)  for s >= 1: the gap
// between the all-large-factors tail and the all-small-factors density.
double density_gap(const SpecialFunctionTable& rho_table, double s);

}  // namespace smoothprob
