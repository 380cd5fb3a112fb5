#include "smoothprob/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

#include "smoothprob/numerics.hpp"

namespace smoothprob {

namespace {

long validate_grid_step(double grid_step) {
  if (!(grid_step > 0.0)) {
    throw std::invalid_argument("grid_step must be positive");
  }
  const double inv = 1.0 / grid_step;
  const long m = static_cast<long>(std::llround(inv));
  if (m < 8 || m > (1L << 20) || std::abs(inv - static_cast<double>(m)) > 1e-9 * inv) {
    throw std::invalid_argument("grid_step must be 1/m for a whole number m in [8, 2^20]");
  }
  return m;
}

void validate_tolerance(double tol) {
  if (!(tol >= 1e-14 && tol <= 1e-6)) {
    throw std::invalid_argument("tolerance must lie in [1e-14, 1e-6]");
  }
}

// Certified bound on int_s^inf rho, from rho(x) <= 1/Gamma(x+1):
// the tail is at most (s+1)/(s*Gamma(s+1)).
double dickman_gamma_tail_bound(double s) {
  return std::exp(std::log1p(1.0 / s) - std::lgamma(s + 1.0));
}

// 4-point Lagrange interpolation on the uniform grid v[j] ~ f(s_min + j*h).
// piece_len > 0 keeps the stencil inside the analytic piece of piece_len
// steps that contains s, so C^1 breakpoints are never straddled;
// piece_len == 0 treats the whole grid as one piece.
double cubic_core(const double* v, long count, double s_min, double h,
                  long piece_len, double s, double* deriv) {
  const double u = (s - s_min) / h;
  const long last = count - 1;
  long k = static_cast<long>(u);
  k = std::clamp(k, 0L, last - 1);
  long lo = 0;
  long hi = last;
  if (piece_len > 0) {
    lo = (k / piece_len) * piece_len;
    hi = std::min(lo + piece_len, last);
  }
  long b = std::clamp(k - 1, lo, hi - 3);
  if (b < 0) b = 0;
  const double t = u - static_cast<double>(b);
  const double* p = v + b;
  const double t1 = t - 1.0;
  const double t2 = t - 2.0;
  const double t3 = t - 3.0;
  if (deriv != nullptr) {
    const double d0 = -(t2 * t3 + t1 * t3 + t1 * t2) / 6.0;
    const double d1 = (t2 * t3 + t * t3 + t * t2) / 2.0;
    const double d2 = -(t1 * t3 + t * t3 + t * t1) / 2.0;
    const double d3 = (t1 * t2 + t * t2 + t * t1) / 6.0;
    *deriv = (p[0] * d0 + p[1] * d1 + p[2] * d2 + p[3] * d3) / h;
  }
  const double c0 = -t1 * t2 * t3 / 6.0;
  const double c1 = t * t2 * t3 / 2.0;
  const double c2 = -t * t1 * t3 / 2.0;
  const double c3 = t * t1 * t2 / 6.0;
  return p[0] * c0 + p[1] * c1 + p[2] * c2 + p[3] * c3;
}

void require_kind(const SpecialFunctionTable& table, TableKind kind, const char* what) {
  if (table.kind() != kind) {
    throw std::invalid_argument(std::string(what) + ": table has the wrong kind");
  }
}

}  // namespace

double SpecialFunctionTable::interpolate(double s, double* deriv) const {
  return cubic_core(values_.data(), static_cast<long>(values_.size()), s_min_,
                    h_, steps_per_unit_, s, deriv);
}

double SpecialFunctionTable::value(double s) const {
  const double flat_end = (kind_ == TableKind::dickman_rho) ? 1.0 : 2.0;
  if (!(s >= s_min_ - 1e-12)) {
    throw std::invalid_argument("SpecialFunctionTable::value: argument below support");
  }
  if (s > s_max_ + 1e-9) {
    throw std::out_of_range("SpecialFunctionTable::value: argument beyond table support");
  }
  if (s <= flat_end) return 1.0;
  return interpolate(std::min(s, s_max_), nullptr);
}

double SpecialFunctionTable::derivative(double s) const {
  const double flat_end = (kind_ == TableKind::dickman_rho) ? 1.0 : 2.0;
  if (!(s >= s_min_ - 1e-12)) {
    throw std::invalid_argument("SpecialFunctionTable::derivative: argument below support");
  }
  if (s > s_max_ + 1e-9) {
    throw std::out_of_range("SpecialFunctionTable::derivative: argument beyond table support");
  }
  if (s <= flat_end) return 0.0;
  double deriv = 0.0;
  interpolate(std::min(s, s_max_), &deriv);
  return deriv;
}

// Integral of rho over [x_k, s] for s inside panel k+1, by the same
// derivative-corrected trapezoid the march uses; endpoint slopes come from
// the delay equation rho'(x) = -rho(x-1)/x.
double SpecialFunctionTable::partial_panel_integral(long node, double s) const {
  const double xk = static_cast<double>(node) * h_;
  const double w = s - xk;
  if (w <= 0.0) return 0.0;
  if (node < steps_per_unit_) return w;  // rho == 1 on [0, 1]
  const double fa = values_[node];
  const double fb = interpolate(s, nullptr);
  const double da = -values_[node - steps_per_unit_] / xk;
  const double db = -value(s - 1.0) / s;
  return 0.5 * w * (fa + fb) + w * w / 12.0 * (da - db);
}

SpecialFunctionTable build_dickman_table(double s_max, double tol, double grid_step) {
  validate_tolerance(tol);
  if (!(s_max >= 2.0 && s_max <= 100.0)) {
    throw std::invalid_argument("build_dickman_table: s_max must lie in [2, 100]");
  }
  const long m = validate_grid_step(grid_step);
  const long top = std::max(2L, static_cast<long>(std::ceil(s_max - 1e-12)));

  SpecialFunctionTable t;
  t.kind_ = TableKind::dickman_rho;
  t.s_min_ = 0.0;
  t.s_max_ = static_cast<double>(top);
  t.h_ = 1.0 / static_cast<double>(m);
  t.tol_ = tol;
  t.steps_per_unit_ = m;

  const long K = top * m;
  const double h = t.h_;
  auto& v = t.values_;
  auto& pan = t.panels_;
  v.assign(K + 1, 0.0);
  pan.assign(K + 1, 0.0);
  for (long k = 0; k <= m; ++k) v[k] = 1.0;
  for (long k = 1; k <= m; ++k) pan[k] = h;

  // window = int_{x-1}^{x} rho = x * rho(x); marching this instead of rho'
  // keeps relative accuracy where rho decays through dozens of magnitudes.
  double window = 0.0;
  {
    KahanSum w0;
    for (long k = 1; k <= m; ++k) w0.add(pan[k]);
    window = w0.value();
  }
  const double corr = h * h / 12.0;
  for (long k = m + 1; k <= K; ++k) {
    const double xk = static_cast<double>(k) * h;
    const double xprev = static_cast<double>(k - 1) * h;
    const double dprev = -v[k - 1 - m] / xprev;
    const double dk = -v[k - m] / xk;
    const double rhs = window - pan[k - m] + 0.5 * h * v[k - 1] + corr * (dprev - dk);
    const double rk = rhs / (xk - 0.5 * h);
    v[k] = rk;
    pan[k] = 0.5 * h * (v[k - 1] + rk) + corr * (dprev - dk);
    window += pan[k] - pan[k - m];
    if (k % m == 0) {
      // re-anchor the running window so rounding drift cannot accumulate
      KahanSum w;
      for (long j = k - m + 1; j <= k; ++j) w.add(pan[j]);
      window = w.value();
    }
  }

  t.prefix_.assign(K + 1, 0.0);
  {
    KahanSum acc;
    for (long k = 1; k <= K; ++k) {
      acc.add(pan[k]);
      t.prefix_[k] = acc.value();
    }
  }
  t.suffix_.assign(K + 1, 0.0);
  {
    KahanSum acc;
    acc.add(dickman_gamma_tail_bound(static_cast<double>(top)));
    t.suffix_[K] = acc.value();
    for (long k = K - 1; k >= 0; --k) {
      acc.add(pan[k + 1]);
      t.suffix_[k] = acc.value();
    }
  }
  return t;
}

SpecialFunctionTable build_buchstab_table(double s_max, double tol, double grid_step) {
  validate_tolerance(tol);
  if (!(s_max >= 2.0 && s_max <= 100.0)) {
    throw std::invalid_argument("build_buchstab_table: s_max must lie in [2, 100]");
  }
  const long m = validate_grid_step(grid_step);
  const long top = std::max(2L, static_cast<long>(std::ceil(s_max - 1e-12)));

  SpecialFunctionTable t;
  t.kind_ = TableKind::buchstab_v;
  t.s_min_ = 1.0;
  t.s_max_ = static_cast<double>(top);
  t.h_ = 1.0 / static_cast<double>(m);
  t.tol_ = tol;
  t.steps_per_unit_ = m;

  const long K = (top - 1) * m;
  const double h = t.h_;
  auto& v = t.values_;
  v.assign(K + 1, 1.0);  // V == 1 on [1, 2]

  // V' has a kink at s = 3 (where the delayed argument crosses the s = 2
  // corner), so g'(u) below takes the one-sided limit matching the panel.
  const double corr = h * h / 12.0;
  auto g_and_slope = [&](long j, bool panel_to_right, double* slope) {
    const double w = 1.0 + static_cast<double>(j - m) * h;  // delayed arg u - 1
    const double vw = v[j - m];
    double vp = 0.0;
    if (j > 2 * m) {
      vp = v[j - 2 * m] / (1.0 + static_cast<double>(j - 2 * m) * h);
    } else if (j == 2 * m) {
      vp = panel_to_right ? 1.0 : 0.0;
    }
    *slope = (vp * w - vw) / (w * w);
    return vw / w;
  };

  KahanSum acc;
  acc.add(1.0);
  for (long k = m + 1; k <= K; ++k) {
    double slope_l = 0.0;
    double slope_r = 0.0;
    const double gl = g_and_slope(k - 1, true, &slope_l);
    const double gr = g_and_slope(k, false, &slope_r);
    acc.add(0.5 * h * (gl + gr) + corr * (slope_l - slope_r));
    v[k] = acc.value();
  }
  return t;
}

double dickman_rho(const SpecialFunctionTable& table, double s) {
  require_kind(table, TableKind::dickman_rho, "dickman_rho");
  return table.value(s);
}

double dickman_total_integral(const SpecialFunctionTable& table) {
  require_kind(table, TableKind::dickman_rho, "dickman_total_integral");
  return table.prefix_.back() + dickman_gamma_tail_bound(table.s_max_);
}

double dickman_cdf(const SpecialFunctionTable& table, double s) {
  require_kind(table, TableKind::dickman_rho, "dickman_cdf");
  if (!(s >= 0.0)) {
    throw std::invalid_argument("dickman_cdf: requires s >= 0");
  }
  if (s >= table.s_max_) {
    const double total = table.prefix_.back() + dickman_gamma_tail_bound(table.s_max_);
    return exp_neg_gamma() * (total - dickman_gamma_tail_bound(s));
  }
  if (s <= 1.0) return exp_neg_gamma() * s;
  const long last_panel = static_cast<long>(table.values_.size()) - 2;
  const long k = std::clamp(static_cast<long>(s / table.h_), 0L, last_panel);
  return exp_neg_gamma() * (table.prefix_[k] + table.partial_panel_integral(k, s));
}

double dickman_tail(const SpecialFunctionTable& table, double s) {
  require_kind(table, TableKind::dickman_rho, "dickman_tail");
  if (!(s >= 0.0)) {
    throw std::invalid_argument("dickman_tail: requires s >= 0");
  }
  if (s >= table.s_max_) {
    return exp_neg_gamma() * dickman_gamma_tail_bound(s);
  }
  const long last_panel = static_cast<long>(table.values_.size()) - 2;
  const long k = std::clamp(static_cast<long>(s / table.h_), 0L, last_panel);
  const double partial = table.partial_panel_integral(k, s);
  return exp_neg_gamma() * (table.suffix_[k + 1] + (table.panels_[k + 1] - partial));
}

double buchstab_omega(const SpecialFunctionTable& table, double s) {
  require_kind(table, TableKind::buchstab_v, "buchstab_omega");
  if (!(s >= 1.0)) {
    throw std::invalid_argument("buchstab_omega: requires s >= 1");
  }
  return table.value(s) / s;
}

double dickman_laplace(double t, double tol) {
  if (!(t >= 0.0)) {
    throw std::invalid_argument("dickman_laplace: requires t >= 0");
  }
  if (!(tol >= 1e-14 && tol <= 1e-6)) {
    throw std::invalid_argument("dickman_laplace: tolerance must lie in [1e-14, 1e-6]");
  }
  if (t == 0.0) return 1.0;
  // exponent = int_0^1 (1 - e^{-tx})/x dx; the integrand tends to t at 0,
  // so a short series covers [0, x0] and adaptive Simpson the rest.
  const double x0 = std::min(1e-4, 1e-4 / t);
  const double u = t * x0;
  const double head = u * (1.0 - u / 4.0 + u * u / 18.0 - u * u * u / 96.0);
  const double body = adaptive_simpson(
      [t](double x) { return -std::expm1(-t * x) / x; }, x0, 1.0, 0.5 * tol);
  return std::exp(-(head + body));
}

LambdaTables::LambdaTables(double tol, double grid_step) : tol_(tol) {
  validate_tolerance(tol);
  m_ = validate_grid_step(grid_step);
  h_ = 1.0 / static_cast<double>(m_);
}

void LambdaTables::ensure(int max_level, double s_max) {
  if (max_level < 1 || max_level > 64) {
    throw std::invalid_argument("LambdaTables::ensure: level must lie in [1, 64]");
  }
  if (!(s_max >= 1.0 && s_max <= 100.0)) {
    throw std::invalid_argument("LambdaTables::ensure: s_max must lie in [1, 100]");
  }
  const long top = std::max(2L, static_cast<long>(std::ceil(s_max - 1e-12)));
  size_t want = (max_level >= 2) ? static_cast<size_t>(max_level - 1) : 0;
  if (top > s_top_) {
    want = std::max(want, grids_.size());
    grids_.clear();
    s_top_ = top;
  }
  while (grids_.size() < want) {
    const int level = static_cast<int>(grids_.size()) + 2;
    const long kl = std::max(0L, (s_top_ - level) * m_);
    std::vector<double> grid(kl + 1, 0.0);
    if (level == 2) {
      for (long i = 0; i <= kl; ++i) {
        grid[i] = std::log1p(static_cast<double>(i) * h_);  // log(s - 1)
      }
    } else {
      // Lambda_level(s) = int_{level-1}^{s-1} q(u) du with
      // q(u) = Lambda_{level-1}(u)/u; the shared grid step keeps every
      // delayed lookup on-grid, and q'(u) feeds the trapezoid correction.
      const auto& prev = grids_[level - 3];
      const double corr = h_ * h_ / 12.0;
      KahanSum acc;
      for (long i = 1; i <= kl; ++i) {
        const double ur = static_cast<double>(level - 1) + static_cast<double>(i) * h_;
        const double ul = ur - h_;
        const double ql = prev[i - 1] / ul;
        const double qr = prev[i] / ur;
        double ppl = 0.0;
        double ppr = 0.0;
        if (level == 3) {
          ppl = 1.0 / (ul - 1.0);
          ppr = 1.0 / (ur - 1.0);
        } else {
          const auto& prev2 = grids_[level - 4];
          ppl = prev2[i - 1] / (ul - 1.0);
          ppr = prev2[i] / (ur - 1.0);
        }
        const double slope_l = (ppl * ul - prev[i - 1]) / (ul * ul);
        const double slope_r = (ppr * ur - prev[i]) / (ur * ur);
        acc.add(0.5 * h_ * (ql + qr) + corr * (slope_l - slope_r));
        grid[i] = acc.value();
      }
    }
    grids_.push_back(std::move(grid));
  }
}

double LambdaTables::value(int level, double s) const {
  if (level < 1 || level > 64) {
    throw std::invalid_argument("LambdaTables::value: level must lie in [1, 64]");
  }
  if (!(s >= static_cast<double>(level) - 1e-9)) {
    throw std::domain_error("LambdaTables::value: requires s >= level");
  }
  const double sc = std::max(s, static_cast<double>(level));
  if (level == 1) return 1.0;
  if (level == 2) return std::log(sc - 1.0);
  if (static_cast<size_t>(level - 1) > grids_.size() || sc > static_cast<double>(s_top_) + 1e-9) {
    throw std::out_of_range("LambdaTables::value: level or argument not built; call ensure() first");
  }
  const auto& grid = grids_[level - 2];
  if (grid.size() < 4) return 0.0;  // support degenerates to the left endpoint
  const double capped = std::min(sc, static_cast<double>(s_top_));
  return cubic_core(grid.data(), static_cast<long>(grid.size()),
                    static_cast<double>(level), h_, 0, capped, nullptr);
}

namespace {

LambdaTables& cached_lambda_tables(double tol) {
  thread_local std::map<double, LambdaTables> cache;
  auto it = cache.find(tol);
  if (it == cache.end()) {
    it = cache.emplace(tol, LambdaTables(tol)).first;
  }
  return it->second;
}

}  // namespace

double lambda_L(int level, double s, double tol) {
  if (level < 1 || level > 40) {
    throw std::invalid_argument("lambda_L: level must lie in [1, 40]");
  }
  if (!(s >= static_cast<double>(level) - 1e-9)) {
    throw std::domain_error("lambda_L: requires s >= level");
  }
  if (!(s <= 100.0)) {
    throw std::invalid_argument("lambda_L: s must be <= 100");
  }
  auto& tables = cached_lambda_tables(tol);
  tables.ensure(level, std::max(s, static_cast<double>(level)));
  return tables.value(level, s);
}

double buchstab_series(double s, double tol) {
  if (!(s >= 1.0 && s <= 64.0)) {
    throw std::invalid_argument("buchstab_series: s must lie in [1, 64]");
  }
  const int lmax = static_cast<int>(std::floor(s + 1e-9));
  auto& tables = cached_lambda_tables(tol);
  tables.ensure(lmax, std::max(s, 2.0));
  KahanSum acc;
  for (int level = 1; level <= lmax; ++level) {
    acc.add(tables.value(level, std::max(s, static_cast<double>(level))));
  }
  return acc.value();
}

double density_gap(const SpecialFunctionTable& rho_table, double s) {
  require_kind(rho_table, TableKind::dickman_rho, "density_gap");
  if (!(s >= 1.0)) {
    throw std::invalid_argument("density_gap: requires s >= 1");
  }
  return dickman_tail(rho_table, s - 1.0) - dickman_rho(rho_table, s);
}

}  // namespace smoothprob
