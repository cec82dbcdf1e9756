#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ablmc/coupling.hpp"
#include "ablmc/stats.hpp"

namespace ablmc {

enum class Method { stmc, mlmc };

inline std::string to_string(Method m) {
  return m == Method::stmc ? "stmc" : "mlmc";
}

/// Everything needed to draw one sample: dynamics, release point, QoI and
/// noise identity. The smoothing polynomial is built once per run.
struct Problem {
  ModelParams params;
  Integrator integrator = Integrator::gl;
  QoISpec qoi;
  SmoothingPolynomial poly;
  double x0 = 0.05;
  double u0 = 0.1;
  double T = 1.0;
  std::int64_t m0 = 40;
  std::uint64_t seed = 12345;
  SampleOptions opt;

  std::size_t dim() const { return qoi.size(); }
  double h_level(int level) const { return T / double(m0 << level); }

  static Problem make(const ModelParams& params, Integrator ig, const QoISpec& qoi,
                      double x0, double u0, double T, std::int64_t m0,
                      std::uint64_t seed, const SampleOptions& opt = {}) {
    Problem pr;
    pr.params = params;
    pr.integrator = ig;
    pr.qoi = qoi;
    pr.poly = build_smoothing_polynomial(qoi.r);
    pr.x0 = x0;
    pr.u0 = u0;
    pr.T = T;
    pr.m0 = m0;
    pr.seed = seed;
    pr.opt = opt;
    params.validate();
    qoi.validate(params.H);
    return pr;
  }

  SampleFn level_sampler(int level) const {
    if (level == 0)
      return [this](std::int64_t idx, std::span<double> y, std::span<double>) {
        NoiseStream ns(seed, 0, std::uint64_t(idx));
        return level0_sample(qoi, poly, integrator, params, x0, u0, T, m0, ns, opt, y);
      };
    return [this, level](std::int64_t idx, std::span<double> y,
                         std::span<double> scratch) {
      NoiseStream ns(seed, std::uint32_t(level), std::uint64_t(idx));
      return difference_sample(level, qoi, poly, integrator, params, x0, u0, T, m0,
                               ns, opt, y, scratch);
    };
  }

  /// Sampler for a single path at M steps (standard Monte Carlo).
  SampleFn path_sampler(std::int64_t M, std::uint32_t stream_level = 0) const {
    return [this, M, stream_level](std::int64_t idx, std::span<double> y,
                                   std::span<double>) {
      NoiseStream ns(seed, stream_level, std::uint64_t(idx));
      return level0_sample(qoi, poly, integrator, params, x0, u0, T, M, ns, opt, y);
    };
  }

  /// Stability rule for symplectic Euler: uniform stepping caps h at
  /// 2/lambda(eps_reg); adaptive stepping caps the base step at
  /// 2/lambda(x_adapt) since the shrink rule bounds h_n lambda(X_n).
  void check_se_stability(double h) const {
    if (integrator != Integrator::se) return;
    const double lim = opt.adaptive ? 2.0 / sde_coeffs(opt.x_adapt, params).lambda
                                    : se_stability_limit(params);
    if (h >= lim)
      throw std::runtime_error("symplectic Euler unstable: h = " + std::to_string(h) +
                               " >= " + std::to_string(lim));
  }
};

// ---------------------------------------------------------------------------
// Fits and level selection
// ---------------------------------------------------------------------------

struct PowerFit {
  double exponent = 0.0;
  double log_prefactor = 0.0;
  double at(double h) const { return std::exp(log_prefactor + exponent * std::log(h)); }
};

/// Least-squares fit of log v against log h.
inline PowerFit fit_power_law(std::span<const double> h, std::span<const double> v) {
  if (h.size() != v.size() || h.size() < 2)
    throw std::invalid_argument("fit_power_law: need at least two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(v[i] > 0.0)) throw std::invalid_argument("fit_power_law: values must be positive");
    const double x = std::log(h[i]);
    const double y = std::log(v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return {slope, (sy - slope * sx) / n};
}

struct BiasPoint {
  double h;
  double mean_abs;  ///< |E[Y_l]| (max component for vector QoIs)
  double std_err;
};

struct BiasFit {
  double alpha = 1.0;  ///< weak order
  double c1 = 0.0;     ///< bias constant: |E[P_l] - E[P]| ~ c1 h^alpha
  double c_y = 0.0;    ///< level-difference prefactor: |E[Y_l]| ~ c_y h^alpha

  double bias_at(double h) const { return c1 * std::pow(h, alpha); }
};

/// Fits |E[Y_l]| ~ c_y h^alpha and converts to the absolute bias constant
/// through the geometric-series factor: summing the tail of level differences
/// gives c1 = c_y / (2^alpha - 1).
inline BiasFit estimate_bias_constants(std::span<const BiasPoint> pts) {
  if (pts.size() < 3)
    throw std::invalid_argument("estimate_bias_constants: need at least 3 levels");
  std::vector<double> h, v;
  for (const auto& pt : pts) {
    if (!(pt.mean_abs > 3.0 * pt.std_err))
      throw std::runtime_error(
          "estimate_bias_constants: E[Y_l] statistically indistinguishable from 0 "
          "at h = " +
          std::to_string(pt.h) + "; refine the pilot sample size");
    h.push_back(pt.h);
    v.push_back(pt.mean_abs);
  }
  const PowerFit f = fit_power_law(h, v);
  BiasFit out;
  out.alpha = f.exponent;
  out.c_y = std::exp(f.log_prefactor);
  out.c1 = out.c_y / (std::pow(2.0, out.alpha) - 1.0);
  return out;
}

/// Smallest L with c1 h_L^alpha <= eps/sqrt(2).
inline int choose_levels(double alpha, double c1, double eps, std::int64_t m0,
                         double T, int l_max = 16) {
  if (!(alpha > 0.0) || !(c1 > 0.0) || !(eps > 0.0))
    throw std::invalid_argument("choose_levels: alpha, c1, eps must be positive");
  const double target = eps / std::numbers::sqrt2;
  for (int L = 0; L <= l_max; ++L) {
    const double h = T / double(m0 << L);
    if (c1 * std::pow(h, alpha) <= target) return L;
  }
  throw std::runtime_error("choose_levels: bias target needs more than " +
                           std::to_string(l_max) + " levels");
}

/// Optimal sample allocation for cost C_l ~ 1/h_l:
/// N_l = ceil(2 eps^-2 sqrt(V_l h_l) sum_k sqrt(V_k/h_k)),
/// minimising sum N_l/h_l subject to sum V_l/N_l <= eps^2/2.
inline std::vector<std::int64_t> allocate_samples(std::span<const double> variances,
                                                  std::span<const double> h,
                                                  double eps) {
  if (variances.size() != h.size())
    throw std::invalid_argument("allocate_samples: size mismatch");
  double s = 0.0;
  for (std::size_t l = 0; l < h.size(); ++l) s += std::sqrt(variances[l] / h[l]);
  std::vector<std::int64_t> n(variances.size());
  for (std::size_t l = 0; l < h.size(); ++l)
    n[l] = std::int64_t(std::ceil(2.0 / (eps * eps) * std::sqrt(variances[l] * h[l]) * s));
  return n;
}

// ---------------------------------------------------------------------------
// Run drivers
// ---------------------------------------------------------------------------

struct RunResult {
  std::vector<double> estimate;
  std::vector<double> stat_error;  ///< standard error per component
  double bias_estimate = 0.0;
  double alpha = 0.0;
  double c1 = 0.0;
  int levels_used = 0;
  std::vector<LevelStats> level_stats;
  std::int64_t total_cost_steps = 0;
  std::int64_t pilot_cost_steps = 0;
  std::int64_t failed_samples = 0;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
};

namespace detail {

class WallClock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

}  // namespace detail

/// Standard Monte Carlo: N independent paths with M_L uniform steps.
/// With eps > 0 the sample size is grown from a pilot batch until the
/// estimated statistical error satisfies Var/N <= eps^2/2; with fixed_n > 0
/// exactly that many samples are taken.
inline RunResult run_stmc(const Problem& pr, std::int64_t M_L, double eps,
                          std::int64_t fixed_n = 0, int workers = 1) {
  if (M_L < 1) throw std::invalid_argument("run_stmc: M_L must be >= 1");
  if (fixed_n <= 0 && !(eps > 0.0))
    throw std::invalid_argument("run_stmc: need a tolerance or a fixed sample count");
  pr.check_se_stability(pr.T / double(M_L));

  detail::WallClock clock;
  LevelStats acc;
  acc.init(0, pr.T / double(M_L), pr.dim());
  const SampleFn fn = pr.path_sampler(M_L);

  if (fixed_n > 0) {
    accumulate_samples(acc, 0, fixed_n, workers, fn);
    check_failure_budget(acc);
  } else {
    const std::int64_t pilot = 1000;
    accumulate_samples(acc, 0, pilot, workers, fn);
    check_failure_budget(acc);
    for (int round = 0; round < 64; ++round) {
      const double v = acc.max_variance();
      const std::int64_t needed = std::int64_t(std::ceil(2.0 * v / (eps * eps)));
      if (acc.n >= needed) break;
      accumulate_samples(acc, acc.attempts(), needed - acc.n, workers, fn);
      check_failure_budget(acc);
    }
  }

  RunResult out;
  out.levels_used = 0;
  for (std::size_t i = 0; i < pr.dim(); ++i) {
    out.estimate.push_back(acc.mean(i));
    out.stat_error.push_back(acc.std_error(i));
  }
  out.level_stats.push_back(acc);
  out.total_cost_steps = acc.cost_steps;
  out.failed_samples = acc.failed;
  out.wall_seconds = clock.seconds();
  return out;
}

struct MlmcOptions {
  std::int64_t pilot_n = 10000;   ///< pilot samples per level
  int pilot_levels_max = 4;       ///< pilot runs on levels 0..min(L, this)
  std::int64_t init_n = 1000;     ///< first batch on levels beyond the pilot
  int l_max = 16;
  int workers = 1;
  const BiasFit* bias_fit = nullptr;  ///< reuse a precomputed fit (skips refit)
};

/// Multilevel Monte Carlo driver: pilot phase to estimate the bias constants
/// (alpha, c1) and per-level variances, level selection, then iterative
/// sample allocation until sum_l V_l/N_l <= eps^2/2. Pilot samples are kept
/// in the final accumulators; their cost is reported separately.
inline RunResult run_mlmc(const Problem& pr, double eps, const MlmcOptions& o = {}) {
  if (!(eps > 0.0)) throw std::invalid_argument("run_mlmc: eps must be positive");
  pr.check_se_stability(pr.T / double(pr.m0));

  detail::WallClock clock;
  RunResult out;
  std::vector<LevelStats> levels;

  const auto ensure_level = [&](int l, std::int64_t n_target) {
    while (int(levels.size()) <= l) {
      LevelStats st;
      st.init(int(levels.size()), pr.h_level(int(levels.size())), pr.dim());
      levels.push_back(std::move(st));
    }
    LevelStats& st = levels[std::size_t(l)];
    if (st.n < n_target) {
      accumulate_samples(st, st.attempts(), n_target - st.n, o.workers,
                         pr.level_sampler(l));
      check_failure_budget(st);
    }
  };

  const auto bias_points = [&](int up_to) {
    std::vector<BiasPoint> pts;
    for (int l = 1; l <= up_to && l < int(levels.size()); ++l) {
      const LevelStats& st = levels[std::size_t(l)];
      std::size_t imax = 0;
      for (std::size_t i = 1; i < st.dim; ++i)
        if (std::abs(st.mean(i)) > std::abs(st.mean(imax))) imax = i;
      pts.push_back({st.h, st.max_abs_mean(), st.std_error(imax)});
    }
    return pts;
  };

  // Fits the bias constants from the pilot levels, refining the pilot sample
  // size whenever some E[Y_l] is still statistically indistinguishable from 0
  // (splitting methods need this: their level differences are tiny).
  const auto fit_with_refinement = [&](int up_to) {
    std::int64_t n = o.pilot_n;
    for (int attempt = 0;; ++attempt) {
      for (int l = 1; l <= up_to; ++l) ensure_level(l, n);
      try {
        return estimate_bias_constants(bias_points(up_to));
      } catch (const std::runtime_error&) {
        if (attempt >= 6) throw;
        n *= 4;
      }
    }
  };

  // Pilot phase and level selection.
  BiasFit fit;
  int L;
  ensure_level(0, o.pilot_n);
  if (o.bias_fit != nullptr) {
    fit = *o.bias_fit;
    L = choose_levels(fit.alpha, fit.c1, eps, pr.m0, pr.T, o.l_max);
  } else {
    fit = fit_with_refinement(3);
    L = choose_levels(fit.alpha, fit.c1, eps, pr.m0, pr.T, o.l_max);
    if (L > 3) {
      fit = fit_with_refinement(std::min(L, o.pilot_levels_max));
      L = choose_levels(fit.alpha, fit.c1, eps, pr.m0, pr.T, o.l_max);
    }
  }
  for (int l = 0; l <= L; ++l) ensure_level(l, o.init_n);
  for (const auto& st : levels) out.pilot_cost_steps += st.cost_steps;

  if (L >= 1 && int(levels.size()) > 1 &&
      levels[1].max_variance() >= 0.5 * levels[0].max_variance())
    out.warnings.push_back(
        "Var[Y_1] >= Var[Y_0]/2: coarsest level M_0 is too coarse to pay off");

  // Iterative allocation until the statistical error target holds.
  std::vector<double> v(std::size_t(L) + 1), hs(std::size_t(L) + 1);
  for (int round = 0; round < 64; ++round) {
    for (int l = 0; l <= L; ++l) {
      v[std::size_t(l)] = levels[std::size_t(l)].max_variance();
      hs[std::size_t(l)] = levels[std::size_t(l)].h;
    }
    const std::vector<std::int64_t> target = allocate_samples(v, hs, eps);
    for (int l = 0; l <= L; ++l)
      if (target[std::size_t(l)] > levels[std::size_t(l)].n)
        ensure_level(l, target[std::size_t(l)]);
    double stat2 = 0.0;
    for (int l = 0; l <= L; ++l)
      stat2 += levels[std::size_t(l)].max_variance() / double(levels[std::size_t(l)].n);
    if (stat2 <= 0.5 * eps * eps) break;
    if (round == 63)
      out.warnings.push_back("sample allocation did not converge in 64 rounds");
  }

  out.levels_used = L;
  out.alpha = fit.alpha;
  out.c1 = fit.c1;
  out.bias_estimate = fit.bias_at(pr.h_level(L));
  out.estimate.assign(pr.dim(), 0.0);
  out.stat_error.assign(pr.dim(), 0.0);
  for (int l = 0; l <= L; ++l) {
    const LevelStats& st = levels[std::size_t(l)];
    for (std::size_t i = 0; i < pr.dim(); ++i) {
      out.estimate[i] += st.mean(i);
      out.stat_error[i] += st.variance(i) / double(st.n);
    }
  }
  for (auto& se : out.stat_error) se = std::sqrt(se);
  for (const auto& st : levels) {
    out.total_cost_steps += st.cost_steps;
    out.failed_samples += st.failed;
  }
  out.level_stats = std::move(levels);
  out.wall_seconds = clock.seconds();
  return out;
}

// ---------------------------------------------------------------------------
// Diagnostic sweeps
// ---------------------------------------------------------------------------

struct DecayRow {
  int level = 0;
  double h = 0.0;
  double var_y = 0.0;
  double mean_y = 0.0;
  double se_mean = 0.0;
  std::int64_t n = 0;
  std::int64_t cost_steps = 0;
};

/// Per-level statistics of the coupled differences Y_l at a fixed sample
/// count; feeds both the variance-decay and the bias-decay diagnostics.
inline std::vector<DecayRow> decay_sweep(const Problem& pr, int l_min, int l_max,
                                         std::int64_t n_per_level, int workers = 1) {
  pr.check_se_stability(pr.T / double(pr.m0));
  std::vector<DecayRow> rows;
  for (int l = l_min; l <= l_max; ++l) {
    LevelStats st;
    st.init(l, pr.h_level(l), pr.dim());
    accumulate_samples(st, 0, n_per_level, workers, pr.level_sampler(l));
    check_failure_budget(st);
    std::size_t imax = 0;
    for (std::size_t i = 1; i < pr.dim(); ++i)
      if (st.variance(i) > st.variance(imax)) imax = i;
    rows.push_back({l, st.h, st.variance(imax), st.mean(imax), st.std_error(imax),
                    st.n, st.cost_steps});
  }
  return rows;
}

/// Log-log slope of Var[Y_l] against h_l over a sweep.
inline double variance_decay_slope(std::span<const DecayRow> rows) {
  std::vector<double> h, v;
  for (const auto& r : rows) {
    h.push_back(r.h);
    v.push_back(r.var_y);
  }
  return fit_power_law(h, v).exponent;
}

struct CostRow {
  double eps = 0.0;
  Method method = Method::mlmc;
  Integrator integrator = Integrator::gl;
  std::int64_t cost_steps = 0;  ///< main-phase estimator cost (pilot excluded)
  double wall_seconds = 0.0;
  double estimate = 0.0;
  double stat_error = 0.0;
};

/// Cost against tolerance for one method: StMC picks M_L from the bias fit
/// so the discretisation error stays below eps/sqrt(2); MLMC picks levels the
/// same way internally.
inline std::vector<CostRow> cost_sweep(const Problem& pr, Method method,
                                       std::span<const double> eps_values,
                                       const BiasFit& fit, int workers = 1) {
  std::vector<CostRow> rows;
  for (const double eps : eps_values) {
    CostRow row;
    row.eps = eps;
    row.method = method;
    row.integrator = pr.integrator;
    if (method == Method::stmc) {
      const int L = choose_levels(fit.alpha, fit.c1, eps, pr.m0, pr.T);
      const RunResult r = run_stmc(pr, pr.m0 << L, eps, 0, workers);
      row.cost_steps = r.total_cost_steps;
      row.wall_seconds = r.wall_seconds;
      row.estimate = r.estimate[0];
      row.stat_error = r.stat_error[0];
    } else {
      MlmcOptions o;
      o.workers = workers;
      o.bias_fit = &fit;
      const RunResult r = run_mlmc(pr, eps, o);
      row.cost_steps = r.total_cost_steps - r.pilot_cost_steps;
      row.wall_seconds = r.wall_seconds;
      row.estimate = r.estimate[0];
      row.stat_error = r.stat_error[0];
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ablmc
