#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ablmc/integrators.hpp"
#include "ablmc/model.hpp"
#include "ablmc/noise.hpp"
#include "ablmc/qoi.hpp"
#include "ablmc/timeline.hpp"

namespace ablmc {

struct PathResult {
  ParticleState state;
  std::int64_t steps = 0;
};

/// Single path with M uniform steps of size T/M.
inline PathResult simulate_path(Integrator ig, const ModelParams& p, double x0,
                                double u0, double T, std::int64_t M,
                                NoiseStream& ns) {
  ParticleState s{x0, u0, 0.0, +1, 0};
  const double h = T / double(M);
  for (std::int64_t n = 0; n < M; ++n) s = step(ig, s, h, ns.next(), p).state;
  return {s, M};
}

/// Single path with adaptive steps, base size h_base, clipped to land on T.
inline PathResult simulate_path_adaptive(Integrator ig, const ModelParams& p,
                                         double x0, double u0, double T,
                                         double h_base, double x_adapt,
                                         NoiseStream& ns) {
  ParticleState s{x0, u0, 0.0, +1, 0};
  std::int64_t steps = 0;
  const std::int64_t max_steps =
      64 * std::int64_t(std::ceil(T / h_base)) + 64;
  double t = 0.0;
  while (t < T) {
    double h = adaptive_step_size(s.x, h_base, x_adapt, p);
    if (t + h >= T) h = T - t;
    s = step(ig, s, h, ns.next(), p).state;
    t = (t + h >= T) ? T : t + h;
    s.t = t;
    if (++steps > max_steps)
      throw UnstableStepError("adaptive path exceeded step budget");
  }
  return {s, steps};
}

struct PairResult {
  ParticleState fine;
  ParticleState coarse;
  std::int64_t steps = 0;  ///< fine + coarse steps taken
};

/// Coupled fine/coarse pair with uniform steps: the fine path takes M steps
/// of h, the coarse path M/2 steps of 2h driven by pairwise-combined noise
/// (coarse_noise_se / coarse_noise_gl; BAOAB shares the GL rule). The
/// reflection factors S^f, S^c enter the combination unless signs_on is
/// false (the deliberately wrong coupling used for regression tests).
inline PairResult simulate_pair(Integrator ig, const ModelParams& p, double x0,
                                double u0, double T, std::int64_t M,
                                NoiseStream& ns, bool signs_on = true) {
  ParticleState fine{x0, u0, 0.0, +1, 0};
  ParticleState coarse{x0, u0, 0.0, +1, 0};
  const double h = T / double(M);
  const double h2 = 2.0 * h;
  for (std::int64_t n = 0; n < M / 2; ++n) {
    const double xi0 = ns.next();
    const double xi1 = ns.next();
    const double lam_fine = sde_coeffs(fine.x, p).lambda;

    const StepRecord f0 = step(ig, fine, h, xi0, p);
    const StepRecord f1 = step(ig, f0.state, h, xi1, p);
    fine = f1.state;
    const int s0 = signs_on ? f0.parity_at_noise : 1;
    const int s1 = signs_on ? f1.parity_at_noise : 1;

    switch (ig) {
      case Integrator::se: {
        const int sc = signs_on ? coarse.parity : 1;
        coarse = se_step(coarse, h2, coarse_noise_se(xi0, xi1, s0, s1, sc), p).state;
        break;
      }
      case Integrator::gl: {
        const int sc = signs_on ? coarse.parity : 1;
        coarse =
            gl_step(coarse, h2, coarse_noise_gl(xi0, xi1, lam_fine, h, s0, s1, sc), p)
                .state;
        break;
      }
      case Integrator::baoab: {
        // The coarse reflection factor applies at the O-step, where the
        // coarse parity after the first A-half-step is known.
        const double xi_hat = coarse_noise_gl(xi0, xi1, lam_fine, h, s0, s1, 1);
        coarse = detail::baoab_step_impl(coarse, h2, xi_hat, p, signs_on).state;
        break;
      }
    }
  }
  return {fine, coarse, M + M / 2};
}

namespace detail {

/// One path of an adaptively-stepped coupled pair. The merged timeline is
/// built on the fly: each merged sub-interval carries one draw, and a path
/// consumes its pending draws when its own step completes.
struct AdaptiveLeg {
  ParticleState s;
  double h_cur = 0.0;
  double t_next = 0.0;
  bool done = false;
  std::int64_t steps = 0;
  std::vector<double> xi, dtau, lam;
  std::vector<int> signs;

  void clear_pending() {
    xi.clear();
    dtau.clear();
    lam.clear();
    signs.clear();
  }
};

}  // namespace detail

/// Coupled pair with adaptive timestepping (SE and GL). Fine base step
/// h_base, coarse base step 2 h_base; both paths shrink their steps
/// independently via adaptive_step_size, so the grids are not nested. Noise
/// increments over the merged sub-intervals are recombined per path
/// (adaptive_increment_se / adaptive_increment_gl); lambda in the OU weights
/// is evaluated at each path's own position at the start of its current step.
inline PairResult simulate_pair_adaptive(Integrator ig, const ModelParams& p,
                                         double x0, double u0, double T,
                                         double h_base, double x_adapt,
                                         NoiseStream& ns, bool signs_on = true) {
  using detail::AdaptiveLeg;
  AdaptiveLeg fine, coarse;
  fine.s = {x0, u0, 0.0, +1, 0};
  coarse.s = fine.s;

  const auto schedule = [&](AdaptiveLeg& leg, double base) {
    double h = adaptive_step_size(leg.s.x, base, x_adapt, p);
    if (leg.s.t + h >= T) {
      h = T - leg.s.t;
      leg.t_next = T;
    } else {
      leg.t_next = leg.s.t + h;
    }
    leg.h_cur = h;
  };
  schedule(fine, h_base);
  schedule(coarse, 2.0 * h_base);

  const auto take_step = [&](AdaptiveLeg& leg, bool is_coarse) {
    double xi_eq = 0.0;
    if (ig == Integrator::se) {
      const double dw = adaptive_increment_se(leg.xi, leg.dtau, leg.signs,
                                              is_coarse ? leg.s.parity : 1, is_coarse);
      xi_eq = dw / std::sqrt(leg.h_cur);
    } else {
      const double g = adaptive_increment_gl(leg.xi, leg.dtau, leg.lam, leg.signs,
                                             is_coarse ? leg.s.parity : 1, is_coarse);
      xi_eq = g / ou_noise_sd(leg.lam.front(), leg.h_cur);
    }
    leg.s = step(ig, leg.s, leg.h_cur, xi_eq, p).state;
    leg.s.t = leg.t_next;
    ++leg.steps;
    leg.clear_pending();
  };

  const std::int64_t max_iter = 256 * std::int64_t(std::ceil(T / h_base)) + 256;
  std::int64_t iter = 0;
  double t = 0.0;
  while (!fine.done || !coarse.done) {
    const double tau_next = std::min(fine.done ? T : fine.t_next,
                                     coarse.done ? T : coarse.t_next);
    const double dt = tau_next - t;
    if (dt > 0.0) {
      const double xi = ns.next();
      const int sf = signs_on ? fine.s.parity : 1;
      if (!fine.done) {
        fine.xi.push_back(xi);
        fine.dtau.push_back(dt);
        fine.lam.push_back(sde_coeffs(fine.s.x, p).lambda);
        fine.signs.push_back(1);
      }
      if (!coarse.done) {
        coarse.xi.push_back(xi);
        coarse.dtau.push_back(dt);
        coarse.lam.push_back(sde_coeffs(coarse.s.x, p).lambda);
        coarse.signs.push_back(sf);
      }
    }
    if (!fine.done && fine.t_next == tau_next) {
      take_step(fine, false);
      if (fine.t_next >= T) fine.done = true;
      else schedule(fine, h_base);
    }
    if (!coarse.done && coarse.t_next == tau_next) {
      take_step(coarse, true);
      if (coarse.t_next >= T) coarse.done = true;
      else schedule(coarse, 2.0 * h_base);
    }
    t = tau_next;
    if (++iter > max_iter)
      throw UnstableStepError("adaptive coupled pair exceeded step budget");
  }
  return {fine.s, coarse.s, fine.steps + coarse.steps};
}

/// Options shared by all sampling routines.
struct SampleOptions {
  bool signs_on = true;
  bool adaptive = false;
  double x_adapt = 0.05;
};

struct SampleOutcome {
  bool ok = true;
  std::int64_t steps = 0;
};

/// One level-0 sample: a single path at the coarsest step, QoI into y.
inline SampleOutcome level0_sample(const QoISpec& qoi, const SmoothingPolynomial& poly,
                                   Integrator ig, const ModelParams& p, double x0,
                                   double u0, double T, std::int64_t M0,
                                   NoiseStream& ns, const SampleOptions& opt,
                                   std::span<double> y) {
  try {
    const PathResult r =
        opt.adaptive
            ? simulate_path_adaptive(ig, p, x0, u0, T, T / double(M0), opt.x_adapt, ns)
            : simulate_path(ig, p, x0, u0, T, M0, ns);
    evaluate(qoi, poly, r.state, y);
    return {true, r.steps};
  } catch (const UnstableStepError&) {
    return {false, 0};
  }
}

/// One multilevel difference sample on level l >= 1: fine path with
/// M0 2^l steps, coarse path with half as many, both driven by the same
/// noise; y receives the fine-minus-coarse QoI difference.
inline SampleOutcome difference_sample(int level, const QoISpec& qoi,
                                       const SmoothingPolynomial& poly, Integrator ig,
                                       const ModelParams& p, double x0, double u0,
                                       double T, std::int64_t M0, NoiseStream& ns,
                                       const SampleOptions& opt, std::span<double> y,
                                       std::span<double> scratch) {
  const std::int64_t M = M0 << level;
  try {
    const PairResult r =
        opt.adaptive
            ? simulate_pair_adaptive(ig, p, x0, u0, T, T / double(M), opt.x_adapt, ns,
                                     opt.signs_on)
            : simulate_pair(ig, p, x0, u0, T, M, ns, opt.signs_on);
    evaluate(qoi, poly, r.fine, y);
    evaluate(qoi, poly, r.coarse, scratch);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= scratch[i];
    return {true, r.steps};
  } catch (const UnstableStepError&) {
    return {false, 0};
  }
}

}  // namespace ablmc
