#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "ablmc/model.hpp"
#include "ablmc/particle.hpp"

namespace ablmc {

enum class Integrator { se, gl, baoab };

inline std::string to_string(Integrator ig) {
  switch (ig) {
    case Integrator::se: return "se";
    case Integrator::gl: return "gl";
    case Integrator::baoab: return "baoab";
  }
  return "?";
}

struct StepRecord {
  ParticleState state;
  int reflections = 0;       ///< reflections during this step
  double noise = 0.0;        ///< the standard normal consumed
  int parity_at_noise = +1;  ///< parity at the moment the noise term applies
};

/// Exact OU decay factor e^{-lambda h}.
inline double ou_decay(double lam, double h) { return std::exp(-lam * h); }

/// Standard deviation of the exact one-step OU noise,
/// sqrt((1 - e^{-2 lambda h}) / (2 lambda)).
inline double ou_noise_sd(double lam, double h) {
  return std::sqrt(-std::expm1(-2.0 * lam * h) / (2.0 * lam));
}

/// Timestep bound below which the symplectic Euler update is stable
/// everywhere in the domain: 2 / lambda(eps_reg).
inline double se_stability_limit(const ModelParams& p) {
  return 2.0 / sde_coeffs(p.eps_reg, p).lambda;
}

/// Symplectic Euler step:
///   U' = (1 - lambda(X) h) U - dV/dX(X,U) h + sigma(X) sqrt(h) xi
///   X' = X + U' h, then reflect.
/// Stable only for h < 2/lambda(X); validate configurations against
/// se_stability_limit() before running.
inline StepRecord se_step(const ParticleState& s, double h, double xi,
                          const ModelParams& p) {
  const SdeCoeffs c = sde_coeffs(s.x, p);
  const double u1 =
      (1.0 - c.lambda * h) * s.u - dv_dx(c, s.u) * h + c.sigma * std::sqrt(h) * xi;
  const double x1 = s.x + u1 * h;
  const ReflectOutcome r = reflect(x1, u1, p.H, s.parity, s.n_refl);
  return {{r.x, r.u, s.t + h, r.parity, r.n_refl}, r.count, xi, s.parity};
}

/// Geometric Langevin (OBA) step: exact OU update of U, explicit Euler for
/// the B- and A-parts, all coefficients evaluated at the step start.
/// Unconditionally stable in lambda.
inline StepRecord gl_step(const ParticleState& s, double h, double xi,
                          const ModelParams& p) {
  const SdeCoeffs c = sde_coeffs(s.x, p);
  const double ustar =
      ou_decay(c.lambda, h) * s.u + c.sigma * ou_noise_sd(c.lambda, h) * xi;
  const double u1 = ustar - dv_dx(c, ustar) * h;
  const double x1 = s.x + u1 * h;
  const ReflectOutcome r = reflect(x1, u1, p.H, s.parity, s.n_refl);
  return {{r.x, r.u, s.t + h, r.parity, r.n_refl}, r.count, xi, s.parity};
}

namespace detail {

/// BAOAB step. Reflection is applied after each A-half-step so profile
/// evaluations never see a height outside [0, H]; the O-step coefficients are
/// evaluated at the (possibly reflected) mid-step position. When
/// scale_noise_by_parity is set the O-step consumes parity_mid * xi instead
/// of xi; the coupled coarse path uses this to apply its reflection factor at
/// the moment the noise enters.
inline StepRecord baoab_step_impl(const ParticleState& s, double h, double xi,
                                  const ModelParams& p,
                                  bool scale_noise_by_parity) {
  const double h2 = 0.5 * h;
  const SdeCoeffs c0 = sde_coeffs(s.x, p);
  const double uh = s.u - dv_dx(c0, s.u) * h2;
  const ReflectOutcome r1 = reflect(s.x + uh * h2, uh, p.H, s.parity, s.n_refl);
  const SdeCoeffs cm = sde_coeffs(r1.x, p);
  const double xi_eff = scale_noise_by_parity ? r1.parity * xi : xi;
  const double us =
      ou_decay(cm.lambda, h) * r1.u + cm.sigma * ou_noise_sd(cm.lambda, h) * xi_eff;
  const ReflectOutcome r2 = reflect(r1.x + us * h2, us, p.H, r1.parity, r1.n_refl);
  const SdeCoeffs c1 = sde_coeffs(r2.x, p);
  const double u1 = r2.u - dv_dx(c1, r2.u) * h2;
  return {{r2.x, u1, s.t + h, r2.parity, r2.n_refl}, r1.count + r2.count, xi,
          r1.parity};
}

}  // namespace detail

/// BAOAB step: B(h/2), A(h/2), O(h) at the mid-step position, A(h/2), B(h/2),
/// one noise draw per full step.
inline StepRecord baoab_step(const ParticleState& s, double h, double xi,
                             const ModelParams& p) {
  return detail::baoab_step_impl(s, h, xi, p, false);
}

inline StepRecord step(Integrator ig, const ParticleState& s, double h,
                       double xi, const ModelParams& p) {
  switch (ig) {
    case Integrator::se: return se_step(s, h, xi, p);
    case Integrator::gl: return gl_step(s, h, xi, p);
    case Integrator::baoab: return detail::baoab_step_impl(s, h, xi, p, false);
  }
  throw std::logic_error("unknown integrator");
}

// ---------------------------------------------------------------------------
// Boundary-free extended dynamics (test oracle).
//
// The domain is extended periodically to the whole real line: with
// n(x) = 2n for x in [(2n-1)H, (2n+1)H), eta(x) = x - n(x) H maps x to
// [-H, H), and the physical state is recovered through the sign map
// (U, X) = sign(eta(x~)) * (u~, eta(x~)). A path of the extended SDE driven
// by sign-adjusted noise reproduces the reflected path exactly; the
// integrators above are validated against this oracle.
// ---------------------------------------------------------------------------

struct ExtendedState {
  double x = 0.0;  ///< unbounded position
  double u = 0.0;
  double t = 0.0;
};

/// eta(x) = x - n(x) H in [-H, H).
inline double fold_height(double x, double H) {
  return x - 2.0 * H * std::floor(x / (2.0 * H) + 0.5);
}

/// Sign of the folded height; +1 on [0, H), -1 on [-H, 0).
inline int fold_sign(double x, double H) {
  return fold_height(x, H) >= 0.0 ? +1 : -1;
}

/// One step of the extended SDE. `xi` is the reflected-frame draw; the
/// oracle applies its own current sign internally (xi~ = S xi), so the same
/// noise sequence drives both the reflected path and this oracle.
inline ExtendedState extended_step_oracle(const ExtendedState& s, double h,
                                          double xi, const ModelParams& p,
                                          Integrator ig) {
  const auto folded = [&](double xt) {
    const double eta = fold_height(xt, p.H);
    const int sign = eta >= 0.0 ? +1 : -1;
    return std::pair<double, int>{sign * eta, sign};  // (physical X, S)
  };

  const auto [X0, S0] = folded(s.x);
  const SdeCoeffs c0 = sde_coeffs(X0, p);
  switch (ig) {
    case Integrator::se: {
      // A_ext(x,u) = -lambda(X) u - S dV/dX(X, S u), B_ext = sigma(X)
      const double u1 = (1.0 - c0.lambda * h) * s.u - S0 * dv_dx(c0, S0 * s.u) * h +
                        c0.sigma * std::sqrt(h) * (S0 * xi);
      return {s.x + u1 * h, u1, s.t + h};
    }
    case Integrator::gl: {
      const double ustar = ou_decay(c0.lambda, h) * s.u +
                           c0.sigma * ou_noise_sd(c0.lambda, h) * (S0 * xi);
      const double u1 = ustar - S0 * dv_dx(c0, S0 * ustar) * h;
      return {s.x + u1 * h, u1, s.t + h};
    }
    case Integrator::baoab: {
      const double h2 = 0.5 * h;
      const double uh = s.u - S0 * dv_dx(c0, S0 * s.u) * h2;
      const double xh = s.x + uh * h2;
      const auto [Xm, Sm] = folded(xh);
      const SdeCoeffs cm = sde_coeffs(Xm, p);
      const double us = ou_decay(cm.lambda, h) * uh +
                        cm.sigma * ou_noise_sd(cm.lambda, h) * (Sm * xi);
      const double x1 = xh + us * h2;
      const auto [X1, S1] = folded(x1);
      const SdeCoeffs c1 = sde_coeffs(X1, p);
      const double u1 = us - S1 * dv_dx(c1, S1 * us) * h2;
      return {x1, u1, s.t + h};
    }
  }
  throw std::logic_error("unknown integrator");
}

}  // namespace ablmc
