#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ablmc {

/// Boundary-layer turbulence profiles and the coefficients of the coupled
/// position-velocity SDE
///
///   dU = -lambda(X) U dt - dV/dX(X,U) dt + sigma(X) dW,   dX = U dt,
///
/// with
///
///   sigma_U(X) = kappa_sigma * u_star * (1 - X/H)^{3/4}
///   tau(X)     = kappa_tau * X / sigma_U(X),   lambda = 1/tau
///   sigma(X)   = sqrt(2 sigma_U^2 / tau)
///   V(X,U)     = -1/2 [sigma_U^2 + U^2 log(sigma_U^2 / sigma_U^2(x_ref))].
///
/// Near the ground and the top of the layer the profiles are frozen at
/// eps_reg (hard cutoff): every evaluation clamps the height to
/// [eps_reg, H - eps_reg], and inside the clamp zones all X-derivatives of
/// the profiles are exactly zero.
///
/// Units are nondimensional throughout: heights in X_ref, velocities in
/// U_ref, times in X_ref/U_ref.
struct ModelParams {
  double kappa_sigma = 1.3;
  double kappa_tau = 0.5;
  double u_star = 0.2;
  double H = 1.0;
  double eps_reg = 0.01;
  double x_ref = 1.0;  ///< reference height in the potential's logarithm
  double noise_scale = 1.0;  ///< multiplies sigma(X); 0 disables noise (test hook)

  void validate() const {
    if (!(kappa_sigma > 0.0) || !(kappa_tau > 0.0) || !(u_star > 0.0) || !(H > 0.0))
      throw std::invalid_argument(
          "ModelParams: kappa_sigma, kappa_tau, u_star and H must be positive");
    if (!(eps_reg > 0.0) || !(eps_reg < 0.5 * H))
      throw std::invalid_argument("ModelParams: eps_reg must lie in (0, H/2)");
    if (!(x_ref > 0.0) || !(x_ref <= H))
      throw std::invalid_argument("ModelParams: x_ref must lie in (0, H]");
    if (!(noise_scale >= 0.0))
      throw std::invalid_argument("ModelParams: noise_scale must be nonnegative");
  }
};

namespace detail {

inline void check_height(double x, const ModelParams& p) {
  if (!std::isfinite(x) || x < 0.0 || x > p.H)
    throw std::domain_error("height outside [0, H]");
}

}  // namespace detail

/// Height clamped to the regularised band [eps_reg, H - eps_reg].
inline double clamp_height(double x, const ModelParams& p) {
  return std::clamp(x, p.eps_reg, p.H - p.eps_reg);
}

/// All SDE coefficients at one height, sharing the profile evaluation.
/// Inputs must already be valid heights; no domain check here.
struct SdeCoeffs {
  double sigma_u2;   ///< sigma_U^2 at the clamped height
  double lambda;     ///< 1/tau
  double sigma;      ///< sqrt(2 sigma_U^2 lambda) * noise_scale
  double dsigma_u2;  ///< d(sigma_U^2)/dX, exactly 0 inside the clamp zones
};

inline SdeCoeffs sde_coeffs(double x, const ModelParams& p) {
  const double xc = clamp_height(x, p);
  const double a = p.kappa_sigma * p.u_star;
  const double t = 1.0 - xc / p.H;
  const double st = std::sqrt(t);
  const double sigma_u2 = a * a * t * st;         // a^2 t^{3/2}
  const double sigma_u = a * std::sqrt(t * st);   // a t^{3/4}
  const double lambda = sigma_u / (p.kappa_tau * xc);
  SdeCoeffs c;
  c.sigma_u2 = sigma_u2;
  c.lambda = lambda;
  c.sigma = p.noise_scale * std::sqrt(2.0 * sigma_u2 * lambda);
  c.dsigma_u2 = (x < p.eps_reg || x > p.H - p.eps_reg)
                    ? 0.0
                    : -1.5 * a * a * st / p.H;
  return c;
}

/// Turbulent velocity scale sigma_U at (clamped) height x.
inline double sigma_u(double x, const ModelParams& p) {
  detail::check_height(x, p);
  return std::sqrt(sde_coeffs(x, p).sigma_u2);
}

/// Velocity decorrelation time tau at (clamped) height x.
inline double tau(double x, const ModelParams& p) {
  detail::check_height(x, p);
  return 1.0 / sde_coeffs(x, p).lambda;
}

/// Inverse decorrelation time lambda = 1/tau; attains its maximum at eps_reg.
inline double lambda(double x, const ModelParams& p) {
  detail::check_height(x, p);
  return sde_coeffs(x, p).lambda;
}

/// Diffusion coefficient sigma = sqrt(2 sigma_U^2 / tau).
inline double diffusion_sigma(double x, const ModelParams& p) {
  detail::check_height(x, p);
  return sde_coeffs(x, p).sigma;
}

/// dV/dX given precomputed coefficients; zero inside the clamp zones.
inline double dv_dx(const SdeCoeffs& c, double u) {
  return -0.5 * (1.0 + u * u / c.sigma_u2) * c.dsigma_u2;
}

/// dV/dX = -1/2 (1 + U^2/sigma_U^2) d(sigma_U^2)/dX with the clamped profile.
inline double dV_dX(double x, double u, const ModelParams& p) {
  detail::check_height(x, p);
  if (!std::isfinite(u)) throw std::domain_error("velocity not finite");
  return dv_dx(sde_coeffs(x, p), u);
}

/// The potential V(X,U) itself; only its X-derivative enters the dynamics,
/// exposed for finite-difference checks.
inline double potential(double x, double u, const ModelParams& p) {
  detail::check_height(x, p);
  const double s2 = sde_coeffs(x, p).sigma_u2;
  const double s2ref = sde_coeffs(p.x_ref, p).sigma_u2;
  return -0.5 * (s2 + u * u * std::log(s2 / s2ref));
}

}  // namespace ablmc
