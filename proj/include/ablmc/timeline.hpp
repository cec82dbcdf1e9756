#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "ablmc/integrators.hpp"
#include "ablmc/model.hpp"

namespace ablmc {

/// Position-dependent step size min{h, lambda(x_adapt)/lambda(x) * h}.
/// Equals h whenever x >= x_adapt since lambda is nonincreasing; below
/// x_adapt the step shrinks so that h_n * lambda(x) never exceeds
/// h * lambda(x_adapt).
inline double adaptive_step_size(double x, double h, double x_adapt,
                                 const ModelParams& p) {
  const double lam_ref = sde_coeffs(x_adapt, p).lambda;
  const double lam_x = sde_coeffs(x, p).lambda;
  return std::min(h, (lam_ref / lam_x) * h);
}

enum class TimeOrigin { fine, coarse, both };

/// Sorted union of the fine and coarse time grids of one coupled sample.
struct Timeline {
  std::vector<double> tau;
  std::vector<TimeOrigin> origin;
};

inline Timeline merged_timeline(std::span<const double> fine_times,
                                std::span<const double> coarse_times) {
  const auto check = [](std::span<const double> ts, const char* name) {
    if (ts.size() < 2) throw std::invalid_argument(std::string(name) + ": need at least two points");
    for (std::size_t i = 1; i < ts.size(); ++i)
      if (!(ts[i] > ts[i - 1]))
        throw std::invalid_argument(std::string(name) + ": times not strictly increasing");
  };
  check(fine_times, "merged_timeline: fine");
  check(coarse_times, "merged_timeline: coarse");
  if (fine_times.front() != coarse_times.front() || fine_times.back() != coarse_times.back())
    throw std::invalid_argument("merged_timeline: endpoints do not match");

  Timeline out;
  out.tau.reserve(fine_times.size() + coarse_times.size());
  std::size_t i = 0, j = 0;
  while (i < fine_times.size() || j < coarse_times.size()) {
    const bool take_f = j == coarse_times.size() ||
                        (i < fine_times.size() && fine_times[i] <= coarse_times[j]);
    const bool take_c = i == fine_times.size() ||
                        (j < coarse_times.size() && coarse_times[j] <= fine_times[i]);
    if (take_f && take_c) {
      out.tau.push_back(fine_times[i]);
      out.origin.push_back(TimeOrigin::both);
      ++i, ++j;
    } else if (take_f) {
      out.tau.push_back(fine_times[i]);
      out.origin.push_back(TimeOrigin::fine);
      ++i;
    } else {
      out.tau.push_back(coarse_times[j]);
      out.origin.push_back(TimeOrigin::coarse);
      ++j;
    }
  }
  return out;
}

/// Brownian increment over one path step assembled from the draws on its
/// sub-intervals: S_c * sum_j S_j^f xi_j sqrt(dtau_j). The reflection
/// factors enter only for the coarse path; the variance equals the interval
/// length either way.
inline double adaptive_increment_se(std::span<const double> xi,
                                    std::span<const double> dtau,
                                    std::span<const int> fine_signs,
                                    int coarse_sign, bool is_coarse) {
  double acc = 0.0;
  for (std::size_t j = 0; j < xi.size(); ++j) {
    const double s = is_coarse ? double(fine_signs[j]) : 1.0;
    acc += s * xi[j] * std::sqrt(dtau[j]);
  }
  return (is_coarse ? coarse_sign : 1) * acc;
}

/// OU-weighted increment over one path step: each xi_j carries the exact
/// one-substep OU amplitude sqrt((1 - e^{-2 lambda_j dtau_j})/(2 lambda_j))
/// and is damped by exp(-sum_{k>j} lambda_k dtau_k). Replaces the single-step
/// OU noise term of the geometric Langevin update. lambda_j is evaluated at
/// the path's own position at tau_j.
inline double adaptive_increment_gl(std::span<const double> xi,
                                    std::span<const double> dtau,
                                    std::span<const double> lambda_j,
                                    std::span<const int> fine_signs,
                                    int coarse_sign, bool is_coarse) {
  double acc = 0.0;
  double damp = 1.0;
  for (std::size_t r = xi.size(); r-- > 0;) {
    const double s = is_coarse ? double(fine_signs[r]) : 1.0;
    acc += s * xi[r] * ou_noise_sd(lambda_j[r], dtau[r]) * damp;
    damp *= std::exp(-lambda_j[r] * dtau[r]);
  }
  return (is_coarse ? coarse_sign : 1) * acc;
}

}  // namespace ablmc
