#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace ablmc {

/// Thrown when a step leaves the state non-finite or further than 10 H from
/// the domain. Signals an unstable integrator step; estimators catch it and
/// count the sample as failed instead of reflecting indefinitely.
class UnstableStepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParticleState {
  double x = 0.0;
  double u = 0.0;
  double t = 0.0;
  int parity = +1;            ///< (-1)^n_refl
  std::int64_t n_refl = 0;    ///< reflections since release
};

struct ReflectOutcome {
  double x;
  double u;
  int parity;
  std::int64_t n_refl;
  int count;  ///< reflections applied by this call
};

/// Elastic reflection at both boundaries: x -> -x (ground) or x -> 2H - x
/// (top) with u -> -u, repeated until x lands in [0, H]. The parity flips
/// once per reflection.
inline ReflectOutcome reflect(double x, double u, double H, int parity,
                              std::int64_t n_refl) {
  if (!std::isfinite(x) || !std::isfinite(u) || std::abs(x) > 10.0 * H)
    throw UnstableStepError("reflect: state out of range (|x| > 10 H or non-finite)");
  int count = 0;
  while (x < 0.0 || x > H) {
    x = (x < 0.0) ? -x : 2.0 * H - x;
    u = -u;
    parity = -parity;
    ++n_refl;
    ++count;
  }
  return {x, u, parity, n_refl, count};
}

}  // namespace ablmc
