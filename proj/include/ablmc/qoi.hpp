#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ablmc/particle.hpp"

namespace ablmc {

/// Polynomial p_r of degree <= r+1 with p_r(-1) = 1, p_r(1) = 0 and the first
/// r moments over [-1, 1] matching those of the step function:
/// int s^j p_r(s) ds = (-1)^j / (j+1) for j = 0..r-1. Used to smooth
/// indicator-function quantities of interest.
struct SmoothingPolynomial {
  int r = 0;
  std::vector<double> coeffs;  ///< coeffs[i] multiplies s^i, size r+2

  double eval(double s) const {
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * s + coeffs[i];
    return acc;
  }
};

/// Solves the (r+2)x(r+2) endpoint-and-moment system by dense elimination
/// with partial pivoting. Raises on a numerically singular system.
inline SmoothingPolynomial build_smoothing_polynomial(int r) {
  if (r < 0 || r > 12)
    throw std::invalid_argument("build_smoothing_polynomial: r must be in [0, 12]");
  const int n = r + 2;
  std::vector<double> A(std::size_t(n) * n, 0.0);
  std::vector<double> b(n, 0.0);
  const auto at = [&](int row, int col) -> double& { return A[std::size_t(row) * n + col]; };

  for (int i = 0; i < n; ++i) {
    at(0, i) = (i % 2 == 0) ? 1.0 : -1.0;  // p(-1) = 1
    at(1, i) = 1.0;                        // p(1) = 0
  }
  b[0] = 1.0;
  b[1] = 0.0;
  for (int j = 0; j < r; ++j) {
    for (int i = 0; i < n; ++i)
      at(2 + j, i) = ((i + j) % 2 == 1) ? 0.0 : 2.0 / double(i + j + 1);
    b[2 + j] = ((j % 2 == 0) ? 1.0 : -1.0) / double(j + 1);
  }

  // Gaussian elimination with partial pivoting.
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int row = col + 1; row < n; ++row)
      if (std::abs(at(row, col)) > std::abs(at(piv, col))) piv = row;
    if (std::abs(at(piv, col)) < 1e-14)
      throw std::runtime_error("build_smoothing_polynomial: singular moment system");
    if (piv != col) {
      for (int k = 0; k < n; ++k) std::swap(at(piv, k), at(col, k));
      std::swap(b[piv], b[col]);
    }
    for (int row = col + 1; row < n; ++row) {
      const double f = at(row, col) / at(col, col);
      for (int k = col; k < n; ++k) at(row, k) -= f * at(col, k);
      b[row] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (int row = n - 1; row >= 0; --row) {
    double acc = b[row];
    for (int k = row + 1; k < n; ++k) acc -= at(row, k) * x[k];
    x[row] = acc / at(row, row);
  }
  return {r, std::move(x)};
}

/// Smoothed step function: 1 below -1, p_r on [-1, 1], 0 above 1.
inline double g_r(double x, const SmoothingPolynomial& poly) {
  if (x < -1.0) return 1.0;
  if (x > 1.0) return 0.0;
  return poly.eval(x);
}

/// Smoothed box indicator g_r((x-b)/delta) - g_r((x-a)/delta). Vanishes
/// outside [a - delta, b + delta]; equals 1 on [a + delta, b - delta] when
/// the box is wider than 2 delta.
inline double smoothed_indicator(double x, double a, double b,
                                 const SmoothingPolynomial& poly, double delta) {
  return g_r((x - b) / delta, poly) - g_r((x - a) / delta, poly);
}

enum class QoIKind { mean_position, smoothed_indicator, raw_indicator, binned_field };

inline std::string to_string(QoIKind k) {
  switch (k) {
    case QoIKind::mean_position: return "mean-position";
    case QoIKind::smoothed_indicator: return "smoothed-indicator";
    case QoIKind::raw_indicator: return "raw-indicator";
    case QoIKind::binned_field: return "binned-field";
  }
  return "?";
}

/// Selects the terminal-state functional to estimate.
struct QoISpec {
  QoIKind kind = QoIKind::mean_position;
  double a = 0.1055;   ///< box lower edge (indicator kinds)
  double b = 0.1555;   ///< box upper edge
  int r = 4;           ///< smoothing moment order
  double delta = 0.1;  ///< smoothing width
  std::vector<double> bin_edges;  ///< binned kind: a_0 = 0 < ... < a_k = H

  std::size_t size() const {
    return kind == QoIKind::binned_field ? bin_edges.size() - 1 : 1;
  }

  void validate(double H) const {
    switch (kind) {
      case QoIKind::mean_position:
        return;
      case QoIKind::smoothed_indicator:
      case QoIKind::raw_indicator:
        if (!(a < b)) throw std::invalid_argument("QoISpec: requires a < b");
        if (kind == QoIKind::smoothed_indicator && !(delta > 0.0))
          throw std::invalid_argument("QoISpec: requires delta > 0");
        return;
      case QoIKind::binned_field: {
        if (bin_edges.size() < 2)
          throw std::invalid_argument("QoISpec: binned field needs at least one bin");
        if (bin_edges.front() != 0.0 || bin_edges.back() != H)
          throw std::invalid_argument("QoISpec: bin edges must span [0, H]");
        for (std::size_t i = 1; i < bin_edges.size(); ++i)
          if (!(bin_edges[i] > bin_edges[i - 1]))
            throw std::invalid_argument("QoISpec: bin edges must be strictly increasing");
        if (!(delta > 0.0)) throw std::invalid_argument("QoISpec: requires delta > 0");
        return;
      }
    }
  }
};

inline std::vector<double> equidistant_edges(int bins, double H) {
  if (bins < 1) throw std::invalid_argument("equidistant_edges: bins must be >= 1");
  std::vector<double> e(bins + 1);
  for (int i = 0; i <= bins; ++i) e[i] = H * double(i) / double(bins);
  e.front() = 0.0;
  e.back() = H;
  return e;
}

/// Binned concentration field. Component i is the smoothed indicator of
/// [a_i, a_{i+1}] with the boundary g-terms pinned to their exact values
/// (0 at the ground edge, 1 at the top edge) so the components telescope and
/// sum to exactly 1 for every x in [0, H].
inline void binned_field(double x, const QoISpec& spec,
                         const SmoothingPolynomial& poly, std::span<double> out) {
  const std::size_t k = spec.bin_edges.size() - 1;
  double g_lo = 0.0;  // pinned g-term at the ground edge a_0
  for (std::size_t i = 0; i < k; ++i) {
    const double g_hi =
        (i + 1 == k) ? 1.0 : g_r((x - spec.bin_edges[i + 1]) / spec.delta, poly);
    out[i] = g_hi - g_lo;
    g_lo = g_hi;
  }
}

/// Evaluates the selected functional of the terminal position into `out`
/// (size spec.size()).
inline void evaluate(const QoISpec& spec, const SmoothingPolynomial& poly,
                     const ParticleState& terminal, std::span<double> out) {
  const double x = terminal.x;
  switch (spec.kind) {
    case QoIKind::mean_position:
      out[0] = x;
      return;
    case QoIKind::raw_indicator:
      out[0] = (x >= spec.a && x <= spec.b) ? 1.0 : 0.0;
      return;
    case QoIKind::smoothed_indicator:
      out[0] = smoothed_indicator(x, spec.a, spec.b, poly, spec.delta);
      return;
    case QoIKind::binned_field:
      binned_field(x, spec, poly, out);
      return;
  }
}

}  // namespace ablmc
