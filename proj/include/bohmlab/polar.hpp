#ifndef BOHMLAB_POLAR_HPP
#define BOHMLAB_POLAR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "bohmlab/grid.hpp"

namespace bohmlab {

/// Relative amplitude below which a node's phase is considered meaningless.
inline constexpr double node_mask_threshold = 1e-10;

/// psi = R exp(i S / hbar) with S stored unwrapped (continuous between
/// adjacent unmasked nodes). node_mask marks R < node_mask_threshold * max R;
/// S at masked nodes is interpolated and must not be trusted.
struct PolarPair {
  RealField1D R;
  RealField1D S;
  std::vector<bool> node_mask;

  std::size_t masked_count() const {
    return static_cast<std::size_t>(std::count(node_mask.begin(), node_mask.end(), true));
  }
  double masked_fraction() const {
    return static_cast<double>(masked_count()) / static_cast<double>(node_mask.size());
  }
};

inline std::vector<bool> amplitude_mask(const std::vector<double>& R) {
  const double peak = R.empty() ? 0.0 : *std::max_element(R.begin(), R.end());
  const double eps = node_mask_threshold * peak;
  std::vector<bool> mask(R.size());
  for (std::size_t j = 0; j < R.size(); ++j) mask[j] = !(R[j] >= eps) || R[j] == 0.0;
  return mask;
}

/// Grows a mask by `radius` nodes on each side: derivatives at a node whose
/// stencil reaches a masked neighbour are untrusted too.
inline std::vector<bool> dilate(const std::vector<bool>& mask, std::size_t radius) {
  const std::size_t n = mask.size();
  std::vector<bool> out(n, false);
  for (std::size_t j = 0; j < n; ++j) {
    if (!mask[j]) continue;
    const std::size_t lo = j >= radius ? j - radius : 0;
    const std::size_t hi = std::min(n - 1, j + radius);
    for (std::size_t i = lo; i <= hi; ++i) out[i] = true;
  }
  return out;
}

/// Splits psi into amplitude and unwrapped action. Unwrapping runs left to
/// right across unmasked nodes, replacing each phase jump by its principal
/// value in [-pi, pi]; masked nodes are filled by linear interpolation from the
/// nearest unmasked neighbours (constant extension at the edges).
inline PolarPair decompose(const ComplexField1D& psi, double hbar) {
  const std::size_t n = psi.size();
  std::vector<double> R(n), S(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) R[j] = std::abs(psi[j]);
  std::vector<bool> mask = amplitude_mask(R);

  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<std::size_t> live;
  live.reserve(n);
  double prev_arg = 0.0;
  double prev_phase = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (mask[j]) continue;
    const double arg = std::arg(psi[j]);
    const double phase = live.empty() ? arg : prev_phase + std::remainder(arg - prev_arg, two_pi);
    S[j] = hbar * phase;
    prev_arg = arg;
    prev_phase = phase;
    live.push_back(j);
  }

  if (!live.empty()) {
    for (std::size_t j = 0; j < live.front(); ++j) S[j] = S[live.front()];
    for (std::size_t j = live.back() + 1; j < n; ++j) S[j] = S[live.back()];
    for (std::size_t k = 0; k + 1 < live.size(); ++k) {
      const std::size_t a = live[k], b = live[k + 1];
      for (std::size_t j = a + 1; j < b; ++j) {
        const double w = static_cast<double>(j - a) / static_cast<double>(b - a);
        S[j] = (1.0 - w) * S[a] + w * S[b];
      }
    }
  }
  return PolarPair{RealField1D(psi.grid(), std::move(R)), RealField1D(psi.grid(), std::move(S)), std::move(mask)};
}

inline ComplexField1D recompose(const PolarPair& pair, double hbar) {
  std::vector<complex> out(pair.R.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    if (pair.R[j] < 0.0) throw Error(ErrorKind::invalid_constant, "amplitude R must be non-negative");
    out[j] = std::polar(pair.R[j], pair.S[j] / hbar);
  }
  return ComplexField1D(pair.R.grid(), std::move(out));
}

struct UWSplit {
  RealField1D U;
  RealField1D W;
  /// max |U^2 + W^2 - R^2|
  double amplitude_mismatch;
  /// max distance between S and hbar*atan2(W, U) modulo 2*pi*hbar, unmasked nodes only
  double phase_mismatch;
};

inline UWSplit split_uw(const PolarPair& pair, double hbar) {
  const std::size_t n = pair.R.size();
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> U(n), W(n);
  double amp = 0.0, phase = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double theta = pair.S[j] / hbar;
    U[j] = pair.R[j] * std::cos(theta);
    W[j] = pair.R[j] * std::sin(theta);
    amp = std::max(amp, std::abs(U[j] * U[j] + W[j] * W[j] - pair.R[j] * pair.R[j]));
    if (!pair.node_mask.empty() && pair.node_mask[j]) continue;
    if (pair.R[j] == 0.0) continue;
    const double back = std::atan2(W[j], U[j]);
    phase = std::max(phase, hbar * std::abs(std::remainder(theta - back, two_pi)));
  }
  return UWSplit{RealField1D(pair.R.grid(), std::move(U)), RealField1D(pair.R.grid(), std::move(W)), amp, phase};
}

/// Shifts each node of S by the multiple of 2*pi*hbar that brings it closest
/// to the matching node of reference (temporal unwrapping between snapshots).
inline RealField1D align_phase(const RealField1D& reference, const RealField1D& S, double hbar) {
  const double period = 2.0 * std::numbers::pi * hbar;
  std::vector<double> out(S.size());
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = S[j] + period * std::round((reference[j] - S[j]) / period);
  return RealField1D(S.grid(), std::move(out));
}

}  // namespace bohmlab

#endif  // BOHMLAB_POLAR_HPP
