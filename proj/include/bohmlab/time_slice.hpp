#ifndef BOHMLAB_TIME_SLICE_HPP
#define BOHMLAB_TIME_SLICE_HPP

#include <vector>

#include "bohmlab/polar.hpp"
#include "bohmlab/stencil.hpp"

namespace bohmlab {

/// Polar fields at one time level with centered temporal and spatial
/// derivatives. Built from three consecutive snapshots; the outer snapshots'
/// phases are aligned node-by-node to the middle one before differencing.
struct PolarSlice {
  PolarPair prev;
  PolarPair pair;
  PolarPair next;
  RealField1D R_t, S_t, R_tt, S_tt;
  RealField1D R_x, S_x, R_xx, S_xx;
  /// union of the three snapshots' amplitude masks, dilated by the stencil radius
  std::vector<bool> mask;
};

inline PolarSlice polar_slice(const ComplexField1D& prev, const ComplexField1D& cur, const ComplexField1D& next,
                              double dt, double hbar) {
  PolarPair a = decompose(prev, hbar);
  PolarPair b = decompose(cur, hbar);
  PolarPair c = decompose(next, hbar);
  const RealField1D Sa = align_phase(b.S, a.S, hbar);
  const RealField1D Sc = align_phase(b.S, c.S, hbar);

  auto first = [dt](double m, double p) { return (p - m) / (2.0 * dt); };
  auto second = [dt](double m, double z, double p) { return (p - 2.0 * z + m) / (dt * dt); };

  std::vector<bool> mask(b.node_mask.size());
  for (std::size_t j = 0; j < mask.size(); ++j) mask[j] = a.node_mask[j] || b.node_mask[j] || c.node_mask[j];
  mask = dilate(mask, 1);

  a.S = Sa;
  c.S = Sc;
  PolarSlice s{
      a,
      b,
      c,
      pointwise(first, a.R, c.R),
      pointwise(first, Sa, Sc),
      pointwise(second, a.R, b.R, c.R),
      pointwise(second, Sa, b.S, Sc),
      d1(b.R),
      d1(b.S),
      d2(b.R),
      d2(b.S),
      std::move(mask),
  };
  return s;
}

}  // namespace bohmlab

#endif  // BOHMLAB_TIME_SLICE_HPP
