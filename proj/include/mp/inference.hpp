#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "mp/grid.hpp"
#include "mp/index_store.hpp"
#include "mp/potentials.hpp"

namespace mp {

/// Aggregated per-node costs and the winner-takes-all labelling.
template <class Real>
struct CostOutput {
  int height = 0, width = 0, labels = 0;
  std::vector<Real> cost;            // H*W*L, label fastest
  std::vector<std::uint16_t> labels_map;  // H*W argmin labels, ties to lowest

  const Real* row(int node) const { return cost.data() + static_cast<std::size_t>(node) * labels; }
};

template <class Real>
void argmin_labels(CostOutput<Real>& out) {
  const int L = out.labels;
  const int n = out.height * out.width;
  out.labels_map.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    const Real* c = out.row(i);
    int best = 0;
    for (int l = 1; l < L; ++l)
      if (c[l] < c[best]) best = l;
    out.labels_map[i] = static_cast<std::uint16_t>(best);
  }
}

/// c_i(lambda) = theta_i(lambda) + sum_r m^r_i(lambda).
template <class Real>
CostOutput<Real> aggregate_costs(const GridTopology& topo, const UnaryVolume<Real>& unary,
                                 const std::vector<Real>& messages) {
  const int n = unary.nodes();
  const int L = unary.labels;
  const int R = topo.num_dirs();
  CostOutput<Real> out;
  out.height = unary.height;
  out.width = unary.width;
  out.labels = L;
  out.cost = unary.values;
  for (int r = 0; r < R; ++r) {
    const Real* m = messages.data() + static_cast<std::size_t>(r) * n * L;
    for (std::size_t i = 0; i < static_cast<std::size_t>(n) * L; ++i) out.cost[i] += m[i];
  }
  argmin_labels(out);
  return out;
}

/// Everything a forward pass produces: aggregated costs, final messages,
/// recorded argmin indices, and the smallest argmin gap seen (used by the
/// gradient checker to detect near-ties before finite differencing).
template <class Real>
struct ForwardResult {
  CostOutput<Real> output;
  std::vector<Real> messages;
  IndexStore indices;
  Real min_argmin_gap;
};

}  // namespace mp
