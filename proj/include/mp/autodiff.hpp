#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mp/grid.hpp"
#include "mp/index_store.hpp"
#include "mp/parallel.hpp"
#include "mp/potentials.hpp"

namespace mp {

template <class Real>
struct GradientSet {
  std::vector<Real> unary;                      // N*L
  std::vector<Real> pairwise;                   // L*L compatibility table
  std::vector<std::vector<Real>> edge_weights;  // one plane per direction family

  // For constant edge weights the scalar gradient is the sum over all planes.
  Real edge_weight_total() const {
    Real s = Real(0);
    for (const auto& p : edge_weights) s = std::accumulate(p.begin(), p.end(), s);
    return s;
  }
};

namespace detail {

template <class Real>
GradientSet<Real> make_gradients(const GridTopology& topo, int labels,
                                 const std::vector<Real>& grad_cost) {
  const int n = topo.grid().nodes();
  if (grad_cost.size() != static_cast<std::size_t>(n) * labels)
    throw std::invalid_argument("backward: cost gradient size mismatch");
  GradientSet<Real> g;
  g.unary = grad_cost;  // c = theta + sum_r m, so d c/d theta starts as identity
  g.pairwise.assign(static_cast<std::size_t>(labels) * labels, Real(0));
  g.edge_weights.assign(topo.num_dirs() / 2, std::vector<Real>(n, Real(0)));
  return g;
}

// Undoes the min-subtraction reparametrization: out = raw - raw[q], so every
// lane's gradient also flows negatively into the argmin lane q.
template <class Real>
inline void reparam_backward(Real* row, int labels, int q) {
  Real sum = Real(0);
  for (int l = 0; l < labels; ++l) sum += row[l];
  row[q] -= sum;
}

}  // namespace detail

/// Reverse-mode pass matching isgmr_forward. Replays the recorded argmin and
/// reparametrization indices backwards: iterations last-to-first, each
/// direction's scanlines walked tail-to-head. Message gradients are double
/// buffered -- `gm` carries gradients of the in-flight sweep buffer while
/// `gm_next` collects those of the previous iteration's published messages,
/// mirroring the forward's publish-after-all-directions barrier.
template <class Real>
GradientSet<Real> isgmr_backward(const GridTopology& topo, const PotentialSet<Real>& pots,
                                 const IndexStore& indices, const std::vector<Real>& grad_cost,
                                 int threads = 1) {
  const int L = pots.unary.labels;
  const int n = topo.grid().nodes();
  const int R = topo.num_dirs();
  GradientSet<Real> grads = detail::make_gradients(topo, L, grad_cost);

  std::vector<Real> gm(static_cast<std::size_t>(R) * n * L);
  for (int r = 0; r < R; ++r)
    std::copy(grad_cost.begin(), grad_cost.end(), gm.begin() + static_cast<std::size_t>(r) * n * L);
  std::vector<Real> gm_next(gm.size(), Real(0));

  for (int k = indices.iterations() - 1; k >= 0; --k) {
    for (int r = 0; r < R; ++r) {
      const int opp = topo.dirs()[r].opposite;
      const auto& lines = topo.scanlines(r);
      std::vector<std::vector<Real>> vpart(lines.size());

      parallel_for(static_cast<std::int64_t>(lines.size()), threads, [&](std::int64_t t) {
        const Scanline& sl = lines[t];
        std::vector<Real>& vp = vpart[t];
        vp.assign(static_cast<std::size_t>(L) * L, Real(0));
        Real* gr = gm.data() + static_cast<std::size_t>(r) * n * L;

        for (std::size_t j = sl.nodes.size(); j-- > 1;) {
          const int prev = sl.nodes[j - 1];
          const int cur = sl.nodes[j];
          const int edge = topo.edge_index(r, cur);
          const Real w = pots.weights.weight(r, prev, cur);
          const int fam = r >> 1;
          const int wnode = EdgeWeights<Real>::plane_node(r, prev, cur);
          const std::uint8_t* p = indices.p_row(topo, k, r, edge);
          Real* row = gr + static_cast<std::size_t>(cur) * L;
          detail::reparam_backward(row, L, indices.q_at(topo, k, r, edge));

          for (int l = 0; l < L; ++l) {
            const Real g = row[l];
            if (g == Real(0)) continue;
            const int mu = p[l];
            grads.unary[static_cast<std::size_t>(prev) * L + mu] += g;
            gr[static_cast<std::size_t>(prev) * L + mu] += g;
            for (int d = 0; d < R; ++d) {
              if (d == r || d == opp) continue;
              gm_next[(static_cast<std::size_t>(d) * n + prev) * L + mu] += g;
            }
            const Real vval = (r & 1) ? pots.pairwise(l, mu) : pots.pairwise(mu, l);
            grads.edge_weights[fam][wnode] += g * vval;
            if (r & 1)
              vp[static_cast<std::size_t>(l) * L + mu] += g * w;
            else
              vp[static_cast<std::size_t>(mu) * L + l] += g * w;
          }
        }
      });
      for (const auto& vp : vpart)
        for (std::size_t i = 0; i < vp.size(); ++i) grads.pairwise[i] += vp[i];
    }
    gm.swap(gm_next);
    std::fill(gm_next.begin(), gm_next.end(), Real(0));
  }
  return grads;
}

/// Reverse-mode pass matching trwp_forward. Directions are replayed strictly
/// in reverse of the forward order over a single message-gradient buffer; a
/// direction's gradient plane is consumed and then cleared so that later
/// (earlier-in-forward-order) directions accumulate gradients for the plane's
/// previous-iteration contents.
template <class Real>
GradientSet<Real> trwp_backward(const GridTopology& topo, const PotentialSet<Real>& pots,
                                const TreeCoefficients<Real>& rho, const IndexStore& indices,
                                const std::vector<Real>& grad_cost, int threads = 1) {
  const int L = pots.unary.labels;
  const int n = topo.grid().nodes();
  const int R = topo.num_dirs();
  GradientSet<Real> grads = detail::make_gradients(topo, L, grad_cost);

  std::vector<Real> gm(static_cast<std::size_t>(R) * n * L);
  for (int r = 0; r < R; ++r)
    std::copy(grad_cost.begin(), grad_cost.end(), gm.begin() + static_cast<std::size_t>(r) * n * L);

  for (int k = indices.iterations() - 1; k >= 0; --k) {
    for (int r = R - 1; r >= 0; --r) {
      const int opp = topo.dirs()[r].opposite;
      const auto& lines = topo.scanlines(r);
      std::vector<std::vector<Real>> vpart(lines.size());

      parallel_for(static_cast<std::int64_t>(lines.size()), threads, [&](std::int64_t t) {
        const Scanline& sl = lines[t];
        std::vector<Real>& vp = vpart[t];
        vp.assign(static_cast<std::size_t>(L) * L, Real(0));
        Real* gr = gm.data() + static_cast<std::size_t>(r) * n * L;

        for (std::size_t j = sl.nodes.size(); j-- > 1;) {
          const int prev = sl.nodes[j - 1];
          const int cur = sl.nodes[j];
          const int edge = topo.edge_index(r, cur);
          const Real w = pots.weights.weight(r, prev, cur);
          const Real rho_r = rho.at(r, prev, cur);
          const int fam = r >> 1;
          const int wnode = EdgeWeights<Real>::plane_node(r, prev, cur);
          const std::uint8_t* p = indices.p_row(topo, k, r, edge);
          Real* row = gr + static_cast<std::size_t>(cur) * L;
          detail::reparam_backward(row, L, indices.q_at(topo, k, r, edge));

          for (int l = 0; l < L; ++l) {
            const Real g = row[l];
            if (g == Real(0)) continue;
            const int mu = p[l];
            grads.unary[static_cast<std::size_t>(prev) * L + mu] += rho_r * g;
            for (int d = 0; d < R; ++d)
              gm[(static_cast<std::size_t>(d) * n + prev) * L + mu] += rho_r * g;
            gm[(static_cast<std::size_t>(opp) * n + prev) * L + mu] -= g;
            const Real vval = (r & 1) ? pots.pairwise(l, mu) : pots.pairwise(mu, l);
            grads.edge_weights[fam][wnode] += g * vval;
            if (r & 1)
              vp[static_cast<std::size_t>(l) * L + mu] += g * w;
            else
              vp[static_cast<std::size_t>(mu) * L + l] += g * w;
          }
        }
      });
      for (const auto& vp : vpart)
        for (std::size_t i = 0; i < vp.size(); ++i) grads.pairwise[i] += vp[i];

      // Plane r's gradients are fully consumed; contributions arriving from
      // here on belong to its previous-iteration contents.
      std::fill(gm.begin() + static_cast<std::size_t>(r) * n * L,
                gm.begin() + static_cast<std::size_t>(r + 1) * n * L, Real(0));
    }
  }
  return grads;
}

}  // namespace mp
