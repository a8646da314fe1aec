#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mp/grid.hpp"
#include "mp/index_store.hpp"
#include "mp/inference.hpp"
#include "mp/parallel.hpp"
#include "mp/potentials.hpp"

namespace mp {

/// Iterative revised SGM. One step() runs a full iteration: every direction
/// and every scanline updates the double-buffered messages
///   mhat^r_i(l) = min_mu [ theta_{i-r}(mu) + w * V(mu, l) + mhat^r_{i-r}(mu)
///                          + sum_{d not in {r, r-}} m^d_{i-r}(mu) ],
/// reparametrized to min 0 per node, with argmin indices recorded; m <- mhat
/// only after all directions finish. Directions and scanlines run in
/// parallel, nodes along a scanline sequentially; every message cell has one
/// writer, so results are bit-identical for any thread count.
template <class Real>
class IsgmrEngine {
 public:
  IsgmrEngine(const GridTopology& topo, const PotentialSet<Real>& pots, int threads = 1)
      : topo_(topo), pots_(pots), threads_(threads), store_(topo, pots.unary.labels) {
    const int L = pots_.unary.labels;
    if (L > kMaxLabels) throw std::invalid_argument("IsgmrEngine: more than 256 labels");
    for (Real v : pots_.unary.values)
      if (!std::isfinite(static_cast<double>(v)))
        throw std::invalid_argument("IsgmrEngine: non-finite unary potential");
    const std::size_t sz =
        static_cast<std::size_t>(topo_.num_dirs()) * topo_.grid().nodes() * L;
    m_.assign(sz, Real(0));
    mhat_.assign(sz, Real(0));
    vt_.resize(static_cast<std::size_t>(L) * L);
    for (int a = 0; a < L; ++a)
      for (int b = 0; b < L; ++b) vt_[static_cast<std::size_t>(a) * L + b] = pots_.pairwise(b, a);
    for (int r = 0; r < topo_.num_dirs(); ++r)
      for (int t = 0; t < static_cast<int>(topo_.scanlines(r).size()); ++t)
        jobs_.push_back({r, t});
    gaps_.assign(jobs_.size(), std::numeric_limits<Real>::infinity());
  }

  void step() {
    const int k = store_.iterations();
    store_.append_iteration();
    parallel_for(static_cast<std::int64_t>(jobs_.size()), threads_, [&](std::int64_t j) {
      sweep(jobs_[j].first, topo_.scanlines(jobs_[j].first)[jobs_[j].second], k, gaps_[j]);
    });
    m_ = mhat_;  // barrier: messages visible to other directions only now
  }

  int iterations() const { return store_.iterations(); }
  CostOutput<Real> aggregate() const { return aggregate_costs(topo_, pots_.unary, m_); }
  const std::vector<Real>& messages() const { return m_; }
  const IndexStore& indices() const { return store_; }
  IndexStore&& take_indices() { return std::move(store_); }

  Real min_argmin_gap() const {
    Real g = std::numeric_limits<Real>::infinity();
    for (Real v : gaps_) g = std::min(g, v);
    return g;
  }

 private:
  void sweep(int r, const Scanline& sl, int k, Real& gap) {
    const int L = pots_.unary.labels;
    const int n = topo_.grid().nodes();
    const int R = topo_.num_dirs();
    const int opp = topo_.dirs()[r].opposite;
    Real* mh = mhat_.data() + static_cast<std::size_t>(r) * n * L;
    std::vector<Real> base(L);

    for (std::size_t j = 1; j < sl.nodes.size(); ++j) {
      const int prev = sl.nodes[j - 1];
      const int cur = sl.nodes[j];
      for (int mu = 0; mu < L; ++mu)
        base[mu] = pots_.unary.at(prev, mu) + mh[static_cast<std::size_t>(prev) * L + mu];
      for (int d = 0; d < R; ++d) {
        if (d == r || d == opp) continue;
        const Real* md = m_.data() + (static_cast<std::size_t>(d) * n + prev) * L;
        for (int mu = 0; mu < L; ++mu) base[mu] += md[mu];
      }

      const Real w = pots_.weights.weight(r, prev, cur);
      const std::int32_t e = topo_.edge_index(r, cur);
      std::uint8_t* prow = store_.p_row(topo_, k, r, e);
      Real* out = mh + static_cast<std::size_t>(cur) * L;
      // Edge costs follow the undirected model's canonical orientation (tail
      // of the even direction first), so odd directions read V transposed.
      const Real* vtab = (r & 1) ? pots_.pairwise.table.data() : vt_.data();

      for (int l = 0; l < L; ++l) {
        const Real* vt = vtab + static_cast<std::size_t>(l) * L;
        Real best = std::numeric_limits<Real>::infinity();
        Real second = best;
        int arg = 0;
        for (int mu = 0; mu < L; ++mu) {
          const Real v = base[mu] + w * vt[mu];
          if (v < best) {
            second = best;
            best = v;
            arg = mu;
          } else if (v < second) {
            second = v;
          }
        }
        prow[l] = static_cast<std::uint8_t>(arg);
        out[l] = best;
        if (second - best < gap) gap = second - best;
      }

      int lstar = 0;
      Real lo = out[0], second = std::numeric_limits<Real>::infinity();
      for (int l = 1; l < L; ++l) {
        if (out[l] < lo) {
          second = lo;
          lo = out[l];
          lstar = l;
        } else if (out[l] < second) {
          second = out[l];
        }
      }
      if (second - lo < gap) gap = second - lo;
      store_.q_at(topo_, k, r, e) = static_cast<std::uint8_t>(lstar);
      for (int l = 0; l < L; ++l) out[l] -= lo;
    }
  }

  const GridTopology& topo_;
  const PotentialSet<Real>& pots_;
  int threads_;
  IndexStore store_;
  std::vector<Real> m_, mhat_;
  std::vector<Real> vt_;  // vt_[l*L+mu] = V(mu, l)
  std::vector<std::pair<int, int>> jobs_;
  std::vector<Real> gaps_;
};

template <class Real>
ForwardResult<Real> isgmr_forward(const GridTopology& topo, const PotentialSet<Real>& pots,
                                  int iterations, int threads = 1) {
  if (iterations < 1) throw std::invalid_argument("isgmr_forward: iterations must be >= 1");
  IsgmrEngine<Real> engine(topo, pots, threads);
  for (int k = 0; k < iterations; ++k) engine.step();
  return {engine.aggregate(), engine.messages(), engine.take_indices(), engine.min_argmin_gap()};
}

/// Energy of the aggregated labelling after each iteration, optionally on a
/// separate evaluation edge set (the 4-connected protocol).
template <class Real>
std::vector<double> isgmr_iterate_energy(const GridTopology& topo, const PotentialSet<Real>& pots,
                                         int iterations, int threads = 1,
                                         const GridTopology* eval_topo = nullptr) {
  const GridTopology& et = eval_topo ? *eval_topo : topo;
  IsgmrEngine<Real> engine(topo, pots, threads);
  std::vector<double> energies;
  energies.reserve(iterations);
  for (int k = 0; k < iterations; ++k) {
    engine.step();
    energies.push_back(energy(et, pots, engine.aggregate().labels_map));
  }
  return energies;
}

}  // namespace mp
