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

/// Parallel tree-reweighted min-sum message passing. Directions run in a
/// fixed sequential order (part of the contract: each direction reads the
/// other directions' already-updated messages), scanlines in parallel, with
/// a single in-place message buffer:
///   m^r_i(l) = min_mu [ rho * (theta_{i-r}(mu) + sum_d m^d_{i-r}(mu))
///                       - m^{r-}_{i-r}(mu) + w * V(mu, l) ],
/// reparametrized to min 0 per node, argmin indices recorded.
template <class Real>
class TrwpEngine {
 public:
  TrwpEngine(const GridTopology& topo, const PotentialSet<Real>& pots,
             TreeCoefficients<Real> rho, int threads = 1)
      : topo_(topo), pots_(pots), rho_(std::move(rho)), threads_(threads),
        store_(topo, pots.unary.labels) {
    const int L = pots_.unary.labels;
    if (L > kMaxLabels) throw std::invalid_argument("TrwpEngine: more than 256 labels");
    for (Real v : pots_.unary.values)
      if (!std::isfinite(static_cast<double>(v)))
        throw std::invalid_argument("TrwpEngine: non-finite unary potential");
    m_.assign(static_cast<std::size_t>(topo_.num_dirs()) * topo_.grid().nodes() * L, Real(0));
    vt_.resize(static_cast<std::size_t>(L) * L);
    for (int a = 0; a < L; ++a)
      for (int b = 0; b < L; ++b) vt_[static_cast<std::size_t>(a) * L + b] = pots_.pairwise(b, a);
    int max_sl = 0;
    for (int r = 0; r < topo_.num_dirs(); ++r)
      max_sl = std::max(max_sl, static_cast<int>(topo_.scanlines(r).size()));
    gaps_.assign(max_sl, std::numeric_limits<Real>::infinity());
  }

  void step() {
    const int k = store_.iterations();
    store_.append_iteration();
    for (int r = 0; r < topo_.num_dirs(); ++r) {
      const auto& lines = topo_.scanlines(r);
      parallel_for(static_cast<std::int64_t>(lines.size()), threads_, [&](std::int64_t t) {
        Real gap = gaps_[t];
        sweep(r, lines[t], k, gap);
        gaps_[t] = gap;
      });
      Real g = min_gap_;
      for (std::size_t t = 0; t < lines.size(); ++t) g = std::min(g, gaps_[t]);
      min_gap_ = g;
    }
  }

  int iterations() const { return store_.iterations(); }
  CostOutput<Real> aggregate() const { return aggregate_costs(topo_, pots_.unary, m_); }
  const std::vector<Real>& messages() const { return m_; }
  const IndexStore& indices() const { return store_; }
  IndexStore&& take_indices() { return std::move(store_); }
  Real min_argmin_gap() const { return min_gap_; }

 private:
  void sweep(int r, const Scanline& sl, int k, Real& gap) {
    const int L = pots_.unary.labels;
    const int n = topo_.grid().nodes();
    const int R = topo_.num_dirs();
    const int opp = topo_.dirs()[r].opposite;
    Real* mr = m_.data() + static_cast<std::size_t>(r) * n * L;
    std::vector<Real> base(L);

    for (std::size_t j = 1; j < sl.nodes.size(); ++j) {
      const int prev = sl.nodes[j - 1];
      const int cur = sl.nodes[j];
      const Real rho = rho_.at(r, prev, cur);

      for (int mu = 0; mu < L; ++mu) base[mu] = pots_.unary.at(prev, mu);
      for (int d = 0; d < R; ++d) {
        const Real* md = m_.data() + (static_cast<std::size_t>(d) * n + prev) * L;
        for (int mu = 0; mu < L; ++mu) base[mu] += md[mu];
      }
      const Real* mo = m_.data() + (static_cast<std::size_t>(opp) * n + prev) * L;
      for (int mu = 0; mu < L; ++mu) base[mu] = rho * base[mu] - mo[mu];

      const Real w = pots_.weights.weight(r, prev, cur);
      const std::int32_t e = topo_.edge_index(r, cur);
      std::uint8_t* prow = store_.p_row(topo_, k, r, e);
      Real* out = mr + static_cast<std::size_t>(cur) * L;
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
  TreeCoefficients<Real> rho_;
  int threads_;
  IndexStore store_;
  std::vector<Real> m_;
  std::vector<Real> vt_;
  std::vector<Real> gaps_;
  Real min_gap_ = std::numeric_limits<Real>::infinity();
};

template <class Real>
ForwardResult<Real> trwp_forward(const GridTopology& topo, const PotentialSet<Real>& pots,
                                 const TreeCoefficients<Real>& rho, int iterations,
                                 int threads = 1) {
  if (iterations < 1) throw std::invalid_argument("trwp_forward: iterations must be >= 1");
  TrwpEngine<Real> engine(topo, pots, rho, threads);
  for (int k = 0; k < iterations; ++k) engine.step();
  return {engine.aggregate(), engine.messages(), engine.take_indices(), engine.min_argmin_gap()};
}

template <class Real>
std::vector<double> trwp_iterate_energy(const GridTopology& topo, const PotentialSet<Real>& pots,
                                        const TreeCoefficients<Real>& rho, int iterations,
                                        int threads = 1, const GridTopology* eval_topo = nullptr) {
  const GridTopology& et = eval_topo ? *eval_topo : topo;
  TrwpEngine<Real> engine(topo, pots, rho, threads);
  std::vector<double> energies;
  energies.reserve(iterations);
  for (int k = 0; k < iterations; ++k) {
    engine.step();
    energies.push_back(energy(et, pots, engine.aggregate().labels_map));
  }
  return energies;
}

}  // namespace mp
