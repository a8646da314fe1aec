#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mp/grid.hpp"
#include "mp/inference.hpp"
#include "mp/parallel.hpp"
#include "mp/potentials.hpp"

namespace mp {

enum class SgmVariant { standard, revised };

template <class Real>
struct SgmResult {
  CostOutput<Real> output;
  std::vector<Real> messages;  // R*N*L
};

/// One SGM pass. The standard variant keeps the unary inside the message
/// (over-counting it |R|-1 times in the aggregation c = sum_r m^r) and
/// subtracts the predecessor's message minimum, as in classic scanline
/// aggregation. The revised variant moves the unary to the predecessor,
/// reparametrizes each updated node to min 0 and aggregates
/// c = theta + sum_r m^r, which equals one ISGMR iteration per direction.
template <class Real>
SgmResult<Real> sgm_forward(const GridTopology& topo, const PotentialSet<Real>& pots,
                            SgmVariant variant, int threads = 1) {
  const int L = pots.unary.labels;
  const int n = topo.grid().nodes();
  const int R = topo.num_dirs();

  std::vector<Real> vt(static_cast<std::size_t>(L) * L);
  for (int a = 0; a < L; ++a)
    for (int b = 0; b < L; ++b) vt[static_cast<std::size_t>(a) * L + b] = pots.pairwise(b, a);

  std::vector<Real> m(static_cast<std::size_t>(R) * n * L, Real(0));
  std::vector<std::pair<int, int>> jobs;
  for (int r = 0; r < R; ++r)
    for (int t = 0; t < static_cast<int>(topo.scanlines(r).size()); ++t) jobs.push_back({r, t});

  parallel_for(static_cast<std::int64_t>(jobs.size()), threads, [&](std::int64_t j) {
    const int r = jobs[j].first;
    const Scanline& sl = topo.scanlines(r)[jobs[j].second];
    Real* mr = m.data() + static_cast<std::size_t>(r) * n * L;
    std::vector<Real> base(L);
    // Odd directions read V transposed (canonical undirected orientation).
    const Real* vtab = (r & 1) ? pots.pairwise.table.data() : vt.data();

    if (variant == SgmVariant::standard) {
      const int head = sl.nodes.front();
      for (int l = 0; l < L; ++l) mr[static_cast<std::size_t>(head) * L + l] = pots.unary.at(head, l);
    }
    for (std::size_t j2 = 1; j2 < sl.nodes.size(); ++j2) {
      const int prev = sl.nodes[j2 - 1];
      const int cur = sl.nodes[j2];
      const Real w = pots.weights.weight(r, prev, cur);
      const Real* mp_ = mr + static_cast<std::size_t>(prev) * L;
      Real* out = mr + static_cast<std::size_t>(cur) * L;

      if (variant == SgmVariant::standard) {
        Real prev_min = mp_[0];
        for (int mu = 1; mu < L; ++mu) prev_min = std::min(prev_min, mp_[mu]);
        for (int l = 0; l < L; ++l) {
          const Real* vrow = vtab + static_cast<std::size_t>(l) * L;
          Real best = std::numeric_limits<Real>::infinity();
          for (int mu = 0; mu < L; ++mu) best = std::min(best, mp_[mu] + w * vrow[mu]);
          out[l] = pots.unary.at(cur, l) + best - prev_min;
        }
      } else {
        for (int mu = 0; mu < L; ++mu) base[mu] = pots.unary.at(prev, mu) + mp_[mu];
        for (int l = 0; l < L; ++l) {
          const Real* vrow = vtab + static_cast<std::size_t>(l) * L;
          Real best = std::numeric_limits<Real>::infinity();
          for (int mu = 0; mu < L; ++mu) best = std::min(best, base[mu] + w * vrow[mu]);
          out[l] = best;
        }
        Real lo = out[0];
        for (int l = 1; l < L; ++l) lo = std::min(lo, out[l]);
        for (int l = 0; l < L; ++l) out[l] -= lo;
      }
    }
  });

  SgmResult<Real> res;
  if (variant == SgmVariant::revised) {
    res.output = aggregate_costs(topo, pots.unary, m);
  } else {
    res.output.height = pots.unary.height;
    res.output.width = pots.unary.width;
    res.output.labels = L;
    res.output.cost.assign(static_cast<std::size_t>(n) * L, Real(0));
    for (int r = 0; r < R; ++r) {
      const Real* mr = m.data() + static_cast<std::size_t>(r) * n * L;
      for (std::size_t i = 0; i < static_cast<std::size_t>(n) * L; ++i) res.output.cost[i] += mr[i];
    }
    argmin_labels(res.output);
  }
  res.messages = std::move(m);
  return res;
}

/// Iterated SGM baseline: each round the unary volume is replaced by the
/// plain message aggregation sum_r m^r of the previous round (per-node min
/// subtracted to keep magnitudes bounded; labellings are unaffected).
template <class Real>
class SgmIterative {
 public:
  SgmIterative(const GridTopology& topo, const PotentialSet<Real>& pots,
               SgmVariant variant = SgmVariant::standard, int threads = 1)
      : topo_(topo), pots_(pots), variant_(variant), threads_(threads) {}

  const CostOutput<Real>& step() {
    SgmResult<Real> res = sgm_forward(topo_, pots_, variant_, threads_);
    last_ = std::move(res.output);

    const int L = pots_.unary.labels;
    const int n = topo_.grid().nodes();
    UnaryVolume<Real> next(pots_.unary.height, pots_.unary.width, L);
    for (int i = 0; i < n; ++i) {
      Real lo = std::numeric_limits<Real>::infinity();
      for (int l = 0; l < L; ++l) {
        Real s = Real(0);
        for (int r = 0; r < topo_.num_dirs(); ++r)
          s += res.messages[(static_cast<std::size_t>(r) * n + i) * L + l];
        next.at(i, l) = s;
        lo = std::min(lo, s);
      }
      for (int l = 0; l < L; ++l) next.at(i, l) -= lo;
    }
    pots_.unary = std::move(next);
    return last_;
  }

  const CostOutput<Real>& last() const { return last_; }

 private:
  const GridTopology& topo_;
  PotentialSet<Real> pots_;  // by value: the unary is rewritten every round
  SgmVariant variant_;
  int threads_;
  CostOutput<Real> last_;
};

template <class Real>
std::vector<CostOutput<Real>> sgm_iterative(const GridTopology& topo,
                                            const PotentialSet<Real>& pots, int iterations,
                                            SgmVariant variant = SgmVariant::standard,
                                            int threads = 1) {
  if (iterations < 1) throw std::invalid_argument("sgm_iterative: iterations must be >= 1");
  SgmIterative<Real> it(topo, pots, variant, threads);
  std::vector<CostOutput<Real>> out;
  out.reserve(iterations);
  for (int k = 0; k < iterations; ++k) out.push_back(it.step());
  return out;
}

template <class Real>
struct MeanFieldResult {
  CostOutput<Real> output;
  std::vector<Real> q;  // N*L marginals, rows sum to 1
};

/// Local mean-field with synchronous (Jacobi) updates:
///   Q_i(l) propto exp(-theta_i(l) - sum_{j in N(i)} w_ij sum_mu Q_j(mu) V(l, mu)),
/// initialized from Q = softmax(-theta). Costs are reported as -log Q.
template <class Real>
class MeanFieldEngine {
 public:
  MeanFieldEngine(const GridTopology& topo, const PotentialSet<Real>& pots, int threads = 1)
      : topo_(topo), pots_(pots), threads_(threads) {
    const int L = pots_.unary.labels;
    const int n = topo_.grid().nodes();
    q_.resize(static_cast<std::size_t>(n) * L);
    for (int i = 0; i < n; ++i)
      normalize(pots_.unary.row(i), q_.data() + static_cast<std::size_t>(i) * L);
    qnext_.resize(q_.size());
    pair_msg_.resize(2 * q_.size());
  }

  void step() {
    const int L = pots_.unary.labels;
    const GridGraph& g = topo_.grid();
    const std::size_t half = q_.size();
    // Expected edge cost seen from each side of a node j, respecting the
    // undirected model's canonical V orientation:
    //   out_j(l) = sum_mu Q_j(mu) V(l, mu), in_j(l) = sum_mu Q_j(mu) V(mu, l).
    parallel_for(g.nodes(), threads_, [&](std::int64_t j) {
      const Real* qj = q_.data() + static_cast<std::size_t>(j) * L;
      Real* out = pair_msg_.data() + static_cast<std::size_t>(j) * L;
      Real* in = pair_msg_.data() + half + static_cast<std::size_t>(j) * L;
      for (int l = 0; l < L; ++l) {
        Real so = Real(0), si = Real(0);
        for (int mu = 0; mu < L; ++mu) {
          so += qj[mu] * pots_.pairwise(l, mu);
          si += qj[mu] * pots_.pairwise(mu, l);
        }
        out[l] = so;
        in[l] = si;
      }
    });
    parallel_for(g.nodes(), threads_, [&](std::int64_t i) {
      auto [h, w] = g.coords(static_cast<int>(i));
      std::vector<Real> s(pots_.unary.row(static_cast<int>(i)),
                          pots_.unary.row(static_cast<int>(i)) + L);
      for (int d = 0; d < topo_.num_dirs(); ++d) {
        const Direction& dir = topo_.dirs()[d];
        const int nh = h + dir.dh, nw = w + dir.dw;
        if (!g.contains(nh, nw)) continue;
        const int j = g.id(nh, nw);
        const Real wij = pots_.weights.weight(d, static_cast<int>(i), j);
        // Even direction: i is the edge's canonical tail, so i carries the
        // first V argument; odd direction: the second.
        const Real* u =
            pair_msg_.data() + ((d & 1) ? half : 0) + static_cast<std::size_t>(j) * L;
        for (int l = 0; l < L; ++l) s[l] += wij * u[l];
      }
      normalize(s.data(), qnext_.data() + i * L);
    });
    q_.swap(qnext_);
  }

  const std::vector<Real>& q() const { return q_; }

  CostOutput<Real> costs() const {
    CostOutput<Real> out;
    out.height = pots_.unary.height;
    out.width = pots_.unary.width;
    out.labels = pots_.unary.labels;
    out.cost.resize(q_.size());
    for (std::size_t i = 0; i < q_.size(); ++i)
      out.cost[i] = -std::log(std::max(q_[i], std::numeric_limits<Real>::min()));
    argmin_labels(out);
    return out;
  }

 private:
  void normalize(const Real* s, Real* q) const {
    const int L = pots_.unary.labels;
    Real lo = s[0];
    for (int l = 1; l < L; ++l) lo = std::min(lo, s[l]);
    Real sum = Real(0);
    for (int l = 0; l < L; ++l) {
      q[l] = std::exp(-(s[l] - lo));
      sum += q[l];
    }
    for (int l = 0; l < L; ++l) q[l] /= sum;
  }

  const GridTopology& topo_;
  const PotentialSet<Real>& pots_;
  int threads_;
  std::vector<Real> q_, qnext_, pair_msg_;
};

template <class Real>
MeanFieldResult<Real> meanfield_forward(const GridTopology& topo, const PotentialSet<Real>& pots,
                                        int iterations, int threads = 1) {
  if (iterations < 1) throw std::invalid_argument("meanfield_forward: iterations must be >= 1");
  MeanFieldEngine<Real> engine(topo, pots, threads);
  for (int k = 0; k < iterations; ++k) engine.step();
  MeanFieldResult<Real> res;
  res.output = engine.costs();
  res.q = engine.q();
  return res;
}

}  // namespace mp
