#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mp/grid.hpp"

namespace mp {

inline constexpr int kMaxLabels = 256;  // argmin indices must fit one byte

enum class PairwiseKind { potts, truncated_linear, truncated_quadratic, sgm_p1p2, explicit_matrix };

struct PairwiseParams {
  double trunc = -1.0;  // tau for truncated_linear / truncated_quadratic (<0 means none)
  double p1 = 1.0;
  double p2 = 1.0;
};

/// Label-compatibility function V realized as an |L|x|L| matrix. Pairwise
/// potentials decompose as theta_{i,j} * V(lambda, mu); the matrix is the
/// only per-label-pair storage in the whole model.
template <class Real>
struct PairwiseFunction {
  PairwiseKind kind = PairwiseKind::potts;
  int labels = 0;
  std::vector<Real> table;  // row-major, table[a*labels + b] = V(a, b)

  Real operator()(int a, int b) const { return table[a * labels + b]; }
  Real& at(int a, int b) { return table[a * labels + b]; }
};

template <class Real>
PairwiseFunction<Real> build_pairwise(PairwiseKind kind, const PairwiseParams& params, int labels) {
  if (labels < 1 || labels > kMaxLabels)
    throw std::invalid_argument("build_pairwise: label count must be in [1, 256]");

  PairwiseFunction<Real> v;
  v.kind = kind;
  v.labels = labels;
  v.table.assign(static_cast<std::size_t>(labels) * labels, Real(0));
  for (int a = 0; a < labels; ++a) {
    for (int b = 0; b < labels; ++b) {
      const double d = std::abs(a - b);
      double val = 0.0;
      switch (kind) {
        case PairwiseKind::potts:
          val = a == b ? 0.0 : 1.0;
          break;
        case PairwiseKind::truncated_linear:
          if (params.trunc <= 0) throw std::invalid_argument("truncated_linear: trunc must be > 0");
          val = std::min(d, params.trunc);
          break;
        case PairwiseKind::truncated_quadratic:
          if (params.trunc <= 0) throw std::invalid_argument("truncated_quadratic: trunc must be > 0");
          val = std::min(d * d, params.trunc);
          break;
        case PairwiseKind::sgm_p1p2:
          if (!(0 < params.p1 && params.p1 <= params.p2))
            throw std::invalid_argument("sgm_p1p2: need 0 < P1 <= P2");
          val = a == b ? 0.0 : (d == 1.0 ? params.p1 : params.p2);
          break;
        case PairwiseKind::explicit_matrix:
          throw std::invalid_argument("build_pairwise: explicit_matrix takes a user table");
      }
      v.at(a, b) = static_cast<Real>(val);
    }
  }
  return v;
}

template <class Real>
PairwiseFunction<Real> explicit_pairwise(std::vector<Real> table, int labels) {
  if (table.size() != static_cast<std::size_t>(labels) * labels)
    throw std::invalid_argument("explicit_pairwise: table size mismatch");
  PairwiseFunction<Real> v;
  v.kind = PairwiseKind::explicit_matrix;
  v.labels = labels;
  v.table = std::move(table);
  return v;
}

/// Unary cost volume, shape H*W*L with label fastest.
template <class Real>
struct UnaryVolume {
  int height = 0, width = 0, labels = 0;
  std::vector<Real> values;

  UnaryVolume() = default;
  UnaryVolume(int h, int w, int l, Real fill = Real(0))
      : height(h), width(w), labels(l),
        values(static_cast<std::size_t>(h) * w * l, fill) {
    if (l < 1 || l > kMaxLabels)
      throw std::invalid_argument("UnaryVolume: label count must be in [1, 256]");
  }

  Real at(int node, int label) const { return values[static_cast<std::size_t>(node) * labels + label]; }
  Real& at(int node, int label) { return values[static_cast<std::size_t>(node) * labels + label]; }
  const Real* row(int node) const { return values.data() + static_cast<std::size_t>(node) * labels; }
  int nodes() const { return height * width; }
};

/// Per-edge scalar weights theta_{i,j}, undirected (theta_{i,j} = theta_{j,i}).
/// Storage is one plane per direction family, indexed by the tail node of the
/// family's positive (even-id) direction. A constant fast path avoids the
/// planes entirely.
template <class Real>
class EdgeWeights {
 public:
  static EdgeWeights constant(Real w) {
    if (!(w >= 0)) throw std::invalid_argument("EdgeWeights: weights must be nonnegative");
    EdgeWeights e;
    e.constant_ = w;
    return e;
  }

  static EdgeWeights planes(std::vector<std::vector<Real>> planes) {
    EdgeWeights e;
    e.planes_ = std::move(planes);
    return e;
  }

  bool is_constant() const { return planes_.empty(); }
  const std::vector<std::vector<Real>>& plane_data() const { return planes_; }
  std::vector<std::vector<Real>>& plane_data() { return planes_; }

  /// Weight of the edge (prev, cur) traversed along direction r.
  Real weight(int r, int prev, int cur) const {
    if (planes_.empty()) return constant_;
    return planes_[r >> 1][(r & 1) ? cur : prev];
  }

  /// Tail node that indexes this edge's plane entry (shared by both orientations).
  static int plane_node(int r, int prev, int cur) { return (r & 1) ? cur : prev; }

 private:
  Real constant_ = Real(1);
  std::vector<std::vector<Real>> planes_;
};

/// Tree coefficients rho in (0, 1]; uniform scalar by default with optional
/// per-edge planes laid out like EdgeWeights.
template <class Real>
struct TreeCoefficients {
  Real uniform = Real(0.5);
  std::vector<std::vector<Real>> planes;

  Real at(int r, int prev, int cur) const {
    if (planes.empty()) return uniform;
    return planes[r >> 1][(r & 1) ? cur : prev];
  }
};

template <class Real>
TreeCoefficients<Real> default_rho(int connectivity, Real value = Real(0.5)) {
  DirectionSet::build(connectivity);  // validates connectivity
  if (!(value > 0 && value <= 1)) throw std::invalid_argument("rho must be in (0, 1]");
  return TreeCoefficients<Real>{value, {}};
}

/// All MRF model parameters for one problem instance.
template <class Real>
struct PotentialSet {
  UnaryVolume<Real> unary;
  PairwiseFunction<Real> pairwise;
  EdgeWeights<Real> weights = EdgeWeights<Real>::constant(Real(1));
};

/// Energy of a labelling: sum of unaries plus each undirected edge counted
/// once (edges enumerated through the even-id direction of each family).
template <class Real, class Label>
double energy(const GridTopology& topo, const PotentialSet<Real>& pots,
              const std::vector<Label>& labels) {
  const GridGraph& g = topo.grid();
  const int L = pots.unary.labels;
  if (static_cast<int>(labels.size()) != g.nodes())
    throw std::invalid_argument("energy: labelling size mismatch");

  double e = 0.0;
  for (int i = 0; i < g.nodes(); ++i) {
    const int x = static_cast<int>(labels[i]);
    if (x < 0 || x >= L) throw std::out_of_range("energy: label out of range");
    e += static_cast<double>(pots.unary.at(i, x));
  }
  for (int r = 0; r < topo.num_dirs(); r += 2) {
    for (const auto& sl : topo.scanlines(r)) {
      for (std::size_t j = 1; j < sl.nodes.size(); ++j) {
        const int prev = sl.nodes[j - 1], cur = sl.nodes[j];
        e += static_cast<double>(pots.weights.weight(r, prev, cur)) *
             static_cast<double>(pots.pairwise(labels[prev], labels[cur]));
      }
    }
  }
  return e;
}

}  // namespace mp
