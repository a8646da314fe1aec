#pragma once

// Independent reference implementations the tests compare against. These
// deliberately avoid the library's scanline machinery: energies walk node
// neighborhoods directly, MAP labellings come from exhaustive enumeration,
// and chain min-marginals from a two-sided dynamic program.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "mp/grid.hpp"
#include "mp/potentials.hpp"

namespace oracles {

/// Energy by direct neighborhood walk: unaries plus, for every node and every
/// even (positive) direction, the edge to the in-bounds neighbor one step
/// away. No scanline enumeration involved.
template <class Real, class Label>
double energy(const mp::GridGraph& g, const mp::DirectionSet& dirs,
              const mp::PotentialSet<Real>& pots, const std::vector<Label>& labels) {
  double e = 0.0;
  for (int i = 0; i < g.nodes(); ++i) e += pots.unary.at(i, static_cast<int>(labels[i]));
  for (int h = 0; h < g.height; ++h)
    for (int w = 0; w < g.width; ++w)
      for (int r = 0; r < dirs.size(); r += 2) {
        const int nh = h + dirs[r].dh, nw = w + dirs[r].dw;
        if (!g.contains(nh, nw)) continue;
        const int i = g.id(h, w), j = g.id(nh, nw);
        e += static_cast<double>(pots.weights.weight(r, i, j)) *
             static_cast<double>(pots.pairwise(labels[i], labels[j]));
      }
  return e;
}

template <class Real>
struct MapResult {
  std::vector<int> labels;
  double energy = std::numeric_limits<double>::infinity();
};

/// Exhaustive MAP: enumerates all |L|^N labellings. Caller keeps N, L small.
template <class Real>
MapResult<Real> brute_force_map(const mp::GridGraph& g, const mp::DirectionSet& dirs,
                                const mp::PotentialSet<Real>& pots) {
  const int n = g.nodes();
  const int L = pots.unary.labels;
  double total = 1;
  for (int i = 0; i < n; ++i) {
    total *= L;
    if (total > 4e6) throw std::invalid_argument("brute_force_map: search space too large");
  }
  MapResult<Real> best;
  std::vector<int> x(n, 0);
  while (true) {
    const double e = energy(g, dirs, pots, x);
    if (e < best.energy) {
      best.energy = e;
      best.labels = x;
    }
    int i = 0;
    while (i < n && ++x[i] == L) x[i++] = 0;
    if (i == n) break;
  }
  return best;
}

/// Exact min-marginals of a 1xN chain via two one-directional DPs:
///   mm_i(l) = theta_i(l) + left_i(l) + right_i(l),
/// where left/right are unreparametrized min-sum messages.
template <class Real>
std::vector<double> chain_min_marginals(const mp::PotentialSet<Real>& pots) {
  if (pots.unary.height != 1) throw std::invalid_argument("chain_min_marginals: need a 1xN grid");
  const int n = pots.unary.width;
  const int L = pots.unary.labels;
  std::vector<double> left(static_cast<std::size_t>(n) * L, 0.0);
  std::vector<double> right(left), mm(left);

  // Edge (i, i+1) traversed along the east direction (id 0).
  for (int i = 1; i < n; ++i) {
    const double w = pots.weights.weight(0, i - 1, i);
    for (int l = 0; l < L; ++l) {
      double best = std::numeric_limits<double>::infinity();
      for (int mu = 0; mu < L; ++mu)
        best = std::min(best, left[static_cast<std::size_t>(i - 1) * L + mu] +
                                  pots.unary.at(i - 1, mu) + w * pots.pairwise(mu, l));
      left[static_cast<std::size_t>(i) * L + l] = best;
    }
  }
  for (int i = n - 2; i >= 0; --i) {
    const double w = pots.weights.weight(0, i, i + 1);
    for (int l = 0; l < L; ++l) {
      double best = std::numeric_limits<double>::infinity();
      for (int mu = 0; mu < L; ++mu)
        best = std::min(best, right[static_cast<std::size_t>(i + 1) * L + mu] +
                                  pots.unary.at(i + 1, mu) + w * pots.pairwise(l, mu));
      right[static_cast<std::size_t>(i) * L + l] = best;
    }
  }
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < L; ++l)
      mm[static_cast<std::size_t>(i) * L + l] = pots.unary.at(i, l) +
                                                left[static_cast<std::size_t>(i) * L + l] +
                                                right[static_cast<std::size_t>(i) * L + l];
  return mm;
}

/// Random model on an HxW grid: uniform unaries, a random nonnegative
/// compatibility table with zero diagonal, and per-edge weights.
template <class Real>
mp::PotentialSet<Real> random_potentials(std::mt19937_64& rng, int h, int w, int labels,
                                         int connectivity, bool per_edge_weights = false) {
  mp::PotentialSet<Real> pots;
  std::uniform_real_distribution<double> uu(0.0, 10.0);
  pots.unary = mp::UnaryVolume<Real>(h, w, labels);
  for (auto& v : pots.unary.values) v = static_cast<Real>(uu(rng));
  std::uniform_real_distribution<double> uv(0.0, 3.0);
  std::vector<Real> table(static_cast<std::size_t>(labels) * labels);
  for (auto& v : table) v = static_cast<Real>(uv(rng));
  for (int l = 0; l < labels; ++l) table[static_cast<std::size_t>(l) * labels + l] = Real(0);
  pots.pairwise = mp::explicit_pairwise(std::move(table), labels);
  if (per_edge_weights) {
    std::uniform_real_distribution<double> uw(0.1, 2.0);
    std::vector<std::vector<Real>> planes(connectivity / 2, std::vector<Real>(h * w));
    for (auto& plane : planes)
      for (auto& v : plane) v = static_cast<Real>(uw(rng));
    pots.weights = mp::EdgeWeights<Real>::planes(std::move(planes));
  } else {
    std::uniform_real_distribution<double> uw(0.2, 2.0);
    pots.weights = mp::EdgeWeights<Real>::constant(static_cast<Real>(uw(rng)));
  }
  return pots;
}

/// Number of (i-r, i) edges of one direction, counted node by node.
inline std::int64_t count_edges(const mp::GridGraph& g, const mp::Direction& r) {
  std::int64_t edges = 0;
  for (int h = 0; h < g.height; ++h)
    for (int w = 0; w < g.width; ++w)
      if (g.contains(h - r.dh, w - r.dw)) ++edges;
  return edges;
}

}  // namespace oracles
