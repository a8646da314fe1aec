#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mp/inference.hpp"

namespace mp {

template <class Real>
struct SoftHeadResult {
  std::vector<Real> confidence;  // N*L, softmax(-c) per node
  std::vector<Real> disparity;   // N, expected label under confidence
  Real loss;                     // mean absolute error against ground truth
};

/// Differentiable readout of an aggregated cost volume: per-node softmax over
/// negated costs, expected label, and mean L1 error against a target map.
template <class Real>
SoftHeadResult<Real> soft_head_forward(const CostOutput<Real>& cost,
                                       const std::vector<Real>& target) {
  const int L = cost.labels;
  const std::size_t n = cost.cost.size() / L;
  if (target.size() != n) throw std::invalid_argument("soft_head_forward: target size mismatch");

  SoftHeadResult<Real> res;
  res.confidence.resize(cost.cost.size());
  res.disparity.resize(n);
  Real total = Real(0);
  for (std::size_t i = 0; i < n; ++i) {
    const Real* c = cost.cost.data() + i * L;
    Real* f = res.confidence.data() + i * L;
    Real hi = -c[0];
    for (int l = 1; l < L; ++l) hi = std::max(hi, -c[l]);
    Real sum = Real(0);
    for (int l = 0; l < L; ++l) {
      f[l] = std::exp(-c[l] - hi);
      sum += f[l];
    }
    Real d = Real(0);
    for (int l = 0; l < L; ++l) {
      f[l] /= sum;
      d += Real(l) * f[l];
    }
    res.disparity[i] = d;
    total += std::abs(d - target[i]);
  }
  res.loss = total / Real(n);
  return res;
}

/// Gradient of the mean-L1 readout with respect to the cost volume:
///   d loss / d c_i(v) = sign(d_i - g_i)/N * (-f_i(v) * (v - d_i)).
/// Exact ties (d == g) contribute zero.
template <class Real>
std::vector<Real> soft_head_backward(const CostOutput<Real>& cost,
                                     const SoftHeadResult<Real>& head,
                                     const std::vector<Real>& target) {
  const int L = cost.labels;
  const std::size_t n = cost.cost.size() / L;
  std::vector<Real> grad(cost.cost.size(), Real(0));
  for (std::size_t i = 0; i < n; ++i) {
    const Real diff = head.disparity[i] - target[i];
    if (diff == Real(0)) continue;
    const Real s = (diff > Real(0) ? Real(1) : Real(-1)) / Real(n);
    const Real* f = head.confidence.data() + i * L;
    Real* g = grad.data() + i * L;
    for (int l = 0; l < L; ++l) g[l] = s * (-f[l] * (Real(l) - head.disparity[i]));
  }
  return grad;
}

}  // namespace mp
