#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "mp/autodiff.hpp"
#include "mp/isgmr.hpp"
#include "mp/softhead.hpp"
#include "mp/trwp.hpp"

namespace mp {

enum class Engine { isgmr, trwp };

struct GradCheckConfig {
  int height = 6, width = 6, labels = 4;
  int connectivity = 4;
  int iterations = 2;
  Engine engine = Engine::isgmr;
  double rho = 0.5;  // TRWP only
  bool per_edge_weights = true;
  std::uint64_t seed = 1;
  double step = 1e-3;  // central-difference step
};

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::uint64_t seed_used = 0;
  std::size_t components = 0;    // components compared against finite differences
  std::size_t skipped_ties = 0;  // components whose FD segment crossed an argmin tie
};

/// One random problem plus a regression target; everything the loss needs.
struct GradCheckInstance {
  GridTopology topo;
  PotentialSet<double> pots;
  TreeCoefficients<double> rho;
  std::vector<double> target;

  GradCheckInstance(const GradCheckConfig& cfg, std::uint64_t seed)
      : topo(GridGraph(cfg.height, cfg.width), DirectionSet::build(cfg.connectivity)),
        rho{default_rho<double>(cfg.connectivity, cfg.rho)} {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 8.0);
    pots.unary = UnaryVolume<double>(cfg.height, cfg.width, cfg.labels);
    for (auto& v : pots.unary.values) v = u(rng);
    std::vector<double> table(static_cast<std::size_t>(cfg.labels) * cfg.labels);
    std::uniform_real_distribution<double> uv(0.0, 2.0);
    for (auto& v : table) v = uv(rng);
    for (int l = 0; l < cfg.labels; ++l) table[static_cast<std::size_t>(l) * cfg.labels + l] = 0.0;
    pots.pairwise = explicit_pairwise(std::move(table), cfg.labels);
    if (cfg.per_edge_weights) {
      std::uniform_real_distribution<double> uw(0.2, 1.5);
      std::vector<std::vector<double>> planes(topo.num_dirs() / 2,
                                              std::vector<double>(topo.grid().nodes()));
      for (auto& plane : planes)
        for (auto& v : plane) v = uw(rng);
      pots.weights = EdgeWeights<double>::planes(std::move(planes));
    } else {
      pots.weights = EdgeWeights<double>::constant(1.0);
    }
    std::uniform_real_distribution<double> ut(0.25, cfg.labels - 1.25);
    target.resize(topo.grid().nodes());
    for (auto& v : target) v = ut(rng);
  }
};

namespace detail {

/// Loss evaluation plus a discrete signature of every branch the loss took:
/// all recorded argmin/reparametrization indices and the per-node sign of
/// (disparity - target). Two evaluations with equal signatures lie on the
/// same smooth piece of the loss, so a central difference between them is a
/// true derivative.
struct LossEval {
  double loss = 0.0;
  std::vector<std::uint8_t> signature;
};

inline LossEval pipeline_eval(const GradCheckInstance& inst, const GradCheckConfig& cfg) {
  ForwardResult<double> fwd = cfg.engine == Engine::trwp
                                  ? trwp_forward(inst.topo, inst.pots, inst.rho, cfg.iterations)
                                  : isgmr_forward(inst.topo, inst.pots, cfg.iterations);
  SoftHeadResult<double> head = soft_head_forward(fwd.output, inst.target);
  LossEval ev;
  ev.loss = head.loss;
  ev.signature = fwd.indices.p_data();
  ev.signature.insert(ev.signature.end(), fwd.indices.q_data().begin(),
                      fwd.indices.q_data().end());
  for (std::size_t i = 0; i < head.disparity.size(); ++i)
    ev.signature.push_back(head.disparity[i] >= inst.target[i] ? 1 : 0);
  return ev;
}

inline double rel_err(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({1.0, std::abs(analytic), std::abs(numeric)});
}

}  // namespace detail

/// Checks every component of the unary, edge-weight and compatibility-table
/// gradients of the full forward + soft-readout pipeline against central
/// finite differences in 64-bit arithmetic. A component is compared only at
/// tie-free points: if nudging it by +-step changes any recorded argmin or
/// flips a soft-readout sign, the loss is locally non-smooth there and the
/// component is counted in skipped_ties instead.
inline GradCheckReport gradient_check(const GradCheckConfig& cfg) {
  GradCheckInstance inst(cfg, cfg.seed);

  ForwardResult<double> fwd = cfg.engine == Engine::trwp
                                  ? trwp_forward(inst.topo, inst.pots, inst.rho, cfg.iterations)
                                  : isgmr_forward(inst.topo, inst.pots, cfg.iterations);
  SoftHeadResult<double> head = soft_head_forward(fwd.output, inst.target);
  std::vector<double> grad_cost = soft_head_backward(fwd.output, head, inst.target);
  GradientSet<double> grads =
      cfg.engine == Engine::trwp
          ? trwp_backward(inst.topo, inst.pots, inst.rho, fwd.indices, grad_cost)
          : isgmr_backward(inst.topo, inst.pots, fwd.indices, grad_cost);

  GradCheckReport rep;
  rep.seed_used = cfg.seed;
  auto check = [&](double analytic, double& coord) {
    const double saved = coord;
    coord = saved + cfg.step;
    const detail::LossEval hi = detail::pipeline_eval(inst, cfg);
    coord = saved - cfg.step;
    const detail::LossEval lo = detail::pipeline_eval(inst, cfg);
    coord = saved;
    if (hi.signature != lo.signature) {
      ++rep.skipped_ties;
      return;
    }
    const double fd = (hi.loss - lo.loss) / (2.0 * cfg.step);
    rep.max_rel_err = std::max(rep.max_rel_err, detail::rel_err(analytic, fd));
    ++rep.components;
  };

  for (std::size_t i = 0; i < inst.pots.unary.values.size(); ++i)
    check(grads.unary[i], inst.pots.unary.values[i]);
  for (std::size_t i = 0; i < inst.pots.pairwise.table.size(); ++i)
    check(grads.pairwise[i], inst.pots.pairwise.table[i]);
  if (inst.pots.weights.is_constant()) {
    // No addressable scalar inside EdgeWeights; rebuild around a local copy.
    const double saved = inst.pots.weights.weight(0, 0, 0);
    auto eval = [&](double v) {
      inst.pots.weights = EdgeWeights<double>::constant(v);
      return detail::pipeline_eval(inst, cfg);
    };
    const detail::LossEval hi = eval(saved + cfg.step);
    const detail::LossEval lo = eval(saved - cfg.step);
    inst.pots.weights = EdgeWeights<double>::constant(saved);
    if (hi.signature != lo.signature) {
      ++rep.skipped_ties;
    } else {
      const double fd = (hi.loss - lo.loss) / (2.0 * cfg.step);
      rep.max_rel_err =
          std::max(rep.max_rel_err, detail::rel_err(grads.edge_weight_total(), fd));
      ++rep.components;
    }
  } else {
    auto& planes = inst.pots.weights.plane_data();
    for (std::size_t f = 0; f < planes.size(); ++f)
      for (std::size_t i = 0; i < planes[f].size(); ++i)
        check(grads.edge_weights[f][i], planes[f][i]);
  }
  return rep;
}

}  // namespace mp
