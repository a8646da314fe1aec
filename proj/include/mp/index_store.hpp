#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "mp/grid.hpp"

namespace mp {

/// One-byte argmin indices recorded during forward message passing: p holds
/// the minimizing predecessor label per (iteration, direction, edge, label)
/// and q the reparametrization label per (iteration, direction, edge).
/// Entries exist only for edges (non-head nodes), so the total footprint is
/// exactly K * sum_r |E^r| * (|L|+1) bytes.
class IndexStore {
 public:
  IndexStore(const GridTopology& topo, int labels)
      : labels_(labels), edges_(topo.total_edges()) {}

  void append_iteration() {
    ++iterations_;
    p_.resize(static_cast<std::size_t>(iterations_) * edges_ * labels_, 0);
    q_.resize(static_cast<std::size_t>(iterations_) * edges_, 0);
  }

  int iterations() const { return iterations_; }
  const std::vector<std::uint8_t>& p_data() const { return p_; }
  const std::vector<std::uint8_t>& q_data() const { return q_; }
  int labels() const { return labels_; }
  std::int64_t edges() const { return edges_; }
  std::size_t bytes() const { return p_.size() + q_.size(); }

  /// Pointer to the p row of one edge: labels_ entries, indexed by lambda.
  std::uint8_t* p_row(const GridTopology& topo, int k, int r, std::int32_t edge) {
    return p_.data() + (flat(topo, k, r, edge)) * labels_;
  }
  const std::uint8_t* p_row(const GridTopology& topo, int k, int r, std::int32_t edge) const {
    return p_.data() + (flat(topo, k, r, edge)) * labels_;
  }
  std::uint8_t& q_at(const GridTopology& topo, int k, int r, std::int32_t edge) {
    return q_[flat(topo, k, r, edge)];
  }
  std::uint8_t q_at(const GridTopology& topo, int k, int r, std::int32_t edge) const {
    return q_[flat(topo, k, r, edge)];
  }

 private:
  std::size_t flat(const GridTopology& topo, int k, int r, std::int32_t edge) const {
    return static_cast<std::size_t>(k) * edges_ + topo.dir_offset(r) + edge;
  }

  int labels_ = 0;
  int iterations_ = 0;
  std::int64_t edges_ = 0;
  std::vector<std::uint8_t> p_;
  std::vector<std::uint8_t> q_;
};

}  // namespace mp
