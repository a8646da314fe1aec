#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mp {

/// Rectangular pixel lattice. Node ids are row-major in [0, H*W).
struct GridGraph {
  int height = 0;
  int width = 0;

  GridGraph() = default;
  GridGraph(int h, int w) : height(h), width(w) {
    if (h < 1 || w < 1) throw std::invalid_argument("GridGraph: H and W must be >= 1");
  }

  int nodes() const { return height * width; }
  int id(int h, int w) const { return h * width + w; }
  std::pair<int, int> coords(int node) const { return {node / width, node % width}; }
  bool contains(int h, int w) const { return h >= 0 && h < height && w >= 0 && w < width; }
};

/// A scanning direction: per-node step (dh, dw) plus the index of the
/// opposite direction in the owning DirectionSet.
struct Direction {
  int dh = 0;
  int dw = 0;
  int opposite = -1;
};

/// Fixed enumeration of connectivity directions. Opposites are adjacent
/// (opposite id = id ^ 1) and the 4-connected set is a prefix of the
/// 8- and 16-connected sets, so evaluation edge sets nest.
class DirectionSet {
 public:
  static DirectionSet build(int connectivity);

  int size() const { return static_cast<int>(dirs_.size()); }
  int connectivity() const { return size(); }
  int families() const { return size() / 2; }
  const Direction& operator[](int r) const { return dirs_[r]; }
  const std::vector<Direction>& all() const { return dirs_; }

 private:
  std::vector<Direction> dirs_;
};

/// One maximal straight path through the grid in a given direction.
struct Scanline {
  int direction = -1;
  std::pair<int, int> first_node{};     // in-bounds head after clipping
  std::vector<int32_t> nodes;           // row-major node ids, in traversal order
};

/// Node i-r, or nullopt at a scanline head.
std::optional<int> previous_node(const GridGraph& g, int node, const Direction& r);

/// All scanlines of direction r. First nodes come from the wide/narrow
/// interpolation formulas; candidates outside the grid are advanced along r
/// until in bounds and empty lines are dropped. The result partitions the
/// node set.
std::vector<Scanline> enumerate_scanlines(const GridGraph& g, const Direction& r,
                                          int direction_id = -1);

/// Materialized geometry for one (grid, connectivity) pair: scanlines per
/// direction plus a compact per-direction edge numbering. Edge e of
/// direction r is the edge (i-r, i) into the e-th non-head node; heads map
/// to -1. Immutable after construction.
class GridTopology {
 public:
  GridTopology(const GridGraph& g, DirectionSet dirs);

  const GridGraph& grid() const { return grid_; }
  const DirectionSet& dirs() const { return dirs_; }
  int num_dirs() const { return dirs_.size(); }

  const std::vector<Scanline>& scanlines(int r) const { return scanlines_[r]; }
  int32_t edge_index(int r, int node) const { return edge_index_[r][node]; }
  std::int64_t edge_count(int r) const { return edge_count_[r]; }
  std::int64_t total_edges() const { return total_edges_; }
  /// Offset of direction r's edge block in the flattened per-direction layout.
  std::int64_t dir_offset(int r) const { return dir_offset_[r]; }

 private:
  GridGraph grid_;
  DirectionSet dirs_;
  std::vector<std::vector<Scanline>> scanlines_;
  std::vector<std::vector<int32_t>> edge_index_;
  std::vector<std::int64_t> edge_count_;
  std::vector<std::int64_t> dir_offset_;
  std::int64_t total_edges_ = 0;
};

}  // namespace mp
