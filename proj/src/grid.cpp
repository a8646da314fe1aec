#include "mp/grid.hpp"

#include <cmath>

namespace mp {

namespace {

int positive_mod(int x, int m) { return ((x % m) + m) % m; }

}  // namespace

DirectionSet DirectionSet::build(int connectivity) {
  if (connectivity != 4 && connectivity != 8 && connectivity != 16)
    throw std::invalid_argument("DirectionSet: connectivity must be 4, 8 or 16");

  // E, W, S, N, then symmetric diagonals, then narrow/wide diagonals.
  static const int steps16[16][2] = {
      {0, 1},  {0, -1}, {1, 0},  {-1, 0},  {1, 1},  {-1, -1}, {1, -1}, {-1, 1},
      {1, 2},  {-1, -2}, {1, -2}, {-1, 2}, {2, 1},  {-2, -1}, {2, -1}, {-2, 1}};

  DirectionSet set;
  set.dirs_.resize(connectivity);
  for (int r = 0; r < connectivity; ++r)
    set.dirs_[r] = Direction{steps16[r][0], steps16[r][1], r ^ 1};
  return set;
}

std::optional<int> previous_node(const GridGraph& g, int node, const Direction& r) {
  auto [h, w] = g.coords(node);
  const int ph = h - r.dh;
  const int pw = w - r.dw;
  if (!g.contains(ph, pw)) return std::nullopt;
  return g.id(ph, pw);
}

std::vector<Scanline> enumerate_scanlines(const GridGraph& g, const Direction& r,
                                          int direction_id) {
  const int sh = r.dh, sw = r.dw;
  if (sh == 0 && sw == 0) throw std::invalid_argument("enumerate_scanlines: degenerate step");
  if (std::abs(sh) > 2 || std::abs(sw) > 2)
    throw std::invalid_argument("enumerate_scanlines: step components must be in [-2, 2]");

  const int H = g.height, W = g.width;
  const int a = std::abs(sh), b = std::abs(sw);  // canonical step

  // First-node candidates are generated for the canonical orientation
  // (a, b) with a, b >= 0 and mirrored afterwards for negative steps.
  std::vector<std::pair<int, int>> candidates;
  if (a == 0) {
    for (int ph = 0; ph < H; ++ph) candidates.emplace_back(ph, 0);
  } else if (b == 0) {
    for (int pw = 0; pw < W; ++pw) candidates.emplace_back(0, pw);
  } else if (a <= b) {
    // Wide trees: N = W + (H-1)*|S_w| candidates on row 0, shifted left so
    // that lines entering through the left border are reachable.
    const int n = W + (H - 1) * b;
    for (int t = 0; t < n; ++t) candidates.emplace_back(0, t - (H - 1) * b);
  } else {
    // Narrow trees: first nodes interpolated from the shifted tree index.
    for (int ts = -(H - 1); ts <= (W - 1) * a; ++ts) {
      const int c1 = positive_mod(ts, a);
      const double c2 = static_cast<double>(ts) / a;
      const int ph = positive_mod(a - c1, a);
      const int pw = static_cast<int>(std::ceil(c2));
      candidates.emplace_back(ph, pw);
    }
  }

  std::vector<Scanline> out;
  out.reserve(candidates.size());
  for (auto [ph, pw] : candidates) {
    // Advance clipped candidates along the canonical step until in bounds.
    while (ph < H && !g.contains(ph, pw)) {
      ph += a;
      pw += b;
    }
    if (ph >= H) continue;

    Scanline sl;
    sl.direction = direction_id;
    int h = ph, w = pw;
    while (g.contains(h, w)) {
      const int mh = sh < 0 ? H - 1 - h : h;
      const int mw = sw < 0 ? W - 1 - w : w;
      sl.nodes.push_back(g.id(mh, mw));
      h += a;
      w += b;
    }
    sl.first_node = g.coords(sl.nodes.front());
    out.push_back(std::move(sl));
  }
  return out;
}

GridTopology::GridTopology(const GridGraph& g, DirectionSet dirs)
    : grid_(g), dirs_(std::move(dirs)) {
  const int R = dirs_.size();
  scanlines_.resize(R);
  edge_index_.resize(R);
  edge_count_.resize(R, 0);
  dir_offset_.resize(R, 0);
  for (int r = 0; r < R; ++r) {
    scanlines_[r] = enumerate_scanlines(grid_, dirs_[r], r);
    edge_index_[r].assign(grid_.nodes(), -1);
    int32_t e = 0;
    for (const auto& sl : scanlines_[r])
      for (std::size_t j = 1; j < sl.nodes.size(); ++j)
        edge_index_[r][sl.nodes[j]] = e++;
    edge_count_[r] = e;
    dir_offset_[r] = total_edges_;
    total_edges_ += e;
  }
}

}  // namespace mp
