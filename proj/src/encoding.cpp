#include "pursuit/encoding.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

namespace pursuit {

FeatureVector encode_state(const GameState& state, int self_index,
                           const BoardConfig& cfg) {
  const int n = static_cast<int>(state.captors.size());
  if (self_index < 0 || self_index >= n) {
    throw std::out_of_range("captor index " + std::to_string(self_index) +
                            " out of range");
  }
  const GridPos self = state.captors[self_index];

  struct Offset {
    int dx;
    int dy;
    int norm2() const { return dx * dx + dy * dy; }
  };
  std::vector<Offset> others;
  others.reserve(n - 1);
  for (int i = 0; i < n; ++i) {
    if (i == self_index) continue;
    others.push_back({state.captors[i].x - self.x, state.captors[i].y - self.y});
  }
  // Squared integer norms order identically to Euclidean ones, without
  // floating-point ties.
  std::sort(others.begin(), others.end(), [](const Offset& a, const Offset& b) {
    return std::tuple(a.norm2(), a.dx, a.dy) < std::tuple(b.norm2(), b.dx, b.dy);
  });

  const double sx = cfg.width - 1;
  const double sy = cfg.height - 1;
  FeatureVector out;
  out.reserve(feature_dim(n));
  for (const Offset& o : others) {
    out.push_back(o.dx / sx);
    out.push_back(o.dy / sy);
  }
  out.push_back((state.fugitive.x - self.x) / sx);
  out.push_back((state.fugitive.y - self.y) / sy);
  return out;
}

TargetVector target_vector(MoveDir dir) {
  TargetVector t{};
  t[dir_index(dir)] = 1.0;
  return t;
}

}  // namespace pursuit
