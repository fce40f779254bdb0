#pragma once

#include <array>
#include <vector>

#include "pursuit/game.hpp"

namespace pursuit {

// Relative-position view of the board from one captor: the other captors'
// offsets nearest first, then the fugitive's offset. Offsets are
// (other - self), scaled by (width - 1) and (height - 1) into [-1, 1].
using FeatureVector = std::vector<double>;

// One-hot over MoveDir index order.
using TargetVector = std::array<double, kNumDirs>;

constexpr int feature_dim(int num_captors) { return 2 * (num_captors - 1) + 2; }

// Equidistant captors are ordered by (dx, dy) so the result does not depend on
// the stored captor order.
FeatureVector encode_state(const GameState& state, int self_index,
                           const BoardConfig& cfg);

TargetVector target_vector(MoveDir dir);

}  // namespace pursuit
