#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pursuit {

// All randomness in the library flows through explicitly passed engines of
// this type.
using Rng = std::mt19937_64;

struct GridPos {
  int x = 0;
  int y = 0;

  friend bool operator==(const GridPos&, const GridPos&) = default;
  friend auto operator<=>(const GridPos&, const GridPos&) = default;
};

// Index order is shared with network outputs and one-hot targets.
enum class MoveDir : std::uint8_t { Up = 0, Down = 1, Left = 2, Right = 3, Stay = 4 };

inline constexpr int kNumDirs = 5;
inline constexpr std::array<MoveDir, kNumDirs> kAllDirs = {
    MoveDir::Up, MoveDir::Down, MoveDir::Left, MoveDir::Right, MoveDir::Stay};

constexpr int dir_index(MoveDir d) { return static_cast<int>(d); }
constexpr MoveDir dir_from_index(int i) { return static_cast<MoveDir>(i); }
MoveDir opposite(MoveDir d);

std::string_view to_string(MoveDir d);
std::optional<MoveDir> parse_dir(std::string_view name);

struct BoardConfig {
  int width = 8;
  int height = 8;
  int num_captors = 4;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
  bool contains(GridPos p) const {
    return p.x >= 0 && p.y >= 0 && p.x < width && p.y < height;
  }
};

struct GameState {
  std::vector<GridPos> captors;
  GridPos fugitive;
  int turn = 0;

  friend bool operator==(const GameState&, const GameState&) = default;
};

// Throws std::invalid_argument if positions are out of bounds, overlap, or the
// captor count does not match the board config.
void validate_state(const GameState& state, const BoardConfig& cfg);
bool is_valid_state(const GameState& state, const BoardConfig& cfg);

// One direction per captor, index-aligned with GameState::captors.
struct JointMove {
  std::vector<MoveDir> dirs;

  friend bool operator==(const JointMove&, const JointMove&) = default;
};

class OutOfBounds : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class IllegalMove : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class Legality {
  Legal,
  WrongLength,
  OutOfBounds,
  Collision,
  OntoFugitive,
  NoMovement,
};

std::string_view to_string(Legality l);

// Up is y+1, Right is x+1; origin at the bottom-left cell.
GridPos displace(GridPos pos, MoveDir dir);

// Displaced position, or OutOfBounds when it leaves the board (no wrapping).
GridPos apply_direction(GridPos pos, MoveDir dir, const BoardConfig& cfg);

// Moves are synchronous: only final cells are checked, so swaps are legal.
Legality is_joint_move_legal(const GameState& state, const JointMove& jm,
                             const BoardConfig& cfg);

// Throws IllegalMove if the joint move is not legal. Turn is left unchanged.
GameState apply_joint_move(const GameState& state, const JointMove& jm,
                           const BoardConfig& cfg);

// Every orthogonal neighbour of the fugitive is a wall or a captor.
bool is_captured(const GameState& state, const BoardConfig& cfg);

// In canonical direction order; Stay is always present.
std::vector<MoveDir> fugitive_legal_moves(const GameState& state,
                                          const BoardConfig& cfg);

MoveDir random_fugitive_move(const GameState& state, const BoardConfig& cfg,
                             Rng& rng);

// Throws IllegalMove if dir is not among fugitive_legal_moves.
GameState apply_fugitive_move(const GameState& state, MoveDir dir,
                              const BoardConfig& cfg);

// Uniform integer in [0, n). Used everywhere a bounded draw is needed so the
// stream consumption is identical across call sites.
std::size_t uniform_index(Rng& rng, std::size_t n);

}  // namespace pursuit
