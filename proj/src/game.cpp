#include "pursuit/game.hpp"

#include <algorithm>

namespace pursuit {

MoveDir opposite(MoveDir d) {
  switch (d) {
    case MoveDir::Up: return MoveDir::Down;
    case MoveDir::Down: return MoveDir::Up;
    case MoveDir::Left: return MoveDir::Right;
    case MoveDir::Right: return MoveDir::Left;
    case MoveDir::Stay: return MoveDir::Stay;
  }
  return MoveDir::Stay;
}

std::string_view to_string(MoveDir d) {
  switch (d) {
    case MoveDir::Up: return "Up";
    case MoveDir::Down: return "Down";
    case MoveDir::Left: return "Left";
    case MoveDir::Right: return "Right";
    case MoveDir::Stay: return "Stay";
  }
  return "?";
}

std::optional<MoveDir> parse_dir(std::string_view name) {
  for (MoveDir d : kAllDirs) {
    if (to_string(d) == name) return d;
  }
  return std::nullopt;
}

std::string_view to_string(Legality l) {
  switch (l) {
    case Legality::Legal: return "Legal";
    case Legality::WrongLength: return "WrongLength";
    case Legality::OutOfBounds: return "OutOfBounds";
    case Legality::Collision: return "Collision";
    case Legality::OntoFugitive: return "OntoFugitive";
    case Legality::NoMovement: return "NoMovement";
  }
  return "?";
}

void BoardConfig::validate() const {
  if (width < 3) {
    throw std::invalid_argument("board width must be >= 3, got " + std::to_string(width));
  }
  if (height < 3) {
    throw std::invalid_argument("board height must be >= 3, got " + std::to_string(height));
  }
  if (num_captors < 2) {
    throw std::invalid_argument("num_captors must be >= 2, got " +
                                std::to_string(num_captors));
  }
  if (static_cast<long>(width) * height <= num_captors + 1) {
    throw std::invalid_argument("board " + std::to_string(width) + "x" +
                                std::to_string(height) + " cannot hold " +
                                std::to_string(num_captors) +
                                " captors, a fugitive and one empty cell");
  }
}

void validate_state(const GameState& state, const BoardConfig& cfg) {
  if (static_cast<int>(state.captors.size()) != cfg.num_captors) {
    throw std::invalid_argument("state has " + std::to_string(state.captors.size()) +
                                " captors, config expects " +
                                std::to_string(cfg.num_captors));
  }
  if (state.turn < 0) throw std::invalid_argument("negative turn counter");
  std::vector<GridPos> all = state.captors;
  all.push_back(state.fugitive);
  for (const GridPos& p : all) {
    if (!cfg.contains(p)) {
      throw std::invalid_argument("position (" + std::to_string(p.x) + "," +
                                  std::to_string(p.y) + ") is off the board");
    }
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw std::invalid_argument("two entities share a cell");
  }
}

bool is_valid_state(const GameState& state, const BoardConfig& cfg) {
  try {
    validate_state(state, cfg);
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

GridPos displace(GridPos pos, MoveDir dir) {
  switch (dir) {
    case MoveDir::Up: return {pos.x, pos.y + 1};
    case MoveDir::Down: return {pos.x, pos.y - 1};
    case MoveDir::Left: return {pos.x - 1, pos.y};
    case MoveDir::Right: return {pos.x + 1, pos.y};
    case MoveDir::Stay: return pos;
  }
  return pos;
}

GridPos apply_direction(GridPos pos, MoveDir dir, const BoardConfig& cfg) {
  GridPos next = displace(pos, dir);
  if (!cfg.contains(next)) {
    throw OutOfBounds("move " + std::string(to_string(dir)) + " from (" +
                      std::to_string(pos.x) + "," + std::to_string(pos.y) +
                      ") leaves the board");
  }
  return next;
}

Legality is_joint_move_legal(const GameState& state, const JointMove& jm,
                             const BoardConfig& cfg) {
  const std::size_t n = state.captors.size();
  if (jm.dirs.size() != n) return Legality::WrongLength;

  // Small fixed sizes: a quadratic distinctness check beats sorting.
  GridPos targets[16];
  std::vector<GridPos> spill;
  GridPos* t = targets;
  if (n > 16) {
    spill.resize(n);
    t = spill.data();
  }
  bool any_moves = false;
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = displace(state.captors[i], jm.dirs[i]);
    if (!cfg.contains(t[i])) return Legality::OutOfBounds;
    any_moves |= jm.dirs[i] != MoveDir::Stay;
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (t[i] == t[j]) return Legality::Collision;
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (t[i] == state.fugitive) return Legality::OntoFugitive;
  }
  if (!any_moves) return Legality::NoMovement;
  return Legality::Legal;
}

GameState apply_joint_move(const GameState& state, const JointMove& jm,
                           const BoardConfig& cfg) {
  Legality verdict = is_joint_move_legal(state, jm, cfg);
  if (verdict != Legality::Legal) {
    throw IllegalMove("joint move rejected: " + std::string(to_string(verdict)));
  }
  GameState next = state;
  for (std::size_t i = 0; i < next.captors.size(); ++i) {
    next.captors[i] = displace(next.captors[i], jm.dirs[i]);
  }
  return next;
}

namespace {

bool blocked(const GameState& state, const BoardConfig& cfg, GridPos p) {
  if (!cfg.contains(p)) return true;
  return std::find(state.captors.begin(), state.captors.end(), p) != state.captors.end();
}

}  // namespace

bool is_captured(const GameState& state, const BoardConfig& cfg) {
  for (MoveDir d : {MoveDir::Up, MoveDir::Down, MoveDir::Left, MoveDir::Right}) {
    if (!blocked(state, cfg, displace(state.fugitive, d))) return false;
  }
  return true;
}

std::vector<MoveDir> fugitive_legal_moves(const GameState& state,
                                          const BoardConfig& cfg) {
  std::vector<MoveDir> moves;
  for (MoveDir d : {MoveDir::Up, MoveDir::Down, MoveDir::Left, MoveDir::Right}) {
    if (!blocked(state, cfg, displace(state.fugitive, d))) moves.push_back(d);
  }
  moves.push_back(MoveDir::Stay);
  return moves;
}

MoveDir random_fugitive_move(const GameState& state, const BoardConfig& cfg,
                             Rng& rng) {
  std::vector<MoveDir> moves = fugitive_legal_moves(state, cfg);
  if (moves.size() == 1) return moves.front();
  return moves[uniform_index(rng, moves.size())];
}

GameState apply_fugitive_move(const GameState& state, MoveDir dir,
                              const BoardConfig& cfg) {
  std::vector<MoveDir> moves = fugitive_legal_moves(state, cfg);
  if (std::find(moves.begin(), moves.end(), dir) == moves.end()) {
    throw IllegalMove("fugitive cannot move " + std::string(to_string(dir)));
  }
  GameState next = state;
  next.fugitive = displace(state.fugitive, dir);
  return next;
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

}  // namespace pursuit
