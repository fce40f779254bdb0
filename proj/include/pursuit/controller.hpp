#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pursuit/encoding.hpp"
#include "pursuit/ga.hpp"
#include "pursuit/game.hpp"
#include "pursuit/mlp.hpp"

namespace pursuit {

enum class ThresholdMode {
  // A direction is active when its output is strictly above 0.5.
  Strict,
  // The single highest output is taken (first index on ties).
  Argmax,
};

struct AgentProposal {
  enum class Kind { Single, Ambiguous, None };

  Kind kind = Kind::None;
  // One entry for Single, two or more for Ambiguous, empty for None.
  std::vector<MoveDir> dirs;

  bool is_single() const { return kind == Kind::Single; }
};

AgentProposal proposal_from_outputs(const Outputs& outputs,
                                    ThresholdMode mode = ThresholdMode::Strict);

// Throws DimensionMismatch.
AgentProposal propose(const MLPParams& params, const FeatureVector& features,
                      ThresholdMode mode = ThresholdMode::Strict);

struct TrainingExample {
  FeatureVector features;
  TargetVector target;
  int game_id = 0;
  int turn = 0;
  int captor_index = 0;

  MoveDir target_dir() const;
};

// Append-only demonstrations, kept separately for each captor.
class TrainingStore {
 public:
  explicit TrainingStore(int num_captors) : per_captor_(num_captors) {}

  void add(TrainingExample example);
  int num_captors() const { return static_cast<int>(per_captor_.size()); }
  const std::vector<TrainingExample>& examples(int captor) const {
    return per_captor_.at(captor);
  }
  std::size_t size(int captor) const { return per_captor_.at(captor).size(); }
  std::size_t total_size() const;
  TrainingSet training_set(int captor) const;

 private:
  std::vector<std::vector<TrainingExample>> per_captor_;
};

enum class MoveSource : std::uint8_t { Swarm, Global };
enum class GameOutcome : std::uint8_t { Captured, Timeout, Stalemate };

std::string_view to_string(MoveSource s);
std::string_view to_string(GameOutcome o);
std::optional<MoveSource> parse_source(std::string_view s);
std::optional<GameOutcome> parse_outcome(std::string_view s);

struct ControllerConfig {
  BoardConfig board;
  GAConfig ga;
  ThresholdMode threshold = ThresholdMode::Strict;
  // When false every captor turn goes to the Global Agent.
  bool swarm_enabled = true;
  int max_turns = 500;
  TrainOptions training;

  void validate() const;
};

struct CaptorTurn {
  JointMove move;
  MoveSource source = MoveSource::Global;
};

// Swarm proposals are used when every agent is Single and the combination is
// legal. Otherwise the GA decides and one example per captor is appended to
// the store. NoLegalMove propagates.
CaptorTurn captor_turn(const GameState& state, std::span<const MLPParams> agents,
                       const ControllerConfig& cfg, Rng& rng, TrainingStore& store,
                       int game_id = 0);

struct TurnLog {
  int turn = 0;
  MoveSource source = MoveSource::Global;
  JointMove captors;
  // Absent when the captors' move ended the game.
  std::optional<MoveDir> fugitive;

  friend bool operator==(const TurnLog&, const TurnLog&) = default;
};

struct GameRecord {
  int game_id = 0;
  GameOutcome outcome = GameOutcome::Timeout;
  // Rounds started, including one that ended in stalemate.
  int turns = 0;
  std::vector<MoveSource> sources;
  double swarm_fraction = 0.0;
  GameState initial;
  GameState final_state;
  std::vector<TurnLog> moves;

  friend bool operator==(const GameRecord&, const GameRecord&) = default;
};

// Captors on uniformly random distinct cells; the fugitive on whichever of ten
// random free cells maximises the distance sum without being captured.
GameState initial_placement(const BoardConfig& cfg, Rng& rng);

GameRecord play_game(const GameState& initial, std::span<const MLPParams> agents,
                     const ControllerConfig& cfg, Rng& rng, TrainingStore& store,
                     int game_id = 0);
GameRecord play_game(std::span<const MLPParams> agents, const ControllerConfig& cfg,
                     Rng& rng, TrainingStore& store, int game_id = 0);

// Network every captor starts with: zero weights, so every proposal is None.
MLPParams untrained_agent(const BoardConfig& cfg);

// Notified after each game once the agents have been retrained.
class SessionSink {
 public:
  virtual ~SessionSink() = default;
  virtual void on_game(const GameRecord& record,
                       std::span<const TrainingExample> new_examples,
                       const TrainingStore& store,
                       std::span<const MLPParams> agents) = 0;
};

struct SessionResult {
  std::vector<GameRecord> records;
  std::vector<MLPParams> agents;
};

// Plays games sequentially, retraining each captor from scratch on its own
// accumulated examples after every game. Game ids start at 1.
SessionResult run_session(const ControllerConfig& cfg, int n_games, std::uint64_t seed,
                          std::span<SessionSink* const> sinks = {});

// Per-purpose random streams derived from the session seed.
Rng game_rng(std::uint64_t seed, int game_id);
Rng training_rng(std::uint64_t seed, int game_id, int captor);

}  // namespace pursuit
