#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pursuit/controller.hpp"

namespace pursuit {

// Invalid flags, config values or input files. The CLI maps this to exit 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  ControllerConfig controller;
  int n_games = 1;
  std::uint64_t seed = 0;
  std::filesystem::path out = "metrics.csv";
  std::filesystem::path train_log = "train_log";
  bool render = false;

  // Throws UsageError.
  void validate() const;
};

// Flat JSON with the field names below; unknown keys are rejected.
//   width height num_captors n_games seed max_turns population_size
//   generations crossover_prob mutation_prob_per_gene tournament_size
//   elite_count penalty_factor win_factor threshold ("strict"|"argmax")
//   swarm_enabled learning_rate momentum iterations out train_log render
void apply_config_json(ExperimentConfig& cfg, const nlohmann::json& j);
ExperimentConfig load_config_file(const std::filesystem::path& path,
                                  ExperimentConfig base = {});

// "WxH" -> (width, height). Throws UsageError.
std::pair<int, int> parse_board_size(const std::string& text);

// ---- metrics ---------------------------------------------------------------

struct MetricsRow {
  int game_id = 0;
  GameOutcome outcome = GameOutcome::Timeout;
  int turns = 0;
  double swarm_fraction = 0.0;
  std::vector<std::size_t> cumulative_examples;
  double wall_time_ms = 0.0;
};

// game_id,outcome,turns,swarm_fraction,examples_c0,...,examples_c{M-1},wall_time_ms
std::string metrics_header(int num_captors);
std::string format_metrics_row(const MetricsRow& row);

// ---- sinks -----------------------------------------------------------------

// Writes one CSV row per game, flushed after each game.
class MetricsCsvSink : public SessionSink {
 public:
  MetricsCsvSink(const std::filesystem::path& path, int num_captors);
  void on_game(const GameRecord& record, std::span<const TrainingExample> new_examples,
               const TrainingStore& store, std::span<const MLPParams> agents) override;
  const std::vector<MetricsRow>& rows() const { return rows_; }

 private:
  std::ofstream out_;
  std::vector<MetricsRow> rows_;
  std::chrono::steady_clock::time_point last_;
};

// Under `dir`: captor_<i>.jsonl training examples, moves.jsonl (one game per
// line) and captor_<i>_params.json checkpoints of the latest networks.
class TrainingLogSink : public SessionSink {
 public:
  TrainingLogSink(const std::filesystem::path& dir, const BoardConfig& board);
  void on_game(const GameRecord& record, std::span<const TrainingExample> new_examples,
               const TrainingStore& store, std::span<const MLPParams> agents) override;

  static std::filesystem::path captor_log(const std::filesystem::path& dir, int captor);
  static std::filesystem::path move_log(const std::filesystem::path& dir);
  static std::filesystem::path params_file(const std::filesystem::path& dir, int captor);

 private:
  std::filesystem::path dir_;
  BoardConfig board_;
  std::vector<std::ofstream> captor_logs_;
  std::ofstream moves_;
};

// Re-plays each finished game to `out` as ASCII boards.
class RenderSink : public SessionSink {
 public:
  RenderSink(std::ostream& out, const BoardConfig& board) : out_(out), board_(board) {}
  void on_game(const GameRecord& record, std::span<const TrainingExample> new_examples,
               const TrainingStore& store, std::span<const MLPParams> agents) override;

 private:
  std::ostream& out_;
  BoardConfig board_;
};

nlohmann::json example_to_json(const TrainingExample& e);
TrainingExample example_from_json(const nlohmann::json& j);
nlohmann::json game_to_json(const GameRecord& record, const BoardConfig& board);

// Captors `*`, fugitive `o`, empty `.`; top row is the highest y.
std::string render_board(const GameState& state, const BoardConfig& cfg);

// ---- run -------------------------------------------------------------------

// Runs the session with CSV and training-log sinks (plus rendering to
// `render_out` when enabled). Throws UsageError on bad configuration.
SessionResult run_experiment(const ExperimentConfig& cfg, std::ostream& render_out);

// ---- stats -----------------------------------------------------------------

struct StatsReport {
  std::size_t games = 0;
  double capture_rate = 0.0;
  double mean_turns = 0.0;
  // Quartile size is max(1, games / 4).
  double first_quartile_swarm = 0.0;
  double last_quartile_swarm = 0.0;
  double swarm_difference() const { return last_quartile_swarm - first_quartile_swarm; }
};

// Throws UsageError naming the line and column of the first malformed field.
std::vector<MetricsRow> read_metrics_csv(std::istream& in);
StatsReport compute_stats(const std::vector<MetricsRow>& rows);
std::string format_stats(const StatsReport& report);

// ---- replay ----------------------------------------------------------------

struct ReplayResult {
  bool ok = true;
  // Turn at which the first violation was found (0 for the initial state).
  int violation_turn = -1;
  std::string message;
  GameOutcome outcome = GameOutcome::Timeout;
  int turns_replayed = 0;
};

// Re-validates every logged move. Writes a transcript to `out`.
// Throws UsageError if the game cannot be found or the line is unparsable.
ReplayResult replay_game(const nlohmann::json& game, std::ostream& out);
ReplayResult replay_from_log(std::istream& move_log, int game_id, std::ostream& out);

// PURSUIT_LOG_LEVEL in {error, info, debug}; defaults to info.
void configure_logging();

}  // namespace pursuit
