// pursuit: run hybrid GA/swarm pursuit sessions, summarise metrics, replay games.
//
//   pursuit run --games 200 --board 8x8 --seed 42 --out m.csv --train-log data/
//   pursuit stats m.csv
//   pursuit replay --log data/moves.jsonl --game 17

#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "pursuit/experiment.hpp"

namespace {

using pursuit::ExperimentConfig;
using pursuit::UsageError;

struct RunFlags {
  std::optional<int> games;
  std::optional<std::string> board;
  std::optional<int> captors;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> train_log;
  std::optional<std::string> config;
  std::optional<int> max_turns;
  bool render = false;
  bool argmax = false;
  bool ga_only = false;
};

ExperimentConfig resolve(const RunFlags& f) {
  ExperimentConfig cfg;
  if (f.config) cfg = pursuit::load_config_file(*f.config);
  if (f.games) cfg.n_games = *f.games;
  if (f.board) {
    const auto [w, h] = pursuit::parse_board_size(*f.board);
    cfg.controller.board.width = w;
    cfg.controller.board.height = h;
  }
  if (f.captors) cfg.controller.board.num_captors = *f.captors;
  if (f.seed) cfg.seed = *f.seed;
  if (f.out) cfg.out = *f.out;
  if (f.train_log) cfg.train_log = *f.train_log;
  if (f.max_turns) cfg.controller.max_turns = *f.max_turns;
  if (f.render) cfg.render = true;
  if (f.argmax) cfg.controller.threshold = pursuit::ThresholdMode::Argmax;
  if (f.ga_only) cfg.controller.swarm_enabled = false;
  cfg.validate();
  return cfg;
}

int cmd_run(const RunFlags& flags) {
  const ExperimentConfig cfg = resolve(flags);
  const auto result = pursuit::run_experiment(cfg, std::cout);
  const auto stats = pursuit::compute_stats([&] {
    std::ifstream in(cfg.out);
    return pursuit::read_metrics_csv(in);
  }());
  spdlog::info("{} games written to {}", result.records.size(), cfg.out.string());
  std::cerr << pursuit::format_stats(stats);
  return 0;
}

int cmd_stats(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open metrics file " + path);
  std::cout << pursuit::format_stats(pursuit::compute_stats(pursuit::read_metrics_csv(in)));
  return 0;
}

int cmd_replay(const std::string& path, int game_id) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open move log " + path);
  const pursuit::ReplayResult r = pursuit::replay_from_log(in, game_id, std::cout);
  if (!r.ok) {
    std::cerr << "replay failed at turn " << r.violation_turn << ": " << r.message << '\n';
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  pursuit::configure_logging();

  CLI::App app{"Hybrid centralised/swarm pursuit simulator"};
  app.require_subcommand(1);

  RunFlags run;
  auto* run_cmd = app.add_subcommand("run", "Play a training session");
  run_cmd->add_option("--games", run.games, "Number of games");
  run_cmd->add_option("--board", run.board, "Board size WxH");
  run_cmd->add_option("--captors", run.captors, "Number of captors");
  run_cmd->add_option("--seed", run.seed, "Session seed");
  run_cmd->add_option("--out", run.out, "Metrics CSV path");
  run_cmd->add_option("--train-log", run.train_log, "Directory for training and move logs");
  run_cmd->add_option("--config", run.config, "JSON config file (flags override it)");
  run_cmd->add_option("--max-turns", run.max_turns, "Turn cap per game");
  run_cmd->add_flag("--render", run.render, "Print an ASCII board per turn");
  run_cmd->add_flag("--argmax", run.argmax, "Take each network's highest output");
  run_cmd->add_flag("--ga-only", run.ga_only, "Disable swarm proposals");

  std::string metrics_path;
  auto* stats_cmd = app.add_subcommand("stats", "Summarise a metrics CSV");
  stats_cmd->add_option("metrics", metrics_path, "Metrics CSV")->required();

  std::string log_path;
  int game_id = 0;
  auto* replay_cmd = app.add_subcommand("replay", "Re-validate and render a logged game");
  replay_cmd->add_option("--log", log_path, "moves.jsonl from a run")->required();
  replay_cmd->add_option("--game", game_id, "Game id")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*stats_cmd) return cmd_stats(metrics_path);
    if (*replay_cmd) return cmd_replay(log_path, game_id);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
