#include "pursuit/experiment.hpp"

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

namespace pursuit {

namespace fs = std::filesystem;
using nlohmann::json;

// ---- config ----------------------------------------------------------------

void ExperimentConfig::validate() const {
  try {
    controller.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (n_games < 1) throw UsageError("games must be >= 1, got " + std::to_string(n_games));
  if (out.empty()) throw UsageError("metrics output path must not be empty");
  if (train_log.empty()) throw UsageError("training log directory must not be empty");
}

namespace {

template <typename T>
T field(const json& j, const std::string& key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw UsageError("config field '" + key + "' has the wrong type");
  }
}

}  // namespace

void apply_config_json(ExperimentConfig& cfg, const json& j) {
  if (!j.is_object()) throw UsageError("config file must contain a JSON object");
  ControllerConfig& c = cfg.controller;
  for (const auto& [key, value] : j.items()) {
    if (key == "width") c.board.width = field<int>(value, key);
    else if (key == "height") c.board.height = field<int>(value, key);
    else if (key == "num_captors") c.board.num_captors = field<int>(value, key);
    else if (key == "n_games") cfg.n_games = field<int>(value, key);
    else if (key == "seed") cfg.seed = field<std::uint64_t>(value, key);
    else if (key == "max_turns") c.max_turns = field<int>(value, key);
    else if (key == "population_size") c.ga.population_size = field<int>(value, key);
    else if (key == "generations") c.ga.generations = field<int>(value, key);
    else if (key == "crossover_prob") c.ga.crossover_prob = field<double>(value, key);
    else if (key == "mutation_prob_per_gene") c.ga.mutation_prob_per_gene = field<double>(value, key);
    else if (key == "tournament_size") c.ga.tournament_size = field<int>(value, key);
    else if (key == "elite_count") c.ga.elite_count = field<int>(value, key);
    else if (key == "penalty_factor") c.ga.penalty_factor = field<double>(value, key);
    else if (key == "win_factor") c.ga.win_factor = field<double>(value, key);
    else if (key == "swarm_enabled") c.swarm_enabled = field<bool>(value, key);
    else if (key == "learning_rate") c.training.learning_rate = field<double>(value, key);
    else if (key == "momentum") c.training.momentum = field<double>(value, key);
    else if (key == "iterations") c.training.iterations = field<int>(value, key);
    else if (key == "out") cfg.out = field<std::string>(value, key);
    else if (key == "train_log") cfg.train_log = field<std::string>(value, key);
    else if (key == "render") cfg.render = field<bool>(value, key);
    else if (key == "threshold") {
      const auto mode = field<std::string>(value, key);
      if (mode == "strict") c.threshold = ThresholdMode::Strict;
      else if (mode == "argmax") c.threshold = ThresholdMode::Argmax;
      else throw UsageError("config field 'threshold' must be \"strict\" or \"argmax\"");
    } else {
      throw UsageError("unknown config field '" + key + "'");
    }
  }
}

ExperimentConfig load_config_file(const fs::path& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw UsageError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  apply_config_json(base, j);
  return base;
}

std::pair<int, int> parse_board_size(const std::string& text) {
  const auto x = text.find_first_of("xX");
  auto parse = [&](const std::string& part, const char* name) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (part.empty() || used != part.size()) {
      throw UsageError(std::string("board ") + name + " '" + part + "' is not an integer");
    }
    return v;
  };
  if (x == std::string::npos) throw UsageError("board size must look like WxH, got '" + text + "'");
  return {parse(text.substr(0, x), "width"), parse(text.substr(x + 1), "height")};
}

// ---- metrics ---------------------------------------------------------------

std::string metrics_header(int num_captors) {
  std::string h = "game_id,outcome,turns,swarm_fraction";
  for (int i = 0; i < num_captors; ++i) h += fmt::format(",examples_c{}", i);
  h += ",wall_time_ms";
  return h;
}

std::string format_metrics_row(const MetricsRow& row) {
  std::string s = fmt::format("{},{},{},{}", row.game_id, to_string(row.outcome), row.turns,
                              row.swarm_fraction);
  for (std::size_t n : row.cumulative_examples) s += fmt::format(",{}", n);
  s += fmt::format(",{:.3f}", row.wall_time_ms);
  return s;
}

// ---- sinks -----------------------------------------------------------------

namespace {

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

json pos_json(GridPos p) { return json::array({p.x, p.y}); }

GridPos pos_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw std::invalid_argument("position must be [x, y]");
  return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

MetricsCsvSink::MetricsCsvSink(const fs::path& path, int num_captors)
    : out_(open_output(path)), last_(std::chrono::steady_clock::now()) {
  out_ << metrics_header(num_captors) << '\n';
  out_.flush();
}

void MetricsCsvSink::on_game(const GameRecord& record, std::span<const TrainingExample>,
                             const TrainingStore& store, std::span<const MLPParams>) {
  const auto now = std::chrono::steady_clock::now();
  MetricsRow row;
  row.game_id = record.game_id;
  row.outcome = record.outcome;
  row.turns = record.turns;
  row.swarm_fraction = record.swarm_fraction;
  for (int i = 0; i < store.num_captors(); ++i) row.cumulative_examples.push_back(store.size(i));
  row.wall_time_ms = std::chrono::duration<double, std::milli>(now - last_).count();
  last_ = now;
  out_ << format_metrics_row(row) << '\n';
  out_.flush();
  rows_.push_back(std::move(row));
}

fs::path TrainingLogSink::captor_log(const fs::path& dir, int captor) {
  return dir / fmt::format("captor_{}.jsonl", captor);
}

fs::path TrainingLogSink::move_log(const fs::path& dir) { return dir / "moves.jsonl"; }

fs::path TrainingLogSink::params_file(const fs::path& dir, int captor) {
  return dir / fmt::format("captor_{}_params.json", captor);
}

TrainingLogSink::TrainingLogSink(const fs::path& dir, const BoardConfig& board)
    : dir_(dir), board_(board) {
  fs::create_directories(dir_);
  for (int i = 0; i < board.num_captors; ++i) captor_logs_.push_back(open_output(captor_log(dir_, i)));
  moves_ = open_output(move_log(dir_));
}

void TrainingLogSink::on_game(const GameRecord& record,
                              std::span<const TrainingExample> new_examples,
                              const TrainingStore&, std::span<const MLPParams> agents) {
  for (const TrainingExample& e : new_examples) {
    captor_logs_.at(e.captor_index) << example_to_json(e).dump() << '\n';
  }
  for (auto& log : captor_logs_) log.flush();
  moves_ << game_to_json(record, board_).dump() << '\n';
  moves_.flush();
  for (std::size_t i = 0; i < agents.size(); ++i) {
    std::ofstream p = open_output(params_file(dir_, static_cast<int>(i)));
    p << json(agents[i]).dump() << '\n';
  }
}

json example_to_json(const TrainingExample& e) {
  return json{{"game_id", e.game_id},
              {"turn", e.turn},
              {"captor", e.captor_index},
              {"features", e.features},
              {"target_dir", std::string(to_string(e.target_dir()))}};
}

TrainingExample example_from_json(const json& j) {
  TrainingExample e;
  e.game_id = j.at("game_id").get<int>();
  e.turn = j.at("turn").get<int>();
  e.captor_index = j.at("captor").get<int>();
  e.features = j.at("features").get<FeatureVector>();
  const auto dir = parse_dir(j.at("target_dir").get<std::string>());
  if (!dir) throw std::invalid_argument("unknown target_dir");
  e.target = target_vector(*dir);
  return e;
}

json game_to_json(const GameRecord& record, const BoardConfig& board) {
  json captors = json::array();
  for (GridPos p : record.initial.captors) captors.push_back(pos_json(p));
  json turns = json::array();
  for (const TurnLog& t : record.moves) {
    json dirs = json::array();
    for (MoveDir d : t.captors.dirs) dirs.push_back(std::string(to_string(d)));
    json entry{{"turn", t.turn}, {"source", std::string(to_string(t.source))}, {"captors", dirs}};
    entry["fugitive"] = t.fugitive ? json(std::string(to_string(*t.fugitive))) : json(nullptr);
    turns.push_back(std::move(entry));
  }
  return json{{"game_id", record.game_id},
              {"board",
               {{"width", board.width}, {"height", board.height}, {"num_captors", board.num_captors}}},
              {"initial", {{"captors", captors}, {"fugitive", pos_json(record.initial.fugitive)}}},
              {"turns", turns},
              {"outcome", std::string(to_string(record.outcome))},
              {"turn_count", record.turns}};
}

std::string render_board(const GameState& state, const BoardConfig& cfg) {
  std::string out;
  out.reserve(static_cast<std::size_t>(cfg.height) * (cfg.width + 1));
  for (int y = cfg.height - 1; y >= 0; --y) {
    for (int x = 0; x < cfg.width; ++x) {
      const GridPos p{x, y};
      char c = '.';
      if (p == state.fugitive) c = 'o';
      if (std::find(state.captors.begin(), state.captors.end(), p) != state.captors.end()) c = '*';
      out += c;
    }
    out += '\n';
  }
  return out;
}

void RenderSink::on_game(const GameRecord& record, std::span<const TrainingExample>,
                         const TrainingStore&, std::span<const MLPParams>) {
  replay_game(game_to_json(record, board_), out_);
}

// ---- run -------------------------------------------------------------------

SessionResult run_experiment(const ExperimentConfig& cfg, std::ostream& render_out) {
  cfg.validate();
  const BoardConfig& board = cfg.controller.board;
  MetricsCsvSink metrics(cfg.out, board.num_captors);
  TrainingLogSink logs(cfg.train_log, board);
  RenderSink render(render_out, board);

  // Progress goes to the logger; the sinks own all persisted output.
  class ProgressSink : public SessionSink {
   public:
    explicit ProgressSink(int n) : n_(n) {}
    void on_game(const GameRecord& r, std::span<const TrainingExample> fresh,
                 const TrainingStore& store, std::span<const MLPParams>) override {
      spdlog::info("game {}/{}: {} in {} turns, swarm fraction {:.3f}", r.game_id, n_,
                   to_string(r.outcome), r.turns, r.swarm_fraction);
      spdlog::debug("game {}: {} new examples, {} total", r.game_id, fresh.size(),
                    store.total_size());
    }

   private:
    int n_;
  } progress(cfg.n_games);

  std::vector<SessionSink*> sinks{&metrics, &logs, &progress};
  if (cfg.render) sinks.push_back(&render);
  return run_session(cfg.controller, cfg.n_games, cfg.seed, sinks);
}

// ---- stats -----------------------------------------------------------------

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

[[noreturn]] void csv_error(std::size_t line, std::size_t column, const std::string& what) {
  throw UsageError(fmt::format("malformed metrics CSV at row {}, column {}: {}", line, column, what));
}

template <typename T>
T parse_number(const std::string& text, std::size_t line, std::size_t column) {
  std::istringstream ss(text);
  T v{};
  ss >> v;
  if (text.empty() || ss.fail() || !ss.eof()) {
    csv_error(line, column, "'" + text + "' is not a valid number");
  }
  return v;
}

}  // namespace

std::vector<MetricsRow> read_metrics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) csv_error(1, 1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);
  const int num_captors = static_cast<int>(header.size()) - 5;
  if (num_captors < 1) csv_error(1, header.size() + 1, "header has too few columns");
  const std::vector<std::string> expected = split_csv_line(metrics_header(num_captors));
  for (std::size_t c = 0; c < expected.size(); ++c) {
    if (header[c] != expected[c]) {
      csv_error(1, c + 1, "expected header '" + expected[c] + "', got '" + header[c] + "'");
    }
  }

  std::vector<MetricsRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      csv_error(lineno, std::min(cells.size(), header.size()) + 1,
                fmt::format("expected {} fields, got {}", header.size(), cells.size()));
    }
    MetricsRow row;
    row.game_id = parse_number<int>(cells[0], lineno, 1);
    if (!rows.empty() && row.game_id <= rows.back().game_id) {
      csv_error(lineno, 1, "game_id is not strictly increasing");
    }
    const auto outcome = parse_outcome(cells[1]);
    if (!outcome) csv_error(lineno, 2, "unknown outcome '" + cells[1] + "'");
    row.outcome = *outcome;
    row.turns = parse_number<int>(cells[2], lineno, 3);
    if (row.turns < 1) csv_error(lineno, 3, "turns must be >= 1");
    row.swarm_fraction = parse_number<double>(cells[3], lineno, 4);
    if (row.swarm_fraction < 0.0 || row.swarm_fraction > 1.0) {
      csv_error(lineno, 4, "swarm_fraction must be in [0, 1]");
    }
    for (int i = 0; i < num_captors; ++i) {
      row.cumulative_examples.push_back(parse_number<std::size_t>(cells[4 + i], lineno, 5 + i));
    }
    row.wall_time_ms = parse_number<double>(cells.back(), lineno, cells.size());
    rows.push_back(std::move(row));
  }
  return rows;
}

StatsReport compute_stats(const std::vector<MetricsRow>& rows) {
  StatsReport r;
  r.games = rows.size();
  if (rows.empty()) return r;
  std::size_t captured = 0;
  double turns = 0.0;
  for (const MetricsRow& row : rows) {
    captured += row.outcome == GameOutcome::Captured;
    turns += row.turns;
  }
  r.capture_rate = static_cast<double>(captured) / rows.size();
  r.mean_turns = turns / rows.size();

  const std::size_t q = std::max<std::size_t>(1, rows.size() / 4);
  double first = 0.0;
  double last = 0.0;
  for (std::size_t i = 0; i < q; ++i) {
    first += rows[i].swarm_fraction;
    last += rows[rows.size() - q + i].swarm_fraction;
  }
  r.first_quartile_swarm = first / q;
  r.last_quartile_swarm = last / q;
  return r;
}

std::string format_stats(const StatsReport& r) {
  return fmt::format(
      "games: {}\n"
      "capture_rate: {:.4f}\n"
      "mean_turns: {:.4f}\n"
      "swarm_fraction_first_quartile: {:.4f}\n"
      "swarm_fraction_last_quartile: {:.4f}\n"
      "swarm_fraction_difference: {:.4f}\n",
      r.games, r.capture_rate, r.mean_turns, r.first_quartile_swarm, r.last_quartile_swarm,
      r.swarm_difference());
}

// ---- replay ----------------------------------------------------------------

ReplayResult replay_game(const json& game, std::ostream& out) {
  ReplayResult res;
  auto fail = [&](int turn, std::string msg) {
    res.ok = false;
    res.violation_turn = turn;
    res.message = std::move(msg);
    out << "VIOLATION at turn " << turn << ": " << res.message << '\n';
    return res;
  };

  BoardConfig board;
  GameState state;
  GameOutcome recorded{};
  int game_id = 0;
  int turn_count = 0;
  try {
    game_id = game.at("game_id").get<int>();
    const json& b = game.at("board");
    board.width = b.at("width").get<int>();
    board.height = b.at("height").get<int>();
    board.num_captors = b.at("num_captors").get<int>();
    for (const json& p : game.at("initial").at("captors")) state.captors.push_back(pos_from_json(p));
    state.fugitive = pos_from_json(game.at("initial").at("fugitive"));
    const auto o = parse_outcome(game.at("outcome").get<std::string>());
    if (!o) throw std::invalid_argument("unknown outcome");
    recorded = *o;
    turn_count = game.at("turn_count").get<int>();
    (void)game.at("turns").size();
  } catch (const std::exception& e) {
    throw UsageError(std::string("malformed move log entry: ") + e.what());
  }

  out << "game " << game_id << '\n';
  try {
    board.validate();
    validate_state(state, board);
  } catch (const std::invalid_argument& e) {
    return fail(0, std::string("invalid initial state: ") + e.what());
  }
  out << "turn 0\n" << render_board(state, board);

  bool captured = is_captured(state, board);
  if (captured) return fail(0, "initial state is already captured");

  int expected_turn = 1;
  for (const json& t : game.at("turns")) {
    int turn = expected_turn;
    JointMove jm;
    std::optional<MoveDir> fugitive;
    std::string source;
    try {
      turn = t.at("turn").get<int>();
      source = t.at("source").get<std::string>();
      for (const json& d : t.at("captors")) {
        const auto dir = parse_dir(d.get<std::string>());
        if (!dir) return fail(turn, "unknown captor direction " + d.dump());
        jm.dirs.push_back(*dir);
      }
      if (!t.at("fugitive").is_null()) {
        fugitive = parse_dir(t.at("fugitive").get<std::string>());
        if (!fugitive) return fail(turn, "unknown fugitive direction " + t.at("fugitive").dump());
      }
    } catch (const json::exception& e) {
      return fail(turn, std::string("malformed turn entry: ") + e.what());
    }
    if (turn != expected_turn) {
      return fail(turn, fmt::format("expected turn {}, log says {}", expected_turn, turn));
    }
    if (captured) return fail(turn, "move logged after the fugitive was captured");

    const Legality verdict = is_joint_move_legal(state, jm, board);
    if (verdict != Legality::Legal) {
      return fail(turn, "illegal captor move (" + std::string(to_string(verdict)) + ")");
    }
    state = apply_joint_move(state, jm, board);
    captured = is_captured(state, board);
    if (fugitive) {
      if (captured) return fail(turn, "fugitive moved after being captured");
      const auto legal = fugitive_legal_moves(state, board);
      if (std::find(legal.begin(), legal.end(), *fugitive) == legal.end()) {
        return fail(turn, "illegal fugitive move " + std::string(to_string(*fugitive)));
      }
      state = apply_fugitive_move(state, *fugitive, board);
      captured = is_captured(state, board);
    } else if (!captured) {
      return fail(turn, "fugitive move missing although the game continues");
    }
    state.turn = turn;

    std::string dirs;
    for (std::size_t i = 0; i < jm.dirs.size(); ++i) {
      dirs += (i ? "," : "") + std::string(to_string(jm.dirs[i]));
    }
    out << "turn " << turn << " [" << source << "] captors " << dirs << " fugitive "
        << (fugitive ? to_string(*fugitive) : std::string_view("-")) << '\n'
        << render_board(state, board);
    res.turns_replayed = turn;
    ++expected_turn;
  }

  const int played = expected_turn - 1;
  if (captured) {
    if (recorded != GameOutcome::Captured) {
      return fail(played, "game ends captured but the log records " + std::string(to_string(recorded)));
    }
  } else if (recorded == GameOutcome::Captured) {
    return fail(played, "log records a capture that the moves do not reproduce");
  }
  const int expected_count = recorded == GameOutcome::Stalemate ? played + 1 : played;
  if (turn_count != expected_count) {
    return fail(played, fmt::format("turn_count {} does not match {} replayed turns", turn_count, played));
  }
  res.outcome = recorded;
  out << "outcome " << to_string(recorded) << " after " << turn_count << " turns\n";
  return res;
}

ReplayResult replay_from_log(std::istream& move_log, int game_id, std::ostream& out) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(move_log, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw UsageError(fmt::format("move log line {} is not valid JSON: {}", lineno, e.what()));
    }
    const auto id = j.find("game_id");
    if (id != j.end() && id->is_number_integer() && id->get<int>() == game_id) {
      return replay_game(j, out);
    }
  }
  throw UsageError(fmt::format("game {} not found in move log", game_id));
}

void configure_logging() {
  auto logger = spdlog::get("pursuit");
  if (!logger) logger = spdlog::stderr_logger_st("pursuit");
  spdlog::set_default_logger(logger);

  const char* env = std::getenv("PURSUIT_LOG_LEVEL");
  const std::string level = env ? env : "info";
  if (level == "error") spdlog::set_level(spdlog::level::err);
  else if (level == "debug") spdlog::set_level(spdlog::level::debug);
  else spdlog::set_level(spdlog::level::info);
}

}  // namespace pursuit
