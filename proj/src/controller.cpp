#include "pursuit/controller.hpp"

#include <algorithm>
#include <stdexcept>

namespace pursuit {

AgentProposal proposal_from_outputs(const Outputs& outputs, ThresholdMode mode) {
  AgentProposal p;
  if (mode == ThresholdMode::Argmax) {
    const auto best = std::max_element(outputs.begin(), outputs.end());
    p.kind = AgentProposal::Kind::Single;
    p.dirs = {dir_from_index(static_cast<int>(best - outputs.begin()))};
    return p;
  }
  for (int k = 0; k < kNumOutputs; ++k) {
    if (outputs[k] > 0.5) p.dirs.push_back(dir_from_index(k));
  }
  if (p.dirs.empty()) {
    p.kind = AgentProposal::Kind::None;
  } else if (p.dirs.size() == 1) {
    p.kind = AgentProposal::Kind::Single;
  } else {
    p.kind = AgentProposal::Kind::Ambiguous;
  }
  return p;
}

AgentProposal propose(const MLPParams& params, const FeatureVector& features,
                      ThresholdMode mode) {
  return proposal_from_outputs(forward(params, features), mode);
}

MoveDir TrainingExample::target_dir() const {
  return dir_from_index(
      static_cast<int>(std::max_element(target.begin(), target.end()) - target.begin()));
}

void TrainingStore::add(TrainingExample example) {
  per_captor_.at(example.captor_index).push_back(std::move(example));
}

std::size_t TrainingStore::total_size() const {
  std::size_t n = 0;
  for (const auto& v : per_captor_) n += v.size();
  return n;
}

TrainingSet TrainingStore::training_set(int captor) const {
  TrainingSet set;
  const auto& ex = per_captor_.at(captor);
  set.features.reserve(ex.size());
  set.targets.reserve(ex.size());
  for (const TrainingExample& e : ex) set.add(e.features, e.target);
  return set;
}

std::string_view to_string(MoveSource s) {
  return s == MoveSource::Swarm ? "Swarm" : "Global";
}

std::string_view to_string(GameOutcome o) {
  switch (o) {
    case GameOutcome::Captured: return "Captured";
    case GameOutcome::Timeout: return "Timeout";
    case GameOutcome::Stalemate: return "Stalemate";
  }
  return "?";
}

std::optional<MoveSource> parse_source(std::string_view s) {
  if (s == "Swarm") return MoveSource::Swarm;
  if (s == "Global") return MoveSource::Global;
  return std::nullopt;
}

std::optional<GameOutcome> parse_outcome(std::string_view s) {
  for (GameOutcome o : {GameOutcome::Captured, GameOutcome::Timeout, GameOutcome::Stalemate}) {
    if (to_string(o) == s) return o;
  }
  return std::nullopt;
}

void ControllerConfig::validate() const {
  board.validate();
  ga.validate();
  if (max_turns < 1) throw std::invalid_argument("max_turns must be >= 1");
  if (!(training.learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
  if (!(training.momentum >= 0.0 && training.momentum < 1.0)) {
    throw std::invalid_argument("momentum must be in [0, 1)");
  }
  if (training.iterations < 0) throw std::invalid_argument("iterations must be >= 0");
}

CaptorTurn captor_turn(const GameState& state, std::span<const MLPParams> agents,
                       const ControllerConfig& cfg, Rng& rng, TrainingStore& store,
                       int game_id) {
  const int m = static_cast<int>(state.captors.size());
  if (static_cast<int>(agents.size()) != m) {
    throw std::invalid_argument("one agent network per captor is required");
  }

  std::vector<FeatureVector> features(m);
  for (int i = 0; i < m; ++i) features[i] = encode_state(state, i, cfg.board);

  if (cfg.swarm_enabled) {
    JointMove proposed;
    proposed.dirs.reserve(m);
    for (int i = 0; i < m; ++i) {
      AgentProposal p = propose(agents[i], features[i], cfg.threshold);
      if (!p.is_single()) break;
      proposed.dirs.push_back(p.dirs.front());
    }
    if (static_cast<int>(proposed.dirs.size()) == m &&
        is_joint_move_legal(state, proposed, cfg.board) == Legality::Legal) {
      return {std::move(proposed), MoveSource::Swarm};
    }
  }

  SolveResult solved = ga_solve(state, cfg.board, cfg.ga, rng);
  for (int i = 0; i < m; ++i) {
    store.add(TrainingExample{std::move(features[i]), target_vector(solved.best.dirs[i]),
                              game_id, state.turn + 1, i});
  }
  return {std::move(solved.best), MoveSource::Global};
}

GameState initial_placement(const BoardConfig& cfg, Rng& rng) {
  cfg.validate();
  const int cells = cfg.width * cfg.height;
  auto cell = [&](int idx) { return GridPos{idx % cfg.width, idx / cfg.width}; };

  for (;;) {
    // Partial Fisher-Yates over cell indices.
    std::vector<int> idx(cells);
    for (int i = 0; i < cells; ++i) idx[i] = i;
    GameState s;
    for (int i = 0; i < cfg.num_captors; ++i) {
      const std::size_t j = i + uniform_index(rng, cells - i);
      std::swap(idx[i], idx[j]);
      s.captors.push_back(cell(idx[i]));
    }
    const int free_cells = cells - cfg.num_captors;

    bool have_candidate = false;
    double best_sum = -1.0;
    GridPos best{};
    for (int c = 0; c < 10; ++c) {
      s.fugitive = cell(idx[cfg.num_captors + uniform_index(rng, free_cells)]);
      if (is_captured(s, cfg)) continue;
      const double sum = distance_sum(s);
      if (sum > best_sum) {
        best_sum = sum;
        best = s.fugitive;
        have_candidate = true;
      }
    }
    if (have_candidate) {
      s.fugitive = best;
      return s;
    }
  }
}

GameRecord play_game(const GameState& initial, std::span<const MLPParams> agents,
                     const ControllerConfig& cfg, Rng& rng, TrainingStore& store,
                     int game_id) {
  validate_state(initial, cfg.board);
  if (is_captured(initial, cfg.board)) {
    throw std::invalid_argument("game cannot start with the fugitive captured");
  }

  GameRecord rec;
  rec.game_id = game_id;
  rec.initial = initial;
  rec.initial.turn = 0;

  GameState state = rec.initial;
  bool finished = false;
  while (!finished) {
    if (state.turn >= cfg.max_turns) {
      rec.outcome = GameOutcome::Timeout;
      rec.turns = cfg.max_turns;
      break;
    }
    const int round = state.turn + 1;

    CaptorTurn ct;
    try {
      ct = captor_turn(state, agents, cfg, rng, store, game_id);
    } catch (const NoLegalMove&) {
      rec.outcome = GameOutcome::Stalemate;
      rec.turns = round;
      break;
    }
    state = apply_joint_move(state, ct.move, cfg.board);
    rec.sources.push_back(ct.source);
    TurnLog& log = rec.moves.emplace_back(TurnLog{round, ct.source, ct.move, std::nullopt});

    if (is_captured(state, cfg.board)) {
      rec.outcome = GameOutcome::Captured;
      rec.turns = round;
      break;
    }

    const MoveDir fm = random_fugitive_move(state, cfg.board, rng);
    state = apply_fugitive_move(state, fm, cfg.board);
    log.fugitive = fm;
    state.turn = round;

    if (is_captured(state, cfg.board)) {
      rec.outcome = GameOutcome::Captured;
      rec.turns = round;
      finished = true;
    }
  }

  const auto swarm = std::count(rec.sources.begin(), rec.sources.end(), MoveSource::Swarm);
  rec.swarm_fraction = static_cast<double>(swarm) / rec.turns;
  rec.final_state = state;
  return rec;
}

GameRecord play_game(std::span<const MLPParams> agents, const ControllerConfig& cfg,
                     Rng& rng, TrainingStore& store, int game_id) {
  const GameState initial = initial_placement(cfg.board, rng);
  return play_game(initial, agents, cfg, rng, store, game_id);
}

MLPParams untrained_agent(const BoardConfig& cfg) {
  return zero_mlp(feature_dim(cfg.num_captors), hidden_units_for(0));
}

Rng game_rng(std::uint64_t seed, int game_id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(game_id), 0u};
  return Rng(seq);
}

Rng training_rng(std::uint64_t seed, int game_id, int captor) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(game_id), 1u,
                    static_cast<std::uint32_t>(captor)};
  return Rng(seq);
}

SessionResult run_session(const ControllerConfig& cfg, int n_games, std::uint64_t seed,
                          std::span<SessionSink* const> sinks) {
  cfg.validate();
  if (n_games < 1) throw std::invalid_argument("n_games must be >= 1");

  const int m = cfg.board.num_captors;
  const int input_dim = feature_dim(m);
  SessionResult result;
  result.agents.assign(m, untrained_agent(cfg.board));
  TrainingStore store(m);

  for (int game_id = 1; game_id <= n_games; ++game_id) {
    std::vector<std::size_t> before(m);
    for (int i = 0; i < m; ++i) before[i] = store.size(i);

    Rng rng = game_rng(seed, game_id);
    GameRecord rec = play_game(result.agents, cfg, rng, store, game_id);

    for (int i = 0; i < m; ++i) {
      if (store.size(i) == 0) continue;
      Rng trng = training_rng(seed, game_id, i);
      result.agents[i] = train(store.training_set(i), input_dim, trng, cfg.training).params;
    }

    std::vector<TrainingExample> fresh;
    for (int i = 0; i < m; ++i) {
      const auto& ex = store.examples(i);
      fresh.insert(fresh.end(), ex.begin() + static_cast<std::ptrdiff_t>(before[i]), ex.end());
    }
    for (SessionSink* sink : sinks) sink->on_game(rec, fresh, store, result.agents);
    result.records.push_back(std::move(rec));
  }
  return result;
}

}  // namespace pursuit
