#include "pursuit/ga.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pursuit {

void GAConfig::validate() const {
  if (population_size < elite_count + 2) {
    throw std::invalid_argument("population_size must be >= elite_count + 2");
  }
  if (generations < 0) throw std::invalid_argument("generations must be >= 0");
  if (elite_count < 0) throw std::invalid_argument("elite_count must be >= 0");
  if (tournament_size < 1) throw std::invalid_argument("tournament_size must be >= 1");
  if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0)) {
    throw std::invalid_argument("crossover_prob must be in [0, 1]");
  }
  if (!(mutation_prob_per_gene >= 0.0 && mutation_prob_per_gene <= 1.0)) {
    throw std::invalid_argument("mutation_prob_per_gene must be in [0, 1]");
  }
  if (!(penalty_factor > 1.0)) throw std::invalid_argument("penalty_factor must be > 1");
  if (!(win_factor > 0.0 && win_factor < 1.0)) {
    throw std::invalid_argument("win_factor must be in (0, 1)");
  }
}

double distance_sum(const GameState& state) {
  double s = 0.0;
  for (const GridPos& c : state.captors) {
    const double dx = c.x - state.fugitive.x;
    const double dy = c.y - state.fugitive.y;
    s += std::sqrt(dx * dx + dy * dy);
  }
  return s;
}

namespace {

struct Scored {
  double score;
  bool legal;
};

Scored score_chromosome(const GameState& state, const Chromosome& c,
                        const BoardConfig& cfg, const GAConfig& ga) {
  if (is_joint_move_legal(state, c, cfg) != Legality::Legal) {
    return {distance_sum(state) * ga.penalty_factor, false};
  }
  GameState next = state;
  for (std::size_t i = 0; i < next.captors.size(); ++i) {
    next.captors[i] = displace(next.captors[i], c.dirs[i]);
  }
  const double s = distance_sum(next);
  if (is_captured(next, cfg)) return {s * ga.win_factor, true};
  return {s, true};
}

struct Individual {
  Chromosome genes;
  Scored eval;
};

MoveDir random_dir(Rng& rng) { return dir_from_index(static_cast<int>(uniform_index(rng, kNumDirs))); }

bool unit_draw(Rng& rng, double p) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p;
}

std::size_t tournament(const std::vector<Individual>& pop, int k, Rng& rng) {
  std::size_t winner = uniform_index(rng, pop.size());
  for (int i = 1; i < k; ++i) {
    const std::size_t challenger = uniform_index(rng, pop.size());
    if (pop[challenger].eval.score < pop[winner].eval.score) winner = challenger;
  }
  return winner;
}

}  // namespace

double evaluate_chromosome(const GameState& state, const Chromosome& c,
                           const BoardConfig& cfg, const GAConfig& ga) {
  return score_chromosome(state, c, cfg, ga).score;
}

SolveResult exhaustive_solve(const GameState& state, const BoardConfig& cfg,
                             const GAConfig& ga) {
  const std::size_t m = state.captors.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < m; ++i) total *= kNumDirs;

  Chromosome c{std::vector<MoveDir>(m, MoveDir::Up)};
  SolveResult result;
  bool found = false;
  // Gene 0 is the most significant digit, so enumeration order is
  // lexicographic and the first minimum wins ties.
  for (std::size_t code = 0; code < total; ++code) {
    std::size_t rest = code;
    for (std::size_t i = m; i-- > 0;) {
      c.dirs[i] = dir_from_index(static_cast<int>(rest % kNumDirs));
      rest /= kNumDirs;
    }
    const Scored s = score_chromosome(state, c, cfg, ga);
    if (s.legal && (!found || s.score < result.score)) {
      result.best = c;
      result.score = s.score;
      found = true;
    }
  }
  if (!found) throw NoLegalMove("no legal joint move exists");
  return result;
}

SolveResult ga_solve(const GameState& state, const BoardConfig& cfg,
                     const GAConfig& ga, Rng& rng) {
  const std::size_t m = state.captors.size();
  const std::size_t pop_size = static_cast<std::size_t>(ga.population_size);

  SolveResult result;
  bool found = false;
  auto consider = [&](const Individual& ind) {
    if (ind.eval.legal && (!found || ind.eval.score < result.score)) {
      result.best = ind.genes;
      result.score = ind.eval.score;
      found = true;
    }
  };
  auto record_generation = [&] {
    result.best_per_generation.push_back(
        found ? result.score : std::numeric_limits<double>::infinity());
  };

  std::vector<Individual> pop(pop_size);
  for (Individual& ind : pop) {
    ind.genes.dirs.resize(m);
    for (MoveDir& g : ind.genes.dirs) g = random_dir(rng);
    ind.eval = score_chromosome(state, ind.genes, cfg, ga);
    consider(ind);
  }
  record_generation();

  std::vector<std::size_t> order(pop_size);
  std::vector<Individual> next;
  next.reserve(pop_size);
  for (int gen = 0; gen < ga.generations; ++gen) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (pop[a].eval.score != pop[b].eval.score) return pop[a].eval.score < pop[b].eval.score;
      return pop[a].genes.dirs < pop[b].genes.dirs;
    });

    next.clear();
    for (int e = 0; e < ga.elite_count; ++e) next.push_back(pop[order[e]]);

    while (next.size() < pop_size) {
      const Individual& p1 = pop[tournament(pop, ga.tournament_size, rng)];
      const Individual& p2 = pop[tournament(pop, ga.tournament_size, rng)];
      Chromosome c1 = p1.genes;
      Chromosome c2 = p2.genes;
      if (unit_draw(rng, ga.crossover_prob)) {
        for (std::size_t i = 0; i < m; ++i) {
          if (unit_draw(rng, 0.5)) std::swap(c1.dirs[i], c2.dirs[i]);
        }
      }
      for (Chromosome* child : {&c1, &c2}) {
        for (MoveDir& g : child->dirs) {
          if (unit_draw(rng, ga.mutation_prob_per_gene)) g = random_dir(rng);
        }
      }
      for (Chromosome* child : {&c1, &c2}) {
        if (next.size() == pop_size) break;
        Individual ind{std::move(*child), {}};
        ind.eval = score_chromosome(state, ind.genes, cfg, ga);
        consider(ind);
        next.push_back(std::move(ind));
      }
    }
    pop.swap(next);
    record_generation();
  }

  if (!found) {
    SolveResult fallback = exhaustive_solve(state, cfg, ga);
    fallback.best_per_generation = std::move(result.best_per_generation);
    fallback.used_exhaustive_fallback = true;
    return fallback;
  }
  return result;
}

}  // namespace pursuit
