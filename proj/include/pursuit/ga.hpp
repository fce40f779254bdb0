#pragma once

#include <stdexcept>
#include <vector>

#include "pursuit/game.hpp"

namespace pursuit {

// A chromosome shares JointMove's layout: one gene per captor.
using Chromosome = JointMove;

class NoLegalMove : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GAConfig {
  int population_size = 50;
  int generations = 30;
  double crossover_prob = 0.8;
  double mutation_prob_per_gene = 0.05;
  int tournament_size = 3;
  int elite_count = 1;
  // Illegal chromosomes score S * penalty_factor.
  double penalty_factor = 1000.0;
  // Winning chromosomes score S * win_factor.
  double win_factor = 0.001;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// Sum of Euclidean captor-to-fugitive distances.
double distance_sum(const GameState& state);

// Lower is better. Illegal chromosomes are scored on the pre-move state.
double evaluate_chromosome(const GameState& state, const Chromosome& c,
                           const BoardConfig& cfg, const GAConfig& ga);

struct SolveResult {
  Chromosome best;
  double score = 0.0;
  // Best-ever score after initialisation and after each generation. Empty for
  // the exhaustive solver.
  std::vector<double> best_per_generation;
  bool used_exhaustive_fallback = false;
};

// Enumerates all 5^num_captors chromosomes; ties keep the lexicographically
// first (gene 0 most significant). Throws NoLegalMove.
SolveResult exhaustive_solve(const GameState& state, const BoardConfig& cfg,
                             const GAConfig& ga);

// Tournament selection, uniform crossover, per-gene mutation, elitism.
// Returns the best legal chromosome ever evaluated, or the exhaustive optimum
// if no legal chromosome turned up. Throws NoLegalMove.
SolveResult ga_solve(const GameState& state, const BoardConfig& cfg,
                     const GAConfig& ga, Rng& rng);

}  // namespace pursuit
