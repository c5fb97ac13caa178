#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace tripurpose {

struct Individual {
  std::vector<double> genes;
  std::vector<double> objectives;  // minimization convention
  int rank = 0;
  double crowding = 0.0;
};

struct GeneBounds {
  double lo = 0.0;
  double hi = 1.0;
};

struct Nsga2Settings {
  std::size_t population = 40;
  std::size_t generations = 30;
  double crossover_prob = 0.9;
  double sbx_eta = 15.0;
  double mutation_eta = 20.0;  // per-gene mutation prob is 1/genes
  std::uint64_t seed = 1;
};

// True when a is at least as good on every objective and better on one.
bool dominates(std::span<const double> a, std::span<const double> b);

// Fast non-dominated sort plus within-front crowding distances. Sets rank and
// crowding on each individual and returns the fronts as index lists, best
// first. Any NaN objective is an error.
std::vector<std::vector<std::size_t>> rank_population(std::vector<Individual>& population);

using EvalFn = std::function<std::vector<double>(std::span<const double> genes)>;

// Generational NSGA-II with binary tournament on (rank, crowding),
// simulated-binary crossover, polynomial mutation, and (mu+lambda) elitist
// survival. The incumbent genome is seeded into the initial population
// (clamped to bounds), the rest start uniformly random. Deterministic for a
// fixed seed; a zero generation budget returns the evaluated initial
// population's first front.
std::vector<Individual> evolve(std::span<const GeneBounds> bounds,
                               std::span<const double> incumbent, const EvalFn& eval,
                               const Nsga2Settings& settings);

}  // namespace tripurpose
