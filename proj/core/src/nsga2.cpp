#include "tripurpose/nsga2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tripurpose/error.hpp"
#include "tripurpose/rng.hpp"

namespace tripurpose {

bool dominates(std::span<const double> a, std::span<const double> b) {
  bool strictly_better = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strictly_better = true;
  }
  return strictly_better;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void crowding_distances(std::vector<Individual>& population,
                        const std::vector<std::size_t>& front) {
  for (std::size_t i : front) population[i].crowding = 0.0;
  if (front.empty()) return;
  std::size_t n_obj = population[front[0]].objectives.size();
  std::vector<std::size_t> order(front);
  for (std::size_t m = 0; m < n_obj; ++m) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      double va = population[a].objectives[m];
      double vb = population[b].objectives[m];
      return va != vb ? va < vb : a < b;
    });
    population[order.front()].crowding = kInf;
    population[order.back()].crowding = kInf;
    double lo = population[order.front()].objectives[m];
    double hi = population[order.back()].objectives[m];
    if (!(hi > lo)) continue;  // degenerate objective adds nothing
    for (std::size_t k = 1; k + 1 < order.size(); ++k) {
      double below = population[order[k - 1]].objectives[m];
      double above = population[order[k + 1]].objectives[m];
      population[order[k]].crowding += (above - below) / (hi - lo);
    }
  }
}

}  // namespace

std::vector<std::vector<std::size_t>> rank_population(std::vector<Individual>& population) {
  std::size_t n = population.size();
  if (n == 0) return {};
  std::size_t n_obj = population[0].objectives.size();
  for (const auto& ind : population) {
    if (ind.objectives.size() != n_obj) {
      fail(ErrorKind::InvalidObjective, "objective vectors differ in length");
    }
    for (double v : ind.objectives) {
      if (std::isnan(v)) fail(ErrorKind::InvalidObjective, "NaN objective value");
    }
  }

  std::vector<std::vector<std::size_t>> dominated(n);
  std::vector<std::size_t> dominating_count(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (dominates(population[i].objectives, population[j].objectives)) {
        dominated[i].push_back(j);
        ++dominating_count[j];
      } else if (dominates(population[j].objectives, population[i].objectives)) {
        dominated[j].push_back(i);
        ++dominating_count[i];
      }
    }
  }

  std::vector<std::vector<std::size_t>> fronts;
  std::vector<std::size_t> current;
  for (std::size_t i = 0; i < n; ++i) {
    if (dominating_count[i] == 0) current.push_back(i);
  }
  while (!current.empty()) {
    for (std::size_t i : current) population[i].rank = static_cast<int>(fronts.size());
    std::vector<std::size_t> next;
    for (std::size_t i : current) {
      for (std::size_t j : dominated[i]) {
        if (--dominating_count[j] == 0) next.push_back(j);
      }
    }
    std::sort(next.begin(), next.end());
    fronts.push_back(std::move(current));
    current = std::move(next);
  }

  for (const auto& front : fronts) crowding_distances(population, front);
  return fronts;
}

namespace {

// Tournament order: lower rank, then larger crowding, then lower index.
bool tournament_better(const std::vector<Individual>& pop, std::size_t a, std::size_t b) {
  if (pop[a].rank != pop[b].rank) return pop[a].rank < pop[b].rank;
  if (pop[a].crowding != pop[b].crowding) return pop[a].crowding > pop[b].crowding;
  return a < b;
}

std::vector<double> sbx_child_pair(std::span<const double> p1, std::span<const double> p2,
                                   std::span<const GeneBounds> bounds, double eta, Rng& rng,
                                   std::vector<double>& sibling) {
  std::size_t n = p1.size();
  std::vector<double> c1(p1.begin(), p1.end());
  sibling.assign(p2.begin(), p2.end());
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.uniform01() > 0.5) continue;
    if (std::abs(p1[i] - p2[i]) < 1e-14) continue;
    double u = rng.uniform01();
    double beta = u <= 0.5 ? std::pow(2.0 * u, 1.0 / (eta + 1.0))
                           : std::pow(1.0 / (2.0 * (1.0 - u)), 1.0 / (eta + 1.0));
    double a = 0.5 * ((1.0 + beta) * p1[i] + (1.0 - beta) * p2[i]);
    double b = 0.5 * ((1.0 - beta) * p1[i] + (1.0 + beta) * p2[i]);
    c1[i] = std::clamp(a, bounds[i].lo, bounds[i].hi);
    sibling[i] = std::clamp(b, bounds[i].lo, bounds[i].hi);
  }
  return c1;
}

void polynomial_mutation(std::vector<double>& genes, std::span<const GeneBounds> bounds,
                         double eta, Rng& rng) {
  double prob = 1.0 / static_cast<double>(genes.size());
  for (std::size_t i = 0; i < genes.size(); ++i) {
    if (rng.uniform01() >= prob) continue;
    double span = bounds[i].hi - bounds[i].lo;
    if (span <= 0.0) continue;
    double u = rng.uniform01();
    double delta = u < 0.5 ? std::pow(2.0 * u, 1.0 / (eta + 1.0)) - 1.0
                           : 1.0 - std::pow(2.0 * (1.0 - u), 1.0 / (eta + 1.0));
    genes[i] = std::clamp(genes[i] + delta * span, bounds[i].lo, bounds[i].hi);
  }
}

std::vector<double> checked_eval(const EvalFn& eval, std::span<const double> genes,
                                 std::size_t expected_objectives) {
  std::vector<double> obj = eval(genes);
  if (expected_objectives != 0 && obj.size() != expected_objectives) {
    fail(ErrorKind::InvalidObjective, "evaluation returned inconsistent objective count");
  }
  for (double v : obj) {
    if (std::isnan(v)) fail(ErrorKind::InvalidObjective, "evaluation returned NaN objective");
  }
  return obj;
}

}  // namespace

std::vector<Individual> evolve(std::span<const GeneBounds> bounds,
                               std::span<const double> incumbent, const EvalFn& eval,
                               const Nsga2Settings& settings) {
  if (bounds.empty()) fail(ErrorKind::Config, "no genes to optimize");
  if (incumbent.size() != bounds.size()) {
    fail(ErrorKind::Config, "incumbent genome does not match gene bounds");
  }
  if (settings.population < 2) fail(ErrorKind::Config, "population must be at least 2");
  for (const auto& b : bounds) {
    if (!(b.lo <= b.hi)) fail(ErrorKind::Config, "gene bounds inverted");
  }

  Rng rng = Rng::stream(settings.seed, 0x6e736761);
  std::size_t n_genes = bounds.size();

  std::vector<Individual> pop(settings.population);
  pop[0].genes.assign(incumbent.begin(), incumbent.end());
  for (std::size_t i = 0; i < n_genes; ++i) {
    pop[0].genes[i] = std::clamp(pop[0].genes[i], bounds[i].lo, bounds[i].hi);
  }
  for (std::size_t p = 1; p < pop.size(); ++p) {
    pop[p].genes.resize(n_genes);
    for (std::size_t i = 0; i < n_genes; ++i) {
      pop[p].genes[i] = rng.uniform(bounds[i].lo, bounds[i].hi);
    }
  }

  pop[0].objectives = checked_eval(eval, pop[0].genes, 0);
  std::size_t n_obj = pop[0].objectives.size();
  for (std::size_t p = 1; p < pop.size(); ++p) {
    pop[p].objectives = checked_eval(eval, pop[p].genes, n_obj);
  }
  rank_population(pop);

  for (std::size_t gen = 0; gen < settings.generations; ++gen) {
    // Offspring via binary tournaments, SBX, and polynomial mutation.
    std::vector<Individual> offspring;
    offspring.reserve(settings.population);
    while (offspring.size() < settings.population) {
      auto pick = [&] {
        std::size_t a = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(pop.size()) - 1));
        std::size_t b = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(pop.size()) - 1));
        return tournament_better(pop, a, b) ? a : b;
      };
      std::size_t pa = pick();
      std::size_t pb = pick();
      std::vector<double> c1;
      std::vector<double> c2;
      if (rng.uniform01() <= settings.crossover_prob) {
        c1 = sbx_child_pair(pop[pa].genes, pop[pb].genes, bounds, settings.sbx_eta, rng, c2);
      } else {
        c1 = pop[pa].genes;
        c2 = pop[pb].genes;
      }
      polynomial_mutation(c1, bounds, settings.mutation_eta, rng);
      polynomial_mutation(c2, bounds, settings.mutation_eta, rng);
      offspring.push_back({std::move(c1), {}, 0, 0.0});
      if (offspring.size() < settings.population) {
        offspring.push_back({std::move(c2), {}, 0, 0.0});
      }
    }
    for (auto& child : offspring) {
      child.objectives = checked_eval(eval, child.genes, n_obj);
    }

    // (mu+lambda) survival: refill from the best fronts, breaking the last
    // front by crowding distance.
    std::vector<Individual> combined;
    combined.reserve(pop.size() + offspring.size());
    std::move(pop.begin(), pop.end(), std::back_inserter(combined));
    std::move(offspring.begin(), offspring.end(), std::back_inserter(combined));
    auto fronts = rank_population(combined);

    std::vector<Individual> next;
    next.reserve(settings.population);
    for (const auto& front : fronts) {
      if (next.size() == settings.population) break;
      if (next.size() + front.size() <= settings.population) {
        for (std::size_t i : front) next.push_back(std::move(combined[i]));
        continue;
      }
      std::vector<std::size_t> order(front);
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (combined[a].crowding != combined[b].crowding) {
          return combined[a].crowding > combined[b].crowding;
        }
        return a < b;
      });
      for (std::size_t i : order) {
        if (next.size() == settings.population) break;
        next.push_back(std::move(combined[i]));
      }
    }
    pop = std::move(next);
    rank_population(pop);
  }

  std::vector<Individual> front;
  for (const auto& ind : pop) {
    if (ind.rank == 0) front.push_back(ind);
  }
  return front;
}

}  // namespace tripurpose
