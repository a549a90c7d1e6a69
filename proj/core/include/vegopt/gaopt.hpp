#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vegopt/demand.hpp"
#include "vegopt/intervals.hpp"
#include "vegopt/random.hpp"

namespace vegopt::gaopt {

inline constexpr double kEpsilon = 1e-6;

struct ProductContext {
  std::string product_id;
  double unit_cost = 0.0;  // mean of the 7-day cost forecast
  demand::DemandCurve demand;
  intervals::SalesInterval interval;  // weekly total
};

struct ProblemOptions {
  bool constrain_demand = true;      // weekly demand(price) inside the interval
  bool constrain_allocation = true;  // allocation inside the interval
  // Upper price bound for products whose demand does not fall with price.
  double flat_price_cap_multiple = 3.0;
};

struct Bounds {
  double lo = kEpsilon;
  double hi = kEpsilon;
  double width() const { return hi - lo; }
  double clamp(double x) const;
};

/// Genes interleave (price, allocation) per product.
struct Chromosome {
  std::vector<double> genes;

  std::size_t products() const { return genes.size() / 2; }
  double price(std::size_t i) const { return genes[2 * i]; }
  double allocation(std::size_t i) const { return genes[2 * i + 1]; }
  double& price(std::size_t i) { return genes[2 * i]; }
  double& allocation(std::size_t i) { return genes[2 * i + 1]; }

  friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

/// Products plus the feasible boxes derived from their demand curves and
/// sales intervals. Weekly demand is 7× the fitted daily curve.
class Problem {
 public:
  // Throws InputError for an empty context or a non-positive unit cost.
  explicit Problem(std::vector<ProductContext> products, ProblemOptions options = {});

  std::size_t size() const { return products_.size(); }
  const ProductContext& product(std::size_t i) const { return products_[i]; }
  const std::vector<ProductContext>& products() const { return products_; }
  const ProblemOptions& options() const { return options_; }

  const Bounds& price_bounds(std::size_t i) const { return price_bounds_[i]; }
  const Bounds& allocation_bounds(std::size_t i) const { return allocation_bounds_[i]; }
  // Box of gene g (even = price, odd = allocation).
  const Bounds& gene_bounds(std::size_t g) const;

  // Weekly demand at a price. Price-insensitive products return their pinned volume.
  double weekly_demand(std::size_t i, double price) const;
  bool price_sensitive(std::size_t i) const { return products_[i].demand.slope < 0.0; }

  // True when at least one product admits positive sales.
  bool feasible() const;

 private:
  std::vector<ProductContext> products_;
  ProblemOptions options_;
  std::vector<Bounds> price_bounds_;
  std::vector<Bounds> allocation_bounds_;
  std::vector<double> pinned_volume_;
};

// True when every gene is inside its box (with a small tolerance).
bool satisfies_constraints(const Chromosome& c, const Problem& problem);

// Weekly profit Σ price·min(alloc, demand) − cost·alloc. Throws InvariantError
// when c has not been repaired.
double fitness(const Chromosome& c, const Problem& problem);

// Projects every gene into its feasible box. Idempotent.
Chromosome repair(Chromosome c, const Problem& problem);

struct MutationConfig {
  double probability = 0.1;     // per gene
  double sigma_fraction = 0.1;  // σ as a fraction of the gene's box width
  double decay = 0.995;         // σ multiplier per generation
};

// Adds N(0, σ_g²) noise to each gene with the configured probability, where
// σ_g = sigma_fraction · width_g · decay^generation.
Chromosome gaussian_mutate(Chromosome c, const MutationConfig& cfg, const Problem& problem, Rng& rng,
                           int generation = 0);

// Blend crossover with explicit per-gene weights u: children are
// u·a + (1-u)·b and (1-u)·a + u·b. Throws InputError on length mismatch.
std::pair<Chromosome, Chromosome> blend(const Chromosome& a, const Chromosome& b,
                                        std::span<const double> u);
// Blend crossover with u ~ Uniform[-0.5, 1.5] per gene.
std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, Rng& rng);

// Uniform sample inside the feasible boxes.
Chromosome random_individual(const Problem& problem, Rng& rng);

struct GenerationStats {
  int generation = 0;
  double max_fitness = 0.0;
  double min_fitness = 0.0;
  double avg_fitness = 0.0;
};

struct EvolveConfig {
  int population = 200;
  int generations = 500;
  int tournament = 3;
  int elitism = 1;
  double crossover_rate = 0.9;
  MutationConfig mutation{};
  std::uint64_t seed = 0;
};

struct EvolveResult {
  Chromosome best;
  double best_fitness = 0.0;
  std::vector<GenerationStats> trace;  // one entry per generation
  long evaluations = 0;
};

// Throws InputError("no feasible plan") when no product can sell anything.
EvolveResult evolve(const Problem& problem, const EvolveConfig& cfg);

struct SearchResult {
  Chromosome best;
  double best_fitness = 0.0;
  long evaluations = 0;
};

// Uniform random sampling of repaired individuals with the given budget.
SearchResult random_search(const Problem& problem, long budget, std::uint64_t seed);

struct PlanRow {
  std::string product_id;
  double price = 0.0;
  double allocation = 0.0;
  double expected_sales = 0.0;
  double expected_profit = 0.0;
};

// Decodes a chromosome into per-product rows.
std::vector<PlanRow> decode_plan(const Chromosome& c, const Problem& problem);

}  // namespace vegopt::gaopt
