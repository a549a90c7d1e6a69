#include "vegopt/gaopt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vegopt/error.hpp"

namespace vegopt::gaopt {

double Bounds::clamp(double x) const {
  if (std::isnan(x)) return lo;
  return std::clamp(x, lo, hi);
}

Problem::Problem(std::vector<ProductContext> products, ProblemOptions options)
    : products_(std::move(products)), options_(options) {
  if (products_.empty()) throw InputError("optimization needs at least one product");
  for (const auto& p : products_) {
    if (!(p.unit_cost > 0.0)) throw InputError("unit cost must be > 0 for product " + p.product_id);
    const double lower = std::max(0.0, p.interval.lower);
    const double upper = p.interval.upper;
    const double a = p.demand.intercept;
    const double b = p.demand.slope;

    Bounds price;
    double pinned = 0.0;
    double max_demand = 0.0;
    if (b < 0.0) {
      const double zero_demand_price = a / -b;
      double lo = kEpsilon;
      double hi = zero_demand_price;
      if (options_.constrain_demand) {
        // 7(a + b·p) ∈ [lower, upper], demand decreasing in price.
        lo = (7.0 * a - upper) / (-7.0 * b);
        if (lower > 0.0) hi = (7.0 * a - lower) / (-7.0 * b);
      }
      price.lo = std::max(kEpsilon, lo);
      price.hi = std::max(price.lo, hi);
      max_demand = 7.0 * std::max(0.0, a + b * price.lo);
    } else {
      pinned = 7.0 * std::max(0.0, a + b * p.unit_cost);
      if (options_.constrain_demand) pinned = std::clamp(pinned, lower, std::max(lower, upper));
      price.lo = kEpsilon;
      price.hi = std::max(kEpsilon, options_.flat_price_cap_multiple * p.unit_cost);
      max_demand = pinned;
    }

    Bounds alloc;
    if (options_.constrain_allocation) {
      alloc.lo = std::max(kEpsilon, lower);
      alloc.hi = std::max(alloc.lo, upper);
    } else {
      alloc.lo = kEpsilon;
      alloc.hi = std::max(kEpsilon, max_demand);
    }
    price_bounds_.push_back(price);
    allocation_bounds_.push_back(alloc);
    pinned_volume_.push_back(pinned);
  }
}

const Bounds& Problem::gene_bounds(std::size_t g) const {
  return g % 2 == 0 ? price_bounds_[g / 2] : allocation_bounds_[g / 2];
}

double Problem::weekly_demand(std::size_t i, double price) const {
  const auto& d = products_[i].demand;
  if (!price_sensitive(i)) return pinned_volume_[i];
  return 7.0 * std::max(0.0, d.intercept + d.slope * price);
}

bool Problem::feasible() const {
  return std::any_of(products_.begin(), products_.end(),
                     [](const ProductContext& p) { return p.interval.upper > 0.0; });
}

bool satisfies_constraints(const Chromosome& c, const Problem& problem) {
  if (c.genes.size() != 2 * problem.size()) return false;
  for (std::size_t g = 0; g < c.genes.size(); ++g) {
    const auto& box = problem.gene_bounds(g);
    const double x = c.genes[g];
    const double tol = 1e-9 * (1.0 + std::abs(box.hi));
    if (!(x > 0.0) || x < box.lo - tol || x > box.hi + tol) return false;
  }
  return true;
}

double fitness(const Chromosome& c, const Problem& problem) {
  if (!satisfies_constraints(c, problem)) throw InvariantError("fitness called on an unrepaired chromosome");
  double profit = 0.0;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    const double price = c.price(i);
    const double alloc = c.allocation(i);
    const double sold = std::min(alloc, problem.weekly_demand(i, price));
    profit += price * sold - problem.product(i).unit_cost * alloc;
  }
  return profit;
}

Chromosome repair(Chromosome c, const Problem& problem) {
  c.genes.resize(2 * problem.size(), kEpsilon);
  for (std::size_t g = 0; g < c.genes.size(); ++g) c.genes[g] = problem.gene_bounds(g).clamp(c.genes[g]);
  return c;
}

Chromosome gaussian_mutate(Chromosome c, const MutationConfig& cfg, const Problem& problem, Rng& rng,
                           int generation) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double shrink = std::pow(cfg.decay, static_cast<double>(generation));
  for (std::size_t g = 0; g < c.genes.size(); ++g) {
    if (!(coin(rng) < cfg.probability)) continue;
    const double sigma = cfg.sigma_fraction * problem.gene_bounds(g).width() * shrink;
    const double noise = gauss(rng);
    if (sigma > 0.0) c.genes[g] += sigma * noise;
  }
  return c;
}

std::pair<Chromosome, Chromosome> blend(const Chromosome& a, const Chromosome& b,
                                        std::span<const double> u) {
  if (a.genes.size() != b.genes.size() || u.size() != a.genes.size())
    throw InputError("crossover: chromosome lengths differ");
  Chromosome c1 = a, c2 = b;
  for (std::size_t g = 0; g < a.genes.size(); ++g) {
    if (a.genes[g] == b.genes[g]) continue;  // keep equal genes exact
    c1.genes[g] = u[g] * a.genes[g] + (1.0 - u[g]) * b.genes[g];
    c2.genes[g] = (1.0 - u[g]) * a.genes[g] + u[g] * b.genes[g];
  }
  return {std::move(c1), std::move(c2)};
}

std::pair<Chromosome, Chromosome> crossover(const Chromosome& a, const Chromosome& b, Rng& rng) {
  if (a.genes.size() != b.genes.size()) throw InputError("crossover: chromosome lengths differ");
  std::uniform_real_distribution<double> draw(-0.5, 1.5);
  std::vector<double> u(a.genes.size());
  for (auto& x : u) x = draw(rng);
  return blend(a, b, u);
}

Chromosome random_individual(const Problem& problem, Rng& rng) {
  Chromosome c;
  c.genes.resize(2 * problem.size());
  for (std::size_t g = 0; g < c.genes.size(); ++g) {
    const auto& box = problem.gene_bounds(g);
    std::uniform_real_distribution<double> dist(box.lo, box.hi);
    c.genes[g] = box.width() > 0.0 ? dist(rng) : box.lo;
  }
  return c;
}

namespace {

struct Individual {
  Chromosome chromosome;
  double fitness = 0.0;
};

GenerationStats summarize(int generation, const std::vector<Individual>& pop) {
  GenerationStats s;
  s.generation = generation;
  s.max_fitness = pop.front().fitness;
  s.min_fitness = pop.front().fitness;
  double total = 0.0;
  for (const auto& ind : pop) {
    s.max_fitness = std::max(s.max_fitness, ind.fitness);
    s.min_fitness = std::min(s.min_fitness, ind.fitness);
    total += ind.fitness;
  }
  s.avg_fitness = std::clamp(total / static_cast<double>(pop.size()), s.min_fitness, s.max_fitness);
  return s;
}

// Indices ordered by descending fitness, lower index first on ties.
std::vector<std::size_t> by_fitness(const std::vector<Individual>& pop) {
  std::vector<std::size_t> idx(pop.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return pop[a].fitness > pop[b].fitness; });
  return idx;
}

const Individual& tournament(const std::vector<Individual>& pop, int size, Rng& rng) {
  std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
  std::size_t best = pick(rng);
  for (int k = 1; k < size; ++k) {
    const auto cand = pick(rng);
    if (pop[cand].fitness > pop[best].fitness || (pop[cand].fitness == pop[best].fitness && cand < best))
      best = cand;
  }
  return pop[best];
}

void validate(const EvolveConfig& cfg) {
  if (cfg.population < 1 || cfg.generations < 0 || cfg.tournament < 1)
    throw InputError("population and tournament must be >= 1, generations >= 0");
  if (cfg.elitism < 0 || cfg.elitism > cfg.population) throw InputError("elitism must be in [0, population]");
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(cfg.crossover_rate) || !prob(cfg.mutation.probability))
    throw InputError("rates must be in [0, 1]");
  if (cfg.mutation.sigma_fraction < 0.0 || !(cfg.mutation.decay > 0.0 && cfg.mutation.decay <= 1.0))
    throw InputError("sigma_fraction must be >= 0 and decay in (0, 1]");
}

}  // namespace

EvolveResult evolve(const Problem& problem, const EvolveConfig& cfg) {
  validate(cfg);
  if (!problem.feasible()) throw InputError("no feasible plan");
  EvolveResult result;
  const auto pop_size = static_cast<std::size_t>(cfg.population);

  std::vector<Individual> pop(pop_size);
  for (std::size_t i = 0; i < pop_size; ++i) {
    auto rng = make_rng(cfg.seed, "ga.init", i);
    pop[i].chromosome = repair(random_individual(problem, rng), problem);
    pop[i].fitness = fitness(pop[i].chromosome, problem);
  }
  result.evaluations = static_cast<long>(pop_size);

  for (int gen = 1; gen <= cfg.generations; ++gen) {
    const auto gen_seed = derive_seed(cfg.seed, "ga.generation", static_cast<std::uint64_t>(gen));
    std::vector<Individual> offspring;
    offspring.reserve(pop_size + 1);
    // Each pair of children draws from its own stream so evaluation order is free.
    for (std::size_t k = 0; offspring.size() < pop_size; ++k) {
      auto rng = make_rng(gen_seed, "ga.pair", k);
      const auto& pa = tournament(pop, cfg.tournament, rng);
      const auto& pb = tournament(pop, cfg.tournament, rng);
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      auto children = coin(rng) < cfg.crossover_rate ? crossover(pa.chromosome, pb.chromosome, rng)
                                                     : std::make_pair(pa.chromosome, pb.chromosome);
      for (auto* child : {&children.first, &children.second}) {
        if (offspring.size() == pop_size) break;
        Individual ind;
        ind.chromosome = repair(gaussian_mutate(std::move(*child), cfg.mutation, problem, rng, gen), problem);
        ind.fitness = fitness(ind.chromosome, problem);
        offspring.push_back(std::move(ind));
      }
    }
    result.evaluations += static_cast<long>(offspring.size());

    // Survivors: the parent elites unconditionally, the rest from the best offspring.
    const auto parent_order = by_fitness(pop);
    const auto child_order = by_fitness(offspring);
    std::vector<Individual> next;
    next.reserve(pop_size);
    for (int e = 0; e < cfg.elitism; ++e) next.push_back(pop[parent_order[static_cast<std::size_t>(e)]]);
    for (std::size_t k = 0; next.size() < pop_size; ++k) next.push_back(offspring[child_order[k]]);
    pop = std::move(next);
    result.trace.push_back(summarize(gen, pop));
  }

  const auto best = by_fitness(pop).front();
  result.best = pop[best].chromosome;
  result.best_fitness = pop[best].fitness;
  return result;
}

SearchResult random_search(const Problem& problem, long budget, std::uint64_t seed) {
  if (budget < 1) throw InputError("random search budget must be >= 1");
  SearchResult out;
  for (long k = 0; k < budget; ++k) {
    auto rng = make_rng(seed, "random_search", static_cast<std::uint64_t>(k));
    auto c = repair(random_individual(problem, rng), problem);
    const double f = fitness(c, problem);
    if (k == 0 || f > out.best_fitness) {
      out.best = std::move(c);
      out.best_fitness = f;
    }
  }
  out.evaluations = budget;
  return out;
}

std::vector<PlanRow> decode_plan(const Chromosome& c, const Problem& problem) {
  std::vector<PlanRow> rows;
  for (std::size_t i = 0; i < problem.size(); ++i) {
    PlanRow r;
    r.product_id = problem.product(i).product_id;
    r.price = c.price(i);
    r.allocation = c.allocation(i);
    r.expected_sales = std::min(r.allocation, problem.weekly_demand(i, r.price));
    r.expected_profit = r.price * r.expected_sales - problem.product(i).unit_cost * r.allocation;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace vegopt::gaopt
