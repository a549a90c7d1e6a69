#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "vegopt/error.hpp"
#include "vegopt/gaopt.hpp"

using namespace vegopt;
using namespace vegopt::gaopt;

namespace {

// Weekly demand = weekly_a + weekly_b·price, stored as the daily curve.
ProductContext product(std::string id, double cost, double weekly_a, double weekly_b, double lower,
                       double upper) {
  ProductContext p;
  p.product_id = id;
  p.unit_cost = cost;
  p.demand = {id, weekly_a / 7.0, weekly_b / 7.0, 1.0, 30};
  p.interval = {id, 0.5 * (lower + upper), 1.0, lower, upper, 0.95};
  return p;
}

Problem analytic() { return Problem({product("A", 2.0, 10.0, -1.0, 0.0, 100.0)}); }

Problem mixed() {
  return Problem({product("A", 2.0, 10.0, -1.0, 2.0, 6.0), product("B", 1.0, 30.0, -2.0, 5.0, 20.0),
                  product("C", 3.0, 14.0, 0.0, 4.0, 9.0)});
}

}  // namespace

TEST_CASE("fitness: analytic single product against the grid oracle") {
  const auto problem = analytic();
  const auto grid = oracle::single_product_grid(2.0, 10.0, -1.0);
  CHECK(grid.price == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(grid.profit == doctest::Approx(16.0).epsilon(1e-6));
  CHECK(fitness(Chromosome{{6.0, 4.0}}, problem) == doctest::Approx(16.0).epsilon(1e-12));

  // no unsold stock: profit is margin times allocation
  CHECK(fitness(Chromosome{{5.0, 5.0}}, problem) == doctest::Approx(15.0).epsilon(1e-12));
  // unsold stock costs its wholesale price
  CHECK(fitness(Chromosome{{6.0, 10.0}}, problem) == doctest::Approx(6.0 * 4.0 - 2.0 * 10.0).epsilon(1e-12));
  // price below cost with demand covering allocation
  CHECK(fitness(Chromosome{{1.0, 3.0}}, problem) < 0.0);

  CHECK_THROWS_AS(fitness(Chromosome{{6.0, -1.0}}, problem), InvariantError);
}

TEST_CASE("repair: boundary prices, clamps and idempotence") {
  const auto problem = mixed();
  // price 1 gives weekly demand 9 > upper 6, so price rises to (10 - 6)/1 = 4
  auto c = repair(Chromosome{{1.0, -5.0, 1.0, 100.0, 50.0, 0.0}}, problem);
  CHECK(std::abs(c.price(0) - 4.0) <= 1e-12);
  CHECK(std::abs(problem.weekly_demand(0, c.price(0)) - 6.0) <= 1e-9);
  CHECK(c.allocation(0) == 2.0);
  // product B: 30 - 2p in [5, 20] -> p in [5, 12.5]
  CHECK(std::abs(c.price(1) - 5.0) <= 1e-12);
  CHECK(std::abs(problem.weekly_demand(1, c.price(1)) - 20.0) <= 1e-9);
  CHECK(c.allocation(1) == 20.0);
  // flat product: demand pinned to clamp(14, 4, 9) = 9
  CHECK(problem.weekly_demand(2, 1.0) == 9.0);
  CHECK(problem.weekly_demand(2, 7.0) == 9.0);
  CHECK(c.allocation(2) == 4.0);
  CHECK(c.price(2) <= 3.0 * 3.0);
  CHECK(satisfies_constraints(c, problem));
  CHECK(repair(c, problem) == c);

  // price so high demand drops below lower -> lowered to the boundary
  auto hi = repair(Chromosome{{9.5, 3.0, 20.0, 10.0, 2.0, 5.0}}, problem);
  CHECK(std::abs(problem.weekly_demand(0, hi.price(0)) - 2.0) <= 1e-9);
  CHECK(std::abs(problem.weekly_demand(1, hi.price(1)) - 5.0) <= 1e-9);

  const auto zero_lower = analytic();
  CHECK(repair(Chromosome{{6.0, -5.0}}, zero_lower).allocation(0) == kEpsilon);

  const Chromosome feasible{{5.0, 4.0, 8.0, 10.0, 2.0, 6.0}};
  REQUIRE(satisfies_constraints(feasible, problem));
  CHECK(repair(feasible, problem) == feasible);
}

TEST_CASE("repaired random chromosomes always satisfy the constraints") {
  const auto problem = mixed();
  Rng rng(3);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int trial = 0; trial < 5000; ++trial) {
    Chromosome c;
    for (int g = 0; g < 6; ++g) c.genes.push_back(u(rng));
    const auto r = repair(c, problem);
    CHECK(satisfies_constraints(r, problem));
    CHECK(repair(r, problem) == r);
    for (double g : r.genes) CHECK(g > 0.0);
    CHECK(std::isfinite(fitness(r, problem)));
  }
}

TEST_CASE("gaussian_mutate: degenerate settings and a law of large numbers check") {
  const auto problem = mixed();
  const Chromosome base{{3.0, 4.0, 8.0, 10.0, 2.0, 6.0}};
  Rng rng(1);
  CHECK(gaussian_mutate(base, {1.0, 0.0, 1.0}, problem, rng) == base);
  CHECK(gaussian_mutate(base, {0.0, 0.5, 1.0}, problem, rng) == base);

  const MutationConfig cfg{1.0, 0.1, 1.0};
  const int draws = 100000;
  std::vector<double> sum(6, 0.0);
  for (int k = 0; k < draws; ++k) {
    const auto m = gaussian_mutate(base, cfg, problem, rng);
    for (std::size_t g = 0; g < 6; ++g) sum[g] += m.genes[g] - base.genes[g];
  }
  for (std::size_t g = 0; g < 6; ++g) {
    const double sigma = 0.1 * problem.gene_bounds(g).width();
    CHECK(std::abs(sum[g] / draws) <= 3.0 * sigma / std::sqrt(static_cast<double>(draws)));
  }

  Rng r1(77), r2(77);
  CHECK(gaussian_mutate(base, {0.5, 0.2, 1.0}, problem, r1, 4) ==
        gaussian_mutate(base, {0.5, 0.2, 1.0}, problem, r2, 4));
}

TEST_CASE("crossover: equal parents, boundary weights and blend range") {
  const Chromosome a{{1.0, 2.0, 3.0}}, b{{4.0, -1.0, 3.5}};
  Rng rng(5);
  const auto [s1, s2] = crossover(a, a, rng);
  CHECK(s1 == a);
  CHECK(s2 == a);

  const std::vector<double> ones(3, 1.0);
  const auto [p1, p2] = blend(a, b, ones);
  CHECK(p1 == a);
  CHECK(p2 == b);

  CHECK_THROWS_AS(crossover(a, Chromosome{{1.0}}, rng), InputError);

  std::uniform_real_distribution<double> u(-10.0, 10.0);
  for (int trial = 0; trial < 10000; ++trial) {
    Chromosome x, y;
    for (int g = 0; g < 4; ++g) {
      x.genes.push_back(u(rng));
      y.genes.push_back(u(rng));
    }
    const auto [c1, c2] = crossover(x, y, rng);
    for (std::size_t g = 0; g < 4; ++g) {
      const double lo = std::min(x.genes[g], y.genes[g]), hi = std::max(x.genes[g], y.genes[g]);
      const double slack = 0.5 * (hi - lo) + 1e-12;
      for (double v : {c1.genes[g], c2.genes[g]}) {
        CHECK(v >= lo - slack);
        CHECK(v <= hi + slack);
      }
    }
  }
}

TEST_CASE("evolve: analytic optimum, elitism, statistics and determinism") {
  const auto problem = analytic();
  EvolveConfig cfg;
  cfg.population = 60;
  cfg.generations = 200;
  cfg.seed = 12;
  const auto r = evolve(problem, cfg);
  REQUIRE(r.trace.size() == 200);
  CHECK(r.best_fitness >= 0.98 * 16.0);
  CHECK(r.best_fitness == doctest::Approx(fitness(r.best, problem)).epsilon(1e-12));
  for (std::size_t g = 0; g < r.trace.size(); ++g) {
    CHECK(r.trace[g].generation == static_cast<int>(g) + 1);
    CHECK(r.trace[g].min_fitness <= r.trace[g].avg_fitness + 1e-9);
    CHECK(r.trace[g].avg_fitness <= r.trace[g].max_fitness + 1e-9);
    if (g > 0) CHECK(r.trace[g].max_fitness >= r.trace[g - 1].max_fitness);
  }

  const auto again = evolve(problem, cfg);
  CHECK(again.best == r.best);
  REQUIRE(again.trace.size() == r.trace.size());
  for (std::size_t g = 0; g < r.trace.size(); ++g) {
    CHECK(again.trace[g].max_fitness == r.trace[g].max_fitness);
    CHECK(again.trace[g].avg_fitness == r.trace[g].avg_fitness);
  }
}

TEST_CASE("evolve beats random search on a mixed instance and decodes a plan") {
  const auto problem = mixed();
  EvolveConfig cfg;
  cfg.population = 40;
  cfg.generations = 60;
  cfg.seed = 2;
  const auto ga = evolve(problem, cfg);
  const auto rs = random_search(problem, ga.evaluations, 2);
  CHECK(rs.evaluations == ga.evaluations);
  CHECK(ga.best_fitness >= rs.best_fitness);

  const auto plan = decode_plan(ga.best, problem);
  REQUIRE(plan.size() == 3);
  double total = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(plan[i].product_id == problem.product(i).product_id);
    CHECK(plan[i].expected_sales <= plan[i].allocation + 1e-12);
    total += plan[i].expected_profit;
  }
  CHECK(total == doctest::Approx(ga.best_fitness).epsilon(1e-12));
}

TEST_CASE("no product can sell: evolve refuses") {
  Problem dead({product("A", 2.0, 10.0, -1.0, 0.0, 0.0), product("B", 1.0, 5.0, 0.0, 0.0, 0.0)});
  CHECK_FALSE(dead.feasible());
  CHECK_THROWS_WITH_AS(evolve(dead, {}), doctest::Contains("no feasible plan"), InputError);
  CHECK_THROWS_AS(Problem({}), InputError);
  CHECK_THROWS_AS(Problem({product("A", 0.0, 10.0, -1.0, 0.0, 5.0)}), InputError);
}
