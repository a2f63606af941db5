#include <doctest.h>

#include <cmath>

#include "helpers.h"
#include "tierflow/analysis.h"

using namespace tierflow;

namespace {

std::vector<Store> scheduled_trace(const Store &mu, const Environment &env, std::size_t fuel) {
  std::vector<Store> trace{mu};
  ScheduleOptions o;
  o.observer = [&](const GlobalConfig &, const std::string &, const GlobalStep &s) {
    trace.push_back(s.config.store);
  };
  auto rr = round_robin();
  run_with_scheduler(mu, env.program, *rr, fuel, env.registry, o);
  return trace;
}

GrowthTable table_of(const std::vector<std::pair<std::size_t, std::size_t>> &points) {
  GrowthTable t;
  for (auto [n, k] : points) t.rows.push_back({n, k, k, false});
  return t;
}

}  // namespace

TEST_CASE("store equivalence") {
  VarTypeEnv g{{"x", Tier::One}, {"y", Tier::Zero}};
  CHECK(store_equiv(g, Store{{"x", Word("1")}, {"y", Word("0")}}, Store{{"x", Word("1")}}).equivalent);
  EquivWitness w = store_equiv(g, Store{{"x", Word("1")}}, Store{});
  CHECK_FALSE(w.equivalent);
  CHECK(w.first_difference == "x");
  CHECK(w.checked == std::set<std::string>{"x"});
  CHECK(project_tier1(g, Store{{"x", Word("1")}, {"y", Word("0")}}) == Store{{"x", Word("1")}});
}

TEST_CASE("equivalent pairs agree on tier 1 and only there") {
  VarTypeEnv g{{"x", Tier::One}, {"y", Tier::Zero}};
  std::mt19937_64 rng(3);
  bool differed = false;
  for (int i = 0; i < 100; ++i) {
    auto [a, b] = random_equiv_pair(g, {"x", "y", "z"}, rng, SampleOptions{});
    CHECK(a.get("x") == b.get("x"));
    differed = differed || a.get("y") != b.get("y");
  }
  CHECK(differed);
}

TEST_CASE("non-interference on safe programs") {
  for (const auto &name : testing::safe_fixtures()) {
    if (name == "spin") continue;
    Environment env = testing::load_fixture(name);
    NiOptions o;
    o.trials = 100;
    o.fuel = 5000;
    o.sample.alphabet = env.alphabet;
    NiReport rep = ni_suite(env.program, env.annotations, env.registry, *round_robin(), o);
    CAPTURE(name);
    CHECK(rep.ok);
    CHECK(rep.trials == 100);
  }
}

TEST_CASE("non-interference fails on the leaky loop") {
  Environment env = testing::load_fixture("leak");
  NiOptions o;
  o.sample.alphabet = env.alphabet;
  NiReport rep = ni_suite(env.program, env.annotations, env.registry, *round_robin(), o);
  CHECK_FALSE(rep.ok);
  REQUIRE(rep.counterexample);
  CHECK(store_equiv(env.annotations, rep.counterexample->mu, rep.counterexample->sigma).equivalent);
}

TEST_CASE("non-interference trials are reproducible") {
  Environment env = testing::load_fixture("leak");
  NiOptions o;
  o.seed = 11;
  o.sample.alphabet = env.alphabet;
  NiReport a = ni_suite(env.program, env.annotations, env.registry, *round_robin(), o);
  NiReport b = ni_suite(env.program, env.annotations, env.registry, *round_robin(), o);
  REQUIRE(a.counterexample);
  REQUIRE(b.counterexample);
  CHECK(a.counterexample->trial == b.counterexample->trial);
  CHECK(a.counterexample->mu == b.counterexample->mu);
}

TEST_CASE("tier-1 values stay subwords of the input") {
  for (const char *name : {"shuffle", "binary_add", "mul", "zrange2"}) {
    Environment env = testing::load_fixture(name);
    std::mt19937_64 rng(5);
    SampleOptions so;
    so.alphabet = env.alphabet;
    for (int i = 0; i < 20; ++i) {
      Store mu = random_store(trial_vars(env.program, env.annotations), rng, so);
      auto trace = scheduled_trace(mu, env, 100000);
      CAPTURE(name);
      CHECK(subword_invariant(trace, env.annotations, mu).ok);
    }
  }
}

TEST_CASE("a growing tier-1 variable breaks the subword invariant") {
  Environment env = testing::load_fixture("grow");
  Store mu{{"x", Word("1111")}, {"w", Word("0")}};
  auto trace = scheduled_trace(mu, env, 100);
  SubwordVerdict v = subword_invariant(trace, env.annotations, mu);
  CHECK_FALSE(v.ok);
  REQUIRE(v.violation);
  CHECK(v.violation->var == "w");
}

TEST_CASE("weak subject reduction along runs") {
  for (const auto &name : testing::safe_fixtures()) {
    Environment env = testing::load_fixture(name);
    std::mt19937_64 rng(9);
    SampleOptions so;
    so.alphabet = env.alphabet;
    so.max_len = 4;
    for (int i = 0; i < 10; ++i) {
      Store mu = random_store(trial_vars(env.program, env.annotations), rng, so);
      auto rr = round_robin();
      CAPTURE(name);
      CHECK(subject_reduction_violations(mu, env.program, env.annotations, env.delta, env.registry, *rr, 2000)
                .empty());
    }
  }
}

TEST_CASE("growth tables and fits") {
  Environment add = testing::load_fixture("add");
  std::vector<std::size_t> sizes;
  for (std::size_t n = 4; n <= 64; n += 4) sizes.push_back(n);
  auto gen = [](std::size_t n) { return Store{{"x", unary(n)}}; };
  GrowthTable t = measure_growth(add.program, add.registry, gen, sizes, *round_robin());
  for (const auto &r : t.rows) {
    CHECK(r.max_k == 3 * r.n + 1);
    CHECK(r.max_t == r.n);
  }
  FitResult f = fit_polynomial(t);
  CHECK(f.polynomial);
  CHECK(f.degree == 1);
  REQUIRE(f.coefficients.size() == 2);
  CHECK(f.coefficients[1] == doctest::Approx(3.0).epsilon(0.01));
  CHECK(f.coefficients[0] == doctest::Approx(1.0).epsilon(0.05));

  Environment mul = testing::load_fixture("mul");
  sizes.clear();
  for (std::size_t n = 2; n <= 24; n += 2) sizes.push_back(n);
  auto gen2 = [](std::size_t n) { return Store{{"x", unary(n)}, {"y", unary(n)}}; };
  FitResult f2 = fit_polynomial(measure_growth(mul.program, mul.registry, gen2, sizes, *round_robin()));
  CHECK(f2.polynomial);
  CHECK(f2.degree == 2);
  CHECK(f2.coefficients[2] == doctest::Approx(3.0).epsilon(0.01));
}

TEST_CASE("exponential growth is flagged") {
  std::vector<std::pair<std::size_t, std::size_t>> pts;
  for (std::size_t n = 1; n <= 16; ++n) pts.emplace_back(n, std::size_t{1} << n);
  FitResult f = fit_polynomial(table_of(pts));
  CHECK_FALSE(f.polynomial);
  CHECK(f.residuals.size() == 3);

  Environment exp = testing::load_fixture("exp");
  std::vector<std::size_t> sizes;
  for (std::size_t n = 1; n <= 12; ++n) sizes.push_back(n);
  auto gen = [](std::size_t n) { return Store{{"x", unary(n)}, {"y", Word("1")}}; };
  GrowthTable t = measure_growth(exp.program, exp.registry, gen, sizes, *round_robin());
  CHECK_FALSE(fit_polynomial(t).polynomial);
}

TEST_CASE("fits do not depend on the scale of n") {
  // The same cubic sampled on 1..8 and 100..800 gives the same residuals.
  std::vector<std::pair<std::size_t, std::size_t>> a, b;
  for (std::size_t i = 1; i <= 8; ++i) {
    a.emplace_back(i, i * i * i + 2);
    std::size_t n = 100 * i;
    b.emplace_back(n, n * n * n + 2);
  }
  FitResult fa = fit_polynomial(table_of(a)), fb = fit_polynomial(table_of(b));
  CHECK(fa.polynomial);
  CHECK(fa.degree == fb.degree);
  for (std::size_t d = 0; d < 3; ++d) CHECK(fa.residuals[d] == doctest::Approx(fb.residuals[d]).epsilon(0.01));
  FitResult lin = fit_polynomial(table_of({{10, 25}, {20, 45}, {30, 65}, {40, 85}, {50, 105}}));
  CHECK(lin.degree == 1);
  CHECK(lin.coefficients[0] == doctest::Approx(5.0));
  CHECK(lin.coefficients[1] == doctest::Approx(2.0));
}

TEST_CASE("growth argument checks and csv") {
  Environment add = testing::load_fixture("add");
  auto gen = [](std::size_t n) { return Store{{"x", unary(n)}}; };
  CHECK_THROWS_AS(measure_growth(add.program, add.registry, gen, {}, *round_robin()), std::invalid_argument);
  CHECK_THROWS_AS(measure_growth(add.program, add.registry, gen, {3, 3}, *round_robin()), std::invalid_argument);
  CHECK_THROWS_AS(fit_polynomial(table_of({{1, 1}, {2, 2}})), std::invalid_argument);
  GrowthTable t = measure_growth(add.program, add.registry, gen, {1, 2}, *round_robin());
  CHECK(t.to_csv() == "n,max_t,max_k,fuel_hit\n1,1,4,0\n2,2,7,0\n");
  GrowthOptions o;
  o.fuel = 5;
  CHECK(measure_growth(add.program, add.registry, gen, {4}, *round_robin(), o).rows[0].fuel_hit);
}

TEST_CASE("exhaustive growth takes the worst interleaving") {
  Environment z = testing::load_fixture("zrange2");
  GrowthOptions o;
  o.exhaustive = true;
  auto gen = [](std::size_t n) { return Store{{"x", unary(n)}}; };
  GrowthTable t = measure_growth(z.program, z.registry, gen, {1, 2, 3}, *round_robin(), o);
  for (const auto &r : t.rows) CHECK_FALSE(r.fuel_hit);
  CHECK(t.rows[0].max_k < t.rows[2].max_k);
}
