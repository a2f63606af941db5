#include <doctest.h>

#include "helpers.h"
#include "tierflow/analysis.h"
#include "tierflow/scheduling.h"

using namespace tierflow;

namespace {

Program three_skips() { return {{"a", skip()}, {"b", skip()}, {"c", skip()}}; }

Program loops(std::initializer_list<const char *> names) {
  Program m;
  for (const char *n : names) m[n] = parse_cmd("while (tt) { skip }");
  return m;
}

Registry tt_registry() {
  Registry r;
  r.add(*builtin("tt"));
  return r;
}

}  // namespace

TEST_CASE("global steps") {
  Registry r;
  GlobalConfig cfg{Store{}, {{"t", skip()}}, 0, 0};
  GlobalConfig next = step_global(cfg, "t", r);
  CHECK(next.terminal());
  CHECK(next.k == 1);
  CHECK(next.t == 0);
  CHECK_THROWS_AS(step_global(cfg, "u", r), std::out_of_range);

  Environment z = testing::load_fixture("zrange");
  GlobalConfig zc{Store{{"x", Word("11")}}, z.program, 0, 0};
  GlobalConfig zn = step_global(zc, "x", z.registry);
  CHECK(zn.t == 1);
  CHECK(zn.program.size() == 2);
}

TEST_CASE("round-robin cycles through live threads in order") {
  Registry r = tt_registry();
  auto rr = round_robin();
  ScheduledRun run = run_with_scheduler(Store{}, loops({"a", "b", "c"}), *rr, 9, r);
  CHECK(format_choices(run.choices) == "a,b,c,a,b,c,a,b,c");
  CHECK(run.status == RunStatus::FuelExhausted);

  // b terminates after its first step.
  Program m = loops({"a", "c"});
  m["b"] = skip();
  rr->reset();
  run = run_with_scheduler(Store{}, m, *rr, 7, r);
  CHECK(format_choices(run.choices) == "a,b,c,a,c,a,c");
}

TEST_CASE("other schedulers") {
  Registry r;
  auto first = first_live();
  CHECK(format_choices(run_with_scheduler(Store{}, three_skips(), *first, 10, r).choices) == "a,b,c");
  auto al = always("c");
  CHECK(format_choices(run_with_scheduler(Store{}, three_skips(), *al, 10, r).choices) == "c,a,b");
  auto rnd = make_scheduler("random", 4);
  auto a = run_with_scheduler(Store{}, three_skips(), *rnd, 10, r).choices;
  rnd->reset();
  CHECK(run_with_scheduler(Store{}, three_skips(), *rnd, 10, r).choices == a);
  auto lk = make_scheduler("leaky:h");
  CHECK_FALSE(lk->quiet());
  CHECK(run_with_scheduler(Store{{"h", Word("1")}}, three_skips(), *lk, 10, r).choices.front() == "b");
  CHECK_THROWS_AS(make_scheduler("fifo"), std::invalid_argument);
}

TEST_CASE("empty program finishes immediately") {
  Registry r;
  auto rr = round_robin();
  ScheduledRun run = run_with_scheduler(Store{{"x", Word("1")}}, {}, *rr, 5, r);
  CHECK(run.status == RunStatus::Finished);
  CHECK(run.config.k == 0);
  ExplorationReport e = explore(Store{{"x", Word("1")}}, {}, r);
  CHECK(e.terminal_stores == std::set<Store>{Store{{"x", Word("1")}}});
  CHECK(e.max_k == 0);
  CHECK(e.strongly_terminating_within_bounds);
}

TEST_CASE("cross-zeroing terminates under round-robin but not under a fixed thread") {
  Environment env = testing::load_fixture("crosszero");
  Store mu{{"x", Word("111")}, {"z", Word("111")}};
  auto rr = round_robin();
  CHECK(run_with_scheduler(mu, env.program, *rr, 100, env.registry).status == RunStatus::Finished);
  auto al = always("y");
  CHECK(run_with_scheduler(mu, env.program, *al, 100, env.registry).status == RunStatus::FuelExhausted);
  ExplorationReport e = explore(mu, env.program, env.registry);
  CHECK(e.cycle);
  CHECK_FALSE(e.strongly_terminating_within_bounds);
}

TEST_CASE("sync terminates under round-robin") {
  Environment env = testing::load_fixture("sync");
  for (const auto &x : {Word::tt(), Word::ff()}) {
    for (const auto &y : {Word::tt(), Word::ff()}) {
      auto rr = round_robin();
      ScheduledRun run = run_with_scheduler(Store{{"x", x}, {"y", y}}, env.program, *rr, 1000, env.registry);
      CHECK(run.status == RunStatus::Finished);
    }
  }
}

TEST_CASE("exploration of the z-range examples") {
  Environment z = testing::load_fixture("zrange");
  for (std::size_t n = 1; n <= 3; ++n) {
    ExplorationReport e = explore(Store{{"x", unary(n)}, {"y", unary(n)}}, z.program, z.registry);
    CHECK(e.strongly_terminating_within_bounds);
    for (const auto &s : e.terminal_stores) CHECK(s.get("z").size() <= n);
  }
}

TEST_CASE("exploration agrees with enumerating every schedule") {
  // Oracle: recursive enumeration of every interleaving without memoization.
  Environment env = testing::load_fixture("zrange2");
  Store mu{{"x", unary(2)}};
  std::set<Store> terminals;
  std::size_t longest = 0, most_t = 0;
  std::function<void(const GlobalConfig &)> walk = [&](const GlobalConfig &c) {
    if (c.terminal()) {
      terminals.insert(c.store);
      longest = std::max(longest, c.k);
      most_t = std::max(most_t, c.t);
      return;
    }
    for (const auto &entry : c.program) walk(step_global(c, entry.first, env.registry));
  };
  walk(GlobalConfig{mu, env.program, 0, 0});
  ExplorationReport e = explore(mu, env.program, env.registry);
  CHECK(e.terminal_stores == terminals);
  CHECK(e.max_k == longest);
  CHECK(e.max_t == most_t);
  CHECK(e.max_t <= e.max_k);
}

TEST_CASE("per-path t matches the outcomes") {
  Environment env = testing::load_fixture("zrange");
  ExploreOptions o;
  o.collect_outcomes = true;
  ExplorationReport e = explore(Store{{"x", unary(2)}, {"y", unary(1)}}, env.program, env.registry, o);
  // Every path unfolds each loop once per unit of its counter.
  for (const auto &[s, t] : e.outcomes) CHECK(t == 3);
}

TEST_CASE("exploration limits are reported") {
  Environment env = testing::load_fixture("zrange");
  ExploreOptions o;
  o.max_states = 10;
  ExplorationReport e = explore(Store{{"x", unary(3)}, {"y", unary(3)}}, env.program, env.registry, o);
  CHECK(e.limits_hit);
  CHECK_FALSE(e.strongly_terminating_within_bounds);
  o = {};
  o.max_steps = 3;
  CHECK(explore(Store{{"x", unary(3)}}, env.program, env.registry, o).limits_hit);
  o.max_steps = 0;
  CHECK_THROWS_AS(explore(Store{}, env.program, env.registry, o), std::invalid_argument);
}

TEST_CASE("concurrent non-interference by exhaustive exploration") {
  for (const char *name : {"zrange", "zrange2", "shuffle"}) {
    Environment env = testing::load_fixture(name);
    NiOptions o;
    o.trials = 40;
    o.mode = NiMode::Explore;
    o.sample.max_len = 3;
    o.sample.alphabet = env.alphabet;
    NiReport rep = ni_suite(env.program, env.annotations, env.registry, *round_robin(), o);
    CAPTURE(name);
    CHECK(rep.ok);
    CHECK(rep.inconclusive == 0);
  }
}

TEST_CASE("quietness") {
  Environment env = testing::load_fixture("crosszero");
  CHECK(quietness_test(*round_robin(), env.program, env.annotations, env.registry, 100, 500).ok);
  CHECK(quietness_test(*round_robin(), env.program, env.annotations, env.registry, 0, 500).ok);
  Environment z = testing::load_fixture("zrange");
  SampleOptions so;
  so.alphabet = z.alphabet;
  QuietVerdict leak = quietness_test(*leaky("z"), z.program, z.annotations, z.registry, 100, 500, 0, so);
  CHECK_FALSE(leak.ok);
  REQUIRE(leak.counterexample);
  CHECK(store_equiv(z.annotations, leak.counterexample->mu, leak.counterexample->sigma).equivalent);
}
