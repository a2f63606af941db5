#include <doctest.h>

#include <sstream>

#include "helpers.h"
#include "tierflow/sampling.h"
#include "tierflow/semantics.h"

using namespace tierflow;

namespace {

Registry registry_of(std::initializer_list<const char *> names) {
  Registry r;
  for (const char *n : names) r.add(*builtin(n));
  return r;
}

}  // namespace

TEST_CASE("expression evaluation") {
  Registry r = registry_of({"pred", "eq[\"a\"]"});
  CHECK(eval_expr(Store{{"x", Word("ab")}}, *parse_expr("pred(x)"), r) == Word("b"));
  CHECK(eval_expr(Store{}, *parse_expr("x"), r).empty());
  CHECK(eval_expr(Store{{"x", Word("a")}}, *parse_expr("eq[\"a\"](x)"), r) == Word::tt());
}

TEST_CASE("single steps follow the command rules") {
  Registry r = registry_of({"gt0", "dec"});
  Store mu{{"x", Word("1")}};

  StepResult s = step_command(mu, skip(), r);
  CHECK(s.terminal());
  CHECK(s.loop_increment() == 0);

  CmdPtr loop = parse_cmd("while (gt0(x)) { x := dec(x) }");
  StepResult w = step_command(mu, loop, r);
  CHECK(w.rule == Rule::WhileTrue);
  CHECK(w.loop_increment() == 1);
  REQUIRE(w.next);
  CHECK(w.next->kind == Cmd::Kind::Seq);
  CHECK(w.next->second == loop);

  StepResult f = step_command(Store{}, loop, r);
  CHECK(f.rule == Rule::WhileFalse);
  CHECK(f.terminal());
  CHECK(f.loop_increment() == 0);

  StepResult a = step_command(mu, parse_cmd("x := dec(x)"), r);
  CHECK(a.store.get("x").empty());
  CHECK(a.written == "x");
}

TEST_CASE("non-boolean guards are stuck") {
  Registry r = registry_of({"pred"});
  CHECK_THROWS_AS(step_command(Store{{"x", Word("1")}}, parse_cmd("if (x) { skip } else { skip }"), r),
                  StuckError);
  CHECK_THROWS_AS(step_command(Store{}, parse_cmd("while (x) { skip }"), r), StuckError);
}

TEST_CASE("sequential runs") {
  Environment add = testing::load_fixture("add");
  SeqRun run = run_sequential(Store{{"x", Word("111")}, {"y", Word("11")}}, add.program.at("main"), 1000,
                              add.registry);
  CHECK(run.status == RunStatus::Finished);
  CHECK(run.trace.final_store.get("y") == Word("11111"));
  CHECK(run.trace.t == 3);

  SeqRun sk = run_sequential(Store{}, skip(), 5, add.registry);
  CHECK(sk.trace.k == 1);
  CHECK(sk.trace.t == 0);

  Environment spin = testing::load_fixture("spin");
  SeqRun sp = run_sequential(Store{{"x", Word("1")}}, spin.program.at("main"), 10, spin.registry);
  CHECK(sp.status == RunStatus::FuelExhausted);
  CHECK(sp.trace.k == 10);
  CHECK_THROWS_AS(run_sequential(Store{}, skip(), 0, add.registry), std::invalid_argument);
}

TEST_CASE("unary arithmetic matches closed forms") {
  Environment add = testing::load_fixture("add");
  Environment mul = testing::load_fixture("mul");
  for (std::size_t n = 0; n <= 12; ++n) {
    for (std::size_t m = 0; m <= 5; ++m) {
      SeqRun a = run_sequential(Store{{"x", unary(n)}, {"y", unary(m)}}, add.program.at("main"), 100000,
                                add.registry, {0, false});
      CHECK(a.trace.final_store.get("y") == unary(n + m));
      CHECK(a.trace.t == n);
      CHECK(a.trace.k == 3 * n + 1);
    }
    SeqRun p = run_sequential(Store{{"x", unary(n)}, {"y", unary(n)}}, mul.program.at("main"), 100000,
                              mul.registry, {0, false});
    CHECK(p.trace.final_store.get("z") == unary(n * n));
    CHECK(p.trace.t == n + n * n);
    CHECK(p.trace.k == 3 * n * n + 5 * n + 2);
  }
}

TEST_CASE("small steps agree with the reference interpreter on random programs") {
  testing::ProgramGen gen(3);
  Environment env = gen.environment();
  SampleOptions so;
  so.max_len = 4;
  std::set<std::string> vars(gen.vars.begin(), gen.vars.end());
  int compared = 0;
  for (int i = 0; i < 400; ++i) {
    CmdPtr c = gen.cmd(3);
    Store mu = random_store(vars, gen.rng, so);
    SeqRun run = run_sequential(mu, c, 2000, env.registry);
    if (run.status != RunStatus::Finished) continue;
    testing::BigStep ref{env.registry};
    std::map<std::string, Word> s(mu.bindings().begin(), mu.bindings().end());
    ref.exec(s, *c);
    Store expected;
    for (const auto &[k, v] : s) expected.assign(k, v);
    CHECK(run.trace.final_store == expected);
    CHECK(run.trace.k == ref.k);
    CHECK(run.trace.t == ref.t);
    ++compared;
  }
  CHECK(compared > 200);
}

TEST_CASE("trace invariants: t counts unfoldings, t <= k, consecutive configurations step") {
  Environment mul = testing::load_fixture("mul");
  SeqRun run = run_sequential(Store{{"x", unary(3)}, {"y", unary(2)}}, mul.program.at("main"), 1000,
                              mul.registry);
  const SeqTrace &tr = run.trace;
  std::size_t unfoldings = 0;
  for (const auto &s : tr.steps) unfoldings += s.rule == Rule::WhileTrue;
  CHECK(unfoldings == tr.t);
  CHECK(tr.t <= tr.k);
  REQUIRE(tr.configs.size() == tr.k + 1);
  for (std::size_t i = 0; i + 1 < tr.configs.size(); ++i) {
    StepResult s = step_command(tr.configs[i].first, tr.configs[i].second, mul.registry);
    CHECK(s.store == tr.configs[i + 1].first);
    CHECK(equal(s.next, tr.configs[i + 1].second));
  }
  CHECK_FALSE(tr.configs.back().second);
}

TEST_CASE("configuration cap switches to counters only") {
  Environment add = testing::load_fixture("add");
  RunOptions o;
  o.config_cap = 4;
  SeqRun run = run_sequential(Store{{"x", unary(10)}}, add.program.at("main"), 1000, add.registry, o);
  CHECK(run.trace.truncated);
  CHECK(run.trace.configs.size() == 5);
  CHECK(run.trace.k == 31);
}

TEST_CASE("tier-0 commands run without unfolding loops, and t splits additively") {
  Environment add = testing::load_fixture("add");
  SeqRun run = run_sequential(Store{{"y", Word("1")}}, parse_cmd("y := inc(y); y := inc(y)"), 10, add.registry);
  CHECK(run.trace.t == 0);
  SeqRun whole = run_sequential(Store{{"x", unary(5)}}, add.program.at("main"), 1000, add.registry);
  for (std::size_t cut = 1; cut < whole.trace.configs.size(); ++cut) {
    const auto &[mid_store, mid_cmd] = whole.trace.configs[cut];
    std::size_t prefix_t = whole.trace.steps[cut - 1].t;
    std::size_t rest_t = mid_cmd ? run_sequential(mid_store, mid_cmd, 1000, add.registry).trace.t : 0;
    CHECK(prefix_t + rest_t == whole.trace.t);
  }
}

TEST_CASE("trace dump format") {
  Environment add = testing::load_fixture("add");
  SeqRun run = run_sequential(Store{{"x", Word("1")}}, add.program.at("main"), 100, add.registry);
  std::ostringstream out;
  dump_trace(out, run.trace.steps);
  CHECK(out.str() == "1 - W-tt 1 -\n2 - Assign 1 x=\"\"\n3 - Assign 1 y=\"1\"\n4 - W-ff 1 -\n");
}
