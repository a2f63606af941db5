#pragma once

// Shared test fixtures and oracles written independently of the library's
// evaluator and checker.

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "tierflow/parser.h"
#include "tierflow/typing.h"

namespace testing {

inline std::string fixture_path(const std::string &name) { return std::string(TIERFLOW_FIXTURES) + "/" + name; }

inline std::string read_fixture(const std::string &name) {
  std::ifstream in(fixture_path(name));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline tierflow::Environment load_fixture(const std::string &name) {
  return tierflow::load_text(read_fixture(name + ".tier"));
}

/// Fixtures the checker accepts.
inline const std::vector<std::string> &safe_fixtures() {
  static const std::vector<std::string> names{"add",       "mul",   "shuffle", "binary_add", "sync",
                                              "crosszero", "zrange", "zrange2", "spin"};
  return names;
}

/// Big-step reference interpreter. Counts steps the way the small-step
/// rules fire them: one per skip, assignment, branch choice and guard test.
struct BigStep {
  const tierflow::Registry &registry;
  std::size_t k = 0;
  std::size_t t = 0;
  std::size_t limit = 1000000;

  tierflow::Word eval(const std::map<std::string, tierflow::Word> &s, const tierflow::Expr &e) {
    if (e.kind == tierflow::Expr::Kind::Var) {
      auto it = s.find(e.name);
      return it == s.end() ? tierflow::Word() : it->second;
    }
    std::vector<tierflow::Word> args;
    for (const auto &a : e.args) args.push_back(eval(s, *a));
    return registry.at(e.name).fn(args);
  }

  void exec(std::map<std::string, tierflow::Word> &s, const tierflow::Cmd &c) {
    if (k > limit) throw std::runtime_error("reference interpreter out of fuel");
    switch (c.kind) {
      case tierflow::Cmd::Kind::Skip:
        ++k;
        return;
      case tierflow::Cmd::Kind::Assign:
        ++k;
        s[c.var] = eval(s, *c.expr);
        return;
      case tierflow::Cmd::Kind::Seq:
        exec(s, *c.first);
        exec(s, *c.second);
        return;
      case tierflow::Cmd::Kind::If:
        ++k;
        exec(s, eval(s, *c.expr).is_tt() ? *c.first : *c.second);
        return;
      case tierflow::Cmd::Kind::While:
        while (true) {
          ++k;
          if (!eval(s, *c.expr).is_tt()) return;
          ++t;
          exec(s, *c.first);
        }
    }
  }
};

/// Direct recursive reading of the typing rules: is `c` derivable at `tier`?
/// Used as an oracle by brute-force enumeration over Γ.
struct RuleOracle {
  const tierflow::VarTypeEnv &gamma;
  const tierflow::OpTypeEnv &delta;

  bool expr(const tierflow::Expr &e, tierflow::Tier tier) const {
    if (e.kind == tierflow::Expr::Kind::Var) return gamma.at(e.name) == tier;
    for (const auto &s : delta.at(e.name)) {
      if (s.result != tier) continue;
      bool ok = true;
      for (std::size_t i = 0; i < e.args.size() && ok; ++i) ok = expr(*e.args[i], s.args[i]);
      if (ok) return true;
    }
    return false;
  }

  bool cmd(const tierflow::Cmd &c, tierflow::Tier tier) const {
    using tierflow::Tier;
    switch (c.kind) {
      case tierflow::Cmd::Kind::Skip:
        return true;
      case tierflow::Cmd::Kind::Assign: {
        if (gamma.at(c.var) != tier) return false;
        return expr(*c.expr, tier) || expr(*c.expr, Tier::One);
      }
      case tierflow::Cmd::Kind::Seq:
        for (Tier a : tierflow::kTiers) {
          for (Tier b : tierflow::kTiers) {
            if (tierflow::join(a, b) == tier && cmd(*c.first, a) && cmd(*c.second, b)) return true;
          }
        }
        return false;
      case tierflow::Cmd::Kind::If:
        return expr(*c.expr, tier) && cmd(*c.first, tier) && cmd(*c.second, tier);
      case tierflow::Cmd::Kind::While:
        return tier == Tier::One && expr(*c.expr, Tier::One) &&
               (cmd(*c.first, Tier::Zero) || cmd(*c.first, Tier::One));
    }
    return false;
  }

  bool typable(const tierflow::Cmd &c) const { return cmd(c, tierflow::Tier::Zero) || cmd(c, tierflow::Tier::One); }
};

}  // namespace testing

#include <random>

namespace testing {

/// Random programs over a small operator set with the default safe Δ.
struct ProgramGen {
  std::mt19937_64 rng;
  std::vector<std::string> vars{"a", "b", "c", "d"};
  std::vector<std::string> ops{"pred", "inc", "gt0", "not", "is_empty", "concat", "equal"};

  explicit ProgramGen(std::uint64_t seed) : rng(seed) {}

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

  tierflow::Environment environment() const {
    tierflow::Environment env;
    for (const auto &name : ops) {
      auto def = *tierflow::builtin(name);
      env.delta[name] = tierflow::safe_signatures(def.arity, def.cls);
      env.registry.add(def);
    }
    return env;
  }

  tierflow::ExprPtr expr(int depth) {
    if (depth == 0 || pick(3) == 0) return tierflow::var(vars[pick(vars.size())]);
    const std::string &name = ops[pick(ops.size())];
    std::size_t arity = tierflow::builtin(name)->arity;
    std::vector<tierflow::ExprPtr> args;
    for (std::size_t i = 0; i < arity; ++i) args.push_back(expr(depth - 1));
    return tierflow::op(name, std::move(args));
  }

  // Guards are predicates so runs never get stuck.
  tierflow::ExprPtr guard() {
    static const std::vector<std::string> preds{"gt0", "is_empty", "not"};
    return tierflow::op(preds[pick(preds.size())], {expr(1)});
  }

  tierflow::CmdPtr cmd(int depth) {
    std::size_t choice = depth == 0 ? pick(2) : pick(5);
    switch (choice) {
      case 0:
        return tierflow::skip();
      case 1:
        return tierflow::assign(vars[pick(vars.size())], expr(2));
      case 2:
        return tierflow::seq(cmd(depth - 1), cmd(depth - 1));
      case 3:
        return tierflow::if_(guard(), cmd(depth - 1), cmd(depth - 1));
      default:
        return tierflow::while_(guard(), cmd(depth - 1));
    }
  }

  tierflow::VarTypeEnv gamma() {
    tierflow::VarTypeEnv g;
    for (const auto &v : vars) g[v] = tierflow::tier_of(static_cast<int>(pick(2)));
    return g;
  }
};

}  // namespace testing
