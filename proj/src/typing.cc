#include "tierflow/typing.h"

#include <algorithm>
#include <unordered_map>

namespace tierflow {

TypingError::TypingError(const std::string &message, SourcePos pos)
    : std::runtime_error(to_string(pos) + ": " + message), pos(pos) {}

namespace {

const char *cmd_rule(Cmd::Kind k) {
  switch (k) {
    case Cmd::Kind::Assign:
      return "Assign";
    case Cmd::Kind::Seq:
      return "Seq";
    case Cmd::Kind::Skip:
      return "Skip";
    case Cmd::Kind::If:
      return "If";
    case Cmd::Kind::While:
      return "While";
  }
  return "?";
}

class Typer {
 public:
  Typer(const VarTypeEnv &gamma, const OpTypeEnv &delta) : gamma_(gamma), delta_(delta) {}

  Tier var_tier(const std::string &name, SourcePos pos) const {
    auto it = gamma_.find(name);
    if (it == gamma_.end()) throw TypingError("variable '" + name + "' has no tier", pos);
    return it->second;
  }

  const std::vector<Signature> &sigs(const Expr &e) const {
    auto it = delta_.find(e.name);
    if (it == delta_.end()) throw TypingError("operator '" + e.name + "' has no type in Δ", e.pos);
    return it->second;
  }

  TierSet tiers(const Expr &e) {
    if (auto it = expr_cache_.find(&e); it != expr_cache_.end()) return it->second;
    TierSet out;
    if (e.kind == Expr::Kind::Var) {
      out = TierSet::only(var_tier(e.name, e.pos));
    } else {
      std::vector<TierSet> args;
      for (const auto &a : e.args) args.push_back(tiers(*a));
      for (const auto &s : sigs(e)) {
        if (s.args.size() != e.args.size()) continue;
        bool fits = true;
        for (std::size_t i = 0; i < args.size() && fits; ++i) fits = args[i].contains(s.args[i]);
        if (fits) out.insert(s.result);
      }
    }
    expr_cache_.emplace(&e, out);
    return out;
  }

  TierSet tiers(const Cmd &c) {
    if (auto it = cmd_cache_.find(&c); it != cmd_cache_.end()) return it->second;
    TierSet out;
    switch (c.kind) {
      case Cmd::Kind::Skip:
        out = TierSet::both();
        break;
      case Cmd::Kind::Assign: {
        Tier beta = var_tier(c.var, c.pos);
        TierSet e = tiers(*c.expr);
        for (Tier alpha : kTiers) {
          if (e.contains(alpha) && leq(beta, alpha)) out = TierSet::only(beta);
        }
        break;
      }
      case Cmd::Kind::Seq: {
        TierSet a = tiers(*c.first), b = tiers(*c.second);
        for (Tier x : kTiers) {
          for (Tier y : kTiers) {
            if (a.contains(x) && b.contains(y)) out.insert(join(x, y));
          }
        }
        break;
      }
      case Cmd::Kind::If:
        out = tiers(*c.expr).intersect(tiers(*c.first)).intersect(tiers(*c.second));
        break;
      case Cmd::Kind::While:
        if (tiers(*c.expr).contains(Tier::One) && !tiers(*c.first).empty()) {
          out = TierSet::only(Tier::One);
        }
        // Type the body anyway so unbound names surface as errors.
        break;
    }
    cmd_cache_.emplace(&c, out);
    return out;
  }

  // Precondition: tier ∈ tiers(e).
  Derivation derive(const Expr &e, Tier tier) {
    Derivation d;
    d.tier = tier;
    d.expr = &e;
    if (e.kind == Expr::Kind::Var) {
      d.rule = "Var";
      return d;
    }
    d.rule = "Op";
    for (const auto &s : sigs(e)) {
      if (s.result != tier || s.args.size() != e.args.size()) continue;
      bool fits = true;
      for (std::size_t i = 0; i < e.args.size() && fits; ++i) {
        fits = tiers(*e.args[i]).contains(s.args[i]);
      }
      if (!fits) continue;
      d.sig = s;
      for (std::size_t i = 0; i < e.args.size(); ++i) d.premises.push_back(derive(*e.args[i], s.args[i]));
      return d;
    }
    throw std::logic_error("derive: tier not admissible");
  }

  // Precondition: tier ∈ tiers(c). Sub-derivations take the largest
  // admissible tier.
  Derivation derive(const Cmd &c, Tier tier) {
    Derivation d;
    d.tier = tier;
    d.cmd = &c;
    d.rule = cmd_rule(c.kind);
    switch (c.kind) {
      case Cmd::Kind::Skip:
        break;
      case Cmd::Kind::Assign: {
        Derivation target;
        target.rule = "Var";
        target.tier = tier;
        d.premises.push_back(target);
        TierSet e = tiers(*c.expr);
        Tier alpha = e.contains(Tier::One) ? Tier::One : Tier::Zero;
        d.premises.push_back(derive(*c.expr, alpha));
        break;
      }
      case Cmd::Kind::Seq: {
        TierSet a = tiers(*c.first), b = tiers(*c.second);
        for (Tier x : {Tier::One, Tier::Zero}) {
          for (Tier y : {Tier::One, Tier::Zero}) {
            if (a.contains(x) && b.contains(y) && join(x, y) == tier) {
              d.premises.push_back(derive(*c.first, x));
              d.premises.push_back(derive(*c.second, y));
              return d;
            }
          }
        }
        throw std::logic_error("derive: seq tier not admissible");
      }
      case Cmd::Kind::If:
        d.premises.push_back(derive(*c.expr, tier));
        d.premises.push_back(derive(*c.first, tier));
        d.premises.push_back(derive(*c.second, tier));
        break;
      case Cmd::Kind::While:
        d.premises.push_back(derive(*c.expr, Tier::One));
        d.premises.push_back(derive(*c.first, tiers(*c.first).max()));
        break;
    }
    return d;
  }

 private:
  const VarTypeEnv &gamma_;
  const OpTypeEnv &delta_;
  std::unordered_map<const Expr *, TierSet> expr_cache_;
  std::unordered_map<const Cmd *, TierSet> cmd_cache_;
};

// Forces every name in a command to be resolved, so typing errors are not
// masked by the While rule short-circuiting.
void touch(Typer &typer, const Cmd &c) {
  typer.tiers(c);
  if (c.expr) typer.tiers(*c.expr);
  if (c.first) touch(typer, *c.first);
  if (c.second) touch(typer, *c.second);
}

}  // namespace

ExprTyping type_expr(const VarTypeEnv &gamma, const OpTypeEnv &delta, const Expr &e) {
  Typer typer(gamma, delta);
  ExprTyping out;
  out.tiers = typer.tiers(e);
  for (Tier t : kTiers) {
    if (out.tiers.contains(t)) out.witnesses.emplace(t, typer.derive(e, t));
  }
  return out;
}

CmdTyping type_command(const VarTypeEnv &gamma, const OpTypeEnv &delta, const Cmd &c) {
  Typer typer(gamma, delta);
  touch(typer, c);
  CmdTyping out;
  out.tiers = typer.tiers(c);
  for (Tier t : kTiers) {
    if (out.tiers.contains(t)) out.witnesses.emplace(t, typer.derive(c, t));
  }
  return out;
}

TierSet command_tiers(const VarTypeEnv &gamma, const OpTypeEnv &delta, const Cmd &c) {
  Typer typer(gamma, delta);
  touch(typer, c);
  return typer.tiers(c);
}

bool verify_derivation(const Derivation &d, const VarTypeEnv &gamma, const OpTypeEnv &delta) {
  auto tier_of_var = [&](const std::string &name) -> std::optional<Tier> {
    auto it = gamma.find(name);
    if (it == gamma.end()) return std::nullopt;
    return it->second;
  };
  if (d.expr) {
    const Expr &e = *d.expr;
    if (d.rule == "Var") return e.kind == Expr::Kind::Var && tier_of_var(e.name) == d.tier;
    if (d.rule != "Op" || e.kind != Expr::Kind::Op || !d.sig) return false;
    auto it = delta.find(e.name);
    if (it == delta.end() || std::find(it->second.begin(), it->second.end(), *d.sig) == it->second.end()) {
      return false;
    }
    if (d.sig->result != d.tier || d.premises.size() != e.args.size() ||
        d.sig->args.size() != e.args.size()) {
      return false;
    }
    for (std::size_t i = 0; i < e.args.size(); ++i) {
      const Derivation &p = d.premises[i];
      if (p.expr != e.args[i].get() || p.tier != d.sig->args[i]) return false;
      if (!verify_derivation(p, gamma, delta)) return false;
    }
    return true;
  }
  if (!d.cmd || d.rule != cmd_rule(d.cmd->kind)) return false;
  const Cmd &c = *d.cmd;
  auto sub = [&](std::size_t i, const void *node) {
    const Derivation &p = d.premises[i];
    bool same = node == static_cast<const void *>(p.cmd) || node == static_cast<const void *>(p.expr);
    return same && verify_derivation(p, gamma, delta);
  };
  switch (c.kind) {
    case Cmd::Kind::Skip:
      return d.premises.empty();
    case Cmd::Kind::Assign:
      return d.premises.size() == 2 && tier_of_var(c.var) == d.tier && d.premises[0].tier == d.tier &&
             leq(d.tier, d.premises[1].tier) && sub(1, c.expr.get());
    case Cmd::Kind::Seq:
      return d.premises.size() == 2 && join(d.premises[0].tier, d.premises[1].tier) == d.tier &&
             sub(0, c.first.get()) && sub(1, c.second.get());
    case Cmd::Kind::If:
      return d.premises.size() == 3 && d.premises[0].tier == d.tier && d.premises[1].tier == d.tier &&
             d.premises[2].tier == d.tier && sub(0, c.expr.get()) && sub(1, c.first.get()) &&
             sub(2, c.second.get());
    case Cmd::Kind::While:
      return d.premises.size() == 2 && d.tier == Tier::One && d.premises[0].tier == Tier::One &&
             sub(0, c.expr.get()) && sub(1, c.first.get());
  }
  return false;
}

DeltaVerdict check_safe_delta(const OpTypeEnv &delta, const Registry &registry) {
  DeltaVerdict v;
  for (const auto &[name, sigs] : delta) {
    const OperatorDef &def = registry.at(name);
    for (const auto &s : sigs) {
      Tier all = Tier::One;
      for (Tier a : s.args) all = meet(all, a);
      std::string reason;
      if (s.args.size() != def.arity) {
        reason = "signature arity differs from operator arity";
      } else if (!leq(s.result, all)) {
        reason = "result tier is not below the meet of the argument tiers";
      } else if (!def.cls.neutral() && s.result == Tier::One) {
        reason = "positive, non-neutral operator with result tier 1";
      }
      if (!reason.empty()) {
        v.ok = false;
        v.op = name;
        v.signature = s;
        v.reason = reason;
        return v;
      }
    }
  }
  return v;
}

// ---------------------------------------------------------------------------
// Propositional encoding for inference and conflict cores.

namespace {

constexpr int kHard = -1;

class Solver {
 public:
  int fresh() { return ++nvars_; }
  int size() const { return nvars_; }

  void add(std::vector<int> clause, int group) {
    clauses_.push_back(std::move(clause));
    groups_.push_back(group);
  }

  // assignment[v] ∈ {-1 unassigned, 0, 1}
  using Assignment = std::vector<int8_t>;

  std::optional<Assignment> solve(const std::vector<char> &enabled, const std::vector<int> &order,
                                  const std::vector<int8_t> &phase) const {
    Assignment a(nvars_ + 1, -1);
    if (dpll(a, enabled, order, phase)) return a;
    return std::nullopt;
  }

 private:
  bool active(std::size_t i, const std::vector<char> &enabled) const {
    return groups_[i] == kHard || enabled[groups_[i]];
  }

  bool propagate(Assignment &a, const std::vector<char> &enabled) const {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < clauses_.size(); ++i) {
        if (!active(i, enabled)) continue;
        int unassigned = 0, last = 0;
        bool sat = false;
        for (int lit : clauses_[i]) {
          int v = std::abs(lit);
          if (a[v] < 0) {
            ++unassigned;
            last = lit;
          } else if ((a[v] == 1) == (lit > 0)) {
            sat = true;
            break;
          }
        }
        if (sat) continue;
        if (unassigned == 0) return false;
        if (unassigned == 1) {
          a[std::abs(last)] = last > 0 ? 1 : 0;
          changed = true;
        }
      }
    }
    return true;
  }

  bool dpll(Assignment &a, const std::vector<char> &enabled, const std::vector<int> &order,
            const std::vector<int8_t> &phase) const {
    if (!propagate(a, enabled)) return false;
    int pick = 0;
    for (int v : order) {
      if (a[v] < 0) {
        pick = v;
        break;
      }
    }
    if (pick == 0) return true;
    for (int8_t value : {phase[pick], static_cast<int8_t>(1 - phase[pick])}) {
      Assignment trial = a;
      trial[pick] = value;
      if (dpll(trial, enabled, order, phase)) {
        a = std::move(trial);
        return true;
      }
    }
    return false;
  }

  int nvars_ = 0;
  std::vector<std::vector<int>> clauses_;
  std::vector<int> groups_;
};

int lit(int v, Tier t) { return t == Tier::One ? v : -v; }

class Encoder {
 public:
  Encoder(const OpTypeEnv &delta) : delta_(delta) {}

  void encode_thread(const std::string &thread, const Cmd &c) {
    thread_ = thread;
    for (const auto &g : guard_vars(c)) guards_.insert(g);
    encode(c);
  }

  void annotate(const VarTypeEnv &gamma) {
    thread_.clear();
    for (const auto &[name, tier] : gamma) {
      int g = group("Annotation", {}, "variable " + name + " is annotated with tier " +
                                          std::to_string(to_int(tier)),
                    {name});
      solver_.add({lit(tier_var(name), tier)}, g);
    }
  }

  std::optional<Solver::Assignment> solve(const std::vector<char> &enabled) const {
    std::vector<int> order;
    std::vector<int8_t> phase(solver_.size() + 1, 0);
    for (const auto &name : var_order_) {
      int v = var_ids_.at(name);
      order.push_back(v);
      phase[v] = guards_.contains(name) ? 1 : 0;
    }
    for (int v = 1; v <= solver_.size(); ++v) {
      if (std::find(order.begin(), order.end(), v) == order.end()) order.push_back(v);
    }
    return solver_.solve(enabled, order, phase);
  }

  std::size_t group_count() const { return groups_.size(); }
  const Diagnostic &group_info(std::size_t g) const { return groups_[g]; }

  VarTypeEnv gamma(const Solver::Assignment &a) const {
    VarTypeEnv out;
    for (const auto &[name, v] : var_ids_) out[name] = tier_of(a[v] == 1);
    return out;
  }

 private:
  int tier_var(const std::string &name) {
    auto it = var_ids_.find(name);
    if (it != var_ids_.end()) return it->second;
    int v = solver_.fresh();
    var_ids_.emplace(name, v);
    var_order_.push_back(name);
    return v;
  }

  int group(std::string rule, SourcePos pos, std::string message, std::set<std::string> vars) {
    groups_.push_back({std::move(rule), pos, std::move(message), std::move(vars), thread_});
    return static_cast<int>(groups_.size() - 1);
  }

  int encode(const Expr &e) {
    if (e.kind == Expr::Kind::Var) return tier_var(e.name);
    std::vector<int> args;
    for (const auto &a : e.args) args.push_back(encode(*a));
    auto it = delta_.find(e.name);
    if (it == delta_.end()) throw TypingError("operator '" + e.name + "' has no type in Δ", e.pos);
    int n = solver_.fresh();
    int g = group("Op", e.pos, pretty(e) + " needs a signature from Δ(" + e.name + ")", free_vars(e));
    std::vector<int> selectors;
    for (const auto &s : it->second) {
      if (s.args.size() != e.args.size()) continue;
      int sel = solver_.fresh();
      selectors.push_back(sel);
      for (std::size_t i = 0; i < args.size(); ++i) solver_.add({-sel, lit(args[i], s.args[i])}, g);
      solver_.add({-sel, lit(n, s.result)}, g);
    }
    solver_.add(selectors, g);
    for (std::size_t i = 0; i < selectors.size(); ++i) {
      for (std::size_t j = i + 1; j < selectors.size(); ++j) solver_.add({-selectors[i], -selectors[j]}, g);
    }
    return n;
  }

  void same(int a, int b, int g) {
    solver_.add({-a, b}, g);
    solver_.add({a, -b}, g);
  }

  int encode(const Cmd &c) {
    switch (c.kind) {
      case Cmd::Kind::Skip:
        return solver_.fresh();
      case Cmd::Kind::Assign: {
        int e = encode(*c.expr);
        int x = tier_var(c.var);
        int n = solver_.fresh();
        std::set<std::string> vars = free_vars(*c.expr);
        vars.insert(c.var);
        int g = group("Assign", c.pos,
                      c.var + " := " + pretty(*c.expr) + " requires tier(" + c.var + ") ≼ tier(" +
                          pretty(*c.expr) + ")",
                      vars);
        same(n, x, g);
        solver_.add({-x, e}, g);
        return n;
      }
      case Cmd::Kind::Seq: {
        int a = encode(*c.first);
        int b = encode(*c.second);
        int n = solver_.fresh();
        int g = group("Seq", c.pos, "sequence tier is the join of its parts", {});
        solver_.add({-n, a, b}, g);
        solver_.add({-a, n}, g);
        solver_.add({-b, n}, g);
        return n;
      }
      case Cmd::Kind::If: {
        int e = encode(*c.expr);
        int a = encode(*c.first);
        int b = encode(*c.second);
        int n = solver_.fresh();
        int g = group("If", c.pos,
                      "if (" + pretty(*c.expr) + ") requires guard and both branches at one tier",
                      free_vars(*c.expr));
        same(n, e, g);
        same(n, a, g);
        same(n, b, g);
        return n;
      }
      case Cmd::Kind::While: {
        int e = encode(*c.expr);
        encode(*c.first);
        int n = solver_.fresh();
        int g = group("While", c.pos, "while (" + pretty(*c.expr) + ") requires a tier-1 guard",
                      free_vars(*c.expr));
        solver_.add({n}, g);
        solver_.add({e}, g);
        return n;
      }
    }
    return 0;
  }

  const OpTypeEnv &delta_;
  Solver solver_;
  std::map<std::string, int> var_ids_;
  std::vector<std::string> var_order_;
  std::set<std::string> guards_;
  std::vector<Diagnostic> groups_;
  std::string thread_;
};

// Drop-one minimization of an unsatisfiable group set. Later groups are
// tried first, so constraints met earlier in the source tend to survive.
std::vector<std::size_t> minimize_core(const Encoder &enc) {
  std::vector<char> enabled(enc.group_count(), 1);
  for (std::size_t g = enabled.size(); g-- > 0;) {
    enabled[g] = 0;
    if (enc.solve(enabled)) enabled[g] = 1;
  }
  std::vector<std::size_t> core;
  for (std::size_t g = 0; g < enabled.size(); ++g) {
    if (enabled[g]) core.push_back(g);
  }
  return core;
}

void report_core(const Encoder &enc, TypingVerdict &v) {
  for (std::size_t g : minimize_core(enc)) {
    const Diagnostic &d = enc.group_info(g);
    v.diagnostics.push_back(d);
    v.core_vars.insert(d.vars.begin(), d.vars.end());
  }
}

// Δ safety and class validation; appends diagnostics, returns false on failure.
bool check_operators(const Environment &env, const CheckOptions &options, TypingVerdict &v) {
  DeltaVerdict dv = check_safe_delta(env.delta, env.registry);
  if (!dv.ok) {
    v.diagnostics.push_back({"Safety", {}, "Δ(" + dv.op + ") contains " + to_string(*dv.signature) +
                                               ": " + dv.reason,
                             {}, ""});
    return false;
  }
  if (options.validate_len == 0) return true;
  for (const auto &name : env.registry.names()) {
    const OperatorDef &def = env.registry.at(name);
    ValidationVerdict val = validate_class(def, options.validate_len, env.alphabet);
    if (!val.ok) {
      std::string args;
      for (std::size_t i = 0; i < val.counterexample.size(); ++i) {
        args += (i ? ", \"" : "\"") + val.counterexample[i].str() + "\"";
      }
      v.diagnostics.push_back({"Class", {}, "operator " + name + " declared " + to_string(def.cls) +
                                                ": " + val.reason + " on (" + args + ")",
                               {}, ""});
      return false;
    }
  }
  return true;
}

void type_threads(const Environment &env, TypingVerdict &v) {
  v.safe = true;
  for (const auto &[thread, body] : env.program) {
    CmdTyping ct = type_command(v.gamma, env.delta, *body);
    if (ct.tiers.empty()) {
      v.safe = false;
      v.diagnostics.push_back({"Thread", body->pos, "thread " + thread + " is not typable", {}, thread});
      return;
    }
    Tier top = ct.tiers.max();
    v.thread_tiers[thread] = top;
    v.derivations.emplace(thread, std::move(ct.witnesses.at(top)));
  }
}

Encoder encode_program(const Environment &env, const VarTypeEnv &hard) {
  Encoder enc(env.delta);
  for (const auto &[thread, body] : env.program) enc.encode_thread(thread, *body);
  enc.annotate(hard);
  return enc;
}

}  // namespace

TypingVerdict check_program(const Environment &env, const CheckOptions &options) {
  TypingVerdict v;
  v.gamma = env.annotations;
  for (const auto &name : free_vars(env.program)) {
    if (!v.gamma.contains(name)) {
      v.diagnostics.push_back({"Var", {}, "variable " + name + " has no tier annotation", {name}, ""});
    }
  }
  if (!v.diagnostics.empty()) return v;
  if (!check_operators(env, options, v)) return v;
  type_threads(env, v);
  if (!v.safe) {
    Encoder enc = encode_program(env, env.annotations);
    report_core(enc, v);
  }
  return v;
}

TypingVerdict infer_tiers(const Environment &env, const CheckOptions &options) {
  TypingVerdict v;
  if (!check_operators(env, options, v)) return v;
  Encoder enc = encode_program(env, env.annotations);
  auto solution = enc.solve(std::vector<char>(enc.group_count(), 1));
  if (!solution) {
    v.diagnostics.push_back({"Unsatisfiable", {}, "no tier assignment types every thread", {}, ""});
    report_core(enc, v);
    return v;
  }
  v.gamma = enc.gamma(*solution);
  for (const auto &[name, tier] : env.annotations) v.gamma[name] = tier;
  type_threads(env, v);
  if (!v.safe) throw std::logic_error("infer_tiers: solution rejected by the checker");
  return v;
}

// ---------------------------------------------------------------------------

namespace {

void scan_confinement(const Derivation &d, bool inside_zero, const VarTypeEnv &gamma,
                      std::vector<std::string> &out) {
  if (d.expr) return;
  bool zero = inside_zero || d.tier == Tier::Zero;
  if (zero && d.cmd) {
    if (d.cmd->kind == Cmd::Kind::While) {
      out.push_back(to_string(d.cmd->pos) + ": while loop inside a tier-0 command");
    }
    if (d.cmd->kind == Cmd::Kind::Assign && gamma.at(d.cmd->var) != Tier::Zero) {
      out.push_back(to_string(d.cmd->pos) + ": tier-0 command assigns tier-1 variable " + d.cmd->var);
    }
  }
  for (const auto &p : d.premises) scan_confinement(p, zero, gamma, out);
}

void scan_security(const Derivation &d, bool inside_one, const VarTypeEnv &gamma,
                   const Registry &registry, std::vector<std::string> &out) {
  if (d.expr) {
    bool one = inside_one || d.tier == Tier::One;
    if (one) {
      if (d.expr->kind == Expr::Kind::Var && gamma.at(d.expr->name) != Tier::One) {
        out.push_back(to_string(d.expr->pos) + ": tier-1 expression reads tier-0 variable " + d.expr->name);
      }
      if (d.expr->kind == Expr::Kind::Op && !registry.at(d.expr->name).cls.neutral()) {
        out.push_back(to_string(d.expr->pos) + ": tier-1 expression uses non-neutral operator " +
                      d.expr->name);
      }
    }
    for (const auto &p : d.premises) scan_security(p, one, gamma, registry, out);
    return;
  }
  for (const auto &p : d.premises) scan_security(p, false, gamma, registry, out);
}

}  // namespace

std::vector<std::string> confinement_violations(const Derivation &d, const VarTypeEnv &gamma) {
  std::vector<std::string> out;
  scan_confinement(d, false, gamma, out);
  return out;
}

std::vector<std::string> simple_security_violations(const Derivation &d, const VarTypeEnv &gamma,
                                                    const Registry &registry) {
  std::vector<std::string> out;
  scan_security(d, false, gamma, registry, out);
  return out;
}

}  // namespace tierflow
