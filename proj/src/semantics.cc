#include "tierflow/semantics.h"

namespace tierflow {

const char *rule_name(Rule r) {
  switch (r) {
    case Rule::Skip:
      return "Skip";
    case Rule::Assign:
      return "Assign";
    case Rule::IfTrue:
      return "If-tt";
    case Rule::IfFalse:
      return "If-ff";
    case Rule::WhileTrue:
      return "W-tt";
    case Rule::WhileFalse:
      return "W-ff";
  }
  return "?";
}

StuckError::StuckError(const std::string &message, SourcePos pos)
    : RuntimeError(to_string(pos) + ": " + message), pos(pos) {}

Word eval_expr(const Store &mu, const Expr &e, const Registry &registry) {
  if (e.kind == Expr::Kind::Var) return mu.get(e.name);
  std::vector<Word> args;
  args.reserve(e.args.size());
  for (const auto &a : e.args) args.push_back(eval_expr(mu, *a, registry));
  return registry.apply(e.name, args);
}

namespace {

bool guard_value(const Store &mu, const Cmd &c, const Registry &registry, const char *what) {
  Word w = eval_expr(mu, *c.expr, registry);
  if (!w.is_bool()) {
    throw StuckError(std::string(what) + " guard evaluated to " + quote(w) + ", not tt/ff", c.pos);
  }
  return w.is_tt();
}

}  // namespace

StepResult step_command(const Store &mu, const CmdPtr &c, const Registry &registry) {
  StepResult r;
  switch (c->kind) {
    case Cmd::Kind::Skip:
      r.store = mu;
      r.rule = Rule::Skip;
      r.redex = c.get();
      return r;
    case Cmd::Kind::Assign:
      r.store = mu.set(c->var, eval_expr(mu, *c->expr, registry));
      r.rule = Rule::Assign;
      r.redex = c.get();
      r.written = c->var;
      return r;
    case Cmd::Kind::Seq: {
      StepResult inner = step_command(mu, c->first, registry);
      inner.next = inner.next ? seq(inner.next, c->second, c->pos) : c->second;
      return inner;
    }
    case Cmd::Kind::If: {
      bool b = guard_value(mu, *c, registry, "if");
      r.store = mu;
      r.next = b ? c->first : c->second;
      r.rule = b ? Rule::IfTrue : Rule::IfFalse;
      r.redex = c.get();
      return r;
    }
    case Cmd::Kind::While: {
      bool b = guard_value(mu, *c, registry, "while");
      r.store = mu;
      r.rule = b ? Rule::WhileTrue : Rule::WhileFalse;
      r.redex = c.get();
      if (b) r.next = seq(c->first, c, c->pos);
      return r;
    }
  }
  throw RuntimeError("step_command: malformed command");
}

SeqRun run_sequential(const Store &mu, const CmdPtr &c, std::size_t fuel,
                      const Registry &registry, const RunOptions &options) {
  if (fuel < 1) throw std::invalid_argument("run_sequential: fuel must be >= 1");
  SeqRun run;
  SeqTrace &tr = run.trace;
  Store store = mu;
  CmdPtr cur = c;
  tr.configs.emplace_back(store, cur);
  while (cur) {
    if (tr.k == fuel) {
      run.status = RunStatus::FuelExhausted;
      break;
    }
    StepResult r = step_command(store, cur, registry);
    ++tr.k;
    tr.t += r.loop_increment();
    if (options.record_steps) {
      TraceStep s{tr.k, "", r.rule, tr.t, r.written, {}};
      if (r.written) s.value = r.store.get(*r.written);
      tr.steps.push_back(std::move(s));
    }
    store = std::move(r.store);
    cur = std::move(r.next);
    if (tr.configs.size() <= options.config_cap) {
      tr.configs.emplace_back(store, cur);
    } else {
      tr.truncated = true;
    }
  }
  tr.final_store = store;
  run.remaining = cur;
  return run;
}

std::string quote(const Word &w) { return "\"" + w.str() + "\""; }

void dump_trace(std::ostream &out, const std::vector<TraceStep> &steps) {
  for (const auto &s : steps) {
    out << s.index << ' ' << (s.thread.empty() ? "-" : s.thread) << ' ' << rule_name(s.rule) << ' '
        << s.t << ' ';
    if (s.written) {
      out << *s.written << '=' << quote(s.value);
    } else {
      out << '-';
    }
    out << '\n';
  }
}

}  // namespace tierflow
