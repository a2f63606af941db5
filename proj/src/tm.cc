#include "tierflow/tm.h"

#include <algorithm>
#include <sstream>

#include "tierflow/operators.h"

namespace tierflow {

namespace {

std::vector<std::string> words_of(const std::string &line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

char single_letter(const std::string &tok, int line) {
  if (tok.size() != 1) throw TMError("line " + std::to_string(line) + ": expected one letter, got '" + tok + "'");
  return tok[0];
}

}  // namespace

TMSpec parse_tm(std::string_view text) {
  TMSpec spec;
  std::istringstream in{std::string(text)};
  bool in_delta = false, have_blank = false;
  int lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto toks = words_of(line);
    if (toks.empty()) continue;
    const std::string &key = toks[0];
    auto need = [&](std::size_t n) {
      if (toks.size() != n) throw TMError("line " + std::to_string(lineno) + ": malformed '" + key + "' line");
    };
    if (key == "states") {
      spec.states.assign(toks.begin() + 1, toks.end());
      in_delta = false;
    } else if (key == "alphabet") {
      need(2);
      spec.alphabet = toks[1];
      in_delta = false;
    } else if (key == "blank") {
      need(2);
      spec.blank = single_letter(toks[1], lineno);
      have_blank = true;
      in_delta = false;
    } else if (key == "init") {
      need(2);
      spec.init = toks[1];
      in_delta = false;
    } else if (key == "halt") {
      spec.halt.insert(toks.begin() + 1, toks.end());
      in_delta = false;
    } else if (key == "clock") {
      if (toks.size() != 2 && toks.size() != 3) need(2);
      try {
        spec.clock_degree = std::stoul(toks[1]);
        spec.clock_factor = toks.size() == 3 ? std::stoul(toks[2]) : 1;
      } catch (const std::exception &) {
        throw TMError("line " + std::to_string(lineno) + ": clock expects integers");
      }
      in_delta = false;
    } else if (key == "delta") {
      need(1);
      in_delta = true;
    } else if (in_delta) {
      need(5);
      Transition t{toks[2], single_letter(toks[3], lineno), Move::Right};
      if (toks[4] == "L") {
        t.move = Move::Left;
      } else if (toks[4] != "R") {
        throw TMError("line " + std::to_string(lineno) + ": move must be L or R");
      }
      auto key2 = std::make_pair(toks[0], single_letter(toks[1], lineno));
      if (!spec.delta.emplace(key2, t).second) {
        throw TMError("line " + std::to_string(lineno) + ": duplicate transition");
      }
    } else {
      throw TMError("line " + std::to_string(lineno) + ": unknown section '" + key + "'");
    }
  }
  if (!have_blank) throw TMError("missing 'blank' line");
  validate(spec);
  return spec;
}

void validate(const TMSpec &spec) {
  std::set<std::string> states(spec.states.begin(), spec.states.end());
  if (states.size() != spec.states.size()) throw TMError("duplicate state name");
  if (states.empty()) throw TMError("no states");
  if (!states.contains(spec.init)) throw TMError("initial state '" + spec.init + "' is not declared");
  for (const auto &h : spec.halt) {
    if (!states.contains(h)) throw TMError("halting state '" + h + "' is not declared");
  }
  if (spec.alphabet.find(spec.blank) == std::string::npos) throw TMError("blank is not in the alphabet");
  try {
    Alphabet check(spec.alphabet);
  } catch (const std::invalid_argument &e) {
    throw TMError(e.what());
  }
  if (spec.clock_degree < 1 || spec.clock_factor < 1) throw TMError("clock degree and factor must be >= 1");
  for (const auto &[key, t] : spec.delta) {
    if (!states.contains(key.first) || !states.contains(t.next)) {
      throw TMError("transition mentions an undeclared state");
    }
    if (spec.alphabet.find(key.second) == std::string::npos ||
        spec.alphabet.find(t.write) == std::string::npos) {
      throw TMError("transition mentions a letter outside the alphabet");
    }
    if (spec.halt.contains(key.first)) throw TMError("halting state '" + key.first + "' has a transition");
  }
  for (const auto &s : spec.states) {
    if (spec.halt.contains(s)) continue;
    for (char a : spec.alphabet) {
      if (!spec.delta.contains({s, a})) {
        throw TMError("no transition for state '" + s + "' reading '" + std::string(1, a) + "'");
      }
    }
  }
}

TMResult simulate_tm(const TMSpec &spec, const Word &input, std::size_t max_steps) {
  std::map<long, char> tape;
  for (std::size_t i = 0; i < input.size(); ++i) tape[static_cast<long>(i)] = input.str()[i];
  auto read = [&](long p) {
    auto it = tape.find(p);
    return it == tape.end() ? spec.blank : it->second;
  };
  long head = 0;
  std::string state = spec.init;
  TMResult r;
  while (!spec.halt.contains(state) && r.steps < max_steps) {
    const Transition &t = spec.delta.at({state, read(head)});
    tape[head] = t.write;
    head += t.move == Move::Right ? 1 : -1;
    state = t.next;
    ++r.steps;
  }
  r.halted = spec.halt.contains(state);
  long last = head - 1;
  for (const auto &[p, c] : tape) {
    if (p >= head && c != spec.blank) last = p;
  }
  std::string out;
  for (long p = head; p <= last; ++p) out.push_back(read(p));
  r.tape = Word(out);
  return r;
}

// ---------------------------------------------------------------------------

namespace {

class Emitter {
 public:
  explicit Emitter(const TMSpec &spec) : spec_(spec) {
    std::size_t width = 1;
    while ((std::size_t{1} << width) < spec.states.size()) ++width;
    for (std::size_t i = 0; i < spec.states.size(); ++i) {
      std::string code;
      for (std::size_t b = width; b-- > 0;) code.push_back((i >> b) & 1 ? '1' : '0');
      codes_[spec.states[i]] = Word(code);
    }
  }

  ExprPtr v(const std::string &name) { return var(name); }
  ExprPtr call(const std::string &name, std::vector<ExprPtr> args) {
    used_.insert(name);
    return op(name, std::move(args));
  }
  ExprPtr eq(char a, ExprPtr e) { return call(eq_name(Word(std::string(1, a))), {std::move(e)}); }
  ExprPtr eq(const Word &w, ExprPtr e) { return call(eq_name(w), {std::move(e)}); }
  ExprPtr suc(char a, ExprPtr e) { return call(suc_name(Word(std::string(1, a))), {std::move(e)}); }
  ExprPtr pred(ExprPtr e) { return call("pred", {std::move(e)}); }
  ExprPtr nonempty(const std::string &x) { return call("not", {call("is_empty", {v(x)})}); }
  ExprPtr literal(const Word &w) { return op(literal_name(w), {}); }

  // Nested chain of `if (guard_i) { body_i } else { ... skip }`.
  static CmdPtr cascade(std::vector<std::pair<ExprPtr, CmdPtr>> arms) {
    CmdPtr out = skip();
    for (auto it = arms.rbegin(); it != arms.rend(); ++it) out = if_(it->first, it->second, out);
    return out;
  }

  CmdPtr action(const Transition &t) {
    std::vector<CmdPtr> cmds{assign("State", literal(codes_.at(t.next)))};
    if (t.move == Move::Right) {
      cmds.push_back(assign("Left", suc(t.write, v("Left"))));
      cmds.push_back(assign("Right", pred(v("Right"))));
    } else {
      cmds.push_back(assign("Right", suc(t.write, pred(v("Right")))));
      std::vector<std::pair<ExprPtr, CmdPtr>> arms;
      for (char x : spec_.alphabet) {
        arms.emplace_back(eq(x, v("Left")),
                          seq(assign("Right", suc(x, v("Right"))), assign("Left", pred(v("Left")))));
      }
      cmds.push_back(if_(call("is_empty", {v("Left")}), assign("Right", suc(spec_.blank, v("Right"))),
                         cascade(std::move(arms))));
    }
    return seq_all(cmds);
  }

  CmdPtr step() {
    CmdPtr materialize =
        if_(call("is_empty", {v("Right")}), assign("Right", suc(spec_.blank, v("Right"))), skip());
    std::vector<std::pair<ExprPtr, CmdPtr>> letters;
    for (char a : spec_.alphabet) {
      std::vector<std::pair<ExprPtr, CmdPtr>> states;
      for (const auto &s : spec_.states) {
        if (spec_.halt.contains(s)) continue;
        states.emplace_back(eq(codes_.at(s), v("State")), action(spec_.delta.at({s, a})));
      }
      letters.emplace_back(eq(a, v("Right")), cascade(std::move(states)));
    }
    CmdPtr root = seq(materialize, cascade(std::move(letters)));
    roots_.push_back(root.get());
    return root;
  }

  std::vector<CmdPtr> steps(std::size_t count) {
    std::vector<CmdPtr> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(step());
    return out;
  }

  // Depth-k nest of Example-1 multiplication loops over copies of Input;
  // the innermost body runs n^k times.
  CmdPtr clock(std::size_t level) {
    const std::size_t k = spec_.clock_degree;
    std::string clk = "clk" + std::to_string(level);
    std::vector<CmdPtr> body{assign(clk, pred(v(clk)))};
    if (level == k) {
      for (auto &c : steps(spec_.clock_factor)) body.push_back(c);
    } else {
      std::string next = "clk" + std::to_string(level + 1);
      std::string sav = "sav" + std::to_string(level + 1);
      body.push_back(assign(sav, v(next)));
      body.push_back(clock(level + 1));
      body.push_back(assign(next, v(sav)));
    }
    return while_(nonempty(clk), seq_all(body));
  }

  CmdPtr program() {
    std::vector<CmdPtr> cmds{assign("Right", v("Input")), assign("State", literal(codes_.at(spec_.init))),
                             assign("Left", literal(Word()))};
    for (std::size_t i = 1; i <= spec_.clock_degree; ++i) {
      cmds.push_back(assign("clk" + std::to_string(i), v("Input")));
    }
    cmds.push_back(clock(1));
    for (auto &c : steps(spec_.clock_factor)) cmds.push_back(c);
    return seq_all(cmds);
  }

  const std::set<std::string> &used() const { return used_; }
  const std::vector<const Cmd *> &roots() const { return roots_; }
  const std::map<std::string, Word> &codes() const { return codes_; }

 private:
  const TMSpec &spec_;
  std::map<std::string, Word> codes_;
  std::set<std::string> used_;
  std::vector<const Cmd *> roots_;
};

}  // namespace

CompiledProgram compile_tm(const TMSpec &spec) {
  validate(spec);
  Emitter em(spec);
  CompiledProgram out;
  SourceFile &f = out.source;
  CmdPtr body = em.program();

  std::string letters = spec.alphabet;
  for (char c : std::string("01")) {
    if (letters.find(c) == std::string::npos) letters.push_back(c);
  }
  f.alphabet = letters;
  for (const auto &name : em.used()) {
    OperatorDef def = *builtin(name);
    OpDecl d;
    d.name = name;
    d.arity = def.arity;
    d.cls = def.cls;
    f.ops.push_back(d);
  }
  f.vars.push_back({"Input", Tier::One, {}});
  for (std::size_t i = 1; i <= spec.clock_degree; ++i) {
    f.vars.push_back({"clk" + std::to_string(i), Tier::One, {}});
    if (i > 1) f.vars.push_back({"sav" + std::to_string(i), Tier::One, {}});
  }
  for (const char *name : {"Left", "Right", "State"}) f.vars.push_back({name, Tier::Zero, {}});
  f.threads.push_back({"main", body, {}});
  out.step_roots = em.roots();
  return out;
}

Word read_output(const TMSpec &spec, const CompiledProgram &compiled, const Store &store) {
  std::string w = store.get(compiled.output_var).str();
  while (!w.empty() && w.back() == spec.blank) w.pop_back();
  return Word(w);
}

}  // namespace tierflow
