#include "tierflow/core.h"

#include <algorithm>
#include <functional>

namespace tierflow {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

std::size_t hash_str(const std::string &s) { return std::hash<std::string>{}(s); }

}  // namespace

Alphabet::Alphabet(std::string_view letters) {
  std::set<char> seen;
  for (char c : letters) {
    if (c == kTrueLetter || c == kFalseLetter) {
      throw std::invalid_argument("alphabet may not declare the reserved letters T and F");
    }
    if (c <= ' ' || c > '~' || c == '"' || c == '\\') {
      throw std::invalid_argument(std::string("alphabet letter must be printable ASCII other than quote/backslash: ") + c);
    }
    if (seen.insert(c).second) letters_.push_back(c);
  }
}

std::string Alphabet::all_letters() const {
  return letters_ + kTrueLetter + kFalseLetter;
}

bool Alphabet::admits(const Word &w) const {
  const std::string all = all_letters();
  return std::all_of(w.str().begin(), w.str().end(),
                     [&](char c) { return all.find(c) != std::string::npos; });
}

bool subword(const Word &v, const Word &w) {
  return w.str().find(v.str()) != std::string::npos;
}

Word unary(std::size_t n) { return Word(std::string(n, '1')); }

std::string to_string(TierSet s) {
  std::string out = "{";
  if (s.contains(Tier::Zero)) out += "0";
  if (s.contains(Tier::One)) out += s.contains(Tier::Zero) ? ",1" : "1";
  return out + "}";
}

Store::Store(std::initializer_list<std::pair<const std::string, Word>> init) {
  for (const auto &[k, v] : init) assign(k, v);
}

Word Store::get(const std::string &var) const {
  auto it = bindings_.find(var);
  return it == bindings_.end() ? Word() : it->second;
}

Store Store::set(const std::string &var, Word value) const {
  Store out = *this;
  out.assign(var, std::move(value));
  return out;
}

void Store::assign(const std::string &var, Word value) {
  if (value.empty()) {
    bindings_.erase(var);
  } else {
    bindings_[var] = std::move(value);
  }
}

bool operator==(const Store &a, const Store &b) { return a.bindings_ == b.bindings_; }

std::strong_ordering operator<=>(const Store &a, const Store &b) {
  return a.bindings_ <=> b.bindings_;
}

std::size_t Store::hash() const {
  std::size_t h = 0x51ed;
  for (const auto &[k, v] : bindings_) h = mix(mix(h, hash_str(k)), hash_str(v.str()));
  return h;
}

std::string to_string(const SourcePos &pos) {
  return std::to_string(pos.line) + ":" + std::to_string(pos.column);
}

// ---------------------------------------------------------------------------

ExprPtr var(std::string name, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Var;
  e->hash = mix(1, hash_str(name));
  e->name = std::move(name);
  e->pos = pos;
  return e;
}

ExprPtr op(std::string name, std::vector<ExprPtr> args, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = Expr::Kind::Op;
  std::size_t h = mix(2, hash_str(name));
  for (const auto &a : args) h = mix(h, a->hash);
  e->hash = h;
  e->name = std::move(name);
  e->args = std::move(args);
  e->pos = pos;
  return e;
}

namespace {

std::shared_ptr<Cmd> make_cmd(Cmd::Kind kind, SourcePos pos) {
  auto c = std::make_shared<Cmd>();
  c->kind = kind;
  c->pos = pos;
  return c;
}

}  // namespace

CmdPtr assign(std::string var, ExprPtr e, SourcePos pos) {
  auto c = make_cmd(Cmd::Kind::Assign, pos);
  c->hash = mix(mix(10, hash_str(var)), e->hash);
  c->var = std::move(var);
  c->expr = std::move(e);
  return c;
}

CmdPtr seq(CmdPtr a, CmdPtr b, SourcePos pos) {
  auto c = make_cmd(Cmd::Kind::Seq, pos);
  c->hash = mix(mix(11, a->hash), b->hash);
  c->first = std::move(a);
  c->second = std::move(b);
  return c;
}

CmdPtr skip(SourcePos pos) {
  auto c = make_cmd(Cmd::Kind::Skip, pos);
  c->hash = 12;
  return c;
}

CmdPtr if_(ExprPtr guard, CmdPtr then_branch, CmdPtr else_branch, SourcePos pos) {
  auto c = make_cmd(Cmd::Kind::If, pos);
  c->hash = mix(mix(mix(13, guard->hash), then_branch->hash), else_branch->hash);
  c->expr = std::move(guard);
  c->first = std::move(then_branch);
  c->second = std::move(else_branch);
  return c;
}

CmdPtr while_(ExprPtr guard, CmdPtr body, SourcePos pos) {
  auto c = make_cmd(Cmd::Kind::While, pos);
  c->hash = mix(mix(14, guard->hash), body->hash);
  c->expr = std::move(guard);
  c->first = std::move(body);
  return c;
}

CmdPtr seq_all(const std::vector<CmdPtr> &cmds) {
  if (cmds.empty()) throw std::invalid_argument("seq_all: empty command list");
  CmdPtr out = cmds.back();
  for (auto it = cmds.rbegin() + 1; it != cmds.rend(); ++it) out = seq(*it, out, (*it)->pos);
  return out;
}

bool equal(const Expr &a, const Expr &b) {
  if (&a == &b) return true;
  if (a.hash != b.hash || a.kind != b.kind || a.name != b.name ||
      a.args.size() != b.args.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!equal(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

bool equal(const Cmd &a, const Cmd &b) {
  if (&a == &b) return true;
  if (a.hash != b.hash || a.kind != b.kind) return false;
  switch (a.kind) {
    case Cmd::Kind::Skip:
      return true;
    case Cmd::Kind::Assign:
      return a.var == b.var && equal(*a.expr, *b.expr);
    case Cmd::Kind::Seq:
      return equal(*a.first, *b.first) && equal(*a.second, *b.second);
    case Cmd::Kind::If:
      return equal(*a.expr, *b.expr) && equal(*a.first, *b.first) &&
             equal(*a.second, *b.second);
    case Cmd::Kind::While:
      return equal(*a.expr, *b.expr) && equal(*a.first, *b.first);
  }
  return false;
}

bool equal(const CmdPtr &a, const CmdPtr &b) {
  if (!a || !b) return a == b;
  return equal(*a, *b);
}

bool equal(const Program &a, const Program &b) {
  if (a.size() != b.size()) return false;
  for (auto ia = a.begin(), ib = b.begin(); ia != a.end(); ++ia, ++ib) {
    if (ia->first != ib->first || !equal(ia->second, ib->second)) return false;
  }
  return true;
}

namespace {

void collect(const Expr &e, std::set<std::string> &out) {
  if (e.kind == Expr::Kind::Var) {
    out.insert(e.name);
    return;
  }
  for (const auto &a : e.args) collect(*a, out);
}

void collect(const Cmd &c, std::set<std::string> &out) {
  switch (c.kind) {
    case Cmd::Kind::Skip:
      break;
    case Cmd::Kind::Assign:
      out.insert(c.var);
      collect(*c.expr, out);
      break;
    case Cmd::Kind::Seq:
      collect(*c.first, out);
      collect(*c.second, out);
      break;
    case Cmd::Kind::If:
      collect(*c.expr, out);
      collect(*c.first, out);
      collect(*c.second, out);
      break;
    case Cmd::Kind::While:
      collect(*c.expr, out);
      collect(*c.first, out);
      break;
  }
}

void collect_guards(const Cmd &c, std::set<std::string> &out) {
  switch (c.kind) {
    case Cmd::Kind::Skip:
    case Cmd::Kind::Assign:
      break;
    case Cmd::Kind::Seq:
    case Cmd::Kind::If:
      collect_guards(*c.first, out);
      collect_guards(*c.second, out);
      break;
    case Cmd::Kind::While:
      collect(*c.expr, out);
      collect_guards(*c.first, out);
      break;
  }
}

}  // namespace

std::set<std::string> free_vars(const Expr &e) {
  std::set<std::string> out;
  collect(e, out);
  return out;
}

std::set<std::string> free_vars(const Cmd &c) {
  std::set<std::string> out;
  collect(c, out);
  return out;
}

std::set<std::string> free_vars(const Program &m) {
  std::set<std::string> out;
  for (const auto &[_, c] : m) collect(*c, out);
  return out;
}

std::set<std::string> guard_vars(const Cmd &c) {
  std::set<std::string> out;
  collect_guards(c, out);
  return out;
}

std::size_t count_while(const Cmd &c) {
  switch (c.kind) {
    case Cmd::Kind::Skip:
    case Cmd::Kind::Assign:
      return 0;
    case Cmd::Kind::Seq:
    case Cmd::Kind::If:
      return count_while(*c.first) + count_while(*c.second);
    case Cmd::Kind::While:
      return 1 + count_while(*c.first);
  }
  return 0;
}

}  // namespace tierflow
