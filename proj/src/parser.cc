#include "tierflow/parser.h"

#include <cctype>
#include <map>
#include <set>

namespace tierflow {

ParseError::ParseError(const std::string &message, SourcePos pos)
    : std::runtime_error(to_string(pos) + ": " + message), pos(pos) {}

LoadError::LoadError(const std::string &message, SourcePos pos)
    : std::runtime_error(to_string(pos) + ": " + message), pos(pos) {}

Program SourceFile::program() const {
  Program m;
  for (const auto &t : threads) m.emplace(t.name, t.body);
  return m;
}

VarTypeEnv SourceFile::annotations() const {
  VarTypeEnv gamma;
  for (const auto &v : vars) gamma[v.var] = v.tier;
  return gamma;
}

bool equal(const SourceFile &a, const SourceFile &b) {
  if (a.alphabet != b.alphabet || a.ops.size() != b.ops.size() ||
      a.vars.size() != b.vars.size() || a.threads.size() != b.threads.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.ops.size(); ++i) {
    const auto &x = a.ops[i];
    const auto &y = b.ops[i];
    if (x.name != y.name || x.arity != y.arity || x.cls != y.cls ||
        x.neutral_keyword != y.neutral_keyword || x.sigs != y.sigs) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.vars.size(); ++i) {
    if (a.vars[i].var != b.vars[i].var || a.vars[i].tier != b.vars[i].tier) return false;
  }
  for (std::size_t i = 0; i < a.threads.size(); ++i) {
    if (a.threads[i].name != b.threads[i].name ||
        !equal(a.threads[i].body, b.threads[i].body)) {
      return false;
    }
  }
  return true;
}

namespace {

enum class Tok { Ident, Int, String, Sym, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePos pos;
};

const std::set<std::string> kKeywords = {"alphabet", "op",   "arity", "class", "sig",
                                         "vars",     "thread", "skip", "if",    "else",
                                         "while",    "tt",   "ff"};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    SourcePos pos{line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), pos});
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Int, std::string(src.substr(i, j - i)), pos});
      advance(j - i);
    } else if (c == '"') {
      std::size_t j = i + 1;
      while (j < src.size() && src[j] != '"' && src[j] != '\n') ++j;
      if (j >= src.size() || src[j] != '"') throw ParseError("unterminated string literal", pos);
      out.push_back({Tok::String, std::string(src.substr(i + 1, j - i - 1)), pos});
      advance(j + 1 - i);
    } else if (src.substr(i, 2) == ":=" || src.substr(i, 2) == "->") {
      out.push_back({Tok::Sym, std::string(src.substr(i, 2)), pos});
      advance(2);
    } else if (std::string_view(";,(){}[]:").find(c) != std::string_view::npos) {
      out.push_back({Tok::Sym, std::string(1, c), pos});
      advance(1);
    } else {
      throw ParseError(std::string("unexpected character '") + c + "'", pos);
    }
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

std::string describe(const Token &t) {
  switch (t.kind) {
    case Tok::End:
      return "end of input";
    case Tok::String:
      return "string \"" + t.text + "\"";
    default:
      return "'" + t.text + "'";
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  SourceFile file() {
    SourceFile f;
    std::set<std::string> thread_names;
    while (!at_end()) {
      const Token &t = peek();
      if (is_kw("alphabet")) {
        next();
        if (f.alphabet) throw ParseError("duplicate alphabet declaration", t.pos);
        f.alphabet = expect(Tok::String, "alphabet string").text;
        expect_sym(";");
      } else if (is_kw("op")) {
        f.ops.push_back(op_decl());
      } else if (is_kw("vars")) {
        next();
        do {
          VarAnnotation v;
          v.pos = peek().pos;
          v.var = identifier("variable name");
          expect_sym(":");
          v.tier = tier();
          f.vars.push_back(v);
        } while (accept_sym(","));
        expect_sym(";");
      } else if (is_kw("thread")) {
        next();
        ThreadDecl td;
        td.pos = peek().pos;
        td.name = identifier("thread name");
        if (!thread_names.insert(td.name).second) {
          throw ParseError("duplicate thread '" + td.name + "'", td.pos);
        }
        expect_sym("{");
        td.body = cmds();
        expect_sym("}");
        f.threads.push_back(td);
      } else {
        throw ParseError("expected 'alphabet', 'op', 'vars' or 'thread', found " + describe(t),
                         t.pos);
      }
    }
    check_declarations(f);
    return f;
  }

  ExprPtr whole_expr() {
    ExprPtr e = expr();
    expect_end();
    return e;
  }

  CmdPtr whole_cmd() {
    CmdPtr c = cmds();
    expect_end();
    return c;
  }

 private:
  const Token &peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token &next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool at_end() const { return peek().kind == Tok::End; }
  bool is_kw(std::string_view kw) const { return peek().kind == Tok::Ident && peek().text == kw; }
  bool is_sym(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Sym && peek(k).text == s;
  }

  void expect_end() {
    if (!at_end()) throw ParseError("unexpected " + describe(peek()), peek().pos);
  }

  bool accept_sym(std::string_view s) {
    if (!is_sym(s)) return false;
    next();
    return true;
  }

  void expect_sym(std::string_view s) {
    if (!accept_sym(s)) {
      throw ParseError("expected '" + std::string(s) + "', found " + describe(peek()), peek().pos);
    }
  }

  void expect_kw(std::string_view kw) {
    if (!is_kw(kw)) {
      throw ParseError("expected '" + std::string(kw) + "', found " + describe(peek()), peek().pos);
    }
    next();
  }

  const Token &expect(Tok kind, std::string_view what) {
    if (peek().kind != kind) {
      throw ParseError("expected " + std::string(what) + ", found " + describe(peek()), peek().pos);
    }
    return next();
  }

  std::string identifier(std::string_view what) {
    const Token &t = expect(Tok::Ident, what);
    if (kKeywords.contains(t.text)) {
      throw ParseError("expected " + std::string(what) + ", found keyword '" + t.text + "'", t.pos);
    }
    return t.text;
  }

  std::size_t integer() {
    const Token &t = expect(Tok::Int, "integer");
    return std::stoul(t.text);
  }

  Tier tier() {
    const Token &t = expect(Tok::Int, "tier 0 or 1");
    if (t.text != "0" && t.text != "1") throw ParseError("tier must be 0 or 1", t.pos);
    return tier_of(t.text == "1");
  }

  // IDENT ['[' STRING ']'] | STRING | tt | ff, as a canonical operator name.
  std::string opname() {
    const Token &t = peek();
    if (t.kind == Tok::String) {
      next();
      return literal_name(Word(t.text));
    }
    if (is_kw("tt") || is_kw("ff")) return next().text;
    std::string name = identifier("operator name");
    if (accept_sym("[")) {
      const Token &p = expect(Tok::String, "operator parameter string");
      expect_sym("]");
      name += "[" + literal_name(Word(p.text)) + "]";
    }
    return name;
  }

  OpDecl op_decl() {
    expect_kw("op");
    OpDecl d;
    d.pos = peek().pos;
    d.name = opname();
    expect_kw("arity");
    d.arity = integer();
    expect_kw("class");
    const Token &c = expect(Tok::Ident, "operator class");
    if (c.text == "predicate") {
      d.cls = OperatorClass::predicate();
    } else if (c.text == "subword") {
      d.cls = OperatorClass::subword();
    } else if (c.text == "neutral") {
      d.cls = OperatorClass::subword();
      d.neutral_keyword = true;
    } else if (c.text == "positive") {
      d.cls = OperatorClass::positive(integer());
    } else {
      throw ParseError("unknown operator class '" + c.text + "'", c.pos);
    }
    if (is_kw("sig")) {
      next();
      std::vector<Signature> sigs;
      do {
        SourcePos at = peek().pos;
        std::vector<Tier> tiers{tier()};
        while (accept_sym("->")) tiers.push_back(tier());
        if (tiers.size() != d.arity + 1) {
          throw ParseError("signature has " + std::to_string(tiers.size() - 1) +
                               " argument tiers, operator arity is " + std::to_string(d.arity),
                           at);
        }
        Signature s;
        s.result = tiers.back();
        tiers.pop_back();
        s.args = std::move(tiers);
        sigs.push_back(s);
      } while (accept_sym(","));
      d.sigs = std::move(sigs);
    }
    expect_sym(";");
    return d;
  }

  CmdPtr cmds() {
    std::vector<CmdPtr> parts{stmt()};
    while (accept_sym(";")) {
      if (is_sym("}") || at_end()) break;
      parts.push_back(stmt());
    }
    return seq_all(parts);
  }

  CmdPtr block() {
    expect_sym("{");
    CmdPtr c = cmds();
    expect_sym("}");
    return c;
  }

  CmdPtr stmt() {
    const Token &t = peek();
    SourcePos pos = t.pos;
    if (is_kw("skip")) {
      next();
      return skip(pos);
    }
    if (is_sym("{")) return block();
    if (is_kw("if")) {
      next();
      expect_sym("(");
      ExprPtr g = expr();
      expect_sym(")");
      CmdPtr a = block();
      expect_kw("else");
      CmdPtr b = block();
      return if_(g, a, b, pos);
    }
    if (is_kw("while")) {
      next();
      expect_sym("(");
      ExprPtr g = expr();
      expect_sym(")");
      return while_(g, block(), pos);
    }
    if (t.kind == Tok::Ident && !kKeywords.contains(t.text)) {
      std::string v = next().text;
      expect_sym(":=");
      return assign(v, expr(), pos);
    }
    throw ParseError("expected a command, found " + describe(t), pos);
  }

  ExprPtr expr() {
    const Token &t = peek();
    SourcePos pos = t.pos;
    if (t.kind == Tok::String || is_kw("tt") || is_kw("ff")) return op(opname(), {}, pos);
    if (t.kind != Tok::Ident || kKeywords.contains(t.text)) {
      throw ParseError("expected an expression, found " + describe(t), pos);
    }
    if (!is_sym("(", 1) && !is_sym("[", 1)) return var(next().text, pos);
    std::string name = opname();
    expect_sym("(");
    std::vector<ExprPtr> args;
    if (!is_sym(")")) {
      do {
        args.push_back(expr());
      } while (accept_sym(","));
    }
    expect_sym(")");
    return op(name, std::move(args), pos);
  }

  void check_expr(const Expr &e, const std::map<std::string, std::size_t> &declared) {
    if (e.kind == Expr::Kind::Var) return;
    auto it = declared.find(e.name);
    bool literal = e.args.empty() && (e.name.front() == '"' || e.name == "tt" || e.name == "ff");
    if (it == declared.end() && !literal) {
      throw ParseError("undeclared operator '" + e.name + "'", e.pos);
    }
    std::size_t arity = it == declared.end() ? 0 : it->second;
    if (arity != e.args.size()) {
      throw ParseError("operator '" + e.name + "' has arity " + std::to_string(arity) + " but is applied to " +
                           std::to_string(e.args.size()) + " arguments",
                       e.pos);
    }
    for (const auto &a : e.args) check_expr(*a, declared);
  }

  void check_cmd(const Cmd &c, const std::map<std::string, std::size_t> &declared) {
    switch (c.kind) {
      case Cmd::Kind::Skip:
        return;
      case Cmd::Kind::Assign:
        check_expr(*c.expr, declared);
        return;
      case Cmd::Kind::Seq:
        check_cmd(*c.first, declared);
        check_cmd(*c.second, declared);
        return;
      case Cmd::Kind::If:
        check_expr(*c.expr, declared);
        check_cmd(*c.first, declared);
        check_cmd(*c.second, declared);
        return;
      case Cmd::Kind::While:
        check_expr(*c.expr, declared);
        check_cmd(*c.first, declared);
        return;
    }
  }

  void check_declarations(const SourceFile &f) {
    std::map<std::string, std::size_t> declared;
    for (const auto &d : f.ops) {
      if (!declared.emplace(d.name, d.arity).second) {
        throw ParseError("operator '" + d.name + "' declared twice", d.pos);
      }
    }
    std::map<std::string, Tier> seen;
    for (const auto &v : f.vars) {
      auto [it, fresh] = seen.emplace(v.var, v.tier);
      if (!fresh && it->second != v.tier) {
        throw ParseError("variable '" + v.var + "' annotated with two tiers", v.pos);
      }
    }
    for (const auto &t : f.threads) check_cmd(*t.body, declared);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

// Operator names are stored canonically; literal and family names already
// carry their quoting.
std::string pretty_seq_left(const Cmd &c);

void pretty_cmd(const Cmd &c, std::string &out) {
  switch (c.kind) {
    case Cmd::Kind::Skip:
      out += "skip";
      return;
    case Cmd::Kind::Assign:
      out += c.var + " := " + pretty(*c.expr);
      return;
    case Cmd::Kind::Seq:
      out += pretty_seq_left(*c.first);
      out += "; ";
      pretty_cmd(*c.second, out);
      return;
    case Cmd::Kind::If:
      out += "if (" + pretty(*c.expr) + ") { ";
      pretty_cmd(*c.first, out);
      out += " } else { ";
      pretty_cmd(*c.second, out);
      out += " }";
      return;
    case Cmd::Kind::While:
      out += "while (" + pretty(*c.expr) + ") { ";
      pretty_cmd(*c.first, out);
      out += " }";
      return;
  }
}

std::string pretty_seq_left(const Cmd &c) {
  std::string inner;
  pretty_cmd(c, inner);
  return c.kind == Cmd::Kind::Seq ? "{ " + inner + " }" : inner;
}

void indent_to(std::string &out, int depth) { out.append(static_cast<std::size_t>(depth) * 2, ' '); }

void pretty_block(const Cmd &c, int depth, std::string &out);

// One statement per line; a Seq on the left of a Seq is wrapped in braces.
void pretty_stmt(const Cmd &c, int depth, std::string &out) {
  switch (c.kind) {
    case Cmd::Kind::Seq:
      indent_to(out, depth);
      out += "{\n";
      pretty_block(c, depth + 1, out);
      out += "\n";
      indent_to(out, depth);
      out += "}";
      return;
    case Cmd::Kind::If:
      indent_to(out, depth);
      out += "if (" + pretty(*c.expr) + ") {\n";
      pretty_block(*c.first, depth + 1, out);
      out += "\n";
      indent_to(out, depth);
      out += "} else {\n";
      pretty_block(*c.second, depth + 1, out);
      out += "\n";
      indent_to(out, depth);
      out += "}";
      return;
    case Cmd::Kind::While:
      indent_to(out, depth);
      out += "while (" + pretty(*c.expr) + ") {\n";
      pretty_block(*c.first, depth + 1, out);
      out += "\n";
      indent_to(out, depth);
      out += "}";
      return;
    default:
      indent_to(out, depth);
      pretty_cmd(c, out);
  }
}

void pretty_block(const Cmd &c, int depth, std::string &out) {
  const Cmd *cur = &c;
  while (cur->kind == Cmd::Kind::Seq) {
    pretty_stmt(*cur->first, depth, out);
    out += ";\n";
    cur = cur->second.get();
  }
  pretty_stmt(*cur, depth, out);
}

}  // namespace

SourceFile parse(std::string_view text) { return Parser(text).file(); }
ExprPtr parse_expr(std::string_view text) { return Parser(text).whole_expr(); }
CmdPtr parse_cmd(std::string_view text) { return Parser(text).whole_cmd(); }

std::string pretty(const Expr &e) {
  if (e.kind == Expr::Kind::Var) return e.name;
  if (e.args.empty() && (e.name.front() == '"' || e.name == "tt" || e.name == "ff")) return e.name;
  std::string out = e.name + "(";
  for (std::size_t i = 0; i < e.args.size(); ++i) {
    if (i) out += ", ";
    out += pretty(*e.args[i]);
  }
  return out + ")";
}

std::string pretty(const Cmd &c) {
  std::string out;
  pretty_cmd(c, out);
  return out;
}

std::string pretty(const SourceFile &f) {
  std::string out;
  if (f.alphabet) out += "alphabet \"" + *f.alphabet + "\";\n";
  for (const auto &d : f.ops) {
    out += "op " + d.name + " arity " + std::to_string(d.arity) + " class ";
    out += d.neutral_keyword ? "neutral" : to_string(d.cls);
    if (d.sigs) {
      out += " sig ";
      for (std::size_t i = 0; i < d.sigs->size(); ++i) {
        if (i) out += ", ";
        out += to_string((*d.sigs)[i]);
      }
    }
    out += ";\n";
  }
  if (!f.vars.empty()) {
    out += "vars ";
    for (std::size_t i = 0; i < f.vars.size(); ++i) {
      if (i) out += ", ";
      out += f.vars[i].var + " : " + std::to_string(to_int(f.vars[i].tier));
    }
    out += ";\n";
  }
  for (const auto &t : f.threads) {
    out += "\nthread " + t.name + " {\n";
    pretty_block(*t.body, 1, out);
    out += "\n}\n";
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

void collect_literals(const Expr &e, std::set<std::string> &out) {
  if (e.kind == Expr::Kind::Op && e.args.empty() &&
      (e.name.front() == '"' || e.name == "tt" || e.name == "ff")) {
    out.insert(e.name);
  }
  for (const auto &a : e.args) collect_literals(*a, out);
}

void collect_literals(const Cmd &c, std::set<std::string> &out) {
  if (c.expr) collect_literals(*c.expr, out);
  if (c.first) collect_literals(*c.first, out);
  if (c.second) collect_literals(*c.second, out);
}

}  // namespace

Environment load(const SourceFile &f) {
  Environment env;
  try {
    env.alphabet = f.alphabet ? Alphabet(*f.alphabet) : Alphabet();
  } catch (const std::invalid_argument &e) {
    throw LoadError(e.what(), {});
  }
  for (const auto &d : f.ops) {
    std::optional<OperatorDef> def = builtin(d.name);
    if (!def) throw LoadError("no builtin operator named '" + d.name + "'", d.pos);
    if (def->arity != d.arity) {
      throw LoadError("operator '" + d.name + "' has arity " + std::to_string(def->arity) +
                          ", declared " + std::to_string(d.arity),
                      d.pos);
    }
    if (d.neutral_keyword) {
      // `neutral` picks the builtin's own neutral class, or subword when the
      // builtin is positive (validation will then report the mismatch).
      def->cls = def->cls.neutral() ? def->cls : OperatorClass::subword();
    } else {
      def->cls = d.cls;
    }
    env.delta[d.name] = d.sigs ? *d.sigs : safe_signatures(d.arity, def->cls);
    std::sort(env.delta[d.name].begin(), env.delta[d.name].end());
    env.registry.add(std::move(*def));
  }
  std::set<std::string> literals;
  for (const auto &t : f.threads) collect_literals(*t.body, literals);
  for (const auto &name : literals) {
    if (env.registry.contains(name)) continue;
    OperatorDef def = *builtin(name);
    env.delta[name] = safe_signatures(0, def.cls);
    env.registry.add(std::move(def));
  }
  for (const auto &name : literals) {
    if (name.front() != '"') continue;
    Word w(name.substr(1, name.size() - 2));
    if (!env.alphabet.admits(w)) {
      throw LoadError("literal " + name + " uses letters outside the alphabet", {});
    }
  }
  env.annotations = f.annotations();
  env.program = f.program();
  return env;
}

Environment load_text(std::string_view text) { return load(parse(text)); }

}  // namespace tierflow
