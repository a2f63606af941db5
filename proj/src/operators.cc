#include "tierflow/operators.h"

#include <algorithm>
#include <random>

namespace tierflow {

std::string to_string(const OperatorClass &cls) {
  switch (cls.kind) {
    case OperatorClass::Kind::Predicate:
      return "predicate";
    case OperatorClass::Kind::Subword:
      return "subword";
    case OperatorClass::Kind::Positive:
      return "positive " + std::to_string(cls.constant);
  }
  return "?";
}

const OperatorDef &Registry::add(OperatorDef def) {
  if (ops_.contains(def.name)) throw DuplicateOperator("duplicate operator: " + def.name);
  auto name = def.name;
  return ops_.emplace(std::move(name), std::move(def)).first->second;
}

const OperatorDef *Registry::find(std::string_view name) const {
  auto it = ops_.find(name);
  return it == ops_.end() ? nullptr : &it->second;
}

const OperatorDef &Registry::at(std::string_view name) const {
  const OperatorDef *def = find(name);
  if (!def) throw UnknownOperator("unknown operator: " + std::string(name));
  return *def;
}

Word Registry::apply(std::string_view name, std::span<const Word> args) const {
  const OperatorDef &def = at(name);
  if (args.size() != def.arity) {
    throw RuntimeError("operator " + def.name + " expects " + std::to_string(def.arity) +
                       " arguments, got " + std::to_string(args.size()));
  }
  return def.fn(args);
}

std::vector<std::string> Registry::names() const {
  std::vector<std::string> out;
  for (const auto &[k, _] : ops_) out.push_back(k);
  return out;
}

bool bit_value(const Word &w) {
  return w.is_tt() || (!w.empty() && w.str().front() == '1');
}

namespace {

Word drop_first(const Word &w) { return w.empty() ? Word() : Word(w.str().substr(1)); }

Word first_letter(const Word &w) { return w.empty() ? Word() : Word(w.str().substr(0, 1)); }

// LSB-first binary words; letters other than '1' count as 0.
Word binary_decrement(const Word &w) {
  std::string s = w.str();
  std::size_t i = 0;
  while (i < s.size() && s[i] != '1') ++i;
  if (i == s.size()) return w;  // zero stays zero
  for (std::size_t j = 0; j < i; ++j) s[j] = '1';
  s[i] = '0';
  return Word(s);
}

Word binary_increment(const Word &w) {
  std::string s = w.str();
  for (char &c : s) {
    if (c == '1') {
      c = '0';
    } else {
      c = '1';
      return Word(s);
    }
  }
  return Word(s + '1');
}

OperatorDef make(std::string name, std::size_t arity, OperatorClass cls, OperatorFn fn) {
  return OperatorDef{std::move(name), arity, std::move(fn), cls};
}

OperatorDef constant(std::string name, Word value) {
  OperatorClass cls = value.is_bool() ? OperatorClass::predicate()
                      : value.empty() ? OperatorClass::subword()
                                      : OperatorClass::positive(value.size());
  return make(std::move(name), 0, cls, [value](std::span<const Word>) { return value; });
}

std::optional<Word> parse_quoted(std::string_view s) {
  if (s.size() < 2 || s.front() != '"' || s.back() != '"') return std::nullopt;
  std::string_view body = s.substr(1, s.size() - 2);
  if (body.find('"') != std::string_view::npos) return std::nullopt;
  return Word(std::string(body));
}

// Matches `family["d"]`.
std::optional<Word> family_param(std::string_view name, std::string_view family) {
  if (name.size() < family.size() + 4 || name.substr(0, family.size()) != family) {
    return std::nullopt;
  }
  std::string_view rest = name.substr(family.size());
  if (rest.front() != '[' || rest.back() != ']') return std::nullopt;
  return parse_quoted(rest.substr(1, rest.size() - 2));
}

}  // namespace

std::string literal_name(const Word &w) { return "\"" + w.str() + "\""; }
std::string eq_name(const Word &d) { return "eq[" + literal_name(d) + "]"; }
std::string suc_name(const Word &d) { return "suc[" + literal_name(d) + "]"; }

std::vector<OperatorDef> builtins() {
  using A = std::span<const Word>;
  std::vector<OperatorDef> out;
  out.push_back(make("pred", 1, OperatorClass::subword(), [](A a) { return drop_first(a[0]); }));
  // Unary arithmetic over repetitions of "1".
  out.push_back(make("dec", 1, OperatorClass::subword(), [](A a) { return drop_first(a[0]); }));
  out.push_back(make("inc", 1, OperatorClass::positive(1),
                     [](A a) { return Word("1" + a[0].str()); }));
  out.push_back(make("gt0", 1, OperatorClass::predicate(),
                     [](A a) { return Word::boolean(!a[0].empty()); }));
  out.push_back(make("not", 1, OperatorClass::predicate(),
                     [](A a) { return Word::boolean(!a[0].is_tt()); }));
  out.push_back(make("is_empty", 1, OperatorClass::predicate(),
                     [](A a) { return Word::boolean(a[0].empty()); }));
  out.push_back(make("equal", 2, OperatorClass::predicate(),
                     [](A a) { return Word::boolean(a[0] == a[1]); }));
  out.push_back(make("head", 1, OperatorClass::subword(), [](A a) { return first_letter(a[0]); }));
  out.push_back(make("bit", 1, OperatorClass::predicate(),
                     [](A a) { return Word::boolean(bit_value(a[0])); }));
  out.push_back(make("result", 3, OperatorClass::predicate(), [](A a) {
    return Word::boolean(bit_value(a[0]) ^ bit_value(a[1]) ^ bit_value(a[2]));
  }));
  out.push_back(make("carry", 3, OperatorClass::predicate(), [](A a) {
    int n = bit_value(a[0]) + bit_value(a[1]) + bit_value(a[2]);
    return Word::boolean(n >= 2);
  }));
  out.push_back(make("concat", 2, OperatorClass::positive(1), [](A a) {
    if (a[0].is_tt()) return Word("1" + a[1].str());
    if (a[0].is_ff()) return Word("0" + a[1].str());
    return Word(first_letter(a[0]).str() + a[1].str());
  }));
  // Binary arithmetic on LSB-first words.
  out.push_back(make("bnz", 1, OperatorClass::predicate(), [](A a) {
    return Word::boolean(a[0].str().find('1') != std::string::npos);
  }));
  out.push_back(make("bdec", 1, OperatorClass::positive(0),
                     [](A a) { return binary_decrement(a[0]); }));
  out.push_back(make("binc", 1, OperatorClass::positive(1),
                     [](A a) { return binary_increment(a[0]); }));
  out.push_back(constant("tt", Word::tt()));
  out.push_back(constant("ff", Word::ff()));
  return out;
}

std::optional<OperatorDef> builtin(std::string_view name) {
  using A = std::span<const Word>;
  for (auto &def : builtins()) {
    if (def.name == name) return std::move(def);
  }
  if (auto w = parse_quoted(name)) return constant(std::string(name), *w);
  if (auto d = family_param(name, "eq")) {
    return make(std::string(name), 1, OperatorClass::predicate(), [d = *d](A a) {
      return Word::boolean(a[0].str().starts_with(d.str()));
    });
  }
  if (auto d = family_param(name, "suc")) {
    return make(std::string(name), 1, OperatorClass::positive(d->size()),
                [d = *d](A a) { return Word(d.str() + a[0].str()); });
  }
  return std::nullopt;
}

std::string to_string(const Signature &sig) {
  std::string out;
  for (Tier t : sig.args) out += std::to_string(to_int(t)) + "->";
  return out + std::to_string(to_int(sig.result));
}

std::vector<Signature> safe_signatures(std::size_t arity, const OperatorClass &cls) {
  std::vector<Signature> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << arity); ++mask) {
    Signature sig;
    Tier all = Tier::One;
    for (std::size_t i = 0; i < arity; ++i) {
      sig.args.push_back(tier_of((mask >> (arity - 1 - i)) & 1));
      all = meet(all, sig.args.back());
    }
    for (Tier result : kTiers) {
      if (!leq(result, all)) continue;
      if (!cls.neutral() && result == Tier::One) continue;
      sig.result = result;
      out.push_back(sig);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Word> validation_domain(const Alphabet &alphabet, std::size_t max_len) {
  std::vector<Word> out{Word()};
  std::vector<std::string> layer{""};
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::string> next;
    for (const auto &prefix : layer) {
      for (char c : alphabet.letters()) next.push_back(prefix + c);
    }
    for (const auto &s : next) out.emplace_back(s);
    layer = std::move(next);
  }
  out.push_back(Word::tt());
  out.push_back(Word::ff());
  return out;
}

namespace {

// Empty string if the axiom holds on this tuple, else the reason.
std::string check_axiom(const OperatorClass &cls, std::span<const Word> args, const Word &out) {
  switch (cls.kind) {
    case OperatorClass::Kind::Predicate:
      return out.is_bool() ? "" : "output is not tt/ff";
    case OperatorClass::Kind::Subword: {
      bool found = std::any_of(args.begin(), args.end(),
                               [&](const Word &a) { return subword(out, a); });
      // A nullary subword operator must return ε, the only word below no input.
      if (args.empty()) found = out.empty();
      return found ? "" : "output is not a subword of any argument";
    }
    case OperatorClass::Kind::Positive: {
      std::size_t max_in = 0;
      for (const auto &a : args) max_in = std::max(max_in, a.size());
      return out.size() <= max_in + cls.constant ? "" : "output exceeds max input size + c";
    }
  }
  return "unknown class";
}

}  // namespace

ValidationVerdict validate_class(const OperatorDef &def, std::size_t max_len,
                                 const Alphabet &alphabet, const ValidationOptions &options) {
  if (max_len < 1) throw std::invalid_argument("validate_class: max_len must be >= 1");
  const std::vector<Word> domain = validation_domain(alphabet, max_len);
  ValidationVerdict verdict;

  // Size of the tuple space, saturating at cap + 1.
  std::size_t space = 1;
  for (std::size_t i = 0; i < def.arity && space <= options.cap; ++i) space *= domain.size();
  verdict.exhaustive = space <= options.cap;
  const std::size_t total = verdict.exhaustive ? space : options.cap;

  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> idx(def.arity, 0);
  std::vector<Word> args(def.arity);
  for (std::size_t n = 0; n < total; ++n) {
    if (verdict.exhaustive) {
      // Odometer over idx, first argument slowest.
      if (n > 0) {
        for (std::size_t i = def.arity; i-- > 0;) {
          if (++idx[i] < domain.size()) break;
          idx[i] = 0;
        }
      }
    } else {
      for (auto &i : idx) i = rng() % domain.size();
    }
    for (std::size_t i = 0; i < def.arity; ++i) args[i] = domain[idx[i]];
    Word out = def.fn(args);
    ++verdict.tested;
    std::string reason = check_axiom(def.cls, args, out);
    if (!reason.empty()) {
      verdict.ok = false;
      verdict.counterexample = args;
      verdict.output = std::move(out);
      verdict.reason = std::move(reason);
      return verdict;
    }
  }
  return verdict;
}

}  // namespace tierflow
