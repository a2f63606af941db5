#include <doctest.h>

#include "tierflow/operators.h"

using namespace tierflow;

namespace {

Word call(const std::string &name, std::vector<Word> args) {
  Registry r;
  r.add(*builtin(name));
  return r.apply(name, args);
}

}  // namespace

TEST_CASE("builtin semantics") {
  CHECK(call("pred", {Word("abc")}) == Word("bc"));
  CHECK(call("pred", {Word("")}) == Word(""));
  CHECK(call("inc", {Word("11")}) == Word("111"));
  CHECK(call("gt0", {Word("")}) == Word::ff());
  CHECK(call("not", {Word::tt()}) == Word::ff());
  CHECK(call("is_empty", {Word("")}) == Word::tt());
  CHECK(call("head", {Word("ba")}) == Word("b"));
  CHECK(call("bit", {Word("10")}) == Word::tt());
  CHECK(call("bit", {Word("01")}) == Word::ff());
  CHECK(call("concat", {Word::tt(), Word("0")}) == Word("10"));
  CHECK(call("concat", {Word("ab"), Word("b")}) == Word("ab"));
  CHECK(call(eq_name(Word("ab")), {Word("abba")}) == Word::tt());
  CHECK(call(suc_name(Word("a")), {Word("b")}) == Word("ab"));
  CHECK(call(literal_name(Word("01")), {}) == Word("01"));
}

TEST_CASE("binary operators agree with integer arithmetic on LSB-first words") {
  auto encode = [](unsigned v, std::size_t width) {
    std::string s;
    for (std::size_t i = 0; i < width; ++i) s.push_back((v >> i) & 1 ? '1' : '0');
    return Word(s);
  };
  auto decode = [](const Word &w) {
    unsigned v = 0;
    for (std::size_t i = 0; i < w.size(); ++i) v |= (w.str()[i] == '1' ? 1u : 0u) << i;
    return v;
  };
  for (unsigned v = 0; v < 64; ++v) {
    Word w = encode(v, 6);
    CHECK(decode(call("binc", {w})) == v + 1);
    CHECK(decode(call("bdec", {w})) == (v == 0 ? 0 : v - 1));
    CHECK(call("bnz", {w}).is_tt() == (v != 0));
  }
  for (unsigned a = 0; a < 2; ++a) {
    for (unsigned b = 0; b < 2; ++b) {
      for (unsigned c = 0; c < 2; ++c) {
        std::vector<Word> bits{Word::boolean(a), Word::boolean(b), Word::boolean(c)};
        CHECK(call("result", bits).is_tt() == (((a + b + c) & 1) == 1));
        CHECK(call("carry", bits).is_tt() == (a + b + c >= 2));
      }
    }
  }
}

TEST_CASE("every builtin satisfies its declared class") {
  for (const auto &def : builtins()) {
    CAPTURE(def.name);
    auto v = validate_class(def, 4);
    CHECK(v.ok);
    CHECK(v.exhaustive);
  }
  for (const char *name : {"eq[\"01\"]", "suc[\"10\"]", "\"0\"", "\"\""}) {
    CAPTURE(name);
    CHECK(validate_class(*builtin(name), 4).ok);
  }
}

TEST_CASE("misdeclared classes are caught with a witness") {
  OperatorDef inc = *builtin("inc");
  inc.cls = OperatorClass::subword();
  auto v = validate_class(inc, 2);
  CHECK_FALSE(v.ok);
  REQUIRE(v.counterexample.size() == 1);
  CHECK_FALSE(subword(v.output, v.counterexample[0]));

  // Binary predecessor does not return a subword: "01" (two) becomes "11".
  OperatorDef bdec = *builtin("bdec");
  bdec.cls = OperatorClass::subword();
  CHECK_FALSE(validate_class(bdec, 3).ok);

  OperatorDef concat = *builtin("concat");
  concat.cls = OperatorClass::positive(0);
  CHECK_FALSE(validate_class(concat, 2).ok);
}

TEST_CASE("validation samples above the cap") {
  ValidationOptions o;
  o.cap = 50;
  auto v = validate_class(*builtin("carry"), 3, Alphabet(), o);
  CHECK_FALSE(v.exhaustive);
  CHECK(v.tested == 50);
  CHECK(v.ok);
  CHECK_THROWS_AS(validate_class(*builtin("pred"), 0), std::invalid_argument);
}

TEST_CASE("validation domain") {
  auto d = validation_domain(Alphabet("ab"), 2);
  CHECK(d.size() == 1 + 2 + 4 + 2);
  CHECK(d.front().empty());
  CHECK(d.back() == Word::ff());
}

TEST_CASE("registry") {
  Registry r;
  r.add(*builtin("pred"));
  CHECK_THROWS_AS(r.add(*builtin("pred")), DuplicateOperator);
  CHECK_THROWS_AS(r.at("nope"), UnknownOperator);
  std::vector<Word> two{Word("a"), Word("b")};
  CHECK_THROWS_AS(r.apply("pred", two), RuntimeError);
  CHECK_FALSE(builtin("frobnicate").has_value());
}

TEST_CASE("safe signature sets") {
  auto pred = safe_signatures(1, OperatorClass::subword());
  CHECK(pred.size() == 3);  // 0->0, 1->0, 1->1
  auto suc = safe_signatures(1, OperatorClass::positive(1));
  CHECK(suc == std::vector<Signature>{{{Tier::Zero}, Tier::Zero}, {{Tier::One}, Tier::Zero}});
  for (std::size_t arity = 0; arity <= 3; ++arity) {
    for (const auto &s : safe_signatures(arity, OperatorClass::predicate())) {
      Tier all = Tier::One;
      for (Tier a : s.args) all = meet(all, a);
      CHECK(leq(s.result, all));
    }
  }
  CHECK(to_string(Signature{{Tier::One, Tier::Zero}, Tier::Zero}) == "1->0->0");
}
