#pragma once

// Operator registry with the neutral / positive classification and bounded
// validators for the classification axioms.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tierflow/core.h"

namespace tierflow {

/// Declared class of an operator. Predicate and Subword are the two neutral
/// classes; Positive carries the size constant c.
struct OperatorClass {
  enum class Kind : std::uint8_t { Predicate, Subword, Positive };
  Kind kind = Kind::Subword;
  std::size_t constant = 0;

  static OperatorClass predicate() { return {Kind::Predicate, 0}; }
  static OperatorClass subword() { return {Kind::Subword, 0}; }
  static OperatorClass positive(std::size_t c) { return {Kind::Positive, c}; }

  bool neutral() const { return kind != Kind::Positive; }
  /// The c in |op(d)| <= max|d_i| + c. Neutral operators satisfy it with 0.
  std::size_t size_constant() const { return neutral() ? 0 : constant; }

  friend bool operator==(const OperatorClass &, const OperatorClass &) = default;
};

std::string to_string(const OperatorClass &cls);

using OperatorFn = std::function<Word(std::span<const Word>)>;

struct OperatorDef {
  std::string name;
  std::size_t arity = 0;
  OperatorFn fn;
  OperatorClass cls;
};

class DuplicateOperator : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownOperator : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Name → operator. Immutable once handed to evaluators and checkers.
class Registry {
 public:
  /// Throws DuplicateOperator if the name is taken.
  const OperatorDef &add(OperatorDef def);

  const OperatorDef *find(std::string_view name) const;
  /// Throws UnknownOperator.
  const OperatorDef &at(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  Word apply(std::string_view name, std::span<const Word> args) const;

  std::vector<std::string> names() const;

 private:
  std::map<std::string, OperatorDef, std::less<>> ops_;
};

/// The fixed builtin library (parametric families excluded).
std::vector<OperatorDef> builtins();

/// Resolves a canonical operator name to a builtin: fixed builtins, the
/// families `eq["d"]` (prefix test) and `suc["d"]` (prefix d), the constants
/// `tt`/`ff`, and word literals `"w"`.
std::optional<OperatorDef> builtin(std::string_view name);

/// Canonical names for the parametric families.
std::string eq_name(const Word &d);
std::string suc_name(const Word &d);
std::string literal_name(const Word &w);

struct ValidationOptions {
  /// Exhaustive when the tuple space is at most this large, sampled otherwise.
  std::size_t cap = 200000;
  std::uint64_t seed = 0;
};

struct ValidationVerdict {
  bool ok = true;
  bool exhaustive = true;
  std::size_t tested = 0;
  std::vector<Word> counterexample;
  Word output;
  std::string reason;
};

/// All words over `alphabet` of length <= max_len, shortest first, then the
/// words tt and ff.
std::vector<Word> validation_domain(const Alphabet &alphabet, std::size_t max_len);

/// Checks the declared class axiom of `def` over all argument tuples drawn
/// from validation_domain (or a seeded sample above the cap). Returns the
/// first violating tuple.
ValidationVerdict validate_class(const OperatorDef &def, std::size_t max_len,
                                 const Alphabet &alphabet = {},
                                 const ValidationOptions &options = {});

/// Operator type α1 → … → αn → α.
struct Signature {
  std::vector<Tier> args;
  Tier result = Tier::Zero;

  friend auto operator<=>(const Signature &, const Signature &) = default;
  friend bool operator==(const Signature &, const Signature &) = default;
};

std::string to_string(const Signature &sig);

/// The operator typing environment Δ: a finite set of types per operator.
using OpTypeEnv = std::map<std::string, std::vector<Signature>>;

/// Every signature of the given arity admitted by a safe environment:
/// α ≼ ∧αi, and α = 0 when the class is positive but not neutral.
std::vector<Signature> safe_signatures(std::size_t arity, const OperatorClass &cls);

/// Bit value of a word: 1 iff it is tt or starts with the letter '1'.
bool bit_value(const Word &w);

}  // namespace tierflow
