#pragma once

// Shared vocabulary: words, stores, tiers and the while-language AST.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace tierflow {

/// A finite sequence of letters. tt and ff are the one-letter words "T" and
/// "F"; those two letters are reserved and always part of the alphabet.
class Word {
 public:
  Word() = default;
  explicit Word(std::string letters) : letters_(std::move(letters)) {}
  explicit Word(const char *letters) : letters_(letters) {}

  static Word tt() { return Word("T"); }
  static Word ff() { return Word("F"); }
  static Word boolean(bool b) { return b ? tt() : ff(); }

  const std::string &str() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  bool is_tt() const { return letters_ == "T"; }
  bool is_ff() const { return letters_ == "F"; }
  bool is_bool() const { return is_tt() || is_ff(); }

  friend auto operator<=>(const Word &, const Word &) = default;
  friend bool operator==(const Word &, const Word &) = default;

 private:
  std::string letters_;
};

inline constexpr char kTrueLetter = 'T';
inline constexpr char kFalseLetter = 'F';

/// The letters a run may use, excluding the reserved T/F letters.
class Alphabet {
 public:
  Alphabet() : letters_("01") {}
  explicit Alphabet(std::string_view letters);

  const std::string &letters() const { return letters_; }
  /// Letters plus the reserved T and F.
  std::string all_letters() const;
  bool admits(const Word &w) const;

 private:
  std::string letters_;
};

/// v ⊑ w iff v is a contiguous factor of w.
bool subword(const Word &v, const Word &w);

/// Unary encoding: n repetitions of the letter "1".
Word unary(std::size_t n);

// ---------------------------------------------------------------------------
// Tiers

enum class Tier : std::uint8_t { Zero = 0, One = 1 };

constexpr Tier join(Tier a, Tier b) {
  return (a == Tier::One || b == Tier::One) ? Tier::One : Tier::Zero;
}
constexpr Tier meet(Tier a, Tier b) {
  return (a == Tier::One && b == Tier::One) ? Tier::One : Tier::Zero;
}
/// a ≼ b
constexpr bool leq(Tier a, Tier b) { return a == Tier::Zero || b == Tier::One; }
constexpr int to_int(Tier t) { return t == Tier::One ? 1 : 0; }
constexpr Tier tier_of(int v) { return v ? Tier::One : Tier::Zero; }
inline constexpr Tier kTiers[] = {Tier::Zero, Tier::One};

/// A subset of {0, 1}.
class TierSet {
 public:
  constexpr TierSet() = default;
  static constexpr TierSet both() { return TierSet(3); }
  static constexpr TierSet only(Tier t) { return TierSet(t == Tier::One ? 2 : 1); }

  constexpr bool contains(Tier t) const { return bits_ & (t == Tier::One ? 2 : 1); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr void insert(Tier t) { bits_ |= (t == Tier::One ? 2 : 1); }
  constexpr TierSet intersect(TierSet o) const { return TierSet(bits_ & o.bits_); }
  /// Largest member; precondition: not empty.
  constexpr Tier max() const { return contains(Tier::One) ? Tier::One : Tier::Zero; }
  constexpr Tier min() const { return contains(Tier::Zero) ? Tier::Zero : Tier::One; }
  friend constexpr bool operator==(TierSet, TierSet) = default;

 private:
  constexpr explicit TierSet(std::uint8_t bits) : bits_(bits) {}
  std::uint8_t bits_ = 0;
};

std::string to_string(TierSet s);

/// The variable typing environment Γ.
using VarTypeEnv = std::map<std::string, Tier>;

// ---------------------------------------------------------------------------
// Stores

/// Finite map from variable names to words; unbound variables read as ε.
class Store {
 public:
  Store() = default;
  Store(std::initializer_list<std::pair<const std::string, Word>> init);

  Word get(const std::string &var) const;
  /// Functional update.
  Store set(const std::string &var, Word value) const;
  void assign(const std::string &var, Word value);
  const std::map<std::string, Word> &bindings() const { return bindings_; }

  /// Equality as mappings where unbound means ε.
  friend bool operator==(const Store &a, const Store &b);
  friend std::strong_ordering operator<=>(const Store &a, const Store &b);

  std::size_t hash() const;

 private:
  // Invariant: no binding maps to ε, so structural equality is extensional.
  std::map<std::string, Word> bindings_;
};

// ---------------------------------------------------------------------------
// AST

struct SourcePos {
  int line = 0;
  int column = 0;
};

std::string to_string(const SourcePos &pos);

struct Expr;
struct Cmd;
using ExprPtr = std::shared_ptr<const Expr>;
using CmdPtr = std::shared_ptr<const Cmd>;

struct Expr {
  enum class Kind : std::uint8_t { Var, Op };
  Kind kind = Kind::Var;
  /// Variable name, or canonical operator name (`pred`, `eq["a"]`, `"11"`, `tt`).
  std::string name;
  std::vector<ExprPtr> args;
  SourcePos pos;
  std::size_t hash = 0;
};

struct Cmd {
  enum class Kind : std::uint8_t { Assign, Seq, Skip, If, While };
  Kind kind = Kind::Skip;
  std::string var;        // Assign
  ExprPtr expr;           // Assign source, If/While guard
  CmdPtr first, second;   // Seq parts, If branches, While body (first)
  SourcePos pos;
  std::size_t hash = 0;
};

ExprPtr var(std::string name, SourcePos pos = {});
ExprPtr op(std::string name, std::vector<ExprPtr> args, SourcePos pos = {});
CmdPtr assign(std::string var, ExprPtr e, SourcePos pos = {});
CmdPtr seq(CmdPtr a, CmdPtr b, SourcePos pos = {});
CmdPtr skip(SourcePos pos = {});
CmdPtr if_(ExprPtr guard, CmdPtr then_branch, CmdPtr else_branch, SourcePos pos = {});
CmdPtr while_(ExprPtr guard, CmdPtr body, SourcePos pos = {});
/// Right-nested sequence of one or more commands.
CmdPtr seq_all(const std::vector<CmdPtr> &cmds);

/// Structural equality; source positions are ignored.
bool equal(const Expr &a, const Expr &b);
bool equal(const Cmd &a, const Cmd &b);
bool equal(const CmdPtr &a, const CmdPtr &b);

/// Thread identifier → command. The empty map is the terminal program.
using Program = std::map<std::string, CmdPtr>;

bool equal(const Program &a, const Program &b);

std::set<std::string> free_vars(const Expr &e);
std::set<std::string> free_vars(const Cmd &c);
std::set<std::string> free_vars(const Program &m);

/// Variables read inside while guards (used to pick inference phases).
std::set<std::string> guard_vars(const Cmd &c);

/// Number of While nodes.
std::size_t count_while(const Cmd &c);

/// Thrown when a configuration has no applicable rule or a caller violates a
/// precondition that the language semantics leaves undefined.
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tierflow
