#pragma once

// The tier type system: expression and command rules, safety of the
// operator environment, whole-program checking and tier inference.

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "tierflow/core.h"
#include "tierflow/operators.h"
#include "tierflow/parser.h"

namespace tierflow {

/// Unbound variable or untyped operator met while typing.
class TypingError : public std::runtime_error {
 public:
  TypingError(const std::string &message, SourcePos pos);
  SourcePos pos;
};

/// One node of a derivation tree. `rule` is the name of the rule applied
/// (Var, Op, Assign, Seq, Skip, If, While).
struct Derivation {
  std::string rule;
  Tier tier = Tier::Zero;
  const Expr *expr = nullptr;
  const Cmd *cmd = nullptr;
  std::optional<Signature> sig;  // Op nodes
  std::vector<Derivation> premises;
};

struct ExprTyping {
  TierSet tiers;
  /// One witness per admissible tier.
  std::map<Tier, Derivation> witnesses;
};

struct CmdTyping {
  TierSet tiers;
  std::map<Tier, Derivation> witnesses;
};

ExprTyping type_expr(const VarTypeEnv &gamma, const OpTypeEnv &delta, const Expr &e);
/// An empty tier set means untypable.
CmdTyping type_command(const VarTypeEnv &gamma, const OpTypeEnv &delta, const Cmd &c);

/// Just the admissible tiers, without building witnesses.
TierSet command_tiers(const VarTypeEnv &gamma, const OpTypeEnv &delta, const Cmd &c);

/// Re-checks every rule application in a derivation.
bool verify_derivation(const Derivation &d, const VarTypeEnv &gamma, const OpTypeEnv &delta);

struct DeltaVerdict {
  bool ok = true;
  std::string op;
  std::optional<Signature> signature;
  std::string reason;
};

/// Throws UnknownOperator for operators missing from the registry.
DeltaVerdict check_safe_delta(const OpTypeEnv &delta, const Registry &registry);

struct Diagnostic {
  std::string rule;
  SourcePos pos;
  std::string message;
  std::set<std::string> vars;
  std::string thread;
};

struct TypingVerdict {
  bool safe = false;
  VarTypeEnv gamma;
  std::map<std::string, Derivation> derivations;
  std::map<std::string, Tier> thread_tiers;
  std::vector<Diagnostic> diagnostics;
  /// Variables mentioned by the conflict core, when one was computed.
  std::set<std::string> core_vars;
};

struct CheckOptions {
  /// Max word length for re-validating declared operator classes; 0 skips.
  std::size_t validate_len = 3;
};

/// Precondition: every variable of the program is annotated (missing ones
/// are reported as diagnostics). Safe iff Δ is safe, declared classes
/// survive validation, and every thread types under the shared Γ.
TypingVerdict check_program(const Environment &env, const CheckOptions &options = {});

/// Solves for Γ with annotations as hard constraints. On failure the
/// diagnostics hold a greedily minimized conflict core.
TypingVerdict infer_tiers(const Environment &env, const CheckOptions &options = {});

/// Structural scans over a derivation: tier-0 commands contain no while loop and
/// assign only tier-0 variables; tier-1 expressions read only tier-1
/// variables through neutral operators. Returns human-readable violations.
std::vector<std::string> confinement_violations(const Derivation &d, const VarTypeEnv &gamma);
std::vector<std::string> simple_security_violations(const Derivation &d, const VarTypeEnv &gamma,
                                                    const Registry &registry);

}  // namespace tierflow
