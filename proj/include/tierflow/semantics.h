#pragma once

// Small-step evaluator for expressions and commands, instrumented with the
// loop-length measure t (the number of while unfoldings).

#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "tierflow/core.h"
#include "tierflow/operators.h"

namespace tierflow {

/// Name of the axiom fired by a step. Seq steps report the rule fired on
/// the leftmost redex.
enum class Rule : std::uint8_t { Skip, Assign, IfTrue, IfFalse, WhileTrue, WhileFalse };

const char *rule_name(Rule r);

/// Thrown when an if/while guard evaluates outside {tt, ff}.
class StuckError : public RuntimeError {
 public:
  StuckError(const std::string &message, SourcePos pos);
  SourcePos pos;
};

struct StepResult {
  Store store;
  /// Remaining command; null when the step terminated (the store is final).
  CmdPtr next;
  Rule rule = Rule::Skip;
  /// The command node the rule fired on.
  const Cmd *redex = nullptr;
  /// Variable written by an Assign step.
  std::optional<std::string> written;

  bool terminal() const { return next == nullptr; }
  /// 1 exactly when the step unfolded a while loop.
  unsigned loop_increment() const { return rule == Rule::WhileTrue ? 1 : 0; }
};

Word eval_expr(const Store &mu, const Expr &e, const Registry &registry);

StepResult step_command(const Store &mu, const CmdPtr &c, const Registry &registry);

struct TraceStep {
  std::size_t index = 0;  // 1-based global step number
  std::string thread;     // empty for sequential runs
  Rule rule = Rule::Skip;
  std::size_t t = 0;      // cumulative loop measure after the step
  std::optional<std::string> written;
  Word value;
};

/// A recorded run: per-step labels plus full configurations up to a cap.
struct SeqTrace {
  /// Configurations before each step and after the last one (command null
  /// once terminated). Holds at most `config_cap + 1` entries.
  std::vector<std::pair<Store, CmdPtr>> configs;
  std::vector<TraceStep> steps;
  bool truncated = false;  // configs stopped at the cap; counters continue
  std::size_t t = 0;
  std::size_t k = 0;
  Store final_store;
};

struct RunOptions {
  std::size_t config_cap = 100000;
  bool record_steps = true;
};

enum class RunStatus : std::uint8_t { Finished, FuelExhausted };

struct SeqRun {
  RunStatus status = RunStatus::Finished;
  SeqTrace trace;
  CmdPtr remaining;  // null when finished
};

/// Iterates step_command until termination or `fuel` steps. Stuck guards
/// propagate as StuckError.
SeqRun run_sequential(const Store &mu, const CmdPtr &c, std::size_t fuel,
                      const Registry &registry, const RunOptions &options = {});

/// `index thread rule t change` per line; thread is `-` for sequential runs
/// and change is `var="word"` or `-`.
void dump_trace(std::ostream &out, const std::vector<TraceStep> &steps);

std::string quote(const Word &w);

}  // namespace tierflow
