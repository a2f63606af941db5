#pragma once

// Global multi-thread transitions, deterministic schedulers, and exhaustive
// exploration of all interleavings within bounds.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tierflow/core.h"
#include "tierflow/operators.h"
#include "tierflow/semantics.h"

namespace tierflow {

struct GlobalConfig {
  Store store;
  /// Remaining threads; terminated ones are removed.
  Program program;
  std::size_t t = 0;
  std::size_t k = 0;

  bool terminal() const { return program.empty(); }
};

/// One global step together with the thread-local step it performed.
struct GlobalStep {
  GlobalConfig config;
  StepResult local;
};

/// Steps thread `thread`; throws std::out_of_range when it is not live.
GlobalStep step_global_detailed(const GlobalConfig &cfg, const std::string &thread,
                                const Registry &registry);
GlobalConfig step_global(const GlobalConfig &cfg, const std::string &thread, const Registry &registry);

/// Picks the next thread. Implementations receive the whole store; quiet
/// ones must look at nothing but the program and tier-1 data.
class Scheduler {
 public:
  virtual ~Scheduler() = default;
  /// Precondition: program not empty. Returns a member of dom(program).
  virtual std::string choose(const Program &program, const Store &store) = 0;
  virtual bool quiet() const = 0;
  virtual std::string name() const = 0;
  /// Restores the initial private state.
  virtual void reset() = 0;
  virtual std::unique_ptr<Scheduler> clone() const = 0;
};

/// Next live thread after the last choice, in lexicographic order.
std::unique_ptr<Scheduler> round_robin();
/// Always the lexicographically first live thread.
std::unique_ptr<Scheduler> first_live();
/// Always `thread` while it is live, otherwise the first live thread.
std::unique_ptr<Scheduler> always(std::string thread);
/// Uniform choice from a seeded generator.
std::unique_ptr<Scheduler> random_scheduler(std::uint64_t seed);
/// Picks by the length of `var` modulo the number of live threads. Not
/// quiet when `var` is tier 0; used as a negative control.
std::unique_ptr<Scheduler> leaky(std::string var);

/// `round-robin`, `first`, `always:ID`, `random`, `leaky:VAR`. Throws
/// std::invalid_argument on anything else.
std::unique_ptr<Scheduler> make_scheduler(const std::string &spec, std::uint64_t seed = 0);

struct ScheduledRun {
  RunStatus status = RunStatus::Finished;
  GlobalConfig config;
  std::vector<std::string> choices;
  std::vector<TraceStep> steps;
};

/// Called after each global step with the configuration before it.
using StepObserver =
    std::function<void(const GlobalConfig &before, const std::string &thread, const GlobalStep &step)>;

struct ScheduleOptions {
  bool record_steps = false;
  StepObserver observer;
};

/// Runs until the program is empty or `fuel` global steps were taken. The
/// scheduler is used as-is; call reset() for a fresh run.
ScheduledRun run_with_scheduler(const Store &mu, const Program &m, Scheduler &sched, std::size_t fuel,
                                const Registry &registry, const ScheduleOptions &options = {});

/// Comma-separated thread ids.
std::string format_choices(const std::vector<std::string> &choices);

struct ExploreOptions {
  std::size_t max_steps = 10000;   // depth bound on any path
  std::size_t max_states = 200000; // distinct (store, program) pairs
  /// Also collect (terminal store, t) pairs reachable from the start.
  bool collect_outcomes = false;
};

struct ExplorationReport {
  std::set<Store> terminal_stores;
  /// (terminal store, cumulative t) over all terminating paths; filled only
  /// with collect_outcomes.
  std::set<std::pair<Store, std::size_t>> outcomes;
  /// Longest terminating path found (Time(M) when exhaustive).
  std::size_t max_k = 0;
  std::size_t max_t = 0;
  /// Some path revisits a configuration, so some run diverges.
  bool cycle = false;
  bool limits_hit = false;
  bool strongly_terminating_within_bounds = false;
  std::size_t visited = 0;
};

/// Memoized depth-first search over all interleavings. Stuck guards
/// propagate as StuckError.
ExplorationReport explore(const Store &mu, const Program &m, const Registry &registry,
                          const ExploreOptions &options = {});

}  // namespace tierflow
