#pragma once

// Property harnesses over runs: store equivalence, non-interference trials,
// scheduler quietness, the tier-1 subword invariant, weak subject
// reduction, and empirical growth fitting.

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "tierflow/core.h"
#include "tierflow/operators.h"
#include "tierflow/sampling.h"
#include "tierflow/scheduling.h"

namespace tierflow {

struct EquivWitness {
  bool equivalent = true;
  /// Tier-1 variables compared.
  std::set<std::string> checked;
  std::optional<std::string> first_difference;
  Store mu, sigma;
};

/// μ ≈ σ: equal on every tier-1 variable of Γ.
EquivWitness store_equiv(const VarTypeEnv &gamma, const Store &mu, const Store &sigma);

/// Restriction of a store to the tier-1 variables of Γ.
Store project_tier1(const VarTypeEnv &gamma, const Store &s);

/// Variables a trial randomizes: free variables of the program plus Γ's domain.
std::set<std::string> trial_vars(const Program &m, const VarTypeEnv &gamma);

enum class NiMode : std::uint8_t { Scheduled, Explore };

struct NiOptions {
  std::size_t trials = 200;
  std::size_t fuel = 100000;
  std::uint64_t seed = 0;
  SampleOptions sample;
  NiMode mode = NiMode::Scheduled;
  ExploreOptions explore;
};

struct NiCounterexample {
  std::size_t trial = 0;
  Store mu, sigma;
  std::string reason;
};

struct NiReport {
  bool ok = true;
  std::size_t trials = 0;
  /// Explore trials skipped because a search hit its limits.
  std::size_t inconclusive = 0;
  std::optional<NiCounterexample> counterexample;
};

/// Runs ≈-related store pairs and compares tier-1 final projections,
/// cumulative t, and global step counts (Scheduled) or the reachable sets
/// of (tier-1 projection, t) outcomes (Explore). `sched` is cloned and
/// reset for every run.
NiReport ni_suite(const Program &m, const VarTypeEnv &gamma, const Registry &registry,
                  const Scheduler &sched, const NiOptions &options = {});

struct QuietVerdict {
  bool ok = true;
  std::size_t trials = 0;
  std::optional<NiCounterexample> counterexample;
  /// Index of the first differing choice.
  std::size_t position = 0;
};

/// Compares thread-choice sequences of ≈-related runs.
QuietVerdict quietness_test(const Scheduler &sched, const Program &m, const VarTypeEnv &gamma,
                            const Registry &registry, std::size_t trials, std::size_t fuel,
                            std::uint64_t seed = 0, const SampleOptions &sample = {});

struct SubwordViolation {
  std::size_t index = 0;  // position in the trace, 0 = initial store
  std::string var;
  Word value;
};

struct SubwordVerdict {
  bool ok = true;
  std::size_t checked = 0;
  std::optional<SubwordViolation> violation;
};

/// Every tier-1 value along `trace` is tt, ff, or a subword of some tier-1
/// value of `mu`.
SubwordVerdict subword_invariant(const std::vector<Store> &trace, const VarTypeEnv &gamma,
                                 const Store &mu);

struct ReductionViolation {
  std::size_t step = 0;
  std::string thread;
  std::string before, after;
  std::string reason;
};

/// Runs under `sched` and re-types every thread-local successor: it must be
/// typable at some tier ≼ the maximal tier of its predecessor.
std::vector<ReductionViolation> subject_reduction_violations(const Store &mu, const Program &m,
                                                             const VarTypeEnv &gamma,
                                                             const OpTypeEnv &delta,
                                                             const Registry &registry,
                                                             Scheduler &sched, std::size_t fuel);

struct GrowthRow {
  std::size_t n = 0;
  std::size_t max_t = 0;
  std::size_t max_k = 0;
  bool fuel_hit = false;
};

struct GrowthTable {
  std::vector<GrowthRow> rows;
  /// Header `n,max_t,max_k,fuel_hit`.
  std::string to_csv() const;
};

using InputGenerator = std::function<Store(std::size_t n)>;

struct GrowthOptions {
  std::size_t fuel = 10000000;
  /// Use explore for the max over all interleavings instead of `sched`.
  bool exhaustive = false;
  ExploreOptions explore;
};

/// Sizes must be nonempty and strictly increasing.
GrowthTable measure_growth(const Program &m, const Registry &registry, const InputGenerator &gen,
                           const std::vector<std::size_t> &sizes, const Scheduler &sched,
                           const GrowthOptions &options = {});

enum class Metric : std::uint8_t { K, T };

struct FitOptions {
  std::size_t max_degree = 3;
  /// Relative RMS residual bound on the upper half of the sizes.
  double threshold = 0.05;
  Metric metric = Metric::K;
};

struct FitResult {
  bool polynomial = false;  // false: superpolynomial-suspect
  std::size_t degree = 0;
  /// Coefficients of the selected fit, constant term first.
  std::vector<double> coefficients;
  double residual = 0;
  /// Residual for each degree 1..max_degree.
  std::vector<double> residuals;
};

/// Least-squares fits of degrees 1..max_degree; selects the smallest whose
/// residual is under the threshold. Needs at least max_degree + 2 rows.
FitResult fit_polynomial(const GrowthTable &table, const FitOptions &options = {});

}  // namespace tierflow
