#include "tierflow/analysis.h"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "tierflow/parser.h"
#include "tierflow/typing.h"

namespace tierflow {

EquivWitness store_equiv(const VarTypeEnv &gamma, const Store &mu, const Store &sigma) {
  EquivWitness w;
  w.mu = mu;
  w.sigma = sigma;
  for (const auto &[name, tier] : gamma) {
    if (tier != Tier::One) continue;
    w.checked.insert(name);
    if (w.equivalent && mu.get(name) != sigma.get(name)) {
      w.equivalent = false;
      w.first_difference = name;
    }
  }
  return w;
}

Store project_tier1(const VarTypeEnv &gamma, const Store &s) {
  Store out;
  for (const auto &[name, tier] : gamma) {
    if (tier == Tier::One) out.assign(name, s.get(name));
  }
  return out;
}

std::set<std::string> trial_vars(const Program &m, const VarTypeEnv &gamma) {
  std::set<std::string> vars = free_vars(m);
  for (const auto &entry : gamma) vars.insert(entry.first);
  return vars;
}

namespace {

struct Outcome {
  bool stuck = false;
  ScheduledRun run;
};

Outcome run_fresh(const Store &mu, const Program &m, const Scheduler &proto, std::size_t fuel,
                  const Registry &registry) {
  auto sched = proto.clone();
  sched->reset();
  Outcome o;
  try {
    o.run = run_with_scheduler(mu, m, *sched, fuel, registry);
  } catch (const StuckError &) {
    o.stuck = true;
  }
  return o;
}

std::optional<std::string> compare_runs(const VarTypeEnv &gamma, const Outcome &a, const Outcome &b) {
  if (a.stuck != b.stuck) return std::string("one run is stuck, the other is not");
  if (a.stuck) return std::nullopt;
  if (a.run.status != b.run.status) return std::string("one run exhausted its fuel, the other did not");
  EquivWitness w = store_equiv(gamma, a.run.config.store, b.run.config.store);
  if (!w.equivalent) return "final tier-1 value of " + *w.first_difference + " differs";
  if (a.run.config.t != b.run.config.t) {
    return "loop measure differs: t=" + std::to_string(a.run.config.t) + " vs " +
           std::to_string(b.run.config.t);
  }
  if (a.run.config.k != b.run.config.k) {
    return "step count differs: k=" + std::to_string(a.run.config.k) + " vs " +
           std::to_string(b.run.config.k);
  }
  return std::nullopt;
}

std::set<std::pair<Store, std::size_t>> projected_outcomes(const VarTypeEnv &gamma,
                                                           const ExplorationReport &r) {
  std::set<std::pair<Store, std::size_t>> out;
  for (const auto &[store, t] : r.outcomes) out.emplace(project_tier1(gamma, store), t);
  return out;
}

}  // namespace

NiReport ni_suite(const Program &m, const VarTypeEnv &gamma, const Registry &registry,
                  const Scheduler &sched, const NiOptions &options) {
  NiReport rep;
  std::mt19937_64 rng(options.seed);
  std::set<std::string> vars = trial_vars(m, gamma);
  ExploreOptions eo = options.explore;
  eo.collect_outcomes = true;
  for (std::size_t trial = 0; trial < options.trials; ++trial) {
    auto [mu, sigma] = random_equiv_pair(gamma, vars, rng, options.sample);
    ++rep.trials;
    std::optional<std::string> reason;
    if (options.mode == NiMode::Scheduled) {
      reason = compare_runs(gamma, run_fresh(mu, m, sched, options.fuel, registry),
                            run_fresh(sigma, m, sched, options.fuel, registry));
    } else {
      ExplorationReport a = explore(mu, m, registry, eo);
      ExplorationReport b = explore(sigma, m, registry, eo);
      if (a.limits_hit || b.limits_hit) {
        ++rep.inconclusive;
        continue;
      }
      if (projected_outcomes(gamma, a) != projected_outcomes(gamma, b)) {
        reason = "reachable tier-1 outcomes differ";
      } else if (a.cycle != b.cycle) {
        reason = "one search found a divergent path, the other did not";
      }
    }
    if (reason) {
      rep.ok = false;
      rep.counterexample = NiCounterexample{trial, mu, sigma, *reason};
      return rep;
    }
  }
  return rep;
}

QuietVerdict quietness_test(const Scheduler &sched, const Program &m, const VarTypeEnv &gamma,
                            const Registry &registry, std::size_t trials, std::size_t fuel,
                            std::uint64_t seed, const SampleOptions &sample) {
  QuietVerdict v;
  std::mt19937_64 rng(seed);
  std::set<std::string> vars = trial_vars(m, gamma);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    auto [mu, sigma] = random_equiv_pair(gamma, vars, rng, sample);
    ++v.trials;
    Outcome a = run_fresh(mu, m, sched, fuel, registry);
    Outcome b = run_fresh(sigma, m, sched, fuel, registry);
    const auto &ca = a.run.choices, &cb = b.run.choices;
    std::size_t i = 0;
    while (i < ca.size() && i < cb.size() && ca[i] == cb[i]) ++i;
    if (i < ca.size() || i < cb.size() || a.stuck != b.stuck) {
      v.ok = false;
      v.position = i;
      v.counterexample = NiCounterexample{trial, mu, sigma, "thread choices differ at step " +
                                                                std::to_string(i + 1)};
      return v;
    }
  }
  return v;
}

SubwordVerdict subword_invariant(const std::vector<Store> &trace, const VarTypeEnv &gamma,
                                 const Store &mu) {
  SubwordVerdict v;
  std::vector<Word> initial;
  for (const auto &[name, tier] : gamma) {
    if (tier == Tier::One) initial.push_back(mu.get(name));
  }
  for (std::size_t i = 0; i < trace.size(); ++i) {
    for (const auto &[name, tier] : gamma) {
      if (tier != Tier::One) continue;
      Word w = trace[i].get(name);
      ++v.checked;
      if (w.is_bool()) continue;
      bool found = false;
      for (const Word &u : initial) {
        if (subword(w, u)) {
          found = true;
          break;
        }
      }
      if (!found) {
        v.ok = false;
        v.violation = SubwordViolation{i, name, w};
        return v;
      }
    }
  }
  return v;
}

std::vector<ReductionViolation> subject_reduction_violations(const Store &mu, const Program &m,
                                                             const VarTypeEnv &gamma,
                                                             const OpTypeEnv &delta,
                                                             const Registry &registry,
                                                             Scheduler &sched, std::size_t fuel) {
  std::vector<ReductionViolation> out;
  ScheduleOptions options;
  options.observer = [&](const GlobalConfig &before, const std::string &thread, const GlobalStep &step) {
    if (step.local.terminal()) return;
    const CmdPtr &c = before.program.at(thread);
    const CmdPtr &next = step.local.next;
    TierSet from = command_tiers(gamma, delta, *c);
    TierSet to = command_tiers(gamma, delta, *next);
    std::string reason;
    if (from.empty()) {
      reason = "predecessor is untypable";
    } else if (to.empty()) {
      reason = "successor is untypable";
    } else if (!leq(to.min(), from.max())) {
      reason = "successor tier " + to_string(to) + " is not below " + to_string(from);
    }
    if (!reason.empty()) {
      out.push_back({step.config.k, thread, pretty(*c), pretty(*next), reason});
    }
  };
  run_with_scheduler(mu, m, sched, fuel, registry, options);
  return out;
}

std::string GrowthTable::to_csv() const {
  std::ostringstream out;
  out << "n,max_t,max_k,fuel_hit\n";
  for (const auto &r : rows) {
    out << r.n << ',' << r.max_t << ',' << r.max_k << ',' << (r.fuel_hit ? 1 : 0) << '\n';
  }
  return out.str();
}

GrowthTable measure_growth(const Program &m, const Registry &registry, const InputGenerator &gen,
                           const std::vector<std::size_t> &sizes, const Scheduler &sched,
                           const GrowthOptions &options) {
  if (sizes.empty()) throw std::invalid_argument("measure_growth: no sizes");
  for (std::size_t i = 1; i < sizes.size(); ++i) {
    if (sizes[i] <= sizes[i - 1]) throw std::invalid_argument("measure_growth: sizes must increase");
  }
  GrowthTable table;
  for (std::size_t n : sizes) {
    Store mu = gen(n);
    GrowthRow row;
    row.n = n;
    if (options.exhaustive) {
      ExplorationReport r = explore(mu, m, registry, options.explore);
      row.max_t = r.max_t;
      row.max_k = r.max_k;
      row.fuel_hit = r.limits_hit || r.cycle;
    } else {
      auto s = sched.clone();
      s->reset();
      ScheduledRun run = run_with_scheduler(mu, m, *s, options.fuel, registry);
      row.max_t = run.config.t;
      row.max_k = run.config.k;
      row.fuel_hit = run.status == RunStatus::FuelExhausted;
    }
    table.rows.push_back(row);
  }
  return table;
}

FitResult fit_polynomial(const GrowthTable &table, const FitOptions &options) {
  const auto &rows = table.rows;
  if (options.max_degree < 1) throw std::invalid_argument("fit_polynomial: max_degree must be >= 1");
  if (rows.size() < options.max_degree + 2) {
    throw std::invalid_argument("fit_polynomial: need at least max_degree + 2 rows");
  }
  const std::size_t m = rows.size();
  const double scale = static_cast<double>(rows.back().n == 0 ? 1 : rows.back().n);
  Eigen::VectorXd x(m), y(m);
  for (std::size_t i = 0; i < m; ++i) {
    x(i) = static_cast<double>(rows[i].n) / scale;
    y(i) = static_cast<double>(options.metric == Metric::K ? rows[i].max_k : rows[i].max_t);
  }
  const std::size_t top = m / 2;
  double norm = 0;
  for (std::size_t i = top; i < m; ++i) norm += y(i) * y(i);
  norm = std::sqrt(norm / static_cast<double>(m - top));

  FitResult best;
  for (std::size_t d = 1; d <= options.max_degree; ++d) {
    Eigen::MatrixXd a(m, d + 1);
    for (std::size_t i = 0; i < m; ++i) {
      double p = 1;
      for (std::size_t j = 0; j <= d; ++j) {
        a(i, j) = p;
        p *= x(i);
      }
    }
    Eigen::VectorXd c = a.colPivHouseholderQr().solve(y);
    Eigen::VectorXd fitted = a * c;
    double err = 0;
    for (std::size_t i = top; i < m; ++i) err += (y(i) - fitted(i)) * (y(i) - fitted(i));
    err = std::sqrt(err / static_cast<double>(m - top));
    double rel = norm == 0 ? err : err / norm;
    best.residuals.push_back(rel);
    if (!best.polynomial && rel < options.threshold) {
      best.polynomial = true;
      best.degree = d;
      best.residual = rel;
      best.coefficients.clear();
      for (std::size_t j = 0; j <= d; ++j) best.coefficients.push_back(c(j) / std::pow(scale, j));
    }
  }
  if (!best.polynomial) best.residual = best.residuals.back();
  return best;
}

}  // namespace tierflow
