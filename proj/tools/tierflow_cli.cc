// tierflow: batch front end. Exit codes: 0 success, 1 rejection or
// counterexample, 2 usage, I/O or parse errors.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "tierflow/analysis.h"
#include "tierflow/parser.h"
#include "tierflow/report.h"
#include "tierflow/scheduling.h"
#include "tierflow/tm.h"
#include "tierflow/typing.h"

using namespace tierflow;

namespace {

constexpr int kOk = 0;
constexpr int kReject = 1;
constexpr int kUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string &path, const std::string &text) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

struct Common {
  std::string file;
  bool json = false;
  std::uint64_t seed = 0;
};

void emit(const Report &r, const Common &c) { std::cout << (c.json ? r.json() : r.text()); }

std::pair<std::string, std::string> split_binding(const std::string &s) {
  auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw UsageError("expected VAR=VALUE, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

Store parse_inputs(const std::vector<std::string> &inputs) {
  Store s;
  for (const auto &in : inputs) {
    auto [var, word] = split_binding(in);
    s.assign(var, Word(word));
  }
  return s;
}

ReportData store_json(const Store &s) {
  ReportData out = ReportData::object();
  for (const auto &[k, v] : s.bindings()) out[k] = v.str();
  return out;
}

ReportData gamma_json(const VarTypeEnv &g) {
  ReportData out = ReportData::object();
  for (const auto &[k, v] : g) out[k] = to_int(v);
  return out;
}

// Γ for a loaded file: the annotations when complete, otherwise inferred.
TypingVerdict type_env(const Environment &env, bool force_infer) {
  bool partial = false;
  for (const auto &v : free_vars(env.program)) partial = partial || !env.annotations.contains(v);
  return force_infer || partial ? infer_tiers(env) : check_program(env);
}

void fill_verdict(Report &r, const TypingVerdict &v) {
  r["verdict"] = v.safe ? "safe" : "rejected";
  r["tiers"] = gamma_json(v.gamma);
  ReportData threads = ReportData::object();
  for (const auto &[t, tier] : v.thread_tiers) threads[t] = to_int(tier);
  r["threads"] = threads;
  ReportData diags = ReportData::array();
  for (const auto &d : v.diagnostics) {
    ReportData j;
    j["rule"] = d.rule;
    if (d.pos.line > 0) j["at"] = to_string(d.pos);
    if (!d.thread.empty()) j["thread"] = d.thread;
    j["message"] = d.message;
    diags.push_back(j);
  }
  r["diagnostics"] = diags;
  ReportData core = ReportData::array();
  for (const auto &x : v.core_vars) core.push_back(x);
  r["core_vars"] = core;
}

// Loads a program and refuses unsafe ones unless allowed.
struct Loaded {
  Environment env;
  TypingVerdict verdict;
};

Loaded load_checked(const Common &c, bool unsafe_ok) {
  Loaded l{load_text(read_file(c.file)), {}};
  l.verdict = type_env(l.env, false);
  if (!l.verdict.safe && !unsafe_ok) {
    Report r("check");
    fill_verdict(r, l.verdict);
    emit(r, c);
    throw std::runtime_error("program is not safe; pass --unsafe-ok to run it anyway");
  }
  if (!l.verdict.safe) l.verdict.gamma.insert(l.env.annotations.begin(), l.env.annotations.end());
  return l;
}

std::vector<std::size_t> parse_sizes(const std::string &spec) {
  std::vector<std::size_t> out;
  try {
    if (auto dots = spec.find(".."); dots != std::string::npos) {
      std::size_t lo = std::stoul(spec.substr(0, dots)), hi = std::stoul(spec.substr(dots + 2));
      for (std::size_t n = lo; n <= hi; ++n) out.push_back(n);
    } else {
      std::istringstream in(spec);
      for (std::string tok; std::getline(in, tok, ',');) out.push_back(std::stoul(tok));
    }
  } catch (const std::exception &) {
    throw UsageError("bad size list '" + spec + "'");
  }
  if (out.empty()) throw UsageError("empty size list");
  return out;
}

// VAR=WORD*n repeats WORD n times; VAR=WORD is constant.
InputGenerator make_generator(const std::vector<std::string> &gens) {
  std::vector<std::tuple<std::string, std::string, bool>> parts;
  for (const auto &g : gens) {
    auto [var, value] = split_binding(g);
    bool scaled = value.ends_with("*n");
    if (scaled) value.resize(value.size() - 2);
    parts.emplace_back(var, value, scaled);
  }
  return [parts](std::size_t n) {
    Store s;
    for (const auto &[var, value, scaled] : parts) {
      std::string w;
      if (scaled) {
        for (std::size_t i = 0; i < n; ++i) w += value;
      } else {
        w = value;
      }
      s.assign(var, Word(w));
    }
    return s;
  };
}

int cmd_check(const Common &c, bool infer) {
  Environment env = load_text(read_file(c.file));
  TypingVerdict v = type_env(env, infer);
  Report r("check");
  r["file"] = c.file;
  fill_verdict(r, v);
  emit(r, c);
  return v.safe ? kOk : kReject;
}

int cmd_run(const Common &c, const std::vector<std::string> &inputs, const std::string &sched_name,
            std::size_t fuel, const std::string &trace, bool unsafe_ok) {
  Loaded l = load_checked(c, unsafe_ok);
  auto sched = make_scheduler(sched_name, c.seed);
  ScheduleOptions opts;
  opts.record_steps = !trace.empty();
  ScheduledRun run = run_with_scheduler(parse_inputs(inputs), l.env.program, *sched, fuel, l.env.registry, opts);
  if (!trace.empty()) {
    std::ostringstream out;
    dump_trace(out, run.steps);
    write_file(trace, out.str());
  }
  Report r("run");
  r["file"] = c.file;
  r["scheduler"] = sched->name();
  r["status"] = run.status == RunStatus::Finished ? "finished" : "fuel-exhausted";
  r["store"] = store_json(run.config.store);
  r["k"] = run.config.k;
  r["t"] = run.config.t;
  r["choices"] = format_choices(run.choices);
  emit(r, c);
  return run.status == RunStatus::Finished ? kOk : kReject;
}

int cmd_explore(const Common &c, const std::vector<std::string> &inputs, const ExploreOptions &eo,
                const std::vector<std::string> &length_vars) {
  Environment env = load_text(read_file(c.file));
  ExplorationReport rep = explore(parse_inputs(inputs), env.program, env.registry, eo);
  Report r("explore");
  r["file"] = c.file;
  r["visited"] = rep.visited;
  r["limits_hit"] = rep.limits_hit;
  r["cycle"] = rep.cycle;
  r["strongly_terminating_within_bounds"] = rep.strongly_terminating_within_bounds;
  r["max_k"] = rep.max_k;
  r["max_t"] = rep.max_t;
  ReportData stores = ReportData::array();
  for (const auto &s : rep.terminal_stores) stores.push_back(store_json(s));
  r["terminal_stores"] = stores;
  for (const auto &var : length_vars) {
    std::set<std::size_t> lens;
    for (const auto &s : rep.terminal_stores) lens.insert(s.get(var).size());
    r["lengths"][var] = ReportData(std::vector<std::size_t>(lens.begin(), lens.end()));
  }
  emit(r, c);
  return kOk;
}

int cmd_ni(const Common &c, const NiOptions &base, const std::string &sched_name, bool exhaustive,
           bool unsafe_ok) {
  Loaded l = load_checked(c, unsafe_ok);
  NiOptions o = base;
  o.seed = c.seed;
  o.mode = exhaustive ? NiMode::Explore : NiMode::Scheduled;
  o.sample.alphabet = l.env.alphabet;
  auto sched = make_scheduler(sched_name, c.seed);
  NiReport rep = ni_suite(l.env.program, l.verdict.gamma, l.env.registry, *sched, o);
  Report r("ni");
  r["file"] = c.file;
  r["mode"] = exhaustive ? "explore" : "scheduled";
  r["scheduler"] = sched->name();
  r["seed"] = c.seed;
  r["verdict"] = rep.ok ? "pass" : "counterexample";
  r["trials"] = rep.trials;
  r["inconclusive"] = rep.inconclusive;
  if (rep.counterexample) {
    r["counterexample"]["trial"] = rep.counterexample->trial;
    r["counterexample"]["reason"] = rep.counterexample->reason;
    r["counterexample"]["mu"] = store_json(rep.counterexample->mu);
    r["counterexample"]["sigma"] = store_json(rep.counterexample->sigma);
  }
  emit(r, c);
  return rep.ok ? kOk : kReject;
}

int cmd_measure(const Common &c, const std::vector<std::string> &gens, const std::string &sizes,
                const std::string &sched_name, std::size_t fuel, const std::string &csv,
                const FitOptions &fo, bool exhaustive, bool unsafe_ok) {
  if (gens.empty()) throw UsageError("measure needs at least one --gen");
  Loaded l = load_checked(c, unsafe_ok);
  auto sched = make_scheduler(sched_name, c.seed);
  GrowthOptions go;
  go.fuel = fuel;
  go.exhaustive = exhaustive;
  GrowthTable table = measure_growth(l.env.program, l.env.registry, make_generator(gens), parse_sizes(sizes),
                                     *sched, go);
  if (!csv.empty()) write_file(csv, table.to_csv());
  FitResult fit = fit_polynomial(table, fo);
  Report r("measure");
  r["file"] = c.file;
  r["metric"] = fo.metric == Metric::K ? "k" : "t";
  r["verdict"] = fit.polynomial ? "polynomial" : "superpolynomial-suspect";
  if (fit.polynomial) {
    r["degree"] = fit.degree;
    r["coefficients"] = fit.coefficients;
  }
  r["residual"] = fit.residual;
  r["residuals"] = fit.residuals;
  std::size_t hits = 0;
  for (const auto &row : table.rows) hits += row.fuel_hit;
  r["fuel_hit_rows"] = hits;
  emit(r, c);
  if (csv.empty() && !c.json) std::cout << table.to_csv();
  return fit.polynomial ? kOk : kReject;
}

int cmd_tm_compile(const Common &c, const std::string &out) {
  TMSpec spec = parse_tm(read_file(c.file));
  CompiledProgram p = compile_tm(spec);
  std::string text = pretty(p.source);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
  }
  return kOk;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Tier-based complexity checker and interpreter for multi-threaded while programs"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App *sub) {
    sub->add_option("file", common.file, "Input file")->required();
    sub->add_flag("--json", common.json, "Machine-readable report");
    sub->add_option("--seed", common.seed, "Seed for all randomness");
  };

  bool infer = false;
  auto *check = app.add_subcommand("check", "Type-check a program");
  add_common(check);
  check->add_flag("--infer", infer, "Infer tiers, treating annotations as constraints");

  std::vector<std::string> inputs;
  std::string sched_name = "round-robin";
  std::size_t fuel = 1000000;
  std::string trace;
  bool unsafe_ok = false;
  auto *run = app.add_subcommand("run", "Run under a scheduler");
  add_common(run);
  run->add_option("--input", inputs, "Initial binding VAR=WORD");
  run->add_option("--scheduler", sched_name, "round-robin, first, random, always:ID, leaky:VAR");
  run->add_option("--fuel", fuel, "Maximum global steps");
  run->add_option("--trace", trace, "Write the step trace to this path");
  run->add_flag("--unsafe-ok", unsafe_ok, "Run programs the checker rejects");

  ExploreOptions eo;
  std::vector<std::string> length_vars;
  auto *exp = app.add_subcommand("explore", "Explore all interleavings");
  add_common(exp);
  exp->add_option("--input", inputs, "Initial binding VAR=WORD");
  exp->add_option("--max-steps", eo.max_steps, "Depth bound");
  exp->add_option("--max-states", eo.max_states, "State bound");
  exp->add_option("--lengths", length_vars, "Report terminal lengths of these variables");

  NiOptions no;
  bool exhaustive = false;
  auto *ni = app.add_subcommand("ni", "Non-interference trials");
  add_common(ni);
  ni->add_option("--trials", no.trials, "Number of store pairs");
  ni->add_option("--fuel", no.fuel, "Fuel per run");
  ni->add_option("--max-len", no.sample.max_len, "Maximum random word length");
  ni->add_option("--scheduler", sched_name, "Scheduler for single runs");
  ni->add_flag("--explore", exhaustive, "Compare outcome sets over all interleavings");
  ni->add_flag("--unsafe-ok", unsafe_ok, "Test programs the checker rejects");

  std::vector<std::string> gens;
  std::string sizes = "1..16";
  std::string csv;
  FitOptions fo;
  std::string metric = "k";
  auto *measure = app.add_subcommand("measure", "Measure growth and fit a polynomial");
  add_common(measure);
  measure->add_option("--gen", gens, "Input VAR=WORD*n (repeated n times) or VAR=WORD");
  measure->add_option("--sizes", sizes, "LO..HI or a comma list");
  measure->add_option("--scheduler", sched_name, "Scheduler");
  measure->add_option("--fuel", fuel, "Fuel per run");
  measure->add_option("--csv", csv, "Write the growth table as CSV");
  measure->add_option("--max-degree", fo.max_degree, "Largest degree tried");
  measure->add_option("--metric", metric, "k or t")->check(CLI::IsMember({"k", "t"}));
  measure->add_flag("--explore", exhaustive, "Max over all interleavings");
  measure->add_flag("--unsafe-ok", unsafe_ok, "Measure programs the checker rejects");

  std::string out;
  auto *tmc = app.add_subcommand("tm-compile", "Compile a Turing machine to a program");
  add_common(tmc);
  tmc->add_option("-o,--output", out, "Output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*check) return cmd_check(common, infer);
    if (*run) return cmd_run(common, inputs, sched_name, fuel, trace, unsafe_ok);
    if (*exp) return cmd_explore(common, inputs, eo, length_vars);
    if (*ni) return cmd_ni(common, no, sched_name, exhaustive, unsafe_ok);
    if (*measure) {
      fo.metric = metric == "t" ? Metric::T : Metric::K;
      return cmd_measure(common, gens, sizes, sched_name, fuel, csv, fo, exhaustive, unsafe_ok);
    }
    if (*tmc) return cmd_tm_compile(common, out);
  } catch (const UsageError &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseError &e) {
    std::cerr << common.file << ":" << e.what() << '\n';
    return kUsage;
  } catch (const LoadError &e) {
    std::cerr << common.file << ":" << e.what() << '\n';
    return kUsage;
  } catch (const TMError &e) {
    std::cerr << common.file << ": " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return kReject;
  }
  return kUsage;
}
