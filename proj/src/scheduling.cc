#include "tierflow/scheduling.h"

#include <deque>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace tierflow {

GlobalStep step_global_detailed(const GlobalConfig &cfg, const std::string &thread,
                                const Registry &registry) {
  auto it = cfg.program.find(thread);
  if (it == cfg.program.end()) throw std::out_of_range("thread '" + thread + "' is not live");
  GlobalStep out{cfg, step_command(cfg.store, it->second, registry)};
  GlobalConfig &next = out.config;
  next.store = out.local.store;
  if (out.local.terminal()) {
    next.program.erase(thread);
  } else {
    next.program[thread] = out.local.next;
  }
  next.k += 1;
  next.t += out.local.loop_increment();
  return out;
}

GlobalConfig step_global(const GlobalConfig &cfg, const std::string &thread, const Registry &registry) {
  return step_global_detailed(cfg, thread, registry).config;
}

namespace {

class RoundRobin : public Scheduler {
 public:
  std::string choose(const Program &program, const Store &) override {
    auto it = program.upper_bound(last_);
    if (it == program.end()) it = program.begin();
    last_ = it->first;
    return last_;
  }
  bool quiet() const override { return true; }
  std::string name() const override { return "round-robin"; }
  void reset() override { last_.clear(); }
  std::unique_ptr<Scheduler> clone() const override { return std::make_unique<RoundRobin>(*this); }

 private:
  std::string last_;
};

class FirstLive : public Scheduler {
 public:
  std::string choose(const Program &program, const Store &) override { return program.begin()->first; }
  bool quiet() const override { return true; }
  std::string name() const override { return "first"; }
  void reset() override {}
  std::unique_ptr<Scheduler> clone() const override { return std::make_unique<FirstLive>(*this); }
};

class Always : public Scheduler {
 public:
  explicit Always(std::string thread) : thread_(std::move(thread)) {}
  std::string choose(const Program &program, const Store &) override {
    return program.contains(thread_) ? thread_ : program.begin()->first;
  }
  bool quiet() const override { return true; }
  std::string name() const override { return "always:" + thread_; }
  void reset() override {}
  std::unique_ptr<Scheduler> clone() const override { return std::make_unique<Always>(*this); }

 private:
  std::string thread_;
};

class Random : public Scheduler {
 public:
  explicit Random(std::uint64_t seed) : seed_(seed), rng_(seed) {}
  std::string choose(const Program &program, const Store &) override {
    std::uniform_int_distribution<std::size_t> pick(0, program.size() - 1);
    return std::next(program.begin(), static_cast<std::ptrdiff_t>(pick(rng_)))->first;
  }
  // The choice stream depends only on the seed and the live-thread counts.
  bool quiet() const override { return true; }
  std::string name() const override { return "random"; }
  void reset() override { rng_.seed(seed_); }
  std::unique_ptr<Scheduler> clone() const override { return std::make_unique<Random>(*this); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 rng_;
};

class Leaky : public Scheduler {
 public:
  explicit Leaky(std::string var) : var_(std::move(var)) {}
  std::string choose(const Program &program, const Store &store) override {
    std::size_t i = store.get(var_).size() % program.size();
    return std::next(program.begin(), static_cast<std::ptrdiff_t>(i))->first;
  }
  bool quiet() const override { return false; }
  std::string name() const override { return "leaky:" + var_; }
  void reset() override {}
  std::unique_ptr<Scheduler> clone() const override { return std::make_unique<Leaky>(*this); }

 private:
  std::string var_;
};

}  // namespace

std::unique_ptr<Scheduler> round_robin() { return std::make_unique<RoundRobin>(); }
std::unique_ptr<Scheduler> first_live() { return std::make_unique<FirstLive>(); }
std::unique_ptr<Scheduler> always(std::string thread) { return std::make_unique<Always>(std::move(thread)); }
std::unique_ptr<Scheduler> random_scheduler(std::uint64_t seed) { return std::make_unique<Random>(seed); }
std::unique_ptr<Scheduler> leaky(std::string var) { return std::make_unique<Leaky>(std::move(var)); }

std::unique_ptr<Scheduler> make_scheduler(const std::string &spec, std::uint64_t seed) {
  if (spec == "round-robin") return round_robin();
  if (spec == "first") return first_live();
  if (spec == "random") return random_scheduler(seed);
  if (spec.starts_with("always:") && spec.size() > 7) return always(spec.substr(7));
  if (spec.starts_with("leaky:") && spec.size() > 6) return leaky(spec.substr(6));
  throw std::invalid_argument("unknown scheduler '" + spec + "'");
}

ScheduledRun run_with_scheduler(const Store &mu, const Program &m, Scheduler &sched, std::size_t fuel,
                                const Registry &registry, const ScheduleOptions &options) {
  if (fuel < 1) throw std::invalid_argument("run_with_scheduler: fuel must be >= 1");
  ScheduledRun run;
  run.config.store = mu;
  run.config.program = m;
  while (!run.config.terminal()) {
    if (run.config.k == fuel) {
      run.status = RunStatus::FuelExhausted;
      break;
    }
    std::string thread = sched.choose(run.config.program, run.config.store);
    GlobalStep step = step_global_detailed(run.config, thread, registry);
    if (options.observer) options.observer(run.config, thread, step);
    if (options.record_steps) {
      TraceStep s{step.config.k, thread, step.local.rule, step.config.t, step.local.written, {}};
      if (s.written) s.value = step.config.store.get(*s.written);
      run.steps.push_back(std::move(s));
    }
    run.choices.push_back(std::move(thread));
    run.config = std::move(step.config);
  }
  return run;
}

std::string format_choices(const std::vector<std::string> &choices) {
  std::string out;
  for (std::size_t i = 0; i < choices.size(); ++i) {
    if (i) out += ',';
    out += choices[i];
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::size_t program_hash(const Program &m) {
  std::size_t h = 0x51ed270b;
  for (const auto &[name, cmd] : m) {
    h ^= std::hash<std::string>{}(name) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= cmd->hash + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

struct Node {
  Store store;
  Program program;
  struct Edge {
    std::size_t to;
    std::size_t dt;
  };
  std::vector<Edge> edges;
  enum class Color : std::uint8_t { White, Gray, Black } color = Color::White;
  long long max_k = -1;  // -1: no terminal reachable
  long long max_t = -1;
  std::set<std::pair<std::size_t, std::size_t>> outcomes;  // (terminal node, dt)
};

class Explorer {
 public:
  Explorer(const Registry &registry, const ExploreOptions &options)
      : registry_(registry), options_(options) {}

  ExplorationReport run(const Store &mu, const Program &m) {
    ExplorationReport rep;
    std::size_t root = *intern(mu, m);
    struct Frame {
      std::size_t node;
      std::size_t edge = 0;
      std::size_t depth;
    };
    std::vector<Frame> stack{{root, 0, 0}};
    expand(root, 0);
    nodes_[root].color = Node::Color::Gray;
    while (!stack.empty()) {
      Frame &f = stack.back();
      Node &n = nodes_[f.node];
      if (f.edge < n.edges.size()) {
        std::size_t child = n.edges[f.edge++].to;
        Node &c = nodes_[child];
        if (c.color == Node::Color::Gray) {
          cycle_ = true;
        } else if (c.color == Node::Color::White) {
          std::size_t depth = f.depth + 1;
          c.color = Node::Color::Gray;
          expand(child, depth);
          stack.push_back({child, 0, depth});
        }
        continue;
      }
      finish(f.node);
      n.color = Node::Color::Black;
      stack.pop_back();
    }
    const Node &r = nodes_[root];
    for (const Node &n : nodes_) {
      if (n.program.empty()) rep.terminal_stores.insert(n.store);
    }
    if (options_.collect_outcomes) {
      for (const auto &[id, dt] : r.outcomes) rep.outcomes.emplace(nodes_[id].store, dt);
    }
    rep.max_k = r.max_k < 0 ? 0 : static_cast<std::size_t>(r.max_k);
    rep.max_t = r.max_t < 0 ? 0 : static_cast<std::size_t>(r.max_t);
    rep.cycle = cycle_;
    rep.limits_hit = limits_hit_;
    rep.visited = nodes_.size();
    rep.strongly_terminating_within_bounds = !cycle_ && !limits_hit_;
    return rep;
  }

 private:
  std::optional<std::size_t> intern(const Store &s, const Program &m) {
    std::size_t h = s.hash() * 31 + program_hash(m);
    auto &bucket = index_[h];
    for (std::size_t id : bucket) {
      if (nodes_[id].store == s && equal(nodes_[id].program, m)) return id;
    }
    if (nodes_.size() >= options_.max_states) {
      limits_hit_ = true;
      return std::nullopt;
    }
    Node node;
    node.store = s;
    node.program = m;
    nodes_.push_back(std::move(node));
    bucket.push_back(nodes_.size() - 1);
    return nodes_.size() - 1;
  }

  void expand(std::size_t id, std::size_t depth) {
    if (nodes_[id].program.empty()) return;
    if (depth >= options_.max_steps) {
      limits_hit_ = true;
      return;
    }
    GlobalConfig cfg{nodes_[id].store, nodes_[id].program, 0, 0};
    std::vector<std::string> threads;
    for (const auto &entry : cfg.program) threads.push_back(entry.first);
    for (const auto &thread : threads) {
      GlobalConfig next = step_global(cfg, thread, registry_);
      auto child = intern(next.store, next.program);
      if (child) nodes_[id].edges.push_back({*child, next.t});
    }
  }

  void finish(std::size_t id) {
    Node &n = nodes_[id];
    if (n.program.empty()) {
      n.max_k = 0;
      n.max_t = 0;
      if (options_.collect_outcomes) n.outcomes.emplace(id, 0);
      return;
    }
    for (const auto &e : n.edges) {
      const Node &c = nodes_[e.to];
      if (c.color != Node::Color::Black || c.max_k < 0) continue;
      n.max_k = std::max(n.max_k, c.max_k + 1);
      n.max_t = std::max(n.max_t, c.max_t + static_cast<long long>(e.dt));
      if (options_.collect_outcomes) {
        for (const auto &[term, dt] : c.outcomes) n.outcomes.emplace(term, dt + e.dt);
      }
    }
  }

  const Registry &registry_;
  const ExploreOptions &options_;
  std::deque<Node> nodes_;
  std::unordered_map<std::size_t, std::vector<std::size_t>> index_;
  bool cycle_ = false;
  bool limits_hit_ = false;
};

}  // namespace

ExplorationReport explore(const Store &mu, const Program &m, const Registry &registry,
                          const ExploreOptions &options) {
  if (options.max_steps < 1 || options.max_states < 1) {
    throw std::invalid_argument("explore: limits must be >= 1");
  }
  return Explorer(registry, options).run(mu, m);
}

}  // namespace tierflow
