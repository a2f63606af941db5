#include "tierflow/sampling.h"

namespace tierflow {

Word random_word(std::mt19937_64 &rng, const SampleOptions &options) {
  const std::string &letters = options.alphabet.letters();
  std::uniform_int_distribution<std::size_t> len(0, options.max_len);
  std::uniform_int_distribution<std::size_t> pick(0, letters.size() - 1);
  std::string w(len(rng), ' ');
  for (char &ch : w) ch = letters[pick(rng)];
  return Word(w);
}

Store random_store(const std::set<std::string> &vars, std::mt19937_64 &rng,
                   const SampleOptions &options) {
  Store s;
  for (const auto &v : vars) s.assign(v, random_word(rng, options));
  return s;
}

std::pair<Store, Store> random_equiv_pair(const VarTypeEnv &gamma, const std::set<std::string> &vars,
                                          std::mt19937_64 &rng, const SampleOptions &options) {
  Store a, b;
  for (const auto &v : vars) {
    auto it = gamma.find(v);
    if (it != gamma.end() && it->second == Tier::One) {
      Word w = random_word(rng, options);
      a.assign(v, w);
      b.assign(v, w);
    } else {
      a.assign(v, random_word(rng, options));
      b.assign(v, random_word(rng, options));
    }
  }
  return {a, b};
}

}  // namespace tierflow
