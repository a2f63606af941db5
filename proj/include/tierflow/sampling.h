#pragma once

// Seeded random stores, including ≈-related pairs.

#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>

#include "tierflow/core.h"

namespace tierflow {

struct SampleOptions {
  std::size_t max_len = 6;
  Alphabet alphabet;
};

/// One word of length 0..max_len over the alphabet.
Word random_word(std::mt19937_64 &rng, const SampleOptions &options);

/// Binds every variable in `vars` to a random word.
Store random_store(const std::set<std::string> &vars, std::mt19937_64 &rng,
                   const SampleOptions &options);

/// Two stores over `vars` that agree on the tier-1 variables of Γ; all other
/// variables (tier 0 or untyped) are drawn independently.
std::pair<Store, Store> random_equiv_pair(const VarTypeEnv &gamma, const std::set<std::string> &vars,
                                          std::mt19937_64 &rng, const SampleOptions &options);

}  // namespace tierflow
