#pragma once

// Single-tape Turing machines: a text format, a reference simulator, and a
// compiler to safe sequential programs driven by a polynomial clock.
//
//   states q0 q1 qh        // state names
//   alphabet 01_           // tape letters, blank included
//   blank _
//   init q0
//   halt qh
//   clock 1 3              // degree k, factor c: c * n^k + c simulated steps
//   delta
//   q0 0 q0 1 R            // state read next-state write move
//   ...
//
// `#` starts a comment. Every (non-halting state, letter) pair needs exactly
// one transition; halting states have none.

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tierflow/core.h"
#include "tierflow/parser.h"

namespace tierflow {

class TMError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Move : std::uint8_t { Left, Right };

struct Transition {
  std::string next;
  char write = 0;
  Move move = Move::Right;
};

struct TMSpec {
  std::vector<std::string> states;
  std::string alphabet;
  char blank = '_';
  std::map<std::pair<std::string, char>, Transition> delta;
  std::string init;
  std::set<std::string> halt;
  std::size_t clock_degree = 1;
  std::size_t clock_factor = 1;
};

/// Parses and validates.
TMSpec parse_tm(std::string_view text);
/// Throws TMError unless the table is total over non-halting states and
/// every name and letter is declared.
void validate(const TMSpec &spec);

struct TMResult {
  bool halted = false;
  /// Cells from the head to the last non-blank cell.
  Word tape;
  std::size_t steps = 0;
};

/// Input is written from the head position rightwards. Stops when a halting
/// state is reached or after `max_steps` transitions.
TMResult simulate_tm(const TMSpec &spec, const Word &input, std::size_t max_steps);

struct CompiledProgram {
  SourceFile source;
  /// Tier-1 variable holding the input.
  std::string input_var = "Input";
  /// Tier-0 tape variable the output is read from (trailing blanks removed).
  std::string output_var = "Right";
  /// Root of each emitted copy of the one-step simulation command.
  std::vector<const Cmd *> step_roots;
};

/// Emits one thread `main`. Total simulated steps are c * n^k + c for an
/// input of length n.
CompiledProgram compile_tm(const TMSpec &spec);

/// The compiled program's output: the output variable with trailing blanks
/// removed.
Word read_output(const TMSpec &spec, const CompiledProgram &compiled, const Store &store);

}  // namespace tierflow
