#pragma once

// Concrete `.tier` syntax: parsing, pretty-printing, and loading a parsed
// file into a runnable environment.
//
//   file   := item*
//   item   := 'alphabet' STRING ';'
//           | 'op' opname 'arity' INT 'class' class ['sig' sig (',' sig)*] ';'
//           | 'vars' IDENT ':' TIER (',' IDENT ':' TIER)* ';'
//           | 'thread' IDENT '{' cmds '}'
//   class  := 'predicate' | 'subword' | 'neutral' | 'positive' INT
//   sig    := TIER ('->' TIER)*
//   cmds   := stmt (';' stmt)* [';']
//   stmt   := 'skip' | IDENT ':=' expr | '{' cmds '}'
//           | 'if' '(' expr ')' '{' cmds '}' 'else' '{' cmds '}'
//           | 'while' '(' expr ')' '{' cmds '}'
//   expr   := IDENT | STRING | 'tt' | 'ff' | opname '(' [expr (',' expr)*] ')'
//   opname := IDENT ['[' STRING ']']

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tierflow/core.h"
#include "tierflow/operators.h"

namespace tierflow {

struct OpDecl {
  std::string name;
  std::size_t arity = 0;
  OperatorClass cls;
  /// Written as `neutral`; the concrete neutral class comes from the builtin.
  bool neutral_keyword = false;
  std::optional<std::vector<Signature>> sigs;
  SourcePos pos;
};

struct VarAnnotation {
  std::string var;
  Tier tier = Tier::Zero;
  SourcePos pos;
};

struct ThreadDecl {
  std::string name;
  CmdPtr body;
  SourcePos pos;
};

struct SourceFile {
  std::optional<std::string> alphabet;
  std::vector<OpDecl> ops;
  std::vector<VarAnnotation> vars;
  std::vector<ThreadDecl> threads;

  Program program() const;
  VarTypeEnv annotations() const;
};

/// Structural equality ignoring source positions.
bool equal(const SourceFile &a, const SourceFile &b);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string &message, SourcePos pos);
  SourcePos pos;
};

/// Syntax errors, undeclared operators, arity mismatches and duplicate
/// thread names raise ParseError.
SourceFile parse(std::string_view text);
ExprPtr parse_expr(std::string_view text);
CmdPtr parse_cmd(std::string_view text);

std::string pretty(const Expr &e);
/// Single-line form: `while (gt0(x)) { x := dec(x); y := inc(y) }`.
std::string pretty(const Cmd &c);
std::string pretty(const SourceFile &f);

/// A parsed file resolved against the builtin library.
struct Environment {
  Alphabet alphabet;
  Registry registry;
  OpTypeEnv delta;
  /// Partial Γ from the `vars` section.
  VarTypeEnv annotations;
  Program program;
};

class LoadError : public std::runtime_error {
 public:
  LoadError(const std::string &message, SourcePos pos);
  SourcePos pos;
};

/// Binds every declaration to its builtin, auto-declares word literals and
/// tt/ff, and fills in the default safe signature set where `sig` is absent.
Environment load(const SourceFile &f);

/// parse + load.
Environment load_text(std::string_view text);

}  // namespace tierflow
