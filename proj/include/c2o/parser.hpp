#pragma once

#include <string_view>

#include "c2o/ast.hpp"

namespace c2o {

// Syntax only; identifiers and types are resolved by check().
Contract parse_syntax(std::string_view source);

// Resolves names, annotates every expression with its SemType, runs lints.
// Throws CompileError on failure; lint warnings are collected on the Contract.
Contract check(Contract c);

// lex + parse + check.
Contract parse_contract(std::string_view source);

} // namespace c2o
