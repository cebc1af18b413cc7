// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mlcc/ast.hpp"

namespace mlcc {

// Throws CompileError ("parse", or a named rule such as
// "non-nested-patterns") with the offending location.
SourceModule parse(const std::vector<Token>& tokens, const std::string& module_name = "main");

SourceModule parse_source(const std::string& text, const std::string& module_name = "main");

// Canonical pretty-printer; parse(print(m)) is structurally equal to m.
std::string print_module(const SourceModule& m);
std::string print_expr(const Expr& e);
std::string print_type(const Type& t);

}  // namespace mlcc
