// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>

#include "mlcc/ast.hpp"

namespace mlcc {

struct CtorInfo {
    std::string adt;
    uint32_t tag;               // declaration index within the ADT
    std::vector<Type> fields;
};

struct FunInfo {
    bool mutates = false;  // writes storage (directly or via calls)
    bool raises = false;   // can revert (directly or via calls)
};

struct TypeInfo {
    std::map<std::string, CtorInfo> ctors;
    std::map<std::string, FunInfo> funs;
};

// Annotates every expression with its type, resolves constructor
// applications, and enforces the language discipline. Throws CompileError
// with rule names: "type", "kind-match", "unknown-type", "global-shape",
// "raise-discipline", "match-exhaustive", "gas-annotation-constant",
// "spec-language", "signed-division", "map-use".
TypeInfo typecheck(SourceModule& m);

}  // namespace mlcc
