// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlcc/u256.hpp"

namespace mlcc {

struct SrcLoc {
    uint32_t line = 0;
    uint32_t column = 0;

    std::string str() const { return std::to_string(line) + ":" + std::to_string(column); }
};

/// Frontend diagnostic: location plus the name of the violated rule, so
/// rejection tests can assert on the rule rather than message wording.
struct CompileError : std::runtime_error {
    SrcLoc loc;
    std::string rule;

    CompileError(SrcLoc l, std::string r, const std::string& what)
        : std::runtime_error(l.str() + ": " + what + " [" + r + "]"),
          loc(l),
          rule(std::move(r)) {}
};

enum class Tok {
    Eof, Ident, Int, Arrow, LArrow, ColonEq,
    LParen, RParen, LBrace, RBrace, LBracket, RBracket, AttrOpen,
    Semi, Colon, Comma, Dot, Pipe, Underscore,
    Plus, Minus, Star, Slash, Percent,
    Eq, Ne, Lt, Le, Gt, Ge, AndAnd, OrOr,
    // keywords
    KwLet, KwRec, KwPublic, KwPrivate, KwType, KwRecord, KwGlobal, KwMap, KwException,
    KwRequires, KwEnsures, KwVariant, KwIf, KwThen, KwElse, KwMatch, KwWith, KwEnd,
    KwWhile, KwDo, KwDone, KwRaise, KwTrue, KwFalse, KwNot, KwMem, KwDel, KwEmit,
    KwGuard, KwSend, KwCaller, KwOld, KwAddGas, KwMut, KwIn, KwGas, KwAlloc,
};

struct Token {
    Tok kind;
    SrcLoc loc;
    std::string text;  // identifier spelling
    U256 value;        // integer literals

    std::string describe() const;
};

// Throws CompileError (rule "lex") on malformed input.
std::vector<Token> tokenize(const std::string& source);

}  // namespace mlcc
