// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#include <map>

#include "mlcc/source.hpp"

namespace mlcc {

namespace {

const std::map<std::string, Tok> kKeywords = {
    {"let", Tok::KwLet},           {"rec", Tok::KwRec},
    {"public", Tok::KwPublic},     {"private", Tok::KwPrivate},
    {"type", Tok::KwType},         {"record", Tok::KwRecord},
    {"global", Tok::KwGlobal},     {"map", Tok::KwMap},
    {"exception", Tok::KwException}, {"requires", Tok::KwRequires},
    {"ensures", Tok::KwEnsures},   {"variant", Tok::KwVariant},
    {"if", Tok::KwIf},             {"then", Tok::KwThen},
    {"else", Tok::KwElse},         {"match", Tok::KwMatch},
    {"with", Tok::KwWith},         {"end", Tok::KwEnd},
    {"while", Tok::KwWhile},       {"do", Tok::KwDo},
    {"done", Tok::KwDone},         {"raise", Tok::KwRaise},
    {"true", Tok::KwTrue},         {"false", Tok::KwFalse},
    {"not", Tok::KwNot},           {"mem", Tok::KwMem},
    {"del", Tok::KwDel},           {"emit", Tok::KwEmit},
    {"guard", Tok::KwGuard},       {"send", Tok::KwSend},
    {"caller", Tok::KwCaller},     {"old", Tok::KwOld},
    {"add_gas", Tok::KwAddGas},    {"mut", Tok::KwMut},
    {"in", Tok::KwIn},             {"gas", Tok::KwGas},
    {"alloc", Tok::KwAlloc},
};

struct Cursor {
    const std::string& src;
    size_t pos = 0;
    uint32_t line = 1, col = 1;

    bool done() const { return pos >= src.size(); }
    char peek(size_t ahead = 0) const {
        return pos + ahead < src.size() ? src[pos + ahead] : '\0';
    }
    char advance() {
        char c = src[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }
    SrcLoc loc() const { return SrcLoc{line, col}; }
};

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9'); }

}  // namespace

std::string Token::describe() const {
    switch (kind) {
    case Tok::Eof: return "<eof>";
    case Tok::Ident: return "identifier `" + text + "`";
    case Tok::Int: return "integer literal";
    default: return text.empty() ? "token" : "`" + text + "`";
    }
}

std::vector<Token> tokenize(const std::string& source) {
    Cursor c{source};
    std::vector<Token> out;

    auto push = [&out](Tok k, SrcLoc loc, std::string text = "") {
        out.push_back(Token{k, loc, std::move(text), U256(0)});
    };

    while (!c.done()) {
        SrcLoc loc = c.loc();
        char ch = c.peek();
        if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
            c.advance();
            continue;
        }
        // (* nested comments *)
        if (ch == '(' && c.peek(1) == '*') {
            SrcLoc open = c.loc();
            c.advance();
            c.advance();
            int depth = 1;
            while (depth > 0) {
                if (c.done()) throw CompileError(open, "lex", "unterminated comment");
                if (c.peek() == '(' && c.peek(1) == '*') {
                    c.advance(); c.advance();
                    ++depth;
                } else if (c.peek() == '*' && c.peek(1) == ')') {
                    c.advance(); c.advance();
                    --depth;
                } else {
                    c.advance();
                }
            }
            continue;
        }
        if (ident_start(ch)) {
            std::string word;
            while (!c.done() && ident_char(c.peek())) word.push_back(c.advance());
            if (word == "_") {
                push(Tok::Underscore, loc, "_");
            } else if (auto it = kKeywords.find(word); it != kKeywords.end()) {
                push(it->second, loc, word);
            } else {
                push(Tok::Ident, loc, word);
            }
            continue;
        }
        if (ch >= '0' && ch <= '9') {
            std::string digits;
            bool hex = false;
            if (ch == '0' && (c.peek(1) == 'x' || c.peek(1) == 'X')) {
                c.advance();
                c.advance();
                hex = true;
                while (!c.done() && (isxdigit(static_cast<unsigned char>(c.peek())) || c.peek() == '_')) {
                    char d = c.advance();
                    if (d != '_') digits.push_back(d);
                }
                if (digits.empty()) throw CompileError(loc, "lex", "empty hex literal");
            } else {
                while (!c.done() && ((c.peek() >= '0' && c.peek() <= '9') || c.peek() == '_')) {
                    char d = c.advance();
                    if (d != '_') digits.push_back(d);
                }
            }
            if (!c.done() && ident_start(c.peek()))
                throw CompileError(c.loc(), "lex", "identifier may not start with a digit");
            Token t{Tok::Int, loc, digits, U256(0)};
            try {
                t.value = hex ? U256::from_hex(digits) : U256::from_decimal(digits);
            } catch (const std::exception& e) {
                throw CompileError(loc, "lex", e.what());
            }
            out.push_back(t);
            continue;
        }
        c.advance();
        char ch2 = c.peek();
        switch (ch) {
        case '(': push(Tok::LParen, loc, "("); break;
        case ')': push(Tok::RParen, loc, ")"); break;
        case '{': push(Tok::LBrace, loc, "{"); break;
        case '}': push(Tok::RBrace, loc, "}"); break;
        case ']': push(Tok::RBracket, loc, "]"); break;
        case '[':
            if (ch2 == '@') {
                c.advance();
                push(Tok::AttrOpen, loc, "[@");
            } else {
                push(Tok::LBracket, loc, "[");
            }
            break;
        case ';': push(Tok::Semi, loc, ";"); break;
        case ',': push(Tok::Comma, loc, ","); break;
        case '.': push(Tok::Dot, loc, "."); break;
        case '|':
            if (ch2 == '|') {
                c.advance();
                push(Tok::OrOr, loc, "||");
            } else {
                push(Tok::Pipe, loc, "|");
            }
            break;
        case '&':
            if (ch2 == '&') {
                c.advance();
                push(Tok::AndAnd, loc, "&&");
            } else {
                throw CompileError(loc, "lex", "unexpected `&`");
            }
            break;
        case '+': push(Tok::Plus, loc, "+"); break;
        case '-':
            if (ch2 == '>') {
                c.advance();
                push(Tok::Arrow, loc, "->");
            } else {
                push(Tok::Minus, loc, "-");
            }
            break;
        case '*': push(Tok::Star, loc, "*"); break;
        case '/': push(Tok::Slash, loc, "/"); break;
        case '%': push(Tok::Percent, loc, "%"); break;
        case '=': push(Tok::Eq, loc, "="); break;
        case ':':
            if (ch2 == '=') {
                c.advance();
                push(Tok::ColonEq, loc, ":=");
            } else {
                push(Tok::Colon, loc, ":");
            }
            break;
        case '<':
            if (ch2 == '=') {
                c.advance();
                push(Tok::Le, loc, "<=");
            } else if (ch2 == '>') {
                c.advance();
                push(Tok::Ne, loc, "<>");
            } else if (ch2 == '-') {
                c.advance();
                push(Tok::LArrow, loc, "<-");
            } else {
                push(Tok::Lt, loc, "<");
            }
            break;
        case '>':
            if (ch2 == '=') {
                c.advance();
                push(Tok::Ge, loc, ">=");
            } else {
                push(Tok::Gt, loc, ">");
            }
            break;
        default:
            throw CompileError(loc, "lex", std::string("unexpected character `") + ch + "`");
        }
    }
    out.push_back(Token{Tok::Eof, c.loc(), "", U256(0)});
    return out;
}

}  // namespace mlcc
