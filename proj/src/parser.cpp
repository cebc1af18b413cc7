// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#include "mlcc/parser.hpp"

#include <sstream>

namespace mlcc {

namespace {

// Type names understood without declaration.
bool builtin_int_type(const std::string& s, IntKind* out) {
    static const std::pair<const char*, IntKind> table[] = {
        {"uint32", kUint32},  {"uint64", kUint64},   {"uint128", kUint128},
        {"uint160", kUint160}, {"uint256", kUint256}, {"uint", kUint256},
        {"address", kUint256},  // contract-level addresses are word-sized
        {"int32", kInt32},    {"int64", kInt64},     {"int128", kInt128},
        {"int160", kInt160},  {"int256", kInt256},
    };
    for (const auto& [name, kind] : table) {
        if (s == name) {
            *out = kind;
            return true;
        }
    }
    return false;
}

class Parser {
public:
    explicit Parser(const std::vector<Token>& toks) : toks_(toks) {}

    SourceModule parse_module(const std::string& name) {
        SourceModule m;
        m.name = name;
        while (!at(Tok::Eof)) parse_decl(m);
        if (m.adts.empty() && m.records.empty() && m.globals.empty() && m.exceptions.empty() &&
            m.functions.empty())
            fail("parse", "module contains no declarations");
        return m;
    }

private:
    const std::vector<Token>& toks_;
    size_t pos_ = 0;

    const Token& cur() const { return toks_[pos_]; }
    bool at(Tok k) const { return cur().kind == k; }
    const Token& next() { return toks_[pos_++]; }
    bool accept(Tok k) {
        if (at(k)) {
            ++pos_;
            return true;
        }
        return false;
    }
    const Token& expect(Tok k, const char* what) {
        if (!at(k))
            throw CompileError(cur().loc, "parse",
                               std::string("expected ") + what + ", found " + cur().describe());
        return next();
    }
    [[noreturn]] void fail(const std::string& rule, const std::string& msg) const {
        throw CompileError(cur().loc, rule, msg);
    }

    // ---- declarations ----

    void parse_decl(SourceModule& m) {
        switch (cur().kind) {
        case Tok::KwType: parse_adt(m); return;
        case Tok::KwRecord: parse_record(m); return;
        case Tok::KwGlobal: parse_global(m); return;
        case Tok::KwException: {
            SrcLoc loc = next().loc;
            std::string name = expect(Tok::Ident, "exception name").text;
            m.exceptions.push_back(ExceptionDecl{loc, name});
            return;
        }
        case Tok::KwLet: parse_fun(m); return;
        default:
            fail("parse", "expected a declaration, found " + cur().describe());
        }
    }

    void parse_adt(SourceModule& m) {
        SrcLoc loc = expect(Tok::KwType, "`type`").loc;
        AdtDecl d;
        d.loc = loc;
        d.name = expect(Tok::Ident, "type name").text;
        expect(Tok::Eq, "`=`");
        accept(Tok::Pipe);
        do {
            CtorDecl c;
            c.name = expect(Tok::Ident, "constructor name").text;
            while (type_starts()) c.fields.push_back(parse_atomic_type());
            d.ctors.push_back(std::move(c));
        } while (accept(Tok::Pipe));
        m.adts.push_back(std::move(d));
    }

    void parse_record(SourceModule& m) {
        SrcLoc loc = expect(Tok::KwRecord, "`record`").loc;
        RecordDecl d;
        d.loc = loc;
        d.name = expect(Tok::Ident, "record name").text;
        expect(Tok::Eq, "`=`");
        expect(Tok::LBrace, "`{`");
        do {
            if (at(Tok::RBrace)) break;
            FieldDecl f;
            f.name = expect(Tok::Ident, "field name").text;
            expect(Tok::Colon, "`:`");
            f.type = parse_type();
            d.fields.push_back(std::move(f));
        } while (accept(Tok::Semi));
        expect(Tok::RBrace, "`}`");
        m.records.push_back(std::move(d));
    }

    void parse_global(SourceModule& m) {
        SrcLoc loc = expect(Tok::KwGlobal, "`global`").loc;
        GlobalDecl d;
        d.loc = loc;
        d.name = expect(Tok::Ident, "global name").text;
        expect(Tok::Colon, "`:`");
        if (accept(Tok::KwMap)) {
            d.is_map = true;
        } else {
            d.type = parse_type();
        }
        m.globals.push_back(std::move(d));
    }

    void parse_fun(SourceModule& m) {
        FunDecl f;
        f.loc = expect(Tok::KwLet, "`let`").loc;
        f.is_rec = accept(Tok::KwRec);
        if (accept(Tok::KwPublic)) f.is_public = true;
        else if (accept(Tok::KwPrivate)) f.is_public = false;
        f.name = expect(Tok::Ident, "function name").text;
        if (accept(Tok::AttrOpen)) {
            const Token& attr = expect(Tok::Ident, "attribute name");
            if (attr.text != "gas_checking")
                throw CompileError(attr.loc, "parse", "unknown attribute `" + attr.text + "`");
            f.gas_checking = true;
            expect(Tok::RBracket, "`]`");
        }
        while (at(Tok::LParen)) {
            next();
            Param p;
            p.name = expect(Tok::Ident, "parameter name").text;
            expect(Tok::Colon, "`:`");
            p.type = parse_type();
            expect(Tok::RParen, "`)`");
            f.params.push_back(std::move(p));
        }
        expect(Tok::Colon, "`:` before return type");
        f.ret = parse_type();
        for (;;) {
            if (accept(Tok::KwRequires)) {
                expect(Tok::LBrace, "`{`");
                f.requires_.push_back(parse_expr());
                expect(Tok::RBrace, "`}`");
            } else if (accept(Tok::KwEnsures)) {
                expect(Tok::LBrace, "`{`");
                f.ensures_.push_back(parse_expr());
                expect(Tok::RBrace, "`}`");
            } else if (accept(Tok::KwVariant)) {
                expect(Tok::LBrace, "`{`");
                if (!f.variant_.empty())
                    fail("parse", "duplicate variant clause");
                f.variant_.push_back(parse_expr());
                expect(Tok::RBrace, "`}`");
            } else {
                break;
            }
        }
        expect(Tok::Eq, "`=` before function body");
        f.body.push_back(parse_expr());
        m.functions.push_back(std::move(f));
    }

    // ---- types ----

    bool type_starts() const { return at(Tok::Ident) || at(Tok::LParen); }

    Type parse_atomic_type() {
        if (accept(Tok::LParen)) {
            Type t = parse_type();
            expect(Tok::RParen, "`)`");
            return t;
        }
        const Token& t = expect(Tok::Ident, "type name");
        if (t.text == "bool") return Type::boolean();
        if (t.text == "unit") return Type::unit();
        IntKind kind{256, false};
        if (builtin_int_type(t.text, &kind)) return Type::intk(kind);
        // ADT vs record resolved by the checker.
        Type ty;
        ty.k = Type::K::Unresolved;
        ty.name = t.text;
        return ty;
    }

    Type parse_type() { return parse_atomic_type(); }

    // ---- expressions ----
    //
    // precedence, loosest to tightest:
    //   seq `;`  >  let/if/while/match/raise forms  >  assign (:= <-)
    //   >  ||  >  &&  >  not  >  comparisons  >  + -  >  * / %
    //   >  application  >  postfix (.field, [key])  >  primary

    Expr parse_expr() {
        Expr first = parse_nonseq();
        if (at(Tok::Semi)) {
            Expr seq = Expr::make(Expr::K::Seq, cur().loc);
            next();
            seq.kids.push_back(std::move(first));
            seq.kids.push_back(parse_expr());
            return seq;
        }
        return first;
    }

    Expr parse_nonseq() {
        switch (cur().kind) {
        case Tok::KwLet: {
            Expr e = Expr::make(Expr::K::Let, next().loc);
            e.flag = accept(Tok::KwMut);
            e.name = expect(Tok::Ident, "binding name").text;
            expect(Tok::Eq, "`=`");
            e.kids.push_back(parse_nonseq());
            expect(Tok::KwIn, "`in`");
            e.kids.push_back(parse_expr());
            return e;
        }
        case Tok::KwIf: {
            Expr e = Expr::make(Expr::K::If, next().loc);
            e.kids.push_back(parse_nonseq());
            expect(Tok::KwThen, "`then`");
            e.kids.push_back(parse_nonseq());
            if (accept(Tok::KwElse)) e.kids.push_back(parse_nonseq());
            return e;
        }
        case Tok::KwWhile: {
            Expr e = Expr::make(Expr::K::While, next().loc);
            e.kids.push_back(parse_expr());
            expect(Tok::KwDo, "`do`");
            e.kids.push_back(parse_expr());
            expect(Tok::KwDone, "`done`");
            return e;
        }
        case Tok::KwMatch: return parse_match();
        case Tok::KwRaise: {
            Expr e = Expr::make(Expr::K::Raise, next().loc);
            e.name = expect(Tok::Ident, "exception name").text;
            return e;
        }
        default: return parse_assign();
        }
    }

    Expr parse_match() {
        Expr e = Expr::make(Expr::K::Match, expect(Tok::KwMatch, "`match`").loc);
        e.kids.push_back(parse_expr());
        expect(Tok::KwWith, "`with`");
        accept(Tok::Pipe);
        do {
            MatchArm arm;
            arm.loc = cur().loc;
            arm.ctor = expect(Tok::Ident, "constructor pattern").text;
            while (at(Tok::Ident) || at(Tok::Underscore) || at(Tok::LParen)) {
                if (at(Tok::LParen))
                    throw CompileError(cur().loc, "non-nested-patterns",
                                       "nested patterns are not supported; bind a variable and "
                                       "match it separately");
                arm.binders.push_back(next().text);
            }
            expect(Tok::Arrow, "`->`");
            arm.body.push_back(parse_nonseq());
            e.arms.push_back(std::move(arm));
        } while (accept(Tok::Pipe));
        expect(Tok::KwEnd, "`end`");
        return e;
    }

    Expr parse_assign() {
        Expr lhs = parse_or();
        if (at(Tok::ColonEq)) {
            if (lhs.k != Expr::K::Var)
                fail("parse", "`:=` needs a variable on the left");
            Expr e = Expr::make(Expr::K::VarAssign, next().loc);
            e.name = lhs.name;
            e.kids.push_back(parse_nonseq());
            return e;
        }
        if (at(Tok::LArrow)) {
            SrcLoc loc = next().loc;
            if (lhs.k == Expr::K::FieldRead) {
                Expr e = Expr::make(Expr::K::FieldAssign, loc);
                e.field = lhs.field;
                e.kids.push_back(std::move(lhs.kids[0]));
                e.kids.push_back(parse_nonseq());
                return e;
            }
            if (lhs.k == Expr::K::MapRead) {
                Expr e = Expr::make(Expr::K::MapAssign, loc);
                e.name = lhs.name;
                e.kids.push_back(std::move(lhs.kids[0]));
                e.kids.push_back(parse_nonseq());
                return e;
            }
            throw CompileError(loc, "parse", "`<-` needs a field or map entry on the left");
        }
        return lhs;
    }

    Expr parse_or() {
        Expr lhs = parse_and();
        while (at(Tok::OrOr)) {
            Expr e = Expr::make(Expr::K::Bin, next().loc);
            e.op = BinOp::Or;
            e.kids.push_back(std::move(lhs));
            e.kids.push_back(parse_and());
            lhs = std::move(e);
        }
        return lhs;
    }

    Expr parse_and() {
        Expr lhs = parse_not();
        while (at(Tok::AndAnd)) {
            Expr e = Expr::make(Expr::K::Bin, next().loc);
            e.op = BinOp::And;
            e.kids.push_back(std::move(lhs));
            e.kids.push_back(parse_not());
            lhs = std::move(e);
        }
        return lhs;
    }

    Expr parse_not() {
        if (at(Tok::KwNot)) {
            Expr e = Expr::make(Expr::K::Not, next().loc);
            e.kids.push_back(parse_not());
            return e;
        }
        return parse_cmp();
    }

    Expr parse_cmp() {
        Expr lhs = parse_add();
        BinOp op;
        switch (cur().kind) {
        case Tok::Eq: op = BinOp::Eq; break;
        case Tok::Ne: op = BinOp::Ne; break;
        case Tok::Lt: op = BinOp::Lt; break;
        case Tok::Le: op = BinOp::Le; break;
        case Tok::Gt: op = BinOp::Gt; break;
        case Tok::Ge: op = BinOp::Ge; break;
        default: return lhs;
        }
        Expr e = Expr::make(Expr::K::Bin, next().loc);
        e.op = op;
        e.kids.push_back(std::move(lhs));
        e.kids.push_back(parse_add());
        return e;  // comparisons do not chain
    }

    Expr parse_add() {
        Expr lhs = parse_mul();
        for (;;) {
            BinOp op;
            if (at(Tok::Plus)) op = BinOp::Add;
            else if (at(Tok::Minus)) op = BinOp::Sub;
            else break;
            Expr e = Expr::make(Expr::K::Bin, next().loc);
            e.op = op;
            e.kids.push_back(std::move(lhs));
            e.kids.push_back(parse_mul());
            lhs = std::move(e);
        }
        return lhs;
    }

    Expr parse_mul() {
        Expr lhs = parse_app();
        for (;;) {
            BinOp op;
            if (at(Tok::Star)) op = BinOp::Mul;
            else if (at(Tok::Slash)) op = BinOp::Div;
            else if (at(Tok::Percent)) op = BinOp::Mod;
            else break;
            Expr e = Expr::make(Expr::K::Bin, next().loc);
            e.op = op;
            e.kids.push_back(std::move(lhs));
            e.kids.push_back(parse_app());
            lhs = std::move(e);
        }
        return lhs;
    }

    bool primary_starts() const {
        switch (cur().kind) {
        case Tok::Int:
        case Tok::Ident:
        case Tok::LParen:
        case Tok::LBrace:
        case Tok::KwTrue:
        case Tok::KwFalse:
        case Tok::KwCaller:
        case Tok::KwGas:
        case Tok::KwAlloc:
            return true;
        default:
            return false;
        }
    }

    Expr parse_app() {
        // keyword intrinsics taking argument lists
        switch (cur().kind) {
        case Tok::KwMem: {
            Expr e = Expr::make(Expr::K::MapMem, next().loc);
            e.name = expect(Tok::Ident, "map name").text;
            e.kids.push_back(parse_postfix());
            return e;
        }
        case Tok::KwDel: {
            Expr e = Expr::make(Expr::K::MapDel, next().loc);
            e.name = expect(Tok::Ident, "map name").text;
            e.kids.push_back(parse_postfix());
            return e;
        }
        case Tok::KwEmit: {
            Expr e = Expr::make(Expr::K::Emit, next().loc);
            e.name = expect(Tok::Ident, "event name").text;
            e.kids.push_back(parse_postfix());
            return e;
        }
        case Tok::KwGuard: {
            Expr e = Expr::make(Expr::K::Guard, next().loc);
            e.kids.push_back(parse_postfix());
            e.name = expect(Tok::Ident, "exception name").text;
            return e;
        }
        case Tok::KwSend: {
            Expr e = Expr::make(Expr::K::Send, next().loc);
            e.kids.push_back(parse_postfix());
            e.kids.push_back(parse_postfix());
            return e;
        }
        case Tok::KwAddGas: {
            Expr e = Expr::make(Expr::K::AddGas, next().loc);
            e.kids.push_back(parse_postfix());
            e.kids.push_back(parse_postfix());
            return e;
        }
        case Tok::KwOld: {
            Expr e = Expr::make(Expr::K::Old, next().loc);
            e.kids.push_back(parse_postfix());
            return e;
        }
        default: break;
        }

        Expr head = parse_postfix();
        // juxtaposition application: `f a b`, `Cons x l`
        if ((head.k == Expr::K::Var) && primary_starts()) {
            Expr call = Expr::make(Expr::K::Call, head.loc);
            call.name = head.name;
            while (primary_starts()) call.kids.push_back(parse_postfix());
            return call;  // Call vs CtorApp resolved by the checker
        }
        return head;
    }

    Expr parse_postfix() {
        Expr e = parse_primary();
        for (;;) {
            if (at(Tok::Dot)) {
                SrcLoc loc = next().loc;
                Expr fr = Expr::make(Expr::K::FieldRead, loc);
                fr.field = expect(Tok::Ident, "field name").text;
                fr.kids.push_back(std::move(e));
                e = std::move(fr);
            } else if (at(Tok::LBracket)) {
                SrcLoc loc = next().loc;
                if (e.k != Expr::K::Var)
                    throw CompileError(loc, "parse", "indexing applies to a map name");
                Expr mr = Expr::make(Expr::K::MapRead, loc);
                mr.name = e.name;
                mr.kids.push_back(parse_expr());
                expect(Tok::RBracket, "`]`");
                e = std::move(mr);
            } else {
                return e;
            }
        }
    }

    Expr parse_primary() {
        switch (cur().kind) {
        case Tok::Int: {
            Expr e = Expr::make(Expr::K::IntLit, cur().loc);
            e.value = next().value;
            return e;
        }
        case Tok::KwTrue:
        case Tok::KwFalse: {
            Expr e = Expr::make(Expr::K::BoolLit, cur().loc);
            e.bvalue = next().kind == Tok::KwTrue;
            return e;
        }
        case Tok::KwCaller: return Expr::make(Expr::K::Caller, next().loc);
        case Tok::KwGas: return Expr::make(Expr::K::GasCounter, next().loc);
        case Tok::KwAlloc: return Expr::make(Expr::K::AllocCounter, next().loc);
        case Tok::Ident: {
            Expr e = Expr::make(Expr::K::Var, cur().loc);
            e.name = next().text;
            return e;
        }
        case Tok::LParen: {
            SrcLoc loc = next().loc;
            if (accept(Tok::RParen)) return Expr::make(Expr::K::UnitLit, loc);
            Expr e = parse_expr();
            expect(Tok::RParen, "`)`");
            return e;
        }
        case Tok::LBrace: {
            Expr e = Expr::make(Expr::K::RecordLit, next().loc);
            do {
                if (at(Tok::RBrace)) break;
                e.rec_fields.push_back(expect(Tok::Ident, "field name").text);
                expect(Tok::Eq, "`=`");
                e.kids.push_back(parse_nonseq());
            } while (accept(Tok::Semi));
            expect(Tok::RBrace, "`}`");
            return e;
        }
        default:
            fail("parse", "expected an expression, found " + cur().describe());
        }
    }
};

}  // namespace

SourceModule parse(const std::vector<Token>& tokens, const std::string& module_name) {
    // `try` arrives as a plain identifier; reject it up front with the rule name.
    for (const Token& t : tokens) {
        if (t.kind == Tok::Ident && t.text == "try")
            throw CompileError(t.loc, "no-try-with", "`try ... with` is not part of the language");
    }
    return Parser(tokens).parse_module(module_name);
}

SourceModule parse_source(const std::string& text, const std::string& module_name) {
    return parse(tokenize(text), module_name);
}

// ---- pretty printing ----

bool is_comparison(BinOp op) {
    switch (op) {
    case BinOp::Lt: case BinOp::Le: case BinOp::Gt: case BinOp::Ge:
    case BinOp::Eq: case BinOp::Ne:
        return true;
    default:
        return false;
    }
}

const char* binop_symbol(BinOp op) {
    switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Mod: return "%";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Eq: return "=";
    case BinOp::Ne: return "<>";
    case BinOp::And: return "&&";
    case BinOp::Or: return "||";
    }
    return "?";
}

std::string Type::str() const {
    switch (k) {
    case K::Unresolved: return name;
    case K::Int: return kind.name();
    case K::Bool: return "bool";
    case K::Unit: return "unit";
    case K::Adt:
    case K::Record: return name;
    case K::Never: return "never";
    }
    return "?";
}

std::string print_type(const Type& t) { return t.str(); }

namespace {

void print_e(std::ostream& o, const Expr& e) {
    switch (e.k) {
    case Expr::K::IntLit: o << e.value.to_bigint().to_string(); return;
    case Expr::K::BoolLit: o << (e.bvalue ? "true" : "false"); return;
    case Expr::K::UnitLit: o << "()"; return;
    case Expr::K::Var: o << e.name; return;
    case Expr::K::Let:
        o << "(let " << (e.flag ? "mut " : "") << e.name << " = ";
        print_e(o, e.kids[0]);
        o << " in ";
        print_e(o, e.kids[1]);
        o << ")";
        return;
    case Expr::K::Seq:
        o << "(";
        print_e(o, e.kids[0]);
        o << "; ";
        print_e(o, e.kids[1]);
        o << ")";
        return;
    case Expr::K::If:
        o << "(if ";
        print_e(o, e.kids[0]);
        o << " then ";
        print_e(o, e.kids[1]);
        if (e.kids.size() == 3) {
            o << " else ";
            print_e(o, e.kids[2]);
        }
        o << ")";
        return;
    case Expr::K::While:
        o << "(while ";
        print_e(o, e.kids[0]);
        o << " do ";
        print_e(o, e.kids[1]);
        o << " done)";
        return;
    case Expr::K::Match:
        o << "(match ";
        print_e(o, e.kids[0]);
        o << " with";
        for (const MatchArm& a : e.arms) {
            o << " | " << a.ctor;
            for (const std::string& b : a.binders) o << " " << b;
            o << " -> ";
            print_e(o, a.body[0]);
        }
        o << " end)";
        return;
    case Expr::K::RecordLit:
        o << "{ ";
        for (size_t i = 0; i < e.kids.size(); ++i) {
            if (i) o << "; ";
            o << e.rec_fields[i] << " = ";
            print_e(o, e.kids[i]);
        }
        o << " }";
        return;
    case Expr::K::FieldRead:
        print_e(o, e.kids[0]);
        o << "." << e.field;
        return;
    case Expr::K::FieldAssign:
        o << "(";
        print_e(o, e.kids[0]);
        o << "." << e.field << " <- ";
        print_e(o, e.kids[1]);
        o << ")";
        return;
    case Expr::K::CtorApp:
    case Expr::K::Call:
        o << "(" << e.name;
        for (const Expr& kid : e.kids) {
            o << " ";
            print_e(o, kid);
        }
        o << ")";
        return;
    case Expr::K::Bin:
        o << "(";
        print_e(o, e.kids[0]);
        o << " " << binop_symbol(e.op) << " ";
        print_e(o, e.kids[1]);
        o << ")";
        return;
    case Expr::K::Not:
        o << "(not ";
        print_e(o, e.kids[0]);
        o << ")";
        return;
    case Expr::K::Raise: o << "(raise " << e.name << ")"; return;
    case Expr::K::AddGas:
        o << "(add_gas ";
        print_e(o, e.kids[0]);
        o << " ";
        print_e(o, e.kids[1]);
        o << ")";
        return;
    case Expr::K::Send:
        o << "(send ";
        print_e(o, e.kids[0]);
        o << " ";
        print_e(o, e.kids[1]);
        o << ")";
        return;
    case Expr::K::Guard:
        o << "(guard ";
        print_e(o, e.kids[0]);
        o << " " << e.name << ")";
        return;
    case Expr::K::Emit:
        o << "(emit " << e.name << " ";
        print_e(o, e.kids[0]);
        o << ")";
        return;
    case Expr::K::Caller: o << "caller"; return;
    case Expr::K::VarAssign:
        o << "(" << e.name << " := ";
        print_e(o, e.kids[0]);
        o << ")";
        return;
    case Expr::K::MapRead:
        o << e.name << "[";
        print_e(o, e.kids[0]);
        o << "]";
        return;
    case Expr::K::MapAssign:
        o << "(" << e.name << "[";
        print_e(o, e.kids[0]);
        o << "] <- ";
        print_e(o, e.kids[1]);
        o << ")";
        return;
    case Expr::K::MapMem:
        o << "(mem " << e.name << " ";
        print_e(o, e.kids[0]);
        o << ")";
        return;
    case Expr::K::MapDel:
        o << "(del " << e.name << " ";
        print_e(o, e.kids[0]);
        o << ")";
        return;
    case Expr::K::Old:
        o << "(old ";
        print_e(o, e.kids[0]);
        o << ")";
        return;
    case Expr::K::GasCounter: o << "gas"; return;
    case Expr::K::AllocCounter: o << "alloc"; return;
    }
}

}  // namespace

std::string print_expr(const Expr& e) {
    std::ostringstream o;
    print_e(o, e);
    return o.str();
}

std::string print_module(const SourceModule& m) {
    std::ostringstream o;
    for (const AdtDecl& a : m.adts) {
        o << "type " << a.name << " =";
        for (size_t i = 0; i < a.ctors.size(); ++i) {
            o << (i ? " | " : " ") << a.ctors[i].name;
            for (const Type& f : a.ctors[i].fields) o << " " << f.str();
        }
        o << "\n";
    }
    for (const RecordDecl& r : m.records) {
        o << "record " << r.name << " = { ";
        for (size_t i = 0; i < r.fields.size(); ++i) {
            if (i) o << "; ";
            o << r.fields[i].name << " : " << r.fields[i].type.str();
        }
        o << " }\n";
    }
    for (const GlobalDecl& g : m.globals) {
        o << "global " << g.name << " : " << (g.is_map ? "map" : g.type.str()) << "\n";
    }
    for (const ExceptionDecl& e : m.exceptions) o << "exception " << e.name << "\n";
    for (const FunDecl& f : m.functions) {
        o << "let " << (f.is_rec ? "rec " : "") << (f.is_public ? "public " : "private ")
          << f.name;
        if (f.gas_checking) o << " [@gas_checking]";
        for (const Param& p : f.params) o << " (" << p.name << " : " << p.type.str() << ")";
        o << " : " << f.ret.str() << "\n";
        for (const Expr& r : f.requires_) o << "  requires { " << print_expr(r) << " }\n";
        for (const Expr& e : f.ensures_) o << "  ensures { " << print_expr(e) << " }\n";
        for (const Expr& v : f.variant_) o << "  variant { " << print_expr(v) << " }\n";
        o << "= " << print_expr(f.body[0]) << "\n";
    }
    return o.str();
}

// ---- structural equality ----

const AdtDecl* SourceModule::find_adt(const std::string& n) const {
    for (const auto& d : adts)
        if (d.name == n) return &d;
    return nullptr;
}
const RecordDecl* SourceModule::find_record(const std::string& n) const {
    for (const auto& d : records)
        if (d.name == n) return &d;
    return nullptr;
}
const GlobalDecl* SourceModule::find_global(const std::string& n) const {
    for (const auto& d : globals)
        if (d.name == n) return &d;
    return nullptr;
}
const FunDecl* SourceModule::find_function(const std::string& n) const {
    for (const auto& d : functions)
        if (d.name == n) return &d;
    return nullptr;
}
bool SourceModule::has_exception(const std::string& n) const {
    for (const auto& d : exceptions)
        if (d.name == n) return true;
    return false;
}

bool ast_equal(const Expr& a, const Expr& b) {
    if (a.k != b.k || a.name != b.name || a.field != b.field || a.flag != b.flag) return false;
    if (a.k == Expr::K::IntLit && a.value != b.value) return false;
    if (a.k == Expr::K::BoolLit && a.bvalue != b.bvalue) return false;
    if (a.k == Expr::K::Bin && a.op != b.op) return false;
    if (a.rec_fields != b.rec_fields) return false;
    if (a.kids.size() != b.kids.size() || a.arms.size() != b.arms.size()) return false;
    for (size_t i = 0; i < a.kids.size(); ++i)
        if (!ast_equal(a.kids[i], b.kids[i])) return false;
    for (size_t i = 0; i < a.arms.size(); ++i) {
        if (a.arms[i].ctor != b.arms[i].ctor || a.arms[i].binders != b.arms[i].binders)
            return false;
        if (!ast_equal(a.arms[i].body[0], b.arms[i].body[0])) return false;
    }
    return true;
}

namespace {
bool type_syntax_equal(const Type& a, const Type& b) {
    // Unresolved user type names compare by spelling.
    return a.str() == b.str();
}
}  // namespace

bool ast_equal(const SourceModule& a, const SourceModule& b) {
    if (a.adts.size() != b.adts.size() || a.records.size() != b.records.size() ||
        a.globals.size() != b.globals.size() || a.exceptions.size() != b.exceptions.size() ||
        a.functions.size() != b.functions.size())
        return false;
    for (size_t i = 0; i < a.adts.size(); ++i) {
        if (a.adts[i].name != b.adts[i].name) return false;
        if (a.adts[i].ctors.size() != b.adts[i].ctors.size()) return false;
        for (size_t j = 0; j < a.adts[i].ctors.size(); ++j) {
            if (a.adts[i].ctors[j].name != b.adts[i].ctors[j].name) return false;
            if (a.adts[i].ctors[j].fields.size() != b.adts[i].ctors[j].fields.size()) return false;
            for (size_t k = 0; k < a.adts[i].ctors[j].fields.size(); ++k)
                if (!type_syntax_equal(a.adts[i].ctors[j].fields[k], b.adts[i].ctors[j].fields[k]))
                    return false;
        }
    }
    for (size_t i = 0; i < a.records.size(); ++i) {
        if (a.records[i].name != b.records[i].name) return false;
        if (a.records[i].fields.size() != b.records[i].fields.size()) return false;
        for (size_t j = 0; j < a.records[i].fields.size(); ++j) {
            if (a.records[i].fields[j].name != b.records[i].fields[j].name) return false;
            if (!type_syntax_equal(a.records[i].fields[j].type, b.records[i].fields[j].type))
                return false;
        }
    }
    for (size_t i = 0; i < a.globals.size(); ++i) {
        if (a.globals[i].name != b.globals[i].name || a.globals[i].is_map != b.globals[i].is_map)
            return false;
        if (!a.globals[i].is_map && !type_syntax_equal(a.globals[i].type, b.globals[i].type))
            return false;
    }
    for (size_t i = 0; i < a.exceptions.size(); ++i)
        if (a.exceptions[i].name != b.exceptions[i].name) return false;
    for (size_t i = 0; i < a.functions.size(); ++i) {
        const FunDecl& fa = a.functions[i];
        const FunDecl& fb = b.functions[i];
        if (fa.name != fb.name || fa.is_rec != fb.is_rec || fa.is_public != fb.is_public ||
            fa.gas_checking != fb.gas_checking)
            return false;
        if (fa.params.size() != fb.params.size()) return false;
        for (size_t j = 0; j < fa.params.size(); ++j) {
            if (fa.params[j].name != fb.params[j].name) return false;
            if (!type_syntax_equal(fa.params[j].type, fb.params[j].type)) return false;
        }
        if (!type_syntax_equal(fa.ret, fb.ret)) return false;
        auto specs_equal = [](const std::vector<Expr>& xs, const std::vector<Expr>& ys) {
            if (xs.size() != ys.size()) return false;
            for (size_t j = 0; j < xs.size(); ++j)
                if (!ast_equal(xs[j], ys[j])) return false;
            return true;
        };
        if (!specs_equal(fa.requires_, fb.requires_) || !specs_equal(fa.ensures_, fb.ensures_) ||
            !specs_equal(fa.variant_, fb.variant_))
            return false;
        if (!ast_equal(fa.body[0], fb.body[0])) return false;
    }
    return true;
}

}  // namespace mlcc
