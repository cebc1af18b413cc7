// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "mlcc/numeric.hpp"
#include "mlcc/source.hpp"

namespace mlcc {

/// Checker-assigned type. Maps are not first-class: map operations are
/// typed structurally against the global map declaration they target.
struct Type {
    enum class K { Unresolved, Int, Bool, Unit, Adt, Record, Never };
    K k = K::Unresolved;
    IntKind kind{256, false};  // valid when k == Int
    std::string name;          // valid when k == Adt or Record

    static Type intk(IntKind ik) { return Type{K::Int, ik, ""}; }
    static Type boolean() { return Type{K::Bool, {256, false}, ""}; }
    static Type unit() { return Type{K::Unit, {256, false}, ""}; }
    static Type adt(std::string n) { return Type{K::Adt, {256, false}, std::move(n)}; }
    static Type record(std::string n) { return Type{K::Record, {256, false}, std::move(n)}; }
    static Type never() { return Type{K::Never, {256, false}, ""}; }

    bool is_int() const { return k == K::Int; }
    bool is_word() const { return k == K::Int || k == K::Bool; }  // fits one EVM word

    bool operator==(const Type& o) const {
        if (k != o.k) return false;
        if (k == K::Int) return kind == o.kind;
        if (k == K::Adt || k == K::Record) return name == o.name;
        return true;
    }
    std::string str() const;
};

enum class BinOp { Add, Sub, Mul, Div, Mod, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

bool is_comparison(BinOp op);
const char* binop_symbol(BinOp op);

struct MatchArm;

struct Expr {
    enum class K {
        IntLit, BoolLit, UnitLit, Var,
        Let,        // name, flag=mut, kids[0]=bound, kids[1]=body
        Seq,        // kids[0]; kids[1]
        If,         // kids[0] cond, kids[1] then, optional kids[2] else
        While,      // kids[0] cond, kids[1] body
        Match,      // kids[0] scrutinee, arms
        RecordLit,  // name=record type, rec_fields/kids aligned
        FieldRead,  // kids[0].field
        FieldAssign,// kids[0].field <- kids[1]
        CtorApp,    // name, kids = fields
        Call,       // name, kids = args
        Bin,        // op, kids[0], kids[1]
        Not,        // kids[0]
        Raise,      // name = exception
        AddGas,     // kids[0], kids[1] (constant literals)
        Send,       // kids[0]=to, kids[1]=amount
        Guard,      // kids[0] = condition, name = exception on failure
        Emit,       // name = event, kids[0] = payload
        Caller,
        VarAssign,  // name := kids[0]
        MapRead,    // name[kids[0]]
        MapAssign,  // name[kids[0]] <- kids[1]
        MapMem,     // mem name kids[0]
        MapDel,     // del name kids[0]
        Old,        // old kids[0] (spec language only)
        GasCounter, AllocCounter,  // spec language only
    };

    K k;
    SrcLoc loc;
    U256 value;        // IntLit
    bool bvalue = false;
    bool flag = false; // Let: mutable binding
    std::string name;
    std::string field;
    BinOp op = BinOp::Add;
    std::vector<Expr> kids;
    std::vector<MatchArm> arms;
    std::vector<std::string> rec_fields;
    Type type;  // filled by the checker

    static Expr make(K k, SrcLoc loc) {
        Expr e;
        e.k = k;
        e.loc = loc;
        return e;
    }
};

struct MatchArm {
    SrcLoc loc;
    std::string ctor;
    std::vector<std::string> binders;  // `_` means ignored
    std::vector<Expr> body;            // exactly one entry
};

struct CtorDecl {
    std::string name;
    std::vector<Type> fields;
};

struct AdtDecl {
    SrcLoc loc;
    std::string name;
    std::vector<CtorDecl> ctors;
};

struct FieldDecl {
    std::string name;
    Type type;
};

struct RecordDecl {
    SrcLoc loc;
    std::string name;
    std::vector<FieldDecl> fields;
};

/// `global g : rec_or_scalar` (one storage slot per integer field) or
/// `global m : map` (storage-backed uint256 -> uint256 with presence).
struct GlobalDecl {
    SrcLoc loc;
    std::string name;
    bool is_map = false;
    Type type;  // scalar or record type when !is_map
};

struct ExceptionDecl {
    SrcLoc loc;
    std::string name;
};

struct Param {
    std::string name;
    Type type;
};

struct FunDecl {
    SrcLoc loc;
    std::string name;
    bool is_rec = false;
    bool is_public = false;  // default private
    bool gas_checking = false;
    std::vector<Param> params;
    Type ret;
    std::vector<Expr> requires_;
    std::vector<Expr> ensures_;
    std::vector<Expr> variant_;  // empty or one entry
    std::vector<Expr> body;      // exactly one entry
};

struct SourceModule {
    std::string name;
    std::vector<AdtDecl> adts;
    std::vector<RecordDecl> records;
    std::vector<GlobalDecl> globals;
    std::vector<ExceptionDecl> exceptions;
    std::vector<FunDecl> functions;

    const AdtDecl* find_adt(const std::string& n) const;
    const RecordDecl* find_record(const std::string& n) const;
    const GlobalDecl* find_global(const std::string& n) const;
    const FunDecl* find_function(const std::string& n) const;
    bool has_exception(const std::string& n) const;
};

// Structural AST equality ignoring locations (parse/print round trips).
bool ast_equal(const Expr& a, const Expr& b);
bool ast_equal(const SourceModule& a, const SourceModule& b);

}  // namespace mlcc
