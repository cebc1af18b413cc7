// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mlcc/typecheck.hpp"

namespace mlcc {

/// Storage and volatile-memory layout shared by the backend and the
/// reference evaluator, so both sides produce identical storage keys.
///
/// Storage: every integer field of a global record (and every scalar
/// global) gets one 256-bit slot, assigned in declaration order. Map
/// globals get a large disjoint base; entry k lives at base + 2k (value)
/// and base + 2k + 1 (presence), which is injective for keys below 2^200.
///
/// Memory: ADT cells are one tag word plus one word per field; record
/// cells are one word per field.
struct LayoutPlan {
    std::map<std::string, std::map<std::string, U256>> global_slots;  // global -> field -> slot
    std::map<std::string, U256> map_base;
    std::map<std::string, uint32_t> record_size;  // words
    std::map<std::string, std::map<std::string, uint32_t>> record_field;
    std::map<std::string, uint32_t> ctor_tag;
    std::map<std::string, uint32_t> ctor_words;  // 1 + field count

    U256 slot_of(const std::string& global, const std::string& field) const {
        return global_slots.at(global).at(field);
    }
    static U256 map_value_slot(const U256& base, const U256& key) {
        return U256::add(base, U256::add(key, key));
    }
    static U256 map_presence_slot(const U256& base, const U256& key) {
        return U256::add(U256::add(base, U256::add(key, key)), U256(1));
    }
};

LayoutPlan plan_layout(const SourceModule& m);

using Slot = uint32_t;

struct CAtom {
    bool is_const = true;
    Slot slot = 0;
    U256 value;
    Type type;

    static CAtom constant(const U256& v, Type t) {
        CAtom a;
        a.value = v;
        a.type = std::move(t);
        return a;
    }
    static CAtom var(Slot s, Type t) {
        CAtom a;
        a.is_const = false;
        a.slot = s;
        a.type = std::move(t);
        return a;
    }
};

struct CInstr;
using CBlock = std::vector<CInstr>;

struct CArm {
    std::string ctor;
    uint32_t tag;
    std::vector<Slot> binders;  // slot per constructor field (bound even for `_`)
    CBlock body;
    CAtom result;
};

/// One named-intermediate instruction. Control flow is structured (If,
/// While, Match carry their blocks), which the backend flattens to jumps.
struct CInstr {
    enum class Op {
        Copy,         // dst = arg0
        Bin,          // dst = arg0 <bin> arg1
        Not,          // dst = !arg0
        LoadGlobal,   // dst = storage[name.field]
        StoreGlobal,  // storage[name.field] = arg0
        MapGet,       // dst = map name[arg0]
        MapMem,       // dst = presence bit
        MapPut,       // name[arg0] = arg1
        MapDel,       // delete name[arg0]
        AllocCtor,    // dst = fresh cell (tag, args...)   name = ctor
        AllocRecord,  // dst = fresh cell (args...)        name = record type
        LoadField,    // dst = mem[arg0 + field index]     name = record, field
        StoreField,   // mem[arg0 + field index] = arg1
        Call,         // dst = name(args...)
        If,           // arg0 cond; a/b blocks; a_result/b_result copied to dst
        While,        // a = condition block ending in a_result; b = body
        Match,        // arg0 scrutinee; arms
        Raise,        // name = exception
        AddGas,       // gas_used, gas_alloc constants
        Send,         // arg0 = to, arg1 = amount
        Emit,         // name = event, arg0 = payload
        Caller,       // dst = msg.sender
    };

    Op op;
    SrcLoc loc;
    bool has_dst = false;
    Slot dst = 0;
    Type type;  // dst type
    BinOp bin = BinOp::Add;
    std::string name, field;
    std::vector<CAtom> args;
    CBlock a, b;
    CAtom a_result, b_result;
    std::vector<CArm> arms;
    uint64_t gas_used = 0, gas_alloc = 0;
};

struct CoreFn {
    std::string name;
    bool is_public = false, is_rec = false, gas_checking = false;
    std::vector<Param> params;  // slots 0..params-1
    Type ret;
    uint32_t n_slots = 0;
    CBlock body;
    CAtom result;
    std::vector<Expr> requires_, ensures_, variant_;  // retained, spec-check only

    // Entry dispatch needs every parameter in one calldata word.
    bool word_params() const {
        for (const Param& p : params)
            if (!p.type.is_word()) return false;
        return true;
    }
};

struct CoreModule {
    SourceModule src;
    TypeInfo info;
    LayoutPlan layout;
    std::vector<CoreFn> fns;

    const CoreFn* find(const std::string& name) const {
        for (const CoreFn& f : fns)
            if (f.name == name) return &f;
        return nullptr;
    }
};

// Lowers a checked module to administrative form.
CoreModule lower(SourceModule m, TypeInfo info);

// Convenience: tokenize, parse, check, lower.
CoreModule compile_to_core(const std::string& source, const std::string& module_name = "main");

// Re-checks the lowered form: every instruction's operand and result types
// must be consistent. Throws CompileError("core-type", ...) on violation.
void recheck_core(const CoreModule& m);

}  // namespace mlcc
