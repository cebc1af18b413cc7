// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#include "mlcc/core_ir.hpp"

#include <optional>
#include "mlcc/parser.hpp"

namespace mlcc {

LayoutPlan plan_layout(const SourceModule& m) {
    LayoutPlan plan;
    uint64_t next_slot = 0;
    uint64_t next_map = 0;
    for (const GlobalDecl& g : m.globals) {
        if (g.is_map) {
            plan.map_base[g.name] = U256(1 + next_map).shl(201);
            ++next_map;
            continue;
        }
        if (g.type.k == Type::K::Record) {
            const RecordDecl* r = m.find_record(g.type.name);
            for (const FieldDecl& f : r->fields)
                plan.global_slots[g.name][f.name] = U256(next_slot++);
        } else {
            plan.global_slots[g.name][""] = U256(next_slot++);
        }
    }
    for (const RecordDecl& r : m.records) {
        plan.record_size[r.name] = static_cast<uint32_t>(r.fields.size());
        for (uint32_t i = 0; i < r.fields.size(); ++i)
            plan.record_field[r.name][r.fields[i].name] = i;
    }
    for (const AdtDecl& a : m.adts) {
        for (uint32_t i = 0; i < a.ctors.size(); ++i) {
            plan.ctor_tag[a.ctors[i].name] = i;
            plan.ctor_words[a.ctors[i].name] = 1 + static_cast<uint32_t>(a.ctors[i].fields.size());
        }
    }
    return plan;
}

namespace {

class Lowerer {
public:
    Lowerer(const SourceModule& m, const TypeInfo& info) : m_(m), info_(info) {}

    CoreFn lower_fn(const FunDecl& f) {
        CoreFn out;
        out.name = f.name;
        out.is_public = f.is_public;
        out.is_rec = f.is_rec;
        out.gas_checking = f.gas_checking;
        out.params = f.params;
        out.ret = f.ret;
        out.requires_ = f.requires_;
        out.ensures_ = f.ensures_;
        out.variant_ = f.variant_;

        next_slot_ = 0;
        scope_.clear();
        for (const Param& p : f.params) scope_[p.name] = next_slot_++;

        out.result = lower(f.body[0], out.body);
        out.n_slots = next_slot_;
        return out;
    }

private:
    const SourceModule& m_;
    const TypeInfo& info_;
    std::map<std::string, Slot> scope_;
    Slot next_slot_ = 0;

    Slot fresh() { return next_slot_++; }

    bool is_global(const std::string& name) const {
        return m_.find_global(name) != nullptr && !scope_.count(name);
    }

    CInstr make(CInstr::Op op, SrcLoc loc) {
        CInstr i;
        i.op = op;
        i.loc = loc;
        return i;
    }

    CAtom dst_atom(CInstr& i, Type t) {
        i.has_dst = true;
        i.dst = fresh();
        i.type = t;
        return CAtom::var(i.dst, std::move(t));
    }

    CAtom lower(const Expr& e, CBlock& out) {
        switch (e.k) {
        case Expr::K::IntLit: return CAtom::constant(e.value, e.type);
        case Expr::K::BoolLit: return CAtom::constant(U256(e.bvalue ? 1 : 0), e.type);
        case Expr::K::UnitLit: return CAtom::constant(U256(0), Type::unit());
        case Expr::K::Var: {
            if (auto it = scope_.find(e.name); it != scope_.end())
                return CAtom::var(it->second, e.type);
            // scalar global (record globals are read per-field)
            CInstr i = make(CInstr::Op::LoadGlobal, e.loc);
            i.name = e.name;
            CAtom d = dst_atom(i, e.type);
            out.push_back(std::move(i));
            return d;
        }
        case Expr::K::Let: {
            CAtom bound = lower(e.kids[0], out);
            CInstr cp = make(CInstr::Op::Copy, e.loc);
            cp.args.push_back(bound);
            CAtom cell = dst_atom(cp, e.kids[0].type);
            out.push_back(std::move(cp));
            auto saved = scope_.count(e.name) ? std::optional<Slot>(scope_[e.name]) : std::nullopt;
            scope_[e.name] = cell.slot;
            CAtom result = lower(e.kids[1], out);
            if (saved) scope_[e.name] = *saved;
            else scope_.erase(e.name);
            return result;
        }
        case Expr::K::VarAssign: {
            CAtom rhs = lower(e.kids[0], out);
            CInstr cp = make(CInstr::Op::Copy, e.loc);
            cp.args.push_back(rhs);
            cp.has_dst = true;
            cp.dst = scope_.at(e.name);
            cp.type = e.kids[0].type;
            out.push_back(std::move(cp));
            return CAtom::constant(U256(0), Type::unit());
        }
        case Expr::K::Seq: {
            lower(e.kids[0], out);
            return lower(e.kids[1], out);
        }
        case Expr::K::If: {
            CInstr i = make(CInstr::Op::If, e.loc);
            i.args.push_back(lower(e.kids[0], out));
            i.a_result = lower(e.kids[1], i.a);
            if (e.kids.size() == 3) {
                i.b_result = lower(e.kids[2], i.b);
            } else {
                i.b_result = CAtom::constant(U256(0), Type::unit());
            }
            CAtom d = dst_atom(i, e.type.k == Type::K::Never ? Type::unit() : e.type);
            out.push_back(std::move(i));
            return d;
        }
        case Expr::K::While: {
            CInstr i = make(CInstr::Op::While, e.loc);
            i.a_result = lower(e.kids[0], i.a);
            lower(e.kids[1], i.b);
            out.push_back(std::move(i));
            return CAtom::constant(U256(0), Type::unit());
        }
        case Expr::K::Match: {
            CInstr i = make(CInstr::Op::Match, e.loc);
            i.args.push_back(lower(e.kids[0], out));
            for (const MatchArm& arm : e.arms) {
                CArm carm;
                carm.ctor = arm.ctor;
                carm.tag = info_.ctors.at(arm.ctor).tag;
                std::vector<std::pair<std::string, std::optional<Slot>>> saved;
                for (const std::string& b : arm.binders) {
                    Slot s = fresh();
                    carm.binders.push_back(s);
                    if (b != "_") {
                        saved.emplace_back(b, scope_.count(b) ? std::optional<Slot>(scope_[b])
                                                              : std::nullopt);
                        scope_[b] = s;
                    }
                }
                carm.result = lower(arm.body[0], carm.body);
                for (auto it = saved.rbegin(); it != saved.rend(); ++it) {
                    if (it->second) scope_[it->first] = *it->second;
                    else scope_.erase(it->first);
                }
                i.arms.push_back(std::move(carm));
            }
            CAtom d = dst_atom(i, e.type.k == Type::K::Never ? Type::unit() : e.type);
            out.push_back(std::move(i));
            return d;
        }
        case Expr::K::RecordLit: {
            CInstr i = make(CInstr::Op::AllocRecord, e.loc);
            i.name = e.name;
            // field order follows the declaration, not the literal
            const RecordDecl* r = m_.find_record(e.name);
            std::vector<CAtom> by_decl(r->fields.size());
            for (size_t k = 0; k < e.rec_fields.size(); ++k) {
                CAtom v = lower(e.kids[k], out);
                for (size_t fi = 0; fi < r->fields.size(); ++fi)
                    if (r->fields[fi].name == e.rec_fields[k]) by_decl[fi] = v;
            }
            i.args = std::move(by_decl);
            CAtom d = dst_atom(i, e.type);
            out.push_back(std::move(i));
            return d;
        }
        case Expr::K::CtorApp: {
            CInstr i = make(CInstr::Op::AllocCtor, e.loc);
            i.name = e.name;
            for (const Expr& kid : e.kids) i.args.push_back(lower(kid, out));
            CAtom d = dst_atom(i, e.type);
            out.push_back(std::move(i));
            return d;
        }
        case Expr::K::FieldRead: {
            const Expr& root = e.kids[0];
            if (root.k == Expr::K::Var && is_global(root.name)) {
                CInstr i = make(CInstr::Op::LoadGlobal, e.loc);
                i.name = root.name;
                i.field = e.field;
                CAtom d = dst_atom(i, e.type);
                out.push_back(std::move(i));
                return d;
            }
            CInstr i = make(CInstr::Op::LoadField, e.loc);
            i.name = root.type.name;
            i.field = e.field;
            i.args.push_back(lower(root, out));
            CAtom d = dst_atom(i, e.type);
            out.push_back(std::move(i));
            return d;
        }
        case Expr::K::FieldAssign: {
            const Expr& root = e.kids[0];
            if (root.k == Expr::K::Var && is_global(root.name)) {
                CAtom v = lower(e.kids[1], out);
                CInstr i = make(CInstr::Op::StoreGlobal, e.loc);
                i.name = root.name;
                i.field = e.field;
                i.args.push_back(v);
                out.push_back(std::move(i));
                return CAtom::constant(U256(0), Type::unit());
            }
            CInstr i = make(CInstr::Op::StoreField, e.loc);
            i.name = root.type.name;
            i.field = e.field;
            i.args.push_back(lower(root, out));
            i.args.push_back(lower(e.kids[1], out));
            out.push_back(std::move(i));
            return CAtom::constant(U256(0), Type::unit());
        }
        case Expr::K::Call: {
            CInstr i = make(CInstr::Op::Call, e.loc);
            i.name = e.name;
            for (const Expr& kid : e.kids) i.args.push_back(lower(kid, out));
            CAtom d = dst_atom(i, e.type.k == Type::K::Never ? Type::unit() : e.type);
            out.push_back(std::move(i));
            return d;
        }
        case Expr::K::Bin: {
            CInstr i = make(CInstr::Op::Bin, e.loc);
            i.bin = e.op;
            i.args.push_back(lower(e.kids[0], out));
            i.args.push_back(lower(e.kids[1], out));
            CAtom d = dst_atom(i, e.type);
            out.push_back(std::move(i));
            return d;
        }
        case Expr::K::Not: {
            CInstr i = make(CInstr::Op::Not, e.loc);
            i.args.push_back(lower(e.kids[0], out));
            CAtom d = dst_atom(i, e.type);
            out.push_back(std::move(i));
            return d;
        }
        case Expr::K::Raise: {
            CInstr i = make(CInstr::Op::Raise, e.loc);
            i.name = e.name;
            out.push_back(std::move(i));
            return CAtom::constant(U256(0), Type::unit());
        }
        case Expr::K::Guard: {
            // guard c Ex == if c then () else raise Ex
            CInstr i = make(CInstr::Op::If, e.loc);
            i.args.push_back(lower(e.kids[0], out));
            i.a_result = CAtom::constant(U256(0), Type::unit());
            CInstr r = make(CInstr::Op::Raise, e.loc);
            r.name = e.name;
            i.b.push_back(std::move(r));
            i.b_result = CAtom::constant(U256(0), Type::unit());
            CAtom d = dst_atom(i, Type::unit());
            out.push_back(std::move(i));
            return d;
        }
        case Expr::K::AddGas: {
            CInstr i = make(CInstr::Op::AddGas, e.loc);
            i.gas_used = e.kids[0].value.as_u64();
            i.gas_alloc = e.kids[1].value.as_u64();
            out.push_back(std::move(i));
            return CAtom::constant(U256(0), Type::unit());
        }
        case Expr::K::Send: {
            CInstr i = make(CInstr::Op::Send, e.loc);
            i.args.push_back(lower(e.kids[0], out));
            i.args.push_back(lower(e.kids[1], out));
            out.push_back(std::move(i));
            return CAtom::constant(U256(0), Type::unit());
        }
        case Expr::K::Emit: {
            CInstr i = make(CInstr::Op::Emit, e.loc);
            i.name = e.name;
            i.args.push_back(lower(e.kids[0], out));
            out.push_back(std::move(i));
            return CAtom::constant(U256(0), Type::unit());
        }
        case Expr::K::Caller: {
            CInstr i = make(CInstr::Op::Caller, e.loc);
            CAtom d = dst_atom(i, e.type);
            out.push_back(std::move(i));
            return d;
        }
        case Expr::K::MapRead: {
            CInstr i = make(CInstr::Op::MapGet, e.loc);
            i.name = e.name;
            i.args.push_back(lower(e.kids[0], out));
            CAtom d = dst_atom(i, e.type);
            out.push_back(std::move(i));
            return d;
        }
        case Expr::K::MapMem: {
            CInstr i = make(CInstr::Op::MapMem, e.loc);
            i.name = e.name;
            i.args.push_back(lower(e.kids[0], out));
            CAtom d = dst_atom(i, e.type);
            out.push_back(std::move(i));
            return d;
        }
        case Expr::K::MapAssign: {
            CInstr i = make(CInstr::Op::MapPut, e.loc);
            i.name = e.name;
            i.args.push_back(lower(e.kids[0], out));
            i.args.push_back(lower(e.kids[1], out));
            out.push_back(std::move(i));
            return CAtom::constant(U256(0), Type::unit());
        }
        case Expr::K::MapDel: {
            CInstr i = make(CInstr::Op::MapDel, e.loc);
            i.name = e.name;
            i.args.push_back(lower(e.kids[0], out));
            out.push_back(std::move(i));
            return CAtom::constant(U256(0), Type::unit());
        }
        case Expr::K::Old:
        case Expr::K::GasCounter:
        case Expr::K::AllocCounter:
            throw CompileError(e.loc, "spec-language",
                               "specification construct in executable code");
        }
        throw CompileError(e.loc, "core-type", "unreachable lowering case");
    }
};

}  // namespace

CoreModule lower(SourceModule m, TypeInfo info) {
    CoreModule out;
    out.layout = plan_layout(m);
    Lowerer lw(m, info);
    for (const FunDecl& f : m.functions) out.fns.push_back(lw.lower_fn(f));
    out.src = std::move(m);
    out.info = std::move(info);
    return out;
}

CoreModule compile_to_core(const std::string& source, const std::string& module_name) {
    SourceModule m = parse_source(source, module_name);
    TypeInfo info = typecheck(m);
    return lower(std::move(m), std::move(info));
}

namespace {

struct CoreChecker {
    const CoreModule& m;

    [[noreturn]] void err(SrcLoc loc, const std::string& msg) const {
        throw CompileError(loc, "core-type", msg);
    }

    void check_atom(const CAtom& a, SrcLoc loc, const std::vector<Type>& slots) const {
        if (!a.is_const) {
            if (a.slot >= slots.size()) err(loc, "atom slot out of range");
            if (!(slots[a.slot] == a.type) && slots[a.slot].k != Type::K::Unresolved)
                err(loc, "atom type disagrees with its slot");
        }
    }

    void bind(std::vector<Type>& slots, Slot s, const Type& t, SrcLoc loc) const {
        if (s >= slots.size()) err(loc, "destination slot out of range");
        if (slots[s].k == Type::K::Unresolved) slots[s] = t;
        else if (!(slots[s] == t)) err(loc, "slot rebound at a different type");
    }

    void check_block(const CBlock& blk, std::vector<Type>& slots) const {
        for (const CInstr& i : blk) {
            for (const CAtom& a : i.args) check_atom(a, i.loc, slots);
            switch (i.op) {
            case CInstr::Op::Bin: {
                const Type& a = i.args[0].type;
                const Type& b = i.args[1].type;
                if (!(a == b)) err(i.loc, "binary operands disagree");
                if (is_comparison(i.bin)) {
                    if (i.type.k != Type::K::Bool) err(i.loc, "comparison must produce bool");
                } else if (i.bin == BinOp::And || i.bin == BinOp::Or) {
                    if (a.k != Type::K::Bool) err(i.loc, "logical op on non-bool");
                } else if (!a.is_int() || !(i.type == a)) {
                    err(i.loc, "arithmetic type mismatch");
                }
                break;
            }
            case CInstr::Op::Call: {
                const CoreFn* f = m.find(i.name);
                if (!f) err(i.loc, "call to unknown function");
                if (f->params.size() != i.args.size()) err(i.loc, "call arity mismatch");
                for (size_t k = 0; k < i.args.size(); ++k)
                    if (!(i.args[k].type == f->params[k].type))
                        err(i.loc, "call argument type mismatch");
                break;
            }
            case CInstr::Op::If:
            case CInstr::Op::Match:
                if (i.args[0].type.k != Type::K::Bool && i.op == CInstr::Op::If)
                    err(i.loc, "if condition must be bool");
                break;
            default: break;
            }
            if (i.has_dst) bind(slots, i.dst, i.type, i.loc);
            if (i.op == CInstr::Op::If || i.op == CInstr::Op::While) {
                std::vector<Type> in_a = slots;
                check_block(i.a, in_a);
                check_atom(i.a_result, i.loc, in_a);
                if (i.op == CInstr::Op::While && i.a_result.type.k != Type::K::Bool)
                    err(i.loc, "while condition must be bool");
                std::vector<Type> in_b = slots;
                check_block(i.b, in_b);
                if (i.op == CInstr::Op::If) check_atom(i.b_result, i.loc, in_b);
            }
            for (const CArm& arm : i.arms) {
                std::vector<Type> arm_slots = slots;
                const CtorInfo& c = m.info.ctors.at(arm.ctor);
                for (size_t k = 0; k < arm.binders.size(); ++k)
                    bind(arm_slots, arm.binders[k], c.fields[k], i.loc);
                check_block(arm.body, arm_slots);
                check_atom(arm.result, i.loc, arm_slots);
            }
        }
    }

    void check_fn(const CoreFn& f) const {
        std::vector<Type> slots(f.n_slots);
        for (size_t k = 0; k < f.params.size(); ++k) slots[k] = f.params[k].type;
        std::vector<Type> working = slots;
        check_block(f.body, working);
        check_atom(f.result, SrcLoc{}, working);
        if (f.ret.k != Type::K::Unit && f.result.type.k != Type::K::Never &&
            !(f.result.type == f.ret) && f.result.type.k != Type::K::Unit)
            err(SrcLoc{}, "function result type disagrees with signature");
    }
};

}  // namespace

void recheck_core(const CoreModule& m) {
    CoreChecker ck{m};
    for (const CoreFn& f : m.fns) ck.check_fn(f);
}

}  // namespace mlcc
