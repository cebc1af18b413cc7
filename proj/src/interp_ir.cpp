// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#include "mlcc/interp_ir.hpp"

#include "mlcc/abi.hpp"

namespace mlcc {

std::string IRResult::outcome_name() const {
    switch (outcome) {
    case Outcome::Return: return "Return";
    case Outcome::Revert: return "Revert(" + revert_tag + ")";
    case Outcome::SpecViolation: return "SpecViolation";
    }
    return "?";
}

namespace {

struct RaiseSignal {
    std::string tag;
};
struct SpecSignal {
    std::string msg;
};

// Interprets a raw word as a mathematical integer according to its type.
BigInt math_view(const U256& raw, const Type& t) {
    if (t.is_int() && t.kind.is_signed && raw.bit(255))
        return raw.to_bigint() - BigInt::pow2(256);
    return raw.to_bigint();
}

class Evaluator {
public:
    Evaluator(const CoreModule& m, IRWorld& world, const IRCall& call)
        : m_(m), world_(world), call_(call) {}

    IRResult run() {
        IRResult res;
        const CoreFn* fn = m_.find(call_.fn);
        if (!fn) throw std::invalid_argument("ir_exec: unknown function " + call_.fn);
        if (fn->params.size() != call_.args.size())
            throw std::invalid_argument("ir_exec: arity mismatch for " + call_.fn);
        try {
            U256 ret = exec_fn(*fn, call_.args);
            res.outcome = IRResult::Outcome::Return;
            res.ret = ret;
            res.ret_is_word = fn->ret.is_word() || fn->ret.k == Type::K::Unit;
        } catch (const RaiseSignal& r) {
            res.outcome = IRResult::Outcome::Revert;
            res.revert_tag = r.tag;
        } catch (const SpecSignal& s) {
            res.outcome = IRResult::Outcome::SpecViolation;
            res.message = s.msg;
        }
        res.declared_gas = declared_gas_;
        res.declared_alloc = declared_alloc_;
        return res;
    }

private:
    const CoreModule& m_;
    IRWorld& world_;
    const IRCall& call_;
    std::vector<std::vector<U256>> heap_;
    BigInt declared_gas_, declared_alloc_;
    // active recursion variants: fn name -> stack of entry variant values
    std::map<std::string, std::vector<BigInt>> variants_;
    int depth_ = 0;

    struct OldSnapshot {
        std::map<U256, U256> storage;
        std::map<U256, U256> ether;
        BigInt gas, alloc;
    };

    U256 exec_fn(const CoreFn& fn, const std::vector<U256>& args) {
        // far above the interpreter's structural limit, so divergence on
        // depth always shows up as compiled-side resource exhaustion first
        if (++depth_ > 4096) throw SpecSignal{"call depth exceeded"};
        std::vector<U256> slots(fn.n_slots, U256(0));
        for (size_t i = 0; i < args.size(); ++i) slots[i] = args[i];

        OldSnapshot old;
        bool checking = call_.spec_check;
        if (checking) {
            old.storage = world_.storage;
            old.ether = world_.ether;
            old.gas = declared_gas_;
            old.alloc = declared_alloc_;
            for (const Expr& r : fn.requires_) {
                if (spec_eval(r, fn, slots, old, nullptr).is_zero())
                    throw SpecSignal{fn.name + ": requires violated: " + r.loc.str()};
            }
            if (!fn.variant_.empty()) {
                BigInt v = spec_math(fn.variant_[0], fn, slots, old, nullptr);
                auto& stack = variants_[fn.name];
                if (!stack.empty()) {
                    const BigInt& parent = stack.back();
                    if (!(v < parent) || v < BigInt(0))
                        throw SpecSignal{fn.name + ": variant does not decrease"};
                }
                stack.push_back(v);
            }
        }

        exec_block(fn.body, fn, slots);
        U256 result = atom(fn.result, slots);

        if (checking) {
            for (const Expr& en : fn.ensures_) {
                if (spec_eval(en, fn, slots, old, &result).is_zero())
                    throw SpecSignal{fn.name + ": ensures violated: " + en.loc.str()};
            }
            if (!fn.variant_.empty()) variants_[fn.name].pop_back();
        }
        --depth_;
        return result;
    }

    U256 atom(const CAtom& a, const std::vector<U256>& slots) const {
        return a.is_const ? a.value : slots[a.slot];
    }

    void exec_block(const CBlock& blk, const CoreFn& fn, std::vector<U256>& slots) {
        for (const CInstr& i : blk) exec_instr(i, fn, slots);
    }

    void store(std::vector<U256>& slots, const CInstr& i, const U256& v) {
        if (i.has_dst) slots[i.dst] = v;
    }

    void exec_instr(const CInstr& i, const CoreFn& fn, std::vector<U256>& slots) {
        switch (i.op) {
        case CInstr::Op::Copy: store(slots, i, atom(i.args[0], slots)); return;
        case CInstr::Op::Bin: store(slots, i, eval_bin(i, slots)); return;
        case CInstr::Op::Not:
            store(slots, i, U256(atom(i.args[0], slots).is_zero() ? 1 : 0));
            return;
        case CInstr::Op::LoadGlobal:
            store(slots, i, sload(m_.layout.slot_of(i.name, i.field)));
            return;
        case CInstr::Op::StoreGlobal:
            sstore(m_.layout.slot_of(i.name, i.field), atom(i.args[0], slots));
            return;
        case CInstr::Op::MapGet: {
            U256 base = m_.layout.map_base.at(i.name);
            store(slots, i, sload(LayoutPlan::map_value_slot(base, atom(i.args[0], slots))));
            return;
        }
        case CInstr::Op::MapMem: {
            U256 base = m_.layout.map_base.at(i.name);
            store(slots, i, sload(LayoutPlan::map_presence_slot(base, atom(i.args[0], slots))));
            return;
        }
        case CInstr::Op::MapPut: {
            U256 base = m_.layout.map_base.at(i.name);
            U256 key = atom(i.args[0], slots);
            sstore(LayoutPlan::map_value_slot(base, key), atom(i.args[1], slots));
            sstore(LayoutPlan::map_presence_slot(base, key), U256(1));
            return;
        }
        case CInstr::Op::MapDel: {
            U256 base = m_.layout.map_base.at(i.name);
            U256 key = atom(i.args[0], slots);
            sstore(LayoutPlan::map_value_slot(base, key), U256(0));
            sstore(LayoutPlan::map_presence_slot(base, key), U256(0));
            return;
        }
        case CInstr::Op::AllocCtor: {
            std::vector<U256> cell;
            cell.push_back(U256(m_.layout.ctor_tag.at(i.name)));
            for (const CAtom& a : i.args) cell.push_back(atom(a, slots));
            heap_.push_back(std::move(cell));
            store(slots, i, U256(heap_.size() - 1));
            return;
        }
        case CInstr::Op::AllocRecord: {
            std::vector<U256> cell;
            for (const CAtom& a : i.args) cell.push_back(atom(a, slots));
            heap_.push_back(std::move(cell));
            store(slots, i, U256(heap_.size() - 1));
            return;
        }
        case CInstr::Op::LoadField: {
            uint32_t idx = m_.layout.record_field.at(i.name).at(i.field);
            const auto& cell = heap_.at(atom(i.args[0], slots).as_u64());
            store(slots, i, cell.at(idx));
            return;
        }
        case CInstr::Op::StoreField: {
            uint32_t idx = m_.layout.record_field.at(i.name).at(i.field);
            auto& cell = heap_.at(atom(i.args[0], slots).as_u64());
            cell.at(idx) = atom(i.args[1], slots);
            return;
        }
        case CInstr::Op::Call: {
            const CoreFn* callee = m_.find(i.name);
            std::vector<U256> args;
            for (const CAtom& a : i.args) args.push_back(atom(a, slots));
            store(slots, i, exec_fn(*callee, args));
            return;
        }
        case CInstr::Op::If: {
            if (!atom(i.args[0], slots).is_zero()) {
                exec_block(i.a, fn, slots);
                store(slots, i, atom(i.a_result, slots));
            } else {
                exec_block(i.b, fn, slots);
                store(slots, i, atom(i.b_result, slots));
            }
            return;
        }
        case CInstr::Op::While: {
            for (;;) {
                exec_block(i.a, fn, slots);
                if (atom(i.a_result, slots).is_zero()) break;
                exec_block(i.b, fn, slots);
            }
            return;
        }
        case CInstr::Op::Match: {
            const auto& cell = heap_.at(atom(i.args[0], slots).as_u64());
            uint64_t tag = cell.at(0).as_u64();
            for (const CArm& arm : i.arms) {
                if (arm.tag != tag) continue;
                for (size_t b = 0; b < arm.binders.size(); ++b)
                    slots[arm.binders[b]] = cell.at(1 + b);
                exec_block(arm.body, fn, slots);
                store(slots, i, atom(arm.result, slots));
                return;
            }
            throw SpecSignal{"match fell through (corrupt tag)"};
        }
        case CInstr::Op::Raise: throw RaiseSignal{i.name};
        case CInstr::Op::AddGas:
            declared_gas_ += BigInt::from_u64(i.gas_used);
            declared_alloc_ += BigInt::from_u64(i.gas_alloc);
            return;
        case CInstr::Op::Send: {
            U256 to = atom(i.args[0], slots);
            U256 amount = atom(i.args[1], slots);
            set_ether(call_.self, U256::sub(ether_of(call_.self), amount));
            set_ether(to, U256::add(ether_of(to), amount));
            return;
        }
        case CInstr::Op::Emit: {
            LogEntry log;
            log.topic = U256(stable_hash32(i.name));
            auto bytes = atom(i.args[0], slots).to_bytes();
            log.data.assign(bytes.begin(), bytes.end());
            world_.logs.push_back(std::move(log));
            return;
        }
        case CInstr::Op::Caller: store(slots, i, call_.caller); return;
        }
    }

    U256 ether_of(const U256& a) const {
        auto it = world_.ether.find(a);
        return it == world_.ether.end() ? U256(0) : it->second;
    }

    // zero balances are erased, matching the machine world's normal form
    void set_ether(const U256& a, const U256& v) {
        if (v.is_zero()) world_.ether.erase(a);
        else world_.ether[a] = v;
    }

    U256 sload(const U256& slot) const {
        auto it = world_.storage.find(slot);
        return it == world_.storage.end() ? U256(0) : it->second;
    }

    void sstore(const U256& slot, const U256& v) {
        if (v.is_zero()) world_.storage.erase(slot);
        else world_.storage[slot] = v;
    }

    U256 eval_bin(const CInstr& i, const std::vector<U256>& slots) {
        U256 a = atom(i.args[0], slots);
        U256 b = atom(i.args[1], slots);
        const Type& t = i.args[0].type;
        bool signed_int = t.is_int() && t.kind.is_signed;

        if (call_.spec_check && t.is_int() &&
            (i.bin == BinOp::Add || i.bin == BinOp::Sub || i.bin == BinOp::Mul ||
             i.bin == BinOp::Div || i.bin == BinOp::Mod)) {
            BigInt ma = math_view(a, t), mb = math_view(b, t);
            BigInt exact;
            bool defined = true;
            switch (i.bin) {
            case BinOp::Add: exact = ma + mb; break;
            case BinOp::Sub: exact = ma - mb; break;
            case BinOp::Mul: exact = ma * mb; break;
            case BinOp::Div:
            case BinOp::Mod:
                if (mb.is_zero()) defined = false;
                else exact = i.bin == BinOp::Div ? ma / mb : ma % mb;
                break;
            default: break;
            }
            if (!defined)
                throw SpecSignal{"division by zero at " + i.loc.str()};
            if (exact < t.kind.min_value() || exact > t.kind.max_value())
                throw SpecSignal{"arithmetic overflow (" + t.kind.name() + ") at " + i.loc.str()};
        }

        auto bias = [](const U256& x) { return U256::add(x, U256::pow2(255)); };
        switch (i.bin) {
        case BinOp::Add: return U256::add(a, b);
        case BinOp::Sub: return U256::sub(a, b);
        case BinOp::Mul: return U256::mul(a, b);
        case BinOp::Div: return U256::div(a, b);
        case BinOp::Mod: return U256::mod(a, b);
        case BinOp::Lt:
            return U256((signed_int ? bias(a) < bias(b) : a < b) ? 1 : 0);
        case BinOp::Gt:
            return U256((signed_int ? bias(a) > bias(b) : a > b) ? 1 : 0);
        case BinOp::Le:
            return U256((signed_int ? !(bias(a) > bias(b)) : !(a > b)) ? 1 : 0);
        case BinOp::Ge:
            return U256((signed_int ? !(bias(a) < bias(b)) : !(a < b)) ? 1 : 0);
        case BinOp::Eq: return U256(a == b ? 1 : 0);
        case BinOp::Ne: return U256(a == b ? 0 : 1);
        case BinOp::And: return a.and_(b);
        case BinOp::Or: return a.or_(b);
        }
        return U256(0);
    }

    // ---- executable specification fragment ----

    U256 spec_eval(const Expr& e, const CoreFn& fn, const std::vector<U256>& slots,
                   const OldSnapshot& old, const U256* result) {
        BigInt v = spec_math(e, fn, slots, old, result);
        return v.is_zero() ? U256(0) : U256(1);
    }

    BigInt spec_math(const Expr& e, const CoreFn& fn, const std::vector<U256>& slots,
                     const OldSnapshot& old, const U256* result, bool in_old = false) {
        auto storage_at = [&](const U256& slot) -> U256 {
            const auto& st = in_old ? old.storage : world_.storage;
            auto it = st.find(slot);
            return it == st.end() ? U256(0) : it->second;
        };
        switch (e.k) {
        case Expr::K::IntLit: return e.value.to_bigint();
        case Expr::K::BoolLit: return BigInt(e.bvalue ? 1 : 0);
        case Expr::K::GasCounter:
            return in_old ? old.gas : declared_gas_;
        case Expr::K::AllocCounter:
            return in_old ? old.alloc : declared_alloc_;
        case Expr::K::Caller: return call_.caller.to_bigint();
        case Expr::K::Old:
            return spec_math(e.kids[0], fn, slots, old, result, true);
        case Expr::K::Var: {
            for (size_t p = 0; p < fn.params.size(); ++p) {
                if (fn.params[p].name == e.name)
                    return math_view(slots[p], fn.params[p].type);
            }
            if (const GlobalDecl* g = m_.src.find_global(e.name); g && !g->is_map)
                return math_view(storage_at(m_.layout.slot_of(e.name, "")), g->type);
            throw SpecSignal{"specification variable `" + e.name + "` is not a parameter"};
        }
        case Expr::K::FieldRead: {
            const Expr& root = e.kids[0];
            if (root.k == Expr::K::Var && m_.src.find_global(root.name))
                return math_view(storage_at(m_.layout.slot_of(root.name, e.field)), e.type);
            throw SpecSignal{"specification field read must target a global"};
        }
        case Expr::K::MapRead: {
            U256 base = m_.layout.map_base.at(e.name);
            U256 key = U256::from_bigint_truncated(
                spec_math(e.kids[0], fn, slots, old, result, in_old));
            return storage_at(LayoutPlan::map_value_slot(base, key)).to_bigint();
        }
        case Expr::K::MapMem: {
            U256 base = m_.layout.map_base.at(e.name);
            U256 key = U256::from_bigint_truncated(
                spec_math(e.kids[0], fn, slots, old, result, in_old));
            return storage_at(LayoutPlan::map_presence_slot(base, key)).to_bigint();
        }
        case Expr::K::Not:
            return BigInt(spec_math(e.kids[0], fn, slots, old, result, in_old).is_zero() ? 1 : 0);
        case Expr::K::Bin: {
            BigInt a = spec_math(e.kids[0], fn, slots, old, result, in_old);
            BigInt b = spec_math(e.kids[1], fn, slots, old, result, in_old);
            switch (e.op) {
            case BinOp::Add: return a + b;
            case BinOp::Sub: return a - b;
            case BinOp::Mul: return a * b;
            case BinOp::Div:
                if (b.is_zero()) throw SpecSignal{"division by zero in contract clause"};
                return a / b;
            case BinOp::Mod:
                if (b.is_zero()) throw SpecSignal{"modulo by zero in contract clause"};
                return a % b;
            case BinOp::Lt: return BigInt(a < b ? 1 : 0);
            case BinOp::Le: return BigInt(a <= b ? 1 : 0);
            case BinOp::Gt: return BigInt(a > b ? 1 : 0);
            case BinOp::Ge: return BigInt(a >= b ? 1 : 0);
            case BinOp::Eq: return BigInt(a == b ? 1 : 0);
            case BinOp::Ne: return BigInt(a != b ? 1 : 0);
            case BinOp::And: return BigInt(!a.is_zero() && !b.is_zero() ? 1 : 0);
            case BinOp::Or: return BigInt(!a.is_zero() || !b.is_zero() ? 1 : 0);
            }
            return BigInt(0);
        }
        default:
            throw SpecSignal{"unsupported construct in contract clause at " + e.loc.str()};
        }
    }
};

}  // namespace

IRResult ir_exec(const CoreModule& m, IRWorld& world, const IRCall& call) {
    IRWorld work = world;
    Evaluator ev(m, work, call);
    IRResult res = ev.run();
    if (res.outcome == IRResult::Outcome::Return) world = std::move(work);
    return res;
}

}  // namespace mlcc
