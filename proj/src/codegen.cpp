// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0
//
// Calling convention and frame discipline
//
// A call pushes the return label, then the arguments left to right (last
// argument on top), and jumps to the callee's entry. The callee allocates a
// frame from the free pointer (one word of saved frame pointer plus one
// word per slot), saves the caller's FP into frame[0], repoints the FP cell
// at 0x20, and spills the arguments into slots. On return the result is
// pushed, the caller's FP restored, and a SWAP1; JUMP consumes the return
// label. Locals, temporaries and parameters all live in the frame; the EVM
// stack only carries transient expression values, so recursion depth is
// bounded by the 1024-slot stack at roughly one word per active call.
//
// Memory cells 0x00 (scratch), 0x20 (frame pointer) and 0x40 (free
// pointer) are reserved; the heap starts at 0x60 and grows monotonically
// within a transaction. Every allocation (frames, constructor cells,
// record cells) goes through the free-pointer bump and is tagged with a
// zero-size allocation mark for the gas analyzer.

#include "mlcc/codegen.hpp"

#include "mlcc/abi.hpp"

namespace mlcc {

namespace {

class Codegen {
public:
    explicit Codegen(const CoreModule& m) : m_(m) {}

    SymProgram run() {
        emit_init();
        emit_dispatcher();
        for (const CoreFn& f : m_.fns) emit_function(f);
        return std::move(prog_);
    }

private:
    const CoreModule& m_;
    SymProgram prog_;
    const CoreFn* fn_ = nullptr;
    SymFnSpan* span_ = nullptr;
    uint64_t next_label_ = 0;

    // ---- emission helpers ----

    void op(uint8_t opcode, JumpKind j = JumpKind::None) {
        prog_.instrs.push_back(SymInstr::op(opcode, j));
    }
    void push(const U256& v) { prog_.instrs.push_back(SymInstr::push(v)); }
    void push(uint64_t v) { push(U256(v)); }
    void push_label(const std::string& l) { prog_.instrs.push_back(SymInstr::push_label(l)); }
    void label(const std::string& l) { prog_.instrs.push_back(SymInstr::label_def(l)); }
    void jumpdest(const std::string& l) {
        label(l);
        op(OP_JUMPDEST);
    }
    std::string fresh(const std::string& stem) {
        return stem + "_" + std::to_string(next_label_++);
    }
    void annotation(uint64_t used, uint64_t alloc) {
        SymInstr s;
        s.k = SymInstr::K::Annotation;
        s.a = used;
        s.b = alloc;
        prog_.instrs.push_back(s);
    }
    void alloc_site(uint64_t bytes) {
        SymInstr s;
        s.k = SymInstr::K::AllocSite;
        s.a = bytes;
        prog_.instrs.push_back(s);
    }

    // jump to a label, tagging the edge kind
    void jump_to(const std::string& l, JumpKind kind) {
        push_label(l);
        SymInstr j = SymInstr::op(OP_JUMP, kind);
        j.label = l;
        prog_.instrs.push_back(j);
    }
    void branch_to(const std::string& l) {  // consumes condition under the target
        push_label(l);
        SymInstr j = SymInstr::op(OP_JUMPI, JumpKind::Branch);
        j.label = l;
        prog_.instrs.push_back(j);
    }

    // ---- value plumbing ----

    // slot i lives at mem[FP + (1+i)*32]
    void push_slot_addr(Slot s) {
        push((1 + static_cast<uint64_t>(s)) * 32);
        push(kFramePtrCell);
        op(OP_MLOAD);
        op(OP_ADD);
    }
    void load_slot(Slot s) {
        push_slot_addr(s);
        op(OP_MLOAD);
    }
    void store_slot(Slot s) {  // value on top of stack
        push_slot_addr(s);
        op(OP_MSTORE);
    }
    void push_atom(const CAtom& a) {
        if (a.is_const) push(a.value);
        else load_slot(a.slot);
    }
    void store_dst(const CInstr& i) {
        if (i.has_dst) store_slot(i.dst);
        else op(OP_POP);
    }

    // allocate `words` fresh words; leaves the cell pointer on the stack
    void alloc_words(uint64_t words) {
        uint64_t bytes = words * 32;
        push(kFreePtrCell);
        op(OP_MLOAD);        // [ptr]
        op(OP_DUP1);         // [ptr, ptr]
        push(bytes);
        op(OP_ADD);          // [ptr, ptr+bytes]
        push(kFreePtrCell);
        op(OP_MSTORE);       // [ptr]
        alloc_site(bytes);
    }

    void revert_with_tag(uint32_t tag) {
        push(U256(tag));
        push(kScratchCell);
        op(OP_MSTORE);
        push(4);
        push(28);
        op(OP_REVERT);
    }

    // ---- program skeleton ----

    void emit_init() {
        push(kHeapStart);
        push(kFreePtrCell);
        op(OP_MSTORE);
        push(0);
        push(kFramePtrCell);
        op(OP_MSTORE);
    }

    void emit_dispatcher() {
        // selector = calldata[0..4) as the word's top 4 bytes
        push(U256::pow2(224));
        push(0);
        op(OP_CALLDATALOAD);
        op(OP_DIV);  // [sel]
        for (const CoreFn& f : m_.fns) {
            if (!f.word_params()) continue;
            op(OP_DUP1);
            push(U256(stable_hash32(f.name)));
            op(OP_EQ);
            branch_to("wrap_" + f.name);
        }
        revert_with_tag(stable_hash32("UnknownSelector"));

        for (const CoreFn& f : m_.fns) {
            if (!f.word_params()) continue;
            jumpdest("wrap_" + f.name);
            op(OP_POP);  // selector
            std::string ret = fresh("wret");
            push_label(ret);
            for (size_t i = 0; i < f.params.size(); ++i) {
                push(4 + 32 * i);
                op(OP_CALLDATALOAD);
            }
            jump_to("f_" + f.name, JumpKind::Call);
            jumpdest(ret);
            push(kScratchCell);
            op(OP_MSTORE);
            push(32);
            push(kScratchCell);
            op(OP_RETURN);
        }
    }

    void emit_function(const CoreFn& f) {
        fn_ = &f;
        SymFnSpan span;
        span.name = f.name;
        span.entry_label = "f_" + f.name;
        span.end_label = "fend_" + f.name;
        span.gas_checking = f.gas_checking;
        span.dispatchable = f.word_params();
        span.param_words = f.params.size();
        prog_.fn_spans.push_back(span);
        span_ = &prog_.fn_spans.back();

        jumpdest("f_" + f.name);
        // prologue: frame allocation, FP save/set, parameter spill
        uint64_t frame_words = 1 + f.n_slots;
        alloc_words(frame_words);        // [.., args.., fp]
        push(kFramePtrCell);
        op(OP_MLOAD);                    // [.., fp, oldfp]
        op(OP_DUP1 + 1);                     // [.., fp, oldfp, fp]
        op(OP_MSTORE);                   // [.., fp]   mem[fp] = oldfp
        push(kFramePtrCell);
        op(OP_MSTORE);                   // [..]       FP = fp
        for (size_t i = f.params.size(); i-- > 0;) store_slot(static_cast<Slot>(i));

        emit_block(f.body);

        // epilogue: result up, FP restore, jump back
        push_atom(f.result);             // [ret, result]
        push(kFramePtrCell);
        op(OP_MLOAD);                    // [ret, result, fp]
        op(OP_MLOAD);                    // [ret, result, oldfp]
        push(kFramePtrCell);
        op(OP_MSTORE);                   // [ret, result]
        op(OP_SWAP1);                    // [result, ret]
        std::string ret_site = fresh("ret_" + f.name);
        label(ret_site);
        span_->ret_labels.push_back(ret_site);
        op(OP_JUMP, JumpKind::Ret);
        label("fend_" + f.name);
        span_ = nullptr;
        fn_ = nullptr;
    }

    // ---- instruction selection ----

    void emit_block(const CBlock& blk) {
        for (const CInstr& i : blk) emit_instr(i);
    }

    void emit_instr(const CInstr& i) {
        switch (i.op) {
        case CInstr::Op::Copy:
            push_atom(i.args[0]);
            store_dst(i);
            return;
        case CInstr::Op::Bin: emit_bin(i); return;
        case CInstr::Op::Not:
            push_atom(i.args[0]);
            op(OP_ISZERO);
            store_dst(i);
            return;
        case CInstr::Op::LoadGlobal:
            push(m_.layout.slot_of(i.name, i.field));
            op(OP_SLOAD);
            store_dst(i);
            return;
        case CInstr::Op::StoreGlobal:
            push_atom(i.args[0]);
            push(m_.layout.slot_of(i.name, i.field));
            op(OP_SSTORE);
            return;
        case CInstr::Op::MapGet:
            push_map_slot(i.name, i.args[0], /*presence=*/false);
            op(OP_SLOAD);
            store_dst(i);
            return;
        case CInstr::Op::MapMem:
            push_map_slot(i.name, i.args[0], /*presence=*/true);
            op(OP_SLOAD);
            store_dst(i);
            return;
        case CInstr::Op::MapPut:
            push_atom(i.args[1]);
            push_map_slot(i.name, i.args[0], false);
            op(OP_SSTORE);
            push(1);
            push_map_slot(i.name, i.args[0], true);
            op(OP_SSTORE);
            return;
        case CInstr::Op::MapDel:
            push(0);
            push_map_slot(i.name, i.args[0], false);
            op(OP_SSTORE);
            push(0);
            push_map_slot(i.name, i.args[0], true);
            op(OP_SSTORE);
            return;
        case CInstr::Op::AllocCtor: {
            uint64_t words = m_.layout.ctor_words.at(i.name);
            alloc_words(words);  // [ptr]
            push(U256(m_.layout.ctor_tag.at(i.name)));
            op(OP_DUP1 + 1);
            op(OP_MSTORE);  // mem[ptr] = tag
            for (size_t k = 0; k < i.args.size(); ++k) store_cell_field(i.args[k], 1 + k);
            store_dst(i);
            return;
        }
        case CInstr::Op::AllocRecord: {
            uint64_t words = m_.layout.record_size.at(i.name);
            if (words == 0) words = 1;  // degenerate empty record still gets a cell
            alloc_words(words);
            for (size_t k = 0; k < i.args.size(); ++k) store_cell_field(i.args[k], k);
            store_dst(i);
            return;
        }
        case CInstr::Op::LoadField: {
            uint32_t idx = m_.layout.record_field.at(i.name).at(i.field);
            push_atom(i.args[0]);
            push(static_cast<uint64_t>(idx) * 32);
            op(OP_ADD);
            op(OP_MLOAD);
            store_dst(i);
            return;
        }
        case CInstr::Op::StoreField: {
            uint32_t idx = m_.layout.record_field.at(i.name).at(i.field);
            push_atom(i.args[1]);
            push_atom(i.args[0]);
            push(static_cast<uint64_t>(idx) * 32);
            op(OP_ADD);
            op(OP_MSTORE);
            return;
        }
        case CInstr::Op::Call: {
            std::string ret = fresh("cret");
            push_label(ret);
            for (const CAtom& a : i.args) push_atom(a);
            jump_to("f_" + i.name, JumpKind::Call);
            jumpdest(ret);
            store_dst(i);
            return;
        }
        case CInstr::Op::If: {
            std::string then_l = fresh("then");
            std::string end_l = fresh("fi");
            push_atom(i.args[0]);
            branch_to(then_l);
            emit_block(i.b);
            if (i.has_dst) {
                push_atom(i.b_result);
                store_slot(i.dst);
            }
            jump_to(end_l, JumpKind::Forward);
            jumpdest(then_l);
            emit_block(i.a);
            if (i.has_dst) {
                push_atom(i.a_result);
                store_slot(i.dst);
            }
            jumpdest(end_l);
            return;
        }
        case CInstr::Op::While: {
            std::string head = fresh("head");
            std::string exit = fresh("wend");
            jumpdest(head);
            span_->loop_head_labels.push_back(head);
            emit_block(i.a);
            push_atom(i.a_result);
            op(OP_ISZERO);
            branch_to(exit);
            emit_block(i.b);
            jump_to(head, JumpKind::Back);
            jumpdest(exit);
            return;
        }
        case CInstr::Op::Match: {
            std::string end_l = fresh("mend");
            push_atom(i.args[0]);  // [ptr]
            op(OP_DUP1);
            op(OP_MLOAD);          // [ptr, tag]
            std::vector<std::string> arm_labels;
            for (const CArm& arm : i.arms) {
                std::string l = fresh("arm");
                arm_labels.push_back(l);
                op(OP_DUP1);
                push(U256(arm.tag));
                op(OP_EQ);
                branch_to(l);
            }
            op(OP_INVALID);  // unreachable: arms are exhaustive
            for (size_t k = 0; k < i.arms.size(); ++k) {
                const CArm& arm = i.arms[k];
                jumpdest(arm_labels[k]);
                op(OP_POP);  // tag, leaving [ptr]
                for (size_t b = 0; b < arm.binders.size(); ++b) {
                    op(OP_DUP1);
                    push((1 + b) * 32);
                    op(OP_ADD);
                    op(OP_MLOAD);
                    store_slot(arm.binders[b]);
                }
                op(OP_POP);  // ptr
                emit_block(arm.body);
                if (i.has_dst) {
                    push_atom(arm.result);
                    store_slot(i.dst);
                }
                if (k + 1 < i.arms.size()) jump_to(end_l, JumpKind::Forward);
            }
            jumpdest(end_l);
            return;
        }
        case CInstr::Op::Raise:
            revert_with_tag(stable_hash32(i.name));
            return;
        case CInstr::Op::AddGas:
            annotation(i.gas_used, i.gas_alloc);
            return;
        case CInstr::Op::Send:
            push(0);  // retLen
            push(0);  // retOffset
            push(0);  // argsLen
            push(0);  // argsOffset
            push_atom(i.args[1]);  // value
            push_atom(i.args[0]);  // to
            push(kSendStipend);    // gas
            op(OP_CALL);
            op(OP_POP);  // result discarded
            return;
        case CInstr::Op::Emit:
            push_atom(i.args[0]);
            push(kScratchCell);
            op(OP_MSTORE);
            push(U256(stable_hash32(i.name)));  // topic
            push(32);                           // size
            push(kScratchCell);                 // offset
            op(OP_LOG1);
            return;
        case CInstr::Op::Caller:
            op(OP_CALLER);
            store_dst(i);
            return;
        }
        throw CodegenError("unsupported construct reached the backend");
    }

    void store_cell_field(const CAtom& value, size_t word_index) {
        // [ptr] -> [ptr], storing value at ptr + word_index*32
        push_atom(value);   // [ptr, v]
        op(OP_DUP1 + 1);        // [ptr, v, ptr]
        if (word_index) {
            push(word_index * 32);
            op(OP_ADD);
        }
        op(OP_MSTORE);      // [ptr]
    }

    void push_map_slot(const std::string& map, const CAtom& key, bool presence) {
        const U256& base = m_.layout.map_base.at(map);
        push_atom(key);     // [k]
        op(OP_DUP1);
        op(OP_ADD);         // [2k]
        push(presence ? U256::add(base, U256(1)) : base);
        op(OP_ADD);         // [slot]
    }

    void emit_bin(const CInstr& i) {
        const Type& ot = i.args[0].type;
        bool signed_cmp = ot.is_int() && ot.kind.is_signed;
        auto push_operands = [&]() {  // left operand ends on top
            push_atom(i.args[1]);
            if (signed_cmp && is_comparison(i.bin)) {
                push(U256::pow2(255));
                op(OP_ADD);
            }
            push_atom(i.args[0]);
            if (signed_cmp && is_comparison(i.bin)) {
                push(U256::pow2(255));
                op(OP_ADD);
            }
        };
        switch (i.bin) {
        case BinOp::Add: push_operands(); op(OP_ADD); break;
        case BinOp::Sub: push_operands(); op(OP_SUB); break;
        case BinOp::Mul: push_operands(); op(OP_MUL); break;
        case BinOp::Div: push_operands(); op(OP_DIV); break;
        case BinOp::Mod: push_operands(); op(OP_MOD); break;
        case BinOp::Lt: push_operands(); op(OP_LT); break;
        case BinOp::Gt: push_operands(); op(OP_GT); break;
        case BinOp::Le: push_operands(); op(OP_GT); op(OP_ISZERO); break;
        case BinOp::Ge: push_operands(); op(OP_LT); op(OP_ISZERO); break;
        case BinOp::Eq: push_operands(); op(OP_EQ); break;
        case BinOp::Ne: push_operands(); op(OP_EQ); op(OP_ISZERO); break;
        case BinOp::And: push_operands(); op(OP_AND); break;
        case BinOp::Or: push_operands(); op(OP_OR); break;
        }
        store_dst(i);
    }
};

}  // namespace

SymProgram codegen(const CoreModule& m) { return Codegen(m).run(); }

CompiledModule compile_module(const CoreModule& m) {
    CompiledModule out;
    out.sym = codegen(m);
    out.sized = resolve_labels(out.sym);
    out.code = emit(out.sized);
    out.layout = m.layout;
    for (const ExceptionDecl& e : m.src.exceptions)
        out.exception_tags[e.name] = stable_hash32(e.name);
    out.exception_tags["UnknownSelector"] = stable_hash32("UnknownSelector");
    return out;
}

}  // namespace mlcc
