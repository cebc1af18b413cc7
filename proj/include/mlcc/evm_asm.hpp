// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mlcc/u256.hpp"

namespace mlcc {

// The supported opcode subset.
enum Opcode : uint8_t {
    OP_STOP = 0x00, OP_ADD = 0x01, OP_MUL = 0x02, OP_SUB = 0x03, OP_DIV = 0x04,
    OP_MOD = 0x06,
    OP_LT = 0x10, OP_GT = 0x11, OP_EQ = 0x14, OP_ISZERO = 0x15,
    OP_AND = 0x16, OP_OR = 0x17, OP_NOT = 0x19,
    OP_CALLER = 0x33, OP_CALLDATALOAD = 0x35, OP_CALLDATASIZE = 0x36,
    OP_POP = 0x50, OP_MLOAD = 0x51, OP_MSTORE = 0x52, OP_SLOAD = 0x54, OP_SSTORE = 0x55,
    OP_JUMP = 0x56, OP_JUMPI = 0x57, OP_PC = 0x58, OP_JUMPDEST = 0x5b,
    OP_PUSH1 = 0x60,  // .. OP_PUSH32 = 0x7f
    OP_DUP1 = 0x80,   // .. OP_DUP16 = 0x8f
    OP_SWAP1 = 0x90,  // .. OP_SWAP16 = 0x9f
    OP_LOG1 = 0xa1,
    OP_CALL = 0xf1, OP_RETURN = 0xf3, OP_REVERT = 0xfd, OP_INVALID = 0xfe,
};

// 0 for non-push opcodes, 1..32 for PUSH1..PUSH32.
unsigned push_width(uint8_t op);
bool known_opcode(uint8_t op);
std::string opcode_name(uint8_t op);
std::optional<uint8_t> opcode_by_name(const std::string& name);  // family names resolve to x1

/// Per-opcode base costs. The defaults follow the Yellow-Paper-style tiers
/// the schedule file documents (very-low = 3, CREATE = 32000, ...); a file
/// of `<MNEMONIC> <cost>` lines can override them, with PUSH/DUP/SWAP
/// naming the whole family. Memory expansion is priced separately by the
/// interpreter at 3 gas per fresh 32-byte word.
class GasSchedule {
public:
    static GasSchedule defaults();
    static GasSchedule from_stream(std::istream& in);  // overrides on top of defaults

    uint64_t cost(uint8_t opcode) const;
    uint64_t named(const std::string& mnemonic) const;  // e.g. "CREATE" for the constant
    void set(const std::string& mnemonic, uint64_t cost);

    std::string to_text() const;
    static constexpr uint64_t kMemoryWordCost = 3;

private:
    std::array<uint64_t, 256> per_byte_{};
    std::map<std::string, uint64_t> named_;  // constants without executable opcodes
};

/// Jump provenance, tagged by the code generator so the gas analyzer can
/// build the CFG without dominance analysis.
enum class JumpKind : uint8_t {
    None,      // not a jump
    Forward,   // structured control flow within the function
    Branch,    // conditional (JUMPI) within the function
    Back,      // while-loop back edge to a loop head
    Call,      // transfer to a function entry; execution resumes at the
               // return label that immediately follows
    Ret,       // return to the caller (dynamic target)
};

struct SymInstr {
    enum class K {
        Op,          // plain opcode (PUSH only via Push/PushLabel)
        Push,        // PUSHn immediate, minimal width for the value
        PushLabel,   // PUSH of a label address, width decided by the fixpoint
        LabelDef,    // zero-size label definition
        Annotation,  // zero-size add_gas site (used, alloc)
        AllocSite,   // zero-size allocation marker (bytes)
    };
    K k = K::Op;
    uint8_t opcode = 0;
    JumpKind jump = JumpKind::None;
    std::string label;       // PushLabel / LabelDef / jump target bookkeeping
    U256 imm;                // Push
    uint64_t a = 0, b = 0;   // Annotation: used/alloc; AllocSite: bytes in `a`

    static SymInstr op(uint8_t opcode, JumpKind j = JumpKind::None) {
        SymInstr s;
        s.k = K::Op;
        s.opcode = opcode;
        s.jump = j;
        return s;
    }
    static SymInstr push(const U256& v) {
        SymInstr s;
        s.k = K::Push;
        s.imm = v;
        return s;
    }
    static SymInstr push_label(std::string l) {
        SymInstr s;
        s.k = K::PushLabel;
        s.label = std::move(l);
        return s;
    }
    static SymInstr label_def(std::string l) {
        SymInstr s;
        s.k = K::LabelDef;
        s.label = std::move(l);
        return s;
    }
};

/// Function extent metadata carried through sizing for the analyzer, the
/// trace bracketing utilities and the .sym artifact.
struct FnSpan {
    std::string name;
    size_t entry = 0;                // byte offset of the entry JUMPDEST
    size_t end = 0;                  // first byte past the function
    std::vector<size_t> ret_sites;   // offsets of Ret-tagged JUMPs
    std::vector<size_t> loop_heads;  // offsets of while-loop head JUMPDESTs
    bool gas_checking = false;
    bool dispatchable = false;
    size_t param_words = 0;
};

/// Function extent in label space; resolved to offsets during sizing.
struct SymFnSpan {
    std::string name;
    std::string entry_label;
    std::string end_label;
    std::vector<std::string> ret_labels;       // placed at each Ret-tagged JUMP
    std::vector<std::string> loop_head_labels; // while-loop head JUMPDESTs
    bool gas_checking = false;
    bool dispatchable = false;
    size_t param_words = 0;
};

struct SymProgram {
    std::vector<SymInstr> instrs;
    std::vector<SymFnSpan> fn_spans;
};

struct GasAnnotationSite {
    size_t offset;
    uint64_t used;
    uint64_t alloc;
};

struct AllocSiteInfo {
    size_t offset;
    uint64_t bytes;
};

struct SizedInstr {
    size_t offset = 0;
    uint8_t opcode = 0;
    U256 imm;
    uint8_t imm_size = 0;  // PUSH payload bytes
    JumpKind jump = JumpKind::None;
    std::string target_label;  // for tagged jumps: the label they consume
};

struct SizedProgram {
    std::vector<SizedInstr> instrs;
    std::map<std::string, size_t> label_addr;
    std::vector<GasAnnotationSite> annotations;
    std::vector<AllocSiteInfo> alloc_sites;
    std::vector<FnSpan> functions;
    size_t size_bytes = 0;
    size_t resolve_iterations = 0;  // fixpoint rounds taken

    const FnSpan* find_fn(const std::string& name) const {
        for (const FnSpan& f : functions)
            if (f.name == name) return &f;
        return nullptr;
    }
};

struct AsmError : std::runtime_error {
    explicit AsmError(const std::string& what) : std::runtime_error(what) {}
};

// Fixpoint address-width assignment: every PushLabel starts at one byte and
// widens until its target address fits; widths never shrink, so the
// iteration terminates. Throws AsmError on unknown/duplicate labels.
SizedProgram resolve_labels(const SymProgram& sym);

// Deterministic byte emission.
std::vector<uint8_t> emit(const SizedProgram& p);

struct DisasmError : std::runtime_error {
    explicit DisasmError(const std::string& what) : std::runtime_error(what) {}
};

// Unknown bytes decode as INVALID; a PUSH whose immediate runs past the end
// throws DisasmError ("truncated push").
std::vector<SizedInstr> disassemble(const std::vector<uint8_t>& code);

// Artifact renderings.
std::string render_asm(const SizedProgram& p);      // one instruction per line, `Lname:` labels
std::string render_hex(const std::vector<uint8_t>& code);  // lowercase, no 0x, newline-terminated
std::string render_gasmap(const SizedProgram& p);   // `<offset> <used> <alloc>` + `alloc` lines
std::string render_symtab(const SizedProgram& p);   // function spans for the test harness

}  // namespace mlcc
