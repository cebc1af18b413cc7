// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#include "mlcc/evm_asm.hpp"

#include <array>
#include <istream>
#include <sstream>

#include "mlcc/abi.hpp"

namespace mlcc {

unsigned push_width(uint8_t op) {
    if (op >= OP_PUSH1 && op <= OP_PUSH1 + 31) return op - OP_PUSH1 + 1;
    return 0;
}

bool known_opcode(uint8_t op) {
    switch (op) {
    case OP_STOP: case OP_ADD: case OP_MUL: case OP_SUB: case OP_DIV: case OP_MOD:
    case OP_LT: case OP_GT: case OP_EQ: case OP_ISZERO: case OP_AND: case OP_OR: case OP_NOT:
    case OP_CALLER: case OP_CALLDATALOAD: case OP_CALLDATASIZE:
    case OP_POP: case OP_MLOAD: case OP_MSTORE: case OP_SLOAD: case OP_SSTORE:
    case OP_JUMP: case OP_JUMPI: case OP_PC: case OP_JUMPDEST:
    case OP_LOG1: case OP_CALL: case OP_RETURN: case OP_REVERT: case OP_INVALID:
        return true;
    default:
        return push_width(op) > 0 || (op >= OP_DUP1 && op <= OP_DUP1 + 15) ||
               (op >= OP_SWAP1 && op <= OP_SWAP1 + 15);
    }
}

std::string opcode_name(uint8_t op) {
    switch (op) {
    case OP_STOP: return "STOP";
    case OP_ADD: return "ADD";
    case OP_MUL: return "MUL";
    case OP_SUB: return "SUB";
    case OP_DIV: return "DIV";
    case OP_MOD: return "MOD";
    case OP_LT: return "LT";
    case OP_GT: return "GT";
    case OP_EQ: return "EQ";
    case OP_ISZERO: return "ISZERO";
    case OP_AND: return "AND";
    case OP_OR: return "OR";
    case OP_NOT: return "NOT";
    case OP_CALLER: return "CALLER";
    case OP_CALLDATALOAD: return "CALLDATALOAD";
    case OP_CALLDATASIZE: return "CALLDATASIZE";
    case OP_POP: return "POP";
    case OP_MLOAD: return "MLOAD";
    case OP_MSTORE: return "MSTORE";
    case OP_SLOAD: return "SLOAD";
    case OP_SSTORE: return "SSTORE";
    case OP_JUMP: return "JUMP";
    case OP_JUMPI: return "JUMPI";
    case OP_PC: return "PC";
    case OP_JUMPDEST: return "JUMPDEST";
    case OP_LOG1: return "LOG1";
    case OP_CALL: return "CALL";
    case OP_RETURN: return "RETURN";
    case OP_REVERT: return "REVERT";
    case OP_INVALID: return "INVALID";
    default:
        if (unsigned w = push_width(op)) return "PUSH" + std::to_string(w);
        if (op >= OP_DUP1 && op <= OP_DUP1 + 15) return "DUP" + std::to_string(op - OP_DUP1 + 1);
        if (op >= OP_SWAP1 && op <= OP_SWAP1 + 15)
            return "SWAP" + std::to_string(op - OP_SWAP1 + 1);
        return "INVALID";
    }
}

std::optional<uint8_t> opcode_by_name(const std::string& name) {
    for (int b = 0; b < 256; ++b) {
        uint8_t op = static_cast<uint8_t>(b);
        if (known_opcode(op) && opcode_name(op) == name) return op;
    }
    if (name == "PUSH") return OP_PUSH1;
    if (name == "DUP") return OP_DUP1;
    if (name == "SWAP") return OP_SWAP1;
    return std::nullopt;
}

GasSchedule GasSchedule::defaults() {
    GasSchedule g;
    auto tier = [&g](std::initializer_list<uint8_t> ops, uint64_t cost) {
        for (uint8_t op : ops) g.per_byte_[op] = cost;
    };
    tier({OP_STOP, OP_RETURN, OP_REVERT}, 0);
    tier({OP_POP, OP_PC, OP_CALLDATASIZE, OP_CALLER}, 2);
    tier({OP_ADD, OP_SUB, OP_NOT, OP_LT, OP_GT, OP_EQ, OP_ISZERO, OP_AND, OP_OR,
          OP_MLOAD, OP_MSTORE, OP_CALLDATALOAD},
         3);
    tier({OP_MUL, OP_DIV, OP_MOD}, 5);
    g.per_byte_[OP_JUMP] = 8;
    g.per_byte_[OP_JUMPI] = 10;
    g.per_byte_[OP_JUMPDEST] = 1;
    g.per_byte_[OP_SLOAD] = 200;
    g.per_byte_[OP_SSTORE] = 20000;  // flat over-approximation
    g.per_byte_[OP_LOG1] = 750;
    g.per_byte_[OP_CALL] = 700;
    g.per_byte_[OP_INVALID] = 0;
    for (int i = 0; i < 32; ++i) g.per_byte_[OP_PUSH1 + i] = 3;
    for (int i = 0; i < 16; ++i) g.per_byte_[OP_DUP1 + i] = 3;
    for (int i = 0; i < 16; ++i) g.per_byte_[OP_SWAP1 + i] = 3;
    g.named_["CREATE"] = 32000;
    return g;
}

void GasSchedule::set(const std::string& mnemonic, uint64_t cost) {
    if (mnemonic == "PUSH") {
        for (int i = 0; i < 32; ++i) per_byte_[OP_PUSH1 + i] = cost;
        return;
    }
    if (mnemonic == "DUP") {
        for (int i = 0; i < 16; ++i) per_byte_[OP_DUP1 + i] = cost;
        return;
    }
    if (mnemonic == "SWAP") {
        for (int i = 0; i < 16; ++i) per_byte_[OP_SWAP1 + i] = cost;
        return;
    }
    if (auto op = opcode_by_name(mnemonic)) {
        per_byte_[*op] = cost;
        return;
    }
    named_[mnemonic] = cost;
}

GasSchedule GasSchedule::from_stream(std::istream& in) {
    GasSchedule g = defaults();
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string name;
        uint64_t cost;
        if (!(ls >> name >> cost))
            throw AsmError("gas schedule: bad line `" + line + "`");
        g.set(name, cost);
    }
    return g;
}

uint64_t GasSchedule::cost(uint8_t opcode) const { return per_byte_[opcode]; }

uint64_t GasSchedule::named(const std::string& mnemonic) const {
    if (auto it = named_.find(mnemonic); it != named_.end()) return it->second;
    if (auto op = opcode_by_name(mnemonic)) return per_byte_[*op];
    throw AsmError("gas schedule: unknown mnemonic `" + mnemonic + "`");
}

std::string GasSchedule::to_text() const {
    std::ostringstream o;
    o << "# <MNEMONIC> <cost>; PUSH/DUP/SWAP set the whole family\n";
    for (int b = 0; b < 256; ++b) {
        uint8_t op = static_cast<uint8_t>(b);
        if (!known_opcode(op) || op == OP_INVALID) continue;
        unsigned pw = push_width(op);
        if (pw > 1) continue;
        if (op >= OP_DUP1 + 1 && op <= OP_DUP1 + 15) continue;
        if (op >= OP_SWAP1 + 1 && op <= OP_SWAP1 + 15) continue;
        std::string name = opcode_name(op);
        if (pw == 1) name = "PUSH";
        if (op == OP_DUP1) name = "DUP";
        if (op == OP_SWAP1) name = "SWAP";
        o << name << " " << per_byte_[op] << "\n";
    }
    for (const auto& [name, cost] : named_) o << name << " " << cost << "\n";
    return o.str();
}

namespace {

unsigned min_bytes(const U256& v) {
    unsigned n = 32;
    while (n > 1 && v.shr((n - 1) * 8).is_zero()) --n;
    return n;
}

unsigned instr_size(const SymInstr& s, const std::vector<unsigned>& widths, size_t idx) {
    switch (s.k) {
    case SymInstr::K::Op: return 1;
    case SymInstr::K::Push: return 1 + min_bytes(s.imm);
    case SymInstr::K::PushLabel: return 1 + widths[idx];
    default: return 0;
    }
}

}  // namespace

SizedProgram resolve_labels(const SymProgram& sym) {
    const auto& ins = sym.instrs;
    std::vector<unsigned> widths(ins.size(), 1);

    // Validate label well-formedness up front.
    std::map<std::string, int> defs;
    for (const SymInstr& s : ins) {
        if (s.k == SymInstr::K::LabelDef) ++defs[s.label];
    }
    for (const SymInstr& s : ins) {
        if (s.k == SymInstr::K::PushLabel) {
            auto it = defs.find(s.label);
            if (it == defs.end()) throw AsmError("undefined label `" + s.label + "`");
        }
    }
    for (const auto& [label, n] : defs) {
        if (n > 1) throw AsmError("label `" + label + "` defined " + std::to_string(n) + " times");
    }

    std::map<std::string, size_t> addr;
    size_t iterations = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        ++iterations;
        size_t off = 0;
        for (size_t i = 0; i < ins.size(); ++i) {
            if (ins[i].k == SymInstr::K::LabelDef) addr[ins[i].label] = off;
            off += instr_size(ins[i], widths, i);
        }
        for (size_t i = 0; i < ins.size(); ++i) {
            if (ins[i].k != SymInstr::K::PushLabel) continue;
            unsigned need = min_bytes(U256(addr.at(ins[i].label)));
            if (need > widths[i]) {
                widths[i] = need;  // widths never shrink
                changed = true;
            }
        }
    }

    SizedProgram out;
    out.label_addr = addr;
    out.resolve_iterations = iterations;
    size_t off = 0;
    for (size_t i = 0; i < ins.size(); ++i) {
        const SymInstr& s = ins[i];
        switch (s.k) {
        case SymInstr::K::Op: {
            SizedInstr si;
            si.offset = off;
            si.opcode = s.opcode;
            si.jump = s.jump;
            si.target_label = s.label;
            out.instrs.push_back(si);
            break;
        }
        case SymInstr::K::Push: {
            SizedInstr si;
            si.offset = off;
            si.imm_size = static_cast<uint8_t>(min_bytes(s.imm));
            si.opcode = static_cast<uint8_t>(OP_PUSH1 + si.imm_size - 1);
            si.imm = s.imm;
            out.instrs.push_back(si);
            break;
        }
        case SymInstr::K::PushLabel: {
            SizedInstr si;
            si.offset = off;
            si.imm_size = static_cast<uint8_t>(widths[i]);
            si.opcode = static_cast<uint8_t>(OP_PUSH1 + si.imm_size - 1);
            si.imm = U256(addr.at(s.label));
            si.target_label = s.label;
            out.instrs.push_back(si);
            break;
        }
        case SymInstr::K::LabelDef:
            break;
        case SymInstr::K::Annotation:
            out.annotations.push_back(GasAnnotationSite{off, s.a, s.b});
            break;
        case SymInstr::K::AllocSite:
            out.alloc_sites.push_back(AllocSiteInfo{off, s.a});
            break;
        }
        off += instr_size(s, widths, i);
    }
    out.size_bytes = off;

    // Materialize function spans from the label metadata.
    for (const SymFnSpan& sf : sym.fn_spans) {
        FnSpan f;
        f.name = sf.name;
        f.entry = addr.at(sf.entry_label);
        f.end = addr.at(sf.end_label);
        for (const std::string& l : sf.ret_labels) f.ret_sites.push_back(addr.at(l));
        for (const std::string& l : sf.loop_head_labels) f.loop_heads.push_back(addr.at(l));
        f.gas_checking = sf.gas_checking;
        f.dispatchable = sf.dispatchable;
        f.param_words = sf.param_words;
        out.functions.push_back(std::move(f));
    }
    return out;
}

std::vector<uint8_t> emit(const SizedProgram& p) {
    std::vector<uint8_t> out;
    out.reserve(p.size_bytes);
    for (const SizedInstr& si : p.instrs) {
        out.push_back(si.opcode);
        for (int b = si.imm_size - 1; b >= 0; --b)
            out.push_back(static_cast<uint8_t>(si.imm.shr(static_cast<unsigned>(b) * 8).limb[0]));
    }
    return out;
}

std::vector<SizedInstr> disassemble(const std::vector<uint8_t>& code) {
    std::vector<SizedInstr> out;
    size_t off = 0;
    while (off < code.size()) {
        SizedInstr si;
        si.offset = off;
        uint8_t op = code[off];
        si.opcode = known_opcode(op) ? op : static_cast<uint8_t>(OP_INVALID);
        unsigned w = push_width(op);
        ++off;
        if (w > 0) {
            if (off + w > code.size())
                throw DisasmError("truncated push at offset " + std::to_string(si.offset));
            si.imm_size = static_cast<uint8_t>(w);
            si.imm = U256::from_bytes(code.data() + off, w);
            off += w;
        }
        out.push_back(si);
    }
    return out;
}

std::string render_hex(const std::vector<uint8_t>& code) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    s.reserve(code.size() * 2 + 1);
    for (uint8_t b : code) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    s.push_back('\n');
    return s;
}

std::string render_asm(const SizedProgram& p) {
    std::ostringstream o;
    std::map<size_t, std::vector<std::string>> labels_at;
    for (const auto& [label, a] : p.label_addr) labels_at[a].push_back(label);
    std::map<size_t, const GasAnnotationSite*> ann_at;
    for (const auto& a : p.annotations) ann_at[a.offset] = &a;
    for (const SizedInstr& si : p.instrs) {
        if (auto it = labels_at.find(si.offset); it != labels_at.end()) {
            for (const std::string& l : it->second) o << "L" << l << ":\n";
        }
        if (auto it = ann_at.find(si.offset); it != ann_at.end())
            o << "    ; add_gas " << it->second->used << " " << it->second->alloc << "\n";
        o << "    " << opcode_name(si.opcode);
        if (si.imm_size) {
            o << " 0x" << si.imm.to_hex();
            if (!si.target_label.empty()) o << " ; L" << si.target_label;
        }
        o << "\n";
    }
    return o.str();
}

std::string render_gasmap(const SizedProgram& p) {
    std::ostringstream o;
    for (const auto& a : p.annotations) o << a.offset << " " << a.used << " " << a.alloc << "\n";
    for (const auto& s : p.alloc_sites) o << "alloc " << s.offset << " " << s.bytes << "\n";
    return o.str();
}

std::string render_symtab(const SizedProgram& p) {
    std::ostringstream o;
    for (const FnSpan& f : p.functions) {
        o << "fn " << f.name << " entry=" << f.entry << " end=" << f.end
          << (f.gas_checking ? " gas_checking" : "") << (f.dispatchable ? " dispatchable" : "")
          << " params=" << f.param_words << " rets=";
        for (size_t i = 0; i < f.ret_sites.size(); ++i) o << (i ? "," : "") << f.ret_sites[i];
        o << " loops=";
        for (size_t i = 0; i < f.loop_heads.size(); ++i) o << (i ? "," : "") << f.loop_heads[i];
        o << "\n";
    }
    return o.str();
}

// ---- abi helpers ----

std::vector<uint8_t> encode_calldata(std::string_view fn_name, const std::vector<U256>& args) {
    std::vector<uint8_t> out;
    uint32_t sel = stable_hash32(fn_name);
    out.push_back(static_cast<uint8_t>(sel >> 24));
    out.push_back(static_cast<uint8_t>(sel >> 16));
    out.push_back(static_cast<uint8_t>(sel >> 8));
    out.push_back(static_cast<uint8_t>(sel));
    for (const U256& a : args) {
        auto bytes = a.to_bytes();
        out.insert(out.end(), bytes.begin(), bytes.end());
    }
    return out;
}

bool decode_revert_tag(const std::vector<uint8_t>& data, uint32_t* tag_out) {
    if (data.size() != 4) return false;
    *tag_out = (uint32_t(data[0]) << 24) | (uint32_t(data[1]) << 16) | (uint32_t(data[2]) << 8) |
               uint32_t(data[3]);
    return true;
}

std::string hex_of_bytes(const std::vector<uint8_t>& data) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (uint8_t b : data) {
        s.push_back(digits[b >> 4]);
        s.push_back(digits[b & 0xf]);
    }
    return s;
}

std::vector<uint8_t> bytes_of_hex(const std::string& hex) {
    std::string h = hex;
    if (h.size() >= 2 && h[0] == '0' && (h[1] == 'x' || h[1] == 'X')) h = h.substr(2);
    if (h.size() % 2) throw std::invalid_argument("hex string has odd length");
    auto nib = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        throw std::invalid_argument("bad hex digit");
    };
    std::vector<uint8_t> out;
    out.reserve(h.size() / 2);
    for (size_t i = 0; i < h.size(); i += 2)
        out.push_back(static_cast<uint8_t>(nib(h[i]) * 16 + nib(h[i + 1])));
    return out;
}

}  // namespace mlcc
