// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#include "mlcc/evm.hpp"

#include <sstream>

namespace mlcc {

BigInt EvmWorld::total_ether() const {
    BigInt sum;
    for (const auto& [addr, acct] : accounts) sum += acct.balance.to_bigint();
    return sum;
}

void EvmWorld::normalize() {
    for (auto it = accounts.begin(); it != accounts.end();) {
        const EvmAccount& a = it->second;
        if (a.code.empty() && a.storage.empty() && a.balance.is_zero())
            it = accounts.erase(it);
        else
            ++it;
    }
}

CodeMeta CodeMeta::from_sized(const SizedProgram& p) {
    CodeMeta m;
    for (const auto& a : p.annotations) m.annotations.emplace(a.offset, std::make_pair(a.used, a.alloc));
    for (const auto& s : p.alloc_sites) m.alloc_sites.emplace(s.offset, s.bytes);
    return m;
}

CodeMeta CodeMeta::from_gasmap_text(const std::string& text) {
    CodeMeta m;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string first;
        ls >> first;
        if (first == "alloc") {
            size_t off;
            uint64_t bytes;
            if (ls >> off >> bytes) m.alloc_sites.emplace(off, bytes);
        } else {
            size_t off = std::stoull(first);
            uint64_t used, alloc;
            if (ls >> used >> alloc) m.annotations.emplace(off, std::make_pair(used, alloc));
        }
    }
    return m;
}

std::string TraceRow::render() const {
    std::ostringstream o;
    o << "pc=0x" << std::hex << pc << std::dec << " op=" << opcode_name(op)
      << " gas=" << gas_remaining << " stack=[";
    size_t n = std::min<size_t>(stack_size, 4);
    for (size_t i = 0; i < n; ++i) o << (i ? "," : "") << "0x" << stack_top[i].to_hex();
    o << "]";
    return o.str();
}

std::string TxResult::outcome_name() const {
    switch (outcome) {
    case Outcome::Return: return "Return";
    case Outcome::Revert: return "Revert";
    case Outcome::OutOfGas: return "OutOfGas";
    case Outcome::Fault:
        switch (fault) {
        case Fault::StackUnderflow: return "Fault(StackUnderflow)";
        case Fault::StackOverflow: return "Fault(StackOverflow)";
        case Fault::InvalidJump: return "Fault(InvalidJump)";
        case Fault::InvalidOpcode: return "Fault(InvalidOpcode)";
        case Fault::CallDepth: return "Fault(CallDepth)";
        default: return "Fault";
        }
    }
    return "?";
}

namespace {

constexpr size_t kMaxStack = 1024;
constexpr int kMaxCallDepth = 64;

struct Machine {
    EvmWorld& world;  // transaction-scoped copy, committed by the caller
    const GasSchedule& sched;
    const CodeMeta* meta;
    std::vector<TraceRow>* trace;
    int depth;

    Machine(EvmWorld& w, const GasSchedule& s, const CodeMeta* m, std::vector<TraceRow>* t,
            int d)
        : world(w), sched(s), meta(m), trace(t), depth(d) {}

    U256 self;
    U256 caller;
    const std::vector<uint8_t>* code;
    const std::vector<uint8_t>* calldata;
    std::vector<bool> jumpdests;

    std::vector<U256> stack;
    std::vector<uint8_t> memory;
    size_t pc = 0;
    uint64_t gas_remaining = 0;
    uint64_t sched_gas = 0;
    uint64_t mem_gas = 0;
    uint64_t alloc_meter = 0;
    BigInt declared_gas;
    BigInt declared_alloc;
    std::vector<LogEntry> logs;

    TxResult result;
    bool halted = false;

    void finish(TxResult::Outcome o, TxResult::Fault f = TxResult::Fault::None) {
        result.outcome = o;
        result.fault = f;
        halted = true;
    }

    void mark_jumpdests() {
        jumpdests.assign(code->size(), false);
        for (size_t i = 0; i < code->size();) {
            uint8_t op = (*code)[i];
            if (op == OP_JUMPDEST) jumpdests[i] = true;
            i += 1 + push_width(op);
        }
    }

    bool charge(uint64_t cost, bool schedule_bucket) {
        if (gas_remaining < cost) {
            gas_remaining = 0;
            finish(TxResult::Outcome::OutOfGas);
            return false;
        }
        gas_remaining -= cost;
        (schedule_bucket ? sched_gas : mem_gas) += cost;
        return true;
    }

    // Extends memory to cover [off, off+len) and charges 3 gas per fresh word.
    bool touch_memory(const U256& off_w, const U256& len_w) {
        if (len_w.is_zero()) return true;
        if (!off_w.fits_u64() || !len_w.fits_u64()) {
            finish(TxResult::Outcome::OutOfGas);  // absurd extents exhaust gas
            return false;
        }
        uint64_t off = off_w.as_u64(), len = len_w.as_u64();
        if (off + len < off || off + len > (uint64_t(1) << 32)) {
            finish(TxResult::Outcome::OutOfGas);
            return false;
        }
        uint64_t need_words = (off + len + 31) / 32;
        uint64_t have_words = memory.size() / 32;
        if (need_words > have_words) {
            if (!charge((need_words - have_words) * GasSchedule::kMemoryWordCost, false))
                return false;
            memory.resize(need_words * 32, 0);
        }
        return true;
    }

    bool pop(U256& out) {
        if (stack.empty()) {
            finish(TxResult::Outcome::Fault, TxResult::Fault::StackUnderflow);
            return false;
        }
        out = stack.back();
        stack.pop_back();
        return true;
    }

    bool push(const U256& v) {
        if (stack.size() >= kMaxStack) {
            finish(TxResult::Outcome::Fault, TxResult::Fault::StackOverflow);
            return false;
        }
        stack.push_back(v);
        return true;
    }

    U256 mload_word(uint64_t off) { return U256::from_bytes(memory.data() + off, 32); }

    void mstore_word(uint64_t off, const U256& v) {
        auto bytes = v.to_bytes();
        std::copy(bytes.begin(), bytes.end(), memory.begin() + static_cast<ptrdiff_t>(off));
    }

    void apply_meta(size_t at) {
        if (!meta) return;
        auto [ab, ae] = meta->annotations.equal_range(at);
        for (auto it = ab; it != ae; ++it) {
            declared_gas += BigInt::from_u64(it->second.first);
            declared_alloc += BigInt::from_u64(it->second.second);
        }
        auto [sb, se] = meta->alloc_sites.equal_range(at);
        for (auto it = sb; it != se; ++it) alloc_meter += it->second;
    }

    void record_trace(size_t at, uint8_t op) {
        if (!trace) return;
        TraceRow row;
        row.pc = at;
        row.op = op;
        row.gas_remaining = gas_remaining;
        row.sched_gas = sched_gas;
        row.mem_gas = mem_gas;
        row.alloc_meter = alloc_meter;
        row.declared_gas = declared_gas;
        row.declared_alloc = declared_alloc;
        row.stack_size = stack.size();
        for (size_t i = 0; i < 4 && i < stack.size(); ++i)
            row.stack_top[i] = stack[stack.size() - 1 - i];
        row.depth = depth;
        trace->push_back(row);
    }

    void run() {
        mark_jumpdests();
        while (!halted) {
            if (pc >= code->size()) {  // running off the end is an implicit STOP
                finish(TxResult::Outcome::Return);
                break;
            }
            size_t at = pc;
            uint8_t op = (*code)[at];
            apply_meta(at);
            record_trace(at, op);
            if (!known_opcode(op)) {
                gas_remaining = 0;
                finish(TxResult::Outcome::Fault, TxResult::Fault::InvalidOpcode);
                break;
            }
            if (!charge(sched.cost(op), true)) break;
            pc = at + 1 + push_width(op);
            step(at, op);
        }
        result.sched_gas = sched_gas;
        result.mem_gas = mem_gas;
        result.gas_used = sched_gas + mem_gas;
        result.alloc_bytes = alloc_meter;
        result.peak_mem_bytes = memory.size();
        result.declared_gas = declared_gas;
        result.declared_alloc = declared_alloc;
        result.logs = std::move(logs);
    }

    void step(size_t at, uint8_t op) {
        U256 a, b, c;
        if (unsigned w = push_width(op)) {
            if (at + 1 + w > code->size()) {  // truncated push: implicit zero pad
                U256 v = U256::from_bytes(code->data() + at + 1, code->size() - at - 1);
                push(v.shl(static_cast<unsigned>(8 * (at + 1 + w - code->size()))));
            } else {
                push(U256::from_bytes(code->data() + at + 1, w));
            }
            return;
        }
        if (op >= OP_DUP1 && op <= OP_DUP1 + 15) {
            size_t n = op - OP_DUP1 + 1;
            if (stack.size() < n) {
                finish(TxResult::Outcome::Fault, TxResult::Fault::StackUnderflow);
                return;
            }
            push(stack[stack.size() - n]);
            return;
        }
        if (op >= OP_SWAP1 && op <= OP_SWAP1 + 15) {
            size_t n = op - OP_SWAP1 + 1;
            if (stack.size() < n + 1) {
                finish(TxResult::Outcome::Fault, TxResult::Fault::StackUnderflow);
                return;
            }
            std::swap(stack[stack.size() - 1], stack[stack.size() - 1 - n]);
            return;
        }
        switch (op) {
        case OP_STOP: finish(TxResult::Outcome::Return); return;
        case OP_ADD: if (pop(a) && pop(b)) push(U256::add(a, b)); return;
        case OP_MUL: if (pop(a) && pop(b)) push(U256::mul(a, b)); return;
        case OP_SUB: if (pop(a) && pop(b)) push(U256::sub(a, b)); return;
        case OP_DIV: if (pop(a) && pop(b)) push(U256::div(a, b)); return;
        case OP_MOD: if (pop(a) && pop(b)) push(U256::mod(a, b)); return;
        case OP_LT: if (pop(a) && pop(b)) push(U256(a < b ? 1 : 0)); return;
        case OP_GT: if (pop(a) && pop(b)) push(U256(a > b ? 1 : 0)); return;
        case OP_EQ: if (pop(a) && pop(b)) push(U256(a == b ? 1 : 0)); return;
        case OP_ISZERO: if (pop(a)) push(U256(a.is_zero() ? 1 : 0)); return;
        case OP_AND: if (pop(a) && pop(b)) push(a.and_(b)); return;
        case OP_OR: if (pop(a) && pop(b)) push(a.or_(b)); return;
        case OP_NOT: if (pop(a)) push(a.not_()); return;
        case OP_CALLER: push(caller); return;
        case OP_CALLDATALOAD: {
            if (!pop(a)) return;
            uint8_t word[32] = {0};
            if (a.fits_u64()) {
                uint64_t off = a.as_u64();
                for (unsigned i = 0; i < 32; ++i)
                    if (off + i < calldata->size()) word[i] = (*calldata)[off + i];
            }
            push(U256::from_bytes(word, 32));
            return;
        }
        case OP_CALLDATASIZE: push(U256(calldata->size())); return;
        case OP_POP: pop(a); return;
        case OP_MLOAD:
            if (!pop(a)) return;
            if (!touch_memory(a, U256(32))) return;
            push(mload_word(a.as_u64()));
            return;
        case OP_MSTORE:
            if (!pop(a) || !pop(b)) return;
            if (!touch_memory(a, U256(32))) return;
            mstore_word(a.as_u64(), b);
            return;
        case OP_SLOAD: {
            if (!pop(a)) return;
            const auto& st = world.at(self).storage;
            auto it = st.find(a);
            push(it == st.end() ? U256(0) : it->second);
            return;
        }
        case OP_SSTORE: {
            if (!pop(a) || !pop(b)) return;
            auto& st = world.at(self).storage;
            if (b.is_zero()) st.erase(a);
            else st[a] = b;
            return;
        }
        case OP_JUMP: {
            if (!pop(a)) return;
            if (!a.fits_u64() || a.as_u64() >= code->size() || !jumpdests[a.as_u64()]) {
                finish(TxResult::Outcome::Fault, TxResult::Fault::InvalidJump);
                return;
            }
            pc = a.as_u64();
            return;
        }
        case OP_JUMPI: {
            if (!pop(a) || !pop(b)) return;
            if (b.is_zero()) return;
            if (!a.fits_u64() || a.as_u64() >= code->size() || !jumpdests[a.as_u64()]) {
                finish(TxResult::Outcome::Fault, TxResult::Fault::InvalidJump);
                return;
            }
            pc = a.as_u64();
            return;
        }
        case OP_PC: push(U256(at)); return;
        case OP_JUMPDEST: return;
        case OP_LOG1: {
            U256 topic;
            if (!pop(a) || !pop(b) || !pop(topic)) return;
            if (!touch_memory(a, b)) return;
            LogEntry log;
            log.topic = topic;
            if (!b.is_zero())
                log.data.assign(memory.begin() + static_cast<ptrdiff_t>(a.as_u64()),
                                memory.begin() + static_cast<ptrdiff_t>(a.as_u64() + b.as_u64()));
            logs.push_back(std::move(log));
            return;
        }
        case OP_RETURN:
        case OP_REVERT: {
            if (!pop(a) || !pop(b)) return;
            if (!touch_memory(a, b)) return;
            if (!b.is_zero())
                result.data.assign(memory.begin() + static_cast<ptrdiff_t>(a.as_u64()),
                                   memory.begin() + static_cast<ptrdiff_t>(a.as_u64() + b.as_u64()));
            finish(op == OP_RETURN ? TxResult::Outcome::Return : TxResult::Outcome::Revert);
            return;
        }
        case OP_CALL: do_call(); return;
        case OP_INVALID:
            gas_remaining = 0;
            finish(TxResult::Outcome::Fault, TxResult::Fault::InvalidOpcode);
            return;
        default:
            gas_remaining = 0;
            finish(TxResult::Outcome::Fault, TxResult::Fault::InvalidOpcode);
            return;
        }
    }

    void do_call() {
        U256 gas_w, to, value, a_off, a_len, r_off, r_len;
        if (!pop(gas_w) || !pop(to) || !pop(value) || !pop(a_off) || !pop(a_len) || !pop(r_off) ||
            !pop(r_len))
            return;
        if (depth + 1 >= kMaxCallDepth) {
            finish(TxResult::Outcome::Fault, TxResult::Fault::CallDepth);
            return;
        }
        // The restricted send: the value moves unconditionally; callee
        // effects commit only on success.
        EvmAccount& from_acct = world.at(self);
        from_acct.balance = U256::sub(from_acct.balance, value);
        EvmAccount& to_acct = world.at(to);
        to_acct.balance = U256::add(to_acct.balance, value);

        uint64_t callee_gas = gas_w.fits_u64() ? gas_w.as_u64() : gas_remaining;
        if (callee_gas > gas_remaining) callee_gas = gas_remaining;

        bool ok = true;
        const std::vector<uint8_t> callee_code = world.at(to).code;
        if (!callee_code.empty()) {
            EvmWorld snapshot = world;
            Machine inner{world, sched, nullptr, nullptr, depth + 1};
            std::vector<uint8_t> empty_data;
            inner.self = to;
            inner.caller = self;
            inner.code = &callee_code;
            inner.calldata = &empty_data;
            inner.gas_remaining = callee_gas;
            inner.run();
            // The callee's consumption is metered against the caller.
            uint64_t used = inner.sched_gas + inner.mem_gas;
            if (!charge(used > gas_remaining ? gas_remaining : used, true)) return;
            if (inner.result.outcome == TxResult::Outcome::Return) {
                for (auto& l : inner.result.logs) logs.push_back(std::move(l));
            } else {
                ok = false;
                // the snapshot was taken after the transfer, so restoring it
                // rolls back callee effects but keeps the value move
                world = std::move(snapshot);
            }
        }
        push(U256(ok ? 1 : 0));
    }
};

}  // namespace

TxResult exec_tx(EvmWorld& world, const TxRequest& req) {
    GasSchedule default_sched = GasSchedule::defaults();
    const GasSchedule& sched = req.schedule ? *req.schedule : default_sched;

    EvmWorld work = world;  // transaction-scoped copy
    Machine m{work, sched, req.meta, req.trace, 0};
    m.self = req.contract;
    m.caller = req.caller;
    const std::vector<uint8_t> code = work.at(req.contract).code;
    m.code = &code;
    m.calldata = &req.calldata;
    m.gas_remaining = req.gas_limit;
    m.run();

    if (m.result.committed()) {
        work.normalize();
        world = std::move(work);
    }
    return m.result;
}

bool call_with_stipend(EvmWorld& world, const U256& from, const U256& to, const U256& value,
                       const GasSchedule& schedule) {
    // Mirrors the CALL opcode path for native callers (tests, the corpus
    // harness): unconditional transfer, stipend-limited callee.
    EvmAccount& from_acct = world.at(from);
    from_acct.balance = U256::sub(from_acct.balance, value);
    EvmAccount& to_acct = world.at(to);
    to_acct.balance = U256::add(to_acct.balance, value);

    const std::vector<uint8_t> callee_code = world.at(to).code;
    if (callee_code.empty()) {
        world.normalize();
        return true;
    }
    EvmWorld snapshot = world;  // includes the transfer
    Machine m{world, schedule, nullptr, nullptr, 1};
    std::vector<uint8_t> empty;
    m.self = to;
    m.caller = from;
    m.code = &callee_code;
    m.calldata = &empty;
    m.gas_remaining = 2300;
    m.run();
    if (m.result.outcome != TxResult::Outcome::Return) world = std::move(snapshot);
    world.normalize();
    return m.result.outcome == TxResult::Outcome::Return;
}

}  // namespace mlcc
