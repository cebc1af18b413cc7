// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "mlcc/bigint.hpp"
#include "mlcc/evm_asm.hpp"
#include "mlcc/u256.hpp"

namespace mlcc {

struct EvmAccount {
    std::vector<uint8_t> code;
    std::map<U256, U256> storage;  // zero values are erased (empty == zero)
    U256 balance;

    bool operator==(const EvmAccount&) const = default;
};

struct EvmWorld {
    std::map<U256, EvmAccount> accounts;

    EvmAccount& at(const U256& addr) { return accounts[addr]; }
    BigInt total_ether() const;
    // Drops empty accounts so world comparisons are canonical.
    void normalize();
    bool operator==(const EvmWorld&) const = default;
};

struct LogEntry {
    U256 topic;
    std::vector<uint8_t> data;

    bool operator==(const LogEntry&) const = default;
};

/// Annotation/allocation sites by byte offset; drives the ghost counters
/// during interpretation.
struct CodeMeta {
    std::multimap<size_t, std::pair<uint64_t, uint64_t>> annotations;  // used, alloc
    std::multimap<size_t, uint64_t> alloc_sites;                      // bytes

    static CodeMeta from_sized(const SizedProgram& p);
    static CodeMeta from_gasmap_text(const std::string& text);
};

struct TraceRow {
    size_t pc = 0;
    uint8_t op = 0;
    uint64_t gas_remaining = 0;
    uint64_t sched_gas = 0;   // cumulative schedule cost
    uint64_t mem_gas = 0;     // cumulative expansion cost
    uint64_t alloc_meter = 0; // cumulative allocation-site bytes
    BigInt declared_gas;      // ghost counters after this step
    BigInt declared_alloc;
    size_t stack_size = 0;
    std::array<U256, 4> stack_top{};
    int depth = 0;

    std::string render() const;  // pc=<hex> op=<mnemonic> gas=<n> stack=[...]
};

struct TxResult {
    enum class Outcome { Return, Revert, OutOfGas, Fault };
    enum class Fault {
        None, StackUnderflow, StackOverflow, InvalidJump, InvalidOpcode, CallDepth
    };

    Outcome outcome = Outcome::Return;
    Fault fault = Fault::None;
    std::vector<uint8_t> data;  // return or revert payload
    uint64_t gas_used = 0;      // schedule + memory expansion
    uint64_t sched_gas = 0;
    uint64_t mem_gas = 0;
    uint64_t alloc_bytes = 0;   // allocation-site total
    uint64_t peak_mem_bytes = 0;
    BigInt declared_gas;        // ghost counter totals
    BigInt declared_alloc;
    std::vector<LogEntry> logs;

    bool committed() const { return outcome == Outcome::Return; }
    std::string outcome_name() const;
};

struct TxRequest {
    U256 contract;   // account whose code runs
    U256 caller;
    std::vector<uint8_t> calldata;
    uint64_t gas_limit = 50'000'000;
    const GasSchedule* schedule = nullptr;       // defaults when null
    const CodeMeta* meta = nullptr;              // ghost counters when present
    std::vector<TraceRow>* trace = nullptr;
};

// Runs one transaction. Commits storage, balance and log effects to `world`
// only on Return; every other outcome leaves it bit-identical.
TxResult exec_tx(EvmWorld& world, const TxRequest& req);

// The restricted send: moves `value` unconditionally, then lets the callee
// run with exactly the 2300-gas stipend; callee effects roll back on
// failure, the transfer does not. Returns the (discarded by compiled
// callers) success flag.
bool call_with_stipend(EvmWorld& world, const U256& from, const U256& to, const U256& value,
                       const GasSchedule& schedule);

}  // namespace mlcc
