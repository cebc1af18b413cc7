// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mlcc/core_ir.hpp"
#include "mlcc/evm.hpp"

namespace mlcc {

/// World as seen from the reference evaluator: the contract's storage (same
/// slot keys as compiled code, via the shared LayoutPlan) plus the ether
/// ledger and the log stream.
struct IRWorld {
    std::map<U256, U256> storage;  // zero values erased
    std::map<U256, U256> ether;    // address word -> balance
    std::vector<LogEntry> logs;

    bool operator==(const IRWorld&) const = default;
};

struct IRResult {
    enum class Outcome { Return, Revert, SpecViolation };
    Outcome outcome = Outcome::Return;
    U256 ret;
    bool ret_is_word = true;   // false when the function returns a heap value
    std::string revert_tag;    // exception name on Revert
    std::string message;       // diagnostic on SpecViolation
    BigInt declared_gas;       // ghost counters advanced by executed add_gas
    BigInt declared_alloc;

    std::string outcome_name() const;
};

struct IRCall {
    std::string fn;
    std::vector<U256> args;  // one word per parameter (word-typed params only)
    U256 caller;
    U256 self;               // the executing contract's address (send source)
    bool spec_check = false; // assert requires/ensures/range/variant clauses
};

// Executes one entry call with EVM-equivalent semantics (wrapping words,
// zero division yields zero, raise reverts). Commits `world` only when the
// outcome is Return; Revert and SpecViolation leave it untouched.
IRResult ir_exec(const CoreModule& m, IRWorld& world, const IRCall& call);

}  // namespace mlcc
