// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>

#include "mlcc/bigint.hpp"
#include "mlcc/evm.hpp"

namespace mlcc {

struct GasAnalysisError : std::runtime_error {
    std::string rule;  // "dynamic-jump", "path-explosion", "non-affine"
    GasAnalysisError(std::string r, const std::string& what)
        : std::runtime_error(what), rule(std::move(r)) {}
};

enum class EdgeKind { Fallthrough, Jump, Branch, CallReturn, Back };

struct CfgEdge {
    size_t target;  // block index
    EdgeKind kind;
};

struct CfgBlock {
    size_t first_instr = 0;  // indices into the function's instruction slice
    size_t last_instr = 0;   // inclusive
    size_t offset = 0;       // byte offset of the first instruction
    uint64_t sched_cost = 0;
    uint64_t alloc_bytes = 0;
    uint64_t ann_used = 0;
    uint64_t ann_alloc = 0;
    bool is_loop_head = false;
    bool terminal = false;  // ends in RETURN/REVERT/STOP or a Ret jump
    bool dead = false;      // ends in INVALID: unreachable match-dispatch tail
    std::vector<CfgEdge> out;
};

/// Per-function control-flow graph over the sized program. Blocks partition
/// the function's instructions; back edges come from the backend's tags.
struct Cfg {
    std::string fn_name;
    std::vector<CfgBlock> blocks;
    size_t entry_block = 0;
    std::vector<size_t> loop_head_blocks;
};

// Throws GasAnalysisError("dynamic-jump") when a JUMP/JUMPI inside the span
// carries no tag and is not preceded by a PUSH constant (foreign bytecode).
Cfg build_cfg(const SizedProgram& p, const FnSpan& fn, const GasSchedule& sched);

/// An acyclic walk from an entry node (function entry or loop head), cut at
/// edges that re-enter a loop head, ending at terminals.
struct GasPath {
    std::vector<size_t> blocks;
    size_t entry_offset = 0;       // byte offset of the first block
    std::string entry_kind;        // "entry" or "loop"
    uint64_t cost = 0;             // schedule cost of all instructions on the path
    uint64_t alloc = 0;            // allocation-site bytes on the path
    uint64_t bound_used = 0;       // sum of annotation `used` on the path
    uint64_t bound_alloc = 0;
    bool pass = false;
};

// Deterministic (block-index lexicographic) enumeration; throws
// GasAnalysisError("path-explosion") past `cap` paths.
std::vector<GasPath> enumerate_paths(const Cfg& cfg, size_t cap = 100000);

struct FunctionGasReport {
    std::string fn_name;
    std::vector<GasPath> paths;
    bool pass = false;

    std::string render() const;  // one PATH line per path
};

// The paths of a gas_checking function must each cost no more than the
// annotations they carry, in both gas and allocation.
FunctionGasReport check_function(const SizedProgram& p, const FnSpan& fn,
                                 const GasSchedule& sched, size_t path_cap = 100000);

/// Least affine upper bound step*x + base dominating all measurements.
struct AffineBound {
    BigInt step;
    BigInt base;
    BigInt max_residual;  // max (bound - measurement); 0 means tight everywhere

    BigInt at(uint64_t x) const { return step * BigInt::from_u64(x) + base; }
};

// `measure(x)` returns the observed cost at size x. With require_exact the
// data must be exactly affine (every residual zero), else
// GasAnalysisError("non-affine").
AffineBound measure_constants(const std::function<BigInt(uint64_t)>& measure,
                              const std::vector<uint64_t>& xs, bool require_exact = false);

/// Per-function dynamic meters extracted from a trace by entry/return
/// bracketing (recursion-aware).
struct FnProfile {
    bool entered = false;
    uint64_t sched_gas = 0;   // schedule-only cost between entry and final return
    uint64_t alloc_bytes = 0;
    BigInt declared_gas;      // ghost counter advance over the same bracket
    BigInt declared_alloc;
};

FnProfile profile_function(const std::vector<TraceRow>& trace, const FnSpan& fn,
                           const TxResult& final_result, const GasSchedule& sched);

}  // namespace mlcc
