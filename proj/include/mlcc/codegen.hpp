// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "mlcc/core_ir.hpp"
#include "mlcc/evm_asm.hpp"

namespace mlcc {

/// Compiled artifact bundle for one module.
struct CompiledModule {
    SymProgram sym;
    SizedProgram sized;
    std::vector<uint8_t> code;
    LayoutPlan layout;
    std::map<std::string, uint32_t> exception_tags;  // name -> 4-byte tag
};

struct CodegenError : std::runtime_error {
    explicit CodegenError(const std::string& what) : std::runtime_error(what) {}
};

// Memory map: word 0x00 is scratch (return/revert/log staging), 0x20 holds
// the frame pointer, 0x40 the allocation free pointer; the heap starts at
// 0x60 and is never reclaimed within a transaction.
constexpr uint64_t kScratchCell = 0x00;
constexpr uint64_t kFramePtrCell = 0x20;
constexpr uint64_t kFreePtrCell = 0x40;
constexpr uint64_t kHeapStart = 0x60;
constexpr uint64_t kSendStipend = 2300;

// Lowers the whole module: init + selector dispatcher + one wrapper and one
// body per function. Functions whose parameters are all word-sized get a
// dispatcher entry (including private ones, so the test harness can drive
// them directly).
SymProgram codegen(const CoreModule& m);

CompiledModule compile_module(const CoreModule& m);

}  // namespace mlcc
