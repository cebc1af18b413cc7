// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlcc/numeric.hpp"

namespace mlcc {

/// 160-bit account address.
struct Address {
    U256 value;  // invariant: value < 2^160

    Address() = default;
    explicit Address(const U256& v);
    explicit Address(uint64_t v) : Address(U256(v)) {}
    static Address from_hex(const std::string& s) { return Address(U256::from_hex(s)); }

    bool operator==(const Address& o) const { return value == o.value; }
    bool operator<(const Address& o) const { return value < o.value; }
    std::string to_hex() const { return "0x" + value.to_hex(); }
};

struct SpecViolation : std::runtime_error {
    explicit SpecViolation(const std::string& what) : std::runtime_error(what) {}
};

struct GuardFailed : std::runtime_error {
    std::string flag;
    explicit GuardFailed(const std::string& f) : std::runtime_error("guard failed: " + f), flag(f) {}
};

struct UnknownFlag : std::runtime_error {
    explicit UnknownFlag(const std::string& f) : std::runtime_error("unknown flag: " + f) {}
};

/// Address -> uint256 balance map. Absent addresses read as zero; no entry
/// ever leaves the uint256 range.
class BalanceMap {
public:
    BoundedInt get(const Address& a) const;
    void set(const Address& a, const BoundedInt& v);
    bool contains(const Address& a) const { return entries_.count(a) != 0; }
    size_t size() const { return entries_.size(); }
    void erase(const Address& a) { entries_.erase(a); }

    BigInt total() const;
    const std::map<Address, U256>& entries() const { return entries_; }

    bool operator==(const BalanceMap& o) const { return entries_ == o.entries_; }

private:
    std::map<Address, U256> entries_;
};

using Ledger = BalanceMap;    // ether
using TokenMap = BalanceMap;  // crypto-kWh

/// Per-call execution context: sender, modifier flags, event log.
struct ExecContext {
    Address msg_sender;
    std::map<std::string, bool> flags;
    std::vector<std::pair<std::string, U256>> event_log;  // append-only

    void emit(const std::string& name, const U256& payload) {
        event_log.emplace_back(name, payload);
    }
};

/// When spec_check is on, preconditions are asserted and violations throw
/// SpecViolation; in release mode they are assumed (the callers' proof
/// obligation) and the transfer is performed unconditionally.
struct ChainMode {
    bool spec_check = true;
};

// Moves `amount` ether from -> to. Never fails at runtime in release mode;
// total supply is invariant.
void send(Ledger& ledger, const Address& from, const Address& to, const BoundedInt& amount,
          const ChainMode& mode = {});

// Moves `amount` tokens between two token maps; preserves the pairwise sum
// m_from[from] + m_to[to].
void token_transfer(TokenMap& m_from, TokenMap& m_to, const Address& from, const Address& to,
                    const BoundedInt& amount, const ChainMode& mode = {});

// Returns iff the named flag exists and is true.
void guard(const ExecContext& ctx, const std::string& flag_name);

/// Full native world: ether ledger plus the three token pools and the meter
/// registry mirror, snapshot-serializable for golden tests.
struct WorldState {
    Ledger ether;
    TokenMap market_tokens;
    TokenMap import_tokens;
    TokenMap export_tokens;

    // One line per entry: `<kind> <address-hex> <value-dec>`, sorted by
    // address within each kind.
    std::string snapshot() const;

    bool operator==(const WorldState& o) const = default;
};

}  // namespace mlcc
