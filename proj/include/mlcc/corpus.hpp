// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "mlcc/codegen.hpp"
#include "mlcc/interp_ir.hpp"
#include "mlcc/orderbook.hpp"

namespace mlcc::corpus {

/// A raised corpus exception: maps to a revert tag in compiled code.
struct CorpusRevert : std::runtime_error {
    std::string tag;
    explicit CorpusRevert(std::string t)
        : std::runtime_error("revert " + t), tag(std::move(t)) {}
};

/// Native reference implementation of the market contract, with the
/// contract obligations asserted at runtime in spec-check mode.
class NativeMarket {
public:
    // roles and configuration
    Address owner, oracle, market, algo;
    U256 fpc{0x10000000};
    bool market_open = false;

    // state
    Ledger balance;  // platform ether
    TokenMap export_tokens, import_tokens, market_tokens;
    std::map<std::string, Address> address_of;  // meter registry
    std::vector<Order> sell_book, buy_book;
    std::vector<std::pair<std::string, U256>> events;
    BigInt declared_gas;

    ChainMode mode{true};

    // public functions: defensive, raise CorpusRevert before any mutation
    void set_market(const Address& sender, const Address& m);
    void set_algorithm(const Address& sender, const Address& a);
    void register_smart_meter(const Address& sender, const std::string& meter_id,
                              const Address& meter_owner);
    void open_market(const Address& sender);
    void close_market(const Address& sender);
    void credit(const Address& sender, const Address& who, const U256& amount);
    void record_imports_exports(const Address& sender, const std::string& buy_meter,
                                const U256& buy_price, const U256& buy_amount,
                                const std::string& sell_meter, const U256& sell_price,
                                const U256& sell_amount);

    // private functions: preconditions are SpecViolations in spec-check mode
    void market_sell(const Address& order_addr, const U256& amount, const U256& price);
    void market_buy(const Address& order_addr, const U256& amount, const U256& price);
    void transfer_to_market(const Address& sender, const Address& from, const U256& value);
    void transfer_from_market(const Address& sender, const Address& to, const U256& value);
    void settle(const Address& sender, size_t sell_id, size_t buy_id, const U256& amount,
                const U256& price);

    ExecContext context(const Address& sender) const;

private:
    void require(bool cond, const std::string& what) const;
};

// Meter ids are packed big-endian into the low bytes of a word; at most 24
// bytes so map keys stay within the injective slot range.
U256 meter_word(const std::string& id);

struct ScenarioStep {
    std::string op;
    std::string caller;  // role name (owner/oracle/market/algo) or 0x hex
    std::map<std::string, std::string> args;
    std::string expect_revert;  // empty: expect success
    int expect_trades = -1;     // runTrading only
};

struct Scenario {
    std::string name;
    std::map<std::string, std::string> roles;  // owner/oracle/market/algo -> hex
    U256 fpc{0x10000000};
    std::vector<std::pair<std::string, U256>> balances;  // hex address -> ether
    std::vector<ScenarioStep> steps;

    static Scenario from_json_text(const std::string& text);
    Address role_address(const std::string& name_or_hex) const;
};

struct StepResult {
    bool ok = false;
    std::string revert_tag;  // or "SpecViolation: ..." diagnostics
    std::string note;

    bool operator==(const StepResult& o) const {
        return ok == o.ok && revert_tag == o.revert_tag;
    }
};

/// Final balances flattened for cross-mode comparison.
struct BalanceView {
    std::map<U256, U256> ether, exports, imports, market_tokens;

    bool operator==(const BalanceView&) const = default;
};

struct ScenarioReport {
    std::string scenario;
    std::string mode;
    bool pass = false;
    std::vector<StepResult> steps;
    std::vector<std::string> lines;  // human-readable, one per step
    BalanceView final_view;
    BigInt minted_export, minted_import;  // token sources (record steps)
    BigInt credited_ether;                // ether sources (init + credit steps)

    std::string render() const;
};

ScenarioReport run_scenario_native(const Scenario& s);
ScenarioReport run_scenario_compiled(const Scenario& s, const CoreModule& core,
                                     const CompiledModule& compiled);

/// Mode agreement: step-by-step outcomes and final balances must match.
struct AgreementReport {
    bool agreed = false;
    std::string detail;  // first disagreement
};
AgreementReport compare_modes(const ScenarioReport& native, const ScenarioReport& compiled);

}  // namespace mlcc::corpus
