// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#include "mlcc/corpus.hpp"

#include <json.hpp>
#include <sstream>

#include "mlcc/abi.hpp"

namespace mlcc::corpus {

using nlohmann::json;

namespace {

const U256 kMaxUint = U256::max_value();

U256 u256_of(const std::string& s) {
    if (s.rfind("0x", 0) == 0 || s.rfind("0X", 0) == 0) return U256::from_hex(s);
    return U256::from_decimal(s);
}

}  // namespace

U256 meter_word(const std::string& id) {
    if (id.empty() || id.size() > 24)
        throw std::invalid_argument("meter id must be 1..24 bytes: " + id);
    U256 v(0);
    for (char c : id) {
        v = v.shl(8);
        v.limb[0] |= static_cast<uint8_t>(c);
    }
    return v;
}

ExecContext NativeMarket::context(const Address& sender) const {
    ExecContext ctx;
    ctx.msg_sender = sender;
    ctx.flags["onlyOwner"] = sender == owner;
    ctx.flags["onlyOracle"] = sender == oracle;
    ctx.flags["onlyMarket"] = sender == market;
    ctx.flags["onlyAlgo"] = sender == algo;
    ctx.flags["marketOpen"] = market_open;
    return ctx;
}

void NativeMarket::require(bool cond, const std::string& what) const {
    if (mode.spec_check && !cond) throw SpecViolation(what);
}

namespace {
// public-function modifier: failure is a revert, not a spec violation
void guard_or_raise(const ExecContext& ctx, const std::string& flag, const std::string& tag) {
    try {
        guard(ctx, flag);
    } catch (const GuardFailed&) {
        throw CorpusRevert(tag);
    }
}
}  // namespace

void NativeMarket::set_market(const Address& sender, const Address& m) {
    guard_or_raise(context(sender), "onlyOwner", "OnlyOwner");
    if (market == m) throw CorpusRevert("ExistingMarket");
    market = m;
}

void NativeMarket::set_algorithm(const Address& sender, const Address& a) {
    guard_or_raise(context(sender), "onlyOwner", "OnlyOwner");
    algo = a;
}

void NativeMarket::register_smart_meter(const Address& sender, const std::string& meter_id,
                                        const Address& meter_owner) {
    guard_or_raise(context(sender), "onlyOwner", "OnlyOwner");
    if (address_of.count(meter_id)) throw CorpusRevert("ExistingSmartMeter");
    size_t size_before = address_of.size();
    address_of[meter_id] = meter_owner;
    events.emplace_back("MeterRegistered", meter_owner.value);
    require(address_of.size() == size_before + 1, "registerSmartMeter: size must grow by one");
    require(address_of.count(meter_id) == 1, "registerSmartMeter: meter must be present");
}

void NativeMarket::open_market(const Address& sender) {
    (void)sender;  // the reference contract does not owner-guard open/close
    if (market_open) throw CorpusRevert("MarketOpen");
    market_open = true;
}

void NativeMarket::close_market(const Address& sender) {
    (void)sender;
    if (!market_open) throw CorpusRevert("MarketClose");
    market_open = false;
    sell_book.clear();
    buy_book.clear();
}

void NativeMarket::credit(const Address& sender, const Address& who, const U256& amount) {
    guard_or_raise(context(sender), "onlyOwner", "OnlyOwner");
    U256 bal = balance.get(who).raw();
    if (bal > U256::sub(kMaxUint, amount)) throw CorpusRevert("OverFlow");
    balance.set(who, BoundedInt::from_raw(kUint256, U256::add(bal, amount)));
}

void NativeMarket::market_sell(const Address& order_addr, const U256& amount, const U256& price) {
    require(market_open, "market_sell: market must be open");
    require(!amount.is_zero(), "market_sell: amount must be positive");
    require(!price.is_zero(), "market_sell: price must be positive");
    size_t next_id = sell_book.size();
    sell_book.push_back(Order{order_addr, amount, price});
    require(sell_book.size() == next_id + 1, "market_sell: order count must grow");
    require(sell_book[next_id].order_address == order_addr &&
                sell_book[next_id].tokens == amount && sell_book[next_id].price_order == price,
            "market_sell: stored order must match the submission");
    declared_gas += BigInt(150000);
}

void NativeMarket::market_buy(const Address& order_addr, const U256& amount, const U256& price) {
    require(market_open, "market_buy: market must be open");
    require(!amount.is_zero(), "market_buy: amount must be positive");
    require(!price.is_zero(), "market_buy: price must be positive");
    size_t next_id = buy_book.size();
    buy_book.push_back(Order{order_addr, amount, price});
    require(buy_book.size() == next_id + 1, "market_buy: order count must grow");
    declared_gas += BigInt(150000);
}

void NativeMarket::record_imports_exports(const Address& sender, const std::string& buy_meter,
                                          const U256& buy_price, const U256& buy_amount,
                                          const std::string& sell_meter, const U256& sell_price,
                                          const U256& sell_amount) {
    ExecContext ctx = context(sender);
    guard_or_raise(ctx, "marketOpen", "WhenMarketOpen");
    guard_or_raise(ctx, "onlyOracle", "OnlyOracle");
    if (!address_of.count(buy_meter)) throw CorpusRevert("NoSmartMeter");
    if (!address_of.count(sell_meter)) throw CorpusRevert("NoSmartMeter");
    Address owner_s = address_of.at(sell_meter);
    if (owner_s == Address(0)) throw CorpusRevert("OwnerNotFound");
    Address owner_b = address_of.at(buy_meter);
    if (owner_b == Address(0)) throw CorpusRevert("OwnerNotFound");
    if (buy_amount.is_zero()) throw CorpusRevert("NoAmount");
    if (sell_amount.is_zero()) throw CorpusRevert("NoAmount");
    if (fpc.is_zero()) throw CorpusRevert("ZeroNumber");
    if (sell_amount > U256::div(kMaxUint, fpc)) throw CorpusRevert("OverFlow");
    if (buy_amount > U256::div(kMaxUint, fpc)) throw CorpusRevert("OverFlow");
    if (export_tokens.contains(owner_s)) throw CorpusRevert("ExistingRecord");
    if (import_tokens.contains(owner_b)) throw CorpusRevert("ExistingRecord");
    if (sell_price.is_zero()) throw CorpusRevert("NoPrice");
    if (buy_price.is_zero()) throw CorpusRevert("NoPrice");
    if (market_tokens.contains(market)) throw CorpusRevert("ExistingMarket");

    U256 export_scaled = U256::mul(sell_amount, fpc);
    U256 import_scaled = U256::mul(buy_amount, fpc);
    export_tokens.set(owner_s, BoundedInt::from_raw(kUint256, export_scaled));
    import_tokens.set(owner_b, BoundedInt::from_raw(kUint256, import_scaled));
    market_tokens.set(market, BoundedInt::from_u64(kUint256, 0));
    // the reference body's sell branch is dead; both purchases are submitted
    market_buy(owner_b, import_scaled, buy_price);
    market_sell(owner_s, export_scaled, sell_price);
}

void NativeMarket::transfer_to_market(const Address& sender, const Address& from,
                                      const U256& value) {
    require(sender == market, "transferToMarket: onlymarket");
    require(!value.is_zero(), "transferToMarket: value must be positive");
    require(market_tokens.get(market).raw().is_zero(),
            "transferToMarket: market pool must be empty");
    BigInt sum_before =
        to_math(export_tokens.get(from)) + to_math(market_tokens.get(market));
    token_transfer(export_tokens, market_tokens, from, market,
                   BoundedInt::from_raw(kUint256, value), mode);
    require(sum_before ==
                to_math(export_tokens.get(from)) + to_math(market_tokens.get(market)),
            "transferToMarket: pairwise sum must be preserved");
}

void NativeMarket::transfer_from_market(const Address& sender, const Address& to,
                                        const U256& value) {
    require(sender == market, "transferFromMarket: onlymarket");
    require(!value.is_zero(), "transferFromMarket: value must be positive");
    require(!market_tokens.get(market).raw().is_zero(),
            "transferFromMarket: market pool must be funded");
    BigInt sum_before = to_math(market_tokens.get(market)) + to_math(import_tokens.get(to));
    token_transfer(market_tokens, import_tokens, market, to,
                   BoundedInt::from_raw(kUint256, value), mode);
    require(sum_before == to_math(market_tokens.get(market)) + to_math(import_tokens.get(to)),
            "transferFromMarket: pairwise sum must be preserved");
}

void NativeMarket::settle(const Address& sender, size_t sell_id, size_t buy_id,
                          const U256& amount, const U256& price) {
    require(sender == market, "settle: onlymarket");
    require(sender == algo, "settle: onlyAlgo");
    require(!amount.is_zero() && !price.is_zero(), "settle: positive purchase");
    require(sell_id < sell_book.size(), "settle: sell order must exist");
    require(buy_id < buy_book.size(), "settle: buy order must exist");
    Address seller = sell_book[sell_id].order_address;
    Address buyer = buy_book[buy_id].order_address;
    require(!(seller == buyer), "settle: uniqueAddress");

    BigInt ether_before = to_math(balance.get(buyer)) + to_math(balance.get(seller));
    // the ether leg, then the token leg
    send(balance, buyer, seller, BoundedInt::from_raw(kUint256, price), mode);
    transfer_from_market(sender, buyer, amount);
    require(ether_before == to_math(balance.get(buyer)) + to_math(balance.get(seller)),
            "settle: buyer/seller ether sum must be preserved");
}

// ---- scenario loading ----

Scenario Scenario::from_json_text(const std::string& text) {
    json j = json::parse(text);
    Scenario s;
    s.name = j.value("name", "scenario");
    const json& init = j.at("init");
    for (const char* role : {"owner", "oracle", "market", "algo"})
        s.roles[role] = init.at(role).get<std::string>();
    if (init.contains("fpc")) s.fpc = u256_of(init.at("fpc").get<std::string>());
    if (init.contains("balances")) {
        for (auto it = init.at("balances").begin(); it != init.at("balances").end(); ++it)
            s.balances.emplace_back(it.key(), u256_of(it.value().get<std::string>()));
    }
    for (const json& js : j.at("steps")) {
        ScenarioStep step;
        step.op = js.at("op").get<std::string>();
        step.caller = js.value("caller", "owner");
        if (js.contains("args")) {
            for (auto it = js.at("args").begin(); it != js.at("args").end(); ++it)
                step.args[it.key()] = it.value().is_string()
                                          ? it.value().get<std::string>()
                                          : it.value().dump();
        }
        if (js.contains("expect")) {
            const json& e = js.at("expect");
            if (e.is_string()) {
                if (e.get<std::string>() != "ok")
                    throw std::runtime_error("scenario: expect must be \"ok\" or {\"revert\":...}");
            } else {
                step.expect_revert = e.at("revert").get<std::string>();
            }
        }
        if (js.contains("expectTrades")) step.expect_trades = js.at("expectTrades").get<int>();
        s.steps.push_back(std::move(step));
    }
    return s;
}

Address Scenario::role_address(const std::string& name_or_hex) const {
    auto it = roles.find(name_or_hex);
    if (it != roles.end()) return Address(U256::from_hex(it->second));
    return Address(U256::from_hex(name_or_hex));
}

// ---- shared runner skeleton ----

namespace {

struct TradePlan {
    size_t sell_id, buy_id;
    U256 amount, price;
    Address seller;
};

// Matches the books natively and plans the settlement transactions.
std::vector<TradePlan> plan_trades(const std::vector<Order>& buys,
                                   const std::vector<Order>& sells) {
    std::vector<TradePlan> plan;
    if (buys.empty() || sells.empty()) return plan;
    TradeList trades = trading(buys, sells);
    for (const Trade& t : trades.in_construction_order()) {
        TradePlan p;
        p.sell_id = t.seller_index;
        p.buy_id = t.buyer_index;
        p.amount = U256::from_bigint_truncated(t.amount);
        p.price = sells[t.seller_index].price_order;  // settlement at the ask
        p.seller = sells[t.seller_index].order_address;
        plan.push_back(p);
    }
    return plan;
}

struct StepDriver {
    virtual ~StepDriver() = default;
    virtual StepResult run_step(const ScenarioStep& step) = 0;
    virtual BalanceView view() const = 0;
};

ScenarioReport drive(const Scenario& s, StepDriver& driver, const std::string& mode_name) {
    ScenarioReport rep;
    rep.scenario = s.name;
    rep.mode = mode_name;
    rep.pass = true;
    for (const auto& [addr, amount] : s.balances) rep.credited_ether += amount.to_bigint();
    size_t idx = 0;
    for (const ScenarioStep& step : s.steps) {
        StepResult res = driver.run_step(step);
        bool matched = step.expect_revert.empty()
                           ? res.ok
                           : (!res.ok && res.revert_tag == step.expect_revert);
        std::ostringstream line;
        line << "step " << idx << " " << step.op << ": "
             << (res.ok ? "ok" : res.revert_tag);
        if (!res.note.empty()) line << " (" << res.note << ")";
        line << (matched ? "" : "  ** MISMATCH, expected " +
                                    (step.expect_revert.empty() ? std::string("ok")
                                                                : step.expect_revert));
        rep.lines.push_back(line.str());
        rep.steps.push_back(res);
        rep.pass = rep.pass && matched;
        if (step.op == "recordImportsAndExports" && res.ok) {
            U256 fpc = s.fpc;
            rep.minted_export += (U256::mul(u256_of(step.args.at("sellAmount")), fpc)).to_bigint();
            rep.minted_import += (U256::mul(u256_of(step.args.at("buyAmount")), fpc)).to_bigint();
        }
        if (step.op == "credit" && res.ok)
            rep.credited_ether += u256_of(step.args.at("amount")).to_bigint();
        ++idx;
    }
    rep.final_view = driver.view();
    return rep;
}

// ---- native driver ----

struct NativeDriver : StepDriver {
    const Scenario& s;
    NativeMarket m;

    explicit NativeDriver(const Scenario& sc) : s(sc) {
        m.owner = s.role_address("owner");
        m.oracle = s.role_address("oracle");
        m.market = s.role_address("market");
        m.algo = s.role_address("algo");
        m.fpc = s.fpc;
        for (const auto& [hex, amount] : s.balances)
            m.balance.set(Address(U256::from_hex(hex)), BoundedInt::from_raw(kUint256, amount));
    }

    StepResult run_step(const ScenarioStep& step) override {
        StepResult res;
        Address sender = s.role_address(step.caller);
        try {
            if (step.op == "registerSmartMeter") {
                m.register_smart_meter(sender, step.args.at("meter"),
                                       Address(U256::from_hex(step.args.at("owner"))));
            } else if (step.op == "openMarket") {
                m.open_market(sender);
            } else if (step.op == "closeMarket") {
                m.close_market(sender);
            } else if (step.op == "setMarket") {
                m.set_market(sender, Address(U256::from_hex(step.args.at("address"))));
            } else if (step.op == "setAlgorithm") {
                m.set_algorithm(sender, Address(U256::from_hex(step.args.at("address"))));
            } else if (step.op == "credit") {
                m.credit(sender, Address(U256::from_hex(step.args.at("who"))),
                         u256_of(step.args.at("amount")));
            } else if (step.op == "recordImportsAndExports") {
                m.record_imports_exports(sender, step.args.at("buyMeter"),
                                         u256_of(step.args.at("buyPrice")),
                                         u256_of(step.args.at("buyAmount")),
                                         step.args.at("sellMeter"),
                                         u256_of(step.args.at("sellPrice")),
                                         u256_of(step.args.at("sellAmount")));
            } else if (step.op == "marketSell") {
                m.market_sell(Address(U256::from_hex(step.args.at("address"))),
                              u256_of(step.args.at("amount")), u256_of(step.args.at("price")));
            } else if (step.op == "marketBuy") {
                m.market_buy(Address(U256::from_hex(step.args.at("address"))),
                             u256_of(step.args.at("amount")), u256_of(step.args.at("price")));
            } else if (step.op == "runTrading") {
                auto plan = plan_trades(m.buy_book, m.sell_book);
                for (const TradePlan& t : plan) {
                    m.transfer_to_market(m.market, t.seller, t.amount);
                    m.settle(m.algo, t.sell_id, t.buy_id, t.amount, t.price);
                }
                res.note = std::to_string(plan.size()) + " trades";
                if (step.expect_trades >= 0 &&
                    plan.size() != static_cast<size_t>(step.expect_trades)) {
                    res.ok = false;
                    res.revert_tag = "TradeCountMismatch";
                    return res;
                }
            } else {
                throw std::runtime_error("unknown scenario op " + step.op);
            }
            res.ok = true;
        } catch (const CorpusRevert& r) {
            res.revert_tag = r.tag;
        } catch (const SpecViolation& v) {
            res.revert_tag = std::string("SpecViolation: ") + v.what();
        } catch (const PreconditionViolation& v) {
            res.revert_tag = std::string("SpecViolation: ") + v.what();
        }
        return res;
    }

    BalanceView view() const override {
        BalanceView v;
        for (const auto& [a, bal] : m.balance.entries())
            if (!bal.is_zero()) v.ether[a.value] = bal;
        for (const auto& [a, bal] : m.export_tokens.entries())
            if (!bal.is_zero()) v.exports[a.value] = bal;
        for (const auto& [a, bal] : m.import_tokens.entries())
            if (!bal.is_zero()) v.imports[a.value] = bal;
        for (const auto& [a, bal] : m.market_tokens.entries())
            if (!bal.is_zero()) v.market_tokens[a.value] = bal;
        return v;
    }
};

// ---- compiled driver ----

struct CompiledDriver : StepDriver {
    const Scenario& s;
    const CoreModule& core;
    const CompiledModule& compiled;
    CodeMeta meta;
    EvmWorld world;
    U256 contract{0xBE3B};
    std::map<uint32_t, std::string> tag_names;
    std::vector<U256> tracked;  // addresses whose balances the view reports

    CompiledDriver(const Scenario& sc, const CoreModule& cm, const CompiledModule& comp)
        : s(sc), core(cm), compiled(comp) {
        meta = CodeMeta::from_sized(compiled.sized);
        for (const auto& [name, tag] : compiled.exception_tags) tag_names[tag] = name;
        world.at(contract).code = compiled.code;
        auto& storage = world.at(contract).storage;
        auto put_slot = [&](const char* field, const U256& v) {
            if (!v.is_zero()) storage[compiled.layout.slot_of("st", field)] = v;
        };
        put_slot("owner", s.role_address("owner").value);
        put_slot("oracle", s.role_address("oracle").value);
        put_slot("market", s.role_address("market").value);
        put_slot("algo", s.role_address("algo").value);
        put_slot("fpc", s.fpc);
        const U256 bal_base = compiled.layout.map_base.at("balanceOf");
        for (const auto& [hex, amount] : s.balances) {
            U256 addr = U256::from_hex(hex);
            if (!amount.is_zero())
                storage[LayoutPlan::map_value_slot(bal_base, addr)] = amount;
            storage[LayoutPlan::map_presence_slot(bal_base, addr)] = U256(1);
            track(addr);
        }
        track(s.role_address("market").value);
    }

    void track(const U256& a) {
        if (std::find(tracked.begin(), tracked.end(), a) == tracked.end()) tracked.push_back(a);
    }

    U256 sload(const U256& slot) const {
        const auto& st = world.accounts.at(contract).storage;
        auto it = st.find(slot);
        return it == st.end() ? U256(0) : it->second;
    }
    U256 map_get(const char* map, const U256& key) const {
        return sload(LayoutPlan::map_value_slot(compiled.layout.map_base.at(map), key));
    }

    StepResult tx(const std::string& fn, const std::vector<U256>& args, const Address& sender) {
        TxRequest req;
        req.contract = contract;
        req.caller = sender.value;
        req.calldata = encode_calldata(fn, args);
        req.meta = &meta;
        TxResult r = exec_tx(world, req);
        StepResult res;
        if (r.outcome == TxResult::Outcome::Return) {
            res.ok = true;
        } else if (r.outcome == TxResult::Outcome::Revert) {
            uint32_t tag = 0;
            if (decode_revert_tag(r.data, &tag) && tag_names.count(tag))
                res.revert_tag = tag_names.at(tag);
            else
                res.revert_tag = "UnknownRevertData";
        } else {
            res.revert_tag = r.outcome_name();
        }
        return res;
    }

    std::vector<Order> read_book(const char* addr_map, const char* tokens_map,
                                 const char* price_map, const U256& count) const {
        std::vector<Order> book;
        for (uint64_t i = 0; i < count.as_u64(); ++i) {
            Order o;
            o.order_address = Address(map_get(addr_map, U256(i)));
            o.tokens = map_get(tokens_map, U256(i));
            o.price_order = map_get(price_map, U256(i));
            book.push_back(o);
        }
        return book;
    }

    StepResult run_step(const ScenarioStep& step) override {
        Address sender = s.role_address(step.caller);
        if (step.op == "registerSmartMeter") {
            U256 owner_addr = U256::from_hex(step.args.at("owner"));
            track(owner_addr);
            return tx("registerSmartMeter",
                      {meter_word(step.args.at("meter")), owner_addr}, sender);
        }
        if (step.op == "openMarket") return tx("openMarket", {}, sender);
        if (step.op == "closeMarket") return tx("closeMarket", {}, sender);
        if (step.op == "setMarket") {
            U256 a = U256::from_hex(step.args.at("address"));
            track(a);
            return tx("setMarket", {a}, sender);
        }
        if (step.op == "setAlgorithm")
            return tx("setAlgorithm", {U256::from_hex(step.args.at("address"))}, sender);
        if (step.op == "credit") {
            U256 who = U256::from_hex(step.args.at("who"));
            track(who);
            return tx("credit", {who, u256_of(step.args.at("amount"))}, sender);
        }
        if (step.op == "recordImportsAndExports") {
            return tx("recordImportsAndExports",
                      {meter_word(step.args.at("buyMeter")), u256_of(step.args.at("buyPrice")),
                       u256_of(step.args.at("buyAmount")), meter_word(step.args.at("sellMeter")),
                       u256_of(step.args.at("sellPrice")), u256_of(step.args.at("sellAmount"))},
                      sender);
        }
        if (step.op == "marketSell" || step.op == "marketBuy") {
            U256 a = U256::from_hex(step.args.at("address"));
            track(a);
            return tx(step.op == "marketSell" ? "market_sell" : "market_buy",
                      {a, u256_of(step.args.at("amount")), u256_of(step.args.at("price"))},
                      sender);
        }
        if (step.op == "runTrading") {
            auto buys = read_book("buyAddr", "buyTokens", "buyPrice",
                                  sload(compiled.layout.slot_of("st", "next_buy")));
            auto sells = read_book("sellAddr", "sellTokens", "sellPrice",
                                   sload(compiled.layout.slot_of("st", "next_sell")));
            for (const Order& o : buys) track(o.order_address.value);
            for (const Order& o : sells) track(o.order_address.value);
            auto plan = plan_trades(buys, sells);
            // settlement is driven by the current on-chain roles
            Address market_role{sload(compiled.layout.slot_of("st", "market"))};
            Address algo_role{sload(compiled.layout.slot_of("st", "algo"))};
            for (const TradePlan& t : plan) {
                StepResult r1 =
                    tx("transferToMarket", {t.seller.value, t.amount}, market_role);
                if (!r1.ok) return r1;
                StepResult r2 = tx("settle", {U256(t.sell_id), U256(t.buy_id), t.amount, t.price},
                                   algo_role);
                if (!r2.ok) return r2;
            }
            StepResult res;
            res.ok = true;
            res.note = std::to_string(plan.size()) + " trades";
            if (step.expect_trades >= 0 &&
                plan.size() != static_cast<size_t>(step.expect_trades)) {
                res.ok = false;
                res.revert_tag = "TradeCountMismatch";
            }
            return res;
        }
        throw std::runtime_error("unknown scenario op " + step.op);
    }

    BalanceView view() const override {
        BalanceView v;
        for (const U256& a : tracked) {
            U256 e = map_get("balanceOf", a);
            if (!e.is_zero()) v.ether[a] = e;
            U256 ex = map_get("exportBalanceOf", a);
            if (!ex.is_zero()) v.exports[a] = ex;
            U256 im = map_get("importBalanceOf", a);
            if (!im.is_zero()) v.imports[a] = im;
            U256 mk = map_get("marketBalanceOf", a);
            if (!mk.is_zero()) v.market_tokens[a] = mk;
        }
        return v;
    }
};

}  // namespace

std::string ScenarioReport::render() const {
    std::ostringstream o;
    o << "scenario " << scenario << " [" << mode << "]\n";
    for (const std::string& l : lines) o << "  " << l << "\n";
    o << "  result: " << (pass ? "PASS" : "FAIL") << "\n";
    return o.str();
}

ScenarioReport run_scenario_native(const Scenario& s) {
    NativeDriver d(s);
    return drive(s, d, "native");
}

ScenarioReport run_scenario_compiled(const Scenario& s, const CoreModule& core,
                                     const CompiledModule& compiled) {
    CompiledDriver d(s, core, compiled);
    return drive(s, d, "compiled");
}

AgreementReport compare_modes(const ScenarioReport& native, const ScenarioReport& compiled) {
    AgreementReport rep;
    if (native.steps.size() != compiled.steps.size()) {
        rep.detail = "step counts differ";
        return rep;
    }
    for (size_t i = 0; i < native.steps.size(); ++i) {
        if (!(native.steps[i] == compiled.steps[i])) {
            rep.detail = "step " + std::to_string(i) + ": native=" +
                         (native.steps[i].ok ? "ok" : native.steps[i].revert_tag) +
                         " compiled=" +
                         (compiled.steps[i].ok ? "ok" : compiled.steps[i].revert_tag);
            return rep;
        }
    }
    if (!(native.final_view == compiled.final_view)) {
        rep.detail = "final balances disagree";
        return rep;
    }
    rep.agreed = true;
    return rep;
}

}  // namespace mlcc::corpus
