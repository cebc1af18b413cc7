// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "mlcc/chain.hpp"
#include "test_support.hpp"

using namespace mlcc;

namespace {
BoundedInt u256(uint64_t v) { return BoundedInt::from_u64(kUint256, v); }
}  // namespace

TEST_CASE("send moves value and conserves the total") {
    Ledger l;
    l.set(Address(0xA), u256(10));
    l.set(Address(0xB), u256(5));

    send(l, Address(0xA), Address(0xB), u256(0));
    CHECK(l.get(Address(0xA)) == u256(10));
    CHECK(l.get(Address(0xB)) == u256(5));

    send(l, Address(0xA), Address(0xB), u256(10));
    CHECK(l.get(Address(0xA)) == u256(0));
    CHECK(l.get(Address(0xB)) == u256(15));
    CHECK(l.total() == BigInt(15));
}

TEST_CASE("send precondition violations in spec-check mode") {
    Ledger l;
    l.set(Address(1), u256(5));
    CHECK_THROWS_AS(send(l, Address(1), Address(2), u256(6)), SpecViolation);
    CHECK_THROWS_AS(send(l, Address(1), Address(1), u256(1)), SpecViolation);
    l.set(Address(2), from_math(kUint256, kUint256.max_value()));
    CHECK_THROWS_AS(send(l, Address(1), Address(2), u256(1)), SpecViolation);
    // nothing mutated by the failed attempts
    CHECK(l.get(Address(1)) == u256(5));
}

TEST_CASE("random sends keep the supply constant and touch two entries") {
    std::mt19937_64 rng(2024);
    for (int iter = 0; iter < 1000; ++iter) {
        Ledger l;
        size_t n = 2 + rng() % 6;
        for (size_t k = 0; k < n; ++k) l.set(Address(k + 1), u256(rng() % 1000));
        size_t fi = rng() % n, ti = rng() % n;
        if (fi == ti) ti = (ti + 1) % n;
        Address from(fi + 1), to(ti + 1);
        uint64_t bal = l.get(from).raw().as_u64();
        if (bal == 0) continue;
        uint64_t amt = rng() % (bal + 1);
        Ledger before = l;
        send(l, from, to, u256(amt));
        CHECK(l.total() == before.total());
        for (size_t k = 0; k < n; ++k) {
            Address a(k + 1);
            if (a == from || a == to) continue;
            CHECK(l.get(a) == before.get(a));
        }
        CHECK(to_math(l.get(from)) == to_math(before.get(from)) - BigInt(static_cast<int64_t>(amt)));
        CHECK(to_math(l.get(to)) == to_math(before.get(to)) + BigInt(static_cast<int64_t>(amt)));
    }
}

TEST_CASE("token_transfer preserves the pairwise sum") {
    TokenMap market, importm;
    Address m(0x51), buyer(0x52);
    market.set(m, u256(7));

    token_transfer(market, importm, m, buyer, u256(7));
    CHECK(market.get(m) == u256(0));
    CHECK(importm.get(buyer) == u256(7));

    market.set(m, u256(7));
    importm.set(buyer, u256(1));
    token_transfer(market, importm, m, buyer, u256(3));
    CHECK(market.get(m) == u256(4));
    CHECK(importm.get(buyer) == u256(4));

    market.set(m, u256(2));
    CHECK_THROWS_AS(token_transfer(market, importm, m, buyer, u256(3)), SpecViolation);
    CHECK_THROWS_AS(token_transfer(market, importm, m, buyer, u256(0)), SpecViolation);
}

TEST_CASE("release mode assumes preconditions instead of checking them") {
    ChainMode release{false};
    Ledger l;
    l.set(Address(1), u256(5));
    // no SpecViolation; the (wrong) caller owns the consequences
    CHECK_NOTHROW(send(l, Address(1), Address(2), u256(5), release));
    CHECK(l.get(Address(2)) == u256(5));
}

TEST_CASE("address range invariant") {
    CHECK_THROWS_AS(Address(U256::pow2(160)), ArithError);
    CHECK(Address(U256::sub(U256::pow2(160), U256(1))).value.bit(159));
}

TEST_CASE("guard checks the named flag") {
    ExecContext ctx;
    ctx.flags["onlyMarket"] = true;
    CHECK_NOTHROW(guard(ctx, "onlyMarket"));
    ctx.flags["onlyMarket"] = false;
    CHECK_THROWS_AS(guard(ctx, "onlyMarket"), GuardFailed);
    CHECK_THROWS_AS(guard(ctx, "noSuchFlag"), UnknownFlag);
    try {
        guard(ctx, "onlyMarket");
    } catch (const GuardFailed& e) {
        CHECK(e.flag == "onlyMarket");
    }
}

TEST_CASE("world snapshot is canonical and sorted") {
    WorldState w;
    w.ether.set(Address(0xB), u256(5));
    w.ether.set(Address(0xA), u256(10));
    w.market_tokens.set(Address(0xC), u256(3));
    CHECK(w.snapshot() ==
          "ether a 10\n"
          "ether b 5\n"
          "market c 3\n");
    WorldState w2 = w;
    CHECK(w == w2);
    w2.ether.set(Address(0xA), u256(11));
    CHECK(!(w == w2));
}
