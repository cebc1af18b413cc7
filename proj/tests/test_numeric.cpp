// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "mlcc/bigint.hpp"
#include "mlcc/numeric.hpp"
#include "test_support.hpp"

using namespace mlcc;
using mlcc::test::kAllKinds;
using mlcc::test::random_bounded;

TEST_CASE("BigInt basic arithmetic agrees with int64 on small values") {
    std::mt19937_64 rng(7);
    for (int iter = 0; iter < 4000; ++iter) {
        int64_t a = static_cast<int64_t>(rng() % 2000001) - 1000000;
        int64_t b = static_cast<int64_t>(rng() % 2000001) - 1000000;
        BigInt A(a), B(b);
        CHECK((A + B).to_i64() == a + b);
        CHECK((A - B).to_i64() == a - b);
        CHECK((A * B).to_i64() == a * b);
        if (b != 0) {
            CHECK((A / B).to_i64() == a / b);
            CHECK((A % B).to_i64() == a % b);
        }
        CHECK((A < B) == (a < b));
    }
}

TEST_CASE("BigInt string round trips and powers of two") {
    CHECK(BigInt::from_string("0").to_string() == "0");
    CHECK(BigInt::from_string("-12345678901234567890123456789").to_string() ==
          "-12345678901234567890123456789");
    CHECK(BigInt::pow2(256).to_string() ==
          "115792089237316195423570985008687907853269984665640564039457584007913129639936");
    CHECK(BigInt::from_string("0xff") == BigInt(255));
    std::mt19937_64 rng(11);
    for (int iter = 0; iter < 200; ++iter) {
        BigInt v = BigInt::from_u64(rng()) * BigInt::from_u64(rng()) - BigInt::from_u64(rng());
        CHECK(BigInt::from_string(v.to_string()) == v);
    }
}

TEST_CASE("U256 wrap arithmetic and hex") {
    U256 max = U256::max_value();
    bool carry = false;
    CHECK(U256::add(max, U256(1), &carry) == U256(0));
    CHECK(carry);
    CHECK(U256::sub(U256(0), U256(1)) == max);
    CHECK(U256::from_hex("0x2a") == U256(42));
    CHECK(U256(42).to_hex() == "2a");
    CHECK(U256::div(U256(7), U256(0)) == U256(0));  // EVM convention

    std::mt19937_64 rng(3);
    for (int iter = 0; iter < 2000; ++iter) {
        U256 a = mlcc::test::random_word(rng);
        U256 b = mlcc::test::random_word(rng);
        if (b.is_zero()) continue;
        U256 q = U256::div(a, b);
        U256 r = U256::mod(a, b);
        CHECK(r < b);
        U256 high;
        U256 back = U256::mul(q, b, &high);
        CHECK(high.is_zero());
        CHECK(U256::add(back, r) == a);
        // cross-check against the arbitrary-precision side
        CHECK(q.to_bigint() == a.to_bigint() / b.to_bigint());
    }
}

TEST_CASE("checked_arith identities and forced boundaries") {
    BoundedInt zero = BoundedInt::from_u64(kUint256, 0);
    CHECK(checked_arith(ArithOp::Add, zero, zero) == zero);

    BoundedInt max = from_math(kUint256, kUint256.max_value());
    BoundedInt one = BoundedInt::from_u64(kUint256, 1);
    CHECK_THROWS_AS(checked_arith(ArithOp::Add, max, one), ArithError);

    CHECK_THROWS_AS(checked_arith(ArithOp::Div, one, zero), ArithError);
    CHECK_THROWS_AS(checked_arith(ArithOp::Add, one, BoundedInt::from_u64(kUint32, 1)),
                    ArithError);

    // signed specifics
    BoundedInt imin = from_math(kInt32, kInt32.min_value());
    BoundedInt mone = from_math(kInt32, BigInt(-1));
    CHECK_THROWS_AS(checked_arith(ArithOp::Div, imin, mone), ArithError);  // -2^31 / -1
    CHECK(to_math(checked_arith(ArithOp::Div, from_math(kInt32, BigInt(-7)),
                                from_math(kInt32, BigInt(2)))) == BigInt(-3));
    CHECK_THROWS_AS(checked_arith(ArithOp::Sub, imin, from_math(kInt32, BigInt(1))), ArithError);
}

TEST_CASE("checked_arith agrees with the arbitrary-precision oracle") {
    std::mt19937_64 rng(42);
    const ArithOp ops[] = {ArithOp::Add, ArithOp::Sub, ArithOp::Mul, ArithOp::Div};
    for (IntKind kind : kAllKinds) {
        for (int iter = 0; iter < 2500; ++iter) {
            BoundedInt a = random_bounded(rng, kind);
            BoundedInt b = random_bounded(rng, kind);
            ArithOp op = ops[rng() % 4];
            // Oracle path: exact math over BigInt, then a range check.
            BigInt ma = to_math(a), mb = to_math(b);
            bool oracle_ok = true;
            BigInt expect;
            if (op == ArithOp::Div && mb.is_zero()) {
                CHECK_THROWS_AS(checked_arith(op, a, b), ArithError);
                continue;
            }
            switch (op) {
            case ArithOp::Add: expect = ma + mb; break;
            case ArithOp::Sub: expect = ma - mb; break;
            case ArithOp::Mul: expect = ma * mb; break;
            case ArithOp::Div: expect = ma / mb; break;
            }
            oracle_ok = expect >= kind.min_value() && expect <= kind.max_value();
            if (oracle_ok) {
                BoundedInt got = checked_arith(op, a, b);
                CHECK(to_math(got) == expect);
                CHECK(got.kind() == kind);
            } else {
                CHECK_THROWS_AS(checked_arith(op, a, b), ArithError);
            }
        }
    }
}

TEST_CASE("to_math/from_math are mutually inverse") {
    CHECK(to_math(BoundedInt::from_u64(kUint256, 42)) == BigInt(42));
    CHECK(to_math(BoundedInt::from_u64(kUint256, 0)) == BigInt(0));
    CHECK(from_math(kUint256, BigInt(7)) == BoundedInt::from_u64(kUint256, 7));
    CHECK_THROWS_AS(from_math(kInt32, BigInt::pow2(31)), ArithError);
    CHECK(to_math(from_math(kUint160, BigInt::pow2(160) - BigInt(1))) ==
          BigInt::pow2(160) - BigInt(1));

    std::mt19937_64 rng(99);
    for (IntKind kind : kAllKinds) {
        for (int iter = 0; iter < 1000; ++iter) {
            BoundedInt x = random_bounded(rng, kind);
            CHECK(from_math(kind, to_math(x)) == x);
        }
    }
}

TEST_CASE("range invariant enforced at construction") {
    CHECK_THROWS_AS(BoundedInt::from_raw(kUint32, U256::pow2(32)), ArithError);
    CHECK_THROWS_AS(BoundedInt::from_raw(kInt32, U256::pow2(31)), ArithError);  // bad extension
    U256 minus_one = U256::max_value();
    CHECK(BoundedInt::from_raw(kInt32, minus_one).is_negative());
    CHECK_THROWS_AS(BoundedInt::from_raw(kUint32, minus_one), ArithError);
}
