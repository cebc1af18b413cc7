// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#include "mlcc/numeric.hpp"

namespace mlcc {

namespace {

// Largest magnitude representable: 2^w - 1 unsigned, 2^(w-1) - 1 positive
// signed, 2^(w-1) negative signed.
U256 max_pos_magnitude(IntKind kind) {
    if (!kind.is_signed) {
        if (kind.width == 256) return U256::max_value();
        return U256::sub(U256::pow2(kind.width), U256(1));
    }
    return U256::sub(U256::pow2(kind.width - 1), U256(1));
}

U256 max_neg_magnitude(IntKind kind) {
    if (!kind.is_signed) return U256(0);
    return U256::pow2(kind.width - 1);
}

// (negative, magnitude) -> BoundedInt raw, after range check.
BoundedInt make_signed_magnitude(IntKind kind, bool negative, const U256& mag) {
    if (mag.is_zero()) negative = false;
    if (negative) {
        if (mag > max_neg_magnitude(kind))
            throw ArithError(ArithErrorKind::Overflow, "arithmetic overflow (" + kind.name() + ")");
        return BoundedInt::from_raw(kind, mag.negate());
    }
    if (mag > max_pos_magnitude(kind))
        throw ArithError(ArithErrorKind::Overflow, "arithmetic overflow (" + kind.name() + ")");
    return BoundedInt::from_raw(kind, mag);
}

}  // namespace

bool raw_in_range(IntKind kind, const U256& raw) {
    if (!kind.is_signed) {
        if (kind.width == 256) return true;
        return raw < U256::pow2(kind.width);
    }
    // Valid iff sign-extending bit (width-1) over the full word reproduces it.
    bool neg = raw.bit(kind.width - 1);
    if (kind.width == 256) return true;
    U256 high = raw.shr(kind.width);
    if (!neg) return high.is_zero();
    return high == U256::max_value().shr(kind.width);
}

BoundedInt BoundedInt::from_raw(IntKind kind, const U256& raw) {
    if (!IntKind::valid_width(kind.width))
        throw ArithError(ArithErrorKind::OutOfRange, "invalid integer width");
    if (!raw_in_range(kind, raw))
        throw ArithError(ArithErrorKind::OutOfRange,
                         "value out of range for " + kind.name());
    return BoundedInt(kind, raw);
}

BoundedInt BoundedInt::from_u64(IntKind kind, uint64_t v) {
    return from_raw(kind, U256(v));
}

std::string BoundedInt::to_string() const {
    if (is_negative()) return "-" + magnitude().to_bigint().to_string();
    return raw_.to_bigint().to_string();
}

BoundedInt checked_arith(ArithOp op, const BoundedInt& a, const BoundedInt& b) {
    if (!(a.kind() == b.kind()))
        throw ArithError(ArithErrorKind::KindMismatch,
                         "kind mismatch: " + a.kind().name() + " vs " + b.kind().name());
    IntKind kind = a.kind();
    bool aneg = a.is_negative(), bneg = b.is_negative();
    U256 amag = a.magnitude(), bmag = b.magnitude();

    switch (op) {
    case ArithOp::Sub:
        if (!bmag.is_zero()) bneg = !bneg;
        [[fallthrough]];
    case ArithOp::Add: {
        if (aneg == bneg) {
            bool carry;
            U256 sum = U256::add(amag, bmag, &carry);
            if (carry)
                throw ArithError(ArithErrorKind::Overflow,
                                 "arithmetic overflow (" + kind.name() + ")");
            return make_signed_magnitude(kind, aneg, sum);
        }
        // Opposite signs: the larger magnitude wins.
        if (amag >= bmag) return make_signed_magnitude(kind, aneg, U256::sub(amag, bmag));
        return make_signed_magnitude(kind, bneg, U256::sub(bmag, amag));
    }
    case ArithOp::Mul: {
        U256 high;
        U256 low = U256::mul(amag, bmag, &high);
        if (!high.is_zero())
            throw ArithError(ArithErrorKind::Overflow,
                             "arithmetic overflow (" + kind.name() + ")");
        return make_signed_magnitude(kind, aneg != bneg, low);
    }
    case ArithOp::Div: {
        if (bmag.is_zero())
            throw ArithError(ArithErrorKind::DivisionByZero, "division by zero");
        // Truncated division on magnitudes gives C-style signed division.
        U256 q = U256::div(amag, bmag);
        return make_signed_magnitude(kind, aneg != bneg, q);
    }
    }
    throw ArithError(ArithErrorKind::Overflow, "unreachable");
}

BigInt to_math(const BoundedInt& a) {
    BigInt mag = a.magnitude().to_bigint();
    return a.is_negative() ? -mag : mag;
}

BoundedInt from_math(IntKind kind, const BigInt& v) {
    if (v < kind.min_value() || v > kind.max_value())
        throw ArithError(ArithErrorKind::OutOfRange,
                         v.to_string() + " out of range for " + kind.name());
    U256 mag = U256::from_bigint_truncated(v.is_negative() ? -v : v);
    return BoundedInt::from_raw(kind, v.is_negative() ? mag.negate() : mag);
}

}  // namespace mlcc
