// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

#include "mlcc/bigint.hpp"
#include "mlcc/u256.hpp"

namespace mlcc {

/// Width/sign tag of a bounded integer type. Widths follow the language's
/// range types; unsigned covers [0, 2^w - 1], signed [-2^(w-1), 2^(w-1)-1].
struct IntKind {
    unsigned width;   // one of 32, 64, 128, 160, 256
    bool is_signed;

    bool operator==(const IntKind&) const = default;

    static bool valid_width(unsigned w) {
        return w == 32 || w == 64 || w == 128 || w == 160 || w == 256;
    }
    std::string name() const {
        return (is_signed ? "int" : "uint") + std::to_string(width);
    }
    BigInt min_value() const {
        return is_signed ? -BigInt::pow2(width - 1) : BigInt(0);
    }
    BigInt max_value() const {
        return (is_signed ? BigInt::pow2(width - 1) : BigInt::pow2(width)) - BigInt(1);
    }
};

inline constexpr IntKind kUint256{256, false};
inline constexpr IntKind kUint160{160, false};
inline constexpr IntKind kUint128{128, false};
inline constexpr IntKind kUint64{64, false};
inline constexpr IntKind kUint32{32, false};
inline constexpr IntKind kInt256{256, true};
inline constexpr IntKind kInt160{160, true};
inline constexpr IntKind kInt128{128, true};
inline constexpr IntKind kInt64{64, true};
inline constexpr IntKind kInt32{32, true};

enum class ArithOp { Add, Sub, Mul, Div };

enum class ArithErrorKind { Overflow, DivisionByZero, KindMismatch, OutOfRange };

struct ArithError : std::runtime_error {
    ArithErrorKind kind;
    explicit ArithError(ArithErrorKind k, const std::string& what)
        : std::runtime_error(what), kind(k) {}
};

/// Integer constrained to its kind's range. The raw word holds the value in
/// 256-bit two's complement (sign-extended for signed kinds), matching the
/// EVM representation, so conversions to the machine level are free.
class BoundedInt {
public:
    BoundedInt() : kind_(kUint256), raw_() {}

    // Throws ArithError(OutOfRange) when raw is not a valid two's-complement
    // encoding for the kind.
    static BoundedInt from_raw(IntKind kind, const U256& raw);
    static BoundedInt from_u64(IntKind kind, uint64_t v);

    IntKind kind() const { return kind_; }
    const U256& raw() const { return raw_; }

    bool is_negative() const { return kind_.is_signed && raw_.bit(255); }
    U256 magnitude() const { return is_negative() ? raw_.negate() : raw_; }

    bool operator==(const BoundedInt& o) const { return kind_ == o.kind_ && raw_ == o.raw_; }

    std::string to_string() const;

private:
    BoundedInt(IntKind kind, const U256& raw) : kind_(kind), raw_(raw) {}
    IntKind kind_;
    U256 raw_;
};

// Exact bounded arithmetic. The result carries the operands' kind; any
// result outside the range is an error, never a silent wrap.
// Throws ArithError: Overflow, DivisionByZero, KindMismatch.
BoundedInt checked_arith(ArithOp op, const BoundedInt& a, const BoundedInt& b);

// Exact injection into the mathematical integers.
BigInt to_math(const BoundedInt& a);

// Throws ArithError(OutOfRange) when v does not fit the kind.
BoundedInt from_math(IntKind kind, const BigInt& v);

// True iff raw is in range for the kind (valid sign extension / zero pad).
bool raw_in_range(IntKind kind, const U256& raw);

}  // namespace mlcc
