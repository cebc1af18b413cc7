// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>

namespace mlcc {

class BigInt;

/// 256-bit unsigned word, the EVM machine word. Arithmetic wraps modulo
/// 2^256; the carry/borrow/high-part variants expose what wrapped so the
/// bounded-integer layer can reject overflow instead.
struct U256 {
    std::array<uint64_t, 4> limb{0, 0, 0, 0};  // little-endian

    constexpr U256() = default;
    constexpr U256(uint64_t v) : limb{v, 0, 0, 0} {}

    static U256 from_u64(uint64_t v) { return U256(v); }
    bool is_zero() const { return !(limb[0] | limb[1] | limb[2] | limb[3]); }
    bool fits_u64() const { return !(limb[1] | limb[2] | limb[3]); }
    uint64_t as_u64() const { return limb[0]; }

    bool operator==(const U256& o) const { return limb == o.limb; }
    bool operator!=(const U256& o) const { return limb != o.limb; }
    bool operator<(const U256& o) const;
    bool operator<=(const U256& o) const { return !(o < *this); }
    bool operator>(const U256& o) const { return o < *this; }
    bool operator>=(const U256& o) const { return !(*this < o); }

    // Wrapping arithmetic; flag outputs report the wrap.
    static U256 add(const U256& a, const U256& b, bool* carry_out = nullptr);
    static U256 sub(const U256& a, const U256& b, bool* borrow_out = nullptr);
    // 256x256 -> low 256 plus a high word for overflow detection.
    static U256 mul(const U256& a, const U256& b, U256* high_out = nullptr);
    // EVM semantics: x/0 = 0, x%0 = 0.
    static U256 div(const U256& a, const U256& b);
    static U256 mod(const U256& a, const U256& b);

    U256 operator+(const U256& o) const { return add(*this, o); }
    U256 operator-(const U256& o) const { return sub(*this, o); }
    U256 operator*(const U256& o) const { return mul(*this, o); }

    U256 and_(const U256& o) const;
    U256 or_(const U256& o) const;
    U256 not_() const;
    U256 shl(unsigned bits) const;
    U256 shr(unsigned bits) const;

    bool bit(unsigned i) const { return (limb[i / 64] >> (i % 64)) & 1u; }
    // 2^256 - x (two's-complement negation).
    U256 negate() const { return sub(U256(0), *this); }

    // Big-endian 32-byte encoding (the EVM memory/storage layout).
    std::array<uint8_t, 32> to_bytes() const;
    static U256 from_bytes(const uint8_t* data, size_t len);  // left-padded if len < 32

    static U256 pow2(unsigned k);  // k < 256
    static U256 max_value();

    std::string to_hex() const;          // minimal lowercase hex, no 0x
    std::string to_hex_padded() const;   // 64 hex chars
    static U256 from_hex(const std::string& s);      // optional 0x prefix
    static U256 from_decimal(const std::string& s);  // throws on overflow

    BigInt to_bigint() const;
    // Truncates to 256 bits of the magnitude; sign handled by the caller.
    static U256 from_bigint_truncated(const BigInt& v);
};

}  // namespace mlcc
