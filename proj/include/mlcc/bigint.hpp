// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mlcc {

/// Arbitrary-precision signed integer. Backs the specification-level
/// mathematical-integer view (gas counters, token sums) where no width
/// bound applies. Magnitude is stored little-endian in base 2^32.
class BigInt {
public:
    BigInt() = default;
    BigInt(int64_t v);
    static BigInt from_u64(uint64_t v);
    static BigInt from_limbs(bool negative, std::vector<uint32_t> mag);

    // Accepts optional leading '-', then decimal digits or 0x-prefixed hex.
    static BigInt from_string(const std::string& s);

    bool is_zero() const { return mag_.empty(); }
    bool is_negative() const { return neg_; }
    const std::vector<uint32_t>& magnitude() const { return mag_; }

    BigInt operator-() const;
    BigInt operator+(const BigInt& o) const;
    BigInt operator-(const BigInt& o) const;
    BigInt operator*(const BigInt& o) const;
    // Truncated division (rounds toward zero), C semantics for signs.
    BigInt operator/(const BigInt& o) const;
    BigInt operator%(const BigInt& o) const;

    BigInt& operator+=(const BigInt& o) { *this = *this + o; return *this; }
    BigInt& operator-=(const BigInt& o) { *this = *this - o; return *this; }

    bool operator==(const BigInt& o) const { return neg_ == o.neg_ && mag_ == o.mag_; }
    bool operator!=(const BigInt& o) const { return !(*this == o); }
    bool operator<(const BigInt& o) const { return cmp(o) < 0; }
    bool operator<=(const BigInt& o) const { return cmp(o) <= 0; }
    bool operator>(const BigInt& o) const { return cmp(o) > 0; }
    bool operator>=(const BigInt& o) const { return cmp(o) >= 0; }

    // -1, 0, +1 with full sign handling.
    int cmp(const BigInt& o) const;

    // 2^k, k >= 0.
    static BigInt pow2(unsigned k);

    std::string to_string() const;

    // Fits in int64_t?
    bool fits_i64() const;
    int64_t to_i64() const;  // caller checks fits_i64

    uint32_t bit_length() const;
    bool bit(uint32_t i) const;

private:
    bool neg_ = false;             // never set when mag_ is empty
    std::vector<uint32_t> mag_;    // little-endian, no trailing zero limbs

    void normalize();
    static int cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b);
    static std::vector<uint32_t> add_mag(const std::vector<uint32_t>& a,
                                         const std::vector<uint32_t>& b);
    // requires |a| >= |b|
    static std::vector<uint32_t> sub_mag(const std::vector<uint32_t>& a,
                                         const std::vector<uint32_t>& b);
    static void divmod_mag(const std::vector<uint32_t>& num, const std::vector<uint32_t>& den,
                           std::vector<uint32_t>& quot, std::vector<uint32_t>& rem);
};

}  // namespace mlcc
