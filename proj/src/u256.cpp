// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#include "mlcc/u256.hpp"

#include <stdexcept>

#include "mlcc/bigint.hpp"

namespace mlcc {

using uint128 = unsigned __int128;

bool U256::operator<(const U256& o) const {
    for (int i = 3; i >= 0; --i) {
        if (limb[i] != o.limb[i]) return limb[i] < o.limb[i];
    }
    return false;
}

U256 U256::add(const U256& a, const U256& b, bool* carry_out) {
    U256 r;
    uint128 carry = 0;
    for (int i = 0; i < 4; ++i) {
        uint128 s = static_cast<uint128>(a.limb[i]) + b.limb[i] + carry;
        r.limb[i] = static_cast<uint64_t>(s);
        carry = s >> 64;
    }
    if (carry_out) *carry_out = carry != 0;
    return r;
}

U256 U256::sub(const U256& a, const U256& b, bool* borrow_out) {
    U256 r;
    uint128 borrow = 0;
    for (int i = 0; i < 4; ++i) {
        uint128 d = static_cast<uint128>(a.limb[i]) - b.limb[i] - borrow;
        r.limb[i] = static_cast<uint64_t>(d);
        borrow = (d >> 64) ? 1 : 0;
    }
    if (borrow_out) *borrow_out = borrow != 0;
    return r;
}

U256 U256::mul(const U256& a, const U256& b, U256* high_out) {
    uint64_t prod[8] = {0};
    for (int i = 0; i < 4; ++i) {
        uint64_t carry = 0;
        for (int j = 0; j < 4; ++j) {
            uint128 cur = static_cast<uint128>(a.limb[i]) * b.limb[j] + prod[i + j] + carry;
            prod[i + j] = static_cast<uint64_t>(cur);
            carry = static_cast<uint64_t>(cur >> 64);
        }
        prod[i + 4] = carry;
    }
    U256 lo, hi;
    for (int i = 0; i < 4; ++i) {
        lo.limb[i] = prod[i];
        hi.limb[i] = prod[i + 4];
    }
    if (high_out) *high_out = hi;
    return lo;
}

U256 U256::div(const U256& a, const U256& b) {
    if (b.is_zero()) return U256(0);
    if (a < b) return U256(0);
    if (a.fits_u64() && b.fits_u64()) return U256(a.limb[0] / b.limb[0]);
    U256 q(0), rem(0);
    for (int i = 255; i >= 0; --i) {
        bool carry;
        rem = U256::add(rem, rem, &carry);  // rem <<= 1 (carry impossible: rem < b <= max)
        (void)carry;
        if (a.bit(static_cast<unsigned>(i))) rem.limb[0] |= 1;
        if (rem >= b) {
            rem = U256::sub(rem, b);
            q.limb[i / 64] |= uint64_t(1) << (i % 64);
        }
    }
    return q;
}

U256 U256::mod(const U256& a, const U256& b) {
    if (b.is_zero()) return U256(0);
    return U256::sub(a, U256::mul(U256::div(a, b), b));
}

U256 U256::and_(const U256& o) const {
    U256 r;
    for (int i = 0; i < 4; ++i) r.limb[i] = limb[i] & o.limb[i];
    return r;
}

U256 U256::or_(const U256& o) const {
    U256 r;
    for (int i = 0; i < 4; ++i) r.limb[i] = limb[i] | o.limb[i];
    return r;
}

U256 U256::not_() const {
    U256 r;
    for (int i = 0; i < 4; ++i) r.limb[i] = ~limb[i];
    return r;
}

U256 U256::shl(unsigned bits) const {
    if (bits >= 256) return U256(0);
    U256 r;
    unsigned limbshift = bits / 64, bitshift = bits % 64;
    for (int i = 3; i >= 0; --i) {
        uint64_t v = 0;
        int src = i - static_cast<int>(limbshift);
        if (src >= 0) {
            v = limb[src] << bitshift;
            if (bitshift && src > 0) v |= limb[src - 1] >> (64 - bitshift);
        }
        r.limb[i] = v;
    }
    return r;
}

U256 U256::shr(unsigned bits) const {
    if (bits >= 256) return U256(0);
    U256 r;
    unsigned limbshift = bits / 64, bitshift = bits % 64;
    for (int i = 0; i < 4; ++i) {
        uint64_t v = 0;
        size_t src = i + limbshift;
        if (src < 4) {
            v = limb[src] >> bitshift;
            if (bitshift && src + 1 < 4) v |= limb[src + 1] << (64 - bitshift);
        }
        r.limb[i] = v;
    }
    return r;
}

std::array<uint8_t, 32> U256::to_bytes() const {
    std::array<uint8_t, 32> out;
    for (int i = 0; i < 32; ++i) {
        out[31 - i] = static_cast<uint8_t>(limb[i / 8] >> ((i % 8) * 8));
    }
    return out;
}

U256 U256::from_bytes(const uint8_t* data, size_t len) {
    U256 r;
    if (len > 32) len = 32;
    for (size_t i = 0; i < len; ++i) {
        unsigned pos = static_cast<unsigned>(len - 1 - i);  // byte significance
        r.limb[pos / 8] |= static_cast<uint64_t>(data[i]) << ((pos % 8) * 8);
    }
    return r;
}

U256 U256::pow2(unsigned k) {
    U256 r;
    r.limb[k / 64] = uint64_t(1) << (k % 64);
    return r;
}

U256 U256::max_value() {
    U256 r;
    r.limb = {~uint64_t(0), ~uint64_t(0), ~uint64_t(0), ~uint64_t(0)};
    return r;
}

std::string U256::to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s = to_hex_padded();
    size_t first = s.find_first_not_of('0');
    if (first == std::string::npos) return "0";
    (void)digits;
    return s.substr(first);
}

std::string U256::to_hex_padded() const {
    static const char* digits = "0123456789abcdef";
    std::string s(64, '0');
    auto bytes = to_bytes();
    for (int i = 0; i < 32; ++i) {
        s[2 * i] = digits[bytes[i] >> 4];
        s[2 * i + 1] = digits[bytes[i] & 0xf];
    }
    return s;
}

U256 U256::from_hex(const std::string& in) {
    size_t i = 0;
    if (in.size() >= 2 && in[0] == '0' && (in[1] == 'x' || in[1] == 'X')) i = 2;
    if (i >= in.size()) throw std::invalid_argument("U256: empty hex literal");
    if (in.size() - i > 64) throw std::invalid_argument("U256: hex literal too wide");
    U256 r;
    for (; i < in.size(); ++i) {
        char c = in[i];
        uint64_t d;
        if (c >= '0' && c <= '9') d = static_cast<uint64_t>(c - '0');
        else if (c >= 'a' && c <= 'f') d = static_cast<uint64_t>(c - 'a' + 10);
        else if (c >= 'A' && c <= 'F') d = static_cast<uint64_t>(c - 'A' + 10);
        else throw std::invalid_argument("U256: bad hex digit");
        r = r.shl(4);
        r.limb[0] |= d;
    }
    return r;
}

U256 U256::from_decimal(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("U256: empty decimal literal");
    U256 r;
    for (char c : s) {
        if (c < '0' || c > '9') throw std::invalid_argument("U256: bad decimal digit");
        bool carry1;
        U256 hi;
        U256 t = U256::mul(r, U256(10), &hi);
        U256 t2 = U256::add(t, U256(static_cast<uint64_t>(c - '0')), &carry1);
        if (!hi.is_zero() || carry1) throw std::out_of_range("U256: decimal literal overflows");
        r = t2;
    }
    return r;
}

BigInt U256::to_bigint() const {
    std::vector<uint32_t> mag;
    mag.reserve(8);
    for (int i = 0; i < 4; ++i) {
        mag.push_back(static_cast<uint32_t>(limb[i]));
        mag.push_back(static_cast<uint32_t>(limb[i] >> 32));
    }
    return BigInt::from_limbs(false, std::move(mag));
}

U256 U256::from_bigint_truncated(const BigInt& v) {
    U256 r;
    const auto& mag = v.magnitude();
    for (size_t i = 0; i < mag.size() && i < 8; ++i) {
        r.limb[i / 2] |= static_cast<uint64_t>(mag[i]) << ((i % 2) * 32);
    }
    return r;
}

}  // namespace mlcc
