// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#include "mlcc/bigint.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace mlcc {

void BigInt::normalize() {
    while (!mag_.empty() && mag_.back() == 0) mag_.pop_back();
    if (mag_.empty()) neg_ = false;
}

BigInt::BigInt(int64_t v) {
    uint64_t u;
    if (v < 0) {
        neg_ = true;
        u = ~static_cast<uint64_t>(v) + 1;  // |v| without UB on INT64_MIN
    } else {
        u = static_cast<uint64_t>(v);
    }
    if (u) mag_.push_back(static_cast<uint32_t>(u));
    if (u >> 32) mag_.push_back(static_cast<uint32_t>(u >> 32));
    normalize();
}

BigInt BigInt::from_u64(uint64_t v) {
    BigInt r;
    if (v) r.mag_.push_back(static_cast<uint32_t>(v));
    if (v >> 32) r.mag_.push_back(static_cast<uint32_t>(v >> 32));
    return r;
}

BigInt BigInt::from_limbs(bool negative, std::vector<uint32_t> mag) {
    BigInt r;
    r.mag_ = std::move(mag);
    r.neg_ = negative;
    r.normalize();
    return r;
}

int BigInt::cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
    if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
    for (size_t i = a.size(); i-- > 0;) {
        if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
    }
    return 0;
}

std::vector<uint32_t> BigInt::add_mag(const std::vector<uint32_t>& a,
                                      const std::vector<uint32_t>& b) {
    std::vector<uint32_t> r;
    r.reserve(std::max(a.size(), b.size()) + 1);
    uint64_t carry = 0;
    for (size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
        uint64_t s = carry;
        if (i < a.size()) s += a[i];
        if (i < b.size()) s += b[i];
        r.push_back(static_cast<uint32_t>(s));
        carry = s >> 32;
    }
    if (carry) r.push_back(static_cast<uint32_t>(carry));
    return r;
}

std::vector<uint32_t> BigInt::sub_mag(const std::vector<uint32_t>& a,
                                      const std::vector<uint32_t>& b) {
    assert(cmp_mag(a, b) >= 0);
    std::vector<uint32_t> r;
    r.reserve(a.size());
    int64_t borrow = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        int64_t d = static_cast<int64_t>(a[i]) - borrow - (i < b.size() ? b[i] : 0);
        if (d < 0) {
            d += (int64_t(1) << 32);
            borrow = 1;
        } else {
            borrow = 0;
        }
        r.push_back(static_cast<uint32_t>(d));
    }
    while (!r.empty() && r.back() == 0) r.pop_back();
    return r;
}

BigInt BigInt::operator-() const {
    BigInt r = *this;
    if (!r.mag_.empty()) r.neg_ = !r.neg_;
    return r;
}

BigInt BigInt::operator+(const BigInt& o) const {
    BigInt r;
    if (neg_ == o.neg_) {
        r.mag_ = add_mag(mag_, o.mag_);
        r.neg_ = neg_;
    } else {
        int c = cmp_mag(mag_, o.mag_);
        if (c == 0) return BigInt();
        if (c > 0) {
            r.mag_ = sub_mag(mag_, o.mag_);
            r.neg_ = neg_;
        } else {
            r.mag_ = sub_mag(o.mag_, mag_);
            r.neg_ = o.neg_;
        }
    }
    r.normalize();
    return r;
}

BigInt BigInt::operator-(const BigInt& o) const { return *this + (-o); }

BigInt BigInt::operator*(const BigInt& o) const {
    if (is_zero() || o.is_zero()) return BigInt();
    BigInt r;
    r.mag_.assign(mag_.size() + o.mag_.size(), 0);
    for (size_t i = 0; i < mag_.size(); ++i) {
        uint64_t carry = 0;
        for (size_t j = 0; j < o.mag_.size(); ++j) {
            uint64_t cur = r.mag_[i + j] + static_cast<uint64_t>(mag_[i]) * o.mag_[j] + carry;
            r.mag_[i + j] = static_cast<uint32_t>(cur);
            carry = cur >> 32;
        }
        size_t k = i + o.mag_.size();
        while (carry) {
            uint64_t cur = r.mag_[k] + carry;
            r.mag_[k] = static_cast<uint32_t>(cur);
            carry = cur >> 32;
            ++k;
        }
    }
    r.neg_ = neg_ != o.neg_;
    r.normalize();
    return r;
}

void BigInt::divmod_mag(const std::vector<uint32_t>& num, const std::vector<uint32_t>& den,
                        std::vector<uint32_t>& quot, std::vector<uint32_t>& rem) {
    assert(!den.empty());
    quot.assign(num.size(), 0);
    std::vector<uint32_t> r;  // running remainder
    // Binary long division, most significant bit first.
    for (size_t i = num.size(); i-- > 0;) {
        for (int b = 31; b >= 0; --b) {
            // r = (r << 1) | bit
            uint32_t carry = (num[i] >> b) & 1u;
            for (size_t k = 0; k < r.size(); ++k) {
                uint32_t nc = r[k] >> 31;
                r[k] = (r[k] << 1) | carry;
                carry = nc;
            }
            if (carry) r.push_back(carry);
            if (cmp_mag(r, den) >= 0) {
                r = sub_mag(r, den);
                quot[i] |= (1u << b);
            }
        }
    }
    while (!quot.empty() && quot.back() == 0) quot.pop_back();
    rem = std::move(r);
}

BigInt BigInt::operator/(const BigInt& o) const {
    if (o.is_zero()) throw std::domain_error("BigInt: division by zero");
    if (cmp_mag(mag_, o.mag_) < 0) return BigInt();
    BigInt q;
    std::vector<uint32_t> rem;
    divmod_mag(mag_, o.mag_, q.mag_, rem);
    q.neg_ = neg_ != o.neg_;
    q.normalize();
    return q;
}

BigInt BigInt::operator%(const BigInt& o) const {
    if (o.is_zero()) throw std::domain_error("BigInt: modulo by zero");
    BigInt r;
    std::vector<uint32_t> q;
    divmod_mag(mag_, o.mag_, q, r.mag_);
    r.neg_ = neg_;  // remainder carries the dividend sign (truncated division)
    r.normalize();
    return r;
}

int BigInt::cmp(const BigInt& o) const {
    if (neg_ != o.neg_) return neg_ ? -1 : 1;
    int c = cmp_mag(mag_, o.mag_);
    return neg_ ? -c : c;
}

BigInt BigInt::pow2(unsigned k) {
    BigInt r;
    r.mag_.assign(k / 32 + 1, 0);
    r.mag_.back() = 1u << (k % 32);
    return r;
}

BigInt BigInt::from_string(const std::string& s) {
    size_t i = 0;
    bool neg = false;
    if (i < s.size() && (s[i] == '-' || s[i] == '+')) {
        neg = s[i] == '-';
        ++i;
    }
    BigInt r;
    if (s.size() - i > 2 && s[i] == '0' && (s[i + 1] == 'x' || s[i + 1] == 'X')) {
        for (size_t k = i + 2; k < s.size(); ++k) {
            char c = s[k];
            int d;
            if (c >= '0' && c <= '9') d = c - '0';
            else if (c >= 'a' && c <= 'f') d = c - 'a' + 10;
            else if (c >= 'A' && c <= 'F') d = c - 'A' + 10;
            else throw std::invalid_argument("BigInt: bad hex digit");
            r = r * BigInt(16) + BigInt(d);
        }
    } else {
        if (i >= s.size()) throw std::invalid_argument("BigInt: empty literal");
        for (size_t k = i; k < s.size(); ++k) {
            char c = s[k];
            if (c < '0' || c > '9') throw std::invalid_argument("BigInt: bad decimal digit");
            r = r * BigInt(10) + BigInt(c - '0');
        }
    }
    if (neg && !r.is_zero()) r.neg_ = true;
    return r;
}

std::string BigInt::to_string() const {
    if (is_zero()) return "0";
    std::vector<uint32_t> m = mag_;
    std::string digits;
    const std::vector<uint32_t> ten = {10};
    while (!m.empty()) {
        std::vector<uint32_t> q, r;
        divmod_mag(m, ten, q, r);
        digits.push_back(static_cast<char>('0' + (r.empty() ? 0 : r[0])));
        m = std::move(q);
    }
    if (neg_) digits.push_back('-');
    std::reverse(digits.begin(), digits.end());
    return digits;
}

bool BigInt::fits_i64() const {
    if (mag_.size() > 2) return false;
    uint64_t u = 0;
    if (mag_.size() >= 1) u = mag_[0];
    if (mag_.size() == 2) u |= static_cast<uint64_t>(mag_[1]) << 32;
    if (neg_) return u <= (uint64_t(1) << 63);
    return u < (uint64_t(1) << 63);
}

int64_t BigInt::to_i64() const {
    uint64_t u = 0;
    if (mag_.size() >= 1) u = mag_[0];
    if (mag_.size() >= 2) u |= static_cast<uint64_t>(mag_[1]) << 32;
    return neg_ ? -static_cast<int64_t>(u) : static_cast<int64_t>(u);
}

uint32_t BigInt::bit_length() const {
    if (mag_.empty()) return 0;
    uint32_t top = mag_.back();
    uint32_t bits = 0;
    while (top) {
        ++bits;
        top >>= 1;
    }
    return static_cast<uint32_t>((mag_.size() - 1) * 32) + bits;
}

bool BigInt::bit(uint32_t i) const {
    size_t limb = i / 32;
    if (limb >= mag_.size()) return false;
    return (mag_[limb] >> (i % 32)) & 1u;
}

}  // namespace mlcc
