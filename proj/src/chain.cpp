// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#include "mlcc/chain.hpp"

#include <sstream>

namespace mlcc {

Address::Address(const U256& v) : value(v) {
    if (!v.shr(160).is_zero())
        throw ArithError(ArithErrorKind::OutOfRange, "address exceeds 160 bits");
}

BoundedInt BalanceMap::get(const Address& a) const {
    auto it = entries_.find(a);
    if (it == entries_.end()) return BoundedInt::from_u64(kUint256, 0);
    return BoundedInt::from_raw(kUint256, it->second);
}

void BalanceMap::set(const Address& a, const BoundedInt& v) {
    entries_[a] = v.raw();
}

BigInt BalanceMap::total() const {
    BigInt sum;
    for (const auto& [addr, v] : entries_) sum += v.to_bigint();
    return sum;
}

void send(Ledger& ledger, const Address& from, const Address& to, const BoundedInt& amount,
          const ChainMode& mode) {
    U256 a = amount.raw();
    U256 bal_from = ledger.get(from).raw();
    U256 bal_to = ledger.get(to).raw();
    if (mode.spec_check) {
        if (from == to) throw SpecViolation("send: from and to must differ");
        if (bal_from < a) throw SpecViolation("send: insufficient balance in sender");
        bool carry;
        U256::add(bal_to, a, &carry);
        if (carry) throw SpecViolation("send: receiver balance would exceed uint256");
    }
    ledger.set(from, BoundedInt::from_raw(kUint256, U256::sub(bal_from, a)));
    ledger.set(to, BoundedInt::from_raw(kUint256, U256::add(ledger.get(to).raw(), a)));
}

void token_transfer(TokenMap& m_from, TokenMap& m_to, const Address& from, const Address& to,
                    const BoundedInt& amount, const ChainMode& mode) {
    U256 a = amount.raw();
    U256 bal_from = m_from.get(from).raw();
    U256 bal_to = m_to.get(to).raw();
    if (mode.spec_check) {
        if (a.is_zero()) throw SpecViolation("token_transfer: amount must be positive");
        if (bal_from < a) throw SpecViolation("token_transfer: insufficient source balance");
        bool carry;
        U256::add(bal_to, a, &carry);
        if (carry) throw SpecViolation("token_transfer: destination would exceed uint256");
    }
    m_from.set(from, BoundedInt::from_raw(kUint256, U256::sub(bal_from, a)));
    m_to.set(to, BoundedInt::from_raw(kUint256, U256::add(m_to.get(to).raw(), a)));
}

void guard(const ExecContext& ctx, const std::string& flag_name) {
    auto it = ctx.flags.find(flag_name);
    if (it == ctx.flags.end()) throw UnknownFlag(flag_name);
    if (!it->second) throw GuardFailed(flag_name);
}

std::string WorldState::snapshot() const {
    std::ostringstream out;
    auto dump = [&out](const char* kind, const BalanceMap& m) {
        for (const auto& [addr, v] : m.entries())
            out << kind << " " << addr.value.to_hex() << " " << v.to_bigint().to_string() << "\n";
    };
    dump("ether", ether);
    dump("market", market_tokens);
    dump("import", import_tokens);
    dump("export", export_tokens);
    return out.str();
}

}  // namespace mlcc
