// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "mlcc/chain.hpp"

namespace mlcc {

/// One order-book entry: who, how many crypto-kWh, at what price per token.
struct Order {
    Address order_address;
    U256 tokens;       // uint256, > 0 required on input to trading
    U256 price_order;  // uint256

    bool operator==(const Order&) const = default;
};

/// A matched (seller, buyer, amount) triple; indices refer to the order
/// arrays the trade was produced against.
struct Trade {
    size_t seller_index;
    size_t buyer_index;
    BigInt amount;  // > 0

    bool operator==(const Trade&) const = default;
};

/// Trades most recent first (cons-list construction order).
struct TradeList {
    std::vector<Trade> trades;

    std::vector<Trade> in_construction_order() const {
        return {trades.rbegin(), trades.rend()};
    }
    size_t size() const { return trades.size(); }
};

struct PreconditionViolation : std::runtime_error {
    explicit PreconditionViolation(const std::string& what) : std::runtime_error(what) {}
};

// True iff prices are non-increasing with index.
bool sorted_order(const std::vector<Order>& orders);

// True iff the trade's indices are valid, amount > 0, and the seller's ask
// does not exceed the buyer's bid.
bool matching_order(const Trade& t, const std::vector<Order>& buys,
                    const std::vector<Order>& sells);

// Total amount over trades with the given seller (resp. buyer) index.
BigInt sum_seller(const TradeList& trades, size_t seller_index);
BigInt sum_buyer(const TradeList& trades, size_t buyer_index);

// Total amount over all trades.
BigInt nb_token(const TradeList& trades);

// Conservation per party plus matching for every trade.
bool correct(const TradeList& trades, const std::vector<Order>& buys,
             const std::vector<Order>& sells);

/// Two-cursor greedy matcher over price-sorted books. Inputs are copied
/// internally; callers observe them unmodified. Preconditions (non-empty,
/// sorted, all tokens positive) are asserted in spec-check mode.
TradeList trading(const std::vector<Order>& buys, const std::vector<Order>& sells,
                  const ChainMode& mode = {});

// Independent optimality oracle: maximum total tokens over all correct
// trade lists, as integer max flow on the compatibility bipartite graph.
// Intended for small instances (tokens must fit in uint64).
BigInt oracle_max_tokens(const std::vector<Order>& buys, const std::vector<Order>& sells);

/// CLI order-book file: header `buys N sells M`, then one order per line
/// `<address-hex> <tokens> <price>`, buys first. Each section must satisfy
/// sorted_order or loading fails.
struct OrderBook {
    std::vector<Order> buys;
    std::vector<Order> sells;
};

OrderBook load_order_book(std::istream& in);  // throws std::runtime_error on malformed input

}  // namespace mlcc
