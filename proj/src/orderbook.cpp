// mlcc: verification-oriented contract compiler and EVM toolchain
// SPDX-License-Identifier: Apache-2.0

#include "mlcc/orderbook.hpp"

#include <algorithm>
#include <istream>
#include <limits>
#include <queue>
#include <sstream>

namespace mlcc {

bool sorted_order(const std::vector<Order>& orders) {
    for (size_t k = 1; k < orders.size(); ++k) {
        if (orders[k - 1].price_order < orders[k].price_order) return false;
    }
    return true;
}

bool matching_order(const Trade& t, const std::vector<Order>& buys,
                    const std::vector<Order>& sells) {
    if (t.buyer_index >= buys.size() || t.seller_index >= sells.size()) return false;
    if (!(t.amount > BigInt(0))) return false;
    return sells[t.seller_index].price_order <= buys[t.buyer_index].price_order;
}

BigInt sum_seller(const TradeList& trades, size_t seller_index) {
    BigInt sum;
    for (const Trade& t : trades.trades) {
        if (t.seller_index == seller_index) sum += t.amount;
    }
    return sum;
}

BigInt sum_buyer(const TradeList& trades, size_t buyer_index) {
    BigInt sum;
    for (const Trade& t : trades.trades) {
        if (t.buyer_index == buyer_index) sum += t.amount;
    }
    return sum;
}

BigInt nb_token(const TradeList& trades) {
    BigInt sum;
    for (const Trade& t : trades.trades) sum += t.amount;
    return sum;
}

bool correct(const TradeList& trades, const std::vector<Order>& buys,
             const std::vector<Order>& sells) {
    for (size_t i = 0; i < sells.size(); ++i) {
        if (sum_seller(trades, i) > sells[i].tokens.to_bigint()) return false;
    }
    for (size_t i = 0; i < buys.size(); ++i) {
        if (sum_buyer(trades, i) > buys[i].tokens.to_bigint()) return false;
    }
    for (const Trade& t : trades.trades) {
        if (!matching_order(t, buys, sells)) return false;
    }
    return true;
}

TradeList trading(const std::vector<Order>& buys_in, const std::vector<Order>& sells_in,
                  const ChainMode& mode) {
    if (mode.spec_check) {
        if (buys_in.empty() || sells_in.empty())
            throw PreconditionViolation("trading: order arrays must be non-empty");
        if (!sorted_order(buys_in) || !sorted_order(sells_in))
            throw PreconditionViolation("trading: order arrays must be price-sorted");
        for (const Order& o : buys_in)
            if (o.tokens.is_zero()) throw PreconditionViolation("trading: zero-token buy order");
        for (const Order& o : sells_in)
            if (o.tokens.is_zero()) throw PreconditionViolation("trading: zero-token sell order");
    }

    // The loop consumes token counts; work on private copies so the
    // postconditions hold against the caller's arrays.
    std::vector<Order> buys = buys_in;
    std::vector<Order> sells = sells_in;

    TradeList out;
    size_t i = 0, j = 0;
    while (i < buys.size() && j < sells.size()) {
        if (buys[i].price_order >= sells[j].price_order) {
            if (buys[i].tokens <= sells[j].tokens) {
                // Seller covers the buyer's full demand.
                U256 amount = buys[i].tokens;
                sells[j].tokens = U256::sub(sells[j].tokens, amount);
                buys[i].tokens = U256(0);
                out.trades.insert(out.trades.begin(), Trade{j, i, amount.to_bigint()});
                ++i;
                if (sells[j].tokens.is_zero()) ++j;
            } else {
                // Seller exhausted; buyer keeps shopping.
                U256 amount = sells[j].tokens;
                buys[i].tokens = U256::sub(buys[i].tokens, amount);
                sells[j].tokens = U256(0);
                out.trades.insert(out.trades.begin(), Trade{j, i, amount.to_bigint()});
                ++j;
            }
        } else {
            ++j;
        }
    }
    if (mode.spec_check) {
        // loop-invariant residue: consumed stock plus remaining stock equals
        // the original, for every party
        for (size_t k = 0; k < sells.size(); ++k) {
            if (sum_seller(out, k) + sells[k].tokens.to_bigint() != sells_in[k].tokens.to_bigint())
                throw PreconditionViolation("trading: seller stock accounting broken");
        }
        for (size_t k = 0; k < buys.size(); ++k) {
            if (sum_buyer(out, k) + buys[k].tokens.to_bigint() != buys_in[k].tokens.to_bigint())
                throw PreconditionViolation("trading: buyer stock accounting broken");
        }
    }
    return out;
}

namespace {

// Edmonds-Karp on the small dense graph: source, buyers, sellers, sink.
struct FlowNet {
    size_t n;
    std::vector<std::vector<uint64_t>> cap;

    explicit FlowNet(size_t nodes) : n(nodes), cap(nodes, std::vector<uint64_t>(nodes, 0)) {}

    uint64_t max_flow(size_t s, size_t t) {
        uint64_t total = 0;
        for (;;) {
            std::vector<ssize_t> parent(n, -1);
            parent[s] = static_cast<ssize_t>(s);
            std::queue<size_t> q;
            q.push(s);
            while (!q.empty() && parent[t] < 0) {
                size_t u = q.front();
                q.pop();
                for (size_t v = 0; v < n; ++v) {
                    if (parent[v] < 0 && cap[u][v] > 0) {
                        parent[v] = static_cast<ssize_t>(u);
                        q.push(v);
                    }
                }
            }
            if (parent[t] < 0) break;
            uint64_t push = std::numeric_limits<uint64_t>::max();
            for (size_t v = t; v != s; v = static_cast<size_t>(parent[v]))
                push = std::min(push, cap[static_cast<size_t>(parent[v])][v]);
            for (size_t v = t; v != s; v = static_cast<size_t>(parent[v])) {
                size_t u = static_cast<size_t>(parent[v]);
                cap[u][v] -= push;
                cap[v][u] += push;
            }
            total += push;
        }
        return total;
    }
};

}  // namespace

BigInt oracle_max_tokens(const std::vector<Order>& buys, const std::vector<Order>& sells) {
    size_t nb = buys.size(), ns = sells.size();
    size_t source = 0, sink = 1 + nb + ns;
    FlowNet net(nb + ns + 2);
    uint64_t inf = 0;
    for (size_t i = 0; i < nb; ++i) {
        if (!buys[i].tokens.fits_u64())
            throw PreconditionViolation("oracle_max_tokens: instance too large");
        net.cap[source][1 + i] = buys[i].tokens.as_u64();
        inf += buys[i].tokens.as_u64();
    }
    for (size_t j = 0; j < ns; ++j) {
        if (!sells[j].tokens.fits_u64())
            throw PreconditionViolation("oracle_max_tokens: instance too large");
        net.cap[1 + nb + j][sink] = sells[j].tokens.as_u64();
    }
    for (size_t i = 0; i < nb; ++i) {
        for (size_t j = 0; j < ns; ++j) {
            if (buys[i].price_order >= sells[j].price_order)
                net.cap[1 + i][1 + nb + j] = inf + 1;
        }
    }
    return BigInt::from_u64(net.max_flow(source, sink));
}

OrderBook load_order_book(std::istream& in) {
    std::string word;
    size_t nbuys = 0, nsells = 0;
    std::string kw1, kw2;
    if (!(in >> kw1 >> nbuys >> kw2 >> nsells) || kw1 != "buys" || kw2 != "sells")
        throw std::runtime_error("order book: expected header `buys N sells M`");
    auto read_section = [&in](size_t n, const char* what) {
        std::vector<Order> orders;
        orders.reserve(n);
        for (size_t k = 0; k < n; ++k) {
            std::string addr, tokens, price;
            if (!(in >> addr >> tokens >> price))
                throw std::runtime_error(std::string("order book: truncated ") + what +
                                         " section");
            Order o;
            o.order_address = Address(U256::from_hex(addr));
            o.tokens = U256::from_decimal(tokens);
            o.price_order = U256::from_decimal(price);
            orders.push_back(o);
        }
        for (size_t k = 1; k < orders.size(); ++k) {
            if (orders[k - 1].price_order < orders[k].price_order)
                throw std::runtime_error(std::string("order book: ") + what +
                                         " section not sorted at indices " +
                                         std::to_string(k - 1) + "," + std::to_string(k));
        }
        return orders;
    };
    OrderBook book;
    book.buys = read_section(nbuys, "buys");
    book.sells = read_section(nsells, "sells");
    return book;
}

}  // namespace mlcc
