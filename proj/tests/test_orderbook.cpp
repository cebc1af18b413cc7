// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>
#include <sstream>

#include "mlcc/orderbook.hpp"

using namespace mlcc;

namespace {

Order ord(uint64_t addr, uint64_t tokens, uint64_t price) {
    return Order{Address(addr), U256(tokens), U256(price)};
}

// Random sorted book with positive tokens, spec-scale instance sizes.
std::vector<Order> random_book(std::mt19937_64& rng, size_t max_len, uint64_t max_tokens,
                               uint64_t max_price) {
    size_t n = 1 + rng() % max_len;
    std::vector<uint64_t> prices(n);
    for (auto& p : prices) p = 1 + rng() % max_price;
    std::sort(prices.rbegin(), prices.rend());
    std::vector<Order> book;
    for (size_t k = 0; k < n; ++k) book.push_back(ord(0x100 + k, 1 + rng() % max_tokens, prices[k]));
    return book;
}

}  // namespace

TEST_CASE("sorted_order predicate") {
    CHECK(sorted_order({}));
    CHECK(sorted_order({ord(1, 1, 5), ord(2, 1, 5), ord(3, 1, 3)}));
    CHECK(!sorted_order({ord(1, 1, 3), ord(2, 1, 5)}));
}

TEST_CASE("matching_order predicate") {
    std::vector<Order> buys = {ord(1, 2, 5)};
    std::vector<Order> sells = {ord(2, 4, 3)};
    CHECK(matching_order(Trade{0, 0, BigInt(1)}, buys, sells));
    CHECK(!matching_order(Trade{0, 0, BigInt(1)}, {ord(1, 2, 2)}, sells));
    CHECK(!matching_order(Trade{1, 0, BigInt(1)}, buys, sells));  // seller index out of range
    CHECK(!matching_order(Trade{0, 0, BigInt(0)}, buys, sells));  // zero amount
}

TEST_CASE("sum_seller / sum_buyer / nb_token") {
    TradeList nil;
    CHECK(sum_seller(nil, 0) == BigInt(0));
    CHECK(nb_token(nil) == BigInt(0));

    TradeList l;
    l.trades = {Trade{1, 1, BigInt(1)}, Trade{0, 1, BigInt(1)}, Trade{0, 0, BigInt(3)}};
    CHECK(sum_seller(l, 0) == BigInt(4));
    CHECK(sum_seller(l, 1) == BigInt(1));
    CHECK(sum_buyer(l, 1) == BigInt(2));
    CHECK(nb_token(l) == BigInt(5));

    TradeList single;
    single.trades = {Trade{0, 0, BigInt(3)}};
    CHECK(nb_token(single) == BigInt(3));
}

TEST_CASE("partition identity: sum over sellers equals nb_token") {
    std::mt19937_64 rng(5);
    for (int iter = 0; iter < 500; ++iter) {
        TradeList l;
        size_t n = rng() % 12;
        for (size_t k = 0; k < n; ++k)
            l.trades.push_back(Trade{rng() % 4, rng() % 4, BigInt(1 + static_cast<int64_t>(rng() % 9))});
        BigInt by_seller, by_buyer;
        for (size_t i = 0; i < 4; ++i) {
            by_seller += sum_seller(l, i);
            by_buyer += sum_buyer(l, i);
        }
        CHECK(by_seller == nb_token(l));
        CHECK(by_buyer == nb_token(l));
    }
}

TEST_CASE("nb_token is additive over concatenation") {
    std::mt19937_64 rng(6);
    for (int iter = 0; iter < 200; ++iter) {
        TradeList a, b;
        for (size_t k = 0; k < rng() % 8; ++k)
            a.trades.push_back(Trade{rng() % 3, rng() % 3, BigInt(1 + static_cast<int64_t>(rng() % 5))});
        for (size_t k = 0; k < rng() % 8; ++k)
            b.trades.push_back(Trade{rng() % 3, rng() % 3, BigInt(1 + static_cast<int64_t>(rng() % 5))});
        TradeList both = a;
        both.trades.insert(both.trades.end(), b.trades.begin(), b.trades.end());
        CHECK(nb_token(both) == nb_token(a) + nb_token(b));
    }
}

TEST_CASE("correct predicate basics") {
    std::vector<Order> buys = {ord(1, 2, 5)};
    std::vector<Order> sells = {ord(2, 4, 3)};
    CHECK(correct(TradeList{}, buys, sells));

    TradeList over;
    over.trades = {Trade{0, 0, BigInt(9)}};  // exceeds both capacities
    CHECK(!correct(over, buys, sells));

    TradeList ok;
    ok.trades = {Trade{0, 0, BigInt(2)}};
    CHECK(correct(ok, buys, sells));
}

TEST_CASE("trading worked examples") {
    // single compatible pair: buyer takes its full demand
    TradeList r1 = trading({ord(1, 2, 5)}, {ord(2, 4, 3)});
    REQUIRE(r1.size() == 1);
    CHECK(r1.trades[0] == Trade{0, 0, BigInt(2)});

    // no price-compatible pair
    TradeList r2 = trading({ord(1, 3, 2)}, {ord(2, 1, 5)});
    CHECK(r2.size() == 0);

    // the 2x2 instance, construction order (0,0,3), (0,1,1), (1,1,1)
    std::vector<Order> buys = {ord(1, 3, 5), ord(2, 2, 4)};
    std::vector<Order> sells = {ord(3, 4, 4), ord(4, 1, 3)};
    TradeList r3 = trading(buys, sells);
    auto chron = r3.in_construction_order();
    REQUIRE(chron.size() == 3);
    CHECK(chron[0] == Trade{0, 0, BigInt(3)});
    CHECK(chron[1] == Trade{0, 1, BigInt(1)});
    CHECK(chron[2] == Trade{1, 1, BigInt(1)});
    CHECK(nb_token(r3) == BigInt(5));
    CHECK(oracle_max_tokens(buys, sells) == BigInt(5));
    // inputs observed unmodified
    CHECK(buys[0].tokens == U256(3));
    CHECK(sells[0].tokens == U256(4));
}

TEST_CASE("trading rejects malformed inputs in spec-check mode") {
    CHECK_THROWS_AS(trading({}, {ord(1, 1, 1)}), PreconditionViolation);
    CHECK_THROWS_AS(trading({ord(1, 1, 1), ord(2, 1, 2)}, {ord(3, 1, 1)}),
                    PreconditionViolation);
    CHECK_THROWS_AS(trading({ord(1, 0, 1)}, {ord(3, 1, 1)}), PreconditionViolation);
}

TEST_CASE("oracle_max_tokens basics") {
    CHECK(oracle_max_tokens({ord(1, 2, 5)}, {ord(2, 4, 3)}) == BigInt(2));
    CHECK(oracle_max_tokens({ord(1, 3, 2)}, {ord(2, 1, 5)}) == BigInt(0));
}

TEST_CASE("trading output is correct, optimal, and conserves per-party stock") {
    std::mt19937_64 rng(2718);
    for (int iter = 0; iter < 1000; ++iter) {
        auto buys = random_book(rng, 8, 16, 8);
        auto sells = random_book(rng, 8, 16, 8);
        TradeList result = trading(buys, sells);

        CHECK(correct(result, buys, sells));
        CHECK(nb_token(result) == oracle_max_tokens(buys, sells));

        // loop-invariant residue: per-party sold/bought never exceeds stock,
        // and a fully matched party is exactly exhausted by replay
        for (size_t j = 0; j < sells.size(); ++j)
            CHECK(sum_seller(result, j) <= sells[j].tokens.to_bigint());
        for (size_t i = 0; i < buys.size(); ++i)
            CHECK(sum_buyer(result, i) <= buys[i].tokens.to_bigint());
        for (const Trade& t : result.trades) CHECK(matching_order(t, buys, sells));
    }
}

TEST_CASE("order book file loader") {
    std::istringstream good("buys 2 sells 1\n0xa 3 5\n0xb 2 4\n0xc 4 4\n");
    OrderBook book = load_order_book(good);
    CHECK(book.buys.size() == 2);
    CHECK(book.sells.size() == 1);
    CHECK(book.buys[0].tokens == U256(3));

    std::istringstream unsorted("buys 2 sells 0\n0xa 3 4\n0xb 2 5\n");
    CHECK_THROWS_WITH_AS(load_order_book(unsorted),
                         "order book: buys section not sorted at indices 0,1",
                         std::runtime_error);

    std::istringstream truncated("buys 2 sells 0\n0xa 3 4\n");
    CHECK_THROWS_AS(load_order_book(truncated), std::runtime_error);
}
