#include <gtest/gtest.h>

#include <sstream>

#include "collateral/pool.hpp"
#include "collateral/trace.hpp"
#include "collateral/wallet_bank.hpp"
#include "support/builders.hpp"

using namespace collateral;
using collateral::testing::kwallet;
using collateral::testing::pool_params;

TEST(Params, WalletBankConstruction) {
    WalletBank bank(kwallet(20, 2, 6));
    ASSERT_EQ(bank.size(), 2u);
    EXPECT_EQ(bank.remaining(0), 10);
    EXPECT_EQ(bank.remaining(1), 10);
    EXPECT_TRUE(bank.all_online(1));
}

TEST(Params, RatioOneIsAccepted) {
    WalletBank bank(kwallet(6, 2, 3));
    EXPECT_EQ(bank.params().r(), Rational(1));
}

TEST(Params, Rejections) {
    EXPECT_ERROR_CODE(WalletBank(kwallet(10, 3, 2)), ErrorCode::InvalidParams);
    EXPECT_ERROR_CODE(WalletBank(kwallet(20, 2, 11)), ErrorCode::InvalidParams);
    EXPECT_ERROR_CODE(WalletBank(kwallet(20, 2, 6, 0)), ErrorCode::InvalidParams);
    EXPECT_ERROR_CODE(WalletBank(kwallet(0, 1, 0)), ErrorCode::InvalidParams);
    auto p = kwallet(20, 1, 6);
    p.p_ppm = 0;
    EXPECT_ERROR_CODE(validate_base(p), ErrorCode::InvalidParams);
}

TEST(Params, PoolUtilityNeedsPcAboveTau) {
    // pC = 2 against tau = 3 is fine as long as utility is not requested.
    auto p = pool_params(20, 6, 1, 500000, false, 100000, 3, 1);
    EXPECT_NO_THROW(Pool{p});
    p.utility = true;
    EXPECT_ERROR_CODE(Pool{p}, ErrorCode::InvalidParams);
    p.tau = 1;
    EXPECT_NO_THROW(Pool{p});
}

TEST(Wallet, OfflineWindow) {
    WalletBank bank(kwallet(20, 2, 6, 1));
    bank.advance(2);
    bank.flush(0, 2);
    EXPECT_FALSE(bank.available(0, 3));
    EXPECT_TRUE(bank.available(0, 4));
    EXPECT_TRUE(bank.available(1, 1));
}

TEST(Wallet, SettleAndGuards) {
    WalletBank bank(kwallet(20, 2, 6, 1));
    bank.advance(1);
    bank.settle(0, {1, 6}, 1);
    EXPECT_EQ(bank.remaining(0), 4);
    EXPECT_ERROR_CODE(bank.settle(0, {1, 6}, 1), ErrorCode::InsufficientCollateral);

    WalletBank other(kwallet(20, 2, 6, 2));
    other.advance(1);
    other.flush(0, 1);
    other.advance(3);
    EXPECT_ERROR_CODE(other.settle(0, {3, 1}, 3), ErrorCode::WalletOffline);
    EXPECT_ERROR_CODE(other.settle(5, {3, 1}, 3), ErrorCode::IndexOutOfRange);
}

TEST(Wallet, FlushRestoresAfterPeriod) {
    WalletBank bank(kwallet(20, 2, 6, 2));
    bank.advance(1);
    bank.settle(0, {1, 6}, 1);
    bank.advance(2);
    bank.flush(0, 2);
    EXPECT_ERROR_CODE(bank.flush(0, 3), ErrorCode::WalletOffline);
    bank.advance(4);
    EXPECT_FALSE(bank.available(0, 4));
    bank.advance(5);
    EXPECT_TRUE(bank.available(0, 5));
    EXPECT_EQ(bank.remaining(0), 10);
    const auto& trace = bank.trace();
    ASSERT_FALSE(trace.empty());
    EXPECT_EQ(trace.back().kind, EventKind::Online);
    EXPECT_EQ(trace.back().slot, 5);
}

TEST(Wallet, EmptyFlushCounts) {
    WalletBank bank(kwallet(20, 2, 6));
    bank.advance(1);
    bank.flush(1, 1);
    EXPECT_EQ(bank.flush_count(), 1);
    EXPECT_EQ(bank.settled_value(), 0);
}

TEST(Wallet, SlotRegression) {
    WalletBank bank(kwallet(20, 2, 6));
    bank.advance(3);
    EXPECT_ERROR_CODE(bank.advance(2), ErrorCode::SlotRegression);
}

TEST(Pool, AvailabilityWithInflight) {
    Pool pool(pool_params(20, 6, 1, 500000));
    EXPECT_EQ(pool.available(1), Rational(20));
    pool.settle({1, 6}, 1);
    pool.advance(2);
    pool.settle({2, 6}, 2);
    pool.flush(Rational(10), 2);
    EXPECT_EQ(pool.committed(), Rational(2));
    ASSERT_EQ(pool.inflight().size(), 1u);
    EXPECT_EQ(pool.inflight()[0].available_at, 4);
    EXPECT_EQ(pool.available(3), Rational(8));
    EXPECT_EQ(pool.available(4), Rational(18));
    EXPECT_TRUE(pool.inflight().empty());
}

TEST(Pool, SettleBoundaryAndGuards) {
    Pool pool(pool_params(20, 20, 1, 1000000));
    pool.advance(1);
    pool.settle({1, 6}, 1);
    EXPECT_EQ(pool.committed(), Rational(6));
    pool.advance(2);
    pool.settle({2, 6}, 2);
    pool.advance(3);
    EXPECT_NO_THROW(pool.settle({3, 8}, 3));
    EXPECT_EQ(pool.available(3), Rational(0));
    pool.advance(4);
    EXPECT_ERROR_CODE(pool.settle({4, 1}, 4), ErrorCode::InsufficientCollateral);
}

TEST(Pool, FlushGuardsAndCleanup) {
    Pool pool(pool_params(20, 6, 1, 500000));
    pool.advance(1);
    pool.settle({1, 4}, 1);
    EXPECT_ERROR_CODE(pool.flush(Rational(10), 1), ErrorCode::FlushExceedsCommitted);
    EXPECT_ERROR_CODE(pool.flush(Rational(0), 1), ErrorCode::ZeroFlush);
    pool.flush(Rational(4), 1);
    EXPECT_EQ(pool.committed(), Rational(0));
    EXPECT_EQ(pool.flush_count(), 1);
}

TEST(Pool, FractionalFlush) {
    Pool pool(pool_params(20, 6, 1, 418000));
    pool.advance(1);
    pool.settle({1, 6}, 1);
    pool.advance(2);
    pool.settle({2, 6}, 2);
    const Rational q = pool.params().eta_collateral();
    EXPECT_EQ(q, Rational(209, 25));
    pool.flush(q, 2);
    EXPECT_EQ(pool.committed(), Rational(12) - q);
    EXPECT_EQ(pool.committed() + pool.inflight_total() + pool.available_at(2), Rational(20));
}

TEST(Pool, Conservation) {
    Pool pool(pool_params(20, 6, 2, 500000));
    for (Slot s = 1; s <= 12; ++s) {
        pool.advance(s);
        if (pool.available_at(s) >= 5) pool.settle({s, 5}, s);
        if (pool.committed() >= 10) pool.flush(Rational(10), s);
        Rational returning{0};
        for (const auto& t : pool.inflight())
            if (t.available_at > s) returning += t.amount;
        EXPECT_EQ(pool.committed() + returning + pool.available_at(s), Rational(20));
    }
}

TEST(Trace, NdjsonRoundTrip) {
    Pool pool(pool_params(20, 6, 1, 418000));
    pool.advance(1);
    pool.note_arrival({1, 6});
    pool.settle({1, 6}, 1);
    pool.advance(2);
    pool.note_arrival({2, 6});
    pool.settle({2, 6}, 2);
    pool.flush(pool.params().eta_collateral(), 2);
    std::stringstream ss;
    write_ndjson(ss, pool.trace());
    const auto text = ss.str();
    EXPECT_NE(text.find("\"flushAmount\":\"209/25\""), std::string::npos) << text;
    EXPECT_EQ(text.find("wallet"), std::string::npos);
    EXPECT_EQ(read_ndjson(ss), pool.trace());
}

TEST(Trace, KeyOrderAndOmission) {
    WalletBank bank(kwallet(20, 2, 6));
    bank.advance(1);
    bank.note_arrival({1, 6});
    bank.settle(1, {1, 6}, 1);
    std::stringstream ss;
    write_ndjson(ss, bank.trace());
    std::string first, second;
    std::getline(ss, first);
    std::getline(ss, second);
    EXPECT_EQ(first, R"({"slot":1,"kind":"arrive","value":6})");
    EXPECT_EQ(second, R"({"slot":1,"kind":"settle","wallet":2,"value":6,"available":4,"committed":6})");
}

TEST(Trace, WindowHelpers) {
    EventTrace trace;
    for (Slot s : {1, 2, 4}) trace.push_back(Event{.slot = s, .kind = EventKind::Settle, .value = 6});
    EXPECT_EQ(max_window_settled(trace, 1), 12);
    EXPECT_EQ(max_window_settled(trace, 3), 18);
    EXPECT_EQ(settled_in_trace(trace), 18);
    EXPECT_EQ(flushes_in_trace(trace), 0);
}

TEST(Sequence, Validation) {
    EXPECT_ERROR_CODE(TransactionSequence({{2, 1}, {2, 1}}), ErrorCode::InvalidSpec);
    EXPECT_ERROR_CODE(TransactionSequence({{0, 1}}), ErrorCode::InvalidSpec);
    EXPECT_ERROR_CODE(TransactionSequence({{1, 0}}), ErrorCode::InvalidSpec);
    EXPECT_ERROR_CODE(TransactionSequence({{5, 1}}, 3), ErrorCode::InvalidSpec);
    const auto seq = TransactionSequence::from_values({3, 0, 2, 0});
    EXPECT_EQ(seq.size(), 2u);
    EXPECT_EQ(seq.horizon(), 4);
    EXPECT_EQ(seq.total_value(), 5);
}
