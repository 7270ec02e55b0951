#include <gtest/gtest.h>

#include "collateral/oracles.hpp"
#include "support/builders.hpp"
#include "support/decision_tree.hpp"

using namespace collateral;
using collateral::testing::kwallet;
using collateral::testing::pool_params;

TEST(WindowCheck, Examples) {
    std::vector<Transaction> sixes;
    for (Slot s = 1; s <= 5; ++s) sixes.push_back({s, 6});
    EXPECT_TRUE(feasible_window_check(sixes, 20, 1));
    EXPECT_FALSE(feasible_window_check({{1, 10}, {3, 10}}, 10, 2));
    EXPECT_TRUE(feasible_window_check({{1, 10}, {4, 10}}, 10, 2));
    EXPECT_TRUE(feasible_window_check({}, 1, 5));
}

TEST(GeneralValue, Examples) {
    EXPECT_EQ(opt_general_value(TransactionSequence::from_values({6, 6, 6, 6, 6}), 20, 1), 30);
    EXPECT_EQ(opt_general_value(TransactionSequence::from_values({10, 10, 10}), 10, 2), 10);
    EXPECT_EQ(opt_general_value(TransactionSequence{}, 10, 2), 0);
}

TEST(GeneralValue, WitnessIsFeasible) {
    const auto seq = TransactionSequence::from_values({5, 9, 2, 7, 7, 1, 4, 8});
    const auto best = opt_general_value_witness(seq, 12, 2);
    EXPECT_TRUE(feasible_window_check(best.witness, 12, 2));
    Money sum = 0;
    for (const auto& tx : best.witness) sum += tx.value;
    EXPECT_EQ(sum, best.value);
}

TEST(GeneralValue, Budget) {
    std::vector<Money> values(13, 1);
    EXPECT_ERROR_CODE(opt_general_value(TransactionSequence::from_values(values), 10, 1), ErrorCode::BudgetExceeded);
    OracleBudget wide;
    wide.max_transactions = 13;
    EXPECT_EQ(opt_general_value(TransactionSequence::from_values(values), 10, 1, wide), 13);
}

TEST(WindowDp, MatchesBruteForce) {
    const std::vector<std::vector<Money>> cases = {
        {6, 6, 6, 6, 6}, {10, 10, 10}, {5, 0, 9, 2, 0, 7, 7, 1}, {3, 8, 8, 8, 0, 0, 8, 3, 1, 9}, {}};
    for (const auto& values : cases) {
        const auto seq = TransactionSequence::from_values(values);
        for (Slot F : {1, 2, 3}) {
            for (Money C : {10, 12, 20}) {
                EXPECT_EQ(opt_general_value_window(seq, C, F), opt_general_value(seq, C, F))
                    << "C=" << C << " F=" << F;
            }
        }
    }
}

TEST(WindowDp, SpanLimit) {
    EXPECT_ERROR_CODE(opt_general_value_window(TransactionSequence{}, 10, 21), ErrorCode::BudgetExceeded);
}

TEST(KWallet, Examples) {
    const auto ones = TransactionSequence::from_values({1, 1, 1});
    EXPECT_EQ(opt_kwallet_value(ones, kwallet(2, 2, 1, 1)), 3);
    EXPECT_EQ(opt_kwallet_value(ones, kwallet(1, 1, 1, 1)), 2);
    EXPECT_EQ(opt_kwallet_value(TransactionSequence{}, kwallet(2, 2, 1, 1)), 0);
}

TEST(KWallet, DominatedByGeneral) {
    const auto seq = TransactionSequence::from_values({3, 2, 3, 1, 3, 3, 2, 1});
    for (std::int64_t k : {1, 2, 4}) {
        const auto p = kwallet(12, k, 3, 2);
        EXPECT_LE(opt_kwallet_value(seq, p), opt_general_value(seq, p.C, p.F));
    }
}

TEST(Utility, Examples) {
    const auto p = pool_params(20, 6, 1, 500000);
    const auto four = opt_general_utility(TransactionSequence::from_values({6, 6, 6, 6}), p);
    EXPECT_EQ(four.value, 24);
    EXPECT_EQ(four.flushes, 2);
    EXPECT_EQ(four.utility, Rational(7, 5));

    const auto one = opt_general_utility(TransactionSequence::from_values({6}), p);
    EXPECT_EQ(one.value, 6);
    EXPECT_EQ(one.flushes, 1);
    EXPECT_EQ(one.utility, Rational(1, 10));

    EXPECT_EQ(opt_general_utility(TransactionSequence{}, p).utility, Rational(0));
}

TEST(Utility, UnprofitableParams) {
    auto p = pool_params(20, 6, 1, 500000, true, 100000, 3, 1);
    EXPECT_ERROR_CODE(opt_general_utility(TransactionSequence{}, p), ErrorCode::InvalidParams);
}

TEST(Utility, UpperBound) {
    EXPECT_EQ(opt_utility_upper_bound(24, 20, Rational(1, 10), Rational(1, 2)), Rational(9, 5));
    EXPECT_EQ(opt_utility_upper_bound(0, 20, Rational(1, 10), Rational(1, 2)), Rational(0));
    EXPECT_EQ(opt_utility_upper_bound(24, 20, Rational(1, 10), Rational(0)), Rational(12, 5));
    EXPECT_ERROR_CODE(opt_utility_upper_bound(24, 20, Rational(1, 10), Rational(2)), ErrorCode::InvalidParams);
}

TEST(Utility, BoundedByUpperBound) {
    const auto p = pool_params(20, 6, 2, 500000);
    const auto seq = TransactionSequence::from_values({6, 2, 6, 6, 5, 0, 6, 1, 6});
    const auto exact = opt_general_utility(seq, p);
    EXPECT_LE(exact.utility, opt_utility_upper_bound(opt_general_value(seq, p.C, p.F), p));
}

TEST(DecisionTree, AgreesWithSubsetSearch) {
    const std::vector<std::vector<Money>> cases = {{6, 6, 6, 6, 6}, {10, 10, 10}, {4, 0, 7, 3, 0, 5, 2}, {}};
    for (const auto& values : cases) {
        const auto seq = TransactionSequence::from_values(values);
        for (Slot F : {1, 2})
            EXPECT_EQ(collateral::testing::decision_tree_opt(seq, 10, F), opt_general_value(seq, 10, F));
    }
}

TEST(OracleKind, Parsing) {
    EXPECT_EQ(oracle_kind_from("window-bound"), OracleKind::WindowBound);
    EXPECT_EQ(to_string(OracleKind::BruteKWallet), "brute-kwallet");
    EXPECT_ERROR_CODE(oracle_kind_from("lp"), ErrorCode::ConfigError);
}
