#include <gtest/gtest.h>

#include <sstream>

#include "collateral/oracles.hpp"
#include "collateral/workloads.hpp"
#include "support/builders.hpp"

using namespace collateral;
using collateral::testing::kwallet;

namespace {

WorkloadSpec spec_of(WorkloadKind kind, std::int64_t rate, Slot horizon, std::uint64_t seed = 1) {
    WorkloadSpec s;
    s.kind = kind;
    s.arrival_rate_per_mille = rate;
    s.horizon = horizon;
    s.seed = seed;
    s.cap = 6;
    s.min_value = 1;
    s.max_value = 6;
    s.mean = 3.0;
    s.tail_index = 1.5;
    s.scale = 1.0;
    s.value = 6;
    return s;
}

struct DiscardAll {
    PolicyDecision step(WalletBank& bank, Slot slot, const std::optional<Transaction>& tx) const {
        bank.advance(slot);
        return tx ? detail::discard(bank, *tx) : PolicyDecision{};
    }
    PolicyDecision finish(WalletBank&, Slot, bool) const { return {}; }
};

}  // namespace

TEST(Stochastic, ZeroRateIsEmpty) {
    EXPECT_TRUE(gen_stochastic(spec_of(WorkloadKind::PoissonUniform, 0, 50)).empty());
}

TEST(Stochastic, Deterministic) {
    const auto s = spec_of(WorkloadKind::PoissonExponential, 400, 200, 99);
    EXPECT_EQ(gen_stochastic(s), gen_stochastic(s));
    auto other = s;
    other.seed = 100;
    EXPECT_NE(gen_stochastic(s), gen_stochastic(other));
}

TEST(Stochastic, ConstantFillsEverySlot) {
    const auto seq = gen_stochastic(spec_of(WorkloadKind::Constant, 1000, 5));
    EXPECT_EQ(seq, TransactionSequence::from_values({6, 6, 6, 6, 6}));
}

TEST(Stochastic, ValuesWithinCapForEveryKind) {
    for (auto kind : {WorkloadKind::PoissonUniform, WorkloadKind::PoissonExponential, WorkloadKind::PoissonPareto,
                      WorkloadKind::Constant, WorkloadKind::Bursty}) {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const auto seq = gen_stochastic(spec_of(kind, 700, 100, seed));
            EXPECT_LE(seq.horizon(), 100);
            EXPECT_LE(seq.max_value(), 6);
            for (const auto& tx : seq.transactions()) {
                EXPECT_GE(tx.value, 1);
                EXPECT_LE(tx.slot, 100);
            }
        }
    }
}

TEST(Stochastic, BurstsAreContiguous) {
    auto s = spec_of(WorkloadKind::Bursty, 50, 400, 3);
    s.burst_length = 5;
    const auto seq = gen_stochastic(s);
    ASSERT_FALSE(seq.empty());
    // back-to-back bursts merge, so every run but a truncated last one is a multiple of 5
    std::vector<std::int64_t> runs;
    Slot prev = -1;
    for (const auto& tx : seq.transactions()) {
        if (tx.slot == prev + 1)
            ++runs.back();
        else
            runs.push_back(1);
        prev = tx.slot;
    }
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) EXPECT_EQ(runs[i] % 5, 0) << i;
}

TEST(Stochastic, InvalidSpecs) {
    auto s = spec_of(WorkloadKind::PoissonUniform, 1001, 10);
    EXPECT_ERROR_CODE(gen_stochastic(s), ErrorCode::InvalidSpec);
    s = spec_of(WorkloadKind::PoissonUniform, 500, 10);
    s.min_value = 5;
    s.max_value = 2;
    EXPECT_ERROR_CODE(gen_stochastic(s), ErrorCode::InvalidSpec);
    s = spec_of(WorkloadKind::PoissonPareto, 500, 10);
    s.tail_index = 0;
    EXPECT_ERROR_CODE(gen_stochastic(s), ErrorCode::InvalidSpec);
    EXPECT_ERROR_CODE(workload_kind_from("gaussian"), ErrorCode::InvalidSpec);
}

TEST(Stochastic, JsonRoundTrip) {
    const auto s = spec_of(WorkloadKind::PoissonPareto, 321, 77, 5);
    EXPECT_EQ(workload_spec_from_json(to_json(s)), s);
    const auto j = nlohmann::json::parse(R"({"kind":"constant","value":4,"horizon":3,"arrivalRatePerMille":1000})");
    const auto parsed = workload_spec_from_json(j, 6);
    EXPECT_EQ(parsed.cap, 6);
    EXPECT_EQ(gen_stochastic(parsed), TransactionSequence::from_values({4, 4, 4}));
}

TEST(SequenceCsv, RoundTrip) {
    const auto seq = TransactionSequence({{1, 3}, {4, 6}, {9, 2}});
    std::stringstream ss;
    write_sequence_csv(ss, seq);
    EXPECT_EQ(ss.str(), "slot,value\n1,3\n4,6\n9,2\n");
    EXPECT_EQ(read_sequence_csv(ss), seq);
}

TEST(SequenceCsv, Errors) {
    std::stringstream bad_header("value,slot\n1,2\n");
    EXPECT_ERROR_CODE(read_sequence_csv(bad_header), ErrorCode::ConfigError);
    std::stringstream bad_row("slot,value\n1;2\n");
    EXPECT_ERROR_CODE(read_sequence_csv(bad_row), ErrorCode::ConfigError);
    std::stringstream unordered("slot,value\n3,1\n2,1\n");
    EXPECT_ERROR_CODE(read_sequence_csv(unordered), ErrorCode::InvalidSpec);
}

TEST(Thm3, AgainstFlushWhenFull) {
    const auto p = kwallet(10, 1, 10, 2);
    Thm3Adversary adv(p, 1, 5);
    FlushWhenFull fwf;
    WalletBank bank(p);
    const auto run = run_adaptive(fwf, bank, adv);
    EXPECT_EQ(run.result.settled_value, 5);
    EXPECT_EQ(opt_general_value_window(run.sequence, 10, 2), 50);
    EXPECT_EQ(run.sequence.size(), 10u);
}

TEST(Thm3, AgainstDiscardAll) {
    const auto p = kwallet(10, 1, 10, 2);
    Thm3Adversary adv(p, 1, 1);
    DiscardAll policy;
    WalletBank bank(p);
    const auto run = run_adaptive(policy, bank, adv);
    EXPECT_EQ(run.sequence.size(), 10u);
    EXPECT_EQ(run.sequence.total_value(), 10);
    EXPECT_EQ(run.result.settled_value, 0);
    EXPECT_EQ(opt_general_value(run.sequence, 10, 2), 10);
}

TEST(Thm3, ZeroRounds) {
    Thm3Adversary adv(kwallet(10, 1, 10, 2), 1, 0);
    EXPECT_EQ(adv.next(std::nullopt).kind, Thm3Adversary::Emission::Kind::Done);
}

TEST(Thm3, Guards) {
    EXPECT_ERROR_CODE(Thm3Adversary(kwallet(10, 2, 5), 1, 1), ErrorCode::NotSingleWallet);
    EXPECT_ERROR_CODE(Thm3Adversary(kwallet(10, 1, 10), 3, 1), ErrorCode::EpsilonDoesNotDivideC);
    EXPECT_ERROR_CODE(Thm3Adversary(kwallet(10, 1, 5), 1, 1), ErrorCode::InvalidParams);
}

TEST(Thm3, DependsOnlyOnPastDecisions) {
    // Replaying the recorded sequence against the same policy reproduces the
    // decisions the adversary observed.
    const auto p = kwallet(12, 1, 12, 3);
    Thm3Adversary adv(p, 2, 4);
    FlushAll fa;
    WalletBank bank(p);
    const auto run = run_adaptive(fa, bank, adv);

    FlushAll replay_policy;
    WalletBank replay_bank(p);
    std::vector<bool> settled;
    const auto& txs = run.sequence.transactions();
    std::size_t next = 0;
    for (Slot s = 1; s <= run.sequence.horizon(); ++s) {
        std::optional<Transaction> tx;
        if (next < txs.size() && txs[next].slot == s) tx = txs[next++];
        const auto d = step_slot(replay_policy, replay_bank, s, tx);
        if (tx) settled.push_back(d.settled());
    }
    EXPECT_EQ(settled, adv.observations());
}

TEST(FwfKiller, Example) {
    const auto p = kwallet(20, 2, 10, 2);
    const auto seq = fwf_killer_seq(p, 1, 4);
    EXPECT_EQ(seq.size(), 8u);
    FlushWhenFull fwf;
    WalletBank bank(p);
    Money settled = 0;
    const auto& txs = seq.transactions();
    std::size_t next = 0;
    for (Slot s = 1; s <= seq.horizon(); ++s) {
        std::optional<Transaction> tx;
        if (next < txs.size() && txs[next].slot == s) tx = txs[next++];
        if (step_slot(fwf, bank, s, tx).settled()) settled += tx->value;
    }
    EXPECT_EQ(settled, 4);
    EXPECT_GE(opt_general_value(seq, 20, 2), 40);
}

TEST(FwfKiller, Guards) {
    EXPECT_ERROR_CODE(fwf_killer_seq(kwallet(20, 2, 10), 10, 1), ErrorCode::InvalidParams);
    EXPECT_ERROR_CODE(fwf_killer_seq(kwallet(20, 2, 6), 1, 1), ErrorCode::InvalidParams);
    EXPECT_EQ(fwf_killer_seq(kwallet(20, 2, 10), 1, 1).size(), 2u);
}

TEST(EpochBurst, FlushAllSettlesEpochMinimum) {
    const auto p = kwallet(20, 2, 6, 1);
    const auto seq = epoch_burst_seq(p, 3);
    FlushAll fa;
    WalletBank bank(p);
    const auto& txs = seq.transactions();
    std::size_t next = 0;
    for (Slot s = 1; s <= seq.horizon(); ++s) {
        std::optional<Transaction> tx;
        if (next < txs.size() && txs[next].slot == s) tx = txs[next++];
        step_slot(fa, bank, s, tx);
    }
    EXPECT_GE(bank.settled_value(), 3 * (p.C - p.k * p.T));
    EXPECT_LE(seq.max_value(), p.T);
}

TEST(EpochBurst, Guards) {
    EXPECT_ERROR_CODE(epoch_burst_seq(kwallet(20, 2, 6, 0)), ErrorCode::InvalidParams);
    EXPECT_TRUE(epoch_burst_seq(kwallet(20, 2, 6), 0).empty());
}
