#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "collateral/policies.hpp"
#include "collateral/pool.hpp"
#include "collateral/trace.hpp"
#include "collateral/wallet_bank.hpp"

namespace collateral {

struct RunOptions {
    // Append terminal flushes and report p*V - tau*f.
    bool utility = false;
    // Charge a simultaneous multi-wallet flush once instead of once per wallet.
    bool simultaneous_flush_single_cost = false;
};

// One slot in the fixed order: returns, arrival, settle/discard, flushes.
template <class Policy, class State>
PolicyDecision step_slot(Policy& policy, State& state, Slot slot, const std::optional<Transaction>& tx) {
    state.advance(slot);
    if (tx) state.note_arrival(*tx);
    return policy.step(state, slot, tx);
}

namespace detail {

inline std::int64_t charged_flushes(const EventTrace& trace, std::int64_t flushes, bool single_cost) {
    if (!single_cost) return flushes;
    std::set<Slot> slots;
    for (const auto& e : trace)
        if (e.kind == EventKind::Flush) slots.insert(e.slot);
    return static_cast<std::int64_t>(slots.size());
}

}  // namespace detail

template <class Policy, class State>
RunResult run_sequence(Policy& policy, State& state, const TransactionSequence& seq,
                       const RunOptions& opts = {}) {
    validate_sequence(seq, state.params());
    const auto& txs = seq.transactions();
    std::size_t next = 0;
    for (Slot slot = 1; slot <= seq.horizon(); ++slot) {
        std::optional<Transaction> tx;
        if (next < txs.size() && txs[next].slot == slot) tx = txs[next++];
        step_slot(policy, state, slot, tx);
    }
    if (seq.horizon() > 0) policy.finish(state, seq.horizon(), opts.utility);

    RunResult out;
    out.n_tx = static_cast<std::int64_t>(seq.size());
    out.offered_value = seq.total_value();
    out.settled_value = state.settled_value();
    out.flush_count = state.flush_count();
    out.trace = state.take_trace();
    const auto charged =
        detail::charged_flushes(out.trace, out.flush_count, opts.simultaneous_flush_single_cost);
    out.utility = state.params().utility_of(out.settled_value, charged);
    return out;
}

enum class PolicyKind { FlushAll, FlushWhenFull, FlushTwoWhenFull, Rand2, Eta };

inline PolicyKind policy_kind_from(std::string_view s) {
    if (s == "fa") return PolicyKind::FlushAll;
    if (s == "fwf") return PolicyKind::FlushWhenFull;
    if (s == "ftwf") return PolicyKind::FlushTwoWhenFull;
    if (s == "rand2") return PolicyKind::Rand2;
    if (s == "eta") return PolicyKind::Eta;
    fail(ErrorCode::ConfigError, "unknown policy '" + std::string(s) + "' (fa|fwf|ftwf|rand2|eta)");
}

constexpr std::string_view to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::FlushAll: return "fa";
        case PolicyKind::FlushWhenFull: return "fwf";
        case PolicyKind::FlushTwoWhenFull: return "ftwf";
        case PolicyKind::Rand2: return "rand2";
        case PolicyKind::Eta: return "eta";
    }
    return "unknown";
}

constexpr bool uses_pool(PolicyKind kind) { return kind == PolicyKind::Eta; }

struct PolicyOptions {
    std::optional<std::uint64_t> seed;      // required by rand2
    ShadowSize shadow = ShadowSize::Full;   // rand2 shadow wallet size
};

inline RunResult run_policy(PolicyKind kind, const ModelParams& params, const TransactionSequence& seq,
                            const PolicyOptions& popts = {}, const RunOptions& ropts = {}) {
    switch (kind) {
        case PolicyKind::FlushAll: {
            WalletBank bank(params);
            FlushAll policy;
            return run_sequence(policy, bank, seq, ropts);
        }
        case PolicyKind::FlushWhenFull: {
            WalletBank bank(params);
            FlushWhenFull policy;
            return run_sequence(policy, bank, seq, ropts);
        }
        case PolicyKind::FlushTwoWhenFull: {
            FlushTwoWhenFull policy(params.k);
            WalletBank bank(params);
            return run_sequence(policy, bank, seq, ropts);
        }
        case PolicyKind::Rand2: {
            require(popts.seed.has_value(), ErrorCode::ConfigError, "rand2 requires a seed");
            RandomizedShadow<SeededCoin> policy(params, SeededCoin(*popts.seed), popts.shadow);
            WalletBank bank(params);
            return run_sequence(policy, bank, seq, ropts);
        }
        case PolicyKind::Eta: {
            Threshold policy(params);
            Pool pool(params);
            return run_sequence(policy, pool, seq, ropts);
        }
    }
    fail(ErrorCode::ConfigError, "unhandled policy kind");
}

}  // namespace collateral
