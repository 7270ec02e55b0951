#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "collateral/types.hpp"

namespace collateral {

// Offline optima by exhaustive search, exact on small instances.
//
// Two exchange arguments keep the search finite:
//  * a flush is never worse when moved back to the slot of the last settlement
//    it releases (the released collateral returns sooner);
//  * a flush in the pool model may as well release everything committed, since
//    its cost does not depend on the amount.

struct OracleBudget {
    std::size_t max_transactions = 12;
    // Candidate flush slots the utility search may branch on.
    std::size_t max_flush_slots = 12;
    // Window DP keeps a bitmask over the last F slots.
    Slot max_window_span = 20;
};

enum class OracleKind { BruteGeneral, BruteKWallet, BruteUtility, WindowBound };

inline OracleKind oracle_kind_from(std::string_view s) {
    if (s == "brute-general") return OracleKind::BruteGeneral;
    if (s == "brute-kwallet") return OracleKind::BruteKWallet;
    if (s == "brute-utility") return OracleKind::BruteUtility;
    if (s == "window-bound") return OracleKind::WindowBound;
    fail(ErrorCode::ConfigError,
         "unknown oracle '" + std::string(s) + "' (brute-general|brute-kwallet|brute-utility|window-bound)");
}

constexpr std::string_view to_string(OracleKind kind) {
    switch (kind) {
        case OracleKind::BruteGeneral: return "brute-general";
        case OracleKind::BruteKWallet: return "brute-kwallet";
        case OracleKind::BruteUtility: return "brute-utility";
        case OracleKind::WindowBound: return "window-bound";
    }
    return "unknown";
}

// True iff every window of slots [t, t+F] carries at most C settled value.
// `subset` must be sorted by slot.
inline bool feasible_window_check(const std::vector<Transaction>& subset, Money C, Slot F) {
    std::size_t lo = 0;
    Money sum = 0;
    for (std::size_t hi = 0; hi < subset.size(); ++hi) {
        sum += subset[hi].value;
        while (subset[lo].slot < subset[hi].slot - F) sum -= subset[lo++].value;
        if (sum > C) return false;
    }
    return true;
}

struct ValueOptimum {
    Money value = 0;
    std::vector<Transaction> witness;
};

namespace detail {

inline void check_budget(const TransactionSequence& seq, const OracleBudget& budget) {
    require(seq.size() <= budget.max_transactions, ErrorCode::BudgetExceeded,
            std::to_string(seq.size()) + " transactions exceed oracle budget of " +
                std::to_string(budget.max_transactions) + "; try the window-bound oracle");
}

struct VectorHash {
    std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (auto x : v) {
            h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

}  // namespace detail

// General value model: maximum-value window-feasible subset, by enumeration.
inline ValueOptimum opt_general_value_witness(const TransactionSequence& seq, Money C, Slot F,
                                              const OracleBudget& budget = {}) {
    detail::check_budget(seq, budget);
    const auto& txs = seq.transactions();
    const std::size_t n = txs.size();
    ValueOptimum best;
    std::vector<Transaction> subset;
    subset.reserve(n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        subset.clear();
        Money value = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask >> i & 1U) {
                subset.push_back(txs[i]);
                value += txs[i].value;
            }
        }
        if (value > best.value && feasible_window_check(subset, C, F)) {
            best.value = value;
            best.witness = subset;
        }
    }
    return best;
}

inline Money opt_general_value(const TransactionSequence& seq, Money C, Slot F,
                               const OracleBudget& budget = {}) {
    return opt_general_value_witness(seq, C, F, budget).value;
}

// Same optimum for long sequences: a slot-by-slot DP whose state is the set of
// chosen slots among the previous F. Exact, linear in the horizon.
inline Money opt_general_value_window(const TransactionSequence& seq, Money C, Slot F,
                                      const OracleBudget& budget = {}) {
    require(F >= 1 && F <= budget.max_window_span, ErrorCode::BudgetExceeded,
            "window span " + std::to_string(F) + " exceeds window oracle limit");
    const auto span = static_cast<unsigned>(F);
    const std::size_t states = std::size_t{1} << span;
    const std::uint64_t full = states - 1;
    constexpr Money kUnreachable = -1;

    // values of the last F slots, index 0 = previous slot
    std::vector<Money> recent(span, 0);
    std::vector<Money> best(states, kUnreachable), next(states);
    best[0] = 0;

    const auto& txs = seq.transactions();
    std::size_t cursor = 0;
    for (Slot slot = 1; slot <= seq.horizon(); ++slot) {
        Money v = 0;
        if (cursor < txs.size() && txs[cursor].slot == slot) v = txs[cursor++].value;
        std::fill(next.begin(), next.end(), kUnreachable);
        for (std::uint64_t mask = 0; mask < states; ++mask) {
            if (best[mask] == kUnreachable) continue;
            const std::uint64_t skip = (mask << 1) & full;
            next[skip] = std::max(next[skip], best[mask]);
            if (v == 0) continue;
            Money window = v;
            for (unsigned b = 0; b < span; ++b)
                if (mask >> b & 1U) window += recent[b];
            if (window <= C) {
                const std::uint64_t take = ((mask << 1) | 1U) & full;
                next[take] = std::max(next[take], best[mask] + v);
            }
        }
        best.swap(next);
        for (unsigned b = span - 1; b > 0; --b) recent[b] = recent[b - 1];
        recent[0] = v;
    }
    return *std::max_element(best.begin(), best.end());
}

// k-wallet model: each transaction goes to a wallet or is discarded; a wallet's
// transactions form batches of at most C/k, and a new batch may start only
// after the previous one's flush period (flushed at its last settlement).
inline Money opt_kwallet_value(const TransactionSequence& seq, const ModelParams& params,
                               const OracleBudget& budget = {}) {
    validate_kwallet(params);
    detail::check_budget(seq, budget);
    const auto& txs = seq.transactions();
    const std::size_t n = txs.size();
    const std::size_t k = static_cast<std::size_t>(params.k);
    const Money size = params.wallet_size();
    const Slot F = params.F;

    std::vector<Money> suffix(n + 1, 0);
    for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + txs[i].value;

    // Wallet state: (batch sum, last settle slot); last = 0 once it no longer constrains.
    using Key = std::vector<std::int64_t>;
    std::unordered_map<Key, Money, detail::VectorHash> memo;

    auto search = [&](auto&& self, std::size_t i, std::vector<std::pair<Money, Slot>> wallets) -> Money {
        if (i == n) return 0;
        const Slot slot = txs[i].slot;
        for (auto& w : wallets)
            if (w.second != 0 && w.second + F < slot) w.second = 0;
        std::sort(wallets.begin(), wallets.end());

        Key key;
        key.reserve(1 + 2 * k);
        key.push_back(static_cast<std::int64_t>(i));
        for (const auto& w : wallets) {
            key.push_back(w.first);
            key.push_back(w.second);
        }
        if (auto it = memo.find(key); it != memo.end()) return it->second;

        const Money v = txs[i].value;
        Money best = self(self, i + 1, wallets);
        for (std::size_t w = 0; w < k && best < suffix[i]; ++w) {
            if (w > 0 && wallets[w] == wallets[w - 1]) continue;
            const auto [sum, last] = wallets[w];
            if (sum + v <= size) {
                auto nxt = wallets;
                nxt[w] = {sum + v, slot};
                best = std::max(best, v + self(self, i + 1, nxt));
            }
            // New batch: the wallet flushed at `last` and is back by now.
            if (sum > 0 && (last == 0 || last + F < slot)) {
                auto nxt = wallets;
                nxt[w] = {v, slot};
                best = std::max(best, v + self(self, i + 1, nxt));
            }
        }
        memo.emplace(std::move(key), best);
        return best;
    };
    return search(search, 0, std::vector<std::pair<Money, Slot>>(k, {0, 0}));
}

struct UtilityOptimum {
    Rational utility{0};
    Money value = 0;
    std::int64_t flushes = 0;
};

// Pool model with flush costs: maximize p*V - tau*f. Residual committed
// collateral is always flushed once at the end.
inline UtilityOptimum opt_general_utility(const TransactionSequence& seq, const ModelParams& params,
                                          const OracleBudget& budget = {}) {
    validate_base(params);
    validate_utility(params);
    detail::check_budget(seq, budget);
    require(seq.size() <= budget.max_flush_slots, ErrorCode::BudgetExceeded,
            "too many candidate flush slots for the utility search");

    const auto& txs = seq.transactions();
    const std::size_t n = txs.size();
    // Integer score = (p*V - tau*f) * 1e6 * tau_den.
    const std::int64_t gain = params.p_ppm * params.tau_den;
    const std::int64_t cost = params.tau * kPpm;
    const Money C = params.C;
    const Slot F = params.F;

    std::vector<Money> suffix(n + 1, 0);
    for (std::size_t i = n; i-- > 0;) suffix[i] = suffix[i + 1] + txs[i].value;

    struct Best {
        std::int64_t score = std::numeric_limits<std::int64_t>::min();
        Money value = 0;
        std::int64_t flushes = 0;
    };
    using Key = std::vector<std::int64_t>;
    std::unordered_map<Key, Best, detail::VectorHash> memo;

    // inflight: (available_at, amount) pairs still out at the current slot.
    auto search = [&](auto&& self, std::size_t i, Money committed,
                      std::vector<std::pair<Slot, Money>> inflight) -> Best {
        if (i == n) {
            if (committed > 0) return {-cost, 0, 1};
            return {0, 0, 0};
        }
        const Slot slot = txs[i].slot;
        std::erase_if(inflight, [slot](const auto& t) { return t.first <= slot; });
        std::sort(inflight.begin(), inflight.end());

        Key key{static_cast<std::int64_t>(i), committed};
        for (const auto& [at, amount] : inflight) {
            key.push_back(at);
            key.push_back(amount);
        }
        if (auto it = memo.find(key); it != memo.end()) return it->second;

        Money out = 0;
        for (const auto& t : inflight) out += t.second;
        const Money available = C - committed - out;
        const Money v = txs[i].value;

        Best best = self(self, i + 1, committed, inflight);
        if (v <= available) {
            auto keep = self(self, i + 1, committed + v, inflight);
            keep.score += gain * v;
            keep.value += v;
            if (keep.score > best.score) best = keep;

            auto released = inflight;
            released.emplace_back(slot + F + 1, committed + v);
            auto flush = self(self, i + 1, 0, released);
            flush.score += gain * v - cost;
            flush.value += v;
            flush.flushes += 1;
            if (flush.score > best.score) best = flush;
        }
        memo.emplace(std::move(key), best);
        return best;
    };

    const Best best = search(search, 0, 0, {});
    UtilityOptimum out;
    out.value = best.value;
    out.flushes = best.flushes;
    out.utility = params.utility_of(best.value, best.flushes);
    return out;
}

// Upper bound on the optimal utility from the optimal settled value: every C
// of settled value costs at least one flush, so U_opt <= V_opt * (p - tau/C).
inline Rational opt_utility_upper_bound(Money v_opt, Money C, const Rational& p, const Rational& tau) {
    require(C > 0, ErrorCode::InvalidParams, "C must be positive");
    require(p * C > tau, ErrorCode::InvalidParams, "upper bound requires pC > tau");
    return Rational(v_opt) * (p - tau / C);
}

inline Rational opt_utility_upper_bound(Money v_opt, const ModelParams& params) {
    return opt_utility_upper_bound(v_opt, params.C, params.p(), params.flush_cost());
}

}  // namespace collateral
