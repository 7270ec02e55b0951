#pragma once

#include <boost/rational.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "collateral/error.hpp"

namespace collateral {

using Slot = std::int64_t;
using Money = std::int64_t;
using Rational = boost::rational<std::int64_t>;

inline constexpr std::int64_t kPpm = 1'000'000;

inline std::string to_string(const Rational& q) {
    if (q.denominator() == 1) return std::to_string(q.numerator());
    return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

inline double to_double(const Rational& q) {
    return static_cast<double>(q.numerator()) / static_cast<double>(q.denominator());
}

inline std::int64_t ceil_div(const Rational& q) {
    auto n = q.numerator();
    auto d = q.denominator();  // boost keeps d > 0
    return n >= 0 ? (n + d - 1) / d : -((-n) / d);
}

struct Transaction {
    Slot slot = 0;
    Money value = 0;

    friend bool operator==(const Transaction&, const Transaction&) = default;
};

// Transactions sorted by strictly increasing slot; slots without a transaction are gaps.
class TransactionSequence {
public:
    TransactionSequence() = default;

    explicit TransactionSequence(std::vector<Transaction> txs, Slot horizon = 0)
        : txs_(std::move(txs)) {
        Slot last = 0;
        for (const auto& tx : txs_) {
            require(tx.slot >= 1, ErrorCode::InvalidSpec, "transaction slot must be >= 1");
            require(tx.value >= 1, ErrorCode::InvalidSpec, "transaction value must be >= 1");
            require(tx.slot > last, ErrorCode::InvalidSpec, "transaction slots must strictly increase");
            last = tx.slot;
        }
        require(horizon == 0 || horizon >= last, ErrorCode::InvalidSpec,
                "horizon precedes last transaction");
        horizon_ = horizon == 0 ? last : horizon;
    }

    // values[i] arrives at slot i+1; a 0 leaves that slot empty.
    static TransactionSequence from_values(const std::vector<Money>& values) {
        std::vector<Transaction> txs;
        txs.reserve(values.size());
        for (std::size_t i = 0; i < values.size(); ++i)
            if (values[i] != 0) txs.push_back({static_cast<Slot>(i + 1), values[i]});
        return TransactionSequence(std::move(txs), static_cast<Slot>(values.size()));
    }

    const std::vector<Transaction>& transactions() const noexcept { return txs_; }
    std::size_t size() const noexcept { return txs_.size(); }
    bool empty() const noexcept { return txs_.empty(); }
    Slot horizon() const noexcept { return horizon_; }

    Money total_value() const noexcept {
        Money sum = 0;
        for (const auto& tx : txs_) sum += tx.value;
        return sum;
    }

    Money max_value() const noexcept {
        Money m = 0;
        for (const auto& tx : txs_) m = std::max(m, tx.value);
        return m;
    }

    // Transactions with slot <= last, horizon clipped to last.
    TransactionSequence prefix(Slot last) const {
        std::vector<Transaction> out;
        for (const auto& tx : txs_)
            if (tx.slot <= last) out.push_back(tx);
        return TransactionSequence(std::move(out), std::max<Slot>(last, 0));
    }

    friend bool operator==(const TransactionSequence&, const TransactionSequence&) = default;

private:
    std::vector<Transaction> txs_;
    Slot horizon_ = 0;
};

struct ModelParams {
    Money C = 0;
    std::int64_t k = 1;
    Money T = 0;
    Slot F = 1;
    std::int64_t p_ppm = kPpm;
    // Flush cost is tau / tau_den base units, so fractional costs stay exact.
    Money tau = 0;
    std::int64_t tau_den = 1;
    std::optional<std::int64_t> eta_ppm;
    bool utility = false;

    Money wallet_size() const { return C / k; }
    Rational p() const { return Rational(p_ppm, kPpm); }
    Rational flush_cost() const { return Rational(tau, tau_den); }
    Rational eta() const { return Rational(eta_ppm.value_or(0), kPpm); }
    Rational eta_collateral() const { return eta() * C; }
    Rational r() const { return Rational(k * T, C); }

    Rational utility_of(Money settled, std::int64_t flushes) const {
        return p() * settled - flush_cost() * flushes;
    }
};

inline void validate_base(const ModelParams& p) {
    require(p.C > 0, ErrorCode::InvalidParams, "C must be positive");
    require(p.T > 0, ErrorCode::InvalidParams, "T must be positive");
    require(p.F > 0, ErrorCode::InvalidParams, "F must be positive");
    require(p.k > 0, ErrorCode::InvalidParams, "k must be positive");
    require(p.p_ppm > 0 && p.p_ppm <= kPpm, ErrorCode::InvalidParams, "p_ppm must lie in (0, 1e6]");
    require(p.tau >= 0, ErrorCode::InvalidParams, "tau must be nonnegative");
    require(p.tau_den > 0, ErrorCode::InvalidParams, "tau_den must be positive");
    require(p.T <= p.C, ErrorCode::InvalidParams, "T must not exceed C");
}

// pC > tau, compared exactly.
inline void validate_utility(const ModelParams& p) {
    require(p.p() * p.C > p.flush_cost(), ErrorCode::InvalidParams, "utility model requires pC > tau");
}

inline void validate_kwallet(const ModelParams& p) {
    validate_base(p);
    require(p.C % p.k == 0, ErrorCode::InvalidParams, "C must be divisible by k");
    require(p.k * p.T <= p.C, ErrorCode::InvalidParams, "kT must not exceed C");
    if (p.utility) validate_utility(p);
}

inline void validate_pool(const ModelParams& p) {
    validate_base(p);
    if (p.utility) validate_utility(p);
}

// T/C <= eta <= 1.
inline void validate_eta(const ModelParams& p) {
    require(p.eta_ppm.has_value(), ErrorCode::InvalidEta, "eta_ppm is required");
    require(*p.eta_ppm > 0 && *p.eta_ppm <= kPpm, ErrorCode::InvalidEta, "eta must lie in (0, 1]");
    require(*p.eta_ppm * p.C >= p.T * kPpm, ErrorCode::InvalidEta, "eta must be at least T/C");
}

inline void validate_sequence(const TransactionSequence& seq, const ModelParams& p) {
    require(seq.max_value() <= p.T, ErrorCode::InvalidSpec, "transaction value exceeds T");
}

}  // namespace collateral
