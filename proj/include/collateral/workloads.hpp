#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "collateral/policies/decision.hpp"
#include "collateral/run.hpp"
#include "collateral/types.hpp"

namespace collateral {

// ---------------------------------------------------------------------------
// Stochastic workloads

enum class WorkloadKind { PoissonUniform, PoissonExponential, PoissonPareto, Constant, Bursty };

inline WorkloadKind workload_kind_from(std::string_view s) {
    if (s == "poisson-uniform") return WorkloadKind::PoissonUniform;
    if (s == "poisson-exponential") return WorkloadKind::PoissonExponential;
    if (s == "poisson-pareto") return WorkloadKind::PoissonPareto;
    if (s == "constant") return WorkloadKind::Constant;
    if (s == "bursty") return WorkloadKind::Bursty;
    fail(ErrorCode::InvalidSpec, "unknown workload kind '" + std::string(s) + "'");
}

constexpr std::string_view to_string(WorkloadKind kind) {
    switch (kind) {
        case WorkloadKind::PoissonUniform: return "poisson-uniform";
        case WorkloadKind::PoissonExponential: return "poisson-exponential";
        case WorkloadKind::PoissonPareto: return "poisson-pareto";
        case WorkloadKind::Constant: return "constant";
        case WorkloadKind::Bursty: return "bursty";
    }
    return "unknown";
}

// Per slot a transaction arrives with probability arrival_rate_per_mille/1000
// (bursty: a burst of burst_length consecutive arrivals starts with that
// probability). Values are drawn per kind and clamped to [1, cap].
struct WorkloadSpec {
    WorkloadKind kind = WorkloadKind::PoissonUniform;
    std::int64_t arrival_rate_per_mille = 500;
    Money min_value = 1;          // uniform, bursty
    Money max_value = 1;          // uniform, bursty
    double mean = 1.0;            // exponential
    double tail_index = 2.0;      // pareto
    double scale = 1.0;           // pareto minimum
    Money value = 1;              // constant
    std::int64_t burst_length = 4;
    Slot horizon = 0;
    std::uint64_t seed = 0;
    Money cap = 1;                // T of the model the workload feeds

    friend bool operator==(const WorkloadSpec&, const WorkloadSpec&) = default;
};

inline void validate_spec(const WorkloadSpec& s) {
    require(s.arrival_rate_per_mille >= 0 && s.arrival_rate_per_mille <= 1000, ErrorCode::InvalidSpec,
            "arrival rate must lie in [0, 1000] per mille");
    require(s.horizon >= 0, ErrorCode::InvalidSpec, "horizon must be nonnegative");
    require(s.cap >= 1, ErrorCode::InvalidSpec, "value cap must be positive");
    switch (s.kind) {
        case WorkloadKind::PoissonUniform:
        case WorkloadKind::Bursty:
            require(s.min_value >= 1 && s.min_value <= s.max_value, ErrorCode::InvalidSpec,
                    "need 1 <= min <= max");
            if (s.kind == WorkloadKind::Bursty)
                require(s.burst_length >= 1, ErrorCode::InvalidSpec, "burst length must be positive");
            break;
        case WorkloadKind::PoissonExponential:
            require(s.mean > 0.0, ErrorCode::InvalidSpec, "mean must be positive");
            break;
        case WorkloadKind::PoissonPareto:
            require(s.tail_index > 0.0 && s.scale > 0.0, ErrorCode::InvalidSpec,
                    "tail index and scale must be positive");
            break;
        case WorkloadKind::Constant:
            require(s.value >= 1 && s.value <= s.cap, ErrorCode::InvalidSpec, "constant value must lie in [1, cap]");
            break;
    }
}

namespace detail {

// Draws built directly on mt19937_64 output so sequences do not depend on the
// standard library's distribution implementations.
class Draws {
public:
    explicit Draws(std::uint64_t seed) : rng_(seed) {}

    double unit() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    bool chance_per_mille(std::int64_t rate) { return static_cast<std::int64_t>(below(1000)) < rate; }

    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do x = rng_();
        while (x >= limit);
        return x % n;
    }

    Money between(Money lo, Money hi) { return lo + static_cast<Money>(below(static_cast<std::uint64_t>(hi - lo + 1))); }

private:
    std::mt19937_64 rng_;
};

inline Money clamp_value(double v, Money cap) {
    if (!(v >= 1.0)) return 1;
    if (v >= static_cast<double>(cap)) return cap;
    return static_cast<Money>(std::ceil(v));
}

inline Money draw_value(const WorkloadSpec& s, Draws& d) {
    switch (s.kind) {
        case WorkloadKind::PoissonUniform:
        case WorkloadKind::Bursty:
            return std::clamp<Money>(d.between(s.min_value, s.max_value), 1, s.cap);
        case WorkloadKind::PoissonExponential:
            return clamp_value(-s.mean * std::log1p(-d.unit()), s.cap);
        case WorkloadKind::PoissonPareto:
            return clamp_value(s.scale * std::pow(1.0 - d.unit(), -1.0 / s.tail_index), s.cap);
        case WorkloadKind::Constant:
            return s.value;
    }
    return 1;
}

}  // namespace detail

inline TransactionSequence gen_stochastic(const WorkloadSpec& spec) {
    validate_spec(spec);
    detail::Draws draws(spec.seed);
    std::vector<Transaction> txs;
    std::int64_t burst_left = 0;
    for (Slot slot = 1; slot <= spec.horizon; ++slot) {
        bool arrives = false;
        if (spec.kind == WorkloadKind::Bursty) {
            if (burst_left == 0 && draws.chance_per_mille(spec.arrival_rate_per_mille))
                burst_left = spec.burst_length;
            if (burst_left > 0) {
                arrives = true;
                --burst_left;
            }
        } else {
            arrives = draws.chance_per_mille(spec.arrival_rate_per_mille);
        }
        if (arrives) txs.push_back({slot, detail::draw_value(spec, draws)});
    }
    return TransactionSequence(std::move(txs), spec.horizon);
}

inline nlohmann::json to_json(const WorkloadSpec& s) {
    return {{"kind", std::string(to_string(s.kind))},
            {"arrivalRatePerMille", s.arrival_rate_per_mille},
            {"min", s.min_value},
            {"max", s.max_value},
            {"mean", s.mean},
            {"tailIndex", s.tail_index},
            {"scale", s.scale},
            {"value", s.value},
            {"burstLength", s.burst_length},
            {"horizon", s.horizon},
            {"seed", s.seed},
            {"cap", s.cap}};
}

// Missing keys keep their defaults; `cap` defaults to the caller's T.
inline WorkloadSpec workload_spec_from_json(const nlohmann::json& j, std::optional<Money> default_cap = {}) {
    require(j.is_object(), ErrorCode::InvalidSpec, "workload spec must be a JSON object");
    WorkloadSpec s;
    try {
        s.kind = workload_kind_from(j.at("kind").get<std::string>());
        s.arrival_rate_per_mille = j.value("arrivalRatePerMille", s.arrival_rate_per_mille);
        s.min_value = j.value("min", s.min_value);
        s.max_value = j.value("max", s.max_value);
        s.mean = j.value("mean", s.mean);
        s.tail_index = j.value("tailIndex", s.tail_index);
        s.scale = j.value("scale", s.scale);
        s.value = j.value("value", s.value);
        s.burst_length = j.value("burstLength", s.burst_length);
        s.horizon = j.at("horizon").get<Slot>();
        s.seed = j.value("seed", s.seed);
        s.cap = j.contains("cap") ? j["cap"].get<Money>() : default_cap.value_or(s.cap);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::InvalidSpec, e.what());
    }
    validate_spec(s);
    return s;
}

// ---------------------------------------------------------------------------
// Sequence CSV: header `slot,value`, one transaction per line.

inline void write_sequence_csv(std::ostream& out, const TransactionSequence& seq) {
    out << "slot,value\n";
    for (const auto& tx : seq.transactions()) out << tx.slot << ',' << tx.value << '\n';
}

inline TransactionSequence read_sequence_csv(std::istream& in) {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), ErrorCode::ConfigError, "empty sequence file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    require(line == "slot,value", ErrorCode::ConfigError, "sequence CSV must start with header 'slot,value'");
    std::vector<Transaction> txs;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        Transaction tx;
        char comma = 0;
        require(static_cast<bool>(row >> tx.slot >> comma >> tx.value) && comma == ',', ErrorCode::ConfigError,
                "malformed sequence row '" + line + "'");
        txs.push_back(tx);
    }
    return TransactionSequence(std::move(txs));
}

// ---------------------------------------------------------------------------
// Adaptive adversary against deterministic single-wallet policies.
//
// Each round emits value-epsilon transactions one per slot until the target
// settles one, then a single transaction worth the whole wallet; if none of
// C/epsilon micros is settled the round just ends. Every round closes with F
// empty slots.
class Thm3Adversary {
public:
    struct Emission {
        enum class Kind { Tx, Gap, Done };
        Kind kind = Kind::Done;
        Money value = 0;
    };

    Thm3Adversary(const ModelParams& params, Money epsilon, std::int64_t rounds)
        : wallet_(params.C), epsilon_(epsilon), rounds_(rounds), F_(params.F) {
        require(params.k == 1, ErrorCode::NotSingleWallet, "adversary targets a single wallet");
        validate_kwallet(params);
        require(params.T == params.C, ErrorCode::InvalidParams, "adversary needs T = C (r = 1)");
        require(epsilon >= 1 && epsilon < params.C, ErrorCode::InvalidParams, "epsilon must lie in [1, C)");
        require(params.C % epsilon == 0, ErrorCode::EpsilonDoesNotDivideC, "epsilon must divide C");
        require(rounds >= 0, ErrorCode::InvalidParams, "rounds must be nonnegative");
    }

    std::int64_t round() const noexcept { return round_; }
    const std::vector<bool>& observations() const noexcept { return observed_; }

    // `last` is the target's decision on the previous emission (if it was a transaction).
    Emission next(const std::optional<PolicyDecision>& last) {
        switch (pending_) {
            case Pending::None:
                return start_round();
            case Pending::Micro: {
                const bool settled = last && last->settled();
                observed_.push_back(settled);
                if (settled) {
                    pending_ = Pending::Big;
                    return {Emission::Kind::Tx, wallet_};
                }
                if (micros_ == wallet_ / epsilon_) return start_gap();
                return emit_micro();
            }
            case Pending::Big:
                observed_.push_back(last && last->settled());
                return start_gap();
            case Pending::Gap:
                if (gap_left_ > 0) {
                    --gap_left_;
                    return {Emission::Kind::Gap, 0};
                }
                return start_round();
            case Pending::Done:
                return {};
        }
        return {};
    }

private:
    enum class Pending { None, Micro, Big, Gap, Done };

    Emission start_round() {
        if (round_ == rounds_) {
            pending_ = Pending::Done;
            return {};
        }
        ++round_;
        micros_ = 0;
        return emit_micro();
    }

    Emission emit_micro() {
        ++micros_;
        pending_ = Pending::Micro;
        return {Emission::Kind::Tx, epsilon_};
    }

    Emission start_gap() {
        pending_ = Pending::Gap;
        gap_left_ = F_ - 1;
        return {Emission::Kind::Gap, 0};
    }

    Money wallet_;
    Money epsilon_;
    std::int64_t rounds_;
    Slot F_;
    std::int64_t round_ = 0;
    std::int64_t micros_ = 0;
    Slot gap_left_ = 0;
    Pending pending_ = Pending::None;
    std::vector<bool> observed_;
};

struct AdaptiveRun {
    TransactionSequence sequence;
    RunResult result;
};

// Drives the adversary and the target in lockstep, one slot per emission.
template <class Policy, class State>
AdaptiveRun run_adaptive(Policy& policy, State& state, Thm3Adversary& adversary, const RunOptions& opts = {}) {
    std::vector<Transaction> txs;
    std::optional<PolicyDecision> last;
    Slot slot = 0;
    for (;;) {
        const auto emission = adversary.next(last);
        if (emission.kind == Thm3Adversary::Emission::Kind::Done) break;
        ++slot;
        std::optional<Transaction> tx;
        if (emission.kind == Thm3Adversary::Emission::Kind::Tx) {
            tx = Transaction{slot, emission.value};
            txs.push_back(*tx);
        }
        auto d = step_slot(policy, state, slot, tx);
        last = tx ? std::optional<PolicyDecision>(std::move(d)) : std::nullopt;
    }
    AdaptiveRun out;
    out.sequence = TransactionSequence(std::move(txs), slot);
    if (slot > 0) policy.finish(state, slot, opts.utility);
    out.result.n_tx = static_cast<std::int64_t>(out.sequence.size());
    out.result.offered_value = out.sequence.total_value();
    out.result.settled_value = state.settled_value();
    out.result.flush_count = state.flush_count();
    out.result.trace = state.take_trace();
    out.result.utility = state.params().utility_of(out.result.settled_value, out.result.flush_count);
    return out;
}

// ---------------------------------------------------------------------------
// Static adversarial sequences

// Alternating epsilon and C/k transactions at r = 1. Pair i puts epsilon at
// slot s_i and the full-size transaction at s_i + 1; the next pair starts
// ceil(F/k) + 1 slots after that, so FlushWhenFull always finds its next
// wallet online for the epsilon and is always too full for the big one.
inline TransactionSequence fwf_killer_seq(const ModelParams& params, Money epsilon, std::int64_t rounds) {
    validate_kwallet(params);
    require(params.k * params.T == params.C, ErrorCode::InvalidParams, "killer sequence needs r = kT/C = 1");
    require(epsilon >= 1 && epsilon < params.wallet_size(), ErrorCode::InvalidParams,
            "epsilon must be a microtransaction below C/k");
    require(rounds >= 0, ErrorCode::InvalidParams, "rounds must be nonnegative");
    const Slot period = (params.F + params.k - 1) / params.k + 2;
    std::vector<Transaction> txs;
    for (std::int64_t i = 0; i < rounds; ++i) {
        const Slot s = 1 + i * period;
        txs.push_back({s, epsilon});
        txs.push_back({s + 1, params.wallet_size()});
    }
    return TransactionSequence(std::move(txs));
}

// Each epoch fills every wallet with value-T transactions (first fit packs
// floor((C/k)/T) per wallet), then sends value-T transactions in the next F+1
// slots, capped at C in total: the first one triggers FlushAll's simultaneous
// flush and the rest land in its flush period.
inline TransactionSequence epoch_burst_seq(const ModelParams& params, std::int64_t epochs = 3) {
    validate_kwallet(params);
    require(epochs >= 0, ErrorCode::InvalidParams, "epochs must be nonnegative");
    const Money per_wallet = params.wallet_size() / params.T;
    std::vector<Transaction> txs;
    Slot slot = 1;
    for (std::int64_t e = 0; e < epochs; ++e) {
        for (std::int64_t i = 0; i < params.k * per_wallet; ++i) txs.push_back({slot++, params.T});
        Money burst = 0;
        for (Slot j = 0; j <= params.F; ++j) {
            const Money v = std::min(params.T, params.C - burst);
            if (v > 0) {
                txs.push_back({slot, v});
                burst += v;
            }
            ++slot;
        }
    }
    return TransactionSequence(std::move(txs), slot - 1);
}

}  // namespace collateral
