#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "collateral/formulas.hpp"
#include "collateral/oracles.hpp"
#include "collateral/run.hpp"
#include "collateral/workloads.hpp"

namespace collateral {

// ---------------------------------------------------------------------------
// Configuration

enum class AdversaryKind { Thm3, FwfKiller, Burst };

inline AdversaryKind adversary_kind_from(std::string_view s) {
    if (s == "thm3") return AdversaryKind::Thm3;
    if (s == "fwfkiller") return AdversaryKind::FwfKiller;
    if (s == "burst") return AdversaryKind::Burst;
    fail(ErrorCode::ConfigError, "unknown adversary '" + std::string(s) + "' (thm3|fwfkiller|burst)");
}

constexpr std::string_view to_string(AdversaryKind kind) {
    switch (kind) {
        case AdversaryKind::Thm3: return "thm3";
        case AdversaryKind::FwfKiller: return "fwfkiller";
        case AdversaryKind::Burst: return "burst";
    }
    return "unknown";
}

struct AdversarySpec {
    AdversaryKind kind = AdversaryKind::Thm3;
    Money epsilon = 1;
    std::int64_t rounds = 1;  // epochs for burst
};

struct ExperimentConfig {
    ModelParams params;
    PolicyKind policy = PolicyKind::FlushAll;
    ShadowSize shadow = ShadowSize::Full;
    bool single_cost_simultaneous_flush = false;

    // exactly one workload source
    std::optional<WorkloadSpec> workload;
    std::optional<std::string> sequence_path;
    std::optional<AdversarySpec> adversary;

    OracleKind oracle = OracleKind::BruteGeneral;
    OracleBudget budget;
    std::optional<double> slack;  // additive allowance; defaults by mode
    std::int64_t repetitions = 1;
    std::uint64_t seed = 0;

    std::optional<std::string> csv_path;
    std::optional<std::string> trace_path;
};

inline void validate_config(const ExperimentConfig& cfg) {
    try {
        if (uses_pool(cfg.policy)) {
            validate_pool(cfg.params);
            validate_eta(cfg.params);
        } else {
            validate_kwallet(cfg.params);
        }
        if (cfg.policy == PolicyKind::FlushTwoWhenFull)
            require(cfg.params.k % 2 == 0, ErrorCode::OddWalletCount, "ftwf needs an even k");
        if (cfg.policy == PolicyKind::Rand2)
            require(cfg.params.k == 1, ErrorCode::NotSingleWallet, "rand2 runs on a single wallet");
    } catch (const Error& e) {
        fail(ErrorCode::ConfigError, e.what());
    }
    const int sources = cfg.workload.has_value() + cfg.sequence_path.has_value() + cfg.adversary.has_value();
    require(sources == 1, ErrorCode::ConfigError, "config needs exactly one of workload, sequence, adversary");
    require(cfg.repetitions >= 1, ErrorCode::ConfigError, "repetitions must be positive");
    if (cfg.sequence_path)
        require(std::filesystem::exists(*cfg.sequence_path), ErrorCode::ConfigError,
                "sequence file '" + *cfg.sequence_path + "' not found");
}

inline ModelParams params_from_json(const nlohmann::json& j) {
    ModelParams p;
    p.C = j.at("C").get<Money>();
    p.k = j.value("k", p.k);
    p.T = j.at("T").get<Money>();
    p.F = j.value("F", p.F);
    p.p_ppm = j.value("p_ppm", p.p_ppm);
    p.tau = j.value("tau", p.tau);
    p.tau_den = j.value("tau_den", p.tau_den);
    if (j.contains("eta_ppm") && !j["eta_ppm"].is_null()) p.eta_ppm = j["eta_ppm"].get<std::int64_t>();
    p.utility = j.value("utility", p.utility);
    return p;
}

inline nlohmann::json to_json(const ModelParams& p) {
    nlohmann::json j{{"C", p.C},         {"k", p.k},     {"T", p.T},
                     {"F", p.F},         {"p_ppm", p.p_ppm}, {"tau", p.tau},
                     {"tau_den", p.tau_den}, {"utility", p.utility}};
    if (p.eta_ppm) j["eta_ppm"] = *p.eta_ppm;
    return j;
}

// Relative paths are resolved against `base_dir` (the config file's directory).
inline ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
    ExperimentConfig cfg;
    auto resolve = [&](const std::string& s) {
        std::filesystem::path path(s);
        return (path.is_relative() && !base_dir.empty() ? base_dir / path : path).string();
    };
    try {
        cfg.params = params_from_json(j.at("params"));
        cfg.policy = policy_kind_from(j.at("policy").get<std::string>());
        if (j.contains("shadow")) {
            const auto s = j["shadow"].get<std::string>();
            require(s == "full" || s == "half", ErrorCode::ConfigError, "shadow must be full or half");
            cfg.shadow = s == "half" ? ShadowSize::Half : ShadowSize::Full;
        }
        cfg.single_cost_simultaneous_flush = j.value("singleCostSimultaneousFlush", false);
        cfg.seed = j.value("seed", cfg.seed);
        if (j.contains("workload")) cfg.workload = workload_spec_from_json(j["workload"], cfg.params.T);
        if (j.contains("sequence")) cfg.sequence_path = resolve(j["sequence"].get<std::string>());
        if (j.contains("adversary")) {
            const auto& a = j["adversary"];
            AdversarySpec spec;
            spec.kind = adversary_kind_from(a.at("type").get<std::string>());
            spec.epsilon = a.value("epsilon", spec.epsilon);
            spec.rounds = a.value("rounds", spec.rounds);
            cfg.adversary = spec;
        }
        if (j.contains("oracle")) cfg.oracle = oracle_kind_from(j["oracle"].get<std::string>());
        if (j.contains("budget")) {
            const auto& b = j["budget"];
            cfg.budget.max_transactions = b.value("maxTransactions", cfg.budget.max_transactions);
            cfg.budget.max_flush_slots = b.value("maxFlushSlots", cfg.budget.max_flush_slots);
            cfg.budget.max_window_span = b.value("maxWindowSpan", cfg.budget.max_window_span);
        }
        if (j.contains("slack")) cfg.slack = j["slack"].get<double>();
        cfg.repetitions = j.value("repetitions", cfg.repetitions);
        if (j.contains("csv")) cfg.csv_path = resolve(j["csv"].get<std::string>());
        if (j.contains("trace")) cfg.trace_path = resolve(j["trace"].get<std::string>());
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigError, e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        fail(ErrorCode::ConfigError, e.what());
    }
    validate_config(cfg);
    return cfg;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::ConfigError, "cannot open config '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigError, e.what());
    }
    return config_from_json(j, path.parent_path());
}

inline TransactionSequence load_sequence(const std::string& path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), ErrorCode::ConfigError, "cannot open sequence '" + path + "'");
    return read_sequence_csv(in);
}

// ---------------------------------------------------------------------------
// Running

// Repetition i uses seed + i for both the workload and rand2's coin.
inline std::uint64_t repetition_seed(const ExperimentConfig& cfg, std::int64_t rep) {
    return cfg.seed + static_cast<std::uint64_t>(rep);
}

struct Instance {
    TransactionSequence sequence;
    RunResult result;
    std::uint64_t seed = 0;
};

namespace detail {

template <class Policy>
AdaptiveRun adaptive_with(Policy policy, const ModelParams& params, const AdversarySpec& spec) {
    Thm3Adversary adversary(params, spec.epsilon, spec.rounds);
    WalletBank bank(params);
    return run_adaptive(policy, bank, adversary, RunOptions{params.utility});
}

}  // namespace detail

inline Instance run_instance(const ExperimentConfig& cfg, std::int64_t rep = 0) {
    Instance out;
    out.seed = repetition_seed(cfg, rep);
    PolicyOptions popts{out.seed, cfg.shadow};
    RunOptions ropts{cfg.params.utility, cfg.single_cost_simultaneous_flush};

    if (cfg.adversary && cfg.adversary->kind == AdversaryKind::Thm3) {
        AdaptiveRun run;
        switch (cfg.policy) {
            case PolicyKind::FlushAll: run = detail::adaptive_with(FlushAll{}, cfg.params, *cfg.adversary); break;
            case PolicyKind::FlushWhenFull:
                run = detail::adaptive_with(FlushWhenFull{}, cfg.params, *cfg.adversary);
                break;
            default:
                fail(ErrorCode::ConfigError, "thm3 adversary targets deterministic single-wallet policies (fa, fwf)");
        }
        out.sequence = std::move(run.sequence);
        out.result = std::move(run.result);
        return out;
    }

    if (cfg.workload) {
        WorkloadSpec spec = *cfg.workload;
        spec.seed = spec.seed + out.seed;
        out.sequence = gen_stochastic(spec);
    } else if (cfg.sequence_path) {
        out.sequence = load_sequence(*cfg.sequence_path);
    } else if (cfg.adversary->kind == AdversaryKind::FwfKiller) {
        out.sequence = fwf_killer_seq(cfg.params, cfg.adversary->epsilon, cfg.adversary->rounds);
    } else {
        out.sequence = epoch_burst_seq(cfg.params, cfg.adversary->rounds);
    }
    out.result = run_policy(cfg.policy, cfg.params, out.sequence, popts, ropts);
    return out;
}

// ---------------------------------------------------------------------------
// Ratio measurement

// opt/alg with 0/0 = 1; an unbounded ratio is nullopt.
inline std::optional<Rational> exact_ratio(const Rational& opt, const Rational& alg) {
    if (alg > 0) return opt / alg;
    if (opt <= alg) return Rational(1);
    return std::nullopt;
}

inline std::string ratio_string(const std::optional<Rational>& q) { return q ? to_string(*q) : "inf"; }

// Bound from the matching closed form, or +inf where no bound applies.
inline double formula_bound(PolicyKind kind, const ModelParams& p) {
    const double r = to_double(p.r());
    switch (kind) {
        case PolicyKind::FlushAll:
            return formulas::fa_ratio(p.k, r);
        case PolicyKind::FlushWhenFull:
            return p.k > 1 ? formulas::fwf_ratio(static_cast<double>(p.k), r) : formulas::kUnbounded;
        case PolicyKind::FlushTwoWhenFull:
            return p.k * p.T == p.C ? formulas::ftwf_ratio(p.k) : formulas::kUnbounded;
        case PolicyKind::Rand2:
            return formulas::kUnbounded;
        case PolicyKind::Eta: {
            const double eta = to_double(p.eta());
            const double C = static_cast<double>(p.C), T = static_cast<double>(p.T);
            if (!(1.0 - eta - T / C > 0.0)) return formulas::kUnbounded;
            const double tau = p.utility ? to_double(p.flush_cost()) : 0.0;
            if (tau > 0.0 && !(to_double(p.p()) / tau > 1.0 / (eta * C))) return formulas::kUnbounded;
            return formulas::eta_alpha(eta, C, T, to_double(p.p()), tau);
        }
    }
    return formulas::kUnbounded;
}

struct RatioRow {
    std::string run_id;
    PolicyKind policy = PolicyKind::FlushAll;
    ModelParams params;
    std::uint64_t seed = 0;
    std::int64_t n_tx = 0;
    Money offered_value = 0;
    Money settled_value = 0;
    std::int64_t flush_count = 0;
    Rational utility{0};
    std::optional<Money> opt_value;
    std::optional<Rational> opt_utility;
    bool opt_utility_is_upper_bound = false;
    std::optional<Rational> ratio_value;    // nullopt with opt present = unbounded
    std::optional<Rational> ratio_utility;
    double bound = formulas::kUnbounded;
    std::optional<bool> bound_ok;
};

inline double default_slack(const ModelParams& p) {
    return p.utility ? to_double(p.p() * p.C + p.flush_cost()) : 0.0;
}

struct OracleResult {
    Money value = 0;
    Rational utility{0};
    bool utility_upper_bound = true;
};

inline OracleResult run_oracle(OracleKind kind, const TransactionSequence& seq, const ModelParams& params,
                               const OracleBudget& budget) {
    OracleResult out;
    switch (kind) {
        case OracleKind::BruteGeneral: out.value = opt_general_value(seq, params.C, params.F, budget); break;
        case OracleKind::BruteKWallet: out.value = opt_kwallet_value(seq, params, budget); break;
        case OracleKind::WindowBound: out.value = opt_general_value_window(seq, params.C, params.F, budget); break;
        case OracleKind::BruteUtility: {
            const auto u = opt_general_utility(seq, params, budget);
            out.value = u.value;
            out.utility = u.utility;
            out.utility_upper_bound = false;
            return out;
        }
    }
    out.utility = params.utility ? opt_utility_upper_bound(out.value, params) : params.p() * out.value;
    return out;
}

// Competitive check opt <= bound * alg + slack (+1e-9), done in double only when
// the bound is a real number; exact callers use exhaustive_verify.
inline bool within_bound(const Rational& opt, const Rational& alg, double bound, double slack) {
    if (std::isinf(bound)) return true;
    return to_double(opt) <= bound * to_double(alg) + slack + 1e-9;
}

inline RatioRow make_row(const ExperimentConfig& cfg, const Instance& inst, std::int64_t rep) {
    RatioRow row;
    row.run_id = std::to_string(rep);
    row.policy = cfg.policy;
    row.params = cfg.params;
    row.seed = inst.seed;
    row.n_tx = inst.result.n_tx;
    row.offered_value = inst.result.offered_value;
    row.settled_value = inst.result.settled_value;
    row.flush_count = inst.result.flush_count;
    row.utility = inst.result.utility;
    return row;
}

inline RatioRow measure_instance(const ExperimentConfig& cfg, const Instance& inst, std::int64_t rep) {
    RatioRow row = make_row(cfg, inst, rep);
    const auto opt = run_oracle(cfg.oracle, inst.sequence, cfg.params, cfg.budget);
    row.opt_value = opt.value;
    row.opt_utility = opt.utility;
    row.opt_utility_is_upper_bound = opt.utility_upper_bound;
    row.ratio_value = exact_ratio(Rational(opt.value), Rational(inst.result.settled_value));
    row.ratio_utility = exact_ratio(opt.utility, inst.result.utility);
    row.bound = formula_bound(cfg.policy, cfg.params);
    const double slack = cfg.slack.value_or(default_slack(cfg.params));
    row.bound_ok = cfg.params.utility
                       ? within_bound(opt.utility, inst.result.utility, row.bound, slack)
                       : within_bound(Rational(opt.value), Rational(inst.result.settled_value), row.bound, slack);
    return row;
}

struct Measurement {
    std::vector<Instance> instances;
    std::vector<RatioRow> rows;
};

inline Measurement simulate(const ExperimentConfig& cfg) {
    validate_config(cfg);
    Measurement m;
    for (std::int64_t rep = 0; rep < cfg.repetitions; ++rep) {
        m.instances.push_back(run_instance(cfg, rep));
        m.rows.push_back(make_row(cfg, m.instances.back(), rep));
    }
    return m;
}

inline Measurement measure_ratio(const ExperimentConfig& cfg) {
    validate_config(cfg);
    Measurement m;
    for (std::int64_t rep = 0; rep < cfg.repetitions; ++rep) {
        m.instances.push_back(run_instance(cfg, rep));
        m.rows.push_back(measure_instance(cfg, m.instances.back(), rep));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Results CSV

inline constexpr const char* kResultsHeader =
    "run_id,policy,C,k,T,F,p_ppm,tau,eta_ppm,seed,n_tx,offered_value,settled_value,flush_count,"
    "utility_num,utility_den,opt_value,opt_utility_num,opt_utility_den,ratio_value,ratio_utility,bound,bound_ok";

inline std::string format_bound(double b) {
    if (std::isinf(b)) return "inf";
    std::ostringstream os;
    os << std::setprecision(12) << b;
    return os.str();
}

inline void write_results_csv(std::ostream& out, const std::vector<RatioRow>& rows) {
    out << kResultsHeader << '\n';
    for (const auto& r : rows) {
        const auto& p = r.params;
        std::string tau = std::to_string(p.tau);
        if (p.tau_den != 1) tau += "/" + std::to_string(p.tau_den);
        out << r.run_id << ',' << to_string(r.policy) << ',' << p.C << ',' << p.k << ',' << p.T << ',' << p.F
            << ',' << p.p_ppm << ',' << tau << ',' << (p.eta_ppm ? std::to_string(*p.eta_ppm) : "") << ','
            << r.seed << ',' << r.n_tx << ',' << r.offered_value << ',' << r.settled_value << ','
            << r.flush_count << ',' << r.utility.numerator() << ',' << r.utility.denominator() << ',';
        if (r.opt_value) {
            out << *r.opt_value << ',' << r.opt_utility->numerator() << ',' << r.opt_utility->denominator() << ','
                << ratio_string(r.ratio_value) << ',' << ratio_string(r.ratio_utility) << ','
                << format_bound(r.bound) << ',' << (*r.bound_ok ? "true" : "false");
        } else {
            out << ",,,,,,";
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Trace audits: structural guarantees every run must satisfy.

// F-window bound: settled value in any [t, t+F] is at most C.
inline void audit_window(const EventTrace& trace, const ModelParams& p, std::vector<std::string>& out) {
    const Money worst = max_window_settled(trace, p.F);
    if (worst > p.C)
        out.push_back("window bound: " + std::to_string(worst) + " settled within F+1 slots > C=" +
                      std::to_string(p.C));
}

// Flush invariants of the k-wallet policies. Flushes at `terminal_slot` (end of
// a utility run) are exempt.
inline void audit_kwallet(PolicyKind kind, const EventTrace& trace, const ModelParams& p,
                          std::vector<std::string>& out, std::optional<Slot> terminal_slot = {}) {
    const Money size = p.wallet_size();
    std::map<Slot, std::vector<const Event*>> flushes;
    for (const auto& e : trace)
        if (e.kind == EventKind::Flush && !(terminal_slot && e.slot == *terminal_slot)) flushes[e.slot].push_back(&e);

    for (const auto& [slot, events] : flushes) {
        const std::string at = " at slot " + std::to_string(slot);
        if (kind == PolicyKind::FlushWhenFull) {
            for (const auto* e : events)
                if (!(e->flush_amount.value_or(0) > size - p.T))
                    out.push_back("fwf flush committed " + to_string(e->flush_amount.value_or(Rational(0))) +
                                  " <= C/k - T" + at);
        } else if (kind == PolicyKind::FlushAll) {
            Rational total{0};
            for (std::size_t a = 0; a < events.size(); ++a) {
                total += events[a]->flush_amount.value_or(0);
                for (std::size_t b = a + 1; b < events.size(); ++b) {
                    const Rational pair = events[a]->flush_amount.value_or(0) + events[b]->flush_amount.value_or(0);
                    if (!(pair > size)) out.push_back("fa pair committed " + to_string(pair) + " <= C/k" + at);
                }
            }
            if (p.k > 1 && p.k * p.T == p.C && 2 * total < p.C)
                out.push_back("fa epoch committed " + to_string(total) + " < C/2" + at);
        }
    }
}

// Threshold runs: committed < eta*C after every slot, and f = ceil(V / (eta*C)).
inline void audit_threshold(const EventTrace& trace, const RunResult& result, const ModelParams& p,
                            std::vector<std::string>& out) {
    const Rational quantum = p.eta_collateral();
    Rational committed{0};
    auto close_slot = [&](Slot slot) {
        if (committed >= quantum)
            out.push_back("eta committed " + to_string(committed) + " >= eta*C after slot " + std::to_string(slot));
    };
    std::optional<Slot> current;
    for (const auto& e : trace) {
        if (current && e.slot != *current) close_slot(*current);
        current = e.slot;
        if (e.kind == EventKind::Settle) committed += e.value.value_or(0);
        if (e.kind == EventKind::Flush) committed -= e.flush_amount.value_or(0);
    }
    if (current) close_slot(*current);
    const auto expected = ceil_div(Rational(result.settled_value) / quantum);
    if (result.flush_count != expected)
        out.push_back("eta flush count " + std::to_string(result.flush_count) + " != ceil(V/(eta C)) = " +
                      std::to_string(expected));
}

inline std::vector<std::string> audit_run(PolicyKind kind, const RunResult& result, const ModelParams& p,
                                          std::optional<Slot> terminal_slot = {}) {
    std::vector<std::string> out;
    audit_window(result.trace, p, out);
    if (kind == PolicyKind::Eta)
        audit_threshold(result.trace, result, p, out);
    else
        audit_kwallet(kind, result.trace, p, out, terminal_slot);
    return out;
}

// ---------------------------------------------------------------------------
// Exhaustive small-instance verification

struct ExhaustSpace {
    Money C = 0;
    std::int64_t k = 1;
    Money T = 0;
    Slot F = 1;
    int max_len = 0;
    std::vector<Money> values;
    std::uint64_t budget = 78125;  // 5^7 sequences
};

struct PolicyBound {
    PolicyKind policy;
    Rational bound;
};

struct Counterexample {
    PolicyKind policy;
    TransactionSequence sequence;
    Money settled = 0;
    Money opt = 0;
    Rational bound{0};
};

struct ExhaustSummary {
    std::vector<PolicyBound> checks;
    std::uint64_t sequences = 0;
    std::uint64_t prefixes = 0;
    std::vector<Counterexample> counterexamples;
    std::vector<std::string> invariant_violations;
};

// Exact competitive bounds known for fa, fwf and ftwf at these parameters.
inline std::vector<PolicyBound> exact_bounds(const ModelParams& p) {
    std::vector<PolicyBound> out;
    const bool r_one = p.k * p.T == p.C;
    if (r_one) {
        if (p.k > 1) out.push_back({PolicyKind::FlushAll, Rational(3)});
        if (p.k > 1 && p.k % 2 == 0) out.push_back({PolicyKind::FlushTwoWhenFull, Rational(2 * (p.k + 1), p.k)});
    } else {
        out.push_back({PolicyKind::FlushAll, Rational(2 * p.C - p.k * p.T, p.C - p.k * p.T)});
        if (p.k > 1)
            out.push_back({PolicyKind::FlushWhenFull, Rational((p.k + 1) * p.C, p.k * (p.C - p.k * p.T))});
    }
    return out;
}

namespace detail {

struct Tracked {
    PolicyKind kind;
    Rational bound;
    std::variant<FlushAll, FlushWhenFull, FlushTwoWhenFull> policy;
    WalletBank bank;
};

inline std::variant<FlushAll, FlushWhenFull, FlushTwoWhenFull> make_kwallet_policy(PolicyKind kind, std::int64_t k) {
    switch (kind) {
        case PolicyKind::FlushAll: return FlushAll{};
        case PolicyKind::FlushWhenFull: return FlushWhenFull{};
        case PolicyKind::FlushTwoWhenFull: return FlushTwoWhenFull(k);
        default: fail(ErrorCode::InvalidParams, "exhaustive checks cover fa, fwf and ftwf only");
    }
}

}  // namespace detail

inline ExhaustSummary exhaustive_verify(const ExhaustSpace& space) {
    ModelParams params;
    params.C = space.C;
    params.k = space.k;
    params.T = space.T;
    params.F = space.F;
    validate_kwallet(params);
    require(space.max_len >= 0, ErrorCode::InvalidParams, "max_len must be nonnegative");
    for (Money v : space.values)
        require(v >= 1 && v <= space.T, ErrorCode::InvalidParams, "values must lie in [1, T]");

    double count = std::pow(static_cast<double>(space.values.size() + 1), space.max_len);
    require(count <= static_cast<double>(space.budget), ErrorCode::BudgetExceeded,
            "enumeration of " + std::to_string(static_cast<std::uint64_t>(count)) + " sequences exceeds budget");

    ExhaustSummary summary;
    summary.checks = exact_bounds(params);
    std::vector<detail::Tracked> root;
    for (const auto& c : summary.checks)
        root.push_back({c.policy, c.bound, detail::make_kwallet_policy(c.policy, params.k), WalletBank(params)});

    std::vector<Transaction> txs;
    OracleBudget budget;
    budget.max_transactions = static_cast<std::size_t>(std::max(space.max_len, 1));

    auto dfs = [&](auto&& self, int depth, const std::vector<detail::Tracked>& states) -> void {
        if (depth == space.max_len) {
            ++summary.sequences;
            for (const auto& s : states) {
                std::vector<std::string> v;
                audit_window(s.bank.trace(), params, v);
                audit_kwallet(s.kind, s.bank.trace(), params, v);
                for (auto& msg : v) summary.invariant_violations.push_back(std::string(to_string(s.kind)) + ": " + msg);
            }
            return;
        }
        const Slot slot = depth + 1;
        for (std::size_t choice = 0; choice <= space.values.size(); ++choice) {
            std::optional<Transaction> tx;
            if (choice > 0) {
                tx = Transaction{slot, space.values[choice - 1]};
                txs.push_back(*tx);
            }
            auto next = states;
            ++summary.prefixes;
            const TransactionSequence prefix(txs, slot);
            const Money opt = opt_general_value(prefix, params.C, params.F, budget);
            for (auto& s : next) {
                std::visit([&](auto& pol) { step_slot(pol, s.bank, slot, tx); }, s.policy);
                const Money v = s.bank.settled_value();
                if (Rational(opt) > s.bound * v)
                    summary.counterexamples.push_back({s.kind, prefix, v, opt, s.bound});
            }
            self(self, depth + 1, next);
            if (tx) txs.pop_back();
        }
    };
    dfs(dfs, 0, root);
    return summary;
}

// ---------------------------------------------------------------------------
// Parameter sweeps

enum class SweepParam { Eta, K };

inline SweepParam sweep_param_from(std::string_view s) {
    if (s == "eta") return SweepParam::Eta;
    if (s == "k") return SweepParam::K;
    fail(ErrorCode::ConfigError, "unknown sweep parameter '" + std::string(s) + "' (eta|k)");
}

struct SweepRow {
    double value = 0.0;
    double mean_settled = 0.0;
    double mean_flushes = 0.0;
    double mean_utility = 0.0;
    double worst_ratio = 0.0;  // inf if any repetition is unbounded
    bool formula_marker = false;
    bool best_ratio = false;
    bool best_utility = false;
};

struct SweepTable {
    SweepParam param = SweepParam::Eta;
    double formula_value = 0.0;
    std::vector<SweepRow> rows;
};

inline std::vector<double> sweep_grid(double from, double to, double step) {
    require(step > 0.0, ErrorCode::ConfigError, "step must be positive");
    std::vector<double> grid;
    const auto n = static_cast<std::int64_t>(std::floor((to - from) / step + 1e-9));
    for (std::int64_t i = 0; i <= n; ++i) grid.push_back(from + static_cast<double>(i) * step);
    return grid;
}

inline SweepTable sweep(const ExperimentConfig& base, SweepParam param, double from, double to, double step) {
    SweepTable table;
    table.param = param;
    const auto& p0 = base.params;
    if (param == SweepParam::Eta) {
        require(base.policy == PolicyKind::Eta, ErrorCode::ConfigError, "eta sweep needs policy eta");
        table.formula_value = p0.utility ? formulas::eta_star(static_cast<double>(p0.C), static_cast<double>(p0.T),
                                                              to_double(p0.p()), to_double(p0.flush_cost()))
                                               .value
                                         : static_cast<double>(p0.T) / static_cast<double>(p0.C);
    } else {
        table.formula_value = formulas::k_star(static_cast<double>(p0.C), static_cast<double>(p0.T)).real_k;
    }

    for (double x : sweep_grid(from, to, step)) {
        ExperimentConfig cfg = base;
        if (param == SweepParam::Eta) {
            cfg.params.eta_ppm = static_cast<std::int64_t>(std::llround(x * kPpm));
        } else {
            cfg.params.k = static_cast<std::int64_t>(std::llround(x));
            // wallet counts that do not split C evenly are left out
            const auto k = cfg.params.k;
            if (k < 1 || cfg.params.C % k != 0 || k * cfg.params.T > cfg.params.C) continue;
            if (cfg.policy == PolicyKind::FlushTwoWhenFull && k % 2 != 0) continue;
        }
        const auto m = measure_ratio(cfg);
        SweepRow row;
        row.value = x;
        for (const auto& r : m.rows) {
            row.mean_settled += static_cast<double>(r.settled_value);
            row.mean_flushes += static_cast<double>(r.flush_count);
            row.mean_utility += to_double(r.utility);
            const auto& ratio = cfg.params.utility ? r.ratio_utility : r.ratio_value;
            row.worst_ratio = std::max(row.worst_ratio, ratio ? to_double(*ratio) : formulas::kUnbounded);
        }
        const auto n = static_cast<double>(m.rows.size());
        row.mean_settled /= n;
        row.mean_flushes /= n;
        row.mean_utility /= n;
        table.rows.push_back(row);
    }
    if (table.rows.empty()) return table;

    auto nearest = std::min_element(table.rows.begin(), table.rows.end(), [&](const auto& a, const auto& b) {
        return std::abs(a.value - table.formula_value) < std::abs(b.value - table.formula_value);
    });
    nearest->formula_marker = true;
    std::min_element(table.rows.begin(), table.rows.end(),
                     [](const auto& a, const auto& b) { return a.worst_ratio < b.worst_ratio; })
        ->best_ratio = true;
    std::max_element(table.rows.begin(), table.rows.end(),
                     [](const auto& a, const auto& b) { return a.mean_utility < b.mean_utility; })
        ->best_utility = true;
    return table;
}

inline void write_sweep_csv(std::ostream& out, const SweepTable& t) {
    out << (t.param == SweepParam::Eta ? "eta" : "k")
        << ",mean_settled,mean_flushes,mean_utility,worst_ratio,formula,best_ratio,best_utility\n";
    for (const auto& r : t.rows) {
        out << format_bound(r.value) << ',' << format_bound(r.mean_settled) << ',' << format_bound(r.mean_flushes)
            << ',' << format_bound(r.mean_utility) << ',' << format_bound(r.worst_ratio) << ','
            << (r.formula_marker ? format_bound(t.formula_value) : "") << ',' << (r.best_ratio ? "*" : "") << ','
            << (r.best_utility ? "*" : "") << '\n';
    }
}

}  // namespace collateral
