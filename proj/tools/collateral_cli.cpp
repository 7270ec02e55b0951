#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "collateral/formulas.hpp"
#include "collateral/harness.hpp"

using namespace collateral;
using nlohmann::ordered_json;

namespace {

struct ParamFlags {
    std::optional<std::string> config;
    std::optional<std::string> policy;
    std::optional<Money> C, T;
    std::optional<std::int64_t> k, p_ppm, tau_den, eta_ppm, repetitions;
    std::optional<std::string> tau;
    std::optional<Slot> F;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> workload, seq, trace, csv, shadow, oracle;
    std::optional<double> slack;
    bool utility = false;
    bool single_cost = false;
};

void add_model_flags(CLI::App* app, ParamFlags& f) {
    app->add_option("--C", f.C, "total collateral");
    app->add_option("--k", f.k, "wallet count");
    app->add_option("--T", f.T, "maximum transaction value");
    app->add_option("--F", f.F, "flush period in slots");
    app->add_option("--p-ppm", f.p_ppm, "profit rate in parts per million");
    app->add_option("--tau", f.tau, "flush cost: 3, 1/2 or 0.5");
    app->add_option("--tau-den", f.tau_den, "divides --tau (default 1)");
    app->add_option("--eta-ppm", f.eta_ppm, "threshold eta in parts per million");
    app->add_flag("--utility", f.utility, "report p*V - tau*f with terminal flushes");
}

void add_run_flags(CLI::App* app, ParamFlags& f) {
    app->add_option("--config", f.config, "experiment config (JSON)");
    app->add_option("--policy", f.policy, "fa|fwf|ftwf|rand2|eta");
    add_model_flags(app, f);
    app->add_option("--workload", f.workload, "workload spec: inline JSON or path to a JSON file");
    app->add_option("--seq", f.seq, "sequence CSV (slot,value)");
    app->add_option("--seed", f.seed, "base seed");
    app->add_option("--repetitions", f.repetitions, "number of runs (seed + i)");
    app->add_option("--shadow", f.shadow, "rand2 shadow wallet size: full|half");
    app->add_flag("--single-cost-flush", f.single_cost, "charge a simultaneous flush once");
    app->add_option("--trace", f.trace, "write NDJSON event trace");
    app->add_option("--csv", f.csv, "write results CSV");
}

// "3", "1/2" or "0.5" as an exact fraction.
Rational parse_cost(const std::string& text) {
    auto digits = [&](const std::string& part) {
        require(!part.empty() && part.size() <= 15 && part.find_first_not_of("0123456789") == std::string::npos,
                ErrorCode::ConfigError, "bad flush cost '" + text + "'");
        return std::stoll(part);
    };
    if (const auto slash = text.find('/'); slash != std::string::npos) {
        const auto den = digits(text.substr(slash + 1));
        require(den > 0, ErrorCode::ConfigError, "flush cost denominator must be positive");
        return Rational(digits(text.substr(0, slash)), den);
    }
    if (const auto dot = text.find('.'); dot != std::string::npos) {
        const auto frac = text.substr(dot + 1);
        std::int64_t den = 1;
        for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
        return Rational(digits(text.substr(0, dot).empty() ? "0" : text.substr(0, dot)) * den + digits(frac), den);
    }
    return Rational(digits(text));
}

void apply_cost(ModelParams& p, const std::optional<std::string>& tau, const std::optional<std::int64_t>& den) {
    if (!tau && !den) return;
    Rational cost = tau ? parse_cost(*tau) : p.flush_cost();
    if (den) {
        require(*den > 0, ErrorCode::ConfigError, "--tau-den must be positive");
        cost /= *den;
    }
    p.tau = cost.numerator();
    p.tau_den = cost.denominator();
}

nlohmann::json parse_workload(const std::string& text) {
    std::ifstream file(text);
    try {
        if (file) return nlohmann::json::parse(file);
        return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ConfigError, std::string("workload: ") + e.what());
    }
}

// A config file supplies defaults; any flag given on the command line wins.
ExperimentConfig build_config(const ParamFlags& f, bool need_source = true) {
    ExperimentConfig cfg;
    if (f.config) {
        cfg = load_config(*f.config);
    } else {
        require(f.policy && f.C && f.T, ErrorCode::ConfigError, "need --config or --policy, --C and --T");
    }
    auto& p = cfg.params;
    if (f.policy) cfg.policy = policy_kind_from(*f.policy);
    if (f.C) p.C = *f.C;
    if (f.k) p.k = *f.k;
    if (f.T) p.T = *f.T;
    if (f.F) p.F = *f.F;
    if (f.p_ppm) p.p_ppm = *f.p_ppm;
    apply_cost(p, f.tau, f.tau_den);
    if (f.eta_ppm) p.eta_ppm = *f.eta_ppm;
    if (f.utility) p.utility = true;
    if (f.seed) cfg.seed = *f.seed;
    if (f.repetitions) cfg.repetitions = *f.repetitions;
    if (f.single_cost) cfg.single_cost_simultaneous_flush = true;
    if (f.shadow) {
        require(*f.shadow == "full" || *f.shadow == "half", ErrorCode::ConfigError, "--shadow must be full or half");
        cfg.shadow = *f.shadow == "half" ? ShadowSize::Half : ShadowSize::Full;
    }
    if (f.workload) {
        cfg.workload = workload_spec_from_json(parse_workload(*f.workload), p.T);
        cfg.sequence_path.reset();
        cfg.adversary.reset();
    }
    if (f.seq) {
        cfg.sequence_path = *f.seq;
        cfg.workload.reset();
        cfg.adversary.reset();
    }
    if (f.oracle) cfg.oracle = oracle_kind_from(*f.oracle);
    if (f.slack) cfg.slack = *f.slack;
    if (f.trace) cfg.trace_path = *f.trace;
    if (f.csv) cfg.csv_path = *f.csv;
    if (need_source) validate_config(cfg);
    return cfg;
}

ordered_json rational_json(const Rational& q) {
    if (q.denominator() == 1) return q.numerator();
    return to_string(q);
}

ordered_json row_json(const RatioRow& r) {
    ordered_json j;
    j["run_id"] = r.run_id;
    j["policy"] = std::string(to_string(r.policy));
    j["seed"] = r.seed;
    j["n_tx"] = r.n_tx;
    j["offered_value"] = r.offered_value;
    j["settled_value"] = r.settled_value;
    j["flush_count"] = r.flush_count;
    j["utility"] = rational_json(r.utility);
    if (r.opt_value) {
        j["opt_value"] = *r.opt_value;
        j["opt_utility"] = rational_json(*r.opt_utility);
        j["opt_utility_upper_bound"] = r.opt_utility_is_upper_bound;
        j["ratio_value"] = ratio_string(r.ratio_value);
        j["ratio_utility"] = ratio_string(r.ratio_utility);
        j["bound"] = format_bound(r.bound);
        j["bound_ok"] = *r.bound_ok;
    }
    return j;
}

void write_outputs(const ExperimentConfig& cfg, const Measurement& m) {
    if (cfg.trace_path) {
        std::ofstream out(*cfg.trace_path);
        require(static_cast<bool>(out), ErrorCode::ConfigError, "cannot write " + *cfg.trace_path);
        for (const auto& inst : m.instances) write_ndjson(out, inst.result.trace);
    }
    if (cfg.csv_path) {
        std::ofstream out(*cfg.csv_path);
        require(static_cast<bool>(out), ErrorCode::ConfigError, "cannot write " + *cfg.csv_path);
        write_results_csv(out, m.rows);
    }
    for (const auto& row : m.rows) std::cout << row_json(row).dump() << '\n';
}

std::vector<Money> parse_values(const std::string& list) {
    std::vector<Money> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoll(item));
        } catch (const std::exception&) {
            fail(ErrorCode::ConfigError, "bad value '" + item + "' in --values");
        }
    }
    return out;
}

template <class F>
ordered_json guarded(F&& f) {
    try {
        const double v = f();
        if (formulas::is_unbounded(v)) return "unbounded";
        return v;
    } catch (const Error& e) {
        return ordered_json{{"error", e.what()}};
    }
}

ordered_json formulas_json(Money C, Money T, std::optional<std::int64_t> k, std::int64_t p_ppm, std::int64_t tau,
                           std::int64_t tau_den, std::optional<std::int64_t> eta_ppm) {
    require(C > 0 && T > 0 && T <= C, ErrorCode::InvalidParams, "need 0 < T <= C");
    require(tau_den > 0, ErrorCode::InvalidParams, "tau-den must be positive");
    const double c = static_cast<double>(C), t = static_cast<double>(T);
    const double p = static_cast<double>(p_ppm) / kPpm;
    const double tv = static_cast<double>(tau) / static_cast<double>(tau_den);

    ordered_json j;
    j["C"] = C;
    j["T"] = T;
    j["p"] = p;
    j["tau"] = tv;
    if (k) {
        const double r = static_cast<double>(*k) * t / c;
        j["k"] = *k;
        j["r"] = r;
        j["fa_ratio"] = guarded([&] { return formulas::fa_ratio(*k, r); });
        j["fwf_ratio"] = guarded([&] { return formulas::fwf_ratio(static_cast<double>(*k), r); });
        if (*k * T == C) j["ftwf_ratio"] = guarded([&] { return formulas::ftwf_ratio(*k); });
        if (tv > 0) j["kwallet_profit_inflation"] = guarded([&] {
            return formulas::kwallet_profit_inflation(*k, c, t, p, tv);
        });
    }
    const auto ks = formulas::k_star(c, t);
    j["k_star"] = {{"real", ks.real_k}, {"integer", ks.integer_k}};
    j["beta"] = formulas::beta(c, p, tv);
    try {
        const auto es = formulas::eta_star(c, t, p, tv);
        j["eta_star"] = {{"value", es.value}, {"formula", es.formula}, {"clamped", es.clamped}};
        j["eta_alpha_at_eta_star"] = guarded([&] { return formulas::eta_alpha(es.value, c, t, p, tv); });
    } catch (const Error& e) {
        j["eta_star"] = {{"error", e.what()}};
    }
    j["eta_star_ratio"] = guarded([&] { return formulas::eta_star_ratio(c, t, p, tv); });
    if (eta_ppm) {
        const double eta = static_cast<double>(*eta_ppm) / kPpm;
        j["eta"] = eta;
        j["eta_alpha"] = guarded([&] { return formulas::eta_alpha(eta, c, t, p, tv); });
    }
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collateral flushing policies: simulation, competitive ratios and exhaustive checks"};
    app.require_subcommand(1);

    ParamFlags sim_flags;
    auto* sim = app.add_subcommand("simulate", "run a policy and report V, f, U");
    add_run_flags(sim, sim_flags);

    ParamFlags ratio_flags;
    auto* ratio = app.add_subcommand("ratio", "run a policy and an offline oracle, compare with the bound");
    add_run_flags(ratio, ratio_flags);
    ratio->add_option("--oracle", ratio_flags.oracle, "brute-general|brute-kwallet|brute-utility|window-bound");
    ratio->add_option("--slack", ratio_flags.slack, "additive allowance in the bound check");

    ParamFlags adv_flags;
    std::string adv_type, adv_target;
    Money adv_epsilon = 1;
    std::int64_t adv_rounds = 1;
    auto* adv = app.add_subcommand("adversary", "run an adversarial sequence against a policy");
    adv->add_option("--type", adv_type, "thm3|fwfkiller|burst")->required();
    adv->add_option("--target", adv_target, "policy under attack")->required();
    adv->add_option("--epsilon", adv_epsilon, "microtransaction value");
    adv->add_option("--rounds", adv_rounds, "rounds (epochs for burst)");
    adv->add_option("--oracle", adv_flags.oracle, "oracle (default window-bound)");
    adv->add_option("--trace", adv_flags.trace, "write NDJSON event trace");
    adv->add_option("--csv", adv_flags.csv, "write results CSV");
    add_model_flags(adv, adv_flags);

    ExhaustSpace space;
    std::string values = "1,2,3";
    auto* exh = app.add_subcommand("exhaust", "check competitive bounds on every short sequence");
    exh->add_option("--C", space.C)->required();
    exh->add_option("--k", space.k);
    exh->add_option("--T", space.T)->required();
    exh->add_option("--F", space.F);
    exh->add_option("--max-len", space.max_len)->required();
    exh->add_option("--values", values, "comma-separated transaction values");
    exh->add_option("--budget", space.budget, "maximum number of sequences");

    ParamFlags sweep_flags;
    std::string sweep_param;
    double sweep_from = 0, sweep_to = 0, sweep_step = 1;
    std::optional<std::string> sweep_out;
    auto* swp = app.add_subcommand("sweep", "sweep eta or k and report mean V, f, U and worst ratio");
    add_run_flags(swp, sweep_flags);
    swp->add_option("--oracle", sweep_flags.oracle, "oracle for the ratio column");
    swp->add_option("--param", sweep_param, "eta|k")->required();
    swp->add_option("--from", sweep_from)->required();
    swp->add_option("--to", sweep_to)->required();
    swp->add_option("--step", sweep_step)->required();
    swp->add_option("--out", sweep_out, "write the table to a file instead of stdout");

    Money fC = 0, fT = 0;
    std::optional<std::int64_t> fk, feta;
    std::int64_t fp = kPpm;
    std::optional<std::string> ftau;
    std::optional<std::int64_t> ftau_den;
    auto* fml = app.add_subcommand("formulas", "print closed-form ratios and optimal parameters as JSON");
    fml->add_option("--C", fC)->required();
    fml->add_option("--T", fT)->required();
    fml->add_option("--k", fk);
    fml->add_option("--p-ppm", fp);
    fml->add_option("--tau", ftau);
    fml->add_option("--tau-den", ftau_den);
    fml->add_option("--eta-ppm", feta);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*sim) {
            auto cfg = build_config(sim_flags);
            write_outputs(cfg, simulate(cfg));
        } else if (*ratio) {
            auto cfg = build_config(ratio_flags);
            write_outputs(cfg, measure_ratio(cfg));
        } else if (*adv) {
            adv_flags.policy = adv_target;
            auto cfg = build_config(adv_flags, false);
            cfg.adversary = AdversarySpec{adversary_kind_from(adv_type), adv_epsilon, adv_rounds};
            if (!adv_flags.oracle) cfg.oracle = OracleKind::WindowBound;
            write_outputs(cfg, measure_ratio(cfg));
        } else if (*exh) {
            space.values = parse_values(values);
            const auto s = exhaustive_verify(space);
            ordered_json j;
            j["sequences"] = s.sequences;
            j["prefixes"] = s.prefixes;
            for (const auto& c : s.checks)
                j["checks"].push_back({{"policy", std::string(to_string(c.policy))}, {"bound", to_string(c.bound)}});
            j["counterexamples"] = ordered_json::array();
            for (const auto& c : s.counterexamples) {
                std::ostringstream seq;
                for (const auto& tx : c.sequence.transactions()) seq << tx.slot << ':' << tx.value << ' ';
                j["counterexamples"].push_back({{"policy", std::string(to_string(c.policy))},
                                                {"sequence", seq.str()},
                                                {"settled", c.settled},
                                                {"opt", c.opt}});
            }
            j["invariant_violations"] = s.invariant_violations;
            std::cout << j.dump(2) << '\n';
            return s.counterexamples.empty() && s.invariant_violations.empty() ? 0 : 1;
        } else if (*swp) {
            auto cfg = build_config(sweep_flags);
            const auto table = sweep(cfg, sweep_param_from(sweep_param), sweep_from, sweep_to, sweep_step);
            if (sweep_out) {
                std::ofstream out(*sweep_out);
                require(static_cast<bool>(out), ErrorCode::ConfigError, "cannot write " + *sweep_out);
                write_sweep_csv(out, table);
            } else {
                write_sweep_csv(std::cout, table);
            }
        } else if (*fml) {
            ModelParams cost;
            apply_cost(cost, ftau, ftau_den);
            std::cout << formulas_json(fC, fT, fk, fp, cost.tau, cost.tau_den, feta).dump(2) << '\n';
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
