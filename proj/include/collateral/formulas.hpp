#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "collateral/error.hpp"

namespace collateral::formulas {

// Competitive-ratio bounds and optimal parameters in double precision.
// An unbounded ratio is reported as +infinity; invalid inputs throw DomainError.

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

inline bool is_unbounded(double ratio) { return std::isinf(ratio) && ratio > 0; }

namespace detail {

inline void domain(bool ok, const std::string& what) {
    require(ok, ErrorCode::DomainError, what);
}

}  // namespace detail

// FlushAll: (2-r)/(1-r) for r < 1; at r = 1 it is 3 with k > 1 and unbounded for k = 1.
inline double fa_ratio(std::int64_t k, double r) {
    detail::domain(k >= 1, "k must be positive");
    detail::domain(r > 0.0 && r <= 1.0, "r must lie in (0, 1]");
    if (r == 1.0) return k > 1 ? 3.0 : kUnbounded;
    return (2.0 - r) / (1.0 - r);
}

// FlushWhenFull: (k+1)/(k(1-r)); unbounded at r = 1.
inline double fwf_ratio(double k, double r) {
    detail::domain(k > 1.0, "FlushWhenFull bound needs k > 1");
    detail::domain(r > 0.0 && r <= 1.0, "r must lie in (0, 1]");
    if (r == 1.0) return kUnbounded;
    return (k + 1.0) / (k * (1.0 - r));
}

// FlushTwoWhenFull at r = 1: 2(k+1)/k.
inline double ftwf_ratio(std::int64_t k) {
    detail::domain(k > 1 && k % 2 == 0, "FlushTwoWhenFull needs an even k > 1");
    return 2.0 * static_cast<double>(k + 1) / static_cast<double>(k);
}

struct WalletCount {
    double real_k = 0.0;
    std::int64_t integer_k = 1;
};

// Wallet count minimizing the FlushWhenFull bound: sqrt(1 + C/T) - 1. The
// integer choice compares floor and ceil, since the bound is asymmetric.
inline WalletCount k_star(double C, double T) {
    detail::domain(T > 0.0 && T <= C, "need 0 < T <= C");
    WalletCount out;
    out.real_k = std::sqrt(1.0 + C / T) - 1.0;

    auto bound = [&](std::int64_t k) {
        const double r = static_cast<double>(k) * T / C;
        if (k < 1 || r > 1.0) return kUnbounded;
        if (k == 1) return r < 1.0 ? 2.0 / (1.0 - r) : kUnbounded;
        return fwf_ratio(static_cast<double>(k), r);
    };
    const auto lo = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(out.real_k)));
    const auto hi = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(out.real_k)));
    out.integer_k = bound(hi) < bound(lo) ? hi : lo;
    return out;
}

// Factor by which the profit-model ratio exceeds the value-only one:
// (p/tau - k/C) / (p/tau - k/(C - kT)). Equals 1 when tau = 0.
inline double kwallet_profit_inflation(std::int64_t k, double C, double T, double p, double tau) {
    detail::domain(k >= 1 && C > 0.0 && T > 0.0 && p > 0.0 && tau >= 0.0, "parameters must be positive");
    detail::domain(static_cast<double>(k) * T < C, "need kT < C");
    if (tau == 0.0) return 1.0;
    const double margin = p / tau;
    const double denom = margin - static_cast<double>(k) / (C - static_cast<double>(k) * T);
    detail::domain(denom > 0.0, "wallets flushed at C/k - T are unprofitable (p/tau <= k/(C-kT))");
    return (margin - static_cast<double>(k) / C) / denom;
}

// Threshold policy ratio:
//   alpha = 1/(1 - eta - T/C) * (p/tau - 1/C) / (p/tau - 1/(eta C)).
// tau = 0 gives the value-only factor 1/(1 - eta - T/C).
inline double eta_alpha(double eta, double C, double T, double p, double tau) {
    detail::domain(C > 0.0 && T >= 0.0 && p > 0.0 && tau >= 0.0, "parameters must be positive");
    detail::domain(eta >= T / C, "eta below T/C");
    detail::domain(eta <= 1.0, "eta above 1");
    const double slack = 1.0 - eta - T / C;
    detail::domain(slack > 0.0, "eta >= 1 - T/C leaves no settled-value guarantee");
    if (tau == 0.0) return 1.0 / slack;
    const double margin = p / tau;
    detail::domain(margin > 1.0 / (eta * C), "p/tau <= 1/(eta C): each flush costs more than it earns");
    return (1.0 / slack) * (margin - 1.0 / C) / (margin - 1.0 / (eta * C));
}

inline double beta(double C, double p, double tau) { return tau / (p * C); }

struct EtaStar {
    double value = 0.0;    // admissible threshold, at least T/C
    double formula = 0.0;  // sqrt((1 - T/C) * beta) before clamping
    bool clamped = false;
};

// eta* = sqrt((1 - T/C) * beta), raised to T/C when it falls below that floor.
inline EtaStar eta_star(double C, double T, double p, double tau) {
    detail::domain(C > 0.0 && T >= 0.0 && p > 0.0 && tau >= 0.0, "parameters must be positive");
    detail::domain(p * C > tau, "need pC > tau");
    detail::domain(T < C, "need T < C");
    EtaStar out;
    out.formula = std::sqrt((1.0 - T / C) * beta(C, p, tau));
    out.clamped = out.formula < T / C;
    out.value = out.clamped ? T / C : out.formula;
    return out;
}

// Ratio attained at eta*: (1 - beta) / (sqrt(1 - T/C) - sqrt(beta))^2.
inline double eta_star_ratio(double C, double T, double p, double tau) {
    detail::domain(C > 0.0 && T >= 0.0 && p > 0.0 && tau >= 0.0, "parameters must be positive");
    detail::domain(p * C > tau, "need pC > tau");
    const double b = beta(C, p, tau);
    const double gap = std::sqrt(1.0 - T / C) - std::sqrt(b);
    detail::domain(gap > 0.0, "need sqrt(1 - T/C) > sqrt(beta)");
    return (1.0 - b) / (gap * gap);
}

}  // namespace collateral::formulas
