#pragma once

#include <gtest/gtest.h>

#include <optional>

#include "collateral/types.hpp"

namespace collateral::testing {

inline ModelParams kwallet(Money C, std::int64_t k, Money T, Slot F = 1) {
    ModelParams p;
    p.C = C;
    p.k = k;
    p.T = T;
    p.F = F;
    return p;
}

// p = 0.1, tau = 1/2 unless overridden.
inline ModelParams pool_params(Money C, Money T, Slot F, std::int64_t eta_ppm, bool utility = true,
                               std::int64_t p_ppm = 100000, Money tau = 1, std::int64_t tau_den = 2) {
    ModelParams p;
    p.C = C;
    p.T = T;
    p.F = F;
    p.eta_ppm = eta_ppm;
    p.p_ppm = p_ppm;
    p.tau = tau;
    p.tau_den = tau_den;
    p.utility = utility;
    return p;
}

}  // namespace collateral::testing

#define EXPECT_ERROR_CODE(stmt, expected)                                        \
    do {                                                                         \
        try {                                                                    \
            stmt;                                                                \
            ADD_FAILURE() << "expected " << ::collateral::to_string(expected);   \
        } catch (const ::collateral::Error& e) {                                 \
            EXPECT_EQ(e.code(), expected) << e.what();                           \
        }                                                                        \
    } while (0)
