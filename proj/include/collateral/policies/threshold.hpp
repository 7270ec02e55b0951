#pragma once

#include <optional>

#include "collateral/policies/decision.hpp"

namespace collateral {

// Settles whenever the pool can cover the transaction; as soon as committed but
// unflushed collateral reaches eta*C, exactly eta*C of it is flushed.
class Threshold {
public:
    explicit Threshold(const ModelParams& params) {
        validate_eta(params);
        quantum_ = params.eta_collateral();
    }

    const Rational& quantum() const noexcept { return quantum_; }

    PolicyDecision step(Pool& pool, Slot slot, const std::optional<Transaction>& tx) const {
        pool.advance(slot);
        if (!tx) return {};
        if (pool.available_at(slot) < tx->value) return detail::discard(pool, *tx);

        pool.settle(*tx, slot);
        PolicyDecision d;
        d.action = PolicyDecision::Action::Settle;
        Rational flushed{0};
        while (pool.committed() >= quantum_) {
            pool.flush(quantum_, slot);
            flushed += quantum_;
        }
        if (flushed > 0) d.pool_flush = flushed;
        return d;
    }

    // Residual committed collateral is flushed once at the end of every run.
    PolicyDecision finish(Pool& pool, Slot slot, bool /*utility*/) const {
        pool.advance(slot);
        PolicyDecision d;
        if (pool.committed() > 0) {
            d.pool_flush = pool.committed();
            pool.flush(pool.committed(), slot);
        }
        return d;
    }

private:
    Rational quantum_;
};

}  // namespace collateral
