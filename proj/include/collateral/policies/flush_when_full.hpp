#pragma once

#include <cstddef>
#include <optional>

#include "collateral/policies/decision.hpp"

namespace collateral {

// One active wallet at a time, taken in strict cyclic order. A transaction that
// does not fit flushes the active wallet and is discarded; arrivals are then
// discarded until the next wallet in order is back online.
class FlushWhenFull {
public:
    std::size_t active() const noexcept { return active_; }

    PolicyDecision step(WalletBank& bank, Slot slot, const std::optional<Transaction>& tx) {
        bank.advance(slot);
        if (!tx) return {};
        if (!bank.available(active_, slot)) return detail::discard(bank, *tx);
        if (tx->value <= bank.remaining(active_)) return detail::settle_in(bank, active_, *tx, slot);

        auto d = detail::discard(bank, *tx);
        bank.flush(active_, slot);
        d.flushed_wallets.push_back(active_);
        active_ = (active_ + 1) % bank.size();
        return d;
    }

    PolicyDecision finish(WalletBank& bank, Slot slot, bool utility) const {
        PolicyDecision d;
        if (utility) d.flushed_wallets = flush_nonempty_wallets(bank, slot);
        return d;
    }

private:
    std::size_t active_ = 0;
};

}  // namespace collateral
