#pragma once

#include <optional>

#include "collateral/policies/decision.hpp"

namespace collateral {

// First-fit over W_1..W_k; when a transaction fits nowhere every wallet is
// flushed at once and the transaction is discarded.
class FlushAll {
public:
    PolicyDecision step(WalletBank& bank, Slot slot, const std::optional<Transaction>& tx) const {
        bank.advance(slot);
        if (!tx) return {};
        if (!bank.all_online(slot)) return detail::discard(bank, *tx);

        for (std::size_t i = 0; i < bank.size(); ++i)
            if (tx->value <= bank.remaining(i)) return detail::settle_in(bank, i, *tx, slot);

        auto d = detail::discard(bank, *tx);
        for (std::size_t i = 0; i < bank.size(); ++i) {
            bank.flush(i, slot);
            d.flushed_wallets.push_back(i);
        }
        return d;
    }

    PolicyDecision finish(WalletBank& bank, Slot slot, bool utility) const {
        PolicyDecision d;
        if (utility) d.flushed_wallets = flush_nonempty_wallets(bank, slot);
        return d;
    }
};

}  // namespace collateral
