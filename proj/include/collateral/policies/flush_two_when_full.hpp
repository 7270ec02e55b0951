#pragma once

#include <cstddef>
#include <optional>

#include "collateral/policies/decision.hpp"

namespace collateral {

// Wallets grouped into consecutive pairs (W_1,W_2), (W_3,W_4), ... The second
// wallet of the active pair takes a transaction too large for the first; when
// neither fits, both are flushed and the next pair becomes active.
class FlushTwoWhenFull {
public:
    explicit FlushTwoWhenFull(std::int64_t k) {
        require(k >= 2 && k % 2 == 0, ErrorCode::OddWalletCount,
                "pairing needs an even wallet count, got " + std::to_string(k));
        pairs_ = static_cast<std::size_t>(k / 2);
    }

    std::size_t active_pair() const noexcept { return pair_; }

    PolicyDecision step(WalletBank& bank, Slot slot, const std::optional<Transaction>& tx) {
        bank.advance(slot);
        if (!tx) return {};
        const std::size_t first = 2 * pair_;
        const std::size_t second = first + 1;
        if (!bank.available(first, slot) || !bank.available(second, slot))
            return detail::discard(bank, *tx);
        if (tx->value <= bank.remaining(first)) return detail::settle_in(bank, first, *tx, slot);
        if (tx->value <= bank.remaining(second)) return detail::settle_in(bank, second, *tx, slot);

        auto d = detail::discard(bank, *tx);
        bank.flush(first, slot);
        bank.flush(second, slot);
        d.flushed_wallets = {first, second};
        pair_ = (pair_ + 1) % pairs_;
        return d;
    }

    PolicyDecision finish(WalletBank& bank, Slot slot, bool utility) const {
        PolicyDecision d;
        if (utility) d.flushed_wallets = flush_nonempty_wallets(bank, slot);
        return d;
    }

private:
    std::size_t pairs_ = 1;
    std::size_t pair_ = 0;
};

}  // namespace collateral
