#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "collateral/pool.hpp"
#include "collateral/types.hpp"
#include "collateral/wallet_bank.hpp"

namespace collateral {

struct PolicyDecision {
    enum class Action { None, Settle, Discard };

    Action action = Action::None;
    std::optional<std::size_t> wallet;          // settle target (k-wallet policies)
    std::vector<std::size_t> flushed_wallets;   // wallets flushed this slot
    std::optional<Rational> pool_flush;         // amount flushed from the pool this slot

    bool settled() const noexcept { return action == Action::Settle; }
    bool flushed() const noexcept { return !flushed_wallets.empty() || pool_flush.has_value(); }
};

namespace detail {

inline PolicyDecision settle_in(WalletBank& bank, std::size_t i, const Transaction& tx, Slot slot) {
    bank.settle(i, tx, slot);
    PolicyDecision d;
    d.action = PolicyDecision::Action::Settle;
    d.wallet = i;
    return d;
}

template <class State>
PolicyDecision discard(State& state, const Transaction& tx) {
    state.note_discard(tx);
    PolicyDecision d;
    d.action = PolicyDecision::Action::Discard;
    return d;
}

}  // namespace detail

// End-of-run cleanup for utility accounting: every online wallet holding
// committed collateral is flushed once.
inline std::vector<std::size_t> flush_nonempty_wallets(WalletBank& bank, Slot slot) {
    bank.advance(slot);
    std::vector<std::size_t> flushed;
    for (std::size_t i = 0; i < bank.size(); ++i) {
        if (bank.available(i, slot) && bank.committed(i) > 0) {
            bank.flush(i, slot);
            flushed.push_back(i);
        }
    }
    return flushed;
}

}  // namespace collateral
