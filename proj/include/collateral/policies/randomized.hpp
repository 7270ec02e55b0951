#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "collateral/policies/decision.hpp"
#include "collateral/policies/flush_all.hpp"

namespace collateral {

// Fair coin from a 64-bit Mersenne Twister; the top bit keeps the stream
// identical across standard libraries.
class SeededCoin {
public:
    explicit SeededCoin(std::uint64_t seed) : rng_(seed) {}
    bool operator()() { return (rng_() >> 63) != 0; }

private:
    std::mt19937_64 rng_;
};

// Replays a fixed list of outcomes, for enumerating every coin history.
class ScriptedCoin {
public:
    explicit ScriptedCoin(std::vector<bool> outcomes) : outcomes_(std::move(outcomes)) {}

    bool operator()() {
        require(next_ < outcomes_.size(), ErrorCode::ConfigError, "scripted coin exhausted");
        return outcomes_[next_++];
    }

    std::size_t used() const noexcept { return next_; }

private:
    std::vector<bool> outcomes_;
    std::size_t next_ = 0;
};

enum class ShadowSize {
    Full,  // each shadow wallet holds C, the whole real wallet
    Half,  // each shadow wallet holds C/2
};

inline ModelParams shadow_params(const ModelParams& real, ShadowSize size) {
    ModelParams p = real;
    p.k = 2;
    p.C = size == ShadowSize::Full ? 2 * real.C : real.C;
    p.utility = false;
    return p;
}

// Single real wallet that follows one wallet of a simulated two-wallet
// FlushAll run. A coin picks which shadow wallet to follow each time the real
// wallet comes online; the real wallet flushes exactly when the shadow does.
template <class Coin = SeededCoin>
class RandomizedShadow {
public:
    RandomizedShadow(const ModelParams& real, Coin coin, ShadowSize size = ShadowSize::Full)
        : coin_(std::move(coin)), shadow_bank_(make_shadow(real, size), false) {}

    const WalletBank& shadow() const noexcept { return shadow_bank_; }
    std::size_t coins_drawn() const noexcept { return coins_drawn_; }
    std::optional<std::size_t> following() const noexcept { return following_; }
    const Coin& coin() const noexcept { return coin_; }

    PolicyDecision step(WalletBank& bank, Slot slot, const std::optional<Transaction>& tx) {
        bank.advance(slot);
        if (!following_ && bank.available(0, slot)) {
            following_ = coin_() ? 0 : 1;
            ++coins_drawn_;
        }

        const PolicyDecision shadow = shadow_policy_.step(shadow_bank_, slot, tx);
        PolicyDecision d;
        if (tx) {
            if (shadow.settled() && shadow.wallet == following_)
                d = detail::settle_in(bank, 0, *tx, slot);
            else
                d = detail::discard(bank, *tx);
        }
        if (!shadow.flushed_wallets.empty()) {
            bank.flush(0, slot);
            d.flushed_wallets.push_back(0);
            following_.reset();
        }
        return d;
    }

    PolicyDecision finish(WalletBank& bank, Slot slot, bool utility) const {
        PolicyDecision d;
        if (utility) d.flushed_wallets = flush_nonempty_wallets(bank, slot);
        return d;
    }

private:
    static ModelParams make_shadow(const ModelParams& real, ShadowSize size) {
        require(real.k == 1, ErrorCode::NotSingleWallet, "randomized policy drives exactly one wallet");
        if (size == ShadowSize::Half)
            require(real.C % 2 == 0 && 2 * real.T <= real.C, ErrorCode::InvalidParams,
                    "half-size shadow wallets need even C and T <= C/2");
        return shadow_params(real, size);
    }

    Coin coin_;
    WalletBank shadow_bank_;
    FlushAll shadow_policy_;
    std::optional<std::size_t> following_;
    std::size_t coins_drawn_ = 0;
};

}  // namespace collateral
