#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "collateral/trace.hpp"
#include "collateral/types.hpp"

namespace collateral {

// k wallets of C/k collateral each. A wallet flushed at slot t is offline for
// slots t+1..t+F and comes back with its full size at slot t+F+1.
//
// Wallet indices are 0-based in this API; trace events carry 1-based indices.
class WalletBank {
public:
    struct Wallet {
        Money remaining = 0;
        Slot offline_until = 0;  // 0 while online
    };

    explicit WalletBank(const ModelParams& params, bool record = true)
        : params_(params), record_(record) {
        validate_kwallet(params_);
        wallets_.assign(static_cast<std::size_t>(params_.k), Wallet{params_.wallet_size(), 0});
    }

    const ModelParams& params() const noexcept { return params_; }
    std::size_t size() const noexcept { return wallets_.size(); }
    Money wallet_size() const noexcept { return params_.wallet_size(); }
    Slot current_slot() const noexcept { return slot_; }

    const Wallet& wallet(std::size_t i) const {
        check_index(i);
        return wallets_[i];
    }

    Money remaining(std::size_t i) const { return wallet(i).remaining; }
    Money committed(std::size_t i) const { return wallet_size() - wallet(i).remaining; }

    bool available(std::size_t i, Slot slot) const { return wallet(i).offline_until < slot; }

    bool all_online(Slot slot) const {
        for (std::size_t i = 0; i < wallets_.size(); ++i)
            if (!available(i, slot)) return false;
        return true;
    }

    // Starts `slot`: wallets whose flush period ended come back online.
    void advance(Slot slot) {
        require(slot >= slot_, ErrorCode::SlotRegression,
                "slot " + std::to_string(slot) + " precedes " + std::to_string(slot_));
        slot_ = slot;
        for (std::size_t i = 0; i < wallets_.size(); ++i) {
            auto& w = wallets_[i];
            if (w.offline_until != 0 && w.offline_until < slot) {
                const Slot back = w.offline_until + 1;
                w.remaining = wallet_size();
                w.offline_until = 0;
                if (record_) {
                    Event e{.slot = back, .kind = EventKind::Online};
                    e.wallet = static_cast<std::int64_t>(i) + 1;
                    e.available = Rational(w.remaining);
                    trace_.push_back(e);
                }
            }
        }
    }

    void settle(std::size_t i, const Transaction& tx, Slot slot) {
        advance(slot);
        check_index(i);
        require(tx.slot == slot, ErrorCode::InvalidSpec, "transaction slot does not match current slot");
        require(available(i, slot), ErrorCode::WalletOffline,
                "wallet " + std::to_string(i + 1) + " offline at slot " + std::to_string(slot));
        auto& w = wallets_[i];
        require(tx.value <= w.remaining, ErrorCode::InsufficientCollateral,
                "value " + std::to_string(tx.value) + " exceeds remaining " + std::to_string(w.remaining));
        w.remaining -= tx.value;
        settled_ += tx.value;
        if (record_) {
            Event e{.slot = slot, .kind = EventKind::Settle};
            e.wallet = static_cast<std::int64_t>(i) + 1;
            e.value = tx.value;
            e.available = Rational(w.remaining);
            e.committed = Rational(wallet_size() - w.remaining);
            trace_.push_back(e);
        }
    }

    void flush(std::size_t i, Slot slot) {
        advance(slot);
        check_index(i);
        require(available(i, slot), ErrorCode::WalletOffline,
                "cannot flush offline wallet " + std::to_string(i + 1));
        auto& w = wallets_[i];
        w.offline_until = slot + params_.F;
        ++flushes_;
        if (record_) {
            Event e{.slot = slot, .kind = EventKind::Flush};
            e.wallet = static_cast<std::int64_t>(i) + 1;
            e.flush_amount = Rational(wallet_size() - w.remaining);
            e.committed = Rational(0);
            trace_.push_back(e);
        }
    }

    void note_arrival(const Transaction& tx) {
        if (record_) {
            Event e{.slot = tx.slot, .kind = EventKind::Arrive};
            e.value = tx.value;
            trace_.push_back(e);
        }
    }

    void note_discard(const Transaction& tx) {
        if (record_) {
            Event e{.slot = tx.slot, .kind = EventKind::Discard};
            e.value = tx.value;
            trace_.push_back(e);
        }
    }

    Money settled_value() const noexcept { return settled_; }
    std::int64_t flush_count() const noexcept { return flushes_; }
    const EventTrace& trace() const noexcept { return trace_; }
    EventTrace take_trace() { return std::move(trace_); }

private:
    void check_index(std::size_t i) const {
        require(i < wallets_.size(), ErrorCode::IndexOutOfRange,
                "wallet index " + std::to_string(i) + " out of range");
    }

    ModelParams params_;
    bool record_;
    std::vector<Wallet> wallets_;
    Slot slot_ = 0;
    Money settled_ = 0;
    std::int64_t flushes_ = 0;
    EventTrace trace_;
};

}  // namespace collateral
