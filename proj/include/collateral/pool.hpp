#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "collateral/trace.hpp"
#include "collateral/types.hpp"

namespace collateral {

// Single collateral pool of the general model. Any committed portion may be
// flushed; a tranche flushed at slot t is usable again from slot t+F+1.
//
// Amounts are exact rationals: a threshold policy flushes eta*C, which need
// not be a whole number of base units.
class Pool {
public:
    struct Tranche {
        Rational amount;
        Slot available_at = 0;  // first slot of renewed availability

        friend bool operator==(const Tranche&, const Tranche&) = default;
    };

    explicit Pool(const ModelParams& params, bool record = true)
        : params_(params), record_(record) {
        validate_pool(params_);
    }

    const ModelParams& params() const noexcept { return params_; }
    Slot current_slot() const noexcept { return slot_; }
    const Rational& committed() const noexcept { return committed_; }
    const std::vector<Tranche>& inflight() const noexcept { return inflight_; }

    Rational inflight_total() const {
        Rational sum{0};
        for (const auto& t : inflight_) sum += t.amount;
        return sum;
    }

    // Pure view: collateral usable at `slot` without retiring anything.
    Rational available_at(Slot slot) const {
        Rational out = Rational(params_.C) - committed_;
        for (const auto& t : inflight_)
            if (t.available_at > slot) out -= t.amount;
        return out;
    }

    // Starts `slot`, merging returned tranches back, and reports what is usable.
    Rational available(Slot slot) {
        advance(slot);
        return available_at(slot);
    }

    void advance(Slot slot) {
        require(slot >= slot_, ErrorCode::SlotRegression,
                "slot " + std::to_string(slot) + " precedes " + std::to_string(slot_));
        slot_ = slot;
        auto returned = std::stable_partition(inflight_.begin(), inflight_.end(),
                                              [slot](const Tranche& t) { return t.available_at > slot; });
        if (record_) {
            for (auto it = returned; it != inflight_.end(); ++it) {
                Event e{.slot = it->available_at, .kind = EventKind::Online};
                e.flush_amount = it->amount;
                trace_.push_back(e);
            }
        }
        inflight_.erase(returned, inflight_.end());
    }

    void settle(const Transaction& tx, Slot slot) {
        advance(slot);
        require(tx.slot == slot, ErrorCode::InvalidSpec, "transaction slot does not match current slot");
        const Rational avail = available_at(slot);
        require(avail >= tx.value, ErrorCode::InsufficientCollateral,
                "value " + std::to_string(tx.value) + " exceeds available " + to_string(avail));
        committed_ += tx.value;
        settled_ += tx.value;
        if (record_) {
            Event e{.slot = slot, .kind = EventKind::Settle};
            e.value = tx.value;
            e.available = avail - tx.value;
            e.committed = committed_;
            trace_.push_back(e);
        }
    }

    void flush(Rational amount, Slot slot) {
        advance(slot);
        require(amount > 0, ErrorCode::ZeroFlush, "flush amount must be positive");
        require(amount <= committed_, ErrorCode::FlushExceedsCommitted,
                "flush of " + to_string(amount) + " exceeds committed " + to_string(committed_));
        committed_ -= amount;
        inflight_.push_back({amount, slot + params_.F + 1});
        ++flushes_;
        if (record_) {
            Event e{.slot = slot, .kind = EventKind::Flush};
            e.flush_amount = amount;
            e.available = available_at(slot);
            e.committed = committed_;
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
    ModelParams params_;
    bool record_;
    Rational committed_{0};
    std::vector<Tranche> inflight_;
    Slot slot_ = 0;
    Money settled_ = 0;
    std::int64_t flushes_ = 0;
    EventTrace trace_;
};

}  // namespace collateral
