#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <deque>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "collateral/types.hpp"

namespace collateral {

enum class EventKind { Arrive, Settle, Discard, Flush, Online };

constexpr std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::Arrive: return "arrive";
        case EventKind::Settle: return "settle";
        case EventKind::Discard: return "discard";
        case EventKind::Flush: return "flush";
        case EventKind::Online: return "online";
    }
    return "unknown";
}

inline EventKind event_kind_from(std::string_view s) {
    if (s == "arrive") return EventKind::Arrive;
    if (s == "settle") return EventKind::Settle;
    if (s == "discard") return EventKind::Discard;
    if (s == "flush") return EventKind::Flush;
    if (s == "online") return EventKind::Online;
    fail(ErrorCode::ConfigError, "unknown event kind: " + std::string(s));
}

// Wallet indices are 1-based everywhere outside the state machines.
struct Event {
    Slot slot = 0;
    EventKind kind = EventKind::Arrive;
    std::optional<std::int64_t> wallet;
    std::optional<Money> value;
    std::optional<Rational> flush_amount;
    std::optional<Rational> available;
    std::optional<Rational> committed;

    friend bool operator==(const Event&, const Event&) = default;
};

using EventTrace = std::vector<Event>;

struct RunResult {
    EventTrace trace;
    Money offered_value = 0;
    std::int64_t n_tx = 0;
    Money settled_value = 0;
    std::int64_t flush_count = 0;
    Rational utility{0};
};

namespace detail {

inline nlohmann::json amount_json(const Rational& q) {
    if (q.denominator() == 1) return q.numerator();
    return to_string(q);
}

inline Rational amount_from_json(const nlohmann::json& j) {
    if (j.is_number_integer()) return Rational(j.get<std::int64_t>());
    auto s = j.get<std::string>();
    auto slash = s.find('/');
    require(slash != std::string::npos, ErrorCode::ConfigError, "bad rational amount: " + s);
    return Rational(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
}

}  // namespace detail

// Integral amounts serialize as JSON integers, fractional ones as "num/den" strings.
inline nlohmann::ordered_json to_json(const Event& e) {
    nlohmann::ordered_json j;
    j["slot"] = e.slot;
    j["kind"] = std::string(to_string(e.kind));
    if (e.wallet) j["wallet"] = *e.wallet;
    if (e.value) j["value"] = *e.value;
    if (e.flush_amount) j["flushAmount"] = detail::amount_json(*e.flush_amount);
    if (e.available) j["available"] = detail::amount_json(*e.available);
    if (e.committed) j["committed"] = detail::amount_json(*e.committed);
    return j;
}

inline Event event_from_json(const nlohmann::json& j) {
    Event e;
    e.slot = j.at("slot").get<Slot>();
    e.kind = event_kind_from(j.at("kind").get<std::string>());
    if (j.contains("wallet")) e.wallet = j["wallet"].get<std::int64_t>();
    if (j.contains("value")) e.value = j["value"].get<Money>();
    if (j.contains("flushAmount")) e.flush_amount = detail::amount_from_json(j["flushAmount"]);
    if (j.contains("available")) e.available = detail::amount_from_json(j["available"]);
    if (j.contains("committed")) e.committed = detail::amount_from_json(j["committed"]);
    return e;
}

inline void write_ndjson(std::ostream& out, const EventTrace& trace) {
    for (const auto& e : trace) out << to_json(e).dump() << '\n';
}

inline EventTrace read_ndjson(std::istream& in) {
    EventTrace trace;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        trace.push_back(event_from_json(nlohmann::json::parse(line)));
    }
    return trace;
}

// Largest total settled value over any F+1 consecutive slots [t, t+F].
inline Money max_window_settled(const EventTrace& trace, Slot F) {
    std::deque<std::pair<Slot, Money>> window;
    Money sum = 0;
    Money best = 0;
    for (const auto& e : trace) {
        if (e.kind != EventKind::Settle) continue;
        window.emplace_back(e.slot, *e.value);
        sum += *e.value;
        while (window.front().first < e.slot - F) {
            sum -= window.front().second;
            window.pop_front();
        }
        best = std::max(best, sum);
    }
    return best;
}

inline Money settled_in_trace(const EventTrace& trace) {
    Money v = 0;
    for (const auto& e : trace)
        if (e.kind == EventKind::Settle) v += *e.value;
    return v;
}

inline std::int64_t flushes_in_trace(const EventTrace& trace) {
    std::int64_t f = 0;
    for (const auto& e : trace)
        if (e.kind == EventKind::Flush) ++f;
    return f;
}

}  // namespace collateral
