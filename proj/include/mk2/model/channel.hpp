#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mk2/model/value.hpp"

namespace mk2::model {

using ChannelId = std::int32_t;

/// A declared channel: a name plus the value domains of its parameters.
struct ChannelDecl {
    std::string name;
    std::vector<DomainId> params;
};

constexpr std::int32_t kTauChannel = -1;
constexpr std::int32_t kTickChannel = -2;

/// A transition label: a channel instance with concrete arguments, or the
/// distinguished internal (TAU) / termination (TICK) labels.
struct EventLabel {
    ChannelId channel = kTauChannel;
    std::vector<Atom> args;

    static EventLabel tau() { return EventLabel{kTauChannel, {}}; }
    static EventLabel tick() { return EventLabel{kTickChannel, {}}; }
    static EventLabel event(ChannelId ch, std::vector<Atom> as = {}) {
        return EventLabel{ch, std::move(as)};
    }

    bool is_tau() const { return channel == kTauChannel; }
    bool is_tick() const { return channel == kTickChannel; }
    bool is_visible() const { return channel >= 0; }

    friend bool operator==(const EventLabel& a, const EventLabel& b) {
        return a.channel == b.channel && a.args == b.args;
    }
    friend bool operator!=(const EventLabel& a, const EventLabel& b) { return !(a == b); }
    friend bool operator<(const EventLabel& a, const EventLabel& b) {
        if (a.channel != b.channel) return a.channel < b.channel;
        return a.args < b.args;
    }
};

} // namespace mk2::model
