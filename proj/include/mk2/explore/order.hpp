#pragma once

#include <optional>
#include <set>
#include <string>

#include "mk2/explore/explorer.hpp"

namespace mk2::explore {

/// A channel with optional per-position argument constraints (an allowed
/// atom set; absent means any value).
struct EventPattern {
    model::ChannelId channel = 0;
    std::vector<std::optional<std::set<model::Atom>>> arg_constraints;

    bool matches(const model::EventLabel& l) const;
};

enum class OrderMode { ForallPrecedes, ExistsInterleaving };

struct OrderQuery {
    OrderMode mode = OrderMode::ForallPrecedes;
    EventPattern first;
    EventPattern second;
};

struct OrderResult {
    enum class Kind { Holds, Fails, WitnessFound, NoWitness };
    Kind kind = Kind::Holds;
    Trace witness;
    bool truncated = false;
};

/// Check an ordering property by composing a monitor with the exploration.
/// ForallPrecedes: no second-pattern event may occur before the first
/// first-pattern event on any trace. ExistsInterleaving: search for a trace
/// where a second-pattern event falls strictly between two first-pattern
/// events.
OrderResult check_order(const scj::ModelBundle& bundle, const OrderQuery& query,
                        const ExploreLimits& limits);

/// Parse "chan", "chan.arg", "chan.{a,b}" or "chan.*" (per position) into a
/// pattern against the bundle's declarations.
EventPattern parse_pattern(const std::string& text, const model::ModelDefs& defs);

} // namespace mk2::explore
