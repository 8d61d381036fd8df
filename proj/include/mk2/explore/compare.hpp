#pragma once

#include "mk2/explore/explorer.hpp"

namespace mk2::explore {

struct ProtocolComparison {
    ExplorationReport current;
    ExplorationReport proposed;
    double reduction = 0.0; // 1 - proposed.states / current.states
    bool conclusive = false;
};

/// Build and explore both protocol variants of a topology and report the
/// state-space reduction. Named-sequencer terminators are rewritten to
/// mission-local requests for the proposed build.
ProtocolComparison compare_protocols(const scj::Topology& t, const ExploreLimits& limits);

} // namespace mk2::explore
