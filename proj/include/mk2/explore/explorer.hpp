#pragma once

#include <cstdint>
#include <vector>

#include "mk2/calc/semantics.hpp"
#include "mk2/scj/generator.hpp"

namespace mk2::explore {

struct ExploreLimits {
    std::uint64_t max_states = 10'000'000;
    std::uint64_t max_depth = 0; // 0 = unbounded
    std::vector<model::ChannelId> hide;
};

struct Trace {
    std::vector<model::EventLabel> labels;
};

/// A divergence witness: a stem from the initial state to a cycle of
/// internal transitions.
struct Lasso {
    Trace stem;
    Trace cycle;
};

struct ExplorationReport {
    std::uint64_t states = 0;
    std::uint64_t transitions = 0;
    std::uint64_t terminated = 0; // configurations that have performed tick
    std::vector<Trace> deadlocks;   // bounded to 5, shortest first
    std::vector<Lasso> divergences; // bounded to 5
    bool truncated = false;

    bool clean() const { return deadlocks.empty() && divergences.empty() && !truncated; }
};

constexpr std::size_t kMaxWitnesses = 5;

/// Breadth-first enumeration of the reachable configurations of a model.
/// Events on `extra_hidden` are relabelled internal before divergence
/// analysis; deadlock and state counting always use the raw transitions.
ExplorationReport explore_defs(const model::ModelDefs& defs, const ExploreLimits& limits,
                               const std::vector<model::ChannelId>& extra_hidden = {});

/// Explore a generated protocol model, hiding its state channels (plus any
/// channels named in the limits) for the divergence check.
ExplorationReport explore(const scj::ModelBundle& bundle, const ExploreLimits& limits);

/// Replay a trace from the initial configuration; true when every label can
/// be followed in order.
bool replay(const model::ModelDefs& defs, const Trace& trace);

} // namespace mk2::explore
