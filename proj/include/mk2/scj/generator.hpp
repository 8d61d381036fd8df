#pragma once

#include <map>
#include <string>
#include <vector>

#include "mk2/model/defs.hpp"
#include "mk2/scj/topology.hpp"

namespace mk2::scj {

enum class ProtocolVariant { Current, Proposed };

std::string to_string(ProtocolVariant v);

/// A concrete channel instance (or instance family, when only a prefix of
/// the arguments is fixed): the granularity used by event indexes and
/// ordering queries.
struct EventInstance {
    model::ChannelId channel;
    std::vector<model::Atom> prefix_args;
};

/// A generated protocol model: the process network plus the channel sets
/// and per-node event instances the checks need.
struct ModelBundle {
    model::ModelDefs defs;
    ProtocolVariant variant = ProtocolVariant::Current;
    std::string topology_name;
    std::vector<model::ChannelId> state_channels;       // hidden in divergence checks
    std::vector<model::ChannelId> termination_channels;
    std::map<std::string, std::vector<EventInstance>> event_index; // by topology node id
};

/// Compile a topology into the composed process network implementing the
/// selected mission-termination protocol.
ModelBundle build_model(const Topology& t, ProtocolVariant v);

/// Desk-scale topologies used throughout the test-suite and the paper-style
/// comparisons: two-thread-buffer, shuttle, railway, nested-pair.
Topology builtin_topology(const std::string& name);

std::vector<std::string> builtin_topology_names();

} // namespace mk2::scj
