#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace mk2::scj {

/// What a thread or handler does once started.
struct Behaviour {
    enum class Kind : std::uint8_t { WorkLoop, Terminator, Producer, Consumer };
    Kind kind = Kind::WorkLoop;
    int steps = 1;                  // WorkLoop: visible work events per release (1..3)
    bool checks_termination = false; // WorkLoop: polls the mission's pending flag
    std::string target_sequencer;   // Terminator: empty = mission-local request
    bool stops_sequence = false;    // Terminator: mission cleanup reports "do not continue"
    std::string buffer;             // Producer/Consumer: shared one-place buffer id
};

enum class HandlerKind : std::uint8_t { Periodic, Aperiodic, OneShot };

struct SequencerNode;

struct SchedulableNode {
    enum class Kind : std::uint8_t { Thread, Handler, NestedSequencer };
    Kind kind = Kind::Thread;
    std::string id;
    HandlerKind handler_kind = HandlerKind::Periodic; // Handler only
    Behaviour behaviour;                              // Thread/Handler only
    std::shared_ptr<SequencerNode> nested;            // NestedSequencer only
};

struct MissionNode {
    std::string id;
    std::vector<std::string> buffers;
    std::vector<SchedulableNode> schedulables;
};

struct SequencerNode {
    std::string id;
    std::vector<MissionNode> missions; // executed in order; empty = immediate null mission
};

/// The application-model shape compiled by the generator: a tree of
/// sequencers, missions and schedulables.
struct Topology {
    std::string name = "topology";
    SequencerNode root;

    /// Unique ids, declared buffers, bounded work steps, terminator targets.
    void validate() const;

    /// Rewrite named-sequencer terminators to mission-local requests, which
    /// is the closest intent expressible under the proposed protocol.
    Topology rewritten_for_proposed() const;

    bool has_named_terminator() const;
};

} // namespace mk2::scj
