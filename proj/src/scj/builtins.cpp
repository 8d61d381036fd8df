#include "mk2/scj/generator.hpp"

#include "mk2/errors.hpp"

namespace mk2::scj {

namespace {

SchedulableNode thread(std::string id, Behaviour b) {
    SchedulableNode n;
    n.kind = SchedulableNode::Kind::Thread;
    n.id = std::move(id);
    n.behaviour = std::move(b);
    return n;
}

SchedulableNode handler(std::string id, HandlerKind kind, Behaviour b) {
    SchedulableNode n;
    n.kind = SchedulableNode::Kind::Handler;
    n.id = std::move(id);
    n.handler_kind = kind;
    n.behaviour = std::move(b);
    return n;
}

SchedulableNode nested(SequencerNode seq) {
    SchedulableNode n;
    n.kind = SchedulableNode::Kind::NestedSequencer;
    n.nested = std::make_shared<SequencerNode>(std::move(seq));
    n.id = n.nested->id;
    return n;
}

Behaviour workloop(int steps, bool checks) {
    Behaviour b;
    b.kind = Behaviour::Kind::WorkLoop;
    b.steps = steps;
    b.checks_termination = checks;
    return b;
}

Behaviour terminator(std::string target = {}) {
    Behaviour b;
    b.kind = Behaviour::Kind::Terminator;
    b.target_sequencer = std::move(target);
    return b;
}

Behaviour producer(std::string buffer) {
    Behaviour b;
    b.kind = Behaviour::Kind::Producer;
    b.buffer = std::move(buffer);
    return b;
}

Behaviour consumer(std::string buffer) {
    Behaviour b;
    b.kind = Behaviour::Kind::Consumer;
    b.buffer = std::move(buffer);
    return b;
}

/// A single mission controlling two managed threads that exchange items
/// through a shared one-place buffer.
Topology two_thread_buffer() {
    Topology t;
    t.name = "two-thread-buffer";
    t.root.id = "top";
    MissionNode m;
    m.id = "m1";
    m.buffers = {"buf"};
    m.schedulables.push_back(thread("writer", producer("buf")));
    m.schedulables.push_back(thread("reader", consumer("buf")));
    t.root.missions.push_back(std::move(m));
    t.validate();
    return t;
}

/// Three operating modes run in sequence by one sequencer; the first mode
/// also carries a persistent monitoring handler. Each mode owns a worker
/// plus a mode-change requester (a mission-local terminator).
Topology shuttle() {
    Topology t;
    t.name = "shuttle";
    t.root.id = "shuttleSeq";
    const char* modes[3] = {"ascent", "orbit", "reentry"};
    for (int i = 0; i < 3; ++i) {
        MissionNode m;
        m.id = modes[i];
        m.schedulables.push_back(thread(std::string(modes[i]) + "Ctrl", workloop(1, true)));
        m.schedulables.push_back(thread(std::string(modes[i]) + "ModeChange", terminator()));
        if (i == 0)
            m.schedulables.push_back(
                handler("envMonitor", HandlerKind::Periodic, workloop(1, false)));
        t.root.missions.push_back(std::move(m));
    }
    t.validate();
    return t;
}

/// Two independently developed on-board subsystems realised as nested
/// sequencers registered to the main train mission.
Topology railway() {
    Topology t;
    t.name = "railway";
    t.root.id = "trainSeq";
    MissionNode train;
    train.id = "trainMission";

    SequencerNode comms;
    comms.id = "commsSeq";
    MissionNode cm;
    cm.id = "commsMission";
    cm.schedulables.push_back(thread("radioLink", workloop(1, true)));
    cm.schedulables.push_back(thread("commsStop", terminator()));
    comms.missions.push_back(std::move(cm));

    SequencerNode nav;
    nav.id = "navSeq";
    MissionNode nm;
    nm.id = "navMission";
    nm.schedulables.push_back(thread("positionTracker", workloop(2, true)));
    nav.missions.push_back(std::move(nm));

    train.schedulables.push_back(nested(std::move(comms)));
    train.schedulables.push_back(nested(std::move(nav)));
    t.root.missions.push_back(std::move(train));
    t.validate();
    return t;
}

/// Two nested subsystems under a main mission; subsystem one carries a
/// terminator aimed at the top-level sequencer (rewrite it for the proposed
/// protocol, where such requests are confined to the local mission).
Topology nested_pair() {
    Topology t;
    t.name = "nested-pair";
    t.root.id = "top";
    MissionNode main_mission;
    main_mission.id = "mainMission";

    SequencerNode sub1;
    sub1.id = "sub1Seq";
    MissionNode a;
    a.id = "subMissionA";
    a.schedulables.push_back(thread("alphaStop", terminator("top")));
    a.schedulables.push_back(thread("alphaWork", workloop(1, false)));
    sub1.missions.push_back(std::move(a));

    SequencerNode sub2;
    sub2.id = "sub2Seq";
    MissionNode b;
    b.id = "subMissionB";
    b.schedulables.push_back(thread("betaWork", workloop(1, true)));
    sub2.missions.push_back(std::move(b));

    main_mission.schedulables.push_back(nested(std::move(sub1)));
    main_mission.schedulables.push_back(nested(std::move(sub2)));
    t.root.missions.push_back(std::move(main_mission));
    t.validate();
    return t;
}

} // namespace

Topology builtin_topology(const std::string& name) {
    if (name == "two-thread-buffer") return two_thread_buffer();
    if (name == "shuttle") return shuttle();
    if (name == "railway") return railway();
    if (name == "nested-pair") return nested_pair();
    throw ValidationError("unknown builtin topology '" + name + "'");
}

std::vector<std::string> builtin_topology_names() {
    return {"two-thread-buffer", "shuttle", "railway", "nested-pair"};
}

std::string to_string(ProtocolVariant v) {
    return v == ProtocolVariant::Current ? "current" : "proposed";
}

} // namespace mk2::scj
