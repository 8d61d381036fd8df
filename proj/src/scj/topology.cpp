#include "mk2/scj/topology.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_set>

#include "mk2/errors.hpp"

namespace mk2::scj {

namespace {

// Topology ids become atoms of the generated model, so they must not collide
// with generated atoms, input binders, or keywords of the model language.
const std::unordered_set<std::string> kReservedIds = {
    "nullMissionId", "d0", "d1", "true", "false", "bool",
    "next", "x", "s", "continueReturn", "continueSequencer", "missionTerminating",
    "missionIsActive",
    "cmodel", "domain", "channel", "var", "process", "main", "if", "then", "fi",
    "Skip", "Stop", "not", "and", "or", "sequencer", "mission", "thread", "handler", "buffer",
};

void check_behaviour(const Behaviour& b, const std::string& id, const MissionNode& mission,
                     const std::set<std::string>& sequencer_ids) {
    switch (b.kind) {
    case Behaviour::Kind::WorkLoop:
        if (b.steps < 1 || b.steps > 3)
            throw ValidationError("workloop steps of '" + id + "' must lie in 1..3");
        break;
    case Behaviour::Kind::Terminator:
        if (!b.target_sequencer.empty() && !sequencer_ids.count(b.target_sequencer))
            throw ValidationError("terminator '" + id + "' targets unknown sequencer '" +
                                  b.target_sequencer + "'");
        break;
    case Behaviour::Kind::Producer:
    case Behaviour::Kind::Consumer:
        if (std::find(mission.buffers.begin(), mission.buffers.end(), b.buffer) ==
            mission.buffers.end())
            throw ValidationError("schedulable '" + id + "' uses buffer '" + b.buffer +
                                  "' which is not declared in mission '" + mission.id + "'");
        break;
    }
}

} // namespace

void Topology::validate() const {
    std::set<std::string> ids;
    std::set<std::string> sequencer_ids;
    auto claim = [&ids](const std::string& id, const char* what) {
        if (id.empty()) throw ValidationError(std::string(what) + " with empty id");
        if (kReservedIds.count(id))
            throw ValidationError("id '" + id + "' is reserved");
        if (!ids.insert(id).second)
            throw ValidationError("duplicate id '" + id + "' in topology");
    };

    std::function<void(const SequencerNode&)> collect_seq = [&](const SequencerNode& s) {
        sequencer_ids.insert(s.id);
        for (const auto& m : s.missions)
            for (const auto& sch : m.schedulables)
                if (sch.kind == SchedulableNode::Kind::NestedSequencer && sch.nested)
                    collect_seq(*sch.nested);
    };
    collect_seq(root);

    std::function<void(const SequencerNode&)> walk = [&](const SequencerNode& s) {
        claim(s.id, "sequencer");
        for (const auto& m : s.missions) {
            claim(m.id, "mission");
            for (const auto& b : m.buffers) claim(b, "buffer");
            for (const auto& sch : m.schedulables) {
                switch (sch.kind) {
                case SchedulableNode::Kind::Thread:
                    claim(sch.id, "thread");
                    check_behaviour(sch.behaviour, sch.id, m, sequencer_ids);
                    break;
                case SchedulableNode::Kind::Handler:
                    claim(sch.id, "handler");
                    check_behaviour(sch.behaviour, sch.id, m, sequencer_ids);
                    break;
                case SchedulableNode::Kind::NestedSequencer:
                    if (!sch.nested)
                        throw ValidationError("nested sequencer entry without a sequencer node");
                    if (!sch.id.empty() && sch.id != sch.nested->id)
                        throw ValidationError("nested sequencer id mismatch at '" + sch.id + "'");
                    walk(*sch.nested);
                    break;
                }
            }
        }
    };
    walk(root);
}

namespace {
void rewrite_node(SequencerNode& s) {
    for (auto& m : s.missions)
        for (auto& sch : m.schedulables) {
            if (sch.kind == SchedulableNode::Kind::NestedSequencer && sch.nested) {
                rewrite_node(*sch.nested);
            } else if (sch.behaviour.kind == Behaviour::Kind::Terminator &&
                       !sch.behaviour.target_sequencer.empty()) {
                sch.behaviour.target_sequencer.clear();
                sch.behaviour.stops_sequence = true;
            }
        }
}

bool named_in(const SequencerNode& s) {
    for (const auto& m : s.missions)
        for (const auto& sch : m.schedulables) {
            if (sch.kind == SchedulableNode::Kind::NestedSequencer && sch.nested) {
                if (named_in(*sch.nested)) return true;
            } else if (sch.behaviour.kind == Behaviour::Kind::Terminator &&
                       !sch.behaviour.target_sequencer.empty()) {
                return true;
            }
        }
    return false;
}

SequencerNode deep_copy(const SequencerNode& s) {
    SequencerNode out;
    out.id = s.id;
    for (const auto& m : s.missions) {
        MissionNode nm;
        nm.id = m.id;
        nm.buffers = m.buffers;
        for (const auto& sch : m.schedulables) {
            SchedulableNode ns = sch;
            if (sch.nested) ns.nested = std::make_shared<SequencerNode>(deep_copy(*sch.nested));
            nm.schedulables.push_back(std::move(ns));
        }
        out.missions.push_back(std::move(nm));
    }
    return out;
}
} // namespace

Topology Topology::rewritten_for_proposed() const {
    Topology t;
    t.name = name;
    t.root = deep_copy(root);
    rewrite_node(t.root);
    return t;
}

bool Topology::has_named_terminator() const { return named_in(root); }

} // namespace mk2::scj
