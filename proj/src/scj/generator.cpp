#include "mk2/scj/generator.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "mk2/errors.hpp"

namespace mk2::scj {

using model::Atom;
using model::ChannelId;
using model::CommPart;
using model::DomainId;
using model::Expr;
using model::ExprPtr;
using model::ModelDefs;
using model::Term;
using model::TermPtr;

namespace {

// Channel families that are indexed by the nesting depth of the mission (or
// schedulable) they serve. Reusing one channel across depths would force
// unrelated tiers to synchronise, since synchronisation sets are
// channel-granular.
enum class Fam {
    StartMission,
    InitializeRet,
    DoneMission,
    RequestTermination,
    RequestTerminationApp,
    TerminationPending,
    MissionActive,
    EndMissionApp,
    DismissMission,
    StartSched,
    SigCall,
    SigRet,
    DoneSched,
    CleanupSchedCall,
    CleanupSchedRet,
    DismissSched,
};

const char* fam_base_name(Fam f) {
    switch (f) {
    case Fam::StartMission: return "start_mission";
    case Fam::InitializeRet: return "initializeRet";
    case Fam::DoneMission: return "done_mission";
    case Fam::RequestTermination: return "requestTermination";
    case Fam::RequestTerminationApp: return "requestTerminationApp";
    case Fam::TerminationPending: return "terminationPending";
    case Fam::MissionActive: return "missionActive";
    case Fam::EndMissionApp: return "end_mission_app";
    case Fam::DismissMission: return "dismiss_mission";
    case Fam::StartSched: return "start_sched";
    case Fam::SigCall: return "signalTerminationCall";
    case Fam::SigRet: return "signalTerminationRet";
    case Fam::DoneSched: return "done_sched";
    case Fam::CleanupSchedCall: return "cleanupSchedulableCall";
    case Fam::CleanupSchedRet: return "cleanupSchedulableRet";
    case Fam::DismissSched: return "dismiss_sched";
    }
    return "?";
}

struct Net {
    TermPtr term;
    std::set<std::string> writes;
};

class Generator {
  public:
    Generator(const Topology& t, ProtocolVariant v) : topo_(t), variant_(v) {}

    ModelBundle run() {
        topo_.validate();
        if (variant_ == ProtocolVariant::Proposed && topo_.has_named_terminator())
            throw ValidationError(
                "topology has a named-sequencer terminator, which the proposed protocol "
                "does not support (rewrite it to a mission-local request first)");

        collect();
        declare_domains();
        declare_channels();
        declare_variables();
        define_buffers();
        define_schedulables();
        define_missions();
        define_sequencers();
        if (current()) define_environment();
        compose();
        build_event_index();

        bundle_.defs.validate();
        bundle_.variant = variant_;
        bundle_.topology_name = topo_.name;
        return std::move(bundle_);
    }

  private:
    bool current() const { return variant_ == ProtocolVariant::Current; }

    // --- topology walk --------------------------------------------------------

    struct SeqInfo {
        const SequencerNode* node;
        int depth;                 // depth of its missions
        std::string parent_mission; // empty for the root
    };
    struct MissionInfo {
        const MissionNode* node;
        int depth;
        std::string sequencer;
    };
    struct SchedInfo {
        const SchedulableNode* node;
        int depth;
        std::string mission;
    };

    void collect() {
        std::function<void(const SequencerNode&, int, const std::string&)> walk_seq =
            [&](const SequencerNode& s, int depth, const std::string& parent_mission) {
                seqs_.push_back({&s, depth, parent_mission});
                for (const auto& m : s.missions) {
                    missions_.push_back({&m, depth, s.id});
                    for (const auto& b : m.buffers) buffers_.emplace_back(b, m.id);
                    for (const auto& sch : m.schedulables) {
                        scheds_.push_back({&sch, depth, m.id});
                        if (sch.kind == SchedulableNode::Kind::NestedSequencer)
                            walk_seq(*sch.nested, depth + 1, m.id);
                    }
                }
            };
        walk_seq(topo_.root, 0, "");
        max_depth_ = 0;
        for (const auto& m : missions_) max_depth_ = std::max(max_depth_, m.depth);
    }

    const MissionInfo& mission_info(const std::string& id) const {
        for (const auto& m : missions_)
            if (m.node->id == id) return m;
        throw ValidationError("unknown mission '" + id + "'");
    }

    // --- declarations -----------------------------------------------------------

    void declare_domains() {
        std::vector<std::string> seq_ids;
        for (const auto& s : seqs_) seq_ids.push_back(s.node->id);
        dom_seq_ = defs().add_symbol_domain("SequencerID", seq_ids);

        std::vector<std::string> mission_ids;
        for (const auto& m : missions_) mission_ids.push_back(m.node->id);
        mission_ids.push_back("nullMissionId");
        dom_mission_ = defs().add_symbol_domain("MissionID", mission_ids);

        if (!scheds_.empty()) {
            std::vector<std::string> sched_ids;
            for (const auto& s : scheds_) sched_ids.push_back(s.node->id);
            dom_sched_ = defs().add_symbol_domain("SchedID", sched_ids);
            for (const auto& m : missions_) {
                if (m.node->schedulables.empty()) continue;
                std::vector<std::string> ids;
                for (const auto& sch : m.node->schedulables) ids.push_back(sch.id);
                sched_dom_[m.node->id] = defs().add_symbol_domain("Scheds_" + m.node->id, ids);
            }
        }
        if (!buffers_.empty()) {
            std::vector<std::string> buf_ids;
            for (const auto& [b, m] : buffers_) buf_ids.push_back(b);
            dom_buf_ = defs().add_symbol_domain("BufferID", buf_ids);
            dom_data_ = defs().add_symbol_domain("Data", {"d0", "d1"});
        }
    }

    std::string fam_name(Fam f, int depth) const {
        std::string n = fam_base_name(f);
        if (depth > 0) n += "_" + std::to_string(depth);
        return n;
    }

    void declare_channels() {
        gnm_call_ = defs().add_channel("getNextMissionCall", {dom_seq_});
        gnm_ret_ = defs().add_channel("getNextMissionRet", {dom_seq_, dom_mission_});
        end_seq_app_ = defs().add_channel("end_seq_app", {dom_seq_});
        begin_termination_ = defs().add_channel("begin_termination", {dom_mission_});
        cleanup_mission_call_ = defs().add_channel("cleanupMissionCall", {dom_mission_});
        cleanup_mission_ret_ =
            current() ? defs().add_channel("cleanupMissionRet", {dom_mission_})
                      : defs().add_channel("cleanupMissionRet", {dom_mission_, model::kBoolDomain});
        end_termination_ = defs().add_channel("end_termination", {dom_seq_});
        end_terminations_ = defs().add_channel("end_terminations", {dom_seq_});
        if (current()) {
            rst_ = defs().add_channel("requestSequenceTermination", {dom_seq_});
            end_rst_ = defs().add_channel("end_rst");
        }

        for (int d = 0; d <= max_depth_; ++d) {
            auto add = [&](Fam f, std::vector<DomainId> params) {
                fam_chan_[{f, d}] = defs().add_channel(fam_name(f, d), std::move(params));
            };
            add(Fam::StartMission, {dom_mission_});
            add(Fam::InitializeRet, {dom_mission_});
            if (current()) add(Fam::DoneMission, {dom_mission_});
            else add(Fam::DoneMission, {dom_mission_, model::kBoolDomain});
            add(Fam::RequestTermination, {dom_mission_});
            add(Fam::RequestTerminationApp, {dom_mission_});
            add(Fam::TerminationPending, {dom_mission_, model::kBoolDomain});
            add(Fam::MissionActive, {dom_mission_, model::kBoolDomain});
            add(Fam::EndMissionApp, {dom_mission_});
            add(Fam::DismissMission, {dom_mission_});
            if (!scheds_.empty()) {
                add(Fam::StartSched, {dom_sched_});
                add(Fam::SigCall, {dom_sched_});
                add(Fam::SigRet, {dom_sched_});
                add(Fam::DoneSched, {dom_sched_});
                add(Fam::CleanupSchedCall, {dom_sched_});
                add(Fam::CleanupSchedRet, {dom_sched_});
                add(Fam::DismissSched, {dom_sched_});
            }
        }

        bool any_work = false, any_fire = false;
        for (const auto& s : scheds_) {
            if (s.node->kind == SchedulableNode::Kind::Handler) any_fire = true;
            if (s.node->kind != SchedulableNode::Kind::NestedSequencer) any_work = true;
        }
        if (any_work) work_ = defs().add_channel("work", {dom_sched_});
        if (any_fire) fire_ = defs().add_channel("fire", {dom_sched_});
        if (!buffers_.empty()) {
            put_ = defs().add_channel("put", {dom_buf_, dom_data_});
            get_ = defs().add_channel("get", {dom_buf_, dom_data_});
        }
    }

    void declare_variables() {
        for (const auto& s : seqs_) {
            const std::string& id = s.node->id;
            defs().add_variable("currentMission_" + id, dom_mission_, atom("nullMissionId"));
            if (s.parent_mission.empty()) {
                if (current())
                    defs().add_variable("terminating_" + id, model::kBoolDomain,
                                        Atom::boolean(false));
                else
                    defs().add_variable("continue_" + id, model::kBoolDomain, Atom::boolean(true));
            } else if (current()) {
                defs().add_variable("terminatingAbove_" + id, model::kBoolDomain,
                                    Atom::boolean(false));
                defs().add_variable("terminatingBelow_" + id, model::kBoolDomain,
                                    Atom::boolean(false));
            } else {
                defs().add_variable("continueAbove_" + id, model::kBoolDomain,
                                    Atom::boolean(true));
                defs().add_variable("continueBelow_" + id, model::kBoolDomain,
                                    Atom::boolean(true));
            }
        }
        for (const auto& m : missions_) {
            defs().add_variable("termPending_" + m.node->id, model::kBoolDomain,
                                Atom::boolean(false));
            defs().add_variable("missionActive_" + m.node->id, model::kBoolDomain,
                                Atom::boolean(false));
            if (!current() && mission_stops_sequence(*m.node))
                defs().add_variable("stopSeq_" + m.node->id, model::kBoolDomain,
                                    Atom::boolean(false));
        }
        for (const auto& s : scheds_) {
            if (s.node->kind == SchedulableNode::Kind::Handler)
                defs().add_variable("enabled_" + s.node->id, model::kBoolDomain,
                                    Atom::boolean(true));
        }
        for (const auto& [b, m] : buffers_)
            defs().add_variable("bufval_" + b, dom_data_, atom("d0"));
    }

    static bool mission_stops_sequence(const MissionNode& m) {
        for (const auto& sch : m.schedulables)
            if (sch.behaviour.kind == Behaviour::Kind::Terminator &&
                sch.behaviour.stops_sequence)
                return true;
        return false;
    }

    // --- term-building helpers ---------------------------------------------------

    ModelDefs& defs() { return bundle_.defs; }

    Atom atom(const std::string& name) {
        return Atom::symbol(defs().symbols.intern(name));
    }
    ExprPtr lit(const std::string& name) { return Expr::make_lit(atom(name)); }
    ExprPtr lit(const char* name) { return lit(std::string(name)); }
    static ExprPtr lit(bool b) { return Expr::make_lit(Atom::boolean(b)); }
    static ExprPtr var(const std::string& name) { return Expr::make_var(name); }
    static ExprPtr eq(ExprPtr a, ExprPtr b) {
        return Expr::make_binary(Expr::Kind::Eq, std::move(a), std::move(b));
    }
    static ExprPtr ne(ExprPtr a, ExprPtr b) {
        return Expr::make_binary(Expr::Kind::Ne, std::move(a), std::move(b));
    }
    static ExprPtr conj(ExprPtr a, ExprPtr b) {
        return Expr::make_binary(Expr::Kind::And, std::move(a), std::move(b));
    }
    static ExprPtr disj(ExprPtr a, ExprPtr b) {
        return Expr::make_binary(Expr::Kind::Or, std::move(a), std::move(b));
    }
    static ExprPtr neg(ExprPtr a) { return Expr::make_unary(Expr::Kind::Not, std::move(a)); }

    static CommPart dot(ExprPtr e) {
        CommPart p;
        p.kind = CommPart::Kind::Dot;
        p.expr = std::move(e);
        return p;
    }
    static CommPart out(ExprPtr e) {
        CommPart p;
        p.kind = CommPart::Kind::Out;
        p.expr = std::move(e);
        return p;
    }
    static CommPart in(const std::string& binder) {
        CommPart p;
        p.kind = CommPart::Kind::In;
        p.binder = binder;
        return p;
    }

    static TermPtr px(ChannelId ch, std::vector<CommPart> parts, TermPtr body) {
        model::Comm c;
        c.channel = ch;
        c.parts = std::move(parts);
        return model::make_prefix(std::move(c), std::move(body));
    }
    TermPtr event(ChannelId ch, const std::string& id, TermPtr body) {
        return px(ch, {dot(lit(id))}, std::move(body));
    }
    ChannelId chan(Fam f, int depth) const { return fam_chan_.at({f, depth}); }

    static TermPtr skip() { return model::make_skip(); }
    static TermPtr seq(std::vector<TermPtr> ts) { return model::make_seq_all(std::move(ts)); }
    static TermPtr choice(std::vector<TermPtr> ts) {
        TermPtr acc = ts.front();
        for (std::size_t i = 1; i < ts.size(); ++i)
            acc = model::make_ext_choice(acc, ts[i]);
        return acc;
    }
    static TermPtr asgn(const std::string& v, ExprPtr e) {
        return model::make_assign({v}, {std::move(e)});
    }
    static TermPtr cond2(ExprPtr p1, TermPtr t1, ExprPtr p2, TermPtr t2) {
        return model::make_cond({{std::move(p1), std::move(t1)}, {std::move(p2), std::move(t2)}});
    }
    static TermPtr ref(const std::string& name) { return model::make_ref(name); }

    void define(const std::string& name, TermPtr body) { defs().add_process(name, body); }

    /// Iterated interleave over a mission's schedulable set, or Skip.
    TermPtr for_each_sched(const MissionNode& m, const std::function<TermPtr(ExprPtr)>& body) {
        if (m.schedulables.empty()) return skip();
        return model::make_iter_interleave("s", sched_dom_.at(m.id), body(var("s")));
    }

    // --- buffer processes ---------------------------------------------------------

    void define_buffers() {
        for (const auto& [b, mid] : buffers_) {
            int e = mission_info(mid).depth;
            ChannelId end_app = chan(Fam::EndMissionApp, e);
            TermPtr empty_side = choice({
                px(put_, {dot(lit(b)), in("x")},
                   seq({asgn("bufval_" + b, var("x")), ref("BufferFull_" + b)})),
                event(end_app, mid, skip()),
            });
            TermPtr full_side = choice({
                px(get_, {dot(lit(b)), out(var("bufval_" + b))}, ref("BufferEmpty_" + b)),
                event(end_app, mid, skip()),
            });
            define("BufferEmpty_" + b, empty_side);
            define("BufferFull_" + b, full_side);
        }
    }

    // --- schedulable processes -------------------------------------------------------

    void define_schedulables() {
        for (const auto& s : scheds_) {
            if (s.node->kind == SchedulableNode::Kind::NestedSequencer) continue;
            define_sched_tail(*s.node, s.depth);
            if (s.node->kind == SchedulableNode::Kind::Thread)
                define_thread(*s.node, s.depth, s.mission);
            else
                define_handler(*s.node, s.depth, s.mission);
        }
    }

    void define_sched_tail(const SchedulableNode& n, int e) {
        const std::string& id = n.id;
        define("SchedDone_" + id,
               event(chan(Fam::DoneSched, e), id,
                     event(chan(Fam::CleanupSchedCall, e), id,
                           event(chan(Fam::CleanupSchedRet, e), id, skip()))));
        define("AwaitSignal_" + id,
               event(chan(Fam::SigCall, e), id,
                     event(chan(Fam::SigRet, e), id, ref("SchedDone_" + id))));
    }

    TermPtr poll_or(const std::string& mission, TermPtr again, TermPtr stop) {
        return cond2(eq(var("termPending_" + mission), lit(false)), std::move(again),
                     eq(var("termPending_" + mission), lit(true)), std::move(stop));
    }

    void define_thread(const SchedulableNode& n, int e, const std::string& mission) {
        const std::string& id = n.id;
        const Behaviour& b = n.behaviour;
        TermPtr escape = ref("AwaitSignal_" + id);

        switch (b.kind) {
        case Behaviour::Kind::WorkLoop: {
            TermPtr next = b.checks_termination
                               ? poll_or(mission, ref("ThreadBody_" + id), escape)
                               : ref("ThreadBody_" + id);
            TermPtr burst = next;
            for (int i = 0; i < b.steps; ++i) burst = event(work_, id, burst);
            define("ThreadBody_" + id, choice({escape, burst}));
            break;
        }
        case Behaviour::Kind::Producer: {
            TermPtr put0 = px(put_, {dot(lit(b.buffer)), out(lit("d0"))},
                              poll_or(mission, ref("ThreadBodyAlt_" + id), escape));
            TermPtr put1 = px(put_, {dot(lit(b.buffer)), out(lit("d1"))},
                              poll_or(mission, ref("ThreadBody_" + id), escape));
            define("ThreadBody_" + id, choice({escape, put0}));
            define("ThreadBodyAlt_" + id, choice({escape, put1}));
            break;
        }
        case Behaviour::Kind::Consumer: {
            TermPtr take = px(get_, {dot(lit(b.buffer)), in("x")},
                              event(work_, id, poll_or(mission, ref("ThreadBody_" + id), escape)));
            define("ThreadBody_" + id, choice({escape, take}));
            break;
        }
        case Behaviour::Kind::Terminator: {
            define("ThreadBody_" + id,
                   event(work_, id, request_own_mission(b, e, mission, escape)));
            break;
        }
        }
        define("ThreadApp_" + id,
               choice({event(chan(Fam::StartSched, e), id, ref("ThreadBody_" + id)),
                       event(chan(Fam::DismissSched, e), id, skip())}));
    }

    void define_handler(const SchedulableNode& n, int e, const std::string& mission) {
        const std::string& id = n.id;
        const Behaviour& b = n.behaviour;
        TermPtr escape = ref("AwaitSignal_" + id);

        TermPtr after;
        if (n.handler_kind == HandlerKind::OneShot) {
            after = escape;
        } else if (b.kind == Behaviour::Kind::WorkLoop && b.checks_termination) {
            after = poll_or(mission, ref("HandlerBody_" + id), escape);
        } else {
            after = ref("HandlerBody_" + id);
        }

        TermPtr release;
        switch (b.kind) {
        case Behaviour::Kind::WorkLoop: {
            release = after;
            for (int i = 0; i < b.steps; ++i) release = event(work_, id, release);
            break;
        }
        case Behaviour::Kind::Producer:
            release = choice({escape, px(put_, {dot(lit(b.buffer)), out(lit("d0"))}, after)});
            break;
        case Behaviour::Kind::Consumer:
            release = choice(
                {escape, px(get_, {dot(lit(b.buffer)), in("x")}, event(work_, id, after))});
            break;
        case Behaviour::Kind::Terminator:
            release = event(work_, id, request_own_mission(b, e, mission, escape));
            break;
        }

        define("HandlerBody_" + id,
               choice({escape, model::make_guard(eq(var("enabled_" + id), lit(true)),
                                                 event(fire_, id, release))}));
        define("HandlerApp_" + id,
               choice({event(chan(Fam::StartSched, e), id, ref("HandlerBody_" + id)),
                       event(chan(Fam::DismissSched, e), id, skip())}));
    }

    /// Terminator action: request this mission's termination (setting the
    /// sequence-stop flag first when asked to), then wait to be signalled.
    /// A named-sequencer target is not requested by the thread itself: under
    /// the current protocol requestSequenceTermination is available from the
    /// environment process at any point of the sequencer's window, which
    /// covers this thread's single request.
    TermPtr request_own_mission(const Behaviour& b, int e, const std::string& mission,
                                TermPtr park) {
        if (!b.target_sequencer.empty()) return park;
        TermPtr req = event(chan(Fam::RequestTerminationApp, e), mission, std::move(park));
        if (b.stops_sequence && !current())
            return seq({asgn("stopSeq_" + mission, lit(true)), req});
        return req;
    }

    // --- mission processes -----------------------------------------------------------

    void define_missions() {
        for (const auto& m : missions_) define_mission(*m.node, m.depth);
    }

    void define_mission(const MissionNode& m, int e) {
        const std::string& id = m.id;
        ChannelId end_app = chan(Fam::EndMissionApp, e);
        ChannelId rt = chan(Fam::RequestTermination, e);
        ChannelId rt_app = chan(Fam::RequestTerminationApp, e);

        // Termination receiver: accepts the first request, kicks the
        // lifecycle, then absorbs repeated requests until the mission's
        // application side is wound up.
        define("TerminationAbsorb_" + id,
               choice({event(rt, id, ref("TerminationAbsorb_" + id)),
                       event(rt_app, id, ref("TerminationAbsorb_" + id)),
                       event(end_app, id, skip())}));
        TermPtr kick = seq({asgn("termPending_" + id, lit(true)),
                            event(begin_termination_, id, ref("TerminationAbsorb_" + id))});
        define("TerminationReceiver_" + id,
               choice({event(rt, id, kick), event(rt_app, id, kick), event(end_app, id, skip())}));

        // State queries used by the sequencer-side termination actions.
        define("MissionState_" + id,
               choice({px(chan(Fam::TerminationPending, e), {dot(lit(id)), out(var("termPending_" + id))},
                          ref("MissionState_" + id)),
                       px(chan(Fam::MissionActive, e), {dot(lit(id)), out(var("missionActive_" + id))},
                          ref("MissionState_" + id)),
                       event(end_app, id, skip())}));

        // Application side of the mission: answers cleanUp() and reports
        // whether the sequencer should continue (proposed protocol only).
        TermPtr cleanup_ret;
        if (current()) {
            cleanup_ret = event(cleanup_mission_ret_, id, event(end_app, id, skip()));
        } else {
            ExprPtr cont = mission_stops_sequence(m) ? neg(var("stopSeq_" + id)) : lit(true);
            cleanup_ret = px(cleanup_mission_ret_, {dot(lit(id)), out(cont)},
                             event(end_app, id, skip()));
        }
        define("MissionApp_" + id, choice({event(cleanup_mission_call_, id, cleanup_ret),
                                           event(end_app, id, skip())}));

        // Framework lifecycle: initialisation, execution, termination
        // sequence, cleanup, completion report.
        TermPtr start_scheds = for_each_sched(
            m, [&](ExprPtr s) { return px(chan(Fam::StartSched, e), {dot(s)}, skip()); });
        TermPtr signal_all = for_each_sched(m, [&](ExprPtr s) {
            return px(chan(Fam::SigCall, e), {dot(s)},
                      px(chan(Fam::SigRet, e), {dot(s)}, skip()));
        });
        std::vector<TermPtr> disable;
        for (const auto& sch : m.schedulables)
            if (sch.kind == SchedulableNode::Kind::Handler)
                disable.push_back(asgn("enabled_" + sch.id, lit(false)));
        TermPtr disable_all = disable.empty() ? skip() : seq(std::move(disable));
        TermPtr wait_all = for_each_sched(
            m, [&](ExprPtr s) { return px(chan(Fam::DoneSched, e), {dot(s)}, skip()); });
        TermPtr cleanup_scheds = for_each_sched(m, [&](ExprPtr s) {
            return px(chan(Fam::CleanupSchedCall, e), {dot(s)},
                      px(chan(Fam::CleanupSchedRet, e), {dot(s)}, skip()));
        });

        TermPtr finish;
        if (current()) {
            finish = event(cleanup_mission_call_, id,
                           event(cleanup_mission_ret_, id,
                                 event(chan(Fam::DoneMission, e), id, skip())));
        } else {
            finish = event(cleanup_mission_call_, id,
                           px(cleanup_mission_ret_, {dot(lit(id)), in("continueSequencer")},
                              px(chan(Fam::DoneMission, e),
                                 {dot(lit(id)), out(var("continueSequencer"))}, skip())));
        }

        TermPtr lifecycle = event(
            chan(Fam::StartMission, e), id,
            event(chan(Fam::InitializeRet, e), id,
                  seq({asgn("missionActive_" + id, lit(true)), start_scheds,
                       event(begin_termination_, id,
                             seq({signal_all, disable_all, wait_all,
                                  asgn("missionActive_" + id, lit(false)), cleanup_scheds,
                                  finish}))})));
        TermPtr dismiss =
            event(chan(Fam::DismissMission, e), id,
                  for_each_sched(m, [&](ExprPtr s) {
                      return px(chan(Fam::DismissSched, e), {dot(s)}, skip());
                  }));
        define("MissionFW_" + id, choice({lifecycle, dismiss}));
    }

    // --- sequencer processes -----------------------------------------------------------

    void define_sequencers() {
        for (const auto& s : seqs_) {
            define_walker(s);
            if (s.parent_mission.empty()) {
                if (current()) define_tlms_current(s);
                else define_tlms_proposed(s);
            } else {
                if (current()) define_sms_current(s);
                else define_sms_proposed(s);
            }
        }
    }

    /// Application-side mission source: yields the mission list in order,
    /// then nullMissionId; on shutdown it dismisses the missions that were
    /// never started.
    void define_walker(const SeqInfo& s) {
        const std::string& id = s.node->id;
        int d = s.depth;
        std::size_t n = s.node->missions.size();
        for (std::size_t k = 0; k <= n; ++k) {
            std::string name = walker_name(id, k);
            std::vector<TermPtr> dismissals;
            for (std::size_t j = k; j < n; ++j) {
                const std::string& mid = s.node->missions[j].id;
                dismissals.push_back(event(chan(Fam::DismissMission, d), mid,
                                           event(chan(Fam::EndMissionApp, d), mid, skip())));
            }
            TermPtr shutdown = event(end_seq_app_, id,
                                     dismissals.empty() ? skip() : seq(std::move(dismissals)));
            std::string yielded =
                k < n ? s.node->missions[k].id : std::string("nullMissionId");
            std::string next_name = k < n ? walker_name(id, k + 1) : name;
            TermPtr serve = px(gnm_call_, {dot(lit(id))},
                               px(gnm_ret_, {dot(lit(id)), out(lit(yielded))}, ref(next_name)));
            define(name, choice({serve, shutdown}));
        }
    }

    static std::string walker_name(const std::string& id, std::size_t k) {
        return k == 0 ? "SequencerApp_" + id : "SequencerApp_" + id + "_" + std::to_string(k);
    }

    void define_tlms_current(const SeqInfo& s) {
        const std::string& id = s.node->id;
        int d = s.depth;
        std::string cm = "currentMission_" + id;
        std::string terminating = "terminating_" + id;

        TermPtr rst_action = choice(
            {px(rst_, {dot(lit(id))},
                seq({asgn(terminating, lit(true)),
                     px(chan(Fam::TerminationPending, d), {dot(var(cm)), in("missionTerminating")},
                        px(chan(Fam::MissionActive, d), {dot(var(cm)), in("missionIsActive")},
                           seq({cond2(conj(eq(var("missionTerminating"), lit(false)),
                                           eq(var("missionIsActive"), lit(true))),
                                      px(chan(Fam::RequestTermination, d), {dot(var(cm))}, skip()),
                                      disj(eq(var("missionTerminating"), lit(true)),
                                           eq(var("missionIsActive"), lit(false))),
                                      skip()),
                                ref("RequestSequenceTermination_" + id)})))})),
             event(end_termination_, id, skip())});
        define("RequestSequenceTermination_" + id, rst_action);

        TermPtr waiter = px(chan(Fam::DoneMission, d), {dot(var(cm))},
                            event(end_termination_, id, skip()));
        TermPtr exec_par =
            model::make_par(ref("RequestSequenceTermination_" + id), {terminating},
                            {end_termination_}, {}, waiter);
        TermPtr start_mission = cond2(
            ne(var(cm), lit("nullMissionId")),
            px(chan(Fam::StartMission, d), {dot(var(cm))},
               px(chan(Fam::InitializeRet, d), {dot(var(cm))},
                  seq({exec_par, px(chan(Fam::EndMissionApp, d), {dot(var(cm))}, skip())}))),
            eq(var(cm), lit("nullMissionId")), asgn(terminating, lit(true)));
        define("StartMission_" + id, start_mission);

        define("GetNextMission_" + id,
               px(gnm_call_, {dot(lit(id))},
                  px(gnm_ret_, {dot(lit(id)), in("next")},
                     seq({asgn(cm, var("next")), ref("StartMission_" + id),
                          cond2(eq(var(terminating), lit(false)), ref("GetNextMission_" + id),
                                eq(var(terminating), lit(true)), skip())}))));

        define("TopLevelMissionSequencerFW_" + id,
               seq({ref("GetNextMission_" + id),
                    event(end_seq_app_, id, px(end_rst_, {}, skip()))}));
    }

    void define_tlms_proposed(const SeqInfo& s) {
        const std::string& id = s.node->id;
        int d = s.depth;
        std::string cm = "currentMission_" + id;
        std::string cont = "continue_" + id;

        TermPtr start_mission = cond2(
            ne(var(cm), lit("nullMissionId")),
            px(chan(Fam::StartMission, d), {dot(var(cm))},
               px(chan(Fam::DoneMission, d), {dot(var(cm)), in("continueReturn")},
                  seq({asgn(cont, var("continueReturn")),
                       px(chan(Fam::EndMissionApp, d), {dot(var(cm))}, skip())}))),
            eq(var(cm), lit("nullMissionId")), asgn(cont, lit(false)));
        define("StartMission_" + id, start_mission);

        define("GetNextMission_" + id,
               px(gnm_call_, {dot(lit(id))},
                  px(gnm_ret_, {dot(lit(id)), in("next")},
                     seq({asgn(cm, var("next")), ref("StartMission_" + id),
                          cond2(eq(var(cont), lit(true)), ref("GetNextMission_" + id),
                                eq(var(cont), lit(false)), skip())}))));

        define("TopLevelMissionSequencerFW_" + id,
               seq({ref("GetNextMission_" + id), event(end_seq_app_, id, skip())}));
    }

    void define_sms_current(const SeqInfo& s) {
        const std::string& id = s.node->id;
        int d = s.depth;           // depth of this sequencer's missions
        int e = d - 1;             // depth of this sequencer as a schedulable
        std::string cm = "currentMission_" + id;
        std::string ta = "terminatingAbove_" + id;
        std::string tb = "terminatingBelow_" + id;

        TermPtr rst_action = choice(
            {px(rst_, {dot(lit(id))},
                seq({asgn(tb, lit(true)),
                     px(chan(Fam::TerminationPending, d), {dot(var(cm)), in("missionTerminating")},
                        px(chan(Fam::MissionActive, d), {dot(var(cm)), in("missionIsActive")},
                           seq({cond2(conj(eq(var("missionTerminating"), lit(false)),
                                           eq(var("missionIsActive"), lit(true))),
                                      px(chan(Fam::RequestTermination, d), {dot(var(cm))}, skip()),
                                      disj(eq(var("missionTerminating"), lit(true)),
                                           eq(var("missionIsActive"), lit(false))),
                                      skip()),
                                ref("RequestSequenceTermination_" + id)})))})),
             event(end_terminations_, id, skip())});
        define("RequestSequenceTermination_" + id, rst_action);

        define("SignalTermination_" + id,
               choice({event(end_terminations_, id, skip()),
                       px(chan(Fam::SigCall, e), {dot(lit(id))},
                          seq({asgn(ta, lit(true)),
                               px(chan(Fam::RequestTermination, d), {dot(var(cm))},
                                  px(chan(Fam::SigRet, e), {dot(lit(id))},
                                     event(end_terminations_, id, skip())))}))}));

        TermPtr waiter = px(chan(Fam::DoneMission, d), {dot(var(cm))},
                            event(end_terminations_, id, skip()));
        TermPtr inner = model::make_par(ref("SignalTermination_" + id), {ta},
                                        {end_terminations_}, {tb},
                                        ref("RequestSequenceTermination_" + id));
        TermPtr exec_par =
            model::make_par(inner, {ta, tb}, {end_terminations_}, {}, waiter);
        TermPtr start_mission = cond2(
            ne(var(cm), lit("nullMissionId")),
            px(chan(Fam::StartMission, d), {dot(var(cm))},
               px(chan(Fam::InitializeRet, d), {dot(var(cm))},
                  seq({exec_par, px(chan(Fam::EndMissionApp, d), {dot(var(cm))}, skip())}))),
            eq(var(cm), lit("nullMissionId")), asgn(tb, lit(true)));
        define("StartMission_" + id, start_mission);

        define("GetNextMission_" + id,
               px(gnm_call_, {dot(lit(id))},
                  px(gnm_ret_, {dot(lit(id)), in("next")},
                     seq({asgn(cm, var("next")), ref("StartMission_" + id),
                          cond2(conj(eq(var(ta), lit(false)), eq(var(tb), lit(false))),
                                ref("GetNextMission_" + id),
                                disj(eq(var(ta), lit(true)), eq(var(tb), lit(true))),
                                skip())}))));

        define_sms_wrapper(s, cond2(eq(var(ta), lit(false)),
                                    px(chan(Fam::SigCall, e), {dot(lit(id))},
                                       px(chan(Fam::SigRet, e), {dot(lit(id))}, skip())),
                                    eq(var(ta), lit(true)), skip()),
                           /*notify_parent=*/nullptr);
    }

    void define_sms_proposed(const SeqInfo& s) {
        const std::string& id = s.node->id;
        int d = s.depth;
        int e = d - 1;
        std::string cm = "currentMission_" + id;
        std::string ca = "continueAbove_" + id;
        std::string cb = "continueBelow_" + id;

        define("SignalTermination_" + id,
               choice({event(end_terminations_, id, skip()),
                       px(chan(Fam::SigCall, e), {dot(lit(id))},
                          seq({asgn(ca, lit(false)),
                               px(chan(Fam::RequestTermination, d), {dot(var(cm))},
                                  px(chan(Fam::SigRet, e), {dot(lit(id))},
                                     event(end_terminations_, id, skip())))}))}));

        TermPtr waiter = px(chan(Fam::DoneMission, d), {dot(var(cm)), in("continueReturn")},
                            seq({asgn(cb, var("continueReturn")),
                                 event(end_terminations_, id, skip())}));
        TermPtr exec_par = model::make_par(ref("SignalTermination_" + id), {ca},
                                           {end_terminations_}, {cb}, waiter);
        TermPtr start_mission = cond2(
            ne(var(cm), lit("nullMissionId")),
            px(chan(Fam::StartMission, d), {dot(var(cm))},
               px(chan(Fam::InitializeRet, d), {dot(var(cm))},
                  seq({exec_par, px(chan(Fam::EndMissionApp, d), {dot(var(cm))}, skip())}))),
            eq(var(cm), lit("nullMissionId")), asgn(cb, lit(false)));
        define("StartMission_" + id, start_mission);

        define("GetNextMission_" + id,
               px(gnm_call_, {dot(lit(id))},
                  px(gnm_ret_, {dot(lit(id)), in("next")},
                     seq({asgn(cm, var("next")), ref("StartMission_" + id),
                          cond2(conj(eq(var(ca), lit(true)), eq(var(cb), lit(true))),
                                ref("GetNextMission_" + id),
                                disj(eq(var(ca), lit(false)), eq(var(cb), lit(false))),
                                skip())}))));

        // Termination requests pass up one tier: when the sequence is over,
        // ask the controlling mission to terminate as well.
        TermPtr notify = event(chan(Fam::RequestTerminationApp, e), s.parent_mission, skip());
        define_sms_wrapper(s,
                           cond2(eq(var(ca), lit(true)),
                                 px(chan(Fam::SigCall, e), {dot(lit(id))},
                                    px(chan(Fam::SigRet, e), {dot(lit(id))}, skip())),
                                 eq(var(ca), lit(false)), skip()),
                           &notify);
    }

    void define_sms_wrapper(const SeqInfo& s, TermPtr late_signal_absorb,
                            const TermPtr* notify_parent) {
        const std::string& id = s.node->id;
        int e = s.depth - 1;
        std::vector<TermPtr> tail;
        tail.push_back(event(end_seq_app_, id, skip()));
        if (notify_parent) tail.push_back(*notify_parent);
        tail.push_back(late_signal_absorb);
        tail.push_back(event(chan(Fam::DoneSched, e), id,
                             event(chan(Fam::CleanupSchedCall, e), id,
                                   event(chan(Fam::CleanupSchedRet, e), id, skip()))));
        TermPtr run = event(chan(Fam::StartSched, e), id,
                            seq({ref("GetNextMission_" + id), seq(std::move(tail))}));
        TermPtr dismissed =
            event(chan(Fam::DismissSched, e), id, event(end_seq_app_, id, skip()));
        define("SchedulableMissionSequencerFW_" + id, choice({run, dismissed}));
    }

    void define_environment() {
        std::vector<TermPtr> alts;
        for (const auto& s : seqs_)
            alts.push_back(event(rst_, s.node->id, ref("Environment")));
        alts.push_back(px(end_rst_, {}, skip()));
        define("Environment", choice(std::move(alts)));
    }

    // --- write sets and composition ------------------------------------------------

    void collect_writes(const TermPtr& t, std::set<std::string>& out,
                        std::set<std::string>& seen) {
        if (!t) return;
        if (t->kind == Term::Kind::Assign)
            out.insert(t->assign_vars().begin(), t->assign_vars().end());
        if (t->kind == Term::Kind::Ref) {
            if (seen.insert(t->ref_name()).second)
                if (const auto* p = defs().find_process(t->ref_name()))
                    collect_writes(p->body, out, seen);
            return;
        }
        collect_writes(t->left, out, seen);
        collect_writes(t->right, out, seen);
        for (const auto& [pred, body] : t->branches()) collect_writes(body, out, seen);
    }

    Net proc_net(const std::string& name) {
        Net n;
        n.term = ref(name);
        std::set<std::string> seen;
        collect_writes(n.term, n.writes, seen);
        return n;
    }

    static Net par_net(Net l, Net r, std::vector<ChannelId> sync) {
        Net n;
        n.term = model::make_par(l.term, {l.writes.begin(), l.writes.end()}, std::move(sync),
                                 {r.writes.begin(), r.writes.end()}, r.term);
        n.writes = std::move(l.writes);
        n.writes.insert(r.writes.begin(), r.writes.end());
        return n;
    }

    Net mission_group(const MissionInfo& mi) {
        const MissionNode& m = *mi.node;
        int e = mi.depth;
        ChannelId end_app = chan(Fam::EndMissionApp, e);

        Net infra = par_net(proc_net("MissionApp_" + m.id),
                            par_net(proc_net("MissionState_" + m.id),
                                    proc_net("TerminationReceiver_" + m.id), {end_app}),
                            {end_app});
        Net core = par_net(proc_net("MissionFW_" + m.id), infra,
                           {begin_termination_, cleanup_mission_call_, cleanup_mission_ret_});

        bool has_scheds = !m.schedulables.empty();
        bool has_buffers = !m.buffers.empty();
        if (!has_scheds && !has_buffers) return core;

        Net sched_side;
        bool first = true;
        for (const auto& sch : m.schedulables) {
            Net part = sched_net(sch, e);
            sched_side = first ? std::move(part) : par_net(sched_side, part, {});
            first = false;
        }
        if (has_buffers) {
            Net bufs;
            bool bfirst = true;
            for (const auto& [b, mid] : buffers_) {
                if (mid != m.id) continue;
                Net part = proc_net("BufferEmpty_" + b);
                bufs = bfirst ? std::move(part) : par_net(bufs, part, {end_app});
                bfirst = false;
            }
            sched_side = first ? std::move(bufs) : par_net(sched_side, bufs, {put_, get_});
        }

        std::vector<ChannelId> x;
        if (has_scheds) {
            x = {chan(Fam::StartSched, e),        chan(Fam::SigCall, e),
                 chan(Fam::SigRet, e),            chan(Fam::DoneSched, e),
                 chan(Fam::CleanupSchedCall, e),  chan(Fam::CleanupSchedRet, e),
                 chan(Fam::DismissSched, e),      chan(Fam::RequestTerminationApp, e)};
        }
        if (has_buffers) x.push_back(end_app);
        return par_net(core, sched_side, std::move(x));
    }

    Net sched_net(const SchedulableNode& sch, int /*depth*/) {
        switch (sch.kind) {
        case SchedulableNode::Kind::Thread: return proc_net("ThreadApp_" + sch.id);
        case SchedulableNode::Kind::Handler: return proc_net("HandlerApp_" + sch.id);
        case SchedulableNode::Kind::NestedSequencer: {
            const SeqInfo* info = nullptr;
            for (const auto& s : seqs_)
                if (s.node == sch.nested.get()) info = &s;
            return sequencer_group(*info, "SchedulableMissionSequencerFW_" + sch.id);
        }
        }
        throw ValidationError("unreachable schedulable kind");
    }

    Net sequencer_group(const SeqInfo& s, const std::string& fw_process) {
        int d = s.depth;
        Net fw = par_net(proc_net(fw_process), proc_net(walker_name(s.node->id, 0)),
                         {gnm_call_, gnm_ret_, end_seq_app_});
        if (s.node->missions.empty()) return fw;

        Net missions;
        bool first = true;
        for (const auto& mi : missions_) {
            if (mi.sequencer != s.node->id) continue;
            Net part = mission_group(mi);
            missions = first ? std::move(part) : par_net(missions, part, {});
            first = false;
        }

        std::vector<ChannelId> g = {chan(Fam::StartMission, d),
                                    chan(Fam::DoneMission, d),
                                    chan(Fam::RequestTermination, d),
                                    chan(Fam::TerminationPending, d),
                                    chan(Fam::MissionActive, d),
                                    chan(Fam::EndMissionApp, d),
                                    chan(Fam::DismissMission, d)};
        if (current() || d > 0) g.push_back(chan(Fam::InitializeRet, d));
        return par_net(fw, missions, std::move(g));
    }

    void compose() {
        const SeqInfo& root = seqs_.front();
        Net system = sequencer_group(root, "TopLevelMissionSequencerFW_" + root.node->id);
        if (current())
            system = par_net(system, proc_net("Environment"), {rst_, end_rst_});
        define("System", system.term);
        defs().main = "System";
    }

    // --- bundle metadata ---------------------------------------------------------------

    void build_event_index() {
        auto& index = bundle_.event_index;
        auto inst = [&](ChannelId ch, const std::string& id) {
            return EventInstance{ch, {atom(id)}};
        };
        for (const auto& s : seqs_) {
            const std::string& id = s.node->id;
            auto& v = index[id];
            v.push_back(inst(gnm_call_, id));
            v.push_back(inst(gnm_ret_, id));
            v.push_back(inst(end_seq_app_, id));
            if (current()) v.push_back(inst(rst_, id));
            v.push_back(s.parent_mission.empty() ? inst(end_termination_, id)
                                                 : inst(end_terminations_, id));
        }
        for (const auto& m : missions_) {
            const std::string& id = m.node->id;
            int e = m.depth;
            auto& v = index[id];
            for (Fam f : {Fam::StartMission, Fam::InitializeRet, Fam::DoneMission,
                          Fam::RequestTermination, Fam::RequestTerminationApp,
                          Fam::TerminationPending, Fam::MissionActive, Fam::EndMissionApp,
                          Fam::DismissMission})
                v.push_back(inst(chan(f, e), id));
            v.push_back(inst(begin_termination_, id));
            v.push_back(inst(cleanup_mission_call_, id));
            v.push_back(inst(cleanup_mission_ret_, id));
        }
        for (const auto& s : scheds_) {
            const std::string& id = s.node->id;
            int e = s.depth;
            auto& v = index[id];
            for (Fam f : {Fam::StartSched, Fam::SigCall, Fam::SigRet, Fam::DoneSched,
                          Fam::CleanupSchedCall, Fam::CleanupSchedRet, Fam::DismissSched})
                v.push_back(inst(chan(f, e), id));
            if (s.node->kind != SchedulableNode::Kind::NestedSequencer)
                v.push_back(inst(work_, id));
            if (s.node->kind == SchedulableNode::Kind::Handler) v.push_back(inst(fire_, id));
        }
        for (const auto& [b, mid] : buffers_) {
            auto& v = index[b];
            v.push_back(inst(put_, b));
            v.push_back(inst(get_, b));
        }

        for (int d = 0; d <= max_depth_; ++d) {
            bundle_.state_channels.push_back(chan(Fam::TerminationPending, d));
            bundle_.state_channels.push_back(chan(Fam::MissionActive, d));
            for (Fam f : {Fam::RequestTermination, Fam::RequestTerminationApp, Fam::DoneMission,
                          Fam::SigCall, Fam::SigRet, Fam::DoneSched})
                if (fam_chan_.count({f, d}))
                    bundle_.termination_channels.push_back(chan(f, d));
        }
        bundle_.termination_channels.push_back(begin_termination_);
        bundle_.termination_channels.push_back(end_termination_);
        bundle_.termination_channels.push_back(end_terminations_);
        if (current()) bundle_.termination_channels.push_back(rst_);
    }

    const Topology& topo_;
    ProtocolVariant variant_;
    ModelBundle bundle_;

    std::vector<SeqInfo> seqs_;
    std::vector<MissionInfo> missions_;
    std::vector<SchedInfo> scheds_;
    std::vector<std::pair<std::string, std::string>> buffers_; // (buffer, mission)
    int max_depth_ = 0;

    DomainId dom_seq_ = 0, dom_mission_ = 0, dom_sched_ = 0, dom_buf_ = 0, dom_data_ = 0;
    std::map<std::string, DomainId> sched_dom_;
    std::map<std::pair<Fam, int>, ChannelId> fam_chan_;
    ChannelId gnm_call_ = 0, gnm_ret_ = 0, end_seq_app_ = 0, begin_termination_ = 0;
    ChannelId cleanup_mission_call_ = 0, cleanup_mission_ret_ = 0;
    ChannelId end_termination_ = 0, end_terminations_ = 0;
    ChannelId rst_ = -1, end_rst_ = -1;
    ChannelId work_ = -1, fire_ = -1, put_ = -1, get_ = -1;
};

} // namespace

ModelBundle build_model(const Topology& t, ProtocolVariant v) { return Generator(t, v).run(); }

} // namespace mk2::scj
