#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "mk2/errors.hpp"
#include "mk2/hsched/sim.hpp"

namespace mk2::hsched {

const char* to_string(SimEvent::Kind k) {
    switch (k) {
    case SimEvent::Kind::Release: return "release";
    case SimEvent::Kind::DeadlineArm: return "deadlineArm";
    case SimEvent::Kind::DeadlineMiss: return "deadlineMiss";
    case SimEvent::Kind::BudgetExhausted: return "budgetExhausted";
    case SimEvent::Kind::Replenish: return "replenish";
    case SimEvent::Kind::TimerFire: return "timerFire";
    case SimEvent::Kind::TimerCancel: return "timerCancel";
    case SimEvent::Kind::MissionPhase: return "missionPhase";
    case SimEvent::Kind::Warning: return "warning";
    }
    return "?";
}

void System::fire_event(const std::string& task_id, Ms t) {
    Stimulus s;
    s.kind = Stimulus::Kind::FireEvent;
    s.task = task_id;
    s.at = t;
    stimuli.push_back(std::move(s));
}

void System::produce(const std::string& task_id, Ms t, int items) {
    Stimulus s;
    s.kind = Stimulus::Kind::Produce;
    s.task = task_id;
    s.at = t;
    s.items = items;
    stimuli.push_back(std::move(s));
}

void System::request_termination_with_deadline(const std::string& sequencer_id, Ms t, Ms deadline,
                                               const std::string& handler_task,
                                               Ms cleanup_duration) {
    Stimulus s;
    s.kind = Stimulus::Kind::RequestTermination;
    s.sequencer = sequencer_id;
    s.at = t;
    s.deadline = deadline;
    s.task = handler_task;
    s.duration = cleanup_duration;
    stimuli.push_back(std::move(s));
}

void System::request_mission_change(const std::string& sequencer_id, Ms t, Ms deadline,
                                    const std::string& handler_task, Ms start_duration) {
    Stimulus s;
    s.kind = Stimulus::Kind::RequestMissionChange;
    s.sequencer = sequencer_id;
    s.at = t;
    s.deadline = deadline;
    s.task = handler_task;
    s.duration = start_duration;
    stimuli.push_back(std::move(s));
}

namespace {

struct TaskState {
    Ms next_release = -1;
    Ms next_deadline = -1; // -1: no armed deadline
    bool had_first_release = false;
    Ms remaining = 0;
    int missed = 0;
};

struct LiveTimer {
    Stimulus::Kind kind;
    std::string sequencer;
    Ms deadline_abs;
    Ms completion_abs;
    std::string handler;
};

void check_task(const TaskSpec& t) {
    auto positive = [&](Ms v, const char* what) {
        if (v <= 0)
            throw SchedError("task '" + t.id + "' needs a positive " + what);
    };
    switch (t.kind) {
    case TaskSpec::Kind::Periodic:
        positive(t.periodic.period, "period");
        positive(t.periodic.wcet, "wcet");
        if (t.periodic.offset < 0) throw SchedError("task '" + t.id + "' has a negative offset");
        if (!(t.periodic.wcet <= t.periodic.deadline && t.periodic.deadline <= t.periodic.period))
            throw SchedError("task '" + t.id + "' needs wcet <= deadline <= period");
        break;
    case TaskSpec::Kind::EventPeriodic:
        positive(t.event_periodic.period, "period");
        positive(t.event_periodic.wcet, "wcet");
        if (!(t.event_periodic.wcet <= t.event_periodic.deadline &&
              t.event_periodic.deadline <= t.event_periodic.period))
            throw SchedError("task '" + t.id + "' needs wcet <= deadline <= period");
        break;
    case TaskSpec::Kind::Consumer: positive(t.consumer.processing, "processing time"); break;
    case TaskSpec::Kind::Background: positive(t.background.chunk, "chunk"); break;
    }
}

} // namespace

SimTrace simulate(const System& system, Ms horizon) {
    if (horizon < 1) throw SchedError("horizon must be at least 1 ms");
    for (const auto& t : system.tasks) check_task(t);

    SimTrace trace;
    trace.horizon = horizon;
    trace.priorities = transpose_priorities(system);
    trace.per_tick.assign(static_cast<std::size_t>(horizon), "");

    std::map<std::string, const TaskSpec*> task_of;
    for (const auto& t : system.tasks) task_of[t.id] = &t;
    std::map<std::string, const ServerParams*> server_of;
    for (const auto& s : system.servers) server_of[s.id] = &s;

    for (const auto& st : system.stimuli) {
        if (st.at < 0 || st.at >= horizon)
            throw SchedError("stimulus at " + std::to_string(st.at) + " ms lies outside the horizon");
        switch (st.kind) {
        case Stimulus::Kind::FireEvent: {
            auto it = task_of.find(st.task);
            if (it == task_of.end() || it->second->kind != TaskSpec::Kind::EventPeriodic)
                throw SchedError("fire_event targets '" + st.task +
                                 "', which is not an event-released periodic task");
            break;
        }
        case Stimulus::Kind::Produce: {
            auto it = task_of.find(st.task);
            if (it == task_of.end() || it->second->kind != TaskSpec::Kind::Consumer)
                throw SchedError("produce targets '" + st.task + "', which is not a consumer task");
            break;
        }
        case Stimulus::Kind::RequestTermination:
        case Stimulus::Kind::RequestMissionChange: {
            auto it = task_of.find(st.task);
            if (it == task_of.end() || it->second->kind != TaskSpec::Kind::Consumer)
                throw SchedError("timer handler '" + st.task +
                                 "' must be an aperiodic (consumer) task");
            if (st.deadline <= 0 || st.duration < 0)
                throw SchedError("timer stimulus needs a positive deadline");
            break;
        }
        }
    }

    std::map<std::string, TaskState> state;
    for (const auto& t : system.tasks) {
        TaskState s;
        if (t.kind == TaskSpec::Kind::Periodic) s.next_release = t.periodic.offset;
        state[t.id] = s;
    }
    std::map<std::string, Ms> budget; // by server id; absent before start
    std::vector<LiveTimer> timers;

    auto emit = [&trace](SimEvent::Kind k, Ms at, const std::string& entity, Ms value = 0,
                         std::string note = {}) {
        trace.events.push_back(SimEvent{k, at, entity, value, std::move(note)});
    };

    auto release = [&](const TaskSpec& t, Ms now, Ms deadline_rel, Ms work) {
        TaskState& s = state[t.id];
        s.remaining += work;
        emit(SimEvent::Kind::Release, now, t.id);
        if (deadline_rel > 0) {
            s.next_deadline = now + deadline_rel;
            emit(SimEvent::Kind::DeadlineArm, now, t.id, s.next_deadline);
        }
    };

    for (Ms now = 0; now < horizon; ++now) {
        // 1. budget replenishment (deferrable server: reset to full).
        for (const auto& s : system.servers) {
            if (now < s.start) continue;
            if ((now - s.start) % s.replenishment_period == 0) {
                budget[s.id] = s.budget;
                emit(SimEvent::Kind::Replenish, now, s.id, s.budget);
            }
        }

        // 2. sequencer timers: lifecycle completion cancels; an armed timer
        // that survives to its deadline fires and releases its handler.
        // Completion at the deadline tick counts as a cancel.
        for (auto it = timers.begin(); it != timers.end();) {
            bool erased = false;
            if (it->completion_abs == now) {
                emit(SimEvent::Kind::TimerCancel, now, it->sequencer, it->deadline_abs);
                emit(SimEvent::Kind::MissionPhase, now, it->sequencer, 0,
                     it->kind == Stimulus::Kind::RequestTermination ? "cleanupComplete"
                                                                    : "missionStarted");
                it = timers.erase(it);
                erased = true;
            } else if (it->deadline_abs == now) {
                emit(SimEvent::Kind::TimerFire, now, it->sequencer, it->deadline_abs);
                const TaskSpec& handler = *task_of.at(it->handler);
                release(handler, now, 0, handler.consumer.processing);
                it = timers.erase(it);
                erased = true;
            }
            if (!erased) ++it;
        }

        // 3. task deadline misses: strictly after the armed deadline with
        // work outstanding. Disarmed once recorded; re-armed by releases.
        for (const auto& t : system.tasks) {
            TaskState& s = state[t.id];
            if (s.next_deadline >= 0 && now > s.next_deadline && s.remaining > 0) {
                ++s.missed;
                emit(SimEvent::Kind::DeadlineMiss, now, t.id, s.next_deadline);
                s.next_deadline = -1;
            }
        }

        // 4. scripted stimuli.
        for (const auto& st : system.stimuli) {
            if (st.at != now) continue;
            switch (st.kind) {
            case Stimulus::Kind::FireEvent: {
                TaskState& s = state[st.task];
                if (s.had_first_release) {
                    emit(SimEvent::Kind::Warning, now, st.task, 0,
                         "duplicate first release ignored");
                    break;
                }
                s.had_first_release = true;
                s.next_release = now;
                break;
            }
            case Stimulus::Kind::Produce: {
                const TaskSpec& t = *task_of.at(st.task);
                for (int i = 0; i < st.items; ++i)
                    release(t, now, 0, t.consumer.processing);
                break;
            }
            case Stimulus::Kind::RequestTermination:
            case Stimulus::Kind::RequestMissionChange: {
                for (const auto& live : timers)
                    if (live.sequencer == st.sequencer && live.kind == st.kind)
                        throw SchedError("sequencer '" + st.sequencer +
                                         "' already has a live timer of this kind");
                timers.push_back(LiveTimer{st.kind, st.sequencer, now + st.deadline,
                                           now + st.duration, st.task});
                emit(SimEvent::Kind::MissionPhase, now, st.sequencer, now + st.deadline,
                     st.kind == Stimulus::Kind::RequestTermination ? "terminationRequested"
                                                                   : "missionChangeRequested");
                break;
            }
            }
        }

        // 5. time-driven releases.
        for (const auto& t : system.tasks) {
            TaskState& s = state[t.id];
            if (t.kind == TaskSpec::Kind::Periodic && s.next_release == now) {
                release(t, now, t.periodic.deadline, t.periodic.wcet);
                s.next_release = now + t.periodic.period;
            } else if (t.kind == TaskSpec::Kind::EventPeriodic && s.had_first_release &&
                       s.next_release == now) {
                release(t, now, t.event_periodic.deadline, t.event_periodic.wcet);
                s.next_release = now + t.event_periodic.period;
            }
        }

        // 6. dispatch: highest concrete priority among ready tasks whose
        // server (if any) has remaining budget.
        const TaskSpec* chosen = nullptr;
        int best = 0;
        for (const auto& t : system.tasks) {
            bool ready = t.kind == TaskSpec::Kind::Background || state[t.id].remaining > 0;
            if (!ready) continue;
            if (!t.server.empty()) {
                auto it = budget.find(t.server);
                if (it == budget.end() || it->second <= 0) continue;
            }
            int pri = trace.priorities.at(t.id);
            if (!chosen || pri > best) {
                chosen = &t;
                best = pri;
            }
        }
        if (chosen) {
            trace.per_tick[static_cast<std::size_t>(now)] = chosen->id;
            TaskState& s = state[chosen->id];
            if (chosen->kind != TaskSpec::Kind::Background && s.remaining > 0) s.remaining -= 1;
            if (!chosen->server.empty()) {
                Ms& b = budget[chosen->server];
                b -= 1;
                if (b == 0) emit(SimEvent::Kind::BudgetExhausted, now, chosen->server);
            }
        }
    }

    for (const auto& [id, s] : state)
        if (s.missed > 0) trace.deadline_misses[id] = s.missed;
    return trace;
}

Ms window_usage(const SimTrace& trace, const System& system, const std::string& server_id,
                Ms window_start) {
    const ServerParams* server = nullptr;
    for (const auto& s : system.servers)
        if (s.id == server_id) server = &s;
    if (!server) throw SchedError("unknown server '" + server_id + "'");
    if (window_start < server->start ||
        (window_start - server->start) % server->replenishment_period != 0)
        throw SchedError("window start " + std::to_string(window_start) +
                         " is not aligned to the replenishment grid of '" + server_id + "'");
    std::set<std::string> members;
    for (const auto& t : system.tasks)
        if (t.server == server_id) members.insert(t.id);
    Ms used = 0;
    Ms end = std::min(window_start + server->replenishment_period, trace.horizon);
    for (Ms i = window_start; i < end; ++i)
        if (members.count(trace.per_tick[static_cast<std::size_t>(i)])) ++used;
    return used;
}

std::string render_gantt(const SimTrace& trace) {
    std::vector<std::string> entities;
    std::set<std::string> seen;
    for (const auto& e : trace.per_tick)
        if (!e.empty() && seen.insert(e).second) entities.push_back(e);

    std::size_t name_width = 4;
    for (const auto& e : entities) name_width = std::max(name_width, e.size());

    std::ostringstream out;
    const Ms chunk = 80;
    for (Ms base = 0; base < trace.horizon; base += chunk) {
        Ms end = std::min(base + chunk, trace.horizon);
        out << std::string(name_width, ' ') << " t=" << base << "\n";
        for (const auto& e : entities) {
            out << e << std::string(name_width - e.size(), ' ') << " ";
            for (Ms i = base; i < end; ++i)
                out << (trace.per_tick[static_cast<std::size_t>(i)] == e ? '#' : '.');
            out << "\n";
        }
        out << "\n";
    }
    return out.str();
}

} // namespace mk2::hsched
