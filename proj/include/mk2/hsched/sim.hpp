#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mk2::hsched {

using Ms = std::int64_t; // integer milliseconds; all times are exact

/// An execution-time server: a CPU budget replenished periodically, plus a
/// reserved priority band for its member tasks.
struct ServerParams {
    std::string id;
    Ms start = 0;
    Ms replenishment_period = 0;
    Ms budget = 0;
    int base_priority = 0;
    int priority_range = 0;
};

struct PeriodicSpec {
    Ms period = 0;
    Ms deadline = 0;
    Ms wcet = 0;
    Ms offset = 0;
};

struct EventPeriodicSpec { // released by notification, then periodic
    Ms period = 0;
    Ms deadline = 0;
    Ms wcet = 0;
};

struct ConsumerSpec { // queued releases, one work chunk per item
    Ms processing = 0;
};

struct BackgroundSpec { // ready whenever the scheduler allows
    Ms chunk = 1;
};

struct TaskSpec {
    enum class Kind : std::uint8_t { Periodic, EventPeriodic, Consumer, Background };
    std::string id;
    std::string server; // empty: top-level task
    Kind kind = Kind::Background;
    int order_index = 0; // rank within its server (higher = more urgent)
    int priority = 0;    // top-level tasks: explicit priority
    PeriodicSpec periodic;
    EventPeriodicSpec event_periodic;
    ConsumerSpec consumer;
    BackgroundSpec background;
};

/// Scripted stimuli applied during simulation.
struct Stimulus {
    enum class Kind : std::uint8_t {
        FireEvent,        // first release of an event-released periodic task
        Produce,          // enqueue items on a consumer task
        RequestTermination, // sequencer mission-termination with a deadline timer
        RequestMissionChange,
    };
    Kind kind = Kind::FireEvent;
    Ms at = 0;
    std::string task;      // FireEvent/Produce; handler task for timers
    int items = 1;         // Produce
    std::string sequencer; // timers
    Ms deadline = 0;       // timers: relative deadline
    Ms duration = 0;       // timers: scripted lifecycle duration
};

struct SimEvent {
    enum class Kind : std::uint8_t {
        Release,
        DeadlineArm,
        DeadlineMiss,
        BudgetExhausted,
        Replenish,
        TimerFire,
        TimerCancel,
        MissionPhase,
        Warning,
    };
    Kind kind = Kind::Release;
    Ms at = 0;
    std::string entity;
    Ms value = 0; // armed deadline, replenished budget, ...
    std::string note;
};

const char* to_string(SimEvent::Kind k);

struct SimTrace {
    Ms horizon = 0;
    std::vector<std::string> per_tick; // executing entity id or "" (idle)
    std::vector<SimEvent> events;
    std::map<std::string, int> priorities; // resolved concrete priorities
    std::map<std::string, int> deadline_misses;
};

struct System {
    std::vector<ServerParams> servers;
    std::vector<TaskSpec> tasks;
    std::vector<Stimulus> stimuli;

    /// Scripted stimuli builders (validated against the task kinds).
    void fire_event(const std::string& task_id, Ms t);
    void produce(const std::string& task_id, Ms t, int items = 1);
    void request_termination_with_deadline(const std::string& sequencer_id, Ms t, Ms deadline,
                                           const std::string& handler_task, Ms cleanup_duration);
    void request_mission_change(const std::string& sequencer_id, Ms t, Ms deadline,
                                const std::string& handler_task, Ms start_duration);
};

/// Assign concrete priorities: each server member lands in its server's
/// band, ordered by order_index; bands must be disjoint and wide enough.
std::map<std::string, int> transpose_priorities(const System& system);

/// Run the deterministic tick simulation over [0, horizon).
SimTrace simulate(const System& system, Ms horizon);

/// Budget consumed by a server's members within one replenishment window.
Ms window_usage(const SimTrace& trace, const System& system, const std::string& server_id,
                Ms window_start);

/// Plain-text Gantt rendering of a trace.
std::string render_gantt(const SimTrace& trace);

} // namespace mk2::hsched
