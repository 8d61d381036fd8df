#include "mk2/hsched/scenario_json.hpp"

#include "mk2/errors.hpp"

namespace mk2::hsched {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

TaskSpec task_from_json(const json& j) {
    TaskSpec t;
    t.id = j.at("id").get<std::string>();
    t.server = j.value("server", std::string());
    t.order_index = j.value("order_index", 0);
    t.priority = j.value("priority", 0);
    std::string kind = j.value("kind", std::string("background"));
    if (kind == "periodic") {
        t.kind = TaskSpec::Kind::Periodic;
        t.periodic.period = j.at("period").get<Ms>();
        t.periodic.deadline = j.value("deadline", t.periodic.period);
        t.periodic.wcet = j.at("wcet").get<Ms>();
        t.periodic.offset = j.value("offset", Ms{0});
    } else if (kind == "event_periodic") {
        t.kind = TaskSpec::Kind::EventPeriodic;
        t.event_periodic.period = j.at("period").get<Ms>();
        t.event_periodic.deadline = j.value("deadline", t.event_periodic.period);
        t.event_periodic.wcet = j.at("wcet").get<Ms>();
    } else if (kind == "consumer") {
        t.kind = TaskSpec::Kind::Consumer;
        t.consumer.processing = j.at("processing").get<Ms>();
    } else if (kind == "background") {
        t.kind = TaskSpec::Kind::Background;
        t.background.chunk = j.value("chunk", Ms{1});
    } else {
        throw SchedError("unknown task kind '" + kind + "'");
    }
    return t;
}

Stimulus stimulus_from_json(const json& j) {
    Stimulus s;
    std::string kind = j.at("kind").get<std::string>();
    s.at = j.at("at").get<Ms>();
    if (kind == "fire_event") {
        s.kind = Stimulus::Kind::FireEvent;
        s.task = j.at("task").get<std::string>();
    } else if (kind == "produce") {
        s.kind = Stimulus::Kind::Produce;
        s.task = j.at("task").get<std::string>();
        s.items = j.value("items", 1);
    } else if (kind == "request_termination" || kind == "request_mission_change") {
        s.kind = kind == "request_termination" ? Stimulus::Kind::RequestTermination
                                               : Stimulus::Kind::RequestMissionChange;
        s.sequencer = j.at("sequencer").get<std::string>();
        s.deadline = j.at("deadline").get<Ms>();
        s.task = j.at("handler").get<std::string>();
        s.duration = j.at("duration").get<Ms>();
    } else {
        throw SchedError("unknown stimulus kind '" + kind + "'");
    }
    return s;
}

} // namespace

Scenario scenario_from_json(const json& j) {
    Scenario sc;
    if (j.contains("servers")) {
        for (const auto& sj : j.at("servers")) {
            ServerParams s;
            s.id = sj.at("id").get<std::string>();
            s.start = sj.value("start", Ms{0});
            s.replenishment_period = sj.at("replenishment_period").get<Ms>();
            s.budget = sj.at("budget").get<Ms>();
            s.base_priority = sj.at("base_priority").get<int>();
            s.priority_range = sj.value("priority_range", 0);
            sc.system.servers.push_back(std::move(s));
        }
    }
    for (const auto& tj : j.at("tasks")) sc.system.tasks.push_back(task_from_json(tj));
    if (j.contains("stimuli"))
        for (const auto& sj : j.at("stimuli"))
            sc.system.stimuli.push_back(stimulus_from_json(sj));
    sc.horizon = j.value("horizon", Ms{0});
    return sc;
}

Scenario load_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchedError(std::string("invalid scenario JSON: ") + e.what());
    }
    try {
        return scenario_from_json(j);
    } catch (const json::exception& e) {
        throw SchedError(std::string("malformed scenario JSON: ") + e.what());
    }
}

ordered_json trace_to_json(const SimTrace& trace) {
    ordered_json j;
    j["horizon"] = trace.horizon;
    j["priorities"] = ordered_json::object();
    for (const auto& [id, pri] : trace.priorities) j["priorities"][id] = pri;
    j["per_tick"] = trace.per_tick;
    j["events"] = ordered_json::array();
    for (const auto& e : trace.events) {
        ordered_json ej;
        ej["kind"] = to_string(e.kind);
        ej["at"] = e.at;
        ej["entity"] = e.entity;
        if (e.value != 0) ej["value"] = e.value;
        if (!e.note.empty()) ej["note"] = e.note;
        j["events"].push_back(std::move(ej));
    }
    j["deadline_misses"] = ordered_json::object();
    for (const auto& [id, n] : trace.deadline_misses) j["deadline_misses"][id] = n;
    return j;
}

} // namespace mk2::hsched
