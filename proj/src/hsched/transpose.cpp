#include <algorithm>
#include <map>
#include <set>

#include "mk2/errors.hpp"
#include "mk2/hsched/sim.hpp"

namespace mk2::hsched {

namespace {

void check_server(const ServerParams& s) {
    if (s.id.empty()) throw SchedError("server with empty id");
    if (s.budget <= 0 || s.budget > s.replenishment_period)
        throw SchedError("server '" + s.id + "' needs 0 < budget <= replenishment period");
    if (s.priority_range < 0)
        throw SchedError("server '" + s.id + "' has a negative priority range");
}

} // namespace

std::map<std::string, int> transpose_priorities(const System& system) {
    std::map<std::string, std::vector<const TaskSpec*>> members;
    std::map<std::string, const ServerParams*> servers;
    std::set<std::string> task_ids;

    for (const auto& s : system.servers) {
        check_server(s);
        if (!servers.emplace(s.id, &s).second)
            throw SchedError("duplicate server id '" + s.id + "'");
        members[s.id];
    }
    for (const auto& t : system.tasks) {
        if (!task_ids.insert(t.id).second)
            throw SchedError("duplicate task id '" + t.id + "'");
        if (t.server.empty()) continue;
        auto it = members.find(t.server);
        if (it == members.end())
            throw SchedError("task '" + t.id + "' names unknown server '" + t.server + "'");
        it->second.push_back(&t);
    }

    // Server bands [base, base + range] must be pairwise disjoint.
    std::vector<const ServerParams*> ordered;
    for (const auto& s : system.servers) ordered.push_back(&s);
    std::sort(ordered.begin(), ordered.end(),
              [](const ServerParams* a, const ServerParams* b) {
                  return a->base_priority < b->base_priority;
              });
    for (std::size_t i = 1; i < ordered.size(); ++i) {
        if (ordered[i - 1]->base_priority + ordered[i - 1]->priority_range >=
            ordered[i]->base_priority)
            throw SchedError("priority bands of servers '" + ordered[i - 1]->id + "' and '" +
                             ordered[i]->id + "' overlap");
    }

    std::map<std::string, int> priorities;
    std::set<int> used;
    for (const auto& s : system.servers) {
        auto& ms = members[s.id];
        if (static_cast<int>(ms.size()) > s.priority_range)
            throw SchedError("priority band of server '" + s.id + "' is too small for " +
                             std::to_string(ms.size()) + " member task(s)");
        std::sort(ms.begin(), ms.end(), [](const TaskSpec* a, const TaskSpec* b) {
            return a->order_index < b->order_index;
        });
        for (std::size_t i = 1; i < ms.size(); ++i)
            if (ms[i]->order_index == ms[i - 1]->order_index)
                throw SchedError("tasks '" + ms[i - 1]->id + "' and '" + ms[i]->id +
                                 "' share order index " + std::to_string(ms[i]->order_index) +
                                 " in server '" + s.id + "'");
        // Original priority order maps onto the band bottom-up.
        for (std::size_t i = 0; i < ms.size(); ++i) {
            int pri = s.base_priority + static_cast<int>(i);
            priorities[ms[i]->id] = pri;
            if (!used.insert(pri).second)
                throw SchedError("priority " + std::to_string(pri) + " assigned twice");
        }
    }
    for (const auto& t : system.tasks) {
        if (!t.server.empty()) continue;
        priorities[t.id] = t.priority;
        if (!used.insert(t.priority).second)
            throw SchedError("priority " + std::to_string(t.priority) + " of top-level task '" +
                             t.id + "' collides with another assignment");
    }
    return priorities;
}

} // namespace mk2::hsched
