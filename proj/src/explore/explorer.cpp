#include "mk2/explore/explorer.hpp"

#include <algorithm>
#include <set>
#include <unordered_map>

namespace mk2::explore {

using calc::Configuration;
using calc::ConfigurationHash;
using calc::StepEngine;
using model::EventLabel;

namespace {

struct Graph {
    std::vector<Configuration> states;
    std::vector<std::uint32_t> parent;      // BFS tree
    std::vector<EventLabel> parent_label;
    std::vector<std::uint32_t> depth;
    // Internal-transition subgraph after hiding, with original labels kept
    // so witnesses stay replayable.
    std::vector<std::vector<std::pair<std::uint32_t, EventLabel>>> tau_succ;
};

Trace path_to(const Graph& g, std::uint32_t node) {
    std::vector<EventLabel> labels;
    for (std::uint32_t v = node; v != 0; v = g.parent[v]) labels.push_back(g.parent_label[v]);
    std::reverse(labels.begin(), labels.end());
    return Trace{std::move(labels)};
}

void find_divergences(const Graph& g, ExplorationReport& report) {
    enum : std::uint8_t { White, Grey, Black };
    std::vector<std::uint8_t> colour(g.states.size(), White);
    std::vector<std::uint32_t> stack_pos(g.states.size(), 0);

    struct Frame {
        std::uint32_t node;
        std::size_t next_child;
    };
    std::vector<Frame> stack;
    std::vector<std::pair<std::uint32_t, EventLabel>> chain; // edge into each stack frame

    for (std::uint32_t root = 0; root < g.states.size(); ++root) {
        if (colour[root] != White) continue;
        stack.push_back({root, 0});
        colour[root] = Grey;
        stack_pos[root] = 0;
        chain.clear();
        while (!stack.empty()) {
            Frame& f = stack.back();
            if (f.next_child < g.tau_succ[f.node].size()) {
                auto [succ, label] = g.tau_succ[f.node][f.next_child++];
                if (colour[succ] == White) {
                    colour[succ] = Grey;
                    stack_pos[succ] = static_cast<std::uint32_t>(stack.size());
                    chain.push_back({f.node, label});
                    stack.push_back({succ, 0});
                } else if (colour[succ] == Grey) {
                    if (report.divergences.size() < kMaxWitnesses) {
                        Lasso lasso;
                        lasso.stem = path_to(g, succ);
                        for (std::size_t i = stack_pos[succ]; i < chain.size(); ++i)
                            lasso.cycle.labels.push_back(chain[i].second);
                        lasso.cycle.labels.push_back(label);
                        report.divergences.push_back(std::move(lasso));
                    }
                }
            } else {
                colour[f.node] = Black;
                stack.pop_back();
                if (!chain.empty()) chain.pop_back();
            }
        }
    }
}

} // namespace

ExplorationReport explore_defs(const model::ModelDefs& defs, const ExploreLimits& limits,
                               const std::vector<model::ChannelId>& extra_hidden) {
    std::set<model::ChannelId> hidden(limits.hide.begin(), limits.hide.end());
    hidden.insert(extra_hidden.begin(), extra_hidden.end());

    StepEngine engine(defs);
    Graph g;
    std::unordered_map<Configuration, std::uint32_t, ConfigurationHash> index;
    ExplorationReport report;

    auto add_state = [&](const Configuration& c, std::uint32_t parent,
                         const EventLabel& label, std::uint32_t depth) -> std::int64_t {
        auto it = index.find(c);
        if (it != index.end()) return it->second;
        if (g.states.size() >= limits.max_states) {
            report.truncated = true;
            return -1;
        }
        auto id = static_cast<std::uint32_t>(g.states.size());
        index.emplace(c, id);
        g.states.push_back(c);
        g.parent.push_back(parent);
        g.parent_label.push_back(label);
        g.depth.push_back(depth);
        g.tau_succ.emplace_back();
        return id;
    };

    add_state(engine.initial(), 0, EventLabel::tau(), 0);

    for (std::uint32_t cursor = 0; cursor < g.states.size(); ++cursor) {
        const Configuration c = g.states[cursor];
        if (c.is_terminated()) {
            ++report.terminated;
            continue;
        }
        if (limits.max_depth > 0 && g.depth[cursor] >= limits.max_depth) {
            report.truncated = true;
            continue;
        }
        auto transitions = engine.transitions(c);
        report.transitions += transitions.size();
        if (transitions.empty()) {
            if (report.deadlocks.size() < kMaxWitnesses)
                report.deadlocks.push_back(path_to(g, cursor));
            continue;
        }
        for (const auto& t : transitions) {
            std::int64_t succ = add_state(t.target, cursor, t.label, g.depth[cursor] + 1);
            if (succ < 0) continue;
            bool internal = t.label.is_tau() ||
                            (t.label.is_visible() && hidden.count(t.label.channel) > 0);
            if (internal)
                g.tau_succ[cursor].push_back({static_cast<std::uint32_t>(succ), t.label});
        }
    }

    report.states = g.states.size();
    find_divergences(g, report);
    return report;
}

ExplorationReport explore(const scj::ModelBundle& bundle, const ExploreLimits& limits) {
    return explore_defs(bundle.defs, limits, bundle.state_channels);
}

bool replay(const model::ModelDefs& defs, const Trace& trace) {
    StepEngine engine(defs);
    std::vector<Configuration> frontier = {engine.initial()};
    for (const auto& label : trace.labels) {
        std::vector<Configuration> next;
        for (const auto& c : frontier)
            for (const auto& t : engine.transitions(c))
                if (t.label == label) next.push_back(t.target);
        if (next.empty()) return false;
        // Deduplicate: interned terms make equality cheap.
        std::sort(next.begin(), next.end(), [&](const Configuration& a, const Configuration& b) {
            if (a.term.get() != b.term.get()) return a.term.get() < b.term.get();
            return a.store < b.store;
        });
        next.erase(std::unique(next.begin(), next.end()), next.end());
        frontier = std::move(next);
    }
    return true;
}

} // namespace mk2::explore
