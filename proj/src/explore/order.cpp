#include "mk2/explore/order.hpp"

#include <algorithm>
#include <unordered_map>

#include "mk2/errors.hpp"

namespace mk2::explore {

using calc::Configuration;
using calc::ConfigurationHash;
using calc::StepEngine;
using model::EventLabel;

bool EventPattern::matches(const EventLabel& l) const {
    if (!l.is_visible() || l.channel != channel) return false;
    for (std::size_t i = 0; i < arg_constraints.size() && i < l.args.size(); ++i) {
        const auto& c = arg_constraints[i];
        if (c && !c->count(l.args[i])) return false;
    }
    return true;
}

namespace {

struct ProductState {
    Configuration config;
    std::uint8_t phase;

    bool operator==(const ProductState& o) const {
        return phase == o.phase && config == o.config;
    }
};

struct ProductHash {
    std::size_t operator()(const ProductState& s) const {
        return ConfigurationHash()(s.config) * 31 + s.phase;
    }
};

} // namespace

OrderResult check_order(const scj::ModelBundle& bundle, const OrderQuery& query,
                        const ExploreLimits& limits) {
    StepEngine engine(bundle.defs);
    OrderResult result;

    std::vector<ProductState> states;
    std::vector<std::uint32_t> parent;
    std::vector<EventLabel> parent_label;
    std::unordered_map<ProductState, std::uint32_t, ProductHash> index;

    auto path_to = [&](std::uint32_t node, const EventLabel* extra) {
        std::vector<EventLabel> labels;
        if (extra) labels.push_back(*extra);
        for (std::uint32_t v = node; v != 0; v = parent[v]) labels.push_back(parent_label[v]);
        std::reverse(labels.begin(), labels.end());
        return Trace{std::move(labels)};
    };

    auto add = [&](ProductState s, std::uint32_t from, const EventLabel& label) -> bool {
        if (index.count(s)) return true;
        if (states.size() >= limits.max_states) {
            result.truncated = true;
            return false;
        }
        auto id = static_cast<std::uint32_t>(states.size());
        index.emplace(s, id);
        states.push_back(std::move(s));
        parent.push_back(from);
        parent_label.push_back(label);
        return true;
    };

    const bool forall = query.mode == OrderMode::ForallPrecedes;
    add({engine.initial(), 0}, 0, EventLabel::tau());

    for (std::uint32_t cursor = 0; cursor < states.size(); ++cursor) {
        const ProductState current = states[cursor];
        if (current.config.is_terminated()) continue;
        for (const auto& t : engine.transitions(current.config)) {
            std::uint8_t phase = current.phase;
            if (forall) {
                if (phase == 0) {
                    if (query.first.matches(t.label)) {
                        phase = 1; // satisfied; seconds may follow freely
                    } else if (query.second.matches(t.label)) {
                        EventLabel witness_label = t.label;
                        result.kind = OrderResult::Kind::Fails;
                        result.witness = path_to(cursor, &witness_label);
                        return result;
                    }
                }
            } else {
                if (phase == 0 && query.first.matches(t.label)) phase = 1;
                else if (phase == 1 && query.second.matches(t.label)) phase = 2;
                else if (phase == 2 && query.first.matches(t.label)) {
                    EventLabel witness_label = t.label;
                    result.kind = OrderResult::Kind::WitnessFound;
                    result.witness = path_to(cursor, &witness_label);
                    return result;
                }
            }
            add({t.target, phase}, cursor, t.label);
        }
    }

    result.kind = forall ? OrderResult::Kind::Holds : OrderResult::Kind::NoWitness;
    return result;
}

EventPattern parse_pattern(const std::string& text, const model::ModelDefs& defs) {
    std::vector<std::string> parts;
    std::string cur;
    int brace = 0;
    for (char c : text) {
        if (c == '{') ++brace;
        if (c == '}') --brace;
        if (c == '.' && brace == 0) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    if (parts.empty() || parts.front().empty())
        throw ValidationError("empty event pattern");

    EventPattern p;
    auto ch = defs.find_channel(parts.front());
    if (!ch) throw ValidationError("pattern references unknown channel '" + parts.front() + "'");
    p.channel = *ch;

    auto atom_of = [&](const std::string& name) {
        if (auto found = defs.find_atom(name)) return found->second;
        try {
            return model::Atom::integer(std::stoi(name));
        } catch (...) {
            throw ValidationError("pattern references unknown value '" + name + "'");
        }
    };

    for (std::size_t i = 1; i < parts.size(); ++i) {
        const std::string& part = parts[i];
        if (part == "*" || part.empty()) {
            p.arg_constraints.push_back(std::nullopt);
        } else if (part.front() == '{') {
            if (part.back() != '}') throw ValidationError("unterminated '{' in event pattern");
            std::set<model::Atom> allowed;
            std::string item;
            for (char c : part.substr(1, part.size() - 2)) {
                if (c == ',') {
                    if (!item.empty()) allowed.insert(atom_of(item));
                    item.clear();
                } else if (!std::isspace(static_cast<unsigned char>(c))) {
                    item.push_back(c);
                }
            }
            if (!item.empty()) allowed.insert(atom_of(item));
            if (allowed.empty()) throw ValidationError("empty atom set in event pattern");
            p.arg_constraints.push_back(std::move(allowed));
        } else {
            p.arg_constraints.push_back(std::set<model::Atom>{atom_of(part)});
        }
    }
    return p;
}

} // namespace mk2::explore
