#include "mk2/explore/report_json.hpp"

#include "mk2/calc/semantics.hpp"

namespace mk2::explore {

using nlohmann::ordered_json;

ordered_json trace_to_json(const Trace& t, const model::ModelDefs& defs) {
    ordered_json arr = ordered_json::array();
    for (const auto& l : t.labels) arr.push_back(calc::label_to_string(l, defs));
    return arr;
}

ordered_json report_to_json(const ExplorationReport& r, const model::ModelDefs& defs,
                            const std::string& model_id, const std::string& variant) {
    ordered_json j;
    j["tool_version"] = kToolVersion;
    j["model"] = model_id;
    if (!variant.empty()) j["protocol"] = variant;
    j["states"] = r.states;
    j["transitions"] = r.transitions;
    j["terminated"] = r.terminated;
    j["truncated"] = r.truncated;
    j["deadlocks"] = ordered_json::array();
    for (const auto& d : r.deadlocks) j["deadlocks"].push_back(trace_to_json(d, defs));
    j["divergences"] = ordered_json::array();
    for (const auto& l : r.divergences) {
        ordered_json lasso;
        lasso["stem"] = trace_to_json(l.stem, defs);
        lasso["cycle"] = trace_to_json(l.cycle, defs);
        j["divergences"].push_back(std::move(lasso));
    }
    return j;
}

ordered_json comparison_to_json(const ProtocolComparison& c, const scj::ModelBundle& current,
                                const scj::ModelBundle& proposed, const std::string& topology) {
    ordered_json j;
    j["tool_version"] = kToolVersion;
    j["topology"] = topology;
    j["current"] = report_to_json(c.current, current.defs, topology, "current");
    j["proposed"] = report_to_json(c.proposed, proposed.defs, topology, "proposed");
    j["reduction"] = c.reduction;
    j["conclusive"] = c.conclusive;
    return j;
}

ordered_json order_result_to_json(const OrderResult& r, const model::ModelDefs& defs,
                                  const std::string& model_id) {
    ordered_json j;
    j["tool_version"] = kToolVersion;
    j["model"] = model_id;
    switch (r.kind) {
    case OrderResult::Kind::Holds: j["result"] = "holds"; break;
    case OrderResult::Kind::Fails: j["result"] = "fails"; break;
    case OrderResult::Kind::WitnessFound: j["result"] = "witnessFound"; break;
    case OrderResult::Kind::NoWitness: j["result"] = "noWitness"; break;
    }
    j["truncated"] = r.truncated;
    if (!r.witness.labels.empty()) j["witness"] = trace_to_json(r.witness, defs);
    return j;
}

} // namespace mk2::explore
