#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "mk2/dsl/parser.hpp"
#include "mk2/dsl/topology_io.hpp"
#include "mk2/errors.hpp"
#include "mk2/explore/compare.hpp"
#include "mk2/explore/order.hpp"
#include "mk2/explore/report_json.hpp"
#include "mk2/hsched/scenario_json.hpp"
#include "mk2/scj/generator.hpp"

namespace {

using namespace mk2;

constexpr int kExitOk = 0;
constexpr int kExitViolated = 1;
constexpr int kExitTruncated = 2;
constexpr int kExitInputError = 3;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& output_path, const std::string& text) {
    if (output_path.empty() || output_path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream out(output_path, std::ios::binary);
    if (!out) throw ModelError("cannot write '" + output_path + "'");
    out << text;
}

scj::Topology load_topology(const std::string& spec) {
    if (std::filesystem::exists(spec)) {
        dsl::ModelSource src{read_file(spec), spec};
        return dsl::parse_topology(src);
    }
    return scj::builtin_topology(spec);
}

scj::ProtocolVariant parse_variant(const std::string& name) {
    if (name == "current") return scj::ProtocolVariant::Current;
    if (name == "proposed") return scj::ProtocolVariant::Proposed;
    throw ModelError("unknown protocol '" + name + "' (expected current or proposed)");
}

struct LimitFlags {
    std::uint64_t max_states = 10'000'000;
    std::uint64_t max_depth = 0;
    std::string hide;

    void attach(CLI::App* cmd) {
        if (const char* env = std::getenv("MK_MAX_STATES")) max_states = std::stoull(env);
        cmd->add_option("--max-states", max_states, "state limit before truncation");
        cmd->add_option("--max-depth", max_depth, "depth limit (0 = unbounded)");
        cmd->add_option("--hide", hide, "comma-separated channels hidden for divergence");
    }

    explore::ExploreLimits resolve(const model::ModelDefs& defs) const {
        explore::ExploreLimits l;
        l.max_states = max_states;
        l.max_depth = max_depth;
        std::string cur;
        std::stringstream ss(hide);
        while (std::getline(ss, cur, ',')) {
            if (cur.empty()) continue;
            auto ch = defs.find_channel(cur);
            if (!ch) throw ModelError("--hide names unknown channel '" + cur + "'");
            l.hide.push_back(*ch);
        }
        return l;
    }
};

std::string describe_report(const explore::ExplorationReport& r) {
    std::ostringstream out;
    out << "states " << r.states << ", transitions " << r.transitions << ", terminated "
        << r.terminated << ", deadlocks " << r.deadlocks.size() << ", divergences "
        << r.divergences.size() << (r.truncated ? ", TRUNCATED" : "") << "\n";
    return out.str();
}

int run_check(const std::string& topology, const std::string& protocol,
              const std::string& model_path, const LimitFlags& limits,
              const std::string& format, const std::string& output) {
    explore::ExplorationReport report;
    std::string model_id;
    std::string variant;
    nlohmann::ordered_json j;

    if (!model_path.empty()) {
        dsl::ModelSource src{read_file(model_path), model_path};
        auto defs = dsl::parse(src);
        report = explore::explore_defs(defs, limits.resolve(defs));
        model_id = model_path;
        j = explore::report_to_json(report, defs, model_id, "");
    } else {
        auto bundle = scj::build_model(load_topology(topology), parse_variant(protocol));
        report = explore::explore(bundle, limits.resolve(bundle.defs));
        model_id = bundle.topology_name;
        variant = protocol;
        j = explore::report_to_json(report, bundle.defs, model_id, variant);
    }

    write_output(output, format == "text" ? describe_report(report) : j.dump(2));
    if (report.truncated) return kExitTruncated;
    if (!report.deadlocks.empty() || !report.divergences.empty()) return kExitViolated;
    return kExitOk;
}

int run_compare(const std::string& topology, const LimitFlags& limits, const std::string& format,
                const std::string& output) {
    auto topo = load_topology(topology);
    auto current_bundle = scj::build_model(topo, scj::ProtocolVariant::Current);
    auto proposed_bundle =
        scj::build_model(topo.rewritten_for_proposed(), scj::ProtocolVariant::Proposed);
    explore::ProtocolComparison cmp;
    cmp.current = explore::explore(current_bundle, limits.resolve(current_bundle.defs));
    cmp.proposed = explore::explore(proposed_bundle, limits.resolve(proposed_bundle.defs));
    if (cmp.current.states > 0)
        cmp.reduction = 1.0 - static_cast<double>(cmp.proposed.states) /
                                  static_cast<double>(cmp.current.states);
    cmp.conclusive = !cmp.current.truncated && !cmp.proposed.truncated;

    if (format == "text") {
        std::ostringstream out;
        out << "current:  " << describe_report(cmp.current);
        out << "proposed: " << describe_report(cmp.proposed);
        out << "reduction " << cmp.reduction * 100.0 << "%"
            << (cmp.conclusive ? "" : " (inconclusive: truncated)") << "\n";
        write_output(output, out.str());
    } else {
        write_output(output, explore::comparison_to_json(cmp, current_bundle, proposed_bundle,
                                                         topo.name)
                                 .dump(2));
    }
    if (!cmp.conclusive) return kExitTruncated;
    return kExitOk;
}

int run_order(const std::string& topology, const std::string& protocol, const std::string& mode,
              const std::string& first, const std::string& second, const LimitFlags& limits,
              const std::string& format, const std::string& output) {
    auto variant = parse_variant(protocol);
    auto topo = load_topology(topology);
    if (variant == scj::ProtocolVariant::Proposed) topo = topo.rewritten_for_proposed();
    auto bundle = scj::build_model(topo, variant);

    explore::OrderQuery query;
    if (mode == "forall-precedes") query.mode = explore::OrderMode::ForallPrecedes;
    else if (mode == "exists-interleaving") query.mode = explore::OrderMode::ExistsInterleaving;
    else throw ModelError("unknown mode '" + mode + "'");
    query.first = explore::parse_pattern(first, bundle.defs);
    query.second = explore::parse_pattern(second, bundle.defs);

    auto result = explore::check_order(bundle, query, limits.resolve(bundle.defs));
    if (format == "text") {
        std::ostringstream out;
        switch (result.kind) {
        case explore::OrderResult::Kind::Holds: out << "holds\n"; break;
        case explore::OrderResult::Kind::Fails: out << "fails\n"; break;
        case explore::OrderResult::Kind::WitnessFound: out << "witnessFound\n"; break;
        case explore::OrderResult::Kind::NoWitness: out << "noWitness\n"; break;
        }
        for (const auto& l : result.witness.labels)
            out << "  " << calc::label_to_string(l, bundle.defs) << "\n";
        write_output(output, out.str());
    } else {
        write_output(output,
                     explore::order_result_to_json(result, bundle.defs, topo.name).dump(2));
    }
    if (result.truncated) return kExitTruncated;
    bool pass = result.kind == explore::OrderResult::Kind::Holds ||
                result.kind == explore::OrderResult::Kind::WitnessFound;
    return pass ? kExitOk : kExitViolated;
}

int run_sim(const std::string& scenario_path, std::int64_t horizon, const std::string& format,
            const std::string& output) {
    auto scenario = hsched::load_scenario(read_file(scenario_path));
    hsched::Ms h = horizon > 0 ? horizon : scenario.horizon;
    if (h <= 0) throw ModelError("no horizon given (use --horizon or the scenario field)");
    auto trace = hsched::simulate(scenario.system, h);
    if (format == "text")
        write_output(output, hsched::render_gantt(trace));
    else
        write_output(output, hsched::trace_to_json(trace).dump(2));
    return trace.deadline_misses.empty() ? kExitOk : kExitViolated;
}

int run_emit_model(const std::string& topology, const std::string& protocol,
                   const std::string& output) {
    auto variant = parse_variant(protocol);
    auto topo = load_topology(topology);
    if (variant == scj::ProtocolVariant::Proposed && topo.has_named_terminator())
        topo = topo.rewritten_for_proposed();
    auto bundle = scj::build_model(topo, variant);
    write_output(output, dsl::format(bundle.defs));
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mk2 - mission-framework termination-protocol models, explicit-state checks, "
                 "and a hierarchical scheduling simulator"};
    app.require_subcommand(1);

    std::string topology = "two-thread-buffer";
    std::string protocol = "current";
    std::string model_path;
    std::string format = "json";
    std::string output;
    std::string mode = "forall-precedes";
    std::string first, second;
    std::string scenario_path;
    std::int64_t horizon = 0;
    LimitFlags limits;

    auto add_common = [&](CLI::App* cmd, bool with_protocol) {
        cmd->add_option("--topology", topology, "builtin name or .topo/.json path");
        if (with_protocol)
            cmd->add_option("--protocol", protocol, "current or proposed");
        cmd->add_option("--format", format, "json or text");
        cmd->add_option("--output,-o", output, "output path (default stdout)");
    };

    auto* check = app.add_subcommand("check", "explore a model; report deadlocks/divergences");
    add_common(check, true);
    check->add_option("--model", model_path, "check a raw .cmodel file instead of a topology");
    limits.attach(check);

    auto* compare = app.add_subcommand("compare", "state counts of both protocol variants");
    add_common(compare, false);
    limits.attach(compare);

    auto* order = app.add_subcommand("order", "event-ordering query over the state space");
    add_common(order, true);
    order->add_option("--mode", mode, "forall-precedes or exists-interleaving");
    order->add_option("--first", first, "first event pattern, e.g. done_mission_1.subMissionA")
        ->required();
    order->add_option("--second", second, "second event pattern")->required();
    limits.attach(order);

    auto* sim = app.add_subcommand("sim", "run a scheduling scenario");
    sim->add_option("--scenario", scenario_path, "scenario JSON path")->required();
    sim->add_option("--horizon", horizon, "simulation horizon in ms");
    sim->add_option("--format", format, "json or text (Gantt)");
    sim->add_option("--output,-o", output, "output path (default stdout)");

    auto* emit = app.add_subcommand("emit-model", "print the generated .cmodel text");
    add_common(emit, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (check->parsed())
            return run_check(topology, protocol, model_path, limits, format, output);
        if (compare->parsed()) return run_compare(topology, limits, format, output);
        if (order->parsed())
            return run_order(topology, protocol, mode, first, second, limits, format, output);
        if (sim->parsed()) return run_sim(scenario_path, horizon, format, output);
        if (emit->parsed()) return run_emit_model(topology, protocol, output);
    } catch (const mk2::ModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
