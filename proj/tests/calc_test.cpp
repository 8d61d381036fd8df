#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "mk2/errors.hpp"
#include "test_util.hpp"

using namespace mk2;
using namespace testutil;
using model::Atom;
using model::Expr;
using model::Term;

namespace {

std::multiset<std::string> label_set(const std::vector<calc::Transition>& ts,
                                     const model::ModelDefs& defs) {
    std::multiset<std::string> out;
    for (const auto& t : ts) out.insert(calc::label_to_string(t.label, defs));
    return out;
}

} // namespace

TEST_CASE("skip offers only tick to omega") {
    auto defs = abc_defs();
    set_main(defs, model::make_skip());
    defs.validate();
    auto c = calc::initial(defs);
    auto ts = calc::step(c, defs);
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].label.is_tick());
    CHECK(ts[0].target.term->kind == Term::Kind::Omega);
    CHECK(calc::step(ts[0].target, defs).empty()); // omega has no transitions
}

TEST_CASE("stop offers nothing") {
    auto defs = abc_defs();
    set_main(defs, model::make_stop());
    defs.validate();
    CHECK(calc::step(calc::initial(defs), defs).empty());
}

TEST_CASE("external choice offers both branches") {
    auto defs = abc_defs();
    set_main(defs, model::make_ext_choice(px0(0, model::make_skip()), px0(1, model::make_skip())));
    defs.validate();
    auto ts = calc::step(calc::initial(defs), defs);
    CHECK(label_set(ts, defs) == std::multiset<std::string>{"a", "b"});
    for (const auto& t : ts) CHECK(t.target.term->kind == Term::Kind::Skip);
}

TEST_CASE("external choice is not resolved by internal moves") {
    auto defs = abc_defs();
    auto inner = model::make_int_choice(px0(0, model::make_skip()), px0(1, model::make_skip()));
    set_main(defs, model::make_ext_choice(inner, px0(2, model::make_skip())));
    defs.validate();
    auto ts = calc::step(calc::initial(defs), defs);
    // two taus (one per internal branch) plus the visible c
    CHECK(label_set(ts, defs) == std::multiset<std::string>{"c", "tau", "tau"});
    for (const auto& t : ts) {
        if (!t.label.is_tau()) continue;
        CHECK(t.target.term->kind == Term::Kind::ExtChoice); // choice still pending
    }
}

TEST_CASE("sequence promotes left events and converts tick to internal") {
    auto defs = abc_defs();
    set_main(defs, model::make_seq(px0(0, model::make_skip()), px0(1, model::make_skip())));
    defs.validate();
    auto c = calc::initial(defs);
    auto ts = calc::step(c, defs);
    REQUIRE(label_set(ts, defs) == std::multiset<std::string>{"a"});
    auto after_a = calc::step(ts[0].target, defs);
    REQUIRE(label_set(after_a, defs) == std::multiset<std::string>{"tau"});
    auto after_tau = calc::step(after_a[0].target, defs);
    CHECK(label_set(after_tau, defs) == std::multiset<std::string>{"b"});
}

TEST_CASE("parallel: synchronised vs interleaved") {
    auto defs = abc_defs();
    auto operand = [&] { return px0(0, model::make_skip()); };

    SUBCASE("a in the synchronisation set: one joint event") {
        set_main(defs, model::make_par(operand(), {}, {0}, {}, operand()));
        defs.validate();
        auto ts = calc::step(calc::initial(defs), defs);
        REQUIRE(ts.size() == 1);
        CHECK(calc::label_to_string(ts[0].label, defs) == "a");
        // afterwards both sides are Skip and only the joint tick remains
        auto after = calc::step(ts[0].target, defs);
        REQUIRE(after.size() == 1);
        CHECK(after[0].label.is_tick());
        CHECK(after[0].target.term->kind == Term::Kind::Omega);
    }
    SUBCASE("empty synchronisation set: two interleaved events") {
        set_main(defs, model::make_par(operand(), {}, {}, {}, operand()));
        defs.validate();
        auto ts = calc::step(calc::initial(defs), defs);
        CHECK(label_set(ts, defs) == std::multiset<std::string>{"a", "a"});
    }
}

TEST_CASE("input prefix enumerates the parameter domain") {
    model::ModelDefs defs;
    auto d = defs.add_symbol_domain("D", {"x1", "x2", "x3"});
    auto c = defs.add_channel("c", {d});
    model::Comm comm;
    comm.channel = c;
    model::CommPart part;
    part.kind = model::CommPart::Kind::In;
    part.binder = "v";
    comm.parts.push_back(part);
    set_main(defs, model::make_prefix(comm, model::make_skip()));
    defs.validate();
    auto ts = calc::step(calc::initial(defs), defs);
    CHECK(label_set(ts, defs) == std::multiset<std::string>{"c.x1", "c.x2", "c.x3"});
}

TEST_CASE("assignment is a single atomic internal step") {
    model::ModelDefs defs;
    defs.add_channel("a");
    defs.add_variable("x", model::kBoolDomain, Atom::boolean(false));
    defs.add_variable("y", model::kBoolDomain, Atom::boolean(true));
    // simultaneous swap: x, y := y, x
    set_main(defs, model::make_assign({"x", "y"}, {Expr::make_var("y"), Expr::make_var("x")}));
    defs.validate();
    calc::StepEngine engine(defs);
    auto ts = engine.transitions(engine.initial());
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].label.is_tau());
    const auto& store = ts[0].target.store;
    CHECK(store.get(defs, 0) == Atom::boolean(true));  // x took old y
    CHECK(store.get(defs, 1) == Atom::boolean(false)); // y took old x
}

TEST_CASE("guard and conditional evaluate transparently") {
    model::ModelDefs defs;
    defs.add_channel("a");
    defs.add_channel("b");
    defs.add_variable("flag", model::kBoolDomain, Atom::boolean(true));
    auto branch_a = px0(0, model::make_skip());
    auto branch_b = px0(1, model::make_skip());
    set_main(defs, model::make_cond({{Expr::make_var("flag"), branch_a},
                                     {Expr::make_unary(Expr::Kind::Not, Expr::make_var("flag")),
                                      branch_b}}));
    defs.validate();
    auto ts = calc::step(calc::initial(defs), defs);
    CHECK(label_set(ts, defs) == std::multiset<std::string>{"a"});

    model::ModelDefs defs2;
    defs2.add_channel("a");
    defs2.add_variable("flag", model::kBoolDomain, Atom::boolean(false));
    set_main(defs2, model::make_guard(Expr::make_var("flag"), px0(0, model::make_skip())));
    defs2.validate();
    CHECK(calc::step(calc::initial(defs2), defs2).empty());
}

TEST_CASE("hiding relabels hidden events as internal") {
    auto defs = abc_defs();
    set_main(defs, model::make_hide(px0(0, px0(1, model::make_skip())), {0}));
    defs.validate();
    auto ts = calc::step(calc::initial(defs), defs);
    REQUIRE(ts.size() == 1);
    CHECK(ts[0].label.is_tau());
    auto ts2 = calc::step(ts[0].target, defs);
    CHECK(label_set(ts2, defs) == std::multiset<std::string>{"b"});
}

TEST_CASE("reference unfolds inside step; non-productive recursion is caught") {
    auto defs = abc_defs();
    defs.add_process("P", px0(0, model::make_ref("P")));
    set_main(defs, model::make_ref("P"));
    defs.validate();
    auto ts = calc::step(calc::initial(defs), defs);
    CHECK(label_set(ts, defs) == std::multiset<std::string>{"a"});

    model::ModelDefs bad = abc_defs();
    bad.add_process("Q", model::make_ref("Q"));
    set_main(bad, model::make_ref("Q"));
    bad.validate();
    CHECK_THROWS_AS((void)calc::step(calc::initial(bad), bad), SemanticsError);
}

TEST_CASE("initial configuration") {
    SUBCASE("identity case: main = Skip") {
        auto defs = abc_defs();
        set_main(defs, model::make_skip());
        defs.validate();
        auto c = calc::initial(defs);
        CHECK(c.term->kind == Term::Kind::Skip);
        CHECK(c.store.size() == 0);
    }
    SUBCASE("definition lookup stays lazy") {
        auto defs = abc_defs();
        defs.add_process("P", px0(0, model::make_skip()));
        set_main(defs, model::make_ref("P"));
        defs.validate();
        auto c = calc::initial(defs);
        CHECK(c.term->kind == Term::Kind::Ref); // unfolded only inside step
    }
    SUBCASE("unknown process name") {
        auto defs = abc_defs();
        set_main(defs, model::make_skip());
        defs.validate();
        CHECK_THROWS_AS((void)calc::initial(defs, "Nope"), SemanticsError);
    }
}

TEST_CASE("name-set violation is an error") {
    model::ModelDefs defs;
    defs.add_channel("a");
    defs.add_variable("x", model::kBoolDomain, Atom::boolean(false));
    // left side writes x but declares an empty name set
    auto writer = model::make_assign({"x"}, {Expr::make_lit(Atom::boolean(true))});
    set_main(defs, model::make_par(writer, {}, {}, {}, px0(0, model::make_skip())));
    defs.validate(); // statically fine; the violation is dynamic
    CHECK_THROWS_AS((void)calc::step(calc::initial(defs), defs), SemanticsError);

    model::ModelDefs ok;
    ok.add_channel("a");
    ok.add_variable("x", model::kBoolDomain, Atom::boolean(false));
    auto writer2 = model::make_assign({"x"}, {Expr::make_lit(Atom::boolean(true))});
    set_main(ok, model::make_par(writer2, {"x"}, {}, {}, px0(0, model::make_skip())));
    ok.validate();
    CHECK_NOTHROW((void)calc::step(calc::initial(ok), ok));
}

TEST_CASE("alphabet follows references to a fixed point") {
    auto defs = abc_defs();
    defs.add_process("P", px0(1, model::make_ref("Q")));
    defs.add_process("Q", px0(2, model::make_ref("P")));
    set_main(defs, model::make_skip());
    defs.validate();

    CHECK(calc::alphabet(model::make_skip(), defs).empty());
    auto two = calc::alphabet(px0(0, px0(1, model::make_stop())), defs);
    CHECK(two == std::vector<model::ChannelId>{0, 1});
    auto rec = calc::alphabet(model::make_ref("P"), defs);
    CHECK(rec == std::vector<model::ChannelId>{1, 2});
}

TEST_CASE("purity: repeated step calls return the identical transition set") {
    for (std::uint32_t seed = 1; seed <= 25; ++seed) {
        auto defs = RandomModelGen(seed).generate();
        calc::StepEngine engine(defs);
        auto c = engine.initial();
        for (int hop = 0; hop < 5; ++hop) {
            auto first = engine.transitions(c);
            auto second = engine.transitions(c);
            REQUIRE(first.size() == second.size());
            for (std::size_t i = 0; i < first.size(); ++i) {
                CHECK(first[i].label == second[i].label);
                CHECK(first[i].target == second[i].target);
            }
            if (first.empty()) break;
            c = first[hop % first.size()].target;
        }
    }
}

TEST_CASE("tick discipline on random models") {
    for (std::uint32_t seed = 100; seed < 140; ++seed) {
        auto defs = RandomModelGen(seed).generate();
        calc::StepEngine engine(defs);
        std::set<std::pair<const Term*, std::vector<std::uint8_t>>> seen;
        std::vector<calc::Configuration> work{engine.initial()};
        while (!work.empty() && seen.size() < 400) {
            auto c = work.back();
            work.pop_back();
            if (!seen.insert({c.term.get(), c.store.raw()}).second) continue;
            for (const auto& t : engine.transitions(c)) {
                if (t.label.is_tick()) {
                    CHECK(t.target.term->kind == Term::Kind::Omega);
                    CHECK(engine.transitions(t.target).empty());
                }
                work.push_back(t.target);
            }
        }
    }
}

// Brute-force synchronised-product oracle: builds the product of the two
// operand transition systems independently of the Par rule, then compares
// the full edge relation against the explored Par term. States on both
// sides are named by structural keys, which coincide by construction.
namespace {

struct SmallLts {
    std::string initial;
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> edges;
    std::set<std::string> can_tick;
};

SmallLts enumerate_term(const model::ModelDefs& defs, const TermPtr& start) {
    calc::StepEngine engine(defs);
    calc::Store store; // operands are store-free in this suite
    SmallLts lts;
    lts.initial = structural_key(start);
    std::set<std::string> seen;
    std::vector<TermPtr> work{start};
    while (!work.empty()) {
        TermPtr t = work.back();
        work.pop_back();
        auto key = structural_key(t);
        if (!seen.insert(key).second) continue;
        lts.edges[key]; // materialise even when deadlocked
        for (const auto& tr : engine.transitions({engine.interner().intern(t), store})) {
            if (tr.label.is_tick()) {
                lts.can_tick.insert(key);
                continue;
            }
            lts.edges[key].push_back(
                {calc::label_to_string(tr.label, defs), structural_key(tr.target.term)});
            work.push_back(tr.target.term);
        }
    }
    return lts;
}

struct EdgeSet {
    std::set<std::string> states;
    std::set<std::string> edges;
};

EdgeSet product_lts(const model::ModelDefs& defs, const SmallLts& l, const SmallLts& r,
                    const std::vector<model::ChannelId>& sync) {
    std::set<std::string> sync_names;
    for (auto c : sync) sync_names.insert(defs.channel(c).name);
    auto chan_of = [](const std::string& label) {
        auto dot = label.find('.');
        return dot == std::string::npos ? label : label.substr(0, dot);
    };
    auto name = [](const std::string& a, const std::string& b) { return a + "##" + b; };

    EdgeSet out;
    std::vector<std::pair<std::string, std::string>> work{{l.initial, r.initial}};
    while (!work.empty()) {
        auto [ls, rs] = work.back();
        work.pop_back();
        if (!out.states.insert(name(ls, rs)).second) continue;
        for (const auto& [label, ldst] : l.edges.at(ls)) {
            bool synced = label != "tau" && sync_names.count(chan_of(label));
            if (!synced) {
                out.edges.insert(name(ls, rs) + " " + label + " " + name(ldst, rs));
                work.push_back({ldst, rs});
            } else {
                for (const auto& [rlabel, rdst] : r.edges.at(rs)) {
                    if (rlabel != label) continue;
                    out.edges.insert(name(ls, rs) + " " + label + " " + name(ldst, rdst));
                    work.push_back({ldst, rdst});
                }
            }
        }
        for (const auto& [label, rdst] : r.edges.at(rs)) {
            if (label != "tau" && sync_names.count(chan_of(label))) continue;
            out.edges.insert(name(ls, rs) + " " + label + " " + name(ls, rdst));
            work.push_back({ls, rdst});
        }
        if (l.can_tick.count(ls) && r.can_tick.count(rs)) {
            out.edges.insert(name(ls, rs) + " tick DONE");
            out.states.insert("DONE");
        }
    }
    return out;
}

EdgeSet par_lts(const model::ModelDefs& defs, const TermPtr& par_term) {
    calc::StepEngine engine(defs);
    calc::Store store;
    EdgeSet out;
    std::set<std::string> seen;
    std::vector<TermPtr> work{par_term};
    auto name = [&](const TermPtr& t) {
        if (t->kind == Term::Kind::Omega) return std::string("DONE");
        return structural_key(t->left) + "##" + structural_key(t->right);
    };
    while (!work.empty()) {
        TermPtr t = work.back();
        work.pop_back();
        if (!seen.insert(structural_key(t)).second) continue;
        out.states.insert(name(t));
        if (t->kind == Term::Kind::Omega) continue;
        for (const auto& tr : engine.transitions({engine.interner().intern(t), store})) {
            if (tr.label.is_tick()) {
                out.edges.insert(name(t) + " tick DONE");
                out.states.insert("DONE");
                continue;
            }
            out.edges.insert(name(t) + " " + calc::label_to_string(tr.label, defs) + " " +
                             name(tr.target.term));
            work.push_back(tr.target.term);
        }
    }
    return out;
}

} // namespace

TEST_CASE("parallel composition equals the brute-force synchronised product") {
    auto defs = abc_defs();
    set_main(defs, model::make_skip());
    defs.validate();
    // operand pool: small store-free terms with <= 4 states over <= 3 channels
    std::vector<TermPtr> pool = {
        px0(0, model::make_skip()),
        px0(0, px0(1, model::make_skip())),
        model::make_ext_choice(px0(0, model::make_skip()), px0(1, model::make_stop())),
        model::make_seq(px0(2, model::make_skip()), px0(0, model::make_skip())),
        model::make_skip(),
        model::make_stop(),
        model::make_int_choice(px0(0, model::make_skip()), px0(2, model::make_skip())),
    };
    std::vector<std::vector<model::ChannelId>> syncs = {{}, {0}, {0, 1}, {0, 1, 2}};

    int checked = 0;
    for (const auto& left : pool) {
        for (const auto& right : pool) {
            auto l = enumerate_term(defs, left);
            auto r = enumerate_term(defs, right);
            for (const auto& sync : syncs) {
                auto par = model::make_par(left, {}, sync, {}, right);
                auto expected = product_lts(defs, l, r, sync);
                auto actual = par_lts(defs, par);
                CHECK(expected.edges == actual.edges);
                CHECK(expected.states == actual.states);
                ++checked;
            }
        }
    }
    CHECK(checked == 7 * 7 * 4);
}

TEST_CASE("bounded-trace laws: hiding erasure, choice commutativity, seq unit") {
    auto defs = abc_defs();
    std::vector<TermPtr> pool = {
        px0(0, px0(1, model::make_skip())),
        model::make_ext_choice(px0(0, model::make_skip()), px0(1, px0(2, model::make_skip()))),
        model::make_seq(px0(0, model::make_skip()), px0(1, model::make_skip())),
        model::make_par(px0(0, model::make_skip()), {}, {0}, {}, px0(0, px0(1, model::make_skip()))),
    };

    for (const auto& p : pool) {
        for (const auto& q : pool) {
            auto pq = bounded_traces(defs, model::make_ext_choice(p, q), 8);
            auto qp = bounded_traces(defs, model::make_ext_choice(q, p), 8);
            CHECK(pq == qp);
        }
        auto skip_p = bounded_traces(defs, model::make_seq(model::make_skip(), p), 8);
        auto just_p = bounded_traces(defs, p, 8);
        CHECK(skip_p == just_p);
    }

    // hiding erasure: traces of P \ {a} equal traces of P with a-events deleted
    for (const auto& p : pool) {
        auto hidden = bounded_traces(defs, model::make_hide(p, {0}), 8);
        std::set<std::string> expected;
        for (auto trace : bounded_traces(defs, p, 8)) {
            std::string filtered;
            std::stringstream ss(trace);
            std::string part;
            while (std::getline(ss, part, '|'))
                if (!part.empty() && part != "a") filtered += "|" + part;
            expected.insert(filtered);
        }
        CHECK(hidden == expected);
    }
}
