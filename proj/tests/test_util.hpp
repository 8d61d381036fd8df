#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mk2/calc/semantics.hpp"
#include "mk2/model/defs.hpp"

namespace testutil {

using namespace mk2;
using model::Atom;
using model::ChannelId;
using model::DomainId;
using model::Expr;
using model::ExprPtr;
using model::ModelDefs;
using model::TermPtr;

// --- tiny builders --------------------------------------------------------------

inline model::Comm comm0(ChannelId ch) {
    model::Comm c;
    c.channel = ch;
    return c;
}

inline TermPtr px0(ChannelId ch, TermPtr body) { return model::make_prefix(comm0(ch), body); }

/// Model with channels a, b, c (no parameters) and no variables.
inline ModelDefs abc_defs() {
    ModelDefs defs;
    defs.add_channel("a");
    defs.add_channel("b");
    defs.add_channel("c");
    return defs;
}

inline void set_main(ModelDefs& defs, TermPtr body) {
    defs.add_process("Main", body);
    defs.main = "Main";
}

// --- structural key (test-local, independent of the interner) -----------------------

inline std::string structural_key(const TermPtr& t) {
    if (!t) return "_";
    using model::Term;
    std::string s(1, static_cast<char>('A' + static_cast<int>(t->kind)));
    switch (t->kind) {
    case Term::Kind::Prefix: {
        s += std::to_string(t->comm().channel);
        for (const auto& p : t->comm().parts) {
            s += p.kind == model::CommPart::Kind::In ? "?" + p.binder : "&";
        }
        break;
    }
    case Term::Kind::Assign:
        for (const auto& v : t->assign_vars()) s += v + ",";
        break;
    case Term::Kind::Ref: s += t->ref_name(); break;
    default: break;
    }
    std::string lk = structural_key(t->left);
    std::string rk = structural_key(t->right);
    // keys of commutative choices are order-independent
    if ((t->kind == Term::Kind::ExtChoice || t->kind == Term::Kind::IntChoice) && rk < lk)
        std::swap(lk, rk);
    s += "(" + lk + "," + rk;
    for (const auto& [pred, body] : t->branches()) s += "," + structural_key(body);
    s += ")";
    return s;
}

// --- bounded trace sets ---------------------------------------------------------------

/// Visible-event traces (internal transitions elided, termination included as
/// "tick") up to the given depth, as sorted rendered strings.
inline std::set<std::string> bounded_traces(const ModelDefs& defs, const TermPtr& term,
                                            int depth) {
    calc::StepEngine engine(defs);
    calc::Configuration init{engine.interner().intern(term), calc::Store::initial(defs)};
    std::set<std::string> out;
    struct Frame {
        calc::Configuration c;
        std::string trace;
        int left;
    };
    std::vector<Frame> work{{init, "", depth}};
    std::set<std::pair<std::string, const model::Term*>> seen; // (trace, state) pairs
    while (!work.empty()) {
        Frame f = work.back();
        work.pop_back();
        out.insert(f.trace);
        if (f.left == 0) continue;
        for (const auto& tr : engine.transitions(f.c)) {
            std::string next = f.trace;
            int budget = f.left;
            if (!tr.label.is_tau()) {
                next += "|" + calc::label_to_string(tr.label, defs);
                budget -= 1;
            }
            auto key = std::make_pair(next + "#" +
                                          std::string(1, static_cast<char>('0' + budget)),
                                      tr.target.term.get());
            if (!seen.insert({key.first, key.second}).second) continue;
            work.push_back({tr.target, std::move(next), budget});
        }
    }
    return out;
}

// --- naive recursive enumerator (oracle for the explorer) ----------------------------

struct NaiveLts {
    std::size_t states = 0;
    std::size_t transitions = 0;
    bool capped = false;
};

inline void naive_walk(calc::StepEngine& engine, const calc::Configuration& c,
                       std::set<std::pair<const model::Term*, std::vector<std::uint8_t>>>& seen,
                       NaiveLts& out, std::size_t cap) {
    if (seen.size() > cap) {
        out.capped = true;
        return;
    }
    if (!seen.insert({c.term.get(), c.store.raw()}).second) return;
    for (const auto& t : engine.transitions(c)) {
        out.transitions += 1;
        naive_walk(engine, t.target, seen, out, cap);
        if (out.capped) return;
    }
}

inline NaiveLts naive_enumerate(const ModelDefs& defs, std::size_t cap = 100000) {
    calc::StepEngine engine(defs);
    std::set<std::pair<const model::Term*, std::vector<std::uint8_t>>> seen;
    NaiveLts out;
    naive_walk(engine, engine.initial(), seen, out, cap);
    out.states = seen.size();
    return out;
}

// --- random small models ----------------------------------------------------------------

class RandomModelGen {
  public:
    explicit RandomModelGen(std::uint32_t seed) : rng_(seed) {}

    ModelDefs generate() {
        ModelDefs defs;
        DomainId dd = defs.add_symbol_domain("D", {"a1", "a2", "a3"});
        ChannelId c0 = defs.add_channel("c0");
        ChannelId c1 = defs.add_channel("c1", {dd});
        ChannelId c2 = defs.add_channel("c2", {model::kBoolDomain});
        defs.add_variable("v0", model::kBoolDomain, Atom::boolean(false));
        defs.add_variable("v1", dd, Atom::symbol(defs.symbols.intern("a1")));
        chans_ = {c0, c1, c2};
        dom_d_ = dd;
        defs_ = &defs;
        binder_counter_ = 0;

        // A small auxiliary loop process referenced by generated terms.
        defs.add_process("Aux", px0(c0, model::make_ref("Aux")));
        defs.add_process("Fin", px0(c0, model::make_skip()));
        set_main(defs, term(3, {"v0", "v1"}, {}));
        defs.validate();
        return defs;
    }

  private:
    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    bool coin() { return pick(2) == 0; }

    ExprPtr bool_expr(const std::vector<std::pair<std::string, DomainId>>& env, int depth) {
        if (depth == 0 || pick(3) == 0) {
            switch (pick(3)) {
            case 0: return Expr::make_lit(Atom::boolean(coin()));
            case 1: return Expr::make_var("v0");
            default: {
                // compare v1 or a D-typed binder against an atom
                std::string var = "v1";
                for (const auto& [n, d] : env)
                    if (d == dom_d_ && coin()) var = n;
                auto atom = defs_->find_atom(pick(2) ? "a1" : "a2")->second;
                return Expr::make_binary(coin() ? Expr::Kind::Eq : Expr::Kind::Ne,
                                         Expr::make_var(var), Expr::make_lit(atom));
            }
            }
        }
        switch (pick(3)) {
        case 0:
            return Expr::make_unary(Expr::Kind::Not, bool_expr(env, depth - 1));
        case 1:
            return Expr::make_binary(Expr::Kind::And, bool_expr(env, depth - 1),
                                     bool_expr(env, depth - 1));
        default:
            return Expr::make_binary(Expr::Kind::Or, bool_expr(env, depth - 1),
                                     bool_expr(env, depth - 1));
        }
    }

    TermPtr prefix_term(int depth, std::vector<std::string> writable,
                        std::vector<std::pair<std::string, DomainId>> env) {
        ChannelId ch = chans_[pick(chans_.size())];
        model::Comm comm;
        comm.channel = ch;
        const auto& decl = defs_->channel(ch);
        for (auto pd : decl.params) {
            model::CommPart part;
            switch (pick(3)) {
            case 0: {
                part.kind = model::CommPart::Kind::In;
                part.binder = "b" + std::to_string(binder_counter_++);
                env.emplace_back(part.binder, pd);
                break;
            }
            case 1:
                part.kind = model::CommPart::Kind::Out;
                part.expr = pd == model::kBoolDomain
                                ? Expr::make_lit(Atom::boolean(coin()))
                                : Expr::make_lit(defs_->find_atom(coin() ? "a1" : "a2")->second);
                break;
            default:
                part.kind = model::CommPart::Kind::Dot;
                part.expr = pd == model::kBoolDomain ? Expr::make_var("v0")
                                                     : Expr::make_var("v1");
                break;
            }
            comm.parts.push_back(std::move(part));
        }
        return model::make_prefix(std::move(comm), term(depth - 1, std::move(writable), env));
    }

    TermPtr term(int depth, std::vector<std::string> writable,
                 std::vector<std::pair<std::string, DomainId>> env) {
        if (depth == 0) {
            switch (pick(4)) {
            case 0: return model::make_skip();
            case 1: return model::make_stop();
            case 2: return model::make_ref("Fin");
            default: return model::make_ref("Aux");
            }
        }
        switch (pick(12)) {
        case 0: return model::make_skip();
        case 1: return prefix_term(depth, writable, env);
        case 2:
            return model::make_ext_choice(term(depth - 1, writable, env),
                                          term(depth - 1, writable, env));
        case 3:
            return model::make_int_choice(term(depth - 1, writable, env),
                                          term(depth - 1, writable, env));
        case 4:
            return model::make_seq(term(depth - 1, writable, env),
                                   term(depth - 1, writable, env));
        case 5: {
            // split the writable variables between the two sides
            std::vector<std::string> left_ns, right_ns;
            for (const auto& v : writable) (coin() ? left_ns : right_ns).push_back(v);
            std::vector<ChannelId> sync;
            for (auto c : chans_)
                if (coin()) sync.push_back(c);
            return model::make_par(term(depth - 1, left_ns, env), left_ns, sync, right_ns,
                                   term(depth - 1, right_ns, env));
        }
        case 6: {
            std::vector<std::string> left_ns, right_ns;
            for (const auto& v : writable) (coin() ? left_ns : right_ns).push_back(v);
            return model::make_interleave(term(depth - 1, left_ns, env), left_ns, right_ns,
                                          term(depth - 1, right_ns, env));
        }
        case 7: {
            std::vector<ChannelId> hidden{chans_[pick(chans_.size())]};
            return model::make_hide(term(depth - 1, writable, env), hidden);
        }
        case 8: {
            auto pred = bool_expr(env, 2);
            return model::make_cond(
                {{pred, term(depth - 1, writable, env)},
                 {Expr::make_unary(Expr::Kind::Not, pred), term(depth - 1, writable, env)}});
        }
        case 9: {
            if (writable.empty()) return prefix_term(depth, writable, env);
            const std::string& v = writable[pick(writable.size())];
            const auto* decl = defs_->find_variable(v);
            ExprPtr value =
                decl->domain == model::kBoolDomain
                    ? bool_expr(env, 1)
                    : Expr::make_lit(defs_->find_atom(coin() ? "a2" : "a3")->second);
            return model::make_seq(model::make_assign({v}, {value}),
                                   term(depth - 1, writable, env));
        }
        case 10: {
            std::string binder = "it" + std::to_string(binder_counter_++);
            env.emplace_back(binder, dom_d_);
            return model::make_iter_interleave(binder, dom_d_, term(1, {}, env));
        }
        default:
            return model::make_guard(bool_expr(env, 2), term(depth - 1, writable, env));
        }
    }

    std::mt19937 rng_;
    std::vector<ChannelId> chans_;
    DomainId dom_d_ = 0;
    ModelDefs* defs_ = nullptr;
    int binder_counter_ = 0;
};

} // namespace testutil
