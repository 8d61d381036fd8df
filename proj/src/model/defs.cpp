#include "mk2/model/defs.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include "mk2/errors.hpp"

namespace mk2::model {

ModelDefs::ModelDefs() {
    ValueDomain boolean;
    boolean.name = "bool";
    boolean.kind = ValueDomain::Kind::Bool;
    domains.push_back(std::move(boolean));
}

DomainId ModelDefs::add_symbol_domain(const std::string& name,
                                      const std::vector<std::string>& members) {
    ValueDomain d;
    d.name = name;
    d.kind = ValueDomain::Kind::Symbols;
    for (const auto& m : members) d.members.push_back(symbols.intern(m));
    domains.push_back(std::move(d));
    return static_cast<DomainId>(domains.size() - 1);
}

DomainId ModelDefs::add_int_domain(const std::string& name, std::int32_t lo, std::int32_t hi) {
    ValueDomain d;
    d.name = name;
    d.kind = ValueDomain::Kind::IntRange;
    d.lo = lo;
    d.hi = hi;
    domains.push_back(std::move(d));
    return static_cast<DomainId>(domains.size() - 1);
}

ChannelId ModelDefs::add_channel(const std::string& name, std::vector<DomainId> params) {
    channels.push_back(ChannelDecl{name, std::move(params)});
    return static_cast<ChannelId>(channels.size() - 1);
}

void ModelDefs::add_variable(const std::string& name, DomainId domain, Atom initial) {
    variables.push_back(VarDecl{name, domain, initial});
}

void ModelDefs::add_process(const std::string& name, TermPtr body,
                            std::vector<std::pair<std::string, DomainId>> params) {
    processes.push_back(ProcessDef{name, std::move(params), std::move(body)});
}

std::optional<DomainId> ModelDefs::find_domain(const std::string& name) const {
    for (std::size_t i = 0; i < domains.size(); ++i)
        if (domains[i].name == name) return static_cast<DomainId>(i);
    return std::nullopt;
}

std::optional<ChannelId> ModelDefs::find_channel(const std::string& name) const {
    for (std::size_t i = 0; i < channels.size(); ++i)
        if (channels[i].name == name) return static_cast<ChannelId>(i);
    return std::nullopt;
}

const ProcessDef* ModelDefs::find_process(const std::string& name) const {
    for (const auto& p : processes)
        if (p.name == name) return &p;
    return nullptr;
}

const VarDecl* ModelDefs::find_variable(const std::string& name) const {
    for (const auto& v : variables)
        if (v.name == name) return &v;
    return nullptr;
}

std::optional<std::pair<DomainId, Atom>> ModelDefs::find_atom(const std::string& name) const {
    if (name == "true") return std::make_pair(kBoolDomain, Atom::boolean(true));
    if (name == "false") return std::make_pair(kBoolDomain, Atom::boolean(false));
    auto id = symbols.find(name);
    if (id < 0) return std::nullopt;
    for (std::size_t i = 0; i < domains.size(); ++i) {
        const auto& d = domains[i];
        if (d.kind != ValueDomain::Kind::Symbols) continue;
        if (std::find(d.members.begin(), d.members.end(), id) != d.members.end())
            return std::make_pair(static_cast<DomainId>(i), Atom::symbol(id));
    }
    return std::nullopt;
}

std::string ModelDefs::atom_name(const Atom& a) const {
    switch (a.kind()) {
    case Atom::Kind::Bool: return a.as_bool() ? "true" : "false";
    case Atom::Kind::Int: return std::to_string(a.as_int());
    case Atom::Kind::Sym: return symbols.name(a.sym_id());
    }
    return "?";
}

namespace {

using TypeEnv = std::vector<std::pair<std::string, DomainId>>;

std::optional<DomainId> env_lookup(const TypeEnv& env, const std::string& name) {
    for (auto it = env.rbegin(); it != env.rend(); ++it)
        if (it->first == name) return it->second;
    return std::nullopt;
}

bool domain_subset(const ModelDefs& defs, DomainId sub, DomainId super) {
    if (sub == super) return true;
    const auto& a = defs.domain(sub);
    const auto& b = defs.domain(super);
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!b.contains(a.member(i))) return false;
    return true;
}

class Validator {
  public:
    Validator(const ModelDefs& defs, std::int32_t max_range) : defs_(defs), max_range_(max_range) {}

    void run() {
        check_domains();
        check_channels();
        check_variables();
        check_processes();
        if (defs_.main.empty()) throw ValidationError("model has no main process");
        const auto* mp = defs_.find_process(defs_.main);
        if (!mp) throw ValidationError("unknown main process '" + defs_.main + "'");
        if (!mp->params.empty())
            throw ValidationError("main process '" + defs_.main + "' must not take parameters");
    }

  private:
    void check_domains() {
        std::unordered_set<std::string> names;
        for (const auto& d : defs_.domains) {
            if (!names.insert(d.name).second)
                throw ValidationError("duplicate domain '" + d.name + "'");
            switch (d.kind) {
            case ValueDomain::Kind::Bool: break;
            case ValueDomain::Kind::IntRange:
                if (d.hi < d.lo)
                    throw ValidationError("empty integer range in domain '" + d.name + "'");
                if (d.hi - d.lo > max_range_)
                    throw ValidationError("integer range of domain '" + d.name +
                                          "' exceeds the configured bound of " +
                                          std::to_string(max_range_));
                break;
            case ValueDomain::Kind::Symbols: {
                if (d.members.empty())
                    throw ValidationError("domain '" + d.name + "' has no members");
                std::set<std::int32_t> uniq(d.members.begin(), d.members.end());
                if (uniq.size() != d.members.size())
                    throw ValidationError("domain '" + d.name + "' repeats a member");
                break;
            }
            }
        }
    }

    void check_channels() {
        std::unordered_set<std::string> names;
        for (const auto& c : defs_.channels) {
            if (!names.insert(c.name).second)
                throw ValidationError("duplicate channel '" + c.name + "'");
            for (auto p : c.params)
                if (p < 0 || static_cast<std::size_t>(p) >= defs_.domains.size())
                    throw ValidationError("channel '" + c.name + "' references an unknown domain");
        }
    }

    void check_variables() {
        std::unordered_set<std::string> names;
        for (const auto& v : defs_.variables) {
            if (!names.insert(v.name).second)
                throw ValidationError("duplicate variable '" + v.name + "'");
            if (v.domain < 0 || static_cast<std::size_t>(v.domain) >= defs_.domains.size())
                throw ValidationError("variable '" + v.name + "' has an unknown domain");
            if (!defs_.domain(v.domain).contains(v.initial))
                throw ValidationError("initial value of variable '" + v.name +
                                      "' lies outside its domain");
            if (defs_.find_atom(v.name))
                throw ValidationError("variable '" + v.name + "' collides with an atom name");
        }
    }

    void check_binder_name(const std::string& name, const char* what) {
        if (defs_.find_variable(name))
            throw ValidationError(std::string(what) + " '" + name + "' shadows a variable");
        if (defs_.find_atom(name))
            throw ValidationError(std::string(what) + " '" + name + "' shadows an atom");
    }

    void check_processes() {
        std::unordered_set<std::string> names;
        for (const auto& p : defs_.processes) {
            if (!names.insert(p.name).second)
                throw ValidationError("duplicate process '" + p.name + "'");
        }
        for (const auto& p : defs_.processes) {
            TypeEnv env;
            std::unordered_set<std::string> pnames;
            for (const auto& [pname, pdom] : p.params) {
                check_binder_name(pname, "process parameter");
                if (!pnames.insert(pname).second)
                    throw ValidationError("process '" + p.name + "' repeats parameter '" + pname +
                                          "'");
                if (pdom < 0 || static_cast<std::size_t>(pdom) >= defs_.domains.size())
                    throw ValidationError("parameter '" + pname + "' has an unknown domain");
                env.emplace_back(pname, pdom);
            }
            check_term(p.body, env, p.name);
        }
    }

    std::optional<DomainId> expr_domain(const ExprPtr& e, const TypeEnv& env) {
        switch (e->kind) {
        case Expr::Kind::Lit:
            if (e->lit.kind() == Atom::Kind::Bool) return kBoolDomain;
            if (e->lit.kind() == Atom::Kind::Sym) {
                auto found = defs_.find_atom(defs_.symbols.name(e->lit.sym_id()));
                if (found) return found->first;
            }
            return std::nullopt; // bare integer literal: typed by context
        case Expr::Kind::Var: {
            if (auto d = env_lookup(env, e->var)) return d;
            if (const auto* v = defs_.find_variable(e->var)) return v->domain;
            throw ValidationError("unknown identifier '" + e->var + "' in expression");
        }
        default: return kBoolDomain;
        }
    }

    void check_expr_fits(const ExprPtr& e, DomainId expected, const TypeEnv& env,
                         const std::string& where) {
        check_expr(e, env, where);
        if (e->kind == Expr::Kind::Lit) {
            if (!defs_.domain(expected).contains(e->lit))
                throw ValidationError("value '" + defs_.atom_name(e->lit) +
                                      "' lies outside domain '" + defs_.domain(expected).name +
                                      "' in " + where);
            return;
        }
        auto d = expr_domain(e, env);
        if (!d || !domain_subset(defs_, *d, expected))
            throw ValidationError("expression is not compatible with domain '" +
                                  defs_.domain(expected).name + "' in " + where);
    }

    void check_expr(const ExprPtr& e, const TypeEnv& env, const std::string& where) {
        if (!e) throw ValidationError("missing expression in " + where);
        switch (e->kind) {
        case Expr::Kind::Lit: return;
        case Expr::Kind::Var: (void)expr_domain(e, env); return;
        case Expr::Kind::Eq:
        case Expr::Kind::Ne: {
            check_expr(e->lhs, env, where);
            check_expr(e->rhs, env, where);
            auto dl = expr_domain(e->lhs, env);
            auto dr = expr_domain(e->rhs, env);
            if (dl && dr) {
                if (!domain_subset(defs_, *dl, *dr) && !domain_subset(defs_, *dr, *dl))
                    throw ValidationError("comparison between incompatible domains in " + where);
            } else if (dl) {
                check_expr_fits(e->rhs, *dl, env, where);
            } else if (dr) {
                check_expr_fits(e->lhs, *dr, env, where);
            }
            return;
        }
        case Expr::Kind::Not:
            check_expr_fits(e->lhs, kBoolDomain, env, where);
            return;
        case Expr::Kind::And:
        case Expr::Kind::Or:
            check_expr_fits(e->lhs, kBoolDomain, env, where);
            check_expr_fits(e->rhs, kBoolDomain, env, where);
            return;
        }
    }

    void check_channel_set(const std::vector<ChannelId>& chans, const std::string& where) {
        for (auto c : chans)
            if (c < 0 || static_cast<std::size_t>(c) >= defs_.channels.size())
                throw ValidationError("unknown channel in " + where);
    }

    void check_term(const TermPtr& t, TypeEnv env, const std::string& proc) {
        if (!t) throw ValidationError("missing term in process '" + proc + "'");
        const std::string where = "process '" + proc + "'";
        switch (t->kind) {
        case Term::Kind::Skip:
        case Term::Kind::Stop: return;
        case Term::Kind::Omega:
            throw ValidationError("Omega may not appear in model input (" + where + ")");
        case Term::Kind::Prefix: {
            if (t->comm().channel < 0 ||
                static_cast<std::size_t>(t->comm().channel) >= defs_.channels.size())
                throw ValidationError("unknown channel in " + where);
            const auto& ch = defs_.channel(t->comm().channel);
            if (t->comm().parts.size() != ch.params.size())
                throw ValidationError("arity mismatch on channel '" + ch.name + "' in " + where +
                                      ": expected " + std::to_string(ch.params.size()) +
                                      " parameter(s), got " + std::to_string(t->comm().parts.size()));
            TypeEnv body_env = env;
            for (std::size_t i = 0; i < t->comm().parts.size(); ++i) {
                const auto& part = t->comm().parts[i];
                DomainId pd = ch.params[i];
                switch (part.kind) {
                case CommPart::Kind::Dot:
                case CommPart::Kind::Out:
                    check_expr_fits(part.expr, pd, env,
                                    "communication on channel '" + ch.name + "'");
                    break;
                case CommPart::Kind::In:
                    check_binder_name(part.binder, "input binder");
                    body_env.emplace_back(part.binder, pd);
                    break;
                }
            }
            check_term(t->left, std::move(body_env), proc);
            return;
        }
        case Term::Kind::ExtChoice:
        case Term::Kind::IntChoice:
        case Term::Kind::Seq:
            check_term(t->left, env, proc);
            check_term(t->right, env, proc);
            return;
        case Term::Kind::Par:
        case Term::Kind::Interleave: {
            for (const auto& v : t->ns_left())
                if (!defs_.find_variable(v))
                    throw ValidationError("name set mentions unknown variable '" + v + "' in " +
                                          where);
            for (const auto& v : t->ns_right())
                if (!defs_.find_variable(v))
                    throw ValidationError("name set mentions unknown variable '" + v + "' in " +
                                          where);
            std::vector<std::string> inter;
            std::set_intersection(t->ns_left().begin(), t->ns_left().end(), t->ns_right().begin(),
                                  t->ns_right().end(), std::back_inserter(inter));
            if (!inter.empty())
                throw ValidationError("name sets of a parallel composition overlap on '" +
                                      inter.front() + "' in " + where);
            if (t->kind == Term::Kind::Par) check_channel_set(t->sync(), where);
            check_term(t->left, env, proc);
            check_term(t->right, env, proc);
            return;
        }
        case Term::Kind::IterInterleave: {
            if (t->iter_domain() < 0 ||
                static_cast<std::size_t>(t->iter_domain()) >= defs_.domains.size())
                throw ValidationError("iterated interleave over unknown domain in " + where);
            check_binder_name(t->binder(), "interleave binder");
            env.emplace_back(t->binder(), t->iter_domain());
            check_term(t->left, std::move(env), proc);
            return;
        }
        case Term::Kind::Hide:
            check_channel_set(t->sync(), where);
            check_term(t->left, env, proc);
            return;
        case Term::Kind::Cond: {
            if (t->branches().empty())
                throw ValidationError("conditional with no branches in " + where);
            for (const auto& [pred, body] : t->branches()) {
                check_expr_fits(pred, kBoolDomain, env, where);
                check_term(body, env, proc);
            }
            return;
        }
        case Term::Kind::Assign: {
            if (t->assign_vars().empty() || t->assign_vars().size() != t->assign_exprs().size())
                throw ValidationError("malformed assignment in " + where);
            std::unordered_set<std::string> targets;
            for (std::size_t i = 0; i < t->assign_vars().size(); ++i) {
                const auto& name = t->assign_vars()[i];
                if (env_lookup(env, name))
                    throw ValidationError("assignment to bound name '" + name + "' in " + where);
                const auto* v = defs_.find_variable(name);
                if (!v) throw ValidationError("assignment to unknown variable '" + name + "' in " +
                                              where);
                if (!targets.insert(name).second)
                    throw ValidationError("assignment repeats target '" + name + "' in " + where);
                check_expr_fits(t->assign_exprs()[i], v->domain, env,
                                "assignment to '" + name + "'");
            }
            return;
        }
        case Term::Kind::Guard:
            check_expr_fits(t->guard(), kBoolDomain, env, where);
            check_term(t->left, env, proc);
            return;
        case Term::Kind::Ref: {
            const auto* p = defs_.find_process(t->ref_name());
            if (!p) throw ValidationError("reference to unknown process '" + t->ref_name() + "' in " +
                                          where);
            if (p->params.size() != t->ref_args().size())
                throw ValidationError("process '" + t->ref_name() + "' expects " +
                                      std::to_string(p->params.size()) + " argument(s) in " +
                                      where);
            for (std::size_t i = 0; i < t->ref_args().size(); ++i)
                check_expr_fits(t->ref_args()[i], p->params[i].second, env,
                                "argument of '" + t->ref_name() + "'");
            return;
        }
        }
    }

    const ModelDefs& defs_;
    std::int32_t max_range_;
};

bool expr_equal(const ModelDefs& da, const ExprPtr& a, const ModelDefs& db, const ExprPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
    case Expr::Kind::Lit:
        if (a->lit.kind() != b->lit.kind()) return false;
        return da.atom_name(a->lit) == db.atom_name(b->lit);
    case Expr::Kind::Var: return a->var == b->var;
    case Expr::Kind::Not: return expr_equal(da, a->lhs, db, b->lhs);
    default:
        return expr_equal(da, a->lhs, db, b->lhs) && expr_equal(da, a->rhs, db, b->rhs);
    }
}

bool term_equal(const ModelDefs& da, const TermPtr& a, const ModelDefs& db, const TermPtr& b) {
    if (!a || !b) return !a && !b;
    if (a->kind != b->kind) return false;
    auto chan_name = [](const ModelDefs& d, ChannelId c) { return d.channel(c).name; };
    auto chanset_equal = [&](const std::vector<ChannelId>& xs, const std::vector<ChannelId>& ys) {
        if (xs.size() != ys.size()) return false;
        std::vector<std::string> xn, yn;
        for (auto c : xs) xn.push_back(chan_name(da, c));
        for (auto c : ys) yn.push_back(chan_name(db, c));
        std::sort(xn.begin(), xn.end());
        std::sort(yn.begin(), yn.end());
        return xn == yn;
    };
    switch (a->kind) {
    case Term::Kind::Skip:
    case Term::Kind::Stop:
    case Term::Kind::Omega: return true;
    case Term::Kind::Prefix: {
        if (chan_name(da, a->comm().channel) != chan_name(db, b->comm().channel)) return false;
        if (a->comm().parts.size() != b->comm().parts.size()) return false;
        for (std::size_t i = 0; i < a->comm().parts.size(); ++i) {
            const auto& pa = a->comm().parts[i];
            const auto& pb = b->comm().parts[i];
            if (pa.kind != pb.kind) return false;
            if (pa.kind == CommPart::Kind::In) {
                if (pa.binder != pb.binder) return false;
            } else if (!expr_equal(da, pa.expr, db, pb.expr)) {
                return false;
            }
        }
        return term_equal(da, a->left, db, b->left);
    }
    case Term::Kind::ExtChoice:
    case Term::Kind::IntChoice:
    case Term::Kind::Seq:
        return term_equal(da, a->left, db, b->left) && term_equal(da, a->right, db, b->right);
    case Term::Kind::Par:
        if (!chanset_equal(a->sync(), b->sync())) return false;
        [[fallthrough]];
    case Term::Kind::Interleave:
        return a->ns_left() == b->ns_left() && a->ns_right() == b->ns_right() &&
               term_equal(da, a->left, db, b->left) && term_equal(da, a->right, db, b->right);
    case Term::Kind::IterInterleave:
        return a->binder() == b->binder() &&
               da.domain(a->iter_domain()).name == db.domain(b->iter_domain()).name &&
               term_equal(da, a->left, db, b->left);
    case Term::Kind::Hide:
        return chanset_equal(a->sync(), b->sync()) && term_equal(da, a->left, db, b->left);
    case Term::Kind::Cond: {
        if (a->branches().size() != b->branches().size()) return false;
        for (std::size_t i = 0; i < a->branches().size(); ++i) {
            if (!expr_equal(da, a->branches()[i].first, db, b->branches()[i].first)) return false;
            if (!term_equal(da, a->branches()[i].second, db, b->branches()[i].second)) return false;
        }
        return true;
    }
    case Term::Kind::Assign: {
        if (a->assign_vars() != b->assign_vars()) return false;
        if (a->assign_exprs().size() != b->assign_exprs().size()) return false;
        for (std::size_t i = 0; i < a->assign_exprs().size(); ++i)
            if (!expr_equal(da, a->assign_exprs()[i], db, b->assign_exprs()[i])) return false;
        return true;
    }
    case Term::Kind::Guard:
        return expr_equal(da, a->guard(), db, b->guard()) && term_equal(da, a->left, db, b->left);
    case Term::Kind::Ref: {
        if (a->ref_name() != b->ref_name()) return false;
        if (a->ref_args().size() != b->ref_args().size()) return false;
        for (std::size_t i = 0; i < a->ref_args().size(); ++i)
            if (!expr_equal(da, a->ref_args()[i], db, b->ref_args()[i])) return false;
        return true;
    }
    }
    return false;
}

} // namespace

void ModelDefs::validate(std::int32_t max_int_range) const {
    Validator(*this, max_int_range).run();
}

bool structurally_equal(const ModelDefs& a, const ModelDefs& b) {
    if (a.main != b.main) return false;
    if (a.domains.size() != b.domains.size() || a.channels.size() != b.channels.size() ||
        a.variables.size() != b.variables.size() || a.processes.size() != b.processes.size())
        return false;
    for (std::size_t i = 0; i < a.domains.size(); ++i) {
        const auto& da = a.domains[i];
        const auto& db = b.domains[i];
        if (da.name != db.name || da.kind != db.kind) return false;
        if (da.kind == ValueDomain::Kind::IntRange && (da.lo != db.lo || da.hi != db.hi))
            return false;
        if (da.kind == ValueDomain::Kind::Symbols) {
            if (da.members.size() != db.members.size()) return false;
            for (std::size_t j = 0; j < da.members.size(); ++j)
                if (a.symbols.name(da.members[j]) != b.symbols.name(db.members[j])) return false;
        }
    }
    for (std::size_t i = 0; i < a.channels.size(); ++i) {
        const auto& ca = a.channels[i];
        const auto& cb = b.channels[i];
        if (ca.name != cb.name || ca.params.size() != cb.params.size()) return false;
        for (std::size_t j = 0; j < ca.params.size(); ++j)
            if (a.domain(ca.params[j]).name != b.domain(cb.params[j]).name) return false;
    }
    for (std::size_t i = 0; i < a.variables.size(); ++i) {
        const auto& va = a.variables[i];
        const auto& vb = b.variables[i];
        if (va.name != vb.name || a.domain(va.domain).name != b.domain(vb.domain).name)
            return false;
        if (a.atom_name(va.initial) != b.atom_name(vb.initial)) return false;
    }
    for (std::size_t i = 0; i < a.processes.size(); ++i) {
        const auto& pa = a.processes[i];
        const auto& pb = b.processes[i];
        if (pa.name != pb.name || pa.params.size() != pb.params.size()) return false;
        for (std::size_t j = 0; j < pa.params.size(); ++j) {
            if (pa.params[j].first != pb.params[j].first) return false;
            if (a.domain(pa.params[j].second).name != b.domain(pb.params[j].second).name)
                return false;
        }
        if (!term_equal(a, pa.body, b, pb.body)) return false;
    }
    return true;
}

} // namespace mk2::model
