#include "mk2/calc/semantics.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <set>

#include "mk2/errors.hpp"

namespace mk2::calc {

using model::Atom;
using model::ChannelId;
using model::CommPart;

namespace {

using model::EventLabel;
using model::Expr;
using model::ExprPtr;
using model::ModelDefs;
using model::Term;
using model::TermPtr;

void append_u32(std::string& out, std::uint32_t v) {
    char buf[4];
    std::memcpy(buf, &v, 4);
    out.append(buf, 4);
}

void append_u64(std::string& out, std::uint64_t v) {
    char buf[8];
    std::memcpy(buf, &v, 8);
    out.append(buf, 8);
}

void append_str(std::string& out, const std::string& s) {
    append_u32(out, static_cast<std::uint32_t>(s.size()));
    out.append(s);
}

void encode_atom(std::string& out, const Atom& a) {
    out.push_back(static_cast<char>(a.kind()));
    append_u32(out, static_cast<std::uint32_t>(a.as_int()));
}

void encode_expr(std::string& out, const ExprPtr& e) {
    if (!e) {
        out.push_back('0');
        return;
    }
    out.push_back(static_cast<char>('A' + static_cast<int>(e->kind)));
    switch (e->kind) {
    case Expr::Kind::Lit: encode_atom(out, e->lit); break;
    case Expr::Kind::Var: append_str(out, e->var); break;
    case Expr::Kind::Not: encode_expr(out, e->lhs); break;
    default:
        encode_expr(out, e->lhs);
        encode_expr(out, e->rhs);
        break;
    }
}

} // namespace

// --- Store ------------------------------------------------------------------

int domain_index_of(const model::ValueDomain& d, const Atom& a) {
    switch (d.kind) {
    case model::ValueDomain::Kind::Bool:
        if (a.kind() != Atom::Kind::Bool) return -1;
        return a.as_bool() ? 1 : 0;
    case model::ValueDomain::Kind::IntRange:
        if (a.kind() != Atom::Kind::Int || a.as_int() < d.lo || a.as_int() > d.hi) return -1;
        return a.as_int() - d.lo;
    case model::ValueDomain::Kind::Symbols:
        if (a.kind() != Atom::Kind::Sym) return -1;
        for (std::size_t i = 0; i < d.members.size(); ++i)
            if (d.members[i] == a.sym_id()) return static_cast<int>(i);
        return -1;
    }
    return -1;
}

Store Store::initial(const ModelDefs& defs) {
    Store s;
    s.values_.reserve(defs.variables.size());
    for (const auto& v : defs.variables) {
        int idx = domain_index_of(defs.domain(v.domain), v.initial);
        if (idx < 0)
            throw SemanticsError("initial value of variable '" + v.name +
                                 "' lies outside its domain");
        s.values_.push_back(static_cast<std::uint8_t>(idx));
    }
    return s;
}

std::size_t ConfigurationHash::operator()(const Configuration& c) const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    mix(reinterpret_cast<std::uintptr_t>(c.term.get()));
    for (auto b : c.store.raw()) mix(b);
    return static_cast<std::size_t>(h);
}

// --- TermInterner -------------------------------------------------------------

model::TermPtr TermInterner::intern(const TermPtr& t) {
    if (!t) return t;
    if (ids_.count(t.get())) return t; // already a canonical node
    return intern_fresh(t);
}

std::uint32_t TermInterner::id_of(const TermPtr& interned) const {
    auto it = ids_.find(interned.get());
    return it == ids_.end() ? 0xffffffffu : it->second;
}

model::TermPtr TermInterner::intern_fresh(const TermPtr& t) {
    using model::make_ext_choice;
    using model::make_int_choice;

    TermPtr left = t->left ? intern(t->left) : nullptr;
    TermPtr right = t->right ? intern(t->right) : nullptr;

    // Canonical normalisation: a terminated left operand of a sequence is
    // absorbed; choice operands are ordered by intern id.
    if (t->kind == Term::Kind::Seq && left && left->kind == Term::Kind::Omega) return right;
    if ((t->kind == Term::Kind::ExtChoice || t->kind == Term::Kind::IntChoice) &&
        id_of(left) > id_of(right))
        std::swap(left, right);

    std::vector<std::pair<ExprPtr, TermPtr>> branches;
    if (t->kind == Term::Kind::Cond) {
        branches.reserve(t->branches().size());
        for (const auto& [pred, body] : t->branches()) branches.emplace_back(pred, intern(body));
    }

    std::string key;
    key.reserve(64);
    key.push_back(static_cast<char>(t->kind));
    append_u64(key, reinterpret_cast<std::uintptr_t>(left.get()));
    append_u64(key, reinterpret_cast<std::uintptr_t>(right.get()));
    switch (t->kind) {
    case Term::Kind::Prefix:
        append_u32(key, static_cast<std::uint32_t>(t->comm().channel));
        for (const auto& p : t->comm().parts) {
            key.push_back(static_cast<char>(p.kind));
            if (p.kind == CommPart::Kind::In)
                append_str(key, p.binder);
            else
                encode_expr(key, p.expr);
        }
        break;
    case Term::Kind::Par:
        for (auto c : t->sync()) append_u32(key, static_cast<std::uint32_t>(c));
        [[fallthrough]];
    case Term::Kind::Interleave:
        for (const auto& v : t->ns_left()) append_str(key, v);
        key.push_back('|');
        for (const auto& v : t->ns_right()) append_str(key, v);
        break;
    case Term::Kind::IterInterleave:
        append_str(key, t->binder());
        append_u32(key, static_cast<std::uint32_t>(t->iter_domain()));
        break;
    case Term::Kind::Hide:
        for (auto c : t->sync()) append_u32(key, static_cast<std::uint32_t>(c));
        break;
    case Term::Kind::Cond:
        for (const auto& [pred, body] : branches) {
            encode_expr(key, pred);
            append_u64(key, reinterpret_cast<std::uintptr_t>(body.get()));
        }
        break;
    case Term::Kind::Assign:
        for (std::size_t i = 0; i < t->assign_vars().size(); ++i) {
            append_str(key, t->assign_vars()[i]);
            encode_expr(key, t->assign_exprs()[i]);
        }
        break;
    case Term::Kind::Guard: encode_expr(key, t->guard()); break;
    case Term::Kind::Ref:
        append_str(key, t->ref_name());
        for (const auto& a : t->ref_args()) encode_expr(key, a);
        break;
    default: break;
    }

    auto it = by_key_.find(key);
    if (it != by_key_.end()) return it->second;

    TermPtr stored = t->kind == Term::Kind::Cond
                         ? model::with_branches(t, std::move(branches))
                         : model::with_children(t, std::move(left), std::move(right));
    ids_.emplace(stored.get(), static_cast<std::uint32_t>(ids_.size()));
    by_key_.emplace(std::move(key), stored);
    return stored;
}

// --- Stepping ------------------------------------------------------------------

namespace {

/// Substitute a bound name by a literal atom, respecting shadowing.
ExprPtr subst_expr(const ExprPtr& e, const std::string& name, const Atom& value) {
    if (!e) return e;
    switch (e->kind) {
    case Expr::Kind::Lit: return e;
    case Expr::Kind::Var: return e->var == name ? Expr::make_lit(value) : e;
    case Expr::Kind::Not: {
        auto l = subst_expr(e->lhs, name, value);
        return l == e->lhs ? e : Expr::make_unary(e->kind, l);
    }
    default: {
        auto l = subst_expr(e->lhs, name, value);
        auto r = subst_expr(e->rhs, name, value);
        return (l == e->lhs && r == e->rhs) ? e : Expr::make_binary(e->kind, l, r);
    }
    }
}

TermPtr subst_term(const TermPtr& t, const std::string& name, const Atom& value) {
    if (!t) return t;
    switch (t->kind) {
    case Term::Kind::Skip:
    case Term::Kind::Stop:
    case Term::Kind::Omega: return t;
    case Term::Kind::Prefix: {
        bool changed = false;
        model::Comm comm;
        comm.channel = t->comm().channel;
        comm.parts = t->comm().parts;
        bool shadowed = false;
        for (auto& p : comm.parts) {
            if (p.kind == CommPart::Kind::In) {
                if (p.binder == name) shadowed = true;
            } else if (!shadowed) {
                auto ne = subst_expr(p.expr, name, value);
                if (ne != p.expr) {
                    p.expr = ne;
                    changed = true;
                }
            }
        }
        TermPtr body = shadowed ? t->left : subst_term(t->left, name, value);
        if (!changed && body == t->left) return t;
        return model::make_prefix(std::move(comm), body);
    }
    case Term::Kind::ExtChoice:
    case Term::Kind::IntChoice:
    case Term::Kind::Seq: {
        auto l = subst_term(t->left, name, value);
        auto r = subst_term(t->right, name, value);
        if (l == t->left && r == t->right) return t;
        if (t->kind == Term::Kind::ExtChoice) return model::make_ext_choice(l, r);
        if (t->kind == Term::Kind::IntChoice) return model::make_int_choice(l, r);
        return model::make_seq(l, r);
    }
    case Term::Kind::Par: {
        auto l = subst_term(t->left, name, value);
        auto r = subst_term(t->right, name, value);
        if (l == t->left && r == t->right) return t;
        return model::make_par(l, t->ns_left(), t->sync(), t->ns_right(), r);
    }
    case Term::Kind::Interleave: {
        auto l = subst_term(t->left, name, value);
        auto r = subst_term(t->right, name, value);
        if (l == t->left && r == t->right) return t;
        return model::make_interleave(l, t->ns_left(), t->ns_right(), r);
    }
    case Term::Kind::IterInterleave: {
        if (t->binder() == name) return t;
        auto b = subst_term(t->left, name, value);
        if (b == t->left) return t;
        return model::make_iter_interleave(t->binder(), t->iter_domain(), b);
    }
    case Term::Kind::Hide: {
        auto b = subst_term(t->left, name, value);
        if (b == t->left) return t;
        return model::make_hide(b, t->sync());
    }
    case Term::Kind::Cond: {
        bool changed = false;
        std::vector<std::pair<ExprPtr, TermPtr>> branches;
        branches.reserve(t->branches().size());
        for (const auto& [pred, body] : t->branches()) {
            auto np = subst_expr(pred, name, value);
            auto nb = subst_term(body, name, value);
            changed = changed || np != pred || nb != body;
            branches.emplace_back(np, nb);
        }
        return changed ? model::make_cond(std::move(branches)) : t;
    }
    case Term::Kind::Assign: {
        bool changed = false;
        std::vector<ExprPtr> exprs;
        exprs.reserve(t->assign_exprs().size());
        for (const auto& e : t->assign_exprs()) {
            auto ne = subst_expr(e, name, value);
            changed = changed || ne != e;
            exprs.push_back(ne);
        }
        return changed ? model::make_assign(t->assign_vars(), std::move(exprs)) : t;
    }
    case Term::Kind::Guard: {
        auto g = subst_expr(t->guard(), name, value);
        auto b = subst_term(t->left, name, value);
        if (g == t->guard() && b == t->left) return t;
        return model::make_guard(g, b);
    }
    case Term::Kind::Ref: {
        bool changed = false;
        std::vector<ExprPtr> args;
        args.reserve(t->ref_args().size());
        for (const auto& a : t->ref_args()) {
            auto na = subst_expr(a, name, value);
            changed = changed || na != a;
            args.push_back(na);
        }
        return changed ? model::make_ref(t->ref_name(), std::move(args)) : t;
    }
    }
    return t;
}

struct StepOut {
    EventLabel label;
    TermPtr term;
    Store store; // populated only when has_store (the transition wrote)
    bool has_store = false;
    std::vector<std::uint16_t> writes; // store indices written on this transition

    StepOut(EventLabel l, TermPtr t) : label(std::move(l)), term(std::move(t)) {}
    StepOut(EventLabel l, TermPtr t, Store s, std::vector<std::uint16_t> w)
        : label(std::move(l)), term(std::move(t)), store(std::move(s)), has_store(true),
          writes(std::move(w)) {}
};

/// Shallow rebuild of a binary node with fresh children; local payload
/// (name sets, synchronisation sets, guards) is shared, not copied.
TermPtr clone_children(const TermPtr& t, TermPtr l, TermPtr r) {
    return model::with_children(t, std::move(l), std::move(r));
}

constexpr std::size_t kCacheCap = 200'000;

using NsCache = std::unordered_map<const Term*, std::pair<std::vector<std::uint16_t>,
                                                          std::vector<std::uint16_t>>>;
using IterCache = std::unordered_map<const Term*, std::pair<TermPtr, TermPtr>>;

class Stepper {
  public:
    Stepper(const ModelDefs& defs, const std::unordered_map<std::string, int>& var_index,
            const std::unordered_map<std::string, const model::ProcessDef*>& procs,
            std::int32_t budget, NsCache& ns_cache, IterCache& iter_cache,
            std::vector<TermPtr>& ns_keepalive)
        : defs_(defs), var_index_(var_index), procs_(procs), budget_(budget),
          ns_cache_(ns_cache), iter_cache_(iter_cache), ns_keepalive_(ns_keepalive) {}

    std::vector<StepOut> run(const TermPtr& t, const Store& store) { return rec(t, store); }

  private:
    Atom eval(const ExprPtr& e, const Store& store) const {
        switch (e->kind) {
        case Expr::Kind::Lit: return e->lit;
        case Expr::Kind::Var: {
            auto it = var_index_.find(e->var);
            if (it == var_index_.end())
                throw SemanticsError("unbound name '" + e->var + "' at evaluation time");
            return store.get(defs_, static_cast<std::size_t>(it->second));
        }
        case Expr::Kind::Eq: return Atom::boolean(eval(e->lhs, store) == eval(e->rhs, store));
        case Expr::Kind::Ne: return Atom::boolean(eval(e->lhs, store) != eval(e->rhs, store));
        case Expr::Kind::Not: return Atom::boolean(!truth(eval(e->lhs, store)));
        case Expr::Kind::And:
            return Atom::boolean(truth(eval(e->lhs, store)) && truth(eval(e->rhs, store)));
        case Expr::Kind::Or:
            return Atom::boolean(truth(eval(e->lhs, store)) || truth(eval(e->rhs, store)));
        }
        throw SemanticsError("malformed expression");
    }

    static bool truth(const Atom& a) {
        if (a.kind() != Atom::Kind::Bool) throw SemanticsError("predicate is not boolean");
        return a.as_bool();
    }

    std::vector<StepOut> rec(const TermPtr& t, const Store& store) {
        std::vector<StepOut> out;
        switch (t->kind) {
        case Term::Kind::Skip:
            out.emplace_back(EventLabel::tick(), model::make_omega());
            return out;
        case Term::Kind::Stop:
        case Term::Kind::Omega: return out;
        case Term::Kind::Prefix: return step_prefix(t, store);
        case Term::Kind::ExtChoice: {
            for (auto& lt : rec(t->left, store)) {
                if (lt.label.is_tau()) lt.term = clone_children(t, std::move(lt.term), t->right);
                out.push_back(std::move(lt));
            }
            for (auto& rt : rec(t->right, store)) {
                if (rt.label.is_tau()) rt.term = clone_children(t, t->left, std::move(rt.term));
                out.push_back(std::move(rt));
            }
            return out;
        }
        case Term::Kind::IntChoice:
            out.emplace_back(EventLabel::tau(), t->left);
            out.emplace_back(EventLabel::tau(), t->right);
            return out;
        case Term::Kind::Seq: {
            for (auto& lt : rec(t->left, store)) {
                if (lt.label.is_tick()) {
                    lt.label = EventLabel::tau();
                    lt.term = t->right;
                } else {
                    lt.term = clone_children(t, std::move(lt.term), t->right);
                }
                out.push_back(std::move(lt));
            }
            return out;
        }
        case Term::Kind::Par:
        case Term::Kind::Interleave: return step_par(t, store);
        case Term::Kind::IterInterleave: return rec(expand_iter(t), store);
        case Term::Kind::Hide: {
            for (auto& bt : rec(t->left, store)) {
                if (bt.label.is_tick()) {
                    out.push_back(std::move(bt));
                    continue;
                }
                if (bt.label.is_visible() &&
                    std::binary_search(t->sync().begin(), t->sync().end(), bt.label.channel))
                    bt.label = EventLabel::tau();
                bt.term = clone_children(t, std::move(bt.term), nullptr);
                out.push_back(std::move(bt));
            }
            return out;
        }
        case Term::Kind::Cond: {
            for (const auto& [pred, body] : t->branches())
                if (truth(eval(pred, store)))
                    for (auto& bt : rec(body, store)) out.push_back(std::move(bt));
            return out;
        }
        case Term::Kind::Assign: return step_assign(t, store);
        case Term::Kind::Guard:
            if (truth(eval(t->guard(), store))) return rec(t->left, store);
            return out;
        case Term::Kind::Ref: return step_ref(t, store);
        }
        return out;
    }

    TermPtr expand_iter(const TermPtr& t) {
        auto it = iter_cache_.find(t.get());
        if (it != iter_cache_.end()) return it->second.second;
        const auto& dom = defs_.domain(t->iter_domain());
        TermPtr acc;
        for (std::size_t i = dom.size(); i-- > 0;) {
            TermPtr body = subst_term(t->left, t->binder(), dom.member(i));
            acc = acc ? model::make_interleave(body, {}, {}, acc) : body;
        }
        if (!acc) acc = model::make_skip();
        if (iter_cache_.size() < kCacheCap)
            iter_cache_.emplace(t.get(), std::make_pair(t, acc));
        return acc;
    }

    std::vector<StepOut> step_prefix(const TermPtr& t, const Store& store) {
        const auto& ch = defs_.channel(t->comm().channel);
        struct Input {
            std::size_t part;
            model::DomainId domain;
        };
        std::vector<Atom> args(t->comm().parts.size(), Atom::boolean(false));
        std::vector<Input> inputs;
        for (std::size_t i = 0; i < t->comm().parts.size(); ++i) {
            const auto& part = t->comm().parts[i];
            if (part.kind == CommPart::Kind::In) {
                if (static_cast<std::size_t>(ch.params[i]) >= defs_.domains.size())
                    throw SemanticsError("unbounded input binder on channel '" + ch.name + "'");
                inputs.push_back({i, ch.params[i]});
            } else {
                Atom v = eval(part.expr, store);
                if (!defs_.domain(ch.params[i]).contains(v))
                    throw SemanticsError("argument of channel '" + ch.name +
                                         "' evaluates outside its domain");
                args[i] = v;
            }
        }
        std::vector<StepOut> out;
        std::vector<std::size_t> cursor(inputs.size(), 0);
        while (true) {
            for (std::size_t k = 0; k < inputs.size(); ++k)
                args[inputs[k].part] = defs_.domain(inputs[k].domain).member(cursor[k]);
            TermPtr body = t->left;
            for (std::size_t k = 0; k < inputs.size(); ++k)
                body = subst_term(body, t->comm().parts[inputs[k].part].binder,
                                  args[inputs[k].part]);
            out.emplace_back(EventLabel::event(t->comm().channel, args), std::move(body));
            std::size_t k = 0;
            for (; k < inputs.size(); ++k) {
                if (++cursor[k] < defs_.domain(inputs[k].domain).size()) break;
                cursor[k] = 0;
            }
            if (k == inputs.size()) break;
        }
        return out;
    }

    std::vector<StepOut> step_assign(const TermPtr& t, const Store& store) {
        Store next = store;
        std::vector<std::uint16_t> writes;
        for (std::size_t i = 0; i < t->assign_vars().size(); ++i) {
            Atom v = eval(t->assign_exprs()[i], store); // simultaneous semantics
            auto it = var_index_.find(t->assign_vars()[i]);
            if (it == var_index_.end())
                throw SemanticsError("assignment to unknown variable '" + t->assign_vars()[i] + "'");
            const auto& decl = defs_.variables[static_cast<std::size_t>(it->second)];
            int idx = domain_index_of(defs_.domain(decl.domain), v);
            if (idx < 0)
                throw SemanticsError("assignment to '" + decl.name +
                                     "' evaluates outside its domain");
            next.set_index(static_cast<std::size_t>(it->second), static_cast<std::uint8_t>(idx));
            writes.push_back(static_cast<std::uint16_t>(it->second));
        }
        std::sort(writes.begin(), writes.end());
        std::vector<StepOut> out;
        out.emplace_back(EventLabel::tau(), model::make_skip(), std::move(next),
                         std::move(writes));
        return out;
    }

    std::vector<StepOut> step_ref(const TermPtr& t, const Store& store) {
        if (--budget_ < 0)
            throw SemanticsError("process unfold budget exhausted at '" + t->ref_name() +
                                 "' (non-productive recursion?)");
        auto it = procs_.find(t->ref_name());
        if (it == procs_.end())
            throw SemanticsError("reference to unknown process '" + t->ref_name() + "'");
        const auto* def = it->second;
        if (def->params.size() != t->ref_args().size())
            throw SemanticsError("arity mismatch on process '" + t->ref_name() + "'");
        TermPtr body = def->body;
        for (std::size_t i = 0; i < def->params.size(); ++i)
            body = subst_term(body, def->params[i].first, eval(t->ref_args()[i], store));
        return rec(body, store);
    }

    std::vector<std::uint16_t> ns_indices(const std::vector<std::string>& names) const {
        std::vector<std::uint16_t> out;
        out.reserve(names.size());
        for (const auto& n : names) {
            auto it = var_index_.find(n);
            if (it == var_index_.end())
                throw SemanticsError("name set mentions unknown variable '" + n + "'");
            out.push_back(static_cast<std::uint16_t>(it->second));
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    const std::pair<std::vector<std::uint16_t>, std::vector<std::uint16_t>>&
    par_name_sets(const TermPtr& t) {
        auto it = ns_cache_.find(t.get());
        if (it != ns_cache_.end()) return it->second;
        auto val = std::make_pair(ns_indices(t->ns_left()), ns_indices(t->ns_right()));
        if (ns_cache_.size() >= kCacheCap) {
            scratch_ns_ = std::move(val);
            return scratch_ns_;
        }
        ns_keepalive_.push_back(t); // pins the key's address
        return ns_cache_.emplace(t.get(), std::move(val)).first->second;
    }

    void check_writes(const StepOut& s, const std::vector<std::uint16_t>& allowed,
                      const char* side) const {
        for (auto w : s.writes)
            if (!std::binary_search(allowed.begin(), allowed.end(), w))
                throw SemanticsError(std::string("name-set violation: the ") + side +
                                     " operand of a parallel composition writes '" +
                                     defs_.variables[w].name + "'");
    }

    std::vector<StepOut> step_par(const TermPtr& t, const Store& store) {
        const bool is_par = t->kind == Term::Kind::Par;
        const auto& sync = t->sync(); // empty for Interleave
        auto in_sync = [&](const EventLabel& lbl) {
            return is_par && lbl.is_visible() &&
                   std::binary_search(sync.begin(), sync.end(), lbl.channel);
        };

        auto lts = rec(t->left, store);
        auto rts = rec(t->right, store);
        const auto& [ns_l, ns_r] = par_name_sets(t);

        std::vector<StepOut> out;
        out.reserve(lts.size() + rts.size());
        bool left_ticks = false, right_ticks = false;
        std::vector<const StepOut*> lsync, rsync;

        for (auto& lt : lts) {
            if (lt.label.is_tick()) {
                left_ticks = true;
            } else if (in_sync(lt.label)) {
                lsync.push_back(&lt);
            } else {
                check_writes(lt, ns_l, "left");
                lt.term = clone_children(t, std::move(lt.term), t->right);
                out.push_back(std::move(lt));
            }
        }
        for (auto& rt : rts) {
            if (rt.label.is_tick()) {
                right_ticks = true;
            } else if (in_sync(rt.label)) {
                rsync.push_back(&rt);
            } else {
                check_writes(rt, ns_r, "right");
                rt.term = clone_children(t, t->left, std::move(rt.term));
                out.push_back(std::move(rt));
            }
        }
        for (const auto* lt : lsync)
            for (const auto* rt : rsync)
                if (lt->label == rt->label)
                    out.emplace_back(lt->label, clone_children(t, lt->term, rt->term));
        if (left_ticks && right_ticks)
            out.emplace_back(EventLabel::tick(), model::make_omega());
        return out;
    }

    const ModelDefs& defs_;
    const std::unordered_map<std::string, int>& var_index_;
    const std::unordered_map<std::string, const model::ProcessDef*>& procs_;
    std::int32_t budget_;
    NsCache& ns_cache_;
    IterCache& iter_cache_;
    std::vector<TermPtr>& ns_keepalive_;
    std::pair<std::vector<std::uint16_t>, std::vector<std::uint16_t>> scratch_ns_;
};

} // namespace

// --- StepEngine -----------------------------------------------------------------

StepEngine::StepEngine(const ModelDefs& defs, StepOptions options)
    : defs_(defs), options_(options) {
    for (std::size_t i = 0; i < defs.variables.size(); ++i)
        var_index_.emplace(defs.variables[i].name, static_cast<int>(i));
    for (const auto& p : defs.processes) procs_.emplace(p.name, &p);
}

int StepEngine::var_index(const std::string& name) const {
    auto it = var_index_.find(name);
    return it == var_index_.end() ? -1 : it->second;
}

Configuration StepEngine::initial(const std::string& process) const {
    const std::string& name = process.empty() ? defs_.main : process;
    const auto* def = defs_.find_process(name);
    if (!def) throw SemanticsError("unknown process name '" + name + "'");
    if (!def->params.empty())
        throw SemanticsError("process '" + name + "' takes parameters and cannot be an entry point");
    return Configuration{interner_.intern(def->body), Store::initial(defs_)};
}

std::vector<Transition> StepEngine::transitions(const Configuration& c) const {
    Stepper stepper(defs_, var_index_, procs_, options_.unfold_budget, ns_cache_, iter_cache_,
                    ns_keepalive_);
    auto outs = stepper.run(c.term, c.store);

    std::vector<Transition> result;
    result.reserve(outs.size());
    for (auto& s : outs)
        result.push_back({std::move(s.label),
                          {interner_.intern(s.term),
                           s.has_store ? std::move(s.store) : c.store}});

    std::sort(result.begin(), result.end(), [this](const Transition& a, const Transition& b) {
        if (a.label != b.label) return a.label < b.label;
        auto ia = interner_.id_of(a.target.term);
        auto ib = interner_.id_of(b.target.term);
        if (ia != ib) return ia < ib;
        return a.target.store < b.target.store;
    });
    result.erase(std::unique(result.begin(), result.end(),
                             [](const Transition& a, const Transition& b) {
                                 return a.label == b.label && a.target == b.target;
                             }),
                 result.end());
    return result;
}

Configuration initial(const ModelDefs& defs, const std::string& process) {
    StepEngine engine(defs);
    return engine.initial(process);
}

std::vector<Transition> step(const Configuration& c, const ModelDefs& defs, StepOptions options) {
    StepEngine engine(defs, options);
    // Re-intern through this engine so targets have stable identity within it.
    Configuration local{engine.interner().intern(c.term), c.store};
    return engine.transitions(local);
}

// --- alphabet -----------------------------------------------------------------

namespace {
void alphabet_walk(const TermPtr& t, const ModelDefs& defs, std::set<ChannelId>& chans,
                   std::set<std::string>& seen_procs) {
    if (!t) return;
    if (t->kind == Term::Kind::Prefix) chans.insert(t->comm().channel);
    if (t->kind == Term::Kind::Ref) {
        if (seen_procs.insert(t->ref_name()).second) {
            if (const auto* def = defs.find_process(t->ref_name()))
                alphabet_walk(def->body, defs, chans, seen_procs);
        }
        return;
    }
    alphabet_walk(t->left, defs, chans, seen_procs);
    alphabet_walk(t->right, defs, chans, seen_procs);
    for (const auto& [pred, body] : t->branches()) alphabet_walk(body, defs, chans, seen_procs);
}
} // namespace

std::vector<ChannelId> alphabet(const TermPtr& t, const ModelDefs& defs) {
    std::set<ChannelId> chans;
    std::set<std::string> seen;
    alphabet_walk(t, defs, chans, seen);
    return {chans.begin(), chans.end()};
}

// --- rendering ------------------------------------------------------------------

std::string label_to_string(const EventLabel& l, const ModelDefs& defs) {
    if (l.is_tau()) return "tau";
    if (l.is_tick()) return "tick";
    std::string s = defs.channel(l.channel).name;
    for (const auto& a : l.args) {
        s.push_back('.');
        s += defs.atom_name(a);
    }
    return s;
}

std::string term_to_string(const TermPtr& t, const ModelDefs& defs) {
    if (!t) return "<null>";
    switch (t->kind) {
    case Term::Kind::Skip: return "Skip";
    case Term::Kind::Stop: return "Stop";
    case Term::Kind::Omega: return "Omega";
    case Term::Kind::Prefix:
        return defs.channel(t->comm().channel).name + " -> " + term_to_string(t->left, defs);
    case Term::Kind::ExtChoice:
        return "(" + term_to_string(t->left, defs) + " [] " + term_to_string(t->right, defs) + ")";
    case Term::Kind::IntChoice:
        return "(" + term_to_string(t->left, defs) + " |~| " + term_to_string(t->right, defs) +
               ")";
    case Term::Kind::Seq:
        return "(" + term_to_string(t->left, defs) + " ; " + term_to_string(t->right, defs) + ")";
    case Term::Kind::Par:
        return "(" + term_to_string(t->left, defs) + " || " + term_to_string(t->right, defs) + ")";
    case Term::Kind::Interleave:
        return "(" + term_to_string(t->left, defs) + " ||| " + term_to_string(t->right, defs) +
               ")";
    case Term::Kind::IterInterleave:
        return "(||| " + t->binder() + " : " + defs.domain(t->iter_domain()).name + " @ " +
               term_to_string(t->left, defs) + ")";
    case Term::Kind::Hide: return "(" + term_to_string(t->left, defs) + " \\ {...})";
    case Term::Kind::Cond: return "if ... fi";
    case Term::Kind::Assign: return t->assign_vars().front() + " := ...";
    case Term::Kind::Guard: return "(guard & " + term_to_string(t->left, defs) + ")";
    case Term::Kind::Ref: return t->ref_name();
    }
    return "?";
}

} // namespace mk2::calc
