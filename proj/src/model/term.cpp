#include "mk2/model/term.hpp"

#include <algorithm>

namespace mk2::model {

namespace {

const std::shared_ptr<const Term::Payload>& empty_payload() {
    static const std::shared_ptr<const Term::Payload> p = std::make_shared<Term::Payload>();
    return p;
}

TermPtr node(Term::Kind k, TermPtr l = nullptr, TermPtr r = nullptr,
             std::shared_ptr<const Term::Payload> payload = nullptr) {
    auto t = std::make_shared<Term>();
    t->kind = k;
    t->left = std::move(l);
    t->right = std::move(r);
    t->payload = payload ? std::move(payload) : empty_payload();
    return t;
}

} // namespace

TermPtr make_skip() {
    static const TermPtr skip = node(Term::Kind::Skip);
    return skip;
}

TermPtr make_stop() {
    static const TermPtr stop = node(Term::Kind::Stop);
    return stop;
}

TermPtr make_omega() {
    static const TermPtr omega = node(Term::Kind::Omega);
    return omega;
}

TermPtr make_prefix(Comm comm, TermPtr body) {
    auto p = std::make_shared<Term::Payload>();
    p->comm = std::move(comm);
    return node(Term::Kind::Prefix, std::move(body), nullptr, std::move(p));
}

TermPtr make_ext_choice(TermPtr l, TermPtr r) {
    return node(Term::Kind::ExtChoice, std::move(l), std::move(r));
}

TermPtr make_int_choice(TermPtr l, TermPtr r) {
    return node(Term::Kind::IntChoice, std::move(l), std::move(r));
}

TermPtr make_seq(TermPtr l, TermPtr r) {
    return node(Term::Kind::Seq, std::move(l), std::move(r));
}

TermPtr make_par(TermPtr l, std::vector<std::string> ns_left, std::vector<ChannelId> sync,
                 std::vector<std::string> ns_right, TermPtr r) {
    auto p = std::make_shared<Term::Payload>();
    std::sort(ns_left.begin(), ns_left.end());
    std::sort(ns_right.begin(), ns_right.end());
    std::sort(sync.begin(), sync.end());
    sync.erase(std::unique(sync.begin(), sync.end()), sync.end());
    p->ns_left = std::move(ns_left);
    p->ns_right = std::move(ns_right);
    p->sync = std::move(sync);
    return node(Term::Kind::Par, std::move(l), std::move(r), std::move(p));
}

TermPtr make_interleave(TermPtr l, std::vector<std::string> ns_left,
                        std::vector<std::string> ns_right, TermPtr r) {
    if (ns_left.empty() && ns_right.empty())
        return node(Term::Kind::Interleave, std::move(l), std::move(r));
    auto p = std::make_shared<Term::Payload>();
    std::sort(ns_left.begin(), ns_left.end());
    std::sort(ns_right.begin(), ns_right.end());
    p->ns_left = std::move(ns_left);
    p->ns_right = std::move(ns_right);
    return node(Term::Kind::Interleave, std::move(l), std::move(r), std::move(p));
}

TermPtr make_iter_interleave(std::string binder, DomainId domain, TermPtr body) {
    auto p = std::make_shared<Term::Payload>();
    p->binder = std::move(binder);
    p->iter_domain = domain;
    return node(Term::Kind::IterInterleave, std::move(body), nullptr, std::move(p));
}

TermPtr make_hide(TermPtr body, std::vector<ChannelId> channels) {
    auto p = std::make_shared<Term::Payload>();
    std::sort(channels.begin(), channels.end());
    channels.erase(std::unique(channels.begin(), channels.end()), channels.end());
    p->sync = std::move(channels);
    return node(Term::Kind::Hide, std::move(body), nullptr, std::move(p));
}

TermPtr make_cond(std::vector<std::pair<ExprPtr, TermPtr>> branches) {
    auto p = std::make_shared<Term::Payload>();
    p->branches = std::move(branches);
    return node(Term::Kind::Cond, nullptr, nullptr, std::move(p));
}

TermPtr make_assign(std::vector<std::string> vars, std::vector<ExprPtr> exprs) {
    auto p = std::make_shared<Term::Payload>();
    p->assign_vars = std::move(vars);
    p->assign_exprs = std::move(exprs);
    return node(Term::Kind::Assign, nullptr, nullptr, std::move(p));
}

TermPtr make_guard(ExprPtr predicate, TermPtr body) {
    auto p = std::make_shared<Term::Payload>();
    p->guard = std::move(predicate);
    return node(Term::Kind::Guard, std::move(body), nullptr, std::move(p));
}

TermPtr make_ref(std::string name, std::vector<ExprPtr> args) {
    auto p = std::make_shared<Term::Payload>();
    p->ref_name = std::move(name);
    p->ref_args = std::move(args);
    return node(Term::Kind::Ref, nullptr, nullptr, std::move(p));
}

TermPtr make_seq_all(std::vector<TermPtr> terms) {
    if (terms.empty()) return make_skip();
    TermPtr acc = terms.back();
    for (auto it = terms.rbegin() + 1; it != terms.rend(); ++it)
        acc = make_seq(*it, acc);
    return acc;
}

TermPtr with_children(const TermPtr& t, TermPtr l, TermPtr r) {
    return node(t->kind, std::move(l), std::move(r), t->payload);
}

TermPtr with_branches(const TermPtr& t, std::vector<std::pair<ExprPtr, TermPtr>> branches) {
    auto p = std::make_shared<Term::Payload>(*t->payload);
    p->branches = std::move(branches);
    return node(t->kind, t->left, t->right, std::move(p));
}

} // namespace mk2::model
