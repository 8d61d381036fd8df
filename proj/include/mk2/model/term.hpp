#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mk2/model/channel.hpp"
#include "mk2/model/expr.hpp"

namespace mk2::model {

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// One parameter slot of a communication: `.e` (dotted expression),
/// `!e` (output expression) or `?x` (input binder).
struct CommPart {
    enum class Kind : std::uint8_t { Dot, Out, In };
    Kind kind = Kind::Dot;
    ExprPtr expr;      // Dot / Out
    std::string binder; // In
};

/// A communication: channel plus one part per declared channel parameter.
struct Comm {
    ChannelId channel = 0;
    std::vector<CommPart> parts;
};

/// Process-term AST. Nodes are immutable and shared; node-local payload
/// (communications, name sets, guards, ...) sits behind one shared pointer
/// so stepping can rebuild spines by copying four words per node.
struct Term {
    enum class Kind : std::uint8_t {
        Skip,
        Stop,
        Omega, // internal post-termination marker, never in user input
        Prefix,
        ExtChoice,
        IntChoice,
        Seq,
        Par,
        Interleave,
        IterInterleave,
        Hide,
        Cond,
        Assign,
        Guard,
        Ref,
    };

    struct Payload {
        Comm comm;                           // Prefix
        std::vector<std::string> ns_left;    // Par, Interleave
        std::vector<std::string> ns_right;
        std::vector<ChannelId> sync;         // Par sync set; Hide hidden set
        std::vector<std::pair<ExprPtr, TermPtr>> branches; // Cond
        std::vector<std::string> assign_vars;
        std::vector<ExprPtr> assign_exprs;
        ExprPtr guard;                       // Guard predicate
        std::string binder;                  // IterInterleave
        DomainId iter_domain = 0;
        std::string ref_name;                // Ref
        std::vector<ExprPtr> ref_args;
    };

    Kind kind = Kind::Skip;
    TermPtr left;  // Prefix body / binary left / Hide, Guard, IterInterleave body
    TermPtr right; // binary right
    std::shared_ptr<const Payload> payload;

    const Comm& comm() const { return payload->comm; }
    const std::vector<std::string>& ns_left() const { return payload->ns_left; }
    const std::vector<std::string>& ns_right() const { return payload->ns_right; }
    const std::vector<ChannelId>& sync() const { return payload->sync; }
    const std::vector<std::pair<ExprPtr, TermPtr>>& branches() const { return payload->branches; }
    const std::vector<std::string>& assign_vars() const { return payload->assign_vars; }
    const std::vector<ExprPtr>& assign_exprs() const { return payload->assign_exprs; }
    const ExprPtr& guard() const { return payload->guard; }
    const std::string& binder() const { return payload->binder; }
    DomainId iter_domain() const { return payload->iter_domain; }
    const std::string& ref_name() const { return payload->ref_name; }
    const std::vector<ExprPtr>& ref_args() const { return payload->ref_args; }
};

TermPtr make_skip();
TermPtr make_stop();
TermPtr make_omega();
TermPtr make_prefix(Comm comm, TermPtr body);
TermPtr make_ext_choice(TermPtr l, TermPtr r);
TermPtr make_int_choice(TermPtr l, TermPtr r);
TermPtr make_seq(TermPtr l, TermPtr r);
TermPtr make_par(TermPtr l, std::vector<std::string> ns_left, std::vector<ChannelId> sync,
                 std::vector<std::string> ns_right, TermPtr r);
TermPtr make_interleave(TermPtr l, std::vector<std::string> ns_left,
                        std::vector<std::string> ns_right, TermPtr r);
TermPtr make_iter_interleave(std::string binder, DomainId domain, TermPtr body);
TermPtr make_hide(TermPtr body, std::vector<ChannelId> channels);
TermPtr make_cond(std::vector<std::pair<ExprPtr, TermPtr>> branches);
TermPtr make_assign(std::vector<std::string> vars, std::vector<ExprPtr> exprs);
TermPtr make_guard(ExprPtr predicate, TermPtr body);
TermPtr make_ref(std::string name, std::vector<ExprPtr> args = {});

/// Sequence of several terms, right-associated; empty input yields Skip.
TermPtr make_seq_all(std::vector<TermPtr> terms);

/// Node with the same kind and payload but different children.
TermPtr with_children(const TermPtr& t, TermPtr l, TermPtr r);

/// Node with the same kind and children but different Cond branches.
TermPtr with_branches(const TermPtr& t, std::vector<std::pair<ExprPtr, TermPtr>> branches);

} // namespace mk2::model
