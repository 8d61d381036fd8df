#include "mk2/dsl/parser.hpp"

#include <sstream>

namespace mk2::dsl {

using model::CommPart;
using model::Expr;
using model::ExprPtr;
using model::ModelDefs;
using model::Term;
using model::TermPtr;

namespace {

// Grammar levels: 0 par/iterated, 1 choice, 2 seq, 3 hide, 4 prefix/guard, 5 atomic.
int term_level(const Term& t) {
    switch (t.kind) {
    case Term::Kind::Par:
    case Term::Kind::Interleave:
    case Term::Kind::IterInterleave: return 0;
    case Term::Kind::ExtChoice:
    case Term::Kind::IntChoice: return 1;
    case Term::Kind::Seq: return 2;
    case Term::Kind::Hide: return 3;
    case Term::Kind::Prefix:
    case Term::Kind::Guard: return 4;
    default: return 5;
    }
}

int expr_level(const Expr& e) {
    switch (e.kind) {
    case Expr::Kind::Or: return 0;
    case Expr::Kind::And: return 1;
    case Expr::Kind::Not: return 2;
    case Expr::Kind::Eq:
    case Expr::Kind::Ne: return 3;
    default: return 4;
    }
}

class Printer {
  public:
    explicit Printer(const ModelDefs& defs) : defs_(defs) {}

    std::string run() {
        out_ << "cmodel 1\n\n";
        for (std::size_t i = 1; i < defs_.domains.size(); ++i) {
            const auto& d = defs_.domains[i];
            out_ << "domain " << d.name << " = ";
            if (d.kind == model::ValueDomain::Kind::IntRange) {
                out_ << d.lo << ".." << d.hi;
            } else {
                out_ << "{ ";
                for (std::size_t j = 0; j < d.members.size(); ++j) {
                    if (j) out_ << ", ";
                    out_ << defs_.symbols.name(d.members[j]);
                }
                out_ << " }";
            }
            out_ << "\n";
        }
        if (defs_.domains.size() > 1) out_ << "\n";
        for (const auto& c : defs_.channels) {
            out_ << "channel " << c.name;
            if (!c.params.empty()) {
                out_ << " : ";
                for (std::size_t j = 0; j < c.params.size(); ++j) {
                    if (j) out_ << ", ";
                    out_ << defs_.domain(c.params[j]).name;
                }
            }
            out_ << "\n";
        }
        if (!defs_.channels.empty()) out_ << "\n";
        for (const auto& v : defs_.variables)
            out_ << "var " << v.name << " : " << defs_.domain(v.domain).name << " = "
                 << defs_.atom_name(v.initial) << "\n";
        if (!defs_.variables.empty()) out_ << "\n";
        for (const auto& p : defs_.processes) {
            out_ << "process " << p.name;
            if (!p.params.empty()) {
                out_ << "(";
                for (std::size_t j = 0; j < p.params.size(); ++j) {
                    if (j) out_ << ", ";
                    out_ << p.params[j].first << " : " << defs_.domain(p.params[j].second).name;
                }
                out_ << ")";
            }
            out_ << " =\n  ";
            print_term(p.body, 0);
            out_ << "\n";
        }
        out_ << "\nmain " << defs_.main << "\n";
        return out_.str();
    }

  private:
    void print_term(const TermPtr& t, int min_level) {
        bool parens = term_level(*t) < min_level;
        if (parens) out_ << "(";
        switch (t->kind) {
        case Term::Kind::Skip: out_ << "Skip"; break;
        case Term::Kind::Stop: out_ << "Stop"; break;
        case Term::Kind::Omega: out_ << "Skip"; break; // never reached on valid input
        case Term::Kind::Prefix: {
            out_ << defs_.channel(t->comm().channel).name;
            for (const auto& p : t->comm().parts) {
                switch (p.kind) {
                case CommPart::Kind::Dot:
                    out_ << ".";
                    print_expr(p.expr, 4);
                    break;
                case CommPart::Kind::Out:
                    out_ << "!";
                    print_expr(p.expr, 4);
                    break;
                case CommPart::Kind::In: out_ << "?" << p.binder; break;
                }
            }
            out_ << " -> ";
            print_term(t->left, 4);
            break;
        }
        case Term::Kind::ExtChoice:
        case Term::Kind::IntChoice:
            print_term(t->left, 2);
            out_ << (t->kind == Term::Kind::ExtChoice ? " [] " : " |~| ");
            print_term(t->right, 2);
            break;
        case Term::Kind::Seq:
            print_term(t->left, 3);
            out_ << " ; ";
            print_term(t->right, 2);
            break;
        case Term::Kind::Par: {
            print_term(t->left, 1);
            out_ << " ||";
            if (!t->ns_left().empty() || !t->ns_right().empty()) {
                print_name_group(t->ns_left());
                print_chan_group(t->sync());
                print_name_group(t->ns_right());
            } else {
                print_chan_group(t->sync());
            }
            out_ << "|| ";
            print_term(t->right, 1);
            break;
        }
        case Term::Kind::Interleave:
            print_term(t->left, 1);
            out_ << " |||";
            if (!t->ns_left().empty() || !t->ns_right().empty()) {
                print_name_group(t->ns_left());
                print_name_group(t->ns_right());
                out_ << "||| ";
            } else {
                out_ << " ";
            }
            print_term(t->right, 1);
            break;
        case Term::Kind::IterInterleave:
            out_ << "||| " << t->binder() << " : " << defs_.domain(t->iter_domain()).name << " @ ";
            print_term(t->left, 0);
            break;
        case Term::Kind::Hide:
            print_term(t->left, 4);
            out_ << " \\ ";
            print_chan_group(t->sync());
            break;
        case Term::Kind::Cond: {
            out_ << "if ";
            for (std::size_t i = 0; i < t->branches().size(); ++i) {
                if (i) out_ << " [] ";
                print_expr(t->branches()[i].first, 0);
                out_ << " then ";
                print_term(t->branches()[i].second, 2);
            }
            out_ << " fi";
            break;
        }
        case Term::Kind::Assign:
            for (std::size_t i = 0; i < t->assign_vars().size(); ++i) {
                if (i) out_ << ", ";
                out_ << t->assign_vars()[i];
            }
            out_ << " := ";
            for (std::size_t i = 0; i < t->assign_exprs().size(); ++i) {
                if (i) out_ << ", ";
                print_expr(t->assign_exprs()[i], 0);
            }
            break;
        case Term::Kind::Guard:
            print_expr(t->guard(), 0);
            out_ << " & ";
            print_term(t->left, 4);
            break;
        case Term::Kind::Ref:
            out_ << t->ref_name();
            if (!t->ref_args().empty()) {
                out_ << "(";
                for (std::size_t i = 0; i < t->ref_args().size(); ++i) {
                    if (i) out_ << ", ";
                    print_expr(t->ref_args()[i], 0);
                }
                out_ << ")";
            }
            break;
        }
        if (parens) out_ << ")";
    }

    void print_name_group(const std::vector<std::string>& names) {
        out_ << "{";
        for (std::size_t i = 0; i < names.size(); ++i) {
            if (i) out_ << ",";
            out_ << names[i];
        }
        out_ << "}";
    }

    void print_chan_group(const std::vector<model::ChannelId>& chans) {
        out_ << "{";
        for (std::size_t i = 0; i < chans.size(); ++i) {
            if (i) out_ << ",";
            out_ << defs_.channel(chans[i]).name;
        }
        out_ << "}";
    }

    void print_expr(const ExprPtr& e, int min_level) {
        bool parens = expr_level(*e) < min_level;
        if (parens) out_ << "(";
        switch (e->kind) {
        case Expr::Kind::Lit: out_ << defs_.atom_name(e->lit); break;
        case Expr::Kind::Var: out_ << e->var; break;
        case Expr::Kind::Eq:
        case Expr::Kind::Ne:
            print_expr(e->lhs, 4);
            out_ << (e->kind == Expr::Kind::Eq ? " = " : " != ");
            print_expr(e->rhs, 4);
            break;
        case Expr::Kind::Not:
            out_ << "not ";
            print_expr(e->lhs, 2);
            break;
        case Expr::Kind::And:
            print_expr(e->lhs, 2);
            out_ << " and ";
            print_expr(e->rhs, 2);
            break;
        case Expr::Kind::Or:
            print_expr(e->lhs, 1);
            out_ << " or ";
            print_expr(e->rhs, 1);
            break;
        }
        if (parens) out_ << ")";
    }

    const ModelDefs& defs_;
    std::ostringstream out_;
};

} // namespace

std::string format(const ModelDefs& defs) { return Printer(defs).run(); }

} // namespace mk2::dsl
