#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mk2/model/value.hpp"

namespace mk2::model {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Side-effect-free expressions over atoms and store variables.
/// Comparisons require both sides to share a domain; connectives are boolean.
struct Expr {
    enum class Kind : std::uint8_t { Lit, Var, Eq, Ne, Not, And, Or };

    Kind kind;
    Atom lit = Atom::boolean(false); // Lit
    std::string var;                 // Var
    ExprPtr lhs;                     // unary/binary
    ExprPtr rhs;                     // binary

    static ExprPtr make_lit(Atom a) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Lit;
        e->lit = a;
        return e;
    }
    static ExprPtr make_var(std::string name) {
        auto e = std::make_shared<Expr>();
        e->kind = Kind::Var;
        e->var = std::move(name);
        return e;
    }
    static ExprPtr make_unary(Kind k, ExprPtr operand) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->lhs = std::move(operand);
        return e;
    }
    static ExprPtr make_binary(Kind k, ExprPtr l, ExprPtr r) {
        auto e = std::make_shared<Expr>();
        e->kind = k;
        e->lhs = std::move(l);
        e->rhs = std::move(r);
        return e;
    }

    Expr() : kind(Kind::Lit) {}
};

inline ExprPtr expr_true() { return Expr::make_lit(Atom::boolean(true)); }
inline ExprPtr expr_false() { return Expr::make_lit(Atom::boolean(false)); }

} // namespace mk2::model
