#include "mk2/dsl/parser.hpp"

#include <algorithm>
#include <unordered_set>

namespace mk2::dsl {

using model::Atom;
using model::ChannelId;
using model::CommPart;
using model::DomainId;
using model::Expr;
using model::ExprPtr;
using model::ModelDefs;
using model::Term;
using model::TermPtr;

namespace {

const std::unordered_set<std::string> kReserved = {
    "cmodel", "domain",  "channel", "var",  "process", "main", "if",   "then",
    "fi",     "Skip",    "Stop",    "not",  "and",     "or",   "true", "false",
    "bool",   "sequencer", "mission", "thread", "handler", "buffer",
};

class Parser {
  public:
    explicit Parser(const ModelSource& src) : tokens_(lex(src)) {}

    ModelDefs run() {
        expect_ident("cmodel");
        auto ver = expect(Token::Kind::Int);
        if (ver.int_value != 1) throw ParseError("unsupported cmodel version", ver.span);

        while (!at_end()) {
            const Token& t = peek();
            if (t.is_ident("domain")) parse_domain();
            else if (t.is_ident("channel")) parse_channel();
            else if (t.is_ident("var")) parse_var();
            else if (t.is_ident("process")) parse_process();
            else if (t.is_ident("main")) parse_main();
            else throw ParseError("expected a declaration", t.span);
        }
        if (defs_.main.empty()) throw ParseError("document declares no main process");
        defs_.validate();
        return std::move(defs_);
    }

  private:
    // --- token plumbing ----------------------------------------------------
    const Token& peek(std::size_t ahead = 0) const {
        return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
    }
    const Token& next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }
    bool at_end() const { return peek().kind == Token::Kind::End; }

    Token expect(Token::Kind kind) {
        const Token& t = next();
        if (t.kind != kind) throw ParseError("unexpected token '" + display(t) + "'", t.span);
        return t;
    }
    Token expect_punct(const char* p) {
        const Token& t = next();
        if (!t.is(p))
            throw ParseError("expected '" + std::string(p) + "', found '" + display(t) + "'",
                             t.span);
        return t;
    }
    void expect_ident(const char* word) {
        const Token& t = next();
        if (!t.is_ident(word))
            throw ParseError("expected '" + std::string(word) + "', found '" + display(t) + "'",
                             t.span);
    }
    bool accept(const char* p) {
        if (peek().is(p)) {
            ++pos_;
            return true;
        }
        return false;
    }
    static std::string display(const Token& t) {
        return t.kind == Token::Kind::End ? "<end of input>" : t.text;
    }

    Token expect_name() {
        Token t = expect(Token::Kind::Ident);
        if (kReserved.count(t.text))
            throw ParseError("'" + t.text + "' is a reserved word", t.span);
        return t;
    }

    // --- declarations --------------------------------------------------------
    void parse_domain() {
        next(); // domain
        Token name = expect_name();
        expect_punct("=");
        if (peek().kind == Token::Kind::Int) {
            Token lo = next();
            expect_punct("..");
            Token hi = expect(Token::Kind::Int);
            defs_.add_int_domain(name.text, static_cast<std::int32_t>(lo.int_value),
                                 static_cast<std::int32_t>(hi.int_value));
        } else {
            expect_punct("{");
            std::vector<std::string> members;
            if (!peek().is("}")) {
                do {
                    members.push_back(expect_name().text);
                } while (accept(","));
            }
            Token close = expect_punct("}");
            if (members.empty()) throw ParseError("domain has no members", close.span);
            defs_.add_symbol_domain(name.text, members);
        }
        if (!check_unique_domain(name.text))
            throw ParseError("duplicate domain '" + name.text + "'", name.span);
    }

    bool check_unique_domain(const std::string& name) {
        int n = 0;
        for (const auto& d : defs_.domains)
            if (d.name == name) ++n;
        return n == 1;
    }

    DomainId expect_domain() {
        Token t = expect(Token::Kind::Ident);
        auto d = defs_.find_domain(t.text);
        if (!d) throw ParseError("unknown domain '" + t.text + "'", t.span);
        return *d;
    }

    void parse_channel() {
        next(); // channel
        Token name = expect_name();
        if (defs_.find_channel(name.text))
            throw ParseError("duplicate channel '" + name.text + "'", name.span);
        std::vector<DomainId> params;
        if (accept(":")) {
            do {
                params.push_back(expect_domain());
            } while (accept(","));
        }
        defs_.add_channel(name.text, std::move(params));
    }

    void parse_var() {
        next(); // var
        Token name = expect_name();
        if (defs_.find_variable(name.text))
            throw ParseError("duplicate variable '" + name.text + "'", name.span);
        expect_punct(":");
        DomainId dom = expect_domain();
        expect_punct("=");
        Atom init = parse_atom_value(dom);
        defs_.add_variable(name.text, dom, init);
    }

    Atom parse_atom_value(DomainId expected) {
        Token t = next();
        Atom a = Atom::boolean(false);
        if (t.kind == Token::Kind::Int) {
            a = Atom::integer(static_cast<std::int32_t>(t.int_value));
        } else if (t.is_ident("true") || t.is_ident("false")) {
            a = Atom::boolean(t.text == "true");
        } else if (t.kind == Token::Kind::Ident) {
            auto found = defs_.find_atom(t.text);
            if (!found) throw ParseError("unknown value '" + t.text + "'", t.span);
            a = found->second;
        } else {
            throw ParseError("expected a value, found '" + display(t) + "'", t.span);
        }
        if (!defs_.domain(expected).contains(a))
            throw ParseError("value '" + t.text + "' lies outside domain '" +
                                 defs_.domain(expected).name + "'",
                             t.span);
        return a;
    }

    void parse_process() {
        next(); // process
        Token name = expect_name();
        if (defs_.find_process(name.text))
            throw ParseError("duplicate process '" + name.text + "'", name.span);
        std::vector<std::pair<std::string, DomainId>> params;
        if (accept("(")) {
            do {
                Token p = expect_name();
                expect_punct(":");
                params.emplace_back(p.text, expect_domain());
            } while (accept(","));
            expect_punct(")");
        }
        expect_punct("=");
        binders_.clear();
        for (const auto& [pname, pdom] : params) binders_.push_back(pname);
        // Forward references between processes are resolved by validate().
        TermPtr body = parse_term();
        defs_.add_process(name.text, body, std::move(params));
    }

    void parse_main() {
        next(); // main
        Token name = expect_name();
        if (!defs_.main.empty()) throw ParseError("main declared twice", name.span);
        defs_.main = name.text;
    }

    // --- terms ----------------------------------------------------------------
    TermPtr parse_term() { return parse_par(); }

    std::vector<std::string> parse_name_group() {
        expect_punct("{");
        std::vector<std::string> names;
        if (!peek().is("}")) {
            do {
                names.push_back(expect(Token::Kind::Ident).text);
            } while (accept(","));
        }
        expect_punct("}");
        return names;
    }

    std::vector<ChannelId> to_channel_set(const std::vector<std::string>& names,
                                          const SourceSpan& span) {
        std::vector<ChannelId> out;
        for (const auto& n : names) {
            auto c = defs_.find_channel(n);
            if (!c) throw ParseError("unknown channel '" + n + "'", span);
            out.push_back(*c);
        }
        return out;
    }

    TermPtr parse_par() {
        TermPtr acc = parse_choice();
        while (true) {
            if (peek().is("||")) {
                SourceSpan sp = peek().span;
                next();
                std::vector<std::vector<std::string>> groups;
                while (peek().is("{")) groups.push_back(parse_name_group());
                expect_punct("||");
                TermPtr rhs = parse_choice();
                if (groups.size() == 1) {
                    acc = model::make_par(acc, {}, to_channel_set(groups[0], sp), {}, rhs);
                } else if (groups.size() == 3) {
                    acc = model::make_par(acc, groups[0], to_channel_set(groups[1], sp), groups[2],
                                          rhs);
                } else {
                    throw ParseError("parallel operator takes one or three {...} groups", sp);
                }
            } else if (peek().is("|||") && !(peek(1).kind == Token::Kind::Ident && peek(2).is(":"))) {
                next();
                std::vector<std::vector<std::string>> groups;
                while (peek().is("{")) groups.push_back(parse_name_group());
                if (!groups.empty()) {
                    if (groups.size() != 2)
                        throw ParseError("interleave operator takes two {...} groups",
                                         peek().span);
                    expect_punct("|||");
                }
                TermPtr rhs = parse_choice();
                acc = groups.empty() ? model::make_interleave(acc, {}, {}, rhs)
                                     : model::make_interleave(acc, groups[0], groups[1], rhs);
            } else {
                return acc;
            }
        }
    }

    TermPtr parse_choice() {
        TermPtr acc = parse_seq();
        while (true) {
            if (accept("[]")) acc = model::make_ext_choice(acc, parse_seq());
            else if (accept("|~|")) acc = model::make_int_choice(acc, parse_seq());
            else return acc;
        }
    }

    TermPtr parse_seq() {
        TermPtr head = parse_hide();
        if (accept(";")) return model::make_seq(head, parse_seq()); // right-assoc
        return head;
    }

    TermPtr parse_hide() {
        TermPtr acc = parse_prefix();
        while (peek().is("\\")) {
            SourceSpan sp = next().span;
            acc = model::make_hide(acc, to_channel_set(parse_name_group(), sp));
        }
        return acc;
    }

    bool looks_like_comm() const {
        // IDENT followed by '.', '!', '?' or '->' begins a communication.
        if (peek().kind != Token::Kind::Ident) return false;
        const Token& n1 = peek(1);
        return n1.is(".") || n1.is("!") || n1.is("?") || n1.is("->");
    }

    bool looks_like_assign() const {
        if (peek().kind != Token::Kind::Ident) return false;
        std::size_t k = 1;
        while (peek(k).is(",") && peek(k + 1).kind == Token::Kind::Ident) k += 2;
        return peek(k).is(":=");
    }

    TermPtr parse_prefix() {
        if (looks_like_comm()) {
            const Token& head = peek();
            if (!defs_.find_channel(head.text))
                throw ParseError("unknown channel '" + head.text + "'", head.span);
            return parse_comm_prefix();
        }
        // Guard: try an expression followed by '&'.
        std::size_t save = pos_;
        if (!looks_like_assign()) {
            try {
                ExprPtr pred = parse_expr();
                if (accept("&")) return model::make_guard(pred, parse_prefix());
            } catch (const ParseError&) {
            }
            pos_ = save;
        }
        return parse_atomic();
    }

    TermPtr parse_comm_prefix() {
        Token chan = next();
        auto cid = defs_.find_channel(chan.text);
        if (!cid) throw ParseError("unknown channel '" + chan.text + "'", chan.span);
        model::Comm comm;
        comm.channel = *cid;
        std::vector<std::string> new_binders;
        while (true) {
            if (accept(".")) {
                CommPart p;
                p.kind = CommPart::Kind::Dot;
                p.expr = parse_expr_primary();
                comm.parts.push_back(std::move(p));
            } else if (accept("!")) {
                CommPart p;
                p.kind = CommPart::Kind::Out;
                p.expr = parse_expr_primary();
                comm.parts.push_back(std::move(p));
            } else if (accept("?")) {
                Token b = expect_name();
                CommPart p;
                p.kind = CommPart::Kind::In;
                p.binder = b.text;
                comm.parts.push_back(std::move(p));
                new_binders.push_back(b.text);
            } else {
                break;
            }
        }
        const auto& decl = defs_.channel(comm.channel);
        if (comm.parts.size() != decl.params.size())
            throw ParseError("arity mismatch on channel '" + decl.name + "': expected " +
                                 std::to_string(decl.params.size()) + " parameter(s), got " +
                                 std::to_string(comm.parts.size()),
                             chan.span);
        expect_punct("->");
        binders_.insert(binders_.end(), new_binders.begin(), new_binders.end());
        TermPtr body = parse_prefix();
        binders_.resize(binders_.size() - new_binders.size());
        return model::make_prefix(std::move(comm), body);
    }

    TermPtr parse_atomic() {
        const Token& t = peek();
        if (t.is_ident("Skip")) {
            next();
            return model::make_skip();
        }
        if (t.is_ident("Stop")) {
            next();
            return model::make_stop();
        }
        if (t.is("(")) {
            next();
            TermPtr inner = parse_term();
            expect_punct(")");
            return inner;
        }
        if (t.is("|||")) return parse_iter_interleave();
        if (t.is_ident("if")) return parse_cond();
        if (looks_like_assign()) return parse_assign();
        if (t.kind == Token::Kind::Ident) return parse_ref();
        throw ParseError("expected a process term, found '" + display(t) + "'", t.span);
    }

    TermPtr parse_iter_interleave() {
        next(); // |||
        Token binder = expect_name();
        expect_punct(":");
        Token dom = expect(Token::Kind::Ident);
        auto d = defs_.find_domain(dom.text);
        if (!d) throw ParseError("unknown domain '" + dom.text + "'", dom.span);
        expect_punct("@");
        binders_.push_back(binder.text);
        TermPtr body = parse_term();
        binders_.pop_back();
        return model::make_iter_interleave(binder.text, *d, body);
    }

    TermPtr parse_cond() {
        next(); // if
        std::vector<std::pair<ExprPtr, TermPtr>> branches;
        do {
            ExprPtr pred = parse_expr();
            expect_ident("then");
            branches.emplace_back(pred, parse_seq());
        } while (accept("[]"));
        expect_ident("fi");
        return model::make_cond(std::move(branches));
    }

    TermPtr parse_assign() {
        std::vector<std::string> vars;
        do {
            Token v = expect(Token::Kind::Ident);
            if (!defs_.find_variable(v.text))
                throw ParseError("assignment to unknown variable '" + v.text + "'", v.span);
            vars.push_back(v.text);
        } while (accept(","));
        expect_punct(":=");
        std::vector<ExprPtr> exprs;
        do {
            exprs.push_back(parse_expr());
        } while (accept(","));
        if (vars.size() != exprs.size())
            throw ParseError("assignment arity mismatch", peek().span);
        return model::make_assign(std::move(vars), std::move(exprs));
    }

    TermPtr parse_ref() {
        Token name = next();
        std::vector<ExprPtr> args;
        if (accept("(")) {
            do {
                args.push_back(parse_expr());
            } while (accept(","));
            expect_punct(")");
        }
        return model::make_ref(name.text, std::move(args));
    }

    // --- expressions -----------------------------------------------------------
    ExprPtr parse_expr() { return parse_or(); }

    ExprPtr parse_or() {
        ExprPtr acc = parse_and();
        while (peek().is_ident("or")) {
            next();
            acc = Expr::make_binary(Expr::Kind::Or, acc, parse_and());
        }
        return acc;
    }

    ExprPtr parse_and() {
        ExprPtr acc = parse_not();
        while (peek().is_ident("and")) {
            next();
            acc = Expr::make_binary(Expr::Kind::And, acc, parse_not());
        }
        return acc;
    }

    ExprPtr parse_not() {
        if (peek().is_ident("not")) {
            next();
            return Expr::make_unary(Expr::Kind::Not, parse_not());
        }
        return parse_cmp();
    }

    ExprPtr parse_cmp() {
        ExprPtr lhs = parse_expr_primary();
        if (accept("=")) return Expr::make_binary(Expr::Kind::Eq, lhs, parse_expr_primary());
        if (accept("!=")) return Expr::make_binary(Expr::Kind::Ne, lhs, parse_expr_primary());
        return lhs;
    }

    ExprPtr parse_expr_primary() {
        const Token& t = peek();
        if (t.is("(")) {
            next();
            ExprPtr e = parse_expr();
            expect_punct(")");
            return e;
        }
        if (t.kind == Token::Kind::Int) {
            next();
            return Expr::make_lit(Atom::integer(static_cast<std::int32_t>(t.int_value)));
        }
        if (t.is_ident("true") || t.is_ident("false")) {
            next();
            return Expr::make_lit(Atom::boolean(t.text == "true"));
        }
        if (t.kind == Token::Kind::Ident) {
            next();
            if (std::find(binders_.begin(), binders_.end(), t.text) != binders_.end())
                return Expr::make_var(t.text);
            if (defs_.find_variable(t.text)) return Expr::make_var(t.text);
            if (auto found = defs_.find_atom(t.text)) return Expr::make_lit(found->second);
            throw ParseError("unknown identifier '" + t.text + "'", t.span);
        }
        throw ParseError("expected an expression, found '" + display(t) + "'", t.span);
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    ModelDefs defs_;
    std::vector<std::string> binders_;
};

} // namespace

ModelDefs parse(const ModelSource& src) { return Parser(src).run(); }

} // namespace mk2::dsl
