#include "mk2/dsl/lexer.hpp"

#include <cctype>

namespace mk2::dsl {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

} // namespace

std::vector<Token> lex(const ModelSource& src) {
    std::vector<Token> out;
    const std::string& s = src.text;
    std::size_t i = 0, line = 1, col = 1;

    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (i < s.size() && s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    auto span_here = [&](std::size_t len) {
        SourceSpan sp;
        sp.line = line;
        sp.column = col;
        sp.end_line = line;
        sp.end_column = col + len;
        return sp;
    };
    auto push_punct = [&](std::size_t len) {
        Token t;
        t.kind = Token::Kind::Punct;
        t.text = s.substr(i, len);
        t.span = span_here(len);
        out.push_back(std::move(t));
        advance(len);
    };

    while (i < s.size()) {
        char c = s[i];
        if (c == '#' ) {
            while (i < s.size() && s[i] != '\n') advance(1);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (ident_start(c)) {
            std::size_t j = i;
            while (j < s.size() && ident_char(s[j])) ++j;
            Token t;
            t.kind = Token::Kind::Ident;
            t.text = s.substr(i, j - i);
            t.span = span_here(j - i);
            out.push_back(std::move(t));
            advance(j - i);
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
            std::size_t j = i + 1;
            while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
            Token t;
            t.kind = Token::Kind::Int;
            t.text = s.substr(i, j - i);
            t.int_value = std::stoll(t.text);
            t.span = span_here(j - i);
            out.push_back(std::move(t));
            advance(j - i);
            continue;
        }
        auto starts_with = [&](const char* p) {
            std::size_t n = std::char_traits<char>::length(p);
            return s.compare(i, n, p) == 0;
        };
        if (starts_with("|~|")) {
            push_punct(3);
            continue;
        }
        if (c == '|') {
            std::size_t j = i;
            while (j < s.size() && s[j] == '|') ++j;
            std::size_t run = j - i;
            if (run == 2 || run == 3) {
                push_punct(run);
                continue;
            }
            throw ParseError("stray '|' sequence", span_here(run));
        }
        if (starts_with(":=") || starts_with("!=") || starts_with("->") || starts_with("[]") ||
            starts_with("..")) {
            push_punct(2);
            continue;
        }
        switch (c) {
        case '{': case '}': case '(': case ')': case ',': case ';': case ':': case '.':
        case '!': case '?': case '=': case '\\': case '&': case '@':
            push_punct(1);
            continue;
        default:
            throw ParseError(std::string("unexpected character '") + c + "'", span_here(1));
        }
    }

    Token end;
    end.kind = Token::Kind::End;
    end.span = span_here(1);
    out.push_back(std::move(end));
    return out;
}

} // namespace mk2::dsl
