#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mk2/errors.hpp"

namespace mk2::dsl {

/// A model or topology document plus where it came from (for diagnostics).
struct ModelSource {
    std::string text;
    std::string origin = "<builtin>";
};

struct Token {
    enum class Kind : std::uint8_t { Ident, Int, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    std::int64_t int_value = 0;
    SourceSpan span;

    bool is(const char* punct) const { return kind == Kind::Punct && text == punct; }
    bool is_ident(const char* word) const { return kind == Kind::Ident && text == word; }
};

/// Tokenise a whole document. '#' starts a line comment.
std::vector<Token> lex(const ModelSource& src);

} // namespace mk2::dsl
