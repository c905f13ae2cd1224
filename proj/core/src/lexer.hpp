#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lcdr/syntax.hpp"

namespace lcdr::detail {

enum class LexKind { ident, number, str, comment, punct, newline };

struct LexToken {
    LexKind kind;
    size_t begin;
    size_t end;
};

struct LexResult {
    std::vector<LexToken> tokens;
    bool ok = true;
    size_t error_pos = 0;
    std::string error;
};

// Tokenizes source for structural parsing. Python emits newline tokens
// (indentation grammar) and folds backslash-newline continuations; the
// C-family lexer does not emit newlines. On error, tokens up to the error
// position are kept so lenient extraction can still use them.
LexResult lex_source(std::string_view text, Language lang);

}  // namespace lcdr::detail
