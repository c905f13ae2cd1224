#include "lexer.hpp"

#include <cctype>

namespace lcdr::detail {

namespace {

bool is_ident_start(unsigned char c) {
    return std::isalpha(c) || c == '_' || c >= 0x80;
}
bool is_ident_char(unsigned char c) {
    return std::isalnum(c) || c == '_' || c >= 0x80;
}

struct Cursor {
    std::string_view text;
    size_t pos = 0;

    bool done() const { return pos >= text.size(); }
    char peek(size_t off = 0) const {
        return pos + off < text.size() ? text[pos + off] : '\0';
    }
    bool starts_with(std::string_view s) const {
        return text.substr(pos, s.size()) == s;
    }
};

void push(LexResult& out, LexKind kind, size_t begin, size_t end) {
    out.tokens.push_back({kind, begin, end});
}

void fail(LexResult& out, size_t pos, std::string message) {
    out.ok = false;
    out.error_pos = pos;
    out.error = std::move(message);
}

// Scans a quoted literal starting at the opening quote. `verbatim` uses the
// doubled-quote escape and allows raw newlines (C# @""), `triple` scans to the
// matching triple quote. Returns one past the closing quote, or npos.
size_t scan_string(std::string_view text, size_t at, char quote, bool triple, bool verbatim,
                   bool allow_newline) {
    if (triple) {
        size_t p = at + 3;
        const char q3[4] = {quote, quote, quote, '\0'};
        while (p + 2 < text.size() + 1) {
            size_t hit = text.find(q3, p);
            if (hit == std::string_view::npos) return std::string_view::npos;
            // an escaped quote cannot close the literal
            size_t backslashes = 0;
            while (hit >= backslashes + 1 && text[hit - backslashes - 1] == '\\') ++backslashes;
            if (backslashes % 2 == 0) return hit + 3;
            p = hit + 1;
        }
        return std::string_view::npos;
    }
    size_t p = at + 1;
    while (p < text.size()) {
        char c = text[p];
        if (verbatim) {
            if (c == quote) {
                if (p + 1 < text.size() && text[p + 1] == quote) {
                    p += 2;
                    continue;
                }
                return p + 1;
            }
            ++p;
            continue;
        }
        if (c == '\\' && p + 1 < text.size()) {
            p += 2;
            continue;
        }
        if (c == quote) return p + 1;
        if (c == '\n' && !allow_newline) return std::string_view::npos;
        ++p;
    }
    return std::string_view::npos;
}

LexResult lex_python(std::string_view text) {
    LexResult out;
    Cursor c{text};
    while (!c.done()) {
        char ch = c.peek();
        size_t begin = c.pos;
        if (ch == '\n') {
            push(out, LexKind::newline, begin, begin + 1);
            ++c.pos;
        } else if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\f') {
            ++c.pos;
        } else if (ch == '\\' && c.peek(1) == '\n') {
            c.pos += 2;  // explicit line continuation
        } else if (ch == '\\' && c.peek(1) == '\r' && c.peek(2) == '\n') {
            c.pos += 3;
        } else if (ch == '#') {
            size_t end = text.find('\n', begin);
            if (end == std::string_view::npos) end = text.size();
            push(out, LexKind::comment, begin, end);
            c.pos = end;
        } else if (ch == '\'' || ch == '"') {
            bool triple = c.starts_with(std::string(3, ch));
            size_t end = scan_string(text, begin, ch, triple, false, triple);
            if (end == std::string_view::npos) {
                fail(out, begin, "unterminated string literal");
                return out;
            }
            push(out, LexKind::str, begin, end);
            c.pos = end;
        } else if (is_ident_start(static_cast<unsigned char>(ch))) {
            size_t p = begin;
            while (p < text.size() && is_ident_char(static_cast<unsigned char>(text[p]))) ++p;
            // string prefixes like r"", rb'', f""
            if (p - begin <= 2 && p < text.size() && (text[p] == '"' || text[p] == '\'')) {
                bool prefix_ok = true;
                for (size_t i = begin; i < p; ++i) {
                    char l = static_cast<char>(std::tolower(text[i]));
                    if (l != 'r' && l != 'b' && l != 'f' && l != 'u') prefix_ok = false;
                }
                if (prefix_ok) {
                    char quote = text[p];
                    bool triple = text.substr(p, 3) == std::string(3, quote);
                    size_t end = scan_string(text, p, quote, triple, false, triple);
                    if (end == std::string_view::npos) {
                        fail(out, begin, "unterminated string literal");
                        return out;
                    }
                    push(out, LexKind::str, begin, end);
                    c.pos = end;
                    continue;
                }
            }
            push(out, LexKind::ident, begin, p);
            c.pos = p;
        } else if (std::isdigit(static_cast<unsigned char>(ch))) {
            size_t p = begin;
            while (p < text.size() &&
                   (is_ident_char(static_cast<unsigned char>(text[p])) || text[p] == '.')) {
                ++p;
            }
            push(out, LexKind::number, begin, p);
            c.pos = p;
        } else {
            push(out, LexKind::punct, begin, begin + 1);
            ++c.pos;
        }
    }
    return out;
}

LexResult lex_cfamily(std::string_view text, bool csharp) {
    LexResult out;
    Cursor c{text};
    while (!c.done()) {
        char ch = c.peek();
        size_t begin = c.pos;
        if (std::isspace(static_cast<unsigned char>(ch))) {
            ++c.pos;
        } else if (ch == '/' && c.peek(1) == '/') {
            size_t end = text.find('\n', begin);
            if (end == std::string_view::npos) end = text.size();
            push(out, LexKind::comment, begin, end);
            c.pos = end;
        } else if (ch == '/' && c.peek(1) == '*') {
            size_t end = text.find("*/", begin + 2);
            if (end == std::string_view::npos) {
                fail(out, begin, "unterminated block comment");
                return out;
            }
            push(out, LexKind::comment, begin, end + 2);
            c.pos = end + 2;
        } else if (csharp && (ch == '@' || ch == '$') &&
                   (c.peek(1) == '"' || ((c.peek(1) == '@' || c.peek(1) == '$') && c.peek(2) == '"'))) {
            size_t qpos = begin + 1;
            bool verbatim = ch == '@';
            if (c.peek(1) == '@' || c.peek(1) == '$') {
                verbatim = verbatim || c.peek(1) == '@';
                qpos = begin + 2;
            }
            size_t end = scan_string(text, qpos, '"', false, verbatim, verbatim);
            if (end == std::string_view::npos) {
                fail(out, begin, "unterminated string literal");
                return out;
            }
            push(out, LexKind::str, begin, end);
            c.pos = end;
        } else if (ch == '"') {
            bool triple = !csharp && c.starts_with("\"\"\"");  // Java text block
            size_t end = scan_string(text, begin, '"', triple, false, triple);
            if (end == std::string_view::npos) {
                fail(out, begin, "unterminated string literal");
                return out;
            }
            push(out, LexKind::str, begin, end);
            c.pos = end;
        } else if (ch == '\'') {
            size_t end = scan_string(text, begin, '\'', false, false, false);
            if (end == std::string_view::npos) {
                fail(out, begin, "unterminated character literal");
                return out;
            }
            push(out, LexKind::str, begin, end);
            c.pos = end;
        } else if (is_ident_start(static_cast<unsigned char>(ch))) {
            size_t p = begin;
            while (p < text.size() && is_ident_char(static_cast<unsigned char>(text[p]))) ++p;
            push(out, LexKind::ident, begin, p);
            c.pos = p;
        } else if (std::isdigit(static_cast<unsigned char>(ch))) {
            size_t p = begin;
            while (p < text.size() &&
                   (is_ident_char(static_cast<unsigned char>(text[p])) || text[p] == '.')) {
                ++p;
            }
            push(out, LexKind::number, begin, p);
            c.pos = p;
        } else {
            push(out, LexKind::punct, begin, begin + 1);
            ++c.pos;
        }
    }
    return out;
}

}  // namespace

LexResult lex_source(std::string_view text, Language lang) {
    switch (lang) {
        case Language::python: return lex_python(text);
        case Language::java: return lex_cfamily(text, false);
        case Language::csharp: return lex_cfamily(text, true);
    }
    return {};
}

}  // namespace lcdr::detail
