#include "lcdr/syntax.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <stdexcept>
#include <string>

#include "lexer.hpp"

namespace lcdr {

namespace {

using detail::LexKind;
using detail::LexResult;
using detail::LexToken;

struct ParseOutput {
    std::vector<GlobalStatement> stmts;
    std::vector<std::string> errors;
};

std::string_view text_of(std::string_view text, const LexToken& tok) {
    return text.substr(tok.begin, tok.end - tok.begin);
}

// First "\n" at or after `from` that is not inside a string or comment token;
// end of file acts as a virtual LF for files without a trailing newline.
size_t next_lf(std::string_view text, size_t from, const std::vector<LexToken>& toks) {
    size_t p = from;
    while (true) {
        p = text.find('\n', p);
        if (p == std::string_view::npos) return text.size();
        auto it = std::upper_bound(toks.begin(), toks.end(), p,
                                   [](size_t pos, const LexToken& t) { return pos < t.end; });
        if (it != toks.end() && it->begin <= p &&
            (it->kind == LexKind::str || it->kind == LexKind::comment)) {
            p = it->end;
            continue;
        }
        return p;
    }
}

// ---------------------------------------------------------------------------
// Python: logical lines + indentation grammar
// ---------------------------------------------------------------------------

const std::set<std::string_view> kPyCompound = {"if",   "elif",  "else", "for",    "while",
                                                "try",  "except", "finally", "with",
                                                "def",  "class"};

int indent_of_line(std::string_view text, size_t line_start) {
    int col = 0;
    for (size_t p = line_start; p < text.size(); ++p) {
        if (text[p] == ' ') {
            ++col;
        } else if (text[p] == '\t') {
            col = (col / 8 + 1) * 8;
        } else {
            break;
        }
    }
    return col;
}

size_t line_start_before(std::string_view text, size_t pos) {
    size_t p = text.rfind('\n', pos == 0 ? 0 : pos - 1);
    if (pos == 0) return 0;
    return p == std::string_view::npos ? 0 : p + 1;
}

ParseOutput parse_python(std::string_view text) {
    ParseOutput out;
    LexResult lex = detail::lex_source(text, Language::python);
    if (!lex.ok) out.errors.push_back(lex.error);
    const auto& toks = lex.tokens;

    struct Logical {
        std::vector<size_t> content;  // indices of non-comment tokens
        int indent = 0;
    };
    std::vector<Logical> lines;
    {
        Logical cur;
        std::vector<char> brackets;
        bool bracket_error = false;
        for (size_t i = 0; i < toks.size(); ++i) {
            const LexToken& t = toks[i];
            if (t.kind == LexKind::comment) continue;
            if (t.kind == LexKind::newline) {
                if (brackets.empty()) {
                    if (!cur.content.empty()) {
                        lines.push_back(std::move(cur));
                        cur = {};
                    }
                }
                continue;
            }
            if (t.kind == LexKind::punct) {
                char c = text[t.begin];
                if (c == '(' || c == '[' || c == '{') {
                    brackets.push_back(c);
                } else if (c == ')' || c == ']' || c == '}') {
                    const char open = c == ')' ? '(' : (c == ']' ? '[' : '{');
                    if (brackets.empty() || brackets.back() != open) {
                        if (!bracket_error) out.errors.push_back("mismatched bracket");
                        bracket_error = true;
                    } else {
                        brackets.pop_back();
                    }
                }
            }
            if (cur.content.empty()) {
                cur.indent = indent_of_line(text, line_start_before(text, t.begin));
            }
            cur.content.push_back(i);
        }
        if (!cur.content.empty()) lines.push_back(std::move(cur));
        if (!brackets.empty()) out.errors.push_back("unexpected end of file inside brackets");
    }

    enum class Ctx { module, cls, func, other };
    struct Frame {
        int indent;
        Ctx ctx;
        int stmt = -1;  // index into out.stmts owning this block
    };
    std::vector<Frame> frames = {{0, Ctx::module, -1}};
    struct Pending {
        Ctx ctx;
        int stmt;
    };
    bool expect_block = false;
    Pending pending{Ctx::other, -1};
    size_t prev_line_end = 0;

    auto finalize = [&](const Frame& f) {
        if (f.stmt >= 0) out.stmts[static_cast<size_t>(f.stmt)].stmt_span.end = prev_line_end;
    };

    for (const Logical& line : lines) {
        const int ind = line.indent;
        if (expect_block) {
            if (ind <= frames.back().indent) {
                out.errors.push_back("expected an indented block");
            } else {
                frames.push_back({ind, pending.ctx, pending.stmt});
            }
            expect_block = false;
        } else if (ind > frames.back().indent) {
            out.errors.push_back("unexpected indent");
            frames.push_back({ind, Ctx::other, -1});
        } else {
            while (ind < frames.back().indent) {
                finalize(frames.back());
                frames.pop_back();
            }
            if (ind != frames.back().indent) {
                out.errors.push_back("unindent does not match any outer indentation level");
            }
        }

        // statement classification
        size_t kw_idx = line.content.front();
        std::string_view first = toks[kw_idx].kind == LexKind::ident
                                     ? text_of(text, toks[kw_idx])
                                     : std::string_view{};
        size_t eff = 0;  // offset of effective keyword within the line
        if (first == "async" && line.content.size() > 1) {
            std::string_view second = text_of(text, toks[line.content[1]]);
            if (second == "def" || second == "for" || second == "with") {
                first = second;
                eff = 1;
            }
        }
        const LexToken& kw = toks[line.content[eff]];

        // bracket depth per token and the position of a statement-level colon
        bool colon_at_end = false;
        bool colon_any = false;
        {
            int depth = 0;
            for (size_t k = 0; k < line.content.size(); ++k) {
                const LexToken& t = toks[line.content[k]];
                if (t.kind != LexKind::punct) continue;
                char c = text[t.begin];
                if (c == '(' || c == '[' || c == '{') ++depth;
                if (c == ')' || c == ']' || c == '}') --depth;
                if (c == ':' && depth == 0) {
                    colon_any = true;
                    colon_at_end = k + 1 == line.content.size();
                }
            }
        }

        const bool compound = kPyCompound.count(first) > 0;
        if (compound && !colon_any) {
            out.errors.push_back(std::string("missing ':' after '") + std::string(first) + "'");
        }

        const size_t line_end = toks[line.content.back()].end;
        int stmt_index = -1;
        const Ctx here = frames.back().ctx;
        bool in_function_scope = false;
        for (const Frame& f : frames)
            if (f.ctx == Ctx::func) in_function_scope = true;

        if (first == "def" || first == "class") {
            // header shape: keyword NAME ... ; def additionally requires "("
            const size_t name_pos = eff + 1;
            bool ok_header = line.content.size() > name_pos &&
                             toks[line.content[name_pos]].kind == LexKind::ident;
            if (first == "def") {
                ok_header = ok_header && line.content.size() > name_pos + 1 &&
                            toks[line.content[name_pos + 1]].kind == LexKind::punct &&
                            text[toks[line.content[name_pos + 1]].begin] == '(';
            }
            if (!ok_header) {
                out.errors.push_back(std::string("malformed ") + std::string(first) + " header");
            }
            if ((here == Ctx::module || here == Ctx::cls) && !in_function_scope) {
                GlobalStatement st;
                st.kind = first == "class" ? StatementKind::class_def : StatementKind::function_def;
                st.stmt_span = {toks[line.content.front()].begin, line_end};
                st.lf_byte = next_lf(text, kw.begin, toks);
                stmt_index = static_cast<int>(out.stmts.size());
                out.stmts.push_back(st);
            }
        } else if ((first == "import" || first == "from") && !in_function_scope &&
                   (here == Ctx::module || here == Ctx::cls)) {
            GlobalStatement st;
            st.kind = StatementKind::import_stmt;
            st.stmt_span = {toks[line.content.front()].begin, line_end};
            st.lf_byte = next_lf(text, toks[line.content.back()].begin, toks);
            out.stmts.push_back(st);
        }

        if (compound) {
            if (colon_at_end) {
                expect_block = true;
                pending.ctx = first == "def" ? Ctx::func : (first == "class" ? Ctx::cls : Ctx::other);
                pending.stmt = stmt_index;
            }
            // inline suite ("if x: y"): no block, span already covers the line
        }
        prev_line_end = line_end;
    }
    if (expect_block) out.errors.push_back("expected an indented block");
    while (!frames.empty()) {
        finalize(frames.back());
        frames.pop_back();
    }
    std::stable_sort(out.stmts.begin(), out.stmts.end(),
                     [](const GlobalStatement& a, const GlobalStatement& b) {
                         return a.stmt_span.begin < b.stmt_span.begin;
                     });
    return out;
}

// ---------------------------------------------------------------------------
// Java / C#: brace contexts + member grammar
// ---------------------------------------------------------------------------

bool is_type_keyword(std::string_view s, Language lang) {
    if (s == "class" || s == "interface" || s == "enum") return true;
    if (s == "record") return true;
    if (lang == Language::csharp && s == "struct") return true;
    return false;
}

ParseOutput parse_cfamily(std::string_view text, Language lang) {
    ParseOutput out;
    LexResult lex = detail::lex_source(text, lang);
    if (!lex.ok) out.errors.push_back(lex.error);
    const auto& toks = lex.tokens;

    enum class Ctx { top, ns, cls, block };
    struct Frame {
        Ctx ctx;
        int stmt = -1;
    };
    std::vector<Frame> frames = {{Ctx::top, -1}};
    std::vector<char> brackets;  // all of ( [ {
    std::vector<size_t> pending;  // non-comment token indices since last boundary

    auto punct_at = [&](size_t i) -> char {
        return toks[i].kind == LexKind::punct ? text[toks[i].begin] : '\0';
    };

    // Skips leading annotation (@Name, @Name(...)) and attribute ([...]) groups.
    auto effective_start = [&]() -> size_t {
        size_t k = 0;
        while (k < pending.size()) {
            char c = punct_at(pending[k]);
            if (c == '@' && lang == Language::java) {
                ++k;  // @
                if (k < pending.size() && toks[pending[k]].kind == LexKind::ident) ++k;
                if (k < pending.size() && punct_at(pending[k]) == '(') {
                    int depth = 0;
                    do {
                        char b = punct_at(pending[k]);
                        if (b == '(') ++depth;
                        if (b == ')') --depth;
                        ++k;
                    } while (k < pending.size() && depth > 0);
                }
                continue;
            }
            if (c == '[' && lang == Language::csharp) {
                int depth = 0;
                do {
                    char b = punct_at(pending[k]);
                    if (b == '[') ++depth;
                    if (b == ']') --depth;
                    ++k;
                } while (k < pending.size() && depth > 0);
                continue;
            }
            break;
        }
        return k;
    };

    auto ident_text = [&](size_t pending_pos) -> std::string_view {
        if (pending_pos >= pending.size()) return {};
        const LexToken& t = toks[pending[pending_pos]];
        return t.kind == LexKind::ident ? text_of(text, t) : std::string_view{};
    };

    // Handles one member/declaration ending at `boundary` ('{', ';').
    // Returns the context to push when boundary is '{'.
    auto classify = [&](char boundary) -> Frame {
        Frame push{Ctx::block, -1};
        if (pending.empty()) return push;
        const Ctx here = frames.back().ctx;
        const size_t start = effective_start();
        if (start >= pending.size()) return push;

        // type declaration scan; stop at generic constraint clauses
        size_t type_kw = pending.size();
        std::string_view type_kw_text;
        for (size_t k = start; k < pending.size(); ++k) {
            std::string_view s = ident_text(k);
            if (s == "where" && lang == Language::csharp) break;
            if (s == "extends" || s == "implements") break;
            if (is_type_keyword(s, lang)) {
                // java annotation declarations (@interface) are type declarations
                type_kw = k;
                type_kw_text = s;
                break;
            }
        }

        if (type_kw < pending.size()) {
            StatementKind kind = StatementKind::class_def;
            size_t name_at = type_kw + 1;
            if (type_kw_text == "record" && ident_text(name_at) == "struct") {
                kind = StatementKind::struct_def;
                ++name_at;
            } else if (type_kw_text == "struct") {
                kind = StatementKind::struct_def;
            }
            if (name_at >= pending.size() || toks[pending[name_at]].kind != LexKind::ident) {
                out.errors.push_back("type declaration missing name");
                return push;
            }
            if (here == Ctx::top || here == Ctx::ns || here == Ctx::cls) {
                GlobalStatement st;
                st.kind = kind;
                st.stmt_span = {toks[pending.front()].begin, toks[pending.back()].end};
                st.lf_byte = next_lf(text, toks[pending[name_at]].end, toks);
                push.stmt = static_cast<int>(out.stmts.size());
                out.stmts.push_back(st);
                push.ctx = Ctx::cls;
            }
            return push;
        }

        std::string_view first = ident_text(start);
        if (here == Ctx::top || here == Ctx::ns) {
            if (lang == Language::java && first == "package") {
                if (boundary != ';') out.errors.push_back("malformed package declaration");
                return push;
            }
            const bool using_directive =
                lang == Language::csharp &&
                (first == "using" || (first == "global" && ident_text(start + 1) == "using"));
            if ((lang == Language::java && first == "import") || using_directive) {
                if (boundary != ';') {
                    out.errors.push_back("malformed import");
                    return push;
                }
                GlobalStatement st;
                st.kind = StatementKind::import_stmt;
                st.stmt_span = {toks[pending.front()].begin, toks[pending.back()].end};
                st.lf_byte = next_lf(text, toks[pending.back()].end, toks);
                out.stmts.push_back(st);
                return push;
            }
            if (lang == Language::csharp && first == "namespace") {
                if (boundary == '{') {
                    push.ctx = Ctx::ns;
                } else {
                    frames.front().ctx = Ctx::ns;  // file-scoped namespace
                }
                return push;
            }
            out.errors.push_back("unexpected statement at file scope");
            return push;
        }

        if (here == Ctx::cls) {
            // member method / constructor: first ident directly followed by "("
            // at top nesting, with no preceding "=" (fields) and not "new".
            int nest = 0;
            for (size_t k = start; k + 1 < pending.size(); ++k) {
                char c = punct_at(pending[k]);
                if (c == '(' || c == '[') ++nest;
                if (c == ')' || c == ']') --nest;
                if (nest > 0) continue;
                if (c == '=' && punct_at(pending[k + 1]) != '>') break;  // field initializer
                std::string_view s = ident_text(k);
                if (s == "new") break;
                if (!s.empty() && punct_at(pending[k + 1]) == '(') {
                    GlobalStatement st;
                    st.kind = StatementKind::function_def;
                    st.stmt_span = {toks[pending.front()].begin, toks[pending.back()].end};
                    st.lf_byte = next_lf(text, toks[pending[k]].end, toks);
                    push.stmt = static_cast<int>(out.stmts.size());
                    out.stmts.push_back(st);
                    break;
                }
            }
            return push;
        }
        return push;
    };

    for (size_t i = 0; i < toks.size(); ++i) {
        const LexToken& t = toks[i];
        if (t.kind == LexKind::comment || t.kind == LexKind::newline) continue;
        char c = punct_at(i);
        if (c == '(' || c == '[') {
            brackets.push_back(c);
            pending.push_back(i);
            continue;
        }
        if (c == ')' || c == ']') {
            const char open = c == ')' ? '(' : '[';
            if (brackets.empty() || brackets.back() != open) {
                out.errors.push_back("mismatched bracket");
            } else {
                brackets.pop_back();
            }
            pending.push_back(i);
            continue;
        }
        if (c == '{') {
            bool expression_level =
                std::find_if(brackets.begin(), brackets.end(),
                             [](char b) { return b != '{'; }) != brackets.end();
            brackets.push_back('{');
            Frame f = expression_level ? Frame{Ctx::block, -1} : classify('{');
            frames.push_back(f);
            pending.clear();
            continue;
        }
        if (c == '}') {
            if (brackets.empty() || brackets.back() != '{') {
                out.errors.push_back("mismatched bracket");
            } else {
                brackets.pop_back();
            }
            if (frames.size() > 1) {
                if (frames.back().stmt >= 0)
                    out.stmts[static_cast<size_t>(frames.back().stmt)].stmt_span.end = t.end;
                frames.pop_back();
            } else {
                out.errors.push_back("unmatched '}'");
            }
            pending.clear();
            continue;
        }
        if (c == ';') {
            bool expression_level =
                std::find_if(brackets.begin(), brackets.end(),
                             [](char b) { return b != '{'; }) != brackets.end();
            if (!expression_level) {
                classify(';');
                pending.clear();
            } else {
                pending.push_back(i);  // e.g. "for(;;)"
            }
            continue;
        }
        pending.push_back(i);
    }
    if (!brackets.empty()) out.errors.push_back("unexpected end of file inside brackets");
    if (!pending.empty() &&
        (frames.back().ctx == Ctx::top || frames.back().ctx == Ctx::ns)) {
        out.errors.push_back("unterminated statement at end of file");
    }
    std::stable_sort(out.stmts.begin(), out.stmts.end(),
                     [](const GlobalStatement& a, const GlobalStatement& b) {
                         return a.stmt_span.begin < b.stmt_span.begin;
                     });
    return out;
}

ParseOutput parse_source(std::string_view text, Language lang) {
    return lang == Language::python ? parse_python(text) : parse_cfamily(text, lang);
}

}  // namespace

Language language_from_string(std::string_view name) {
    if (name == "python" || name == "py") return Language::python;
    if (name == "java") return Language::java;
    if (name == "csharp" || name == "cs" || name == "c#") return Language::csharp;
    throw std::runtime_error("unsupported language: " + std::string(name));
}

const char* to_string(Language lang) {
    switch (lang) {
        case Language::python: return "python";
        case Language::java: return "java";
        case Language::csharp: return "csharp";
    }
    return "?";
}

const char* to_string(StatementKind kind) {
    switch (kind) {
        case StatementKind::import_stmt: return "import";
        case StatementKind::class_def: return "class_def";
        case StatementKind::function_def: return "function_def";
        case StatementKind::struct_def: return "struct_def";
    }
    return "?";
}

bool parse_check(std::string_view text, Language lang) {
    return parse_source(text, lang).errors.empty();
}

std::vector<GlobalStatement> extract_global_statements(std::string_view text, Language lang) {
    ParseOutput out = parse_source(text, lang);
    if (!out.errors.empty()) throw std::runtime_error("parse failure: " + out.errors.front());
    return std::move(out.stmts);
}

std::vector<GlobalStatement> extract_global_statements_lenient(std::string_view text,
                                                               Language lang) {
    return parse_source(text, lang).stmts;
}

GlobalPositionSet global_token_positions(const std::vector<GlobalStatement>& stmts,
                                         const TokenSequence& seq, int k_max, CapPolicy policy) {
    GlobalPositionSet g;
    if (stmts.empty()) return g;
    if (seq.empty()) throw std::runtime_error("span misalignment");
    const size_t total_len = seq.spans.back().end;

    for (const GlobalStatement& st : stmts) {
        size_t lf = st.lf_byte;
        int pos;
        if (lf >= total_len) {
            if (lf > total_len) throw std::runtime_error("span misalignment");
            pos = static_cast<int>(seq.size()) - 1;  // virtual LF at EOF
        } else {
            auto it = std::upper_bound(seq.spans.begin(), seq.spans.end(), lf,
                                       [](size_t p, const ByteSpan& s) { return p < s.end; });
            if (it == seq.spans.end() || it->begin > lf)
                throw std::runtime_error("span misalignment");
            pos = static_cast<int>(it - seq.spans.begin());
        }
        g.positions.push_back(pos);
    }
    std::sort(g.positions.begin(), g.positions.end());
    g.positions.erase(std::unique(g.positions.begin(), g.positions.end()), g.positions.end());
    if (k_max >= 0 && g.k() > k_max) {
        if (policy == CapPolicy::keep_earliest) {
            g.positions.resize(static_cast<size_t>(k_max));
        } else {
            g.positions.erase(g.positions.begin(),
                              g.positions.end() - static_cast<ptrdiff_t>(k_max));
        }
    }
    return g;
}

std::vector<ByteSpan> comment_spans(std::string_view text, Language lang) {
    std::vector<ByteSpan> spans;
    for (const auto& t : detail::lex_source(text, lang).tokens) {
        if (t.kind == LexKind::comment) spans.push_back({t.begin, t.end});
    }
    return spans;
}

}  // namespace lcdr
