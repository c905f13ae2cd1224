#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "lcdr/tokenizer.hpp"

namespace lcdr {

enum class Language { python, java, csharp };

Language language_from_string(std::string_view name);
const char* to_string(Language lang);

enum class StatementKind { import_stmt, class_def, function_def, struct_def };
const char* to_string(StatementKind kind);

/// A global-scope statement whose line feed becomes a memory token: a package
/// import, or a class / function / struct definition (methods included).
struct GlobalStatement {
    StatementKind kind;
    ByteSpan stmt_span;
    // Offset of the "\n" ending the header line (the line carrying the
    // introducing keyword and name). Files not ending in a newline use the
    // end-of-file offset as a virtual LF.
    size_t lf_byte = 0;
};

/// Sorted token indices granted global attention, |positions| == k.
struct GlobalPositionSet {
    std::vector<int> positions;
    int k() const { return static_cast<int>(positions.size()); }
};

/// True iff the per-language grammar produces a tree with no error nodes.
/// Throws "unsupported language" only via language_from_string; the enum is
/// total here.
bool parse_check(std::string_view text, Language lang);

/// Global-scope statements in document order. Strict: throws "parse failure"
/// when the grammar reports error nodes (callers filter with parse_check
/// first). The lenient variant extracts whatever was recognized and is used
/// on inference-time contexts that may be truncated mid-statement.
std::vector<GlobalStatement> extract_global_statements(std::string_view text, Language lang);
std::vector<GlobalStatement> extract_global_statements_lenient(std::string_view text,
                                                               Language lang);

enum class CapPolicy { keep_earliest, keep_latest };

/// Maps each statement's lf_byte to the token whose span contains it, dedups,
/// sorts, and caps at k_max. Imports and top-level definitions cluster at file
/// start, so the default keeps the earliest positions; keep_latest exists for
/// the ablation harness. Throws "span misalignment" when an lf_byte is not
/// covered by any token span.
GlobalPositionSet global_token_positions(const std::vector<GlobalStatement>& stmts,
                                         const TokenSequence& seq, int k_max,
                                         CapPolicy policy = CapPolicy::keep_earliest);

/// Byte spans of grammar comment nodes (used for target-line eligibility).
std::vector<ByteSpan> comment_spans(std::string_view text, Language lang);

}  // namespace lcdr
