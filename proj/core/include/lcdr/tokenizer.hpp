#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lcdr {

using TokenId = int32_t;

// Reserved ids. Byte-fallback entries occupy [kNumSpecialTokens, kNumSpecialTokens + 256),
// learned merges follow. BRIDGE is inserted by the attention layout only and never
// appears in an encoding of raw text.
inline constexpr TokenId kPadId = 0;
inline constexpr TokenId kBosId = 1;
inline constexpr TokenId kEosId = 2;
inline constexpr TokenId kBridgeId = 3;
inline constexpr int kNumSpecialTokens = 4;
inline constexpr int kByteFallbackBase = kNumSpecialTokens;
inline constexpr int kMinVocabSize = kByteFallbackBase + 256;

/// Byte-level vocabulary with greedy pair merges. Immutable after build;
/// encode/decode are pure and thread-safe.
class Vocab {
public:
    Vocab() = default;

    /// Token bytes for `id`; throws for special ids (they have no byte content).
    const std::string& token_bytes(TokenId id) const;

    TokenId lf_id() const { return kByteFallbackBase + static_cast<int>('\n'); }
    int size() const { return static_cast<int>(entries_.size()); }
    bool is_special(TokenId id) const { return id >= 0 && id < kNumSpecialTokens; }

    /// Serialized form: header line "vocab-v1 <size>", then one token per line
    /// with escaped bytes. Specials serialize as their angle-bracket names.
    std::string serialize() const;
    static Vocab deserialize(const std::string& data);

    void save(const std::string& path) const;
    static Vocab load(const std::string& path);

    /// FNV-1a 64 over the serialized bytes; used to pair checkpoints with vocabs.
    uint64_t hash() const;

    static Vocab byte_fallback_only();

private:
    friend Vocab build_vocab(const std::vector<std::string>&, int);
    std::vector<std::string> entries_;  // entries_[0..3] are symbolic special names
};

struct ByteSpan {
    size_t begin = 0;
    size_t end = 0;  // exclusive
    bool operator==(const ByteSpan&) const = default;
};

/// A tokenized text: ids plus per-token byte spans and 0-based line indices.
/// Concatenating span texts reproduces the input exactly.
struct TokenSequence {
    std::vector<TokenId> ids;
    std::vector<ByteSpan> spans;
    std::vector<int> line_of;

    size_t size() const { return ids.size(); }
    bool empty() const { return ids.empty(); }
};

/// Greedy byte-pair vocabulary over `corpus`, capped at `max_size` entries.
/// Byte fallback makes every input encodable; "\n" stays atomic (never merged).
/// Throws "empty corpus" when corpus is empty, and rejects max_size < 260.
Vocab build_vocab(const std::vector<std::string>& corpus, int max_size);

/// Longest-match encoding over the vocabulary trie. Total: byte fallback
/// guarantees every byte string encodes. decode(encode(s)) == s.
TokenSequence encode(std::string_view text, const Vocab& vocab);

/// Exact byte reconstruction. Throws "invalid token id" on out-of-range or
/// special ids (BRIDGE has no byte form by construction).
std::string decode(const TokenSequence& seq, const Vocab& vocab);
std::string decode_ids(const std::vector<TokenId>& ids, const Vocab& vocab);

}  // namespace lcdr
