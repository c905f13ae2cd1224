#include "lcdr/tokenizer.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace lcdr {

namespace {

const std::array<std::string, kNumSpecialTokens> kSpecialNames = {
    "<pad>", "<bos>", "<eos>", "<bridge>"};

std::string escape_token(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    for (size_t i = 0; i < raw.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(raw[i]);
        if (c == '\\') {
            out += "\\\\";
        } else if (c == '\n') {
            out += "\\n";
        } else if (c == '\r') {
            out += "\\r";
        } else if (c < 0x20 || c >= 0x7f || (i == 0 && c == '<')) {
            // leading '<' is escaped so literal special names stay unambiguous
            char buf[5];
            std::snprintf(buf, sizeof(buf), "\\x%02X", c);
            out += buf;
        } else {
            out += static_cast<char>(c);
        }
    }
    return out;
}

std::string unescape_token(const std::string& line) {
    std::string out;
    out.reserve(line.size());
    for (size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (c != '\\') {
            out += c;
            continue;
        }
        if (i + 1 >= line.size()) throw std::runtime_error("vocab file: dangling escape");
        char e = line[++i];
        switch (e) {
            case '\\': out += '\\'; break;
            case 'n': out += '\n'; break;
            case 'r': out += '\r'; break;
            case 'x': {
                if (i + 2 >= line.size()) throw std::runtime_error("vocab file: bad \\x escape");
                int v = std::stoi(line.substr(i + 1, 2), nullptr, 16);
                out += static_cast<char>(v);
                i += 2;
                break;
            }
            default: throw std::runtime_error("vocab file: unknown escape");
        }
    }
    return out;
}

// Pair-count bookkeeping for the greedy merge loop. Selection is by highest
// count, ties broken by smaller left id then smaller right id, so the result
// does not depend on hash iteration order.
struct PairKey {
    TokenId left, right;
    bool operator==(const PairKey&) const = default;
};
struct PairKeyHash {
    size_t operator()(const PairKey& p) const {
        return std::hash<uint64_t>()((static_cast<uint64_t>(p.left) << 32) ^
                                     static_cast<uint32_t>(p.right));
    }
};

}  // namespace

const std::string& Vocab::token_bytes(TokenId id) const {
    if (id < 0 || id >= size()) throw std::runtime_error("invalid token id");
    if (is_special(id)) throw std::runtime_error("invalid token id");
    return entries_[static_cast<size_t>(id)];
}

Vocab Vocab::byte_fallback_only() {
    Vocab v;
    v.entries_.reserve(kMinVocabSize);
    for (const auto& name : kSpecialNames) v.entries_.push_back(name);
    for (int b = 0; b < 256; ++b) v.entries_.push_back(std::string(1, static_cast<char>(b)));
    return v;
}

std::string Vocab::serialize() const {
    std::string out = "vocab-v1 " + std::to_string(size()) + "\n";
    for (int id = 0; id < size(); ++id) {
        if (is_special(id)) {
            out += entries_[static_cast<size_t>(id)];
        } else {
            out += escape_token(entries_[static_cast<size_t>(id)]);
        }
        out += '\n';
    }
    return out;
}

Vocab Vocab::deserialize(const std::string& data) {
    std::istringstream in(data);
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("vocab file: empty");
    std::istringstream hs(header);
    std::string magic;
    int count = 0;
    hs >> magic >> count;
    if (magic != "vocab-v1") throw std::runtime_error("vocab file: bad header");
    if (count < kMinVocabSize) throw std::runtime_error("vocab file: size below byte fallback");

    Vocab v;
    v.entries_.reserve(static_cast<size_t>(count));
    std::string line;
    for (int id = 0; id < count; ++id) {
        if (!std::getline(in, line)) throw std::runtime_error("vocab file: truncated");
        if (id < kNumSpecialTokens) {
            if (line != kSpecialNames[static_cast<size_t>(id)])
                throw std::runtime_error("vocab file: bad special entry");
            v.entries_.push_back(line);
        } else {
            v.entries_.push_back(unescape_token(line));
        }
    }
    return v;
}

void Vocab::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open vocab file for writing: " + path);
    out << serialize();
}

Vocab Vocab::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open vocab file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize(ss.str());
}

uint64_t Vocab::hash() const {
    const std::string bytes = serialize();
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

Vocab build_vocab(const std::vector<std::string>& corpus, int max_size) {
    if (corpus.empty()) throw std::runtime_error("empty corpus");
    if (max_size < kMinVocabSize)
        throw std::runtime_error("max_size below byte fallback minimum (260)");

    Vocab vocab = Vocab::byte_fallback_only();
    const TokenId lf = vocab.lf_id();

    // Working streams: one id sequence per corpus text.
    std::vector<std::vector<TokenId>> streams;
    streams.reserve(corpus.size());
    for (const auto& text : corpus) {
        std::vector<TokenId> s;
        s.reserve(text.size());
        for (unsigned char c : text) s.push_back(kByteFallbackBase + c);
        streams.push_back(std::move(s));
    }

    while (vocab.size() < max_size) {
        std::unordered_map<PairKey, int64_t, PairKeyHash> counts;
        for (const auto& s : streams) {
            for (size_t i = 0; i + 1 < s.size(); ++i) {
                if (s[i] == lf || s[i + 1] == lf) continue;  // LF stays atomic
                ++counts[PairKey{s[i], s[i + 1]}];
            }
        }
        PairKey best{0, 0};
        int64_t best_count = 0;
        for (const auto& [key, count] : counts) {
            if (count > best_count ||
                (count == best_count &&
                 (key.left < best.left || (key.left == best.left && key.right < best.right)))) {
                best = key;
                best_count = count;
            }
        }
        if (best_count < 2) break;  // nothing worth merging

        const TokenId merged = vocab.size();
        vocab.entries_.push_back(vocab.entries_[static_cast<size_t>(best.left)] +
                                 vocab.entries_[static_cast<size_t>(best.right)]);

        for (auto& s : streams) {
            size_t w = 0;
            for (size_t r = 0; r < s.size();) {
                if (r + 1 < s.size() && s[r] == best.left && s[r + 1] == best.right) {
                    s[w++] = merged;
                    r += 2;
                } else {
                    s[w++] = s[r++];
                }
            }
            s.resize(w);
        }
    }
    return vocab;
}

namespace {

// Flat trie over token bytes for longest-match encoding.
struct Trie {
    struct Node {
        std::array<int32_t, 256> next;
        TokenId id = -1;
        Node() { next.fill(-1); }
    };
    std::vector<Node> nodes;

    explicit Trie(const Vocab& vocab) {
        nodes.emplace_back();
        for (TokenId id = kByteFallbackBase; id < vocab.size(); ++id) {
            const std::string& bytes = vocab.token_bytes(id);
            int32_t at = 0;
            for (unsigned char c : bytes) {
                if (nodes[static_cast<size_t>(at)].next[c] < 0) {
                    nodes[static_cast<size_t>(at)].next[c] = static_cast<int32_t>(nodes.size());
                    nodes.emplace_back();
                }
                at = nodes[static_cast<size_t>(at)].next[c];
            }
            nodes[static_cast<size_t>(at)].id = id;
        }
    }
};

}  // namespace

TokenSequence encode(std::string_view text, const Vocab& vocab) {
    const Trie trie(vocab);
    TokenSequence seq;
    seq.ids.reserve(text.size() / 2 + 1);
    int line = 0;
    size_t pos = 0;
    const TokenId lf = vocab.lf_id();
    while (pos < text.size()) {
        int32_t at = 0;
        TokenId match = -1;
        size_t match_len = 0;
        for (size_t k = pos; k < text.size(); ++k) {
            at = trie.nodes[static_cast<size_t>(at)].next[static_cast<unsigned char>(text[k])];
            if (at < 0) break;
            if (trie.nodes[static_cast<size_t>(at)].id >= 0) {
                match = trie.nodes[static_cast<size_t>(at)].id;
                match_len = k - pos + 1;
            }
        }
        // byte fallback entries make a 1-byte match always available
        seq.ids.push_back(match);
        seq.spans.push_back({pos, pos + match_len});
        seq.line_of.push_back(line);
        if (match == lf) ++line;
        pos += match_len;
    }
    return seq;
}

std::string decode(const TokenSequence& seq, const Vocab& vocab) {
    return decode_ids(seq.ids, vocab);
}

std::string decode_ids(const std::vector<TokenId>& ids, const Vocab& vocab) {
    std::string out;
    for (TokenId id : ids) out += vocab.token_bytes(id);
    return out;
}

}  // namespace lcdr
