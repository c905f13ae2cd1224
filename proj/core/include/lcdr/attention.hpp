#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "lcdr/linalg.hpp"
#include "lcdr/syntax.hpp"

namespace lcdr {

/// Internal sequence layout after bridge insertion. A bridge slot is appended
/// after each complete block of `stride` real tokens; a trailing partial block
/// gets none, so the bridge count is floor(n / stride) and can fall short of
/// the requested m when the stride does not divide n.
struct AttentionLayout {
    int internal_len = 0;
    int n_real = 0;
    int window = 0;
    int stride = 0;                    // ceil(n/m); 0 when no bridges requested
    std::vector<char> is_bridge;       // per internal position
    std::vector<int> real_index;       // internal -> original token index, -1 for bridges
    std::vector<int> internal_of_real; // original token index -> internal position
    std::vector<int> bridge_positions; // S_b, sorted internal positions
    std::vector<int> global_internal;  // G remapped to internal positions, sorted

    int bridge_count() const { return static_cast<int>(bridge_positions.size()); }
};

/// Throws "global position out of range" when a G position is >= n.
AttentionLayout build_layout(int n, int m, int w, const GlobalPositionSet& g);

// The three mask families. Causality (j <= i) is enforced in all of them; the
// window family additionally excludes bridge slots on either side, and the
// bridge family admits a bridge key for every later query plus the stride-long
// lookback of a bridge query.
bool window_allowed(int i, int j, const AttentionLayout& layout);
bool bridge_allowed(int i, int j, const AttentionLayout& layout);
bool global_allowed(int i, int j, const AttentionLayout& layout);

/// Element-wise-max combination of the three families, stored sparsely: per
/// query a contiguous interval [lo, i] plus the (bridge or global) keys that
/// fall below the interval. total_pairs equals the brute-force count of
/// allowed pairs.
struct SparseMask {
    int internal_len = 0;
    std::vector<int> lo;                  // interval start per query
    std::vector<std::vector<int>> extra;  // sorted extra keys < lo per query
    std::vector<char> is_bridge;          // copied from the layout for routing
    int64_t total_pairs = 0;
    int64_t window_pairs = 0;  // per-family counts; overlapping pairs count in each
    int64_t bridge_pairs = 0;
    int64_t global_pairs = 0;

    template <typename Fn>
    void for_each_key(int query, Fn&& fn) const {
        for (int j : extra[static_cast<size_t>(query)]) fn(j);
        for (int j = lo[static_cast<size_t>(query)]; j <= query; ++j) fn(j);
    }
    int64_t keys_of(int query) const {
        return query - lo[static_cast<size_t>(query)] + 1 +
               static_cast<int64_t>(extra[static_cast<size_t>(query)].size());
    }
};

SparseMask combine_mask(const AttentionLayout& layout);

/// Per-position projections, one head of width d_k. The bridge triple is used
/// for a pair's score and value whenever the pair touches a bridge slot.
struct AttentionInput {
    Matrix q, k, v;     // standard projections, internal_len x d_k
    Matrix qb, kb, vb;  // bridge projections, same shape
};

/// Optional observer of post-softmax weights, e.g. for attention statistics.
using PairVisitor = std::function<void(int query, int key, double weight)>;

/// Masked softmax attention evaluated only over allowed pairs; cost is
/// proportional to mask.total_pairs. One softmax per query row covers both
/// projection families. Throws "isolated query" if a row has no keys.
Matrix sparse_attention(const AttentionInput& input, const SparseMask& mask,
                        const PairVisitor* probe = nullptr);

/// Upper bound n(w+1) + m(stride+1) + (n+m)m + (n+m)k on total_pairs, mirroring
/// the O(nw) + O(mn) + O(kn) cost of the three families.
int64_t pair_count_bound(int64_t n, int64_t m, int64_t w, int64_t k);

int64_t full_causal_pairs(int64_t len);

/// Plain-text portable bitmap (P1) of the mask, queries as rows; allowed = 1.
/// Limited to internal_len <= 256.
std::string mask_to_pbm(const SparseMask& mask);

}  // namespace lcdr
