#include "lcdr/attention.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace lcdr {

AttentionLayout build_layout(int n, int m, int w, const GlobalPositionSet& g) {
    if (n < 1) throw std::runtime_error("layout needs at least one real token");
    if (w < 1) throw std::runtime_error("window size must be positive");
    for (int pos : g.positions) {
        if (pos < 0 || pos >= n) throw std::runtime_error("global position out of range");
    }

    AttentionLayout layout;
    layout.n_real = n;
    layout.window = w;
    layout.stride = m > 0 ? (n + m - 1) / m : 0;

    layout.internal_of_real.resize(static_cast<size_t>(n));
    int internal = 0;
    for (int r = 0; r < n; ++r) {
        layout.real_index.push_back(r);
        layout.is_bridge.push_back(0);
        layout.internal_of_real[static_cast<size_t>(r)] = internal;
        ++internal;
        if (m > 0 && (r + 1) % layout.stride == 0) {
            layout.bridge_positions.push_back(internal);
            layout.real_index.push_back(-1);
            layout.is_bridge.push_back(1);
            ++internal;
        }
    }
    layout.internal_len = internal;
    for (int pos : g.positions) {
        layout.global_internal.push_back(layout.internal_of_real[static_cast<size_t>(pos)]);
    }
    std::sort(layout.global_internal.begin(), layout.global_internal.end());
    return layout;
}

bool window_allowed(int i, int j, const AttentionLayout& layout) {
    if (layout.is_bridge[static_cast<size_t>(i)] || layout.is_bridge[static_cast<size_t>(j)])
        return false;
    return j <= i && i - j <= layout.window;
}

bool bridge_allowed(int i, int j, const AttentionLayout& layout) {
    if (layout.is_bridge[static_cast<size_t>(j)] && i >= j) return true;
    if (layout.is_bridge[static_cast<size_t>(i)] && j <= i && i - j <= layout.stride) return true;
    return false;
}

bool global_allowed(int i, int j, const AttentionLayout& layout) {
    if (i < j) return false;
    return std::binary_search(layout.global_internal.begin(), layout.global_internal.end(), j);
}

SparseMask combine_mask(const AttentionLayout& layout) {
    const int len = layout.internal_len;
    SparseMask mask;
    mask.internal_len = len;
    mask.is_bridge = layout.is_bridge;
    mask.lo.resize(static_cast<size_t>(len));
    mask.extra.resize(static_cast<size_t>(len));

    // merged sorted list of globally visible keys (bridges + memory tokens)
    std::vector<int> global_keys;
    global_keys.reserve(layout.bridge_positions.size() + layout.global_internal.size());
    std::merge(layout.bridge_positions.begin(), layout.bridge_positions.end(),
               layout.global_internal.begin(), layout.global_internal.end(),
               std::back_inserter(global_keys));

    for (int i = 0; i < len; ++i) {
        const bool bridge_query = layout.is_bridge[static_cast<size_t>(i)] != 0;
        const int reach = bridge_query ? layout.stride : layout.window;
        const int lo = std::max(0, i - reach);
        mask.lo[static_cast<size_t>(i)] = lo;
        auto& extra = mask.extra[static_cast<size_t>(i)];
        for (int j : global_keys) {
            if (j >= lo) break;
            extra.push_back(j);
        }
        mask.total_pairs += mask.keys_of(i);
    }

    for (int i = 0; i < len; ++i) {
        for (int b : layout.bridge_positions) {
            if (b <= i) ++mask.bridge_pairs;
        }
        if (layout.is_bridge[static_cast<size_t>(i)]) {
            mask.bridge_pairs += std::min(i, layout.stride) + 1;
            // a bridge key within the stride lookback would be counted twice
            for (int b : layout.bridge_positions) {
                if (b <= i && i - b <= layout.stride) --mask.bridge_pairs;
            }
        } else {
            const int lo = std::max(0, i - layout.window);
            for (int j = lo; j <= i; ++j) {
                if (!layout.is_bridge[static_cast<size_t>(j)]) ++mask.window_pairs;
            }
        }
        for (int gpos : layout.global_internal) {
            if (gpos <= i) ++mask.global_pairs;
        }
    }
    return mask;
}

Matrix sparse_attention(const AttentionInput& input, const SparseMask& mask,
                        const PairVisitor* probe) {
    const int len = mask.internal_len;
    const auto d_k = input.q.cols();
    const double scale = 1.0 / std::sqrt(static_cast<double>(d_k));
    Matrix out = Matrix::Zero(len, d_k);

    std::vector<int> keys;
    std::vector<double> scores;
    for (int i = 0; i < len; ++i) {
        keys.clear();
        scores.clear();
        mask.for_each_key(i, [&](int j) { keys.push_back(j); });
        if (keys.empty()) throw std::runtime_error("isolated query");

        const bool i_bridge = mask.is_bridge[static_cast<size_t>(i)] != 0;
        double max_score = -std::numeric_limits<double>::infinity();
        for (int j : keys) {
            const bool bridge_pair = i_bridge || mask.is_bridge[static_cast<size_t>(j)] != 0;
            const double s = bridge_pair ? input.qb.row(i).dot(input.kb.row(j)) * scale
                                         : input.q.row(i).dot(input.k.row(j)) * scale;
            scores.push_back(s);
            max_score = std::max(max_score, s);
        }
        double denom = 0.0;
        for (double& s : scores) {
            s = std::exp(s - max_score);
            denom += s;
        }
        for (size_t t = 0; t < keys.size(); ++t) {
            const int j = keys[t];
            const double p = scores[t] / denom;
            const bool bridge_pair = i_bridge || mask.is_bridge[static_cast<size_t>(j)] != 0;
            out.row(i) += p * (bridge_pair ? input.vb.row(j) : input.v.row(j));
            if (probe) (*probe)(i, j, p);
        }
    }
    return out;
}

int64_t pair_count_bound(int64_t n, int64_t m, int64_t w, int64_t k) {
    const int64_t stride = m > 0 ? (n + m - 1) / m : 0;
    return n * (w + 1) + m * (stride + 1) + (n + m) * m + (n + m) * k;
}

int64_t full_causal_pairs(int64_t len) { return len * (len + 1) / 2; }

std::string mask_to_pbm(const SparseMask& mask) {
    if (mask.internal_len > 256)
        throw std::runtime_error("mask too large for bitmap dump (internal_len > 256)");
    std::string out = "P1\n" + std::to_string(mask.internal_len) + " " +
                      std::to_string(mask.internal_len) + "\n";
    for (int i = 0; i < mask.internal_len; ++i) {
        std::string row(static_cast<size_t>(mask.internal_len), '0');
        mask.for_each_key(i, [&](int j) { row[static_cast<size_t>(j)] = '1'; });
        for (int j = 0; j < mask.internal_len; ++j) {
            out += row[static_cast<size_t>(j)];
            out += j + 1 == mask.internal_len ? '\n' : ' ';
        }
    }
    return out;
}

}  // namespace lcdr
