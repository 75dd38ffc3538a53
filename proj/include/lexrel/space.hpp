#pragma once

// PPMI weighting of raw co-occurrence counts plus the per-word statistics
// derived from them: entropy, ranked top-N contexts, pair lookups.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lexrel/corpus.hpp"
#include "lexrel/measures.hpp"
#include "lexrel/tsv.hpp"

namespace lexrel {

// Sparse PPMI matrix; row w holds only the contexts whose PMI is positive.
struct WeightedSpace {
    std::vector<SparseVec> rows;

    const SparseVec& row(std::uint32_t word) const {
        static const SparseVec empty;
        return word < rows.size() ? rows[word] : empty;
    }
};

// weight(w,c) = log2(count(w,c) * total / (row_marginal(w) * col_marginal(c))),
// keeping only strictly positive cells.
inline WeightedSpace ppmi_weight(const RawCounts& raw) {
    if (raw.total == 0) throw std::invalid_argument("ppmi_weight: empty counts");
    WeightedSpace space;
    space.rows.resize(raw.rows.size());
    const double total = static_cast<double>(raw.total);
    for (std::uint32_t w = 0; w < raw.rows.size(); ++w) {
        const double row_marginal = static_cast<double>(raw.row_marginals[w]);
        SparseVec& out = space.rows[w];
        for (const auto& [c, count] : raw.rows[w]) {
            const double col_marginal = static_cast<double>(raw.col_marginals[c]);
            const double ratio = (static_cast<double>(count) * total) / (row_marginal * col_marginal);
            const double weight = std::log2(ratio);
            if (weight > 0.0) out.emplace_back(c, weight);
        }
    }
    return space;
}

// Entropy in bits of the word's raw context-count distribution.
inline double row_entropy(const RawCounts& raw, std::uint32_t word) {
    if (word >= raw.rows.size() || raw.row_marginals[word] == 0) return 0.0;
    const double marginal = static_cast<double>(raw.row_marginals[word]);
    double h = 0.0;
    for (const auto& [c, count] : raw.rows[word]) {
        const double p = static_cast<double>(count) / marginal;
        h -= p * std::log2(p);
    }
    return h < 0.0 ? 0.0 : h;
}

// The n highest-weight contexts of the word's PPMI row, weight descending,
// weight ties by ascending context id. Absent/empty rows give an empty list.
inline TopContexts top_n_contexts(const WeightedSpace& space, std::uint32_t word, int n) {
    if (n < 1) throw std::invalid_argument("top_n_contexts: n must be >= 1");
    TopContexts top;
    top.word = word;
    top.n = n;
    const SparseVec& row = space.row(word);
    top.ranked.assign(row.begin(), row.end());
    const auto better = [](const SparseEntry& a, const SparseEntry& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    };
    const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(n), top.ranked.size());
    std::partial_sort(top.ranked.begin(), top.ranked.begin() + static_cast<std::ptrdiff_t>(keep),
                      top.ranked.end(), better);
    top.ranked.resize(keep);
    return top;
}

// Windowed co-occurrence count of the pair itself; 0 for absent cells.
inline std::uint64_t pair_cooc(const RawCounts& raw, std::uint32_t w1, std::uint32_t w2) {
    return raw.count(w1, w2);
}

// ---- persistence ----

// target_id<TAB>context_id<TAB>weight with 6 decimal digits.
inline std::string space_to_tsv(const WeightedSpace& space) {
    std::ostringstream out;
    for (std::uint32_t target = 0; target < space.rows.size(); ++target) {
        for (const auto& [context, weight] : space.rows[target]) {
            out << target << '\t' << context << '\t' << format_fixed6(weight) << '\n';
        }
    }
    return out.str();
}

inline void save_space(const WeightedSpace& space, const std::string& path) {
    atomic_write(path, space_to_tsv(space));
}

inline WeightedSpace load_space(const std::string& path, std::uint64_t vocab_size) {
    std::ifstream in = open_input(path);
    WeightedSpace space;
    space.rows.resize(vocab_size);
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const std::string context_str = path + ":" + std::to_string(line_number);
        const std::vector<std::string> cols = split_tabs(line);
        if (cols.size() != 3) throw format_error(context_str + ": expected 3 columns, got " + std::to_string(cols.size()));
        const std::uint64_t target = parse_u64(cols[0], context_str);
        const std::uint64_t context = parse_u64(cols[1], context_str);
        const double weight = parse_double(cols[2], context_str);
        if (target >= vocab_size || context >= vocab_size) {
            throw format_error(context_str + ": id outside vocabulary of size " + std::to_string(vocab_size));
        }
        if (weight <= 0.0) continue;  // weights rounded to 0.000000 carry no information
        auto& row = space.rows[static_cast<std::size_t>(target)];
        if (!row.empty() && row.back().first >= context) {
            throw format_error(context_str + ": rows must be sorted by (target, context)");
        }
        row.emplace_back(static_cast<std::uint32_t>(context), weight);
    }
    return space;
}

}  // namespace lexrel
