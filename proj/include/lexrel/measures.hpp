#pragma once

// Pairwise similarity and inclusion measures over sparse context vectors.
// All functions are pure; vectors are (context id, weight) lists sorted by id
// with strictly positive weights.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lexrel {

using SparseEntry = std::pair<std::uint32_t, double>;
using SparseVec = std::vector<SparseEntry>;

// Ranked top-N context list of one word; entry k has 1-based rank k+1.
// Produced by top_n_contexts (space.hpp); consumed by apsyn below.
struct TopContexts {
    std::uint32_t word = 0;
    int n = 0;
    std::vector<SparseEntry> ranked;  // weight non-increasing, ties by id
};

namespace detail {

inline double clamp_unit(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

// Sorted-merge walk over the shared contexts of u and v.
template <typename Fn>
void for_each_shared(const SparseVec& u, const SparseVec& v, Fn&& fn) {
    std::size_t i = 0, j = 0;
    while (i < u.size() && j < v.size()) {
        if (u[i].first < v[j].first) {
            ++i;
        } else if (v[j].first < u[i].first) {
            ++j;
        } else {
            fn(u[i].second, v[j].second);
            ++i;
            ++j;
        }
    }
}

inline double weight_sum(const SparseVec& u) {
    double s = 0.0;
    for (const auto& [id, w] : u) s += w;
    return s;
}

}  // namespace detail

// u.v / (|u||v|); 0 when either vector is empty.
inline double cosine(const SparseVec& u, const SparseVec& v) {
    if (u.empty() || v.empty()) return 0.0;
    double dot = 0.0;
    detail::for_each_shared(u, v, [&](double a, double b) { dot += a * b; });
    double nu = 0.0, nv = 0.0;
    for (const auto& [id, w] : u) nu += w * w;
    for (const auto& [id, w] : v) nv += w * w;
    if (nu == 0.0 || nv == 0.0) return 0.0;
    return detail::clamp_unit(dot / (std::sqrt(nu) * std::sqrt(nv)));
}

// Shared weight mass over total weight mass of both vectors.
inline double lin(const SparseVec& u, const SparseVec& v) {
    const double denom = detail::weight_sum(u) + detail::weight_sum(v);
    if (denom == 0.0) return 0.0;
    double shared = 0.0;
    detail::for_each_shared(u, v, [&](double a, double b) { shared += a + b; });
    return detail::clamp_unit(shared / denom);
}

// Fraction of u's weight mass that falls in contexts shared with v.
inline double weeds_prec(const SparseVec& u, const SparseVec& v) {
    const double denom = detail::weight_sum(u);
    if (denom == 0.0) return 0.0;
    double shared = 0.0;
    detail::for_each_shared(u, v, [&](double a, double) { shared += a; });
    return detail::clamp_unit(shared / denom);
}

// Like weeds_prec but caps each shared context at v's weight.
inline double clarke_de(const SparseVec& u, const SparseVec& v) {
    const double denom = detail::weight_sum(u);
    if (denom == 0.0) return 0.0;
    double shared = 0.0;
    detail::for_each_shared(u, v, [&](double a, double b) { shared += a < b ? a : b; });
    return detail::clamp_unit(shared / denom);
}

// Geometric mean of cosine and WeedsPrec.
inline double cos_weeds(const SparseVec& u, const SparseVec& v) {
    return std::sqrt(cosine(u, v) * weeds_prec(u, v));
}

// High when u is included in v but v is not included in u.
inline double inv_cl(const SparseVec& u, const SparseVec& v) {
    const double forward = clarke_de(u, v);
    const double backward = clarke_de(v, u);
    return std::sqrt(forward * detail::clamp_unit(1.0 - backward));
}

// Weighted overlap of two equal-N top context lists: each shared context
// contributes the reciprocal of its average rank.
inline double apsyn(const TopContexts& t1, const TopContexts& t2) {
    if (t1.n != t2.n) {
        throw std::invalid_argument("apsyn: rank lists built with different N (" +
                                    std::to_string(t1.n) + " vs " + std::to_string(t2.n) + ")");
    }
    // (id, rank) lists sorted by id; shared ids found by merge. Contributions
    // are accumulated in ascending id order, which keeps the sum deterministic.
    auto by_id = [](const TopContexts& t) {
        std::vector<std::pair<std::uint32_t, double>> out;
        out.reserve(t.ranked.size());
        for (std::size_t k = 0; k < t.ranked.size(); ++k) {
            out.emplace_back(t.ranked[k].first, static_cast<double>(k + 1));
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    const auto a = by_id(t1);
    const auto b = by_id(t2);
    double total = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first < b[j].first) {
            ++i;
        } else if (b[j].first < a[i].first) {
            ++j;
        } else {
            total += 1.0 / ((a[i].second + b[j].second) / 2.0);
            ++i;
            ++j;
        }
    }
    return total;
}

// Regularized inverse of APSyn: 1/(1+x) instead of the literal 1/x so empty
// intersections map to 1 rather than infinity. Strictly decreasing in x.
inline double apant(double apsyn_value) {
    if (apsyn_value < 0.0) throw std::invalid_argument("apant: APSyn value must be >= 0");
    return 1.0 / (1.0 + apsyn_value);
}

}  // namespace lexrel
