#pragma once

// Assembles the 18-dimensional feature vector for a word pair from the
// vocabulary, the raw counts, and the PPMI space.

#include <array>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lexrel/corpus.hpp"
#include "lexrel/measures.hpp"
#include "lexrel/space.hpp"
#include "lexrel/tsv.hpp"

namespace lexrel {

inline constexpr std::size_t kFeatureCount = 18;

// Canonical feature order. Everything downstream (feature files, forest
// importances) uses these indices; do not reorder.
enum FeatureIndex : std::size_t {
    kFreq1 = 0,
    kFreq2,
    kDiffFreq,
    kCooc,
    kEntr1,
    kEntr2,
    kDiffEntr,
    kCos,
    kLin,
    kWeedsPrec,
    kCosWeeds,
    kClarkeDe,
    kInvCl,
    kApsynSmall,
    kApsynLarge,
    kApantSmall,
    kApantLarge,
    kSamePos,
};

using FeatureNames = std::array<std::string, kFeatureCount>;

// Names for a given pair of top-N sizes; the default (100, 1000) yields the
// canonical names apsyn_100, apsyn_1000, apant_100, apant_1000.
inline FeatureNames feature_names_for(int n_small, int n_large) {
    return FeatureNames{
        "freq1",      "freq2",
        "diff_freq",  "cooc",
        "entr1",      "entr2",
        "diff_entr",  "cos",
        "lin",        "weeds_prec",
        "cos_weeds",  "clarke_de",
        "inv_cl",     "apsyn_" + std::to_string(n_small),
        "apsyn_" + std::to_string(n_large),
        "apant_" + std::to_string(n_small),
        "apant_" + std::to_string(n_large),
        "same_pos",
    };
}

inline const FeatureNames& canonical_feature_names() {
    static const FeatureNames names = feature_names_for(100, 1000);
    return names;
}

struct WordPair {
    std::string w1;
    std::string w2;
    std::string label = "?";  // relation tag, or "?" when unlabeled
};

struct PairFeatures {
    std::array<double, kFeatureCount> values{};
    bool oov1 = false;
    bool oov2 = false;
};

struct FeatureOptions {
    int top_n_small = 100;
    int top_n_large = 1000;
    // Counts used for the cooc feature; defaults to the windowed counts the
    // space was built from. Points at a sentence-scope matrix when the build
    // ran with --cooc-scope sentence.
    const RawCounts* cooc_counts = nullptr;
};

// Out-of-vocabulary words yield zeroed frequencies, entropies and pairwise
// measures (hence apant = 1), same_pos = 0, and a raised oov flag; the
// function is total over any pair.
inline PairFeatures extract_features(const WordPair& pair, const Vocabulary& vocab,
                                     const RawCounts& raw, const WeightedSpace& space,
                                     const FeatureOptions& opts = {}) {
    PairFeatures out;
    const std::uint32_t id1 = vocab.id_of(pair.w1);
    const std::uint32_t id2 = vocab.id_of(pair.w2);
    out.oov1 = id1 == Vocabulary::kNoId;
    out.oov2 = id2 == Vocabulary::kNoId;
    auto& f = out.values;

    const double freq1 = out.oov1 ? 0.0 : static_cast<double>(vocab.entry(id1).total_count);
    const double freq2 = out.oov2 ? 0.0 : static_cast<double>(vocab.entry(id2).total_count);
    f[kFreq1] = freq1;
    f[kFreq2] = freq2;
    f[kDiffFreq] = freq1 - freq2;

    const RawCounts& cooc_source = opts.cooc_counts ? *opts.cooc_counts : raw;
    f[kCooc] = (out.oov1 || out.oov2)
                   ? 0.0
                   : static_cast<double>(pair_cooc(cooc_source, id1, id2));

    const double entr1 = out.oov1 ? 0.0 : row_entropy(raw, id1);
    const double entr2 = out.oov2 ? 0.0 : row_entropy(raw, id2);
    f[kEntr1] = entr1;
    f[kEntr2] = entr2;
    f[kDiffEntr] = entr1 - entr2;

    static const SparseVec empty_row;
    const SparseVec& u = out.oov1 ? empty_row : space.row(id1);
    const SparseVec& v = out.oov2 ? empty_row : space.row(id2);
    f[kCos] = cosine(u, v);
    f[kLin] = lin(u, v);
    f[kWeedsPrec] = weeds_prec(u, v);
    f[kCosWeeds] = cos_weeds(u, v);
    f[kClarkeDe] = clarke_de(u, v);
    f[kInvCl] = inv_cl(u, v);

    const auto apsyn_at = [&](int n) {
        TopContexts t1, t2;
        t1.n = t2.n = n;
        if (!out.oov1) t1 = top_n_contexts(space, id1, n);
        if (!out.oov2) t2 = top_n_contexts(space, id2, n);
        t1.n = t2.n = n;
        return apsyn(t1, t2);
    };
    f[kApsynSmall] = apsyn_at(opts.top_n_small);
    f[kApsynLarge] = apsyn_at(opts.top_n_large);
    f[kApantSmall] = apant(f[kApsynSmall]);
    f[kApantLarge] = apant(f[kApsynLarge]);

    if (out.oov1 || out.oov2) {
        f[kSamePos] = 0.0;
    } else {
        f[kSamePos] = vocab.entry(id1).top_pos() == vocab.entry(id2).top_pos() ? 1.0 : 0.0;
    }
    return out;
}

// A feature file in memory: per-file feature names (the apsyn/apant columns
// carry their N) plus one labeled row per pair.
struct FeatureDataset {
    FeatureNames names = canonical_feature_names();
    std::vector<WordPair> pairs;
    std::vector<PairFeatures> features;

    std::size_t size() const { return pairs.size(); }
};

namespace detail {

inline const std::array<std::string, 7>& known_tags() {
    static const std::array<std::string, 7> tags = {"TRUE",    "FALSE",  "SYN", "ANT",
                                                    "HYPER",   "PART_OF", "RANDOM"};
    return tags;
}

inline bool is_known_tag(const std::string& tag) {
    for (const auto& t : known_tags()) {
        if (t == tag) return true;
    }
    return false;
}

// Labels must come from one task's tag set ("?" is always allowed).
inline void check_tag_consistency(const std::vector<WordPair>& pairs) {
    bool task1 = false, task2 = false;
    for (const WordPair& p : pairs) {
        if (p.label == "?") continue;
        if (p.label == "TRUE" || p.label == "FALSE") task1 = true;
        else task2 = true;
        if (!is_known_tag(p.label)) {
            throw format_error("unknown relation tag '" + p.label + "'");
        }
    }
    if (task1 && task2) {
        throw format_error("feature rows mix task-1 tags (TRUE/FALSE) with task-2 tags");
    }
}

}  // namespace detail

inline std::string features_to_tsv(const FeatureDataset& dataset) {
    detail::check_tag_consistency(dataset.pairs);
    std::ostringstream out;
    out << "w1\tw2\tlabel";
    for (const std::string& name : dataset.names) out << '\t' << name;
    out << "\toov1\toov2\n";
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const WordPair& pair = dataset.pairs[i];
        const PairFeatures& f = dataset.features[i];
        out << pair.w1 << '\t' << pair.w2 << '\t' << pair.label;
        for (const double value : f.values) out << '\t' << format_fixed6(value);
        out << '\t' << (f.oov1 ? 1 : 0) << '\t' << (f.oov2 ? 1 : 0) << '\n';
    }
    return out.str();
}

inline void write_features(const FeatureDataset& dataset, const std::string& path) {
    atomic_write(path, features_to_tsv(dataset));
}

inline FeatureDataset read_features(const std::string& path) {
    std::ifstream in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw format_error(path + ": missing header line");
    const std::vector<std::string> header = split_tabs(line);
    const std::size_t expected_cols = 3 + kFeatureCount + 2;
    if (header.size() != expected_cols) {
        throw format_error(path + ":1: expected " + std::to_string(expected_cols) +
                           " header columns, got " + std::to_string(header.size()));
    }
    if (header[0] != "w1" || header[1] != "w2" || header[2] != "label" ||
        header[expected_cols - 2] != "oov1" || header[expected_cols - 1] != "oov2") {
        throw format_error(path + ":1: unrecognized header layout");
    }
    FeatureDataset dataset;
    const FeatureNames& canonical = canonical_feature_names();
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
        const std::string& name = header[3 + k];
        const bool variable_n = k >= kApsynSmall && k <= kApantLarge;
        const std::string prefix = k == kApsynSmall || k == kApsynLarge ? "apsyn_" : "apant_";
        if (variable_n ? name.rfind(prefix, 0) != 0 : name != canonical[k]) {
            throw format_error(path + ":1: unexpected feature column '" + name + "' at position " +
                               std::to_string(k));
        }
        dataset.names[k] = name;
    }
    std::size_t line_number = 1;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const std::string context = path + ":" + std::to_string(line_number);
        const std::vector<std::string> cols = split_tabs(line);
        if (cols.size() != expected_cols) {
            throw format_error(context + ": expected " + std::to_string(expected_cols) +
                               " columns, got " + std::to_string(cols.size()));
        }
        WordPair pair{cols[0], cols[1], cols[2]};
        if (pair.label != "?" && !detail::is_known_tag(pair.label)) {
            throw format_error(context + ": unknown relation tag '" + pair.label + "'");
        }
        PairFeatures f;
        for (std::size_t k = 0; k < kFeatureCount; ++k) {
            f.values[k] = parse_double(cols[3 + k], context);
        }
        f.oov1 = parse_u64(cols[expected_cols - 2], context) != 0;
        f.oov2 = parse_u64(cols[expected_cols - 1], context) != 0;
        dataset.pairs.push_back(std::move(pair));
        dataset.features.push_back(f);
    }
    detail::check_tag_consistency(dataset.pairs);
    return dataset;
}

}  // namespace lexrel
