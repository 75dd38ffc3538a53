#pragma once

// From-scratch Random Forest: bootstrap sampling, depth-limited CART trees
// with Gini/entropy splitting, random feature subsets per split, majority
// voting, and mean-decrease-impurity feature importances. All randomness
// comes from per-tree SplitMix64 streams seeded with (seed XOR tree index),
// so a (dataset, params) pair fully determines the serialized model.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "lexrel/errors.hpp"
#include "lexrel/features.hpp"
#include "lexrel/rng.hpp"
#include "lexrel/tsv.hpp"

namespace lexrel {

enum class Criterion { gini, entropy };

inline std::string criterion_name(Criterion c) {
    return c == Criterion::gini ? "gini" : "entropy";
}

inline Criterion criterion_from_name(const std::string& name) {
    if (name == "gini") return Criterion::gini;
    if (name == "entropy") return Criterion::entropy;
    throw format_error("unknown split criterion '" + name + "'");
}

struct ForestParams {
    int n_estimators = 100;
    int max_depth = 10;
    Criterion criterion = Criterion::gini;
    int max_features = 9;
    int min_split = 2;
    std::uint64_t seed = 0;
    std::string class_weight = "none";  // "none" or "balanced"

    void validate(std::size_t n_features) const {
        if (n_estimators < 1) throw std::invalid_argument("n_estimators must be >= 1");
        if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
        if (min_split < 2) throw std::invalid_argument("min_split must be >= 2");
        if (max_features < 1 || static_cast<std::size_t>(max_features) > n_features) {
            throw std::invalid_argument("max_features must be in [1, " +
                                        std::to_string(n_features) + "]");
        }
        if (class_weight != "none" && class_weight != "balanced") {
            throw std::invalid_argument("class_weight must be 'none' or 'balanced'");
        }
    }
};

// Labeled feature rows ready for training: labels are indices into the
// lexicographically sorted class list.
struct TrainingSet {
    FeatureNames feature_names = canonical_feature_names();
    std::vector<std::array<double, kFeatureCount>> rows;
    std::vector<int> labels;
    std::vector<std::string> classes;
};

inline TrainingSet make_training_set(const FeatureDataset& dataset) {
    TrainingSet set;
    set.feature_names = dataset.names;
    set.classes.clear();
    for (const WordPair& p : dataset.pairs) {
        if (p.label == "?") throw format_error("cannot train on unlabeled ('?') rows");
        if (std::find(set.classes.begin(), set.classes.end(), p.label) == set.classes.end()) {
            set.classes.push_back(p.label);
        }
    }
    std::sort(set.classes.begin(), set.classes.end());
    set.rows.reserve(dataset.size());
    set.labels.reserve(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        set.rows.push_back(dataset.features[i].values);
        const auto it = std::find(set.classes.begin(), set.classes.end(), dataset.pairs[i].label);
        set.labels.push_back(static_cast<int>(it - set.classes.begin()));
    }
    return set;
}

// Gini = 1 - sum p_k^2; entropy = -sum p_k log2 p_k. Counts may be weighted.
inline double impurity(const std::vector<double>& class_counts, Criterion criterion) {
    double total = 0.0;
    for (const double c : class_counts) total += c;
    if (total <= 0.0) throw std::invalid_argument("impurity: node has zero total count");
    if (criterion == Criterion::gini) {
        double sum_sq = 0.0;
        for (const double c : class_counts) {
            const double p = c / total;
            sum_sq += p * p;
        }
        return 1.0 - sum_sq;
    }
    double h = 0.0;
    for (const double c : class_counts) {
        if (c <= 0.0) continue;
        const double p = c / total;
        h -= p * std::log2(p);
    }
    return h < 0.0 ? 0.0 : h;
}

struct SplitCandidate {
    int feature = -1;
    double threshold = 0.0;
    double gain = 0.0;
};

// Exhaustive scan over the candidate thresholds of each subset feature:
// midpoints between consecutive distinct sorted sample values. Returns the
// split with the largest impurity decrease, ties resolved toward the lower
// feature index and then the lower threshold; nullopt when no split improves.
inline std::optional<SplitCandidate> best_split(
    const TrainingSet& data, const std::vector<std::uint32_t>& sample_indices,
    const std::vector<int>& feature_subset, Criterion criterion,
    const std::vector<double>& class_weights = {}) {
    const std::size_t n = sample_indices.size();
    const std::size_t n_classes = data.classes.size();
    if (n < 2 || feature_subset.empty()) return std::nullopt;

    const auto weight_of = [&](std::uint32_t idx) {
        return class_weights.empty() ? 1.0
                                     : class_weights[static_cast<std::size_t>(data.labels[idx])];
    };

    std::vector<double> parent_counts(n_classes, 0.0);
    for (const std::uint32_t idx : sample_indices) {
        parent_counts[static_cast<std::size_t>(data.labels[idx])] += weight_of(idx);
    }
    double parent_weight = 0.0;
    for (const double c : parent_counts) parent_weight += c;
    const double parent_impurity = impurity(parent_counts, criterion);

    std::vector<int> features = feature_subset;
    std::sort(features.begin(), features.end());

    std::optional<SplitCandidate> best;
    std::vector<std::uint32_t> order(sample_indices);
    std::vector<double> left_counts(n_classes);
    for (const int f : features) {
        const auto value = [&](std::uint32_t idx) {
            return data.rows[idx][static_cast<std::size_t>(f)];
        };
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            if (value(a) != value(b)) return value(a) < value(b);
            return a < b;
        });
        std::fill(left_counts.begin(), left_counts.end(), 0.0);
        double left_weight = 0.0;
        for (std::size_t pos = 0; pos + 1 < n; ++pos) {
            const std::uint32_t idx = order[pos];
            left_counts[static_cast<std::size_t>(data.labels[idx])] += weight_of(idx);
            left_weight += weight_of(idx);
            const double here = value(idx);
            const double next = value(order[pos + 1]);
            if (here == next) continue;
            double threshold = (here + next) / 2.0;
            // Adjacent representable values can round the midpoint onto the
            // upper value; pin it back so `x <= threshold` reproduces the
            // partition the gain was computed for.
            if (!(threshold >= here && threshold < next)) threshold = here;
            std::vector<double> right_counts(n_classes);
            for (std::size_t k = 0; k < n_classes; ++k) {
                right_counts[k] = parent_counts[k] - left_counts[k];
            }
            const double right_weight = parent_weight - left_weight;
            const double gain = parent_impurity -
                                (left_weight / parent_weight) * impurity(left_counts, criterion) -
                                (right_weight / parent_weight) * impurity(right_counts, criterion);
            if (!best || gain > best->gain) {
                best = SplitCandidate{f, threshold, gain};
            }
        }
    }
    if (!best || !(best->gain > 0.0)) return std::nullopt;
    return best;
}

// One node of a decision tree; stored in a preorder arena, children by index.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    double node_impurity = 0.0;
    double gain = 0.0;
    std::vector<double> class_counts;  // weighted
    std::uint64_t n_samples = 0;
    int label = -1;  // argmax of class_counts, ties to the smaller index

    bool is_leaf() const { return feature < 0; }
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    int depth() const { return node_depth(0); }

 private:
    int node_depth(int idx) const {
        const TreeNode& node = nodes[static_cast<std::size_t>(idx)];
        if (node.is_leaf()) return 0;
        return 1 + std::max(node_depth(node.left), node_depth(node.right));
    }
};

namespace detail {

class TreeGrower {
 public:
    TreeGrower(const TrainingSet& data, const ForestParams& params,
               const std::vector<double>& class_weights, SplitMix64& rng)
        : data_(data), params_(params), class_weights_(class_weights), rng_(rng) {}

    Tree grow(std::vector<std::uint32_t> indices) {
        Tree tree;
        build(tree, std::move(indices), 0);
        return tree;
    }

 private:
    double weight_of(std::uint32_t idx) const {
        return class_weights_.empty()
                   ? 1.0
                   : class_weights_[static_cast<std::size_t>(data_.labels[idx])];
    }

    int build(Tree& tree, std::vector<std::uint32_t> indices, int depth) {
        const int node_index = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        const std::size_t n_classes = data_.classes.size();

        std::vector<double> counts(n_classes, 0.0);
        for (const std::uint32_t idx : indices) {
            counts[static_cast<std::size_t>(data_.labels[idx])] += weight_of(idx);
        }
        int label = 0;
        for (std::size_t k = 1; k < n_classes; ++k) {
            if (counts[k] > counts[static_cast<std::size_t>(label)]) label = static_cast<int>(k);
        }
        const double node_impurity = impurity(counts, params_.criterion);
        {
            TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
            node.class_counts = counts;
            node.n_samples = indices.size();
            node.node_impurity = node_impurity;
            node.label = label;
        }

        const bool stop = depth >= params_.max_depth || node_impurity == 0.0 ||
                          indices.size() < static_cast<std::size_t>(params_.min_split);
        if (stop) return node_index;

        std::vector<int> subset = sample_without_replacement(
            rng_, static_cast<int>(kFeatureCount), params_.max_features);
        const std::optional<SplitCandidate> split =
            best_split(data_, indices, subset, params_.criterion, class_weights_);
        if (!split) return node_index;

        std::vector<std::uint32_t> left_indices, right_indices;
        for (const std::uint32_t idx : indices) {
            const double v = data_.rows[idx][static_cast<std::size_t>(split->feature)];
            (v <= split->threshold ? left_indices : right_indices).push_back(idx);
        }
        indices.clear();
        indices.shrink_to_fit();

        {
            TreeNode& node = tree.nodes[static_cast<std::size_t>(node_index)];
            node.feature = split->feature;
            node.threshold = split->threshold;
            node.gain = split->gain;
        }
        const int left = build(tree, std::move(left_indices), depth + 1);
        tree.nodes[static_cast<std::size_t>(node_index)].left = left;
        const int right = build(tree, std::move(right_indices), depth + 1);
        tree.nodes[static_cast<std::size_t>(node_index)].right = right;
        return node_index;
    }

    const TrainingSet& data_;
    const ForestParams& params_;
    const std::vector<double>& class_weights_;
    SplitMix64& rng_;
};

}  // namespace detail

// Grows one tree on the given sample indices, drawing max_features feature
// indices without replacement from the stream at every candidate split.
inline Tree grow_tree(const TrainingSet& data, std::vector<std::uint32_t> indices,
                      const ForestParams& params, SplitMix64& rng,
                      const std::vector<double>& class_weights = {}) {
    if (indices.empty()) throw std::invalid_argument("grow_tree: no samples");
    detail::TreeGrower grower(data, params, class_weights, rng);
    return grower.grow(std::move(indices));
}

struct Forest {
    ForestParams params;
    std::vector<std::string> classes;  // sorted lexicographically
    FeatureNames feature_names = canonical_feature_names();
    std::vector<Tree> trees;
};

inline std::vector<double> class_weights_for(const ForestParams& params,
                                             const TrainingSet& data) {
    if (params.class_weight == "none") return {};
    std::vector<double> class_totals(data.classes.size(), 0.0);
    for (const int label : data.labels) class_totals[static_cast<std::size_t>(label)] += 1.0;
    std::vector<double> weights(data.classes.size(), 0.0);
    const double n = static_cast<double>(data.labels.size());
    const double k = static_cast<double>(data.classes.size());
    for (std::size_t c = 0; c < weights.size(); ++c) {
        weights[c] = class_totals[c] > 0.0 ? n / (k * class_totals[c]) : 0.0;
    }
    return weights;
}

// Tree t draws its bootstrap sample and all of its feature subsets from a
// SplitMix64 stream seeded with (seed XOR t); the bootstrap's n draws come
// first, then subsets are consumed in depth-first node order.
inline Forest train_forest(const TrainingSet& data, const ForestParams& params) {
    params.validate(kFeatureCount);
    if (data.rows.empty()) throw format_error("training set is empty");
    if (data.rows.size() != data.labels.size()) {
        throw std::invalid_argument("rows/labels size mismatch");
    }
    std::vector<bool> seen(data.classes.size(), false);
    for (const int label : data.labels) seen[static_cast<std::size_t>(label)] = true;
    if (std::count(seen.begin(), seen.end(), true) < 2) {
        throw format_error("training requires at least 2 distinct labels");
    }
    if (!std::is_sorted(data.classes.begin(), data.classes.end())) {
        throw std::invalid_argument("classes must be sorted lexicographically");
    }

    Forest forest;
    forest.params = params;
    forest.classes = data.classes;
    forest.feature_names = data.feature_names;
    forest.trees.reserve(static_cast<std::size_t>(params.n_estimators));
    const std::vector<double> weights = class_weights_for(params, data);
    const std::size_t n = data.rows.size();
    for (int t = 0; t < params.n_estimators; ++t) {
        SplitMix64 rng(params.seed ^ static_cast<std::uint64_t>(t));
        std::vector<std::uint32_t> bootstrap(n);
        for (std::size_t i = 0; i < n; ++i) {
            bootstrap[i] = static_cast<std::uint32_t>(rng.below(n));
        }
        forest.trees.push_back(grow_tree(data, std::move(bootstrap), params, rng, weights));
    }
    return forest;
}

struct Prediction {
    std::string label;
    int label_index = -1;
    std::vector<double> votes;  // fraction of trees per class, classes order
};

inline int tree_predict_index(const Tree& tree, const std::array<double, kFeatureCount>& values) {
    int idx = 0;
    while (!tree.nodes[static_cast<std::size_t>(idx)].is_leaf()) {
        const TreeNode& node = tree.nodes[static_cast<std::size_t>(idx)];
        idx = values[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                               : node.right;
    }
    return tree.nodes[static_cast<std::size_t>(idx)].label;
}

// Plurality vote over tree leaves; vote ties go to the lexicographically
// smallest label (classes are sorted, so the smallest index wins).
inline Prediction predict(const Forest& forest, const std::array<double, kFeatureCount>& values) {
    std::vector<double> votes(forest.classes.size(), 0.0);
    for (const Tree& tree : forest.trees) {
        votes[static_cast<std::size_t>(tree_predict_index(tree, values))] += 1.0;
    }
    int best = 0;
    for (std::size_t k = 1; k < votes.size(); ++k) {
        if (votes[k] > votes[static_cast<std::size_t>(best)]) best = static_cast<int>(k);
    }
    Prediction out;
    out.label_index = best;
    out.label = forest.classes[static_cast<std::size_t>(best)];
    out.votes = std::move(votes);
    const double n_trees = static_cast<double>(forest.trees.size());
    for (double& v : out.votes) v /= n_trees;
    return out;
}

inline Prediction predict(const Forest& forest, const std::vector<double>& values) {
    if (values.size() != kFeatureCount) {
        throw std::invalid_argument("predict: feature vector must have length " +
                                    std::to_string(kFeatureCount));
    }
    std::array<double, kFeatureCount> arr{};
    std::copy(values.begin(), values.end(), arr.begin());
    return predict(forest, arr);
}

// Mean decrease in impurity. Each split contributes
// (node weight / root weight) * gain to its feature; per-tree vectors are
// normalized to sum 1, averaged over trees, and re-normalized.
inline std::vector<std::pair<std::string, double>> feature_importances(const Forest& forest) {
    std::vector<double> accumulated(kFeatureCount, 0.0);
    for (const Tree& tree : forest.trees) {
        std::vector<double> per_tree(kFeatureCount, 0.0);
        double root_weight = 0.0;
        for (const double c : tree.nodes[0].class_counts) root_weight += c;
        for (const TreeNode& node : tree.nodes) {
            if (node.is_leaf()) continue;
            double node_weight = 0.0;
            for (const double c : node.class_counts) node_weight += c;
            per_tree[static_cast<std::size_t>(node.feature)] +=
                (node_weight / root_weight) * node.gain;
        }
        double tree_total = 0.0;
        for (const double v : per_tree) tree_total += v;
        if (tree_total > 0.0) {
            for (std::size_t k = 0; k < kFeatureCount; ++k) {
                accumulated[k] += per_tree[k] / tree_total;
            }
        }
    }
    double total = 0.0;
    for (const double v : accumulated) total += v;
    std::vector<std::pair<std::string, double>> out;
    out.reserve(kFeatureCount);
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
        out.emplace_back(forest.feature_names[k], total > 0.0 ? accumulated[k] / total : 0.0);
    }
    return out;
}

// ---- model JSON ----
//
// Written by hand rather than through a JSON library so that every real is
// emitted with 17 significant digits and the byte layout is fixed; parsing
// goes through nlohmann::json.

namespace detail {

inline void json_escape_to(std::ostringstream& out, const std::string& s) {
    out << '"';
    for (const char c : s) {
        switch (c) {
            case '"': out << "\\\""; break;
            case '\\': out << "\\\\"; break;
            case '\n': out << "\\n"; break;
            case '\t': out << "\\t"; break;
            case '\r': out << "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out << buf;
                } else {
                    out << c;
                }
        }
    }
    out << '"';
}

inline void node_to_json(std::ostringstream& out, const Forest& forest, const Tree& tree,
                         int idx) {
    const TreeNode& node = tree.nodes[static_cast<std::size_t>(idx)];
    out << '{';
    if (!node.is_leaf()) {
        out << "\"feature\":" << node.feature << ",\"threshold\":" << format_sig17(node.threshold)
            << ",\"gain\":" << format_sig17(node.gain) << ',';
    } else {
        out << "\"label\":";
        json_escape_to(out, forest.classes[static_cast<std::size_t>(node.label)]);
        out << ',';
    }
    out << "\"impurity\":" << format_sig17(node.node_impurity)
        << ",\"n_samples\":" << node.n_samples << ",\"counts\":[";
    for (std::size_t k = 0; k < node.class_counts.size(); ++k) {
        if (k) out << ',';
        out << format_sig17(node.class_counts[k]);
    }
    out << ']';
    if (!node.is_leaf()) {
        out << ",\"left\":";
        node_to_json(out, forest, tree, node.left);
        out << ",\"right\":";
        node_to_json(out, forest, tree, node.right);
    }
    out << '}';
}

}  // namespace detail

inline std::string model_to_json(const Forest& forest) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"format\": \"lexrel-forest\",\n";
    out << "  \"version\": 1,\n";
    out << "  \"params\": {\"n_estimators\": " << forest.params.n_estimators
        << ", \"max_depth\": " << forest.params.max_depth << ", \"criterion\": \""
        << criterion_name(forest.params.criterion)
        << "\", \"max_features\": " << forest.params.max_features
        << ", \"min_split\": " << forest.params.min_split << ", \"seed\": " << forest.params.seed
        << ", \"class_weight\": \"" << forest.params.class_weight << "\"},\n";
    out << "  \"classes\": [";
    for (std::size_t k = 0; k < forest.classes.size(); ++k) {
        if (k) out << ", ";
        detail::json_escape_to(out, forest.classes[k]);
    }
    out << "],\n";
    out << "  \"feature_names\": [";
    for (std::size_t k = 0; k < forest.feature_names.size(); ++k) {
        if (k) out << ", ";
        detail::json_escape_to(out, forest.feature_names[k]);
    }
    out << "],\n";
    out << "  \"trees\": [\n";
    for (std::size_t t = 0; t < forest.trees.size(); ++t) {
        out << "    ";
        detail::node_to_json(out, forest, forest.trees[t], 0);
        if (t + 1 < forest.trees.size()) out << ',';
        out << '\n';
    }
    out << "  ]\n";
    out << "}\n";
    return out.str();
}

inline void save_model(const Forest& forest, const std::string& path) {
    atomic_write(path, model_to_json(forest));
}

namespace detail {

inline int node_from_json(const nlohmann::json& j, const Forest& forest, Tree& tree) {
    const int idx = static_cast<int>(tree.nodes.size());
    tree.nodes.emplace_back();
    TreeNode node;
    node.node_impurity = j.at("impurity").get<double>();
    node.n_samples = j.at("n_samples").get<std::uint64_t>();
    node.class_counts = j.at("counts").get<std::vector<double>>();
    if (node.class_counts.size() != forest.classes.size()) {
        throw format_error("model node counts length does not match class list");
    }
    int label = 0;
    for (std::size_t k = 1; k < node.class_counts.size(); ++k) {
        if (node.class_counts[k] > node.class_counts[static_cast<std::size_t>(label)]) {
            label = static_cast<int>(k);
        }
    }
    node.label = label;
    if (j.contains("feature")) {
        node.feature = j.at("feature").get<int>();
        if (node.feature < 0 || static_cast<std::size_t>(node.feature) >= kFeatureCount) {
            throw format_error("model node has feature index out of range");
        }
        node.threshold = j.at("threshold").get<double>();
        node.gain = j.at("gain").get<double>();
        tree.nodes[static_cast<std::size_t>(idx)] = node;
        const int left = node_from_json(j.at("left"), forest, tree);
        tree.nodes[static_cast<std::size_t>(idx)].left = left;
        const int right = node_from_json(j.at("right"), forest, tree);
        tree.nodes[static_cast<std::size_t>(idx)].right = right;
    } else {
        const std::string label_str = j.at("label").get<std::string>();
        const auto it = std::find(forest.classes.begin(), forest.classes.end(), label_str);
        if (it == forest.classes.end()) {
            throw format_error("model leaf references unknown class '" + label_str + "'");
        }
        node.label = static_cast<int>(it - forest.classes.begin());
        tree.nodes[static_cast<std::size_t>(idx)] = node;
    }
    return idx;
}

}  // namespace detail

inline Forest model_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw format_error(std::string("model JSON parse error: ") + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "lexrel-forest") {
            throw format_error("not a lexrel-forest model file");
        }
        if (j.at("version").get<int>() != 1) {
            throw format_error("unsupported model version " + j.at("version").dump());
        }
        Forest forest;
        const nlohmann::json& params = j.at("params");
        forest.params.n_estimators = params.at("n_estimators").get<int>();
        forest.params.max_depth = params.at("max_depth").get<int>();
        forest.params.criterion = criterion_from_name(params.at("criterion").get<std::string>());
        forest.params.max_features = params.at("max_features").get<int>();
        forest.params.min_split = params.at("min_split").get<int>();
        forest.params.seed = params.at("seed").get<std::uint64_t>();
        forest.params.class_weight = params.at("class_weight").get<std::string>();
        forest.classes = j.at("classes").get<std::vector<std::string>>();
        const std::vector<std::string> names =
            j.at("feature_names").get<std::vector<std::string>>();
        if (names.size() != kFeatureCount) {
            throw format_error("model must list exactly " + std::to_string(kFeatureCount) +
                               " feature names");
        }
        std::copy(names.begin(), names.end(), forest.feature_names.begin());
        for (const nlohmann::json& tree_json : j.at("trees")) {
            Tree tree;
            detail::node_from_json(tree_json, forest, tree);
            forest.trees.push_back(std::move(tree));
        }
        if (forest.trees.size() != static_cast<std::size_t>(forest.params.n_estimators)) {
            throw format_error("model tree count does not match n_estimators");
        }
        return forest;
    } catch (const nlohmann::json::exception& e) {
        throw format_error(std::string("model JSON schema error: ") + e.what());
    }
}

inline Forest load_model(const std::string& path) { return model_from_json(read_file(path)); }

}  // namespace lexrel
