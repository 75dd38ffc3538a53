#include <catch2/catch.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "lexrel/forest.hpp"
#include "support/datasets.hpp"
#include "support/reference.hpp"

using namespace lexrel;

namespace {

// A training set over the first three feature columns; everything else 0.
TrainingSet small_set(const std::vector<std::vector<double>>& rows,
                      const std::vector<int>& labels, int n_classes) {
    TrainingSet set;
    for (int c = 0; c < n_classes; ++c) set.classes.push_back("C" + std::to_string(c));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::array<double, kFeatureCount> row{};
        for (std::size_t f = 0; f < rows[i].size(); ++f) row[f] = rows[i][f];
        set.rows.push_back(row);
        set.labels.push_back(labels[i]);
    }
    return set;
}

std::vector<std::uint32_t> all_indices(const TrainingSet& set) {
    std::vector<std::uint32_t> idx(set.rows.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<std::uint32_t>(i);
    return idx;
}

int max_depth_of(const Tree& tree) { return tree.depth(); }

double training_accuracy(const Forest& forest, const TrainingSet& set) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < set.rows.size(); ++i) {
        if (predict(forest, set.rows[i]).label_index == set.labels[i]) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(set.rows.size());
}

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("impurity: pure, balanced, skewed, empty") {
    CHECK(impurity({4.0, 0.0}, Criterion::gini) == 0.0);
    CHECK(impurity({4.0, 0.0}, Criterion::entropy) == 0.0);
    CHECK(impurity({5.0, 5.0}, Criterion::gini) == 0.5);
    CHECK(impurity({5.0, 5.0}, Criterion::entropy) == 1.0);
    CHECK(impurity({3.0, 1.0}, Criterion::gini) == Approx(0.375).epsilon(1e-12));
    CHECK_THROWS_AS(impurity({0.0, 0.0}, Criterion::gini), std::invalid_argument);
}

TEST_CASE("best_split: perfect separator, constant feature, worked example") {
    const TrainingSet perfect =
        small_set({{1.0}, {2.0}, {10.0}, {11.0}}, {0, 0, 1, 1}, 2);
    const auto split = best_split(perfect, all_indices(perfect), {0}, Criterion::gini);
    REQUIRE(split);
    CHECK(split->feature == 0);
    CHECK(split->threshold == 6.0);
    CHECK(split->gain == Approx(0.5).epsilon(1e-12));  // parent gini, children pure

    const TrainingSet constant = small_set({{3.0}, {3.0}, {3.0}}, {0, 1, 0}, 2);
    CHECK_FALSE(best_split(constant, all_indices(constant), {0}, Criterion::gini));

    const TrainingSet worked =
        small_set({{1.0}, {2.0}, {3.0}, {4.0}}, {0, 0, 1, 1}, 2);
    const auto w = best_split(worked, all_indices(worked), {0}, Criterion::gini);
    REQUIRE(w);
    CHECK(w->threshold == 2.5);
    CHECK(w->gain == Approx(0.5).epsilon(1e-12));
}

TEST_CASE("best_split equals exhaustive enumeration on random small fixtures") {
    lexrel::SplitMix64 rng(2024);
    int checked = 0;
    for (int round = 0; round < 400; ++round) {
        const int n = 2 + static_cast<int>(rng.below(7));   // 2..8 samples
        const int n_classes = 2 + static_cast<int>(rng.below(2));
        std::vector<std::vector<double>> rows;
        std::vector<int> labels;
        bool multiclass = false;
        for (int i = 0; i < n; ++i) {
            // small integer grid so ties and duplicate values are common
            rows.push_back({static_cast<double>(rng.below(5)), static_cast<double>(rng.below(5)),
                            static_cast<double>(rng.below(5))});
            labels.push_back(static_cast<int>(rng.below(static_cast<std::uint64_t>(n_classes))));
            if (labels.back() != labels.front()) multiclass = true;
        }
        if (!multiclass) continue;
        const TrainingSet set = small_set(rows, labels, n_classes);
        const bool gini = rng.below(2) == 0;
        const Criterion criterion = gini ? Criterion::gini : Criterion::entropy;

        const auto got = best_split(set, all_indices(set), {0, 1, 2}, criterion);
        const auto want = ref::best_split(rows, labels, n_classes, {0, 1, 2}, gini);
        REQUIRE(got.has_value() == want.has_value());
        if (got) {
            CHECK(got->feature == want->feature);
            CHECK(got->threshold == want->threshold);
            CHECK(ref::close(got->gain, want->gain));
            ++checked;
        }
    }
    CHECK(checked > 100);  // the fixture generator must produce real splits
}

TEST_CASE("grow_tree: pure leaf, depth-capped stump, separable exact fit") {
    ForestParams params;
    params.max_depth = 10;
    params.max_features = static_cast<int>(kFeatureCount);

    const TrainingSet pure = small_set({{1.0}, {2.0}}, {0, 0}, 2);
    SplitMix64 rng(1);
    const Tree leaf = grow_tree(pure, all_indices(pure), params, rng);
    REQUIRE(leaf.nodes.size() == 1);
    CHECK(leaf.nodes[0].is_leaf());
    CHECK(max_depth_of(leaf) == 0);

    ForestParams stump_params = params;
    stump_params.max_depth = 1;
    const TrainingSet separable =
        small_set({{1.0, 7.0}, {2.0, 7.0}, {8.0, 7.0}, {9.0, 7.0}}, {0, 0, 1, 1}, 2);
    SplitMix64 rng2(1);
    const Tree stump = grow_tree(separable, all_indices(separable), stump_params, rng2);
    REQUIRE(stump.nodes.size() == 3);
    CHECK(max_depth_of(stump) == 1);
    CHECK_FALSE(stump.nodes[0].is_leaf());

    lexrel::SplitMix64 gen(5);
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    for (int i = 0; i < 40; ++i) {
        const int label = i % 2;
        rows.push_back({label == 0 ? gen.uniform(0.0, 0.4) : gen.uniform(0.6, 1.0),
                        gen.uniform(0.0, 1.0), gen.uniform(0.0, 1.0)});
        labels.push_back(label);
    }
    const TrainingSet sep = small_set(rows, labels, 2);
    ForestParams one_tree = params;
    one_tree.n_estimators = 1;
    one_tree.seed = 42;
    const Forest forest = train_forest(sep, one_tree);
    CHECK(training_accuracy(forest, sep) == 1.0);
}

TEST_CASE("train_forest is deterministic for a fixed seed") {
    const TrainingSet set = testdata::make_cos_only_set(40, 77);
    ForestParams params;
    params.n_estimators = 12;
    params.seed = 123;
    const Forest a = train_forest(set, params);
    const Forest b = train_forest(set, params);
    CHECK(model_to_json(a) == model_to_json(b));

    ForestParams other = params;
    other.seed = 124;
    const Forest c = train_forest(set, other);
    CHECK(model_to_json(a) != model_to_json(c));
}

TEST_CASE("train_forest rejects degenerate inputs") {
    TrainingSet set = testdata::make_cos_only_set(10, 1);
    ForestParams params;

    TrainingSet single = set;
    for (int& l : single.labels) l = 0;
    CHECK_THROWS_AS(train_forest(single, params), format_error);

    TrainingSet empty;
    empty.classes = {"A", "B"};
    CHECK_THROWS_AS(train_forest(empty, params), format_error);

    ForestParams bad = params;
    bad.n_estimators = 0;
    CHECK_THROWS_AS(train_forest(set, bad), std::invalid_argument);
    bad = params;
    bad.max_features = 19;
    CHECK_THROWS_AS(train_forest(set, bad), std::invalid_argument);
}

TEST_CASE("forest separates well-separated clusters on held-out data") {
    const auto [train, test] = testdata::make_cluster_split(100, 100, 9);
    ForestParams params;
    params.n_estimators = 100;
    params.max_depth = 10;
    params.seed = 7;
    const Forest forest = train_forest(train, params);
    double held_out = 0.0;
    for (std::size_t i = 0; i < test.rows.size(); ++i) {
        if (predict(forest, test.rows[i]).label_index == test.labels[i]) held_out += 1.0;
    }
    held_out /= static_cast<double>(test.rows.size());
    CHECK(held_out >= 0.95);
}

TEST_CASE("every trained tree respects the depth bound and positive gains") {
    const TrainingSet set = testdata::make_monotone_fixture(4);
    ForestParams params;
    params.n_estimators = 30;
    params.max_depth = 10;
    params.seed = 5;
    const Forest forest = train_forest(set, params);
    for (const Tree& tree : forest.trees) {
        CHECK(max_depth_of(tree) <= params.max_depth);
        for (const TreeNode& node : tree.nodes) {
            if (!node.is_leaf()) CHECK(node.gain > 0.0);
        }
    }
}

TEST_CASE("prediction is a plurality vote with lexicographic ties") {
    Forest forest;
    forest.classes = {"ANT", "SYN"};
    forest.params.n_estimators = 3;
    const auto leaf_tree = [](int label) {
        Tree t;
        TreeNode node;
        node.label = label;
        node.class_counts = {0.0, 0.0};
        node.class_counts[static_cast<std::size_t>(label)] = 2.0;
        node.n_samples = 2;
        t.nodes.push_back(node);
        return t;
    };
    forest.trees = {leaf_tree(1), leaf_tree(0), leaf_tree(0)};  // SYN, ANT, ANT
    const Prediction p = predict(forest, std::array<double, kFeatureCount>{});
    CHECK(p.label == "ANT");
    CHECK(p.votes[0] == Approx(2.0 / 3.0));
    CHECK(p.votes[1] == Approx(1.0 / 3.0));

    forest.trees = {leaf_tree(1), leaf_tree(1), leaf_tree(1)};  // unanimous
    const Prediction unanimous = predict(forest, std::array<double, kFeatureCount>{});
    CHECK(unanimous.label == "SYN");
    CHECK(unanimous.votes[1] == 1.0);

    forest.trees = {leaf_tree(1)};  // single tree
    forest.params.n_estimators = 1;
    CHECK(predict(forest, std::array<double, kFeatureCount>{}).label == "SYN");

    forest.trees = {leaf_tree(1), leaf_tree(0)};  // tie -> lexicographically smaller
    forest.params.n_estimators = 2;
    CHECK(predict(forest, std::array<double, kFeatureCount>{}).label == "ANT");

    CHECK_THROWS_AS(predict(forest, std::vector<double>(5, 0.0)), std::invalid_argument);
}

TEST_CASE("a forest of identical stumps puts all importance on one feature") {
    const TrainingSet set = testdata::make_cos_only_set(50, 13);
    ForestParams params;
    params.n_estimators = 10;
    params.max_depth = 1;
    params.max_features = static_cast<int>(kFeatureCount);
    params.seed = 3;
    const Forest forest = train_forest(set, params);
    const auto importances = feature_importances(forest);
    double sum = 0.0;
    for (const auto& [name, value] : importances) sum += value;
    CHECK(sum == Approx(1.0).margin(1e-9));
    CHECK(importances[kCos].first == "cos");
    CHECK(importances[kCos].second == Approx(1.0).margin(1e-9));
}

TEST_CASE("cos dominates importances when it is the only informative column") {
    const TrainingSet set = testdata::make_cos_only_set(100, 21);
    ForestParams params;
    params.n_estimators = 50;
    params.seed = 11;
    const Forest forest = train_forest(set, params);
    const auto importances = feature_importances(forest);
    double sum = 0.0;
    std::size_t best = 0;
    for (std::size_t k = 0; k < importances.size(); ++k) {
        sum += importances[k].second;
        if (importances[k].second > importances[best].second) best = k;
    }
    CHECK(sum == Approx(1.0).margin(1e-9));
    CHECK(importances[best].first == "cos");
}

TEST_CASE("model JSON round-trips losslessly") {
    const TrainingSet set = testdata::make_monotone_fixture(31);
    ForestParams params;
    params.n_estimators = 8;
    params.seed = 99;
    const Forest forest = train_forest(set, params);

    const std::string path = temp_path("lexrel_model.json");
    save_model(forest, path);
    const Forest loaded = load_model(path);
    CHECK(model_to_json(loaded) == model_to_json(forest));

    // loaded model predicts identically on random vectors
    lexrel::SplitMix64 rng(8);
    for (int i = 0; i < 1000; ++i) {
        std::array<double, kFeatureCount> row{};
        testdata::fill_noise(rng, row);
        row[kCooc] = rng.uniform(0.0, 10.0);
        CHECK(predict(loaded, row).label == predict(forest, row).label);
    }
}

TEST_CASE("model loader rejects truncated and alien files") {
    const TrainingSet set = testdata::make_cos_only_set(10, 2);
    ForestParams params;
    params.n_estimators = 2;
    const Forest forest = train_forest(set, params);
    const std::string json = model_to_json(forest);

    CHECK_THROWS_AS(model_from_json(json.substr(0, json.size() / 2)), format_error);
    CHECK_THROWS_AS(model_from_json("{\"format\": \"something-else\", \"version\": 1}"),
                    format_error);
    CHECK_THROWS_AS(model_from_json("{}"), format_error);
}

TEST_CASE("monotone transform of one feature column leaves predictions unchanged") {
    const TrainingSet original = testdata::make_monotone_fixture(12);
    TrainingSet cubed = original;
    for (auto& row : cubed.rows) {
        row[kCooc] = row[kCooc] * row[kCooc] * row[kCooc];
    }
    ForestParams params;
    params.n_estimators = 40;
    params.max_depth = 10;
    params.seed = 19;
    const Forest forest_a = train_forest(original, params);
    const Forest forest_b = train_forest(cubed, params);
    for (std::size_t i = 0; i < original.rows.size(); ++i) {
        CHECK(predict(forest_a, original.rows[i]).label ==
              predict(forest_b, cubed.rows[i]).label);
    }
}

TEST_CASE("balanced class weights shift leaf majorities") {
    // 90/10 imbalance: unweighted trees on a constant feature would always
    // vote for the majority class; balanced weights equalize the classes.
    TrainingSet set;
    set.classes = {"BIG", "SMALL"};
    lexrel::SplitMix64 rng(6);
    for (int i = 0; i < 100; ++i) {
        std::array<double, kFeatureCount> row{};
        testdata::fill_noise(rng, row);
        const int label = i < 90 ? 0 : 1;
        row[kCos] = label == 0 ? rng.uniform(0.0, 0.55) : rng.uniform(0.45, 1.0);
        set.rows.push_back(row);
        set.labels.push_back(label);
    }
    ForestParams params;
    params.n_estimators = 30;
    params.seed = 2;
    params.class_weight = "balanced";
    const Forest weighted = train_forest(set, params);
    std::size_t small_hits = 0, small_total = 0;
    for (std::size_t i = 0; i < set.rows.size(); ++i) {
        if (set.labels[i] == 1) {
            ++small_total;
            if (predict(weighted, set.rows[i]).label_index == 1) ++small_hits;
        }
    }
    CHECK(static_cast<double>(small_hits) / static_cast<double>(small_total) > 0.5);
}
