#pragma once

// Command-line surface: build / features / train / predict / eval /
// importances. Exit codes: 0 success, 1 usage error, 2 data or format error.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lexrel/corpus.hpp"
#include "lexrel/features.hpp"
#include "lexrel/forest.hpp"
#include "lexrel/metrics.hpp"
#include "lexrel/space.hpp"

namespace lexrel {
namespace cli {

struct BuildOptions {
    std::string corpus;
    std::string out_dir;
    int window = 2;
    std::uint64_t min_count = 100;
    std::string cooc_scope = "window";
};

inline void cmd_build(const BuildOptions& opt, std::ostream& log) {
    std::filesystem::create_directories(opt.out_dir);
    const Vocabulary vocab = build_vocabulary_file(opt.corpus, opt.min_count);
    if (vocab.size() == 0) {
        throw format_error(opt.corpus + ": no lemma reaches min_count=" +
                           std::to_string(opt.min_count));
    }
    log << "vocabulary: " << vocab.size() << " lemmas\n";
    save_vocabulary(vocab, opt.out_dir + "/vocab.tsv");

    const RawCounts counts = count_cooccurrences_file(opt.corpus, vocab, opt.window);
    if (counts.total == 0) throw format_error(opt.corpus + ": no co-occurrence events counted");
    SpaceMeta meta;
    meta.window = opt.window;
    meta.total = counts.total;
    meta.vocab_size = vocab.size();
    meta.min_count = opt.min_count;
    meta.cooc_scope = opt.cooc_scope;
    save_counts(counts, opt.out_dir + "/counts.tsv");
    save_meta(meta, opt.out_dir + "/counts.meta");
    log << "counts: " << counts.total << " events (window " << opt.window << ")\n";

    const WeightedSpace space = ppmi_weight(counts);
    SpaceMeta space_meta = meta;
    space_meta.weighting = "ppmi";
    save_space(space, opt.out_dir + "/space.tsv");
    save_meta(space_meta, opt.out_dir + "/space.meta");

    if (opt.cooc_scope == "sentence") {
        const RawCounts cooc = count_sentence_cooccurrences_file(opt.corpus, vocab);
        SpaceMeta cooc_meta = meta;
        cooc_meta.window = 0;
        cooc_meta.total = cooc.total;
        save_counts(cooc, opt.out_dir + "/cooc.tsv");
        save_meta(cooc_meta, opt.out_dir + "/cooc.meta");
        log << "sentence-scope cooc: " << cooc.total << " events\n";
    }
}

struct FeatureCmdOptions {
    std::string space_dir;
    std::string pairs;
    std::string out;
    std::string top_n = "100,1000";
    std::string task = "auto";  // auto | task1 | task2
};

inline std::pair<int, int> parse_top_n(const std::string& value) {
    const std::size_t comma = value.find(',');
    if (comma == std::string::npos) {
        throw CLI::ValidationError("--top-n", "expected two comma-separated sizes, e.g. 100,1000");
    }
    try {
        const int a = std::stoi(value.substr(0, comma));
        const int b = std::stoi(value.substr(comma + 1));
        if (a < 1 || b < 1) throw std::invalid_argument("non-positive");
        return {a, b};
    } catch (const CLI::ValidationError&) {
        throw;
    } catch (const std::exception&) {
        throw CLI::ValidationError("--top-n", "expected two positive sizes, e.g. 100,1000");
    }
}

// Pair loader for feature extraction: tags may come from either task (or be
// '?'), but must not mix tasks; an explicit --task narrows the accepted set.
inline std::vector<WordPair> load_feature_pairs(const std::string& path, const std::string& task) {
    std::ifstream in = open_input(path);
    std::vector<WordPair> pairs;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string context = path + ":" + std::to_string(line_number);
        const std::vector<std::string> cols = split_tabs(line);
        if (cols.size() != 3) {
            throw format_error(context + ": expected 3 tab-separated columns, got " +
                               std::to_string(cols.size()));
        }
        const std::string& tag = cols[2];
        if (tag != "?") {
            if (task == "auto") {
                if (!detail::is_known_tag(tag)) {
                    throw format_error(context + ": unknown relation tag '" + tag + "'");
                }
            } else if (label_index(task_from_name(task), tag) < 0) {
                throw format_error(context + ": unknown " + task + " tag '" + tag + "'");
            }
        }
        pairs.push_back(WordPair{cols[0], cols[1], tag});
    }
    detail::check_tag_consistency(pairs);
    return pairs;
}

inline void cmd_features(const FeatureCmdOptions& opt, std::ostream& log) {
    const auto [n_small, n_large] = parse_top_n(opt.top_n);
    const Vocabulary vocab = load_vocabulary(opt.space_dir + "/vocab.tsv");
    const SpaceMeta counts_meta = load_meta(opt.space_dir + "/counts.meta");
    const RawCounts counts = load_counts(opt.space_dir + "/counts.tsv", counts_meta);
    const WeightedSpace space = load_space(opt.space_dir + "/space.tsv", counts_meta.vocab_size);

    std::optional<RawCounts> sentence_cooc;
    if (counts_meta.cooc_scope == "sentence") {
        const SpaceMeta cooc_meta = load_meta(opt.space_dir + "/cooc.meta");
        sentence_cooc = load_counts(opt.space_dir + "/cooc.tsv", cooc_meta);
    }

    FeatureOptions fopts;
    fopts.top_n_small = n_small;
    fopts.top_n_large = n_large;
    fopts.cooc_counts = sentence_cooc ? &*sentence_cooc : nullptr;

    FeatureDataset dataset;
    dataset.names = feature_names_for(n_small, n_large);
    dataset.pairs = load_feature_pairs(opt.pairs, opt.task);
    dataset.features.reserve(dataset.pairs.size());
    std::size_t oov_pairs = 0;
    for (const WordPair& pair : dataset.pairs) {
        dataset.features.push_back(extract_features(pair, vocab, counts, space, fopts));
        if (dataset.features.back().oov1 || dataset.features.back().oov2) ++oov_pairs;
    }
    write_features(dataset, opt.out);
    log << "features: " << dataset.size() << " pairs (" << oov_pairs << " with OOV words) -> "
        << opt.out << '\n';
}

struct TrainOptions {
    std::string features;
    std::string model;
    int trees = 100;
    int depth = 10;
    std::string criterion = "gini";
    int max_features = 9;
    int min_split = 2;
    std::uint64_t seed = 0;
    std::string class_weight = "none";
};

inline void cmd_train(const TrainOptions& opt, std::ostream& log) {
    const FeatureDataset dataset = read_features(opt.features);
    const TrainingSet set = make_training_set(dataset);
    ForestParams params;
    params.n_estimators = opt.trees;
    params.max_depth = opt.depth;
    params.criterion = criterion_from_name(opt.criterion);
    params.max_features = opt.max_features;
    params.min_split = opt.min_split;
    params.seed = opt.seed;
    params.class_weight = opt.class_weight;
    const Forest forest = train_forest(set, params);
    save_model(forest, opt.model);
    log << "trained " << params.n_estimators << " trees on " << set.rows.size() << " pairs ("
        << set.classes.size() << " classes) -> " << opt.model << '\n';
}

struct PredictOptions {
    std::string model;
    std::string features;
    std::string out;
};

inline void cmd_predict(const PredictOptions& opt, std::ostream& log) {
    const Forest forest = load_model(opt.model);
    const FeatureDataset dataset = read_features(opt.features);
    if (dataset.names != forest.feature_names) {
        throw format_error(opt.features + ": feature columns do not match the model (was the "
                                          "model trained with a different --top-n?)");
    }
    std::ostringstream out;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const Prediction p = predict(forest, dataset.features[i].values);
        out << dataset.pairs[i].w1 << '\t' << dataset.pairs[i].w2 << '\t' << p.label << '\n';
    }
    atomic_write(opt.out, out.str());
    log << "predicted " << dataset.size() << " pairs -> " << opt.out << '\n';
}

struct EvalOptions {
    std::string pred;
    std::string gold;
    std::string task;
    std::string report_tsv;
    std::string check_split;
};

inline void cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& log) {
    const Task task = task_from_name(opt.task);
    const Dataset gold = load_pairs(opt.gold, task, &log);
    const Dataset pred = load_pairs(opt.pred, task, nullptr);
    if (pred.pairs.size() != gold.pairs.size()) {
        throw format_error("prediction file has " + std::to_string(pred.pairs.size()) +
                           " rows but gold has " + std::to_string(gold.pairs.size()));
    }
    for (std::size_t i = 0; i < gold.pairs.size(); ++i) {
        if (pred.pairs[i].w1 != gold.pairs[i].w1 || pred.pairs[i].w2 != gold.pairs[i].w2) {
            log << "warning: row " << i + 1 << ": prediction pair " << pred.pairs[i].w1 << "/"
                << pred.pairs[i].w2 << " does not match gold pair " << gold.pairs[i].w1 << "/"
                << gold.pairs[i].w2 << '\n';
            break;
        }
    }
    if (!opt.check_split.empty()) {
        const Dataset other = load_pairs(opt.check_split, task, nullptr);
        const auto shared = shared_pairs(gold, other);
        if (!shared.empty()) {
            log << "warning: " << shared.size() << " pairs shared between " << opt.gold << " and "
                << opt.check_split << " (lexical split violated):\n";
            for (const auto& [w1, w2] : shared) log << "  " << w1 << '\t' << w2 << '\n';
        }
    }
    std::vector<std::string> labels;
    labels.reserve(pred.pairs.size());
    for (const WordPair& p : pred.pairs) labels.push_back(p.label);
    const EvaluationReport report = score(labels, gold);
    out << render_report(report);
    if (!opt.report_tsv.empty()) atomic_write(opt.report_tsv, report_to_tsv(report));
}

inline void cmd_importances(const std::string& model_path, std::ostream& out) {
    const Forest forest = load_model(model_path);
    std::vector<std::pair<std::string, double>> ranked = feature_importances(forest);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    out << "feature\timportance\n";
    for (const auto& [name, value] : ranked) out << name << '\t' << format_fixed6(value) << '\n';
}

}  // namespace cli

// argv-style entry point (program name excluded). All streams default to the
// process streams; tests inject their own.
inline int run_cli(std::vector<std::string> args, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
    CLI::App app{"corpus-driven lexical relation classifier (PPMI spaces, "
                 "distributional measures, random forest)",
                 "lexrel"};
    app.require_subcommand(1);

    cli::BuildOptions build_opt;
    CLI::App* build = app.add_subcommand(
        "build", "Build vocabulary, co-occurrence counts and PPMI space from a corpus");
    build->add_option("--corpus", build_opt.corpus, "tokenized corpus, one sentence per line")
        ->required();
    build->add_option("--out", build_opt.out_dir, "output directory")->required();
    build->add_option("--window", build_opt.window, "co-occurrence window size")
        ->default_val(2)
        ->check(CLI::Range(1, 1000));
    build->add_option("--min-count", build_opt.min_count, "minimum lemma frequency")
        ->default_val(100)
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 40));
    build->add_option("--cooc-scope", build_opt.cooc_scope,
                      "counts used by the cooc feature: window or sentence")
        ->default_val("window")
        ->check(CLI::IsMember({"window", "sentence"}));

    cli::FeatureCmdOptions feat_opt;
    CLI::App* features =
        app.add_subcommand("features", "Extract the 18 pair features from a built space");
    features->add_option("--space", feat_opt.space_dir, "directory produced by `build`")
        ->required();
    features->add_option("--pairs", feat_opt.pairs, "pair file: w1<TAB>w2<TAB>label")->required();
    features->add_option("--out", feat_opt.out, "output feature TSV")->required();
    features->add_option("--top-n", feat_opt.top_n, "APSyn/APAnt context list sizes")
        ->default_val("100,1000")
        ->check([](const std::string& value) -> std::string {
            try {
                cli::parse_top_n(value);
                return {};
            } catch (const CLI::ValidationError& e) {
                return e.what();
            }
        });
    features->add_option("--task", feat_opt.task, "expected tag set")
        ->default_val("auto")
        ->check(CLI::IsMember({"auto", "task1", "task2"}));

    cli::TrainOptions train_opt;
    CLI::App* train = app.add_subcommand("train", "Train the random forest on a feature TSV");
    train->add_option("--features", train_opt.features, "labeled feature TSV")->required();
    train->add_option("--model", train_opt.model, "output model JSON")->required();
    train->add_option("--trees", train_opt.trees, "number of trees")
        ->default_val(100)
        ->check(CLI::Range(1, 100000));
    train->add_option("--depth", train_opt.depth, "maximum tree depth")
        ->default_val(10)
        ->check(CLI::Range(1, 64));
    train->add_option("--criterion", train_opt.criterion, "split criterion")
        ->default_val("gini")
        ->check(CLI::IsMember({"gini", "entropy"}));
    train->add_option("--max-features", train_opt.max_features, "features considered per split")
        ->default_val(9)
        ->check(CLI::Range(1, static_cast<int>(kFeatureCount)));
    train->add_option("--min-split", train_opt.min_split, "minimum samples to split a node")
        ->default_val(2)
        ->check(CLI::Range(2, 1 << 30));
    train->add_option("--seed", train_opt.seed, "RNG seed")->default_val(0);
    train->add_option("--class-weight", train_opt.class_weight, "none or balanced")
        ->default_val("none")
        ->check(CLI::IsMember({"none", "balanced"}));

    cli::PredictOptions pred_opt;
    CLI::App* predict = app.add_subcommand("predict", "Label pairs with a trained model");
    predict->add_option("--model", pred_opt.model, "model JSON")->required();
    predict->add_option("--features", pred_opt.features, "feature TSV to label")->required();
    predict->add_option("--out", pred_opt.out, "output predictions (w1<TAB>w2<TAB>label)")
        ->required();

    cli::EvalOptions eval_opt;
    CLI::App* eval = app.add_subcommand("eval", "Score predictions against gold pairs");
    eval->add_option("--pred", eval_opt.pred, "predictions: w1<TAB>w2<TAB>label")->required();
    eval->add_option("--gold", eval_opt.gold, "gold pairs: w1<TAB>w2<TAB>label")->required();
    eval->add_option("--task", eval_opt.task, "task1 or task2")
        ->required()
        ->check(CLI::IsMember({"task1", "task2"}));
    eval->add_option("--report-tsv", eval_opt.report_tsv, "also write a machine-readable report");
    eval->add_option("--check-split", eval_opt.check_split,
                     "warn about pairs shared with this (training) pair file");

    std::string importances_model;
    CLI::App* importances =
        app.add_subcommand("importances", "Print ranked feature importances of a model");
    importances->add_option("--model", importances_model, "model JSON")->required();

    try {
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        err << "run `lexrel --help` (or `lexrel <subcommand> --help`) for usage\n";
        return 1;
    }

    try {
        if (build->parsed()) cli::cmd_build(build_opt, err);
        else if (features->parsed()) cli::cmd_features(feat_opt, err);
        else if (train->parsed()) cli::cmd_train(train_opt, err);
        else if (predict->parsed()) cli::cmd_predict(pred_opt, err);
        else if (eval->parsed()) cli::cmd_eval(eval_opt, out, err);
        else if (importances->parsed()) cli::cmd_importances(importances_model, out);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace lexrel
