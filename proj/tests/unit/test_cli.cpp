#include <catch2/catch.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lexrel/cli.hpp"

using namespace lexrel;

namespace {

const std::string kDataDir = LEXREL_TEST_DATA_DIR;

struct CliResult {
    int code;
    std::string out;
    std::string err;
};

CliResult run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(std::move(args), out, err);
    return {code, out.str(), err.str()};
}

std::string work_dir() {
    const auto dir = std::filesystem::temp_directory_path() / "lexrel_cli_test";
    std::filesystem::create_directories(dir);
    return dir.string();
}

}  // namespace

TEST_CASE("help and usage errors") {
    CHECK(run({"--help"}).code == 0);
    CHECK(run({}).code == 1);
    CHECK(run({"frobnicate"}).code == 1);

    const CliResult unknown_flag = run({"train", "--features", "x", "--model", "y", "--bogus"});
    CHECK(unknown_flag.code == 1);
    CHECK(unknown_flag.err.find("--bogus") != std::string::npos);

    CHECK(run({"train", "--features", "x", "--model", "y", "--trees", "0"}).code == 1);
    CHECK(run({"eval", "--pred", "a", "--gold", "b", "--task", "task3"}).code == 1);
    CHECK(run({"build", "--corpus", "a", "--out", "b", "--cooc-scope", "paragraph"}).code == 1);
}

TEST_CASE("missing and malformed inputs exit with a data error") {
    const std::string dir = work_dir();
    CHECK(run({"build", "--corpus", dir + "/no_such_corpus.txt", "--out", dir}).code == 2);

    const std::string bad_pairs = dir + "/bad_pairs.tsv";
    {
        std::ofstream out(bad_pairs);
        out << "dog\tanimal\tNOT_A_TAG\n";
    }
    const std::string space_dir = dir + "/space_for_bad";
    REQUIRE(run({"build", "--corpus", kDataDir + "/toy_corpus.txt", "--out", space_dir,
                 "--min-count", "1"})
                .code == 0);
    const CliResult r = run({"features", "--space", space_dir, "--pairs", bad_pairs, "--out",
                             dir + "/never.tsv"});
    CHECK(r.code == 2);
    CHECK(r.err.find("NOT_A_TAG") != std::string::npos);
}

TEST_CASE("full pipeline reproduces the committed golden files byte for byte") {
    const std::string dir = work_dir();
    const std::string space_dir = dir + "/space";
    const std::string features_path = dir + "/features.tsv";
    const std::string model_path = dir + "/model.json";

    REQUIRE(run({"build", "--corpus", kDataDir + "/toy_corpus.txt", "--out", space_dir,
                 "--window", "2", "--min-count", "1"})
                .code == 0);
    REQUIRE(run({"features", "--space", space_dir, "--pairs", kDataDir + "/toy_pairs.tsv",
                 "--out", features_path})
                .code == 0);
    CHECK(read_file(features_path) == read_file(kDataDir + "/golden_features.tsv"));

    REQUIRE(run({"train", "--features", features_path, "--model", model_path, "--trees", "5",
                 "--depth", "3", "--seed", "42"})
                .code == 0);
    CHECK(read_file(model_path) == read_file(kDataDir + "/golden_model.json"));
}

TEST_CASE("predict, eval and importances run end to end") {
    const std::string dir = work_dir();
    const std::string space_dir = dir + "/space2";
    const std::string features_path = dir + "/features2.tsv";
    const std::string model_path = dir + "/model2.json";
    const std::string pred_path = dir + "/pred.tsv";

    REQUIRE(run({"build", "--corpus", kDataDir + "/toy_corpus.txt", "--out", space_dir,
                 "--min-count", "1"})
                .code == 0);
    REQUIRE(run({"features", "--space", space_dir, "--pairs", kDataDir + "/toy_pairs.tsv",
                 "--out", features_path})
                .code == 0);
    REQUIRE(run({"train", "--features", features_path, "--model", model_path, "--trees", "20",
                 "--depth", "4", "--seed", "1"})
                .code == 0);
    REQUIRE(run({"predict", "--model", model_path, "--features", features_path, "--out",
                 pred_path})
                .code == 0);

    // predictions have one labeled row per input pair
    std::ifstream pred_in(pred_path);
    std::string line;
    std::size_t rows = 0;
    while (std::getline(pred_in, line)) {
        CHECK(split_tabs(line).size() == 3);
        ++rows;
    }
    CHECK(rows == 8);

    const CliResult eval_run = run({"eval", "--pred", pred_path, "--gold",
                                    kDataDir + "/toy_pairs.tsv", "--task", "task2",
                                    "--report-tsv", dir + "/report.tsv"});
    CHECK(eval_run.code == 0);
    CHECK(eval_run.out.find("Confusion matrix") != std::string::npos);
    CHECK(std::filesystem::exists(dir + "/report.tsv"));

    const CliResult imp = run({"importances", "--model", model_path});
    CHECK(imp.code == 0);
    std::istringstream imp_lines(imp.out);
    std::size_t imp_rows = 0;
    while (std::getline(imp_lines, line)) ++imp_rows;
    CHECK(imp_rows == 1 + kFeatureCount);
}

TEST_CASE("eval of identical files gives a perfect report") {
    const std::string dir = work_dir();
    const CliResult r = run({"eval", "--pred", kDataDir + "/toy_pairs.tsv", "--gold",
                             kDataDir + "/toy_pairs.tsv", "--task", "task2"});
    CHECK(r.code == 0);
    CHECK(r.out.find("F1 1.000") != std::string::npos);
    CHECK(r.out.find("Accuracy: 1.000") != std::string::npos);

    // length mismatch is a data error
    const std::string shorter = dir + "/short.tsv";
    {
        std::ofstream out(shorter);
        out << "dog\tanimal\tHYPER\n";
    }
    CHECK(run({"eval", "--pred", shorter, "--gold", kDataDir + "/toy_pairs.tsv", "--task",
               "task2"})
              .code == 2);
}

TEST_CASE("eval --check-split reports shared pairs") {
    const CliResult r = run({"eval", "--pred", kDataDir + "/toy_pairs.tsv", "--gold",
                             kDataDir + "/toy_pairs.tsv", "--task", "task2", "--check-split",
                             kDataDir + "/toy_pairs.tsv"});
    CHECK(r.code == 0);
    CHECK(r.err.find("lexical split violated") != std::string::npos);
    CHECK(r.err.find("dog\tanimal") != std::string::npos);
}

TEST_CASE("custom --top-n flows through features, train and predict") {
    const std::string dir = work_dir();
    const std::string space_dir = dir + "/space_topn";
    REQUIRE(run({"build", "--corpus", kDataDir + "/toy_corpus.txt", "--out", space_dir,
                 "--min-count", "1"})
                .code == 0);
    const std::string feats = dir + "/features_topn.tsv";
    REQUIRE(run({"features", "--space", space_dir, "--pairs", kDataDir + "/toy_pairs.tsv",
                 "--out", feats, "--top-n", "5,20"})
                .code == 0);
    const FeatureDataset dataset = read_features(feats);
    CHECK(dataset.names[kApsynSmall] == "apsyn_5");
    CHECK(dataset.names[kApantLarge] == "apant_20");

    const std::string model = dir + "/model_topn.json";
    REQUIRE(run({"train", "--features", feats, "--model", model, "--trees", "3"}).code == 0);
    CHECK(load_model(model).feature_names[kApsynSmall] == "apsyn_5");

    // canonical features do not fit a model trained with different N
    const std::string canonical = dir + "/features_canonical.tsv";
    REQUIRE(run({"features", "--space", space_dir, "--pairs", kDataDir + "/toy_pairs.tsv",
                 "--out", canonical})
                .code == 0);
    const CliResult mismatch =
        run({"predict", "--model", model, "--features", canonical, "--out", dir + "/p.tsv"});
    CHECK(mismatch.code == 2);
    CHECK(mismatch.err.find("--top-n") != std::string::npos);

    CHECK(run({"features", "--space", space_dir, "--pairs", kDataDir + "/toy_pairs.tsv",
               "--out", feats, "--top-n", "17"})
              .code == 1);
}

TEST_CASE("sentence-scope build feeds the cooc feature from its own matrix") {
    const std::string dir = work_dir();
    const std::string window_dir = dir + "/scope_window";
    const std::string sentence_dir = dir + "/scope_sentence";
    REQUIRE(run({"build", "--corpus", kDataDir + "/toy_corpus.txt", "--out", window_dir,
                 "--min-count", "1"})
                .code == 0);
    REQUIRE(run({"build", "--corpus", kDataDir + "/toy_corpus.txt", "--out", sentence_dir,
                 "--min-count", "1", "--cooc-scope", "sentence"})
                .code == 0);
    CHECK(std::filesystem::exists(sentence_dir + "/cooc.tsv"));
    CHECK_FALSE(std::filesystem::exists(window_dir + "/cooc.tsv"));

    const std::string pairs = dir + "/cooc_pairs.tsv";
    {
        std::ofstream out(pairs);
        out << "dog\tcat\t?\n";  // same sentence, 4 tokens apart
    }
    const std::string fw = dir + "/fw.tsv";
    const std::string fs = dir + "/fs.tsv";
    REQUIRE(run({"features", "--space", window_dir, "--pairs", pairs, "--out", fw}).code == 0);
    REQUIRE(run({"features", "--space", sentence_dir, "--pairs", pairs, "--out", fs}).code == 0);
    const FeatureDataset window_f = read_features(fw);
    const FeatureDataset sentence_f = read_features(fs);
    CHECK(window_f.features[0].values[kCooc] == 0.0);
    CHECK(sentence_f.features[0].values[kCooc] > 0.0);
}
