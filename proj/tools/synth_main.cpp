// Generates the synthetic corpus and pair files used by the end-to-end
// experiment: planted SYN/ANT/HYPER/PART_OF populations plus random
// distractors, with train/test pair vocabularies kept disjoint.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lexrel/synthetic.hpp"

int main(int argc, char** argv) {
    CLI::App app{"synthetic relation-pair world generator", "lexrel-synth"};
    lexrel::SynthParams params;
    std::string out_dir;
    app.add_option("--out", out_dir, "output directory")->required();
    app.add_option("--seed", params.seed, "RNG seed")->default_val(params.seed);
    app.add_option("--train-pairs", params.pairs_per_relation_train,
                   "pairs per relation in the training split")
        ->default_val(params.pairs_per_relation_train)
        ->check(CLI::Range(1, 100000));
    app.add_option("--test-pairs", params.pairs_per_relation_test,
                   "pairs per relation in the test split")
        ->default_val(params.pairs_per_relation_test)
        ->check(CLI::Range(1, 100000));
    app.add_option("--random-train", params.random_pairs_train, "random pairs, training split")
        ->default_val(params.random_pairs_train)
        ->check(CLI::Range(1, 100000));
    app.add_option("--random-test", params.random_pairs_test, "random pairs, test split")
        ->default_val(params.random_pairs_test)
        ->check(CLI::Range(1, 100000));
    CLI11_PARSE(app, argc, argv);

    try {
        const lexrel::SynthFiles files = lexrel::write_synthetic_world(params, out_dir);
        std::cout << files.corpus << '\n'
                  << files.task1_train << '\n'
                  << files.task1_test << '\n'
                  << files.task2_train << '\n'
                  << files.task2_test << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
