#pragma once

// Synthetic corpus + pair-file generator with planted relation populations.
// Each relation type gets the distributional footprint that motivates its
// features: synonyms share context profiles, hypernyms broaden and outnumber
// their hyponyms, antonyms share a context tail but not their top contexts
// while co-occurring directly, meronyms co-occur across topic boundaries, and
// random pairs live in unrelated topics (usually with different POS). Train
// and test pair words are disjoint; the context inventory is shared.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "lexrel/rng.hpp"
#include "lexrel/tsv.hpp"

namespace lexrel {

struct SynthParams {
    std::uint64_t seed = 7;
    int topics = 8;
    int contexts_per_topic = 40;
    int pairs_per_relation_train = 130;
    int pairs_per_relation_test = 50;
    int random_pairs_train = 200;
    int random_pairs_test = 80;
    int base_sentences = 30;   // sentences per ordinary planted word
    int hyper_factor = 5;      // hypernym frequency multiplier
    int cooc_sentences = 12;   // direct co-occurrence sentences (ANT, PART_OF)
};

struct SynthFiles {
    std::string corpus;
    std::string task1_train;
    std::string task1_test;
    std::string task2_train;
    std::string task2_test;
};

namespace detail {

class WorldBuilder {
 public:
    WorldBuilder(const SynthParams& params) : params_(params), rng_(params.seed) {
        contexts_.resize(static_cast<std::size_t>(params_.topics));
        for (int t = 0; t < params_.topics; ++t) {
            for (int j = 0; j < params_.contexts_per_topic; ++j) {
                contexts_[static_cast<std::size_t>(t)].push_back(
                    "c" + std::to_string(t) + "x" + std::to_string(j));
            }
        }
    }

    // A context pool with per-context sampling weights.
    struct Profile {
        std::vector<std::string> pool;
        std::vector<double> cumulative;  // running weight sums for sampling
    };

    Profile make_profile(const std::vector<std::string>& pool, const std::vector<double>& weights) {
        Profile p;
        p.pool = pool;
        p.cumulative.resize(weights.size());
        std::partial_sum(weights.begin(), weights.end(), p.cumulative.begin());
        return p;
    }

    const std::string& sample_context(const Profile& profile) {
        const double u = rng_.uniform() * profile.cumulative.back();
        const auto it = std::upper_bound(profile.cumulative.begin(), profile.cumulative.end(), u);
        const std::size_t idx = std::min<std::size_t>(
            static_cast<std::size_t>(it - profile.cumulative.begin()), profile.pool.size() - 1);
        return profile.pool[idx];
    }

    // n_sentences lines of the form `c1 c2 w c3 c4`; window-2 counting sees
    // the word with all four contexts.
    void emit_word_sentences(const std::string& word, const std::string& pos,
                             const Profile& profile, int n_sentences) {
        for (int s = 0; s < n_sentences; ++s) {
            std::ostringstream line;
            line << sample_context(profile) << "|NN " << sample_context(profile) << "|NN " << word
                 << '|' << pos << ' ' << sample_context(profile) << "|NN "
                 << sample_context(profile) << "|NN";
            sentences_.push_back(line.str());
        }
    }

    void emit_cooc_sentences(const std::string& w1, const std::string& pos1, const std::string& w2,
                             const std::string& pos2, const Profile& middle, int n_sentences) {
        for (int s = 0; s < n_sentences; ++s) {
            sentences_.push_back(w1 + "|" + pos1 + " " + sample_context(middle) + "|NN " + w2 +
                                 "|" + pos2);
        }
    }

    void add_syn_pair(int i, const std::string& suffix, std::vector<std::string>& out) {
        const int topic = next_topic();
        std::vector<double> weights = skewed_weights(params_.contexts_per_topic);
        const Profile profile = make_profile(contexts_[static_cast<std::size_t>(topic)], weights);
        const std::string a = "syn" + std::to_string(i) + "a_" + suffix;
        const std::string b = "syn" + std::to_string(i) + "b_" + suffix;
        emit_word_sentences(a, "NN", profile, jittered(params_.base_sentences));
        emit_word_sentences(b, "NN", profile, jittered(params_.base_sentences));
        out.push_back(a + "\t" + b + "\tSYN");
    }

    void add_hyper_pair(int i, const std::string& suffix, std::vector<std::string>& out) {
        const int topic = next_topic();
        const auto& topic_ctx = contexts_[static_cast<std::size_t>(topic)];
        const auto& extra_ctx =
            contexts_[static_cast<std::size_t>((topic + 1) % params_.topics)];

        // Hyponym: a narrow, peaked slice of the topic.
        const int narrow = 10;
        const int start =
            static_cast<int>(rng_.below(static_cast<std::uint64_t>(params_.contexts_per_topic - narrow)));
        std::vector<std::string> narrow_pool(topic_ctx.begin() + start,
                                             topic_ctx.begin() + start + narrow);
        std::vector<double> narrow_weights(static_cast<std::size_t>(narrow));
        for (int j = 0; j < narrow; ++j) {
            narrow_weights[static_cast<std::size_t>(j)] = 1.0 / (1.0 + j);
        }
        const Profile hypo_profile = make_profile(narrow_pool, narrow_weights);

        // Hypernym: the whole topic plus a sprinkle of a neighbor topic.
        std::vector<std::string> broad_pool = topic_ctx;
        std::vector<double> broad_weights(topic_ctx.size());
        for (double& w : broad_weights) w = rng_.uniform(0.5, 1.0);
        for (std::size_t j = 0; j < extra_ctx.size(); j += 2) {
            broad_pool.push_back(extra_ctx[j]);
            broad_weights.push_back(0.25);
        }
        const Profile hyper_profile = make_profile(broad_pool, broad_weights);

        const std::string hypo = "hypo" + std::to_string(i) + "_" + suffix;
        const std::string hyper = "hyper" + std::to_string(i) + "_" + suffix;
        emit_word_sentences(hypo, "NN", hypo_profile, jittered(params_.base_sentences / 2));
        emit_word_sentences(hyper, "NN", hyper_profile,
                            jittered(params_.base_sentences * params_.hyper_factor));
        out.push_back(hypo + "\t" + hyper + "\tHYPER");
    }

    void add_ant_pair(int i, const std::string& suffix, std::vector<std::string>& out) {
        const int topic = next_topic();
        const auto& topic_ctx = contexts_[static_cast<std::size_t>(topic)];
        const int top = 10;
        // Two disjoint top-context blocks plus a shared tail.
        std::vector<std::string> pool_a(topic_ctx.begin(), topic_ctx.begin() + top);
        std::vector<std::string> pool_b(topic_ctx.begin() + top, topic_ctx.begin() + 2 * top);
        std::vector<std::string> tail(topic_ctx.begin() + 2 * top, topic_ctx.end());
        auto with_tail = [&](std::vector<std::string> own) {
            std::vector<double> weights(own.size(), 3.0);
            own.insert(own.end(), tail.begin(), tail.end());
            weights.insert(weights.end(), tail.size(), 0.35);
            return make_profile(own, weights);
        };
        const Profile profile_a = with_tail(pool_a);
        const Profile profile_b = with_tail(pool_b);
        const Profile tail_only = make_profile(tail, std::vector<double>(tail.size(), 1.0));

        const std::string a = "ant" + std::to_string(i) + "a_" + suffix;
        const std::string b = "ant" + std::to_string(i) + "b_" + suffix;
        emit_word_sentences(a, "JJ", profile_a, jittered(params_.base_sentences));
        emit_word_sentences(b, "JJ", profile_b, jittered(params_.base_sentences));
        emit_cooc_sentences(a, "JJ", b, "JJ", tail_only, params_.cooc_sentences);
        out.push_back(a + "\t" + b + "\tANT");
    }

    void add_part_pair(int i, const std::string& suffix, std::vector<std::string>& out) {
        const int whole_topic = next_topic();
        const int part_topic = (whole_topic + params_.topics / 2) % params_.topics;
        const Profile whole_profile = uniformish_profile(whole_topic);
        const Profile part_profile = skewed_profile(part_topic);
        const std::string part = "part" + std::to_string(i) + "_" + suffix;
        const std::string whole = "whole" + std::to_string(i) + "_" + suffix;
        emit_word_sentences(part, "NN", part_profile, jittered(params_.base_sentences));
        emit_word_sentences(whole, "NN", whole_profile, jittered(params_.base_sentences));
        emit_cooc_sentences(part, "NN", whole, "NN", uniformish_profile(whole_topic),
                            params_.cooc_sentences);
        out.push_back(part + "\t" + whole + "\tPART_OF");
    }

    void add_random_pair(int i, const std::string& suffix, std::vector<std::string>& out) {
        const int topic1 = static_cast<int>(rng_.below(static_cast<std::uint64_t>(params_.topics)));
        int topic2 = static_cast<int>(rng_.below(static_cast<std::uint64_t>(params_.topics)));
        if (topic2 == topic1) topic2 = (topic1 + 1 + params_.topics / 2) % params_.topics;
        const std::string a = "rnd" + std::to_string(i) + "a_" + suffix;
        const std::string b = "rnd" + std::to_string(i) + "b_" + suffix;
        const std::string pos2 = rng_.uniform() < 0.7 ? "VV" : "NN";
        emit_word_sentences(a, "NN", skewed_profile(topic1), jittered(params_.base_sentences));
        emit_word_sentences(b, pos2, skewed_profile(topic2), jittered(params_.base_sentences));
        out.push_back(a + "\t" + b + "\tRANDOM");
    }

    void build_split(const std::string& suffix, int pairs_per_relation, int random_pairs,
                     std::vector<std::string>& task2_rows) {
        for (int i = 0; i < pairs_per_relation; ++i) add_syn_pair(i, suffix, task2_rows);
        for (int i = 0; i < pairs_per_relation; ++i) add_ant_pair(i, suffix, task2_rows);
        for (int i = 0; i < pairs_per_relation; ++i) add_hyper_pair(i, suffix, task2_rows);
        for (int i = 0; i < pairs_per_relation; ++i) add_part_pair(i, suffix, task2_rows);
        for (int i = 0; i < random_pairs; ++i) add_random_pair(i, suffix, task2_rows);
    }

    const std::vector<std::string>& sentences() const { return sentences_; }

 private:
    int next_topic() { return topic_cursor_++ % params_.topics; }

    int jittered(int base) { return base + static_cast<int>(rng_.below(8)); }

    std::vector<double> skewed_weights(int n) {
        std::vector<double> weights(static_cast<std::size_t>(n));
        for (double& w : weights) {
            const double u = rng_.uniform(0.1, 1.0);
            w = u * u;
        }
        return weights;
    }

    Profile skewed_profile(int topic) {
        return make_profile(contexts_[static_cast<std::size_t>(topic)],
                            skewed_weights(params_.contexts_per_topic));
    }

    Profile uniformish_profile(int topic) {
        std::vector<double> weights(static_cast<std::size_t>(params_.contexts_per_topic));
        for (double& w : weights) w = rng_.uniform(0.6, 1.0);
        return make_profile(contexts_[static_cast<std::size_t>(topic)], weights);
    }

    SynthParams params_;
    SplitMix64 rng_;
    std::vector<std::vector<std::string>> contexts_;
    std::vector<std::string> sentences_;
    int topic_cursor_ = 0;
};

inline std::string task1_rows_from(const std::vector<std::string>& task2_rows) {
    std::ostringstream out;
    for (const std::string& row : task2_rows) {
        const std::size_t tab = row.rfind('\t');
        const std::string relation = row.substr(tab + 1);
        out << row.substr(0, tab) << '\t' << (relation == "RANDOM" ? "FALSE" : "TRUE") << '\n';
    }
    return out.str();
}

}  // namespace detail

inline SynthFiles write_synthetic_world(const SynthParams& params, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    detail::WorldBuilder builder(params);
    std::vector<std::string> train_rows, test_rows;
    builder.build_split("tr", params.pairs_per_relation_train, params.random_pairs_train,
                        train_rows);
    builder.build_split("te", params.pairs_per_relation_test, params.random_pairs_test, test_rows);

    SynthFiles files;
    files.corpus = out_dir + "/corpus.txt";
    files.task1_train = out_dir + "/task1_train.tsv";
    files.task1_test = out_dir + "/task1_test.tsv";
    files.task2_train = out_dir + "/task2_train.tsv";
    files.task2_test = out_dir + "/task2_test.tsv";

    std::ostringstream corpus;
    for (const std::string& line : builder.sentences()) corpus << line << '\n';
    atomic_write(files.corpus, corpus.str());

    std::ostringstream t2train, t2test;
    for (const std::string& row : train_rows) t2train << row << '\n';
    for (const std::string& row : test_rows) t2test << row << '\n';
    atomic_write(files.task2_train, t2train.str());
    atomic_write(files.task2_test, t2test.str());
    atomic_write(files.task1_train, detail::task1_rows_from(train_rows));
    atomic_write(files.task1_test, detail::task1_rows_from(test_rows));
    return files;
}

}  // namespace lexrel
