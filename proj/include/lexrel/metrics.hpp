#pragma once

// Pair-file loading, the two evaluation protocols (related-vs-random and
// 5-way relation labeling), and report rendering.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lexrel/errors.hpp"
#include "lexrel/features.hpp"
#include "lexrel/tsv.hpp"

namespace lexrel {

enum class Task { task1, task2 };

inline std::string task_name(Task t) { return t == Task::task1 ? "task1" : "task2"; }

inline Task task_from_name(const std::string& name) {
    if (name == "task1") return Task::task1;
    if (name == "task2") return Task::task2;
    throw format_error("unknown task '" + name + "' (expected task1 or task2)");
}

// Display order of each task's tag set; task 2 follows the conventional
// relation-table order with RANDOM last.
inline const std::vector<std::string>& task_labels(Task t) {
    static const std::vector<std::string> task1 = {"TRUE", "FALSE"};
    static const std::vector<std::string> task2 = {"SYN", "ANT", "HYPER", "PART_OF", "RANDOM"};
    return t == Task::task1 ? task1 : task2;
}

inline int label_index(Task t, const std::string& label) {
    const std::vector<std::string>& labels = task_labels(t);
    for (std::size_t k = 0; k < labels.size(); ++k) {
        if (labels[k] == label) return static_cast<int>(k);
    }
    return -1;
}

struct Dataset {
    Task task = Task::task1;
    std::vector<WordPair> pairs;
};

// Loads a 3-column w1<TAB>w2<TAB>label file and validates tags against the
// task. Duplicate (w1, w2) pairs are kept but reported to `warnings`.
inline Dataset load_pairs(const std::string& path, Task task, std::ostream* warnings = nullptr) {
    std::ifstream in = open_input(path);
    Dataset dataset;
    dataset.task = task;
    std::set<std::pair<std::string, std::string>> seen;
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
        if (cols[0].empty() || cols[1].empty()) {
            throw format_error(context + ": empty word in pair");
        }
        if (label_index(task, cols[2]) < 0) {
            throw format_error(context + ": unknown " + task_name(task) + " tag '" + cols[2] + "'");
        }
        if (!seen.emplace(cols[0], cols[1]).second && warnings) {
            *warnings << "warning: " << context << ": duplicate pair " << cols[0] << "/" << cols[1]
                      << " (kept)\n";
        }
        dataset.pairs.push_back(WordPair{cols[0], cols[1], cols[2]});
    }
    return dataset;
}

// Pairs occurring in both files, in `a` order; used by the train/test
// lexical-split check.
inline std::vector<std::pair<std::string, std::string>> shared_pairs(const Dataset& a,
                                                                     const Dataset& b) {
    std::set<std::pair<std::string, std::string>> in_b;
    for (const WordPair& p : b.pairs) in_b.emplace(p.w1, p.w2);
    std::vector<std::pair<std::string, std::string>> out;
    std::set<std::pair<std::string, std::string>> emitted;
    for (const WordPair& p : a.pairs) {
        const auto key = std::make_pair(p.w1, p.w2);
        if (in_b.count(key) && emitted.insert(key).second) out.push_back(key);
    }
    return out;
}

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::uint64_t support = 0;
};

struct EvaluationReport {
    Task task = Task::task1;
    std::vector<std::string> labels;  // display order
    std::vector<std::vector<std::uint64_t>> confusion;  // [gold][predicted]
    std::vector<ClassMetrics> per_class;
    // Canonical summary: task 1 = the TRUE class; task 2 = support-weighted
    // average over the four non-RANDOM relations.
    ClassMetrics overall;
    ClassMetrics macro;  // task 2 only: unweighted mean over the four relations
    double accuracy = 0.0;
};

namespace detail {

inline ClassMetrics metrics_from(std::uint64_t tp, std::uint64_t fp, std::uint64_t fn,
                                 std::uint64_t support) {
    ClassMetrics m;
    m.support = support;
    m.precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    m.recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    m.f1 = m.precision + m.recall == 0.0 ? 0.0
                                         : 2.0 * m.precision * m.recall / (m.precision + m.recall);
    return m;
}

}  // namespace detail

inline EvaluationReport score(const std::vector<std::string>& predictions, const Dataset& gold) {
    if (predictions.size() != gold.pairs.size()) {
        throw std::invalid_argument("score: " + std::to_string(predictions.size()) +
                                    " predictions for " + std::to_string(gold.pairs.size()) +
                                    " gold pairs");
    }
    EvaluationReport report;
    report.task = gold.task;
    report.labels = task_labels(gold.task);
    const std::size_t k = report.labels.size();
    report.confusion.assign(k, std::vector<std::uint64_t>(k, 0));
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const int g = label_index(gold.task, gold.pairs[i].label);
        const int p = label_index(gold.task, predictions[i]);
        if (g < 0) throw format_error("gold row " + std::to_string(i + 1) + ": unknown tag '" + gold.pairs[i].label + "'");
        if (p < 0) throw format_error("prediction row " + std::to_string(i + 1) + ": unknown tag '" + predictions[i] + "'");
        ++report.confusion[static_cast<std::size_t>(g)][static_cast<std::size_t>(p)];
    }

    std::uint64_t diagonal = 0;
    for (std::size_t c = 0; c < k; ++c) {
        std::uint64_t tp = report.confusion[c][c];
        std::uint64_t fp = 0, fn = 0, support = 0;
        for (std::size_t other = 0; other < k; ++other) {
            support += report.confusion[c][other];
            if (other != c) {
                fn += report.confusion[c][other];
                fp += report.confusion[other][c];
            }
        }
        report.per_class.push_back(detail::metrics_from(tp, fp, fn, support));
        diagonal += tp;
    }
    const std::uint64_t total = predictions.size();
    report.accuracy = total == 0 ? 0.0 : static_cast<double>(diagonal) / static_cast<double>(total);

    if (gold.task == Task::task1) {
        report.overall = report.per_class[0];  // the TRUE class
        report.macro = report.overall;
    } else {
        // The four relation classes; RANDOM is a distractor and excluded.
        std::uint64_t weight_total = 0;
        for (std::size_t c = 0; c + 1 < k; ++c) weight_total += report.per_class[c].support;
        ClassMetrics weighted, macro;
        for (std::size_t c = 0; c + 1 < k; ++c) {
            const ClassMetrics& m = report.per_class[c];
            const double w = weight_total == 0
                                 ? 0.0
                                 : static_cast<double>(m.support) / static_cast<double>(weight_total);
            weighted.precision += w * m.precision;
            weighted.recall += w * m.recall;
            weighted.f1 += w * m.f1;
            macro.precision += m.precision / static_cast<double>(k - 1);
            macro.recall += m.recall / static_cast<double>(k - 1);
            macro.f1 += m.f1 / static_cast<double>(k - 1);
        }
        weighted.support = weight_total;
        macro.support = weight_total;
        report.overall = weighted;
        report.macro = macro;
    }
    return report;
}

// ---- rendering ----

inline std::string render_report(const EvaluationReport& report) {
    std::ostringstream out;
    out << std::fixed << std::setprecision(3);
    const std::size_t k = report.labels.size();

    std::size_t label_width = 8;
    for (const std::string& l : report.labels) label_width = std::max(label_width, l.size() + 2);

    out << (report.task == Task::task1 ? "Subtask 1 (related vs random)"
                                       : "Subtask 2 (relation labeling)")
        << "\n\n";
    out << std::left << std::setw(static_cast<int>(label_width)) << "Class" << std::right
        << std::setw(10) << "Precision" << std::setw(10) << "Recall" << std::setw(10) << "F1"
        << std::setw(10) << "Support" << '\n';
    for (std::size_t c = 0; c < k; ++c) {
        const ClassMetrics& m = report.per_class[c];
        out << std::left << std::setw(static_cast<int>(label_width)) << report.labels[c]
            << std::right << std::setw(10) << m.precision << std::setw(10) << m.recall
            << std::setw(10) << m.f1 << std::setw(10) << m.support << '\n';
    }
    out << '\n';
    if (report.task == Task::task1) {
        out << "Overall (positive class TRUE): P " << report.overall.precision << "  R "
            << report.overall.recall << "  F1 " << report.overall.f1 << '\n';
    } else {
        out << "Overall weighted (SYN/ANT/HYPER/PART_OF): P " << report.overall.precision << "  R "
            << report.overall.recall << "  F1 " << report.overall.f1 << '\n';
        out << "Overall macro    (SYN/ANT/HYPER/PART_OF): P " << report.macro.precision << "  R "
            << report.macro.recall << "  F1 " << report.macro.f1 << '\n';
    }
    out << "Accuracy: " << report.accuracy << '\n';

    out << "\nConfusion matrix (rows: gold, columns: predicted)\n";
    std::size_t cell = 7;
    for (const std::string& l : report.labels) cell = std::max(cell, l.size() + 2);
    out << std::left << std::setw(static_cast<int>(label_width)) << "";
    for (const std::string& l : report.labels) {
        out << std::right << std::setw(static_cast<int>(cell)) << l;
    }
    out << '\n';
    for (std::size_t g = 0; g < k; ++g) {
        out << std::left << std::setw(static_cast<int>(label_width)) << report.labels[g];
        for (std::size_t p = 0; p < k; ++p) {
            out << std::right << std::setw(static_cast<int>(cell)) << report.confusion[g][p];
        }
        out << '\n';
    }
    return out.str();
}

// Machine-readable report: a per-class metric table and the confusion matrix
// as two #-headed TSV sections.
inline std::string report_to_tsv(const EvaluationReport& report) {
    std::ostringstream out;
    const std::size_t k = report.labels.size();
    out << "# per-class metrics (" << task_name(report.task) << ")\n";
    out << "class\tprecision\trecall\tf1\tsupport\n";
    for (std::size_t c = 0; c < k; ++c) {
        const ClassMetrics& m = report.per_class[c];
        out << report.labels[c] << '\t' << format_fixed6(m.precision) << '\t'
            << format_fixed6(m.recall) << '\t' << format_fixed6(m.f1) << '\t' << m.support << '\n';
    }
    const char* overall_name = report.task == Task::task1 ? "OVERALL_TRUE" : "OVERALL_WEIGHTED";
    out << overall_name << '\t' << format_fixed6(report.overall.precision) << '\t'
        << format_fixed6(report.overall.recall) << '\t' << format_fixed6(report.overall.f1) << '\t'
        << report.overall.support << '\n';
    if (report.task == Task::task2) {
        out << "OVERALL_MACRO\t" << format_fixed6(report.macro.precision) << '\t'
            << format_fixed6(report.macro.recall) << '\t' << format_fixed6(report.macro.f1) << '\t'
            << report.macro.support << '\n';
    }
    std::uint64_t total_support = 0;
    for (const ClassMetrics& m : report.per_class) total_support += m.support;
    out << "ACCURACY\t" << format_fixed6(report.accuracy) << '\t' << format_fixed6(report.accuracy)
        << '\t' << format_fixed6(report.accuracy) << '\t' << total_support << '\n';
    out << "\n# confusion matrix (rows gold, columns predicted)\n";
    out << "gold";
    for (const std::string& l : report.labels) out << '\t' << l;
    out << '\n';
    for (std::size_t g = 0; g < k; ++g) {
        out << report.labels[g];
        for (std::size_t p = 0; p < k; ++p) out << '\t' << report.confusion[g][p];
        out << '\n';
    }
    return out.str();
}

}  // namespace lexrel
