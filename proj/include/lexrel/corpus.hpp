#pragma once

// Corpus ingestion: streaming `lemma|POS` sentence parsing, vocabulary
// statistics, and windowed co-occurrence counting into a sparse matrix.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lexrel/errors.hpp"
#include "lexrel/tsv.hpp"

namespace lexrel {

struct Token {
    std::string lemma;
    std::string pos;
};

struct Sentence {
    std::vector<Token> tokens;
};

namespace detail {

inline bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

}  // namespace detail

// One corpus line -> one sentence. Tokens are whitespace-separated and split
// into lemma/POS on the LAST pipe, so lemmas may themselves contain pipes.
// Returns an empty sentence for blank lines; callers skip those.
inline Sentence parse_sentence_line(const std::string& line, std::size_t line_number) {
    Sentence sentence;
    std::size_t i = 0;
    const std::size_t n = line.size();
    while (i < n) {
        while (i < n && detail::is_space(line[i])) ++i;
        std::size_t j = i;
        while (j < n && !detail::is_space(line[j])) ++j;
        if (j > i) {
            const std::string token = line.substr(i, j - i);
            const std::size_t pipe = token.rfind('|');
            if (pipe == std::string::npos || pipe == 0 || pipe + 1 == token.size()) {
                throw format_error("line " + std::to_string(line_number) +
                                   ": malformed token '" + token + "' (expected lemma|POS)");
            }
            sentence.tokens.push_back(Token{token.substr(0, pipe), token.substr(pipe + 1)});
        }
        i = j;
    }
    return sentence;
}

// Streaming reader; blank lines are skipped, everything else must parse.
template <typename Fn>
void for_each_sentence(std::istream& in, Fn&& fn) {
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        Sentence sentence = parse_sentence_line(line, line_number);
        if (!sentence.tokens.empty()) fn(sentence);
    }
}

template <typename Fn>
void for_each_sentence_file(const std::string& path, Fn&& fn) {
    std::ifstream in = open_input(path);
    for_each_sentence(in, fn);
}

// Loads a whole corpus into memory. Fine for fixtures and toy corpora; the
// build pipeline streams with for_each_sentence_file instead.
inline std::vector<Sentence> parse_corpus(const std::string& path) {
    std::vector<Sentence> sentences;
    for_each_sentence_file(path, [&](Sentence& s) { sentences.push_back(std::move(s)); });
    return sentences;
}

struct VocabEntry {
    std::string lemma;
    std::uint64_t total_count = 0;
    // std::map keeps POS tags sorted; the argmax scan below therefore breaks
    // count ties by the lexicographically smallest tag.
    std::map<std::string, std::uint64_t> pos_counts;

    const std::string& top_pos() const {
        static const std::string empty;
        const std::string* best = &empty;
        std::uint64_t best_count = 0;
        for (const auto& [pos, count] : pos_counts) {
            if (count > best_count) {
                best_count = count;
                best = &pos;
            }
        }
        return *best;
    }
};

// Lemma -> dense id mapping with per-lemma frequency and POS statistics.
// Ids are assigned by descending total count, ties by lemma, so two builds
// over the same corpus agree byte for byte.
class Vocabulary {
 public:
    static constexpr std::uint32_t kNoId = std::numeric_limits<std::uint32_t>::max();

    Vocabulary() = default;
    explicit Vocabulary(std::vector<VocabEntry> entries, std::uint64_t min_count = 1)
        : entries_(std::move(entries)), min_count_(min_count) {
        index_.reserve(entries_.size());
        for (std::uint32_t id = 0; id < entries_.size(); ++id) {
            index_.emplace(entries_[id].lemma, id);
        }
    }

    std::uint32_t id_of(const std::string& lemma) const {
        const auto it = index_.find(lemma);
        return it == index_.end() ? kNoId : it->second;
    }
    bool contains(const std::string& lemma) const { return index_.count(lemma) != 0; }
    const VocabEntry& entry(std::uint32_t id) const { return entries_[id]; }
    std::size_t size() const { return entries_.size(); }
    std::uint64_t min_count() const { return min_count_; }

 private:
    std::vector<VocabEntry> entries_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::uint64_t min_count_ = 1;
};

namespace detail {

class VocabAccumulator {
 public:
    void add(const Sentence& sentence) {
        for (const Token& t : sentence.tokens) {
            auto& [total, pos_counts] = counts_[t.lemma];
            ++total;
            ++pos_counts[t.pos];
        }
    }

    Vocabulary finish(std::uint64_t min_count) {
        std::vector<VocabEntry> entries;
        for (auto& [lemma, stats] : counts_) {
            if (stats.first < min_count) continue;
            VocabEntry e;
            e.lemma = lemma;
            e.total_count = stats.first;
            e.pos_counts = std::move(stats.second);
            entries.push_back(std::move(e));
        }
        std::sort(entries.begin(), entries.end(), [](const VocabEntry& a, const VocabEntry& b) {
            if (a.total_count != b.total_count) return a.total_count > b.total_count;
            return a.lemma < b.lemma;
        });
        return Vocabulary(std::move(entries), min_count);
    }

 private:
    std::unordered_map<std::string, std::pair<std::uint64_t, std::map<std::string, std::uint64_t>>> counts_;
};

}  // namespace detail

inline Vocabulary build_vocabulary(const std::vector<Sentence>& sentences, std::uint64_t min_count) {
    detail::VocabAccumulator acc;
    for (const Sentence& s : sentences) acc.add(s);
    return acc.finish(min_count);
}

inline Vocabulary build_vocabulary_file(const std::string& path, std::uint64_t min_count) {
    detail::VocabAccumulator acc;
    for_each_sentence_file(path, [&](const Sentence& s) { acc.add(s); });
    return acc.finish(min_count);
}

// Sparse (target, context) -> count matrix with marginals. Rows are sorted by
// context id; row_marginals[w] always equals the sum of row w.
struct RawCounts {
    int window = 0;  // 0 means sentence scope
    std::vector<std::vector<std::pair<std::uint32_t, std::uint64_t>>> rows;
    std::vector<std::uint64_t> row_marginals;
    std::vector<std::uint64_t> col_marginals;
    std::uint64_t total = 0;

    std::uint64_t count(std::uint32_t target, std::uint32_t context) const {
        if (target >= rows.size()) return 0;
        const auto& row = rows[target];
        const auto it = std::lower_bound(
            row.begin(), row.end(), context,
            [](const std::pair<std::uint32_t, std::uint64_t>& cell, std::uint32_t id) {
                return cell.first < id;
            });
        if (it == row.end() || it->first != context) return 0;
        return it->second;
    }
};

namespace detail {

class CoocAccumulator {
 public:
    explicit CoocAccumulator(const Vocabulary& vocab, int window)
        : vocab_(vocab), window_(window), cells_(vocab.size()) {}

    void add(const Sentence& sentence) {
        ids_.clear();
        for (const Token& t : sentence.tokens) ids_.push_back(vocab_.id_of(t.lemma));
        const std::size_t n = ids_.size();
        // window_ == 0: the whole sentence is one window.
        const std::size_t w = window_ > 0 ? static_cast<std::size_t>(window_) : n;
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t target = ids_[i];
            if (target == Vocabulary::kNoId) continue;
            const std::size_t lo = i >= w ? i - w : 0;
            const std::size_t hi = std::min(n - 1, i + w);
            for (std::size_t j = lo; j <= hi; ++j) {
                if (j == i) continue;
                const std::uint32_t context = ids_[j];
                if (context == Vocabulary::kNoId) continue;
                ++cells_[target][context];
            }
        }
    }

    RawCounts finish() {
        RawCounts out;
        out.window = window_;
        const std::size_t v = vocab_.size();
        out.rows.resize(v);
        out.row_marginals.assign(v, 0);
        out.col_marginals.assign(v, 0);
        for (std::size_t target = 0; target < v; ++target) {
            auto& row = out.rows[target];
            row.assign(cells_[target].begin(), cells_[target].end());
            std::sort(row.begin(), row.end());
            for (const auto& [context, count] : row) {
                out.row_marginals[target] += count;
                out.col_marginals[context] += count;
                out.total += count;
            }
        }
        return out;
    }

 private:
    const Vocabulary& vocab_;
    int window_;
    std::vector<std::unordered_map<std::uint32_t, std::uint64_t>> cells_;
    std::vector<std::uint32_t> ids_;
};

}  // namespace detail

// Symmetric-window counting: token i co-occurs with every in-vocabulary token
// at distance <= window inside the same sentence. Out-of-vocabulary tokens are
// skipped both as targets and as contexts (they still occupy positions).
inline RawCounts count_cooccurrences(const std::vector<Sentence>& sentences,
                                     const Vocabulary& vocab, int window) {
    if (window < 1) throw std::invalid_argument("count_cooccurrences: window must be >= 1");
    detail::CoocAccumulator acc(vocab, window);
    for (const Sentence& s : sentences) acc.add(s);
    return acc.finish();
}

inline RawCounts count_cooccurrences_file(const std::string& path, const Vocabulary& vocab,
                                          int window) {
    if (window < 1) throw std::invalid_argument("count_cooccurrences: window must be >= 1");
    detail::CoocAccumulator acc(vocab, window);
    for_each_sentence_file(path, [&](const Sentence& s) { acc.add(s); });
    return acc.finish();
}

// Whole-sentence scope: every ordered pair of distinct in-vocabulary positions
// counts once. Used for the sentence-level co-occurrence feature variant.
inline RawCounts count_sentence_cooccurrences(const std::vector<Sentence>& sentences,
                                              const Vocabulary& vocab) {
    detail::CoocAccumulator acc(vocab, 0);
    for (const Sentence& s : sentences) acc.add(s);
    return acc.finish();
}

inline RawCounts count_sentence_cooccurrences_file(const std::string& path,
                                                   const Vocabulary& vocab) {
    detail::CoocAccumulator acc(vocab, 0);
    for_each_sentence_file(path, [&](const Sentence& s) { acc.add(s); });
    return acc.finish();
}

// ---- persistence ----

// lemma<TAB>id<TAB>total_count<TAB>pos:count,pos:count,... in id order.
inline std::string vocabulary_to_tsv(const Vocabulary& vocab) {
    std::ostringstream out;
    for (std::uint32_t id = 0; id < vocab.size(); ++id) {
        const VocabEntry& e = vocab.entry(id);
        out << e.lemma << '\t' << id << '\t' << e.total_count << '\t';
        bool first = true;
        for (const auto& [pos, count] : e.pos_counts) {
            if (!first) out << ',';
            out << pos << ':' << count;
            first = false;
        }
        out << '\n';
    }
    return out.str();
}

inline void save_vocabulary(const Vocabulary& vocab, const std::string& path) {
    atomic_write(path, vocabulary_to_tsv(vocab));
}

inline Vocabulary load_vocabulary(const std::string& path) {
    std::ifstream in = open_input(path);
    std::vector<VocabEntry> entries;
    std::string line;
    std::size_t line_number = 0;
    std::uint64_t min_count = std::numeric_limits<std::uint64_t>::max();
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const std::string context = path + ":" + std::to_string(line_number);
        const std::vector<std::string> cols = split_tabs(line);
        if (cols.size() != 4) throw format_error(context + ": expected 4 columns, got " + std::to_string(cols.size()));
        VocabEntry e;
        e.lemma = cols[0];
        const std::uint64_t id = parse_u64(cols[1], context);
        if (id != entries.size()) throw format_error(context + ": ids must be dense and in order");
        e.total_count = parse_u64(cols[2], context);
        std::uint64_t pos_total = 0;
        std::istringstream pos_field(cols[3]);
        std::string item;
        while (std::getline(pos_field, item, ',')) {
            const std::size_t colon = item.rfind(':');
            if (colon == std::string::npos || colon == 0) {
                throw format_error(context + ": malformed pos:count item '" + item + "'");
            }
            const std::uint64_t count = parse_u64(item.substr(colon + 1), context);
            e.pos_counts[item.substr(0, colon)] = count;
            pos_total += count;
        }
        if (pos_total != e.total_count) {
            throw format_error(context + ": pos counts sum to " + std::to_string(pos_total) +
                               " but total_count is " + std::to_string(e.total_count));
        }
        min_count = std::min(min_count, e.total_count);
        entries.push_back(std::move(e));
    }
    if (entries.empty()) return Vocabulary({}, 1);
    return Vocabulary(std::move(entries), min_count);
}

// Plain key=value sidecar shared by counts and weighted-space files.
struct SpaceMeta {
    int window = 0;
    std::uint64_t total = 0;
    std::uint64_t vocab_size = 0;
    std::uint64_t min_count = 1;
    std::string cooc_scope = "window";
    std::string targets = "lemma";
    std::string contexts = "lemma";
    std::string weighting;  // empty for raw counts, "ppmi" once weighted
};

inline std::string meta_to_string(const SpaceMeta& meta) {
    std::ostringstream out;
    out << "window=" << meta.window << '\n'
        << "total=" << meta.total << '\n'
        << "vocab_size=" << meta.vocab_size << '\n'
        << "min_count=" << meta.min_count << '\n'
        << "cooc_scope=" << meta.cooc_scope << '\n'
        << "targets=" << meta.targets << '\n'
        << "contexts=" << meta.contexts << '\n';
    if (!meta.weighting.empty()) out << "weighting=" << meta.weighting << '\n';
    return out.str();
}

inline void save_meta(const SpaceMeta& meta, const std::string& path) {
    atomic_write(path, meta_to_string(meta));
}

inline SpaceMeta load_meta(const std::string& path) {
    std::ifstream in = open_input(path);
    SpaceMeta meta;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        const std::string context = path + ":" + std::to_string(line_number);
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw format_error(context + ": expected key=value");
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "window") meta.window = static_cast<int>(parse_u64(value, context));
        else if (key == "total") meta.total = parse_u64(value, context);
        else if (key == "vocab_size") meta.vocab_size = parse_u64(value, context);
        else if (key == "min_count") meta.min_count = parse_u64(value, context);
        else if (key == "cooc_scope") meta.cooc_scope = value;
        else if (key == "targets") meta.targets = value;
        else if (key == "contexts") meta.contexts = value;
        else if (key == "weighting") meta.weighting = value;
        else throw format_error(context + ": unknown key '" + key + "'");
    }
    return meta;
}

// target_id<TAB>context_id<TAB>count, rows ascending by (target, context).
inline std::string counts_to_tsv(const RawCounts& counts) {
    std::ostringstream out;
    for (std::uint32_t target = 0; target < counts.rows.size(); ++target) {
        for (const auto& [context, count] : counts.rows[target]) {
            out << target << '\t' << context << '\t' << count << '\n';
        }
    }
    return out.str();
}

inline void save_counts(const RawCounts& counts, const std::string& path) {
    atomic_write(path, counts_to_tsv(counts));
}

inline RawCounts load_counts(const std::string& path, const SpaceMeta& meta) {
    std::ifstream in = open_input(path);
    RawCounts counts;
    counts.window = meta.cooc_scope == "sentence" ? 0 : meta.window;
    counts.rows.resize(meta.vocab_size);
    counts.row_marginals.assign(meta.vocab_size, 0);
    counts.col_marginals.assign(meta.vocab_size, 0);
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
        const std::uint64_t count = parse_u64(cols[2], context_str);
        if (target >= meta.vocab_size || context >= meta.vocab_size) {
            throw format_error(context_str + ": id outside vocabulary of size " + std::to_string(meta.vocab_size));
        }
        auto& row = counts.rows[static_cast<std::size_t>(target)];
        if (!row.empty() && row.back().first >= context) {
            throw format_error(context_str + ": rows must be sorted by (target, context)");
        }
        row.emplace_back(static_cast<std::uint32_t>(context), count);
        counts.row_marginals[static_cast<std::size_t>(target)] += count;
        counts.col_marginals[static_cast<std::size_t>(context)] += count;
        counts.total += count;
    }
    if (counts.total != meta.total) {
        throw format_error(path + ": counts sum to " + std::to_string(counts.total) +
                           " but metadata says total=" + std::to_string(meta.total));
    }
    return counts;
}

}  // namespace lexrel
