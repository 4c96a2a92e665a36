#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ragaudit/corpus.hpp"

namespace ragaudit {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
    // Field multipliers applied to term counts and document length, i.e.
    // fractional token duplication.
    double title_weight = 2.0;
    double mesh_weight = 1.5;
    double abstract_weight = 1.0;

    bool operator==(const Bm25Params&) const = default;
};

/// A corpus article with its relevance to one query. `article` points into
/// the Corpus the index was built over.
struct ScoredArticle {
    const Article* article = nullptr;
    double bm25_score = 0.0;
};

struct Posting {
    std::uint32_t doc = 0;
    double tf = 0.0;  // field-weighted term count

    bool operator==(const Posting&) const = default;
};

/// Collection-level statistics a score depends on. Snapshotting them lets a
/// caller score documents against a frozen view of the collection.
struct CollectionStats {
    std::size_t doc_count = 0;
    double avg_length = 0.0;
    std::map<std::string, std::size_t, std::less<>> document_frequency;
};

/// Okapi BM25 over title, abstract and MeSH headings. Immutable after build;
/// concurrent queries are safe. The corpus must outlive the index.
class Index {
public:
    /// Throws ValidationError on an empty corpus.
    static Index build(const Corpus& corpus, Bm25Params params = {});

    /// Reads a cache written by write(); throws ParseError when it does not
    /// describe `corpus`.
    static Index read(std::istream& in, const Corpus& corpus);
    static Index load(const std::filesystem::path& path, const Corpus& corpus);

    void write(std::ostream& out) const;
    void save(const std::filesystem::path& path) const;

    /// At most k results with score > 0, ordered by score desc then id asc.
    std::vector<ScoredArticle> query(std::string_view text, std::size_t k,
                                     const std::unordered_set<std::string>& exclude = {}) const;

    /// BM25 of one document for the given (deduplicated) terms under `stats`.
    double score(std::size_t doc, std::span<const std::string> terms,
                 const CollectionStats& stats) const;

    CollectionStats stats() const;
    std::span<const Posting> postings(std::string_view term) const;
    double idf(std::string_view term) const;

    std::size_t document_count() const noexcept { return doc_lengths_.size(); }
    double document_length(std::size_t doc) const { return doc_lengths_.at(doc); }
    double average_length() const noexcept { return avg_length_; }
    const Bm25Params& params() const noexcept { return params_; }
    const Corpus& corpus() const noexcept { return *corpus_; }

    bool operator==(const Index& other) const;

private:
    Index() = default;

    double term_weight(double tf, double doc_length, double avg_length) const;

    const Corpus* corpus_ = nullptr;
    Bm25Params params_;
    std::vector<double> doc_lengths_;
    double avg_length_ = 0.0;
    std::map<std::string, std::vector<Posting>, std::less<>> postings_;
};

/// Robertson-Sparck Jones IDF with the +1 inside the log, non-negative for any df.
double bm25_idf(std::size_t doc_count, std::size_t document_frequency);

}  // namespace ragaudit
