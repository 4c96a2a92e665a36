#include "ragaudit/retrieval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "ragaudit/error.hpp"
#include "ragaudit/text.hpp"

namespace ragaudit {

namespace {

constexpr std::string_view kCacheMagic = "ragaudit-bm25-index";
constexpr int kCacheVersion = 1;

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

double parse_double(std::string_view text, std::size_t line) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw ParseError("<index>", line, "bad number '" + std::string(text) + "'");
    }
    return value;
}

std::vector<std::string> unique_terms(std::string_view text) {
    auto terms = tokenize(text);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    return terms;
}

}  // namespace

double bm25_idf(std::size_t doc_count, std::size_t document_frequency) {
    auto n = static_cast<double>(doc_count);
    auto df = static_cast<double>(document_frequency);
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

Index Index::build(const Corpus& corpus, Bm25Params params) {
    if (corpus.empty()) {
        throw ValidationError("cannot index an empty corpus");
    }
    Index index;
    index.corpus_ = &corpus;
    index.params_ = params;
    index.doc_lengths_.reserve(corpus.size());

    double total_length = 0.0;
    for (std::size_t doc = 0; doc < corpus.size(); ++doc) {
        const auto& article = corpus.at(doc);
        std::unordered_map<std::string, double> tf;
        double length = 0.0;
        auto add_field = [&](std::string_view text, double weight) {
            for (auto& token : tokenize(text)) {
                tf[std::move(token)] += weight;
                length += weight;
            }
        };
        add_field(article.title, params.title_weight);
        add_field(article.abstract, params.abstract_weight);
        for (const auto& heading : article.mesh_headings) {
            add_field(heading, params.mesh_weight);
        }
        index.doc_lengths_.push_back(length);
        total_length += length;
        for (auto& [term, count] : tf) {
            index.postings_[term].push_back({static_cast<std::uint32_t>(doc), count});
        }
    }
    index.avg_length_ = total_length / static_cast<double>(corpus.size());
    return index;
}

double Index::term_weight(double tf, double doc_length, double avg_length) const {
    double norm = avg_length > 0.0 ? doc_length / avg_length : 0.0;
    return tf * (params_.k1 + 1.0) / (tf + params_.k1 * (1.0 - params_.b + params_.b * norm));
}

std::vector<ScoredArticle> Index::query(std::string_view text, std::size_t k,
                                        const std::unordered_set<std::string>& exclude) const {
    std::vector<ScoredArticle> results;
    if (k == 0) {
        return results;
    }
    std::unordered_map<std::uint32_t, double> accum;
    const auto n = document_count();
    for (const auto& term : unique_terms(text)) {
        auto it = postings_.find(term);
        if (it == postings_.end()) {
            continue;
        }
        double w = bm25_idf(n, it->second.size());
        for (const auto& posting : it->second) {
            accum[posting.doc] += w * term_weight(posting.tf, doc_lengths_[posting.doc], avg_length_);
        }
    }
    results.reserve(accum.size());
    for (const auto& [doc, score] : accum) {
        const Article& article = corpus_->at(doc);
        if (score > 0.0 && !exclude.contains(article.id)) {
            results.push_back({&article, score});
        }
    }
    auto before = [](const ScoredArticle& a, const ScoredArticle& b) {
        if (a.bm25_score != b.bm25_score) {
            return a.bm25_score > b.bm25_score;
        }
        return a.article->id < b.article->id;
    };
    if (results.size() > k) {
        std::partial_sort(results.begin(), results.begin() + static_cast<std::ptrdiff_t>(k),
                          results.end(), before);
        results.resize(k);
    } else {
        std::sort(results.begin(), results.end(), before);
    }
    return results;
}

double Index::score(std::size_t doc, std::span<const std::string> terms,
                    const CollectionStats& stats) const {
    double total = 0.0;
    for (const auto& term : terms) {
        auto it = postings_.find(term);
        if (it == postings_.end()) {
            continue;
        }
        auto hit = std::find_if(it->second.begin(), it->second.end(),
                                [&](const Posting& p) { return p.doc == doc; });
        if (hit == it->second.end()) {
            continue;
        }
        auto df_it = stats.document_frequency.find(term);
        std::size_t df = df_it == stats.document_frequency.end() ? 0 : df_it->second;
        total += bm25_idf(stats.doc_count, df) *
                 term_weight(hit->tf, doc_lengths_.at(doc), stats.avg_length);
    }
    return total;
}

CollectionStats Index::stats() const {
    CollectionStats stats;
    stats.doc_count = document_count();
    stats.avg_length = avg_length_;
    for (const auto& [term, list] : postings_) {
        stats.document_frequency.emplace(term, list.size());
    }
    return stats;
}

std::span<const Posting> Index::postings(std::string_view term) const {
    auto it = postings_.find(term);
    if (it == postings_.end()) {
        return {};
    }
    return it->second;
}

double Index::idf(std::string_view term) const {
    return bm25_idf(document_count(), postings(term).size());
}

bool Index::operator==(const Index& other) const {
    return params_ == other.params_ && doc_lengths_ == other.doc_lengths_ &&
           avg_length_ == other.avg_length_ && postings_ == other.postings_;
}

// Cache layout, one item per line:
//   ragaudit-bm25-index 1
//   params <k1> <b> <title> <mesh> <abstract>
//   docs <n>
//   <id>\t<length>            (n lines, corpus order)
//   avg <avg_length>
//   terms <count>
//   <term>\t<df>\t<doc>:<tf> <doc>:<tf> ...
void Index::write(std::ostream& out) const {
    out << kCacheMagic << ' ' << kCacheVersion << '\n';
    out << "params " << format_double(params_.k1) << ' ' << format_double(params_.b) << ' '
        << format_double(params_.title_weight) << ' ' << format_double(params_.mesh_weight) << ' '
        << format_double(params_.abstract_weight) << '\n';
    out << "docs " << doc_lengths_.size() << '\n';
    for (std::size_t doc = 0; doc < doc_lengths_.size(); ++doc) {
        out << corpus_->at(doc).id << '\t' << format_double(doc_lengths_[doc]) << '\n';
    }
    out << "avg " << format_double(avg_length_) << '\n';
    out << "terms " << postings_.size() << '\n';
    for (const auto& [term, list] : postings_) {
        out << term << '\t' << list.size() << '\t';
        for (std::size_t i = 0; i < list.size(); ++i) {
            if (i > 0) {
                out << ' ';
            }
            out << list[i].doc << ':' << format_double(list[i].tf);
        }
        out << '\n';
    }
}

void Index::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    write(out);
}

Index Index::read(std::istream& in, const Corpus& corpus) {
    Index index;
    index.corpus_ = &corpus;
    std::string line;
    std::size_t line_no = 0;
    auto next = [&]() -> std::string& {
        if (!std::getline(in, line)) {
            throw ParseError("<index>", line_no + 1, "unexpected end of index cache");
        }
        ++line_no;
        return line;
    };
    auto expect_prefix = [&](std::string_view prefix) {
        if (line.rfind(prefix, 0) != 0) {
            throw ParseError("<index>", line_no, "expected '" + std::string(prefix) + "'");
        }
        return std::string_view(line).substr(prefix.size());
    };

    next();
    if (line != std::string(kCacheMagic) + " " + std::to_string(kCacheVersion)) {
        throw ParseError("<index>", line_no, "not a ragaudit index cache");
    }
    next();
    {
        std::istringstream fields(std::string(expect_prefix("params ")));
        std::string k1, b, tw, mw, aw;
        fields >> k1 >> b >> tw >> mw >> aw;
        index.params_ = {parse_double(k1, line_no), parse_double(b, line_no), parse_double(tw, line_no),
                         parse_double(mw, line_no), parse_double(aw, line_no)};
    }
    next();
    auto doc_count = static_cast<std::size_t>(parse_double(expect_prefix("docs "), line_no));
    if (doc_count != corpus.size()) {
        throw ParseError("<index>", line_no, "index covers " + std::to_string(doc_count) +
                                                 " documents but the corpus has " +
                                                 std::to_string(corpus.size()));
    }
    for (std::size_t doc = 0; doc < doc_count; ++doc) {
        next();
        auto tab = line.find('\t');
        if (tab == std::string::npos || line.substr(0, tab) != corpus.at(doc).id) {
            throw ParseError("<index>", line_no, "document order does not match the corpus");
        }
        index.doc_lengths_.push_back(parse_double(std::string_view(line).substr(tab + 1), line_no));
    }
    next();
    index.avg_length_ = parse_double(expect_prefix("avg "), line_no);
    next();
    auto term_count = static_cast<std::size_t>(parse_double(expect_prefix("terms "), line_no));
    for (std::size_t t = 0; t < term_count; ++t) {
        next();
        auto tab1 = line.find('\t');
        auto tab2 = tab1 == std::string::npos ? std::string::npos : line.find('\t', tab1 + 1);
        if (tab2 == std::string::npos) {
            throw ParseError("<index>", line_no, "malformed postings line");
        }
        std::string term = line.substr(0, tab1);
        auto df = static_cast<std::size_t>(
            parse_double(std::string_view(line).substr(tab1 + 1, tab2 - tab1 - 1), line_no));
        std::vector<Posting> list;
        list.reserve(df);
        std::istringstream items(line.substr(tab2 + 1));
        std::string item;
        while (items >> item) {
            auto colon = item.find(':');
            if (colon == std::string::npos) {
                throw ParseError("<index>", line_no, "malformed posting '" + item + "'");
            }
            auto doc = static_cast<std::uint32_t>(parse_double(std::string_view(item).substr(0, colon), line_no));
            if (doc >= doc_count) {
                throw ParseError("<index>", line_no, "posting references unknown document");
            }
            list.push_back({doc, parse_double(std::string_view(item).substr(colon + 1), line_no)});
        }
        if (list.size() != df) {
            throw ParseError("<index>", line_no, "document frequency mismatch for '" + term + "'");
        }
        index.postings_.emplace(std::move(term), std::move(list));
    }
    return index;
}

Index Index::load(const std::filesystem::path& path, const Corpus& corpus) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return read(in, corpus);
}

}  // namespace ragaudit
