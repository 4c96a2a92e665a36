#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "ragaudit/date.hpp"

namespace ragaudit {

/// One evidence document.
struct Article {
    std::string id;
    std::string title;
    std::string abstract;
    std::vector<std::string> mesh_headings;
    std::vector<std::string> publication_types;
    Date date_revised;

    bool operator==(const Article&) const = default;
};

/// Immutable id-addressable collection of articles. Safe for concurrent reads.
class Corpus {
public:
    Corpus() = default;

    /// Throws ValidationError on a duplicate id.
    explicit Corpus(std::vector<Article> articles);

    const Article* find(std::string_view id) const;
    const Article& at(std::size_t index) const { return articles_.at(index); }
    std::span<const Article> articles() const noexcept { return articles_; }
    std::size_t size() const noexcept { return articles_.size(); }
    bool empty() const noexcept { return articles_.empty(); }

private:
    std::vector<Article> articles_;
    std::unordered_map<std::string, std::size_t> by_id_;
};

/// A RAG system's answer to one question plus the evidence it cited.
struct RagOutput {
    std::string id;
    std::string question;
    std::string response_text;
    std::optional<std::string> chosen_answer;
    std::vector<Article> given_evidence;
    /// true when the response is known to be factually correct.
    std::optional<bool> gold_label;
};

nlohmann::json article_to_json(const Article& article);

/// Validates every Article invariant against `today`; throws ValidationError.
Article article_from_json(const nlohmann::json& record, Date today);

/// One record per non-blank line. Errors carry `source` and the line number.
Corpus parse_corpus(std::istream& in, Date today, const std::string& source = "<corpus>");
Corpus load_corpus(const std::filesystem::path& path, Date today);

void write_corpus(std::ostream& out, const Corpus& corpus);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);

/// Given-evidence references are resolved against `corpus` after the whole
/// file has been read. Records without an `id` field get "q<line>".
std::vector<RagOutput> parse_rag_outputs(std::istream& in, const Corpus& corpus, Date today,
                                         const std::string& source = "<rag>");
std::vector<RagOutput> load_rag_outputs(const std::filesystem::path& path, const Corpus& corpus,
                                        Date today);

/// Writes given evidence as {"ref": id} when `as_refs`, else inline.
void write_rag_outputs(std::ostream& out, std::span<const RagOutput> outputs, bool as_refs = true);

}  // namespace ragaudit
