#include "ragaudit/corpus.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "ragaudit/error.hpp"
#include "ragaudit/text.hpp"

namespace ragaudit {

using nlohmann::json;

namespace {

std::string require_string(const json& record, const char* field) {
    auto it = record.find(field);
    if (it == record.end() || !it->is_string()) {
        throw ValidationError(std::string("field '") + field + "' must be a string");
    }
    return it->get<std::string>();
}

std::vector<std::string> optional_string_list(const json& record, const char* field) {
    auto it = record.find(field);
    if (it == record.end() || it->is_null()) {
        return {};
    }
    if (!it->is_array()) {
        throw ValidationError(std::string("field '") + field + "' must be an array of strings");
    }
    std::vector<std::string> out;
    out.reserve(it->size());
    for (const auto& item : *it) {
        if (!item.is_string()) {
            throw ValidationError(std::string("field '") + field + "' must be an array of strings");
        }
        out.push_back(item.get<std::string>());
    }
    return out;
}

bool blank(const std::string& line) { return trim(line).empty(); }

json parse_line(const std::string& line, const std::string& source, std::size_t line_no) {
    try {
        auto record = json::parse(line);
        if (!record.is_object()) {
            throw ParseError(source, line_no, "record is not an object");
        }
        return record;
    } catch (const json::parse_error& e) {
        throw ParseError(source, line_no, e.what());
    }
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return in;
}

}  // namespace

Corpus::Corpus(std::vector<Article> articles) : articles_(std::move(articles)) {
    by_id_.reserve(articles_.size());
    for (std::size_t i = 0; i < articles_.size(); ++i) {
        auto [it, inserted] = by_id_.emplace(articles_[i].id, i);
        if (!inserted) {
            throw ValidationError("duplicate article id '" + articles_[i].id + "' at positions " +
                                  std::to_string(it->second + 1) + " and " + std::to_string(i + 1));
        }
    }
}

const Article* Corpus::find(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &articles_[it->second];
}

json article_to_json(const Article& article) {
    return json{{"id", article.id},
                {"title", article.title},
                {"abstract", article.abstract},
                {"mesh_headings", article.mesh_headings},
                {"publication_types", article.publication_types},
                {"date_revised", format_date(article.date_revised)}};
}

Article article_from_json(const json& record, Date today) {
    if (!record.is_object()) {
        throw ValidationError("article must be an object");
    }
    Article article;
    article.id = require_string(record, "id");
    if (trim(article.id).empty()) {
        throw ValidationError("article id is empty");
    }
    article.title = require_string(record, "title");
    article.abstract = require_string(record, "abstract");
    if (trim(article.title).empty()) {
        throw ValidationError("article '" + article.id + "' has an empty title");
    }
    if (trim(article.abstract).empty()) {
        throw ValidationError("article '" + article.id + "' has an empty abstract");
    }
    article.mesh_headings = optional_string_list(record, "mesh_headings");
    article.publication_types = optional_string_list(record, "publication_types");
    auto raw_date = require_string(record, "date_revised");
    auto date = parse_date(raw_date);
    if (!date) {
        throw ValidationError("article '" + article.id + "' has invalid date_revised '" + raw_date + "'");
    }
    if (*date > today) {
        throw ValidationError("article '" + article.id + "' date_revised " + raw_date +
                              " is after the reference date " + format_date(today));
    }
    article.date_revised = *date;
    return article;
}

Corpus parse_corpus(std::istream& in, Date today, const std::string& source) {
    std::vector<Article> articles;
    std::unordered_map<std::string, std::size_t> first_line;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) {
            continue;
        }
        auto record = parse_line(line, source, line_no);
        Article article;
        try {
            article = article_from_json(record, today);
        } catch (const ValidationError& e) {
            throw ParseError(source, line_no, e.what());
        }
        auto [it, inserted] = first_line.emplace(article.id, line_no);
        if (!inserted) {
            throw ValidationError(source + ": duplicate article id '" + article.id + "' on lines " +
                                  std::to_string(it->second) + " and " + std::to_string(line_no));
        }
        articles.push_back(std::move(article));
    }
    return Corpus(std::move(articles));
}

Corpus load_corpus(const std::filesystem::path& path, Date today) {
    auto in = open_input(path);
    return parse_corpus(in, today, path.string());
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
    for (const auto& article : corpus.articles()) {
        out << article_to_json(article).dump() << '\n';
    }
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    write_corpus(out, corpus);
}

namespace {

struct PendingRef {
    std::size_t output;
    std::size_t slot;
    std::string id;
    std::size_t line;
};

}  // namespace

std::vector<RagOutput> parse_rag_outputs(std::istream& in, const Corpus& corpus, Date today,
                                         const std::string& source) {
    std::vector<RagOutput> outputs;
    std::vector<PendingRef> pending;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (blank(line)) {
            continue;
        }
        auto record = parse_line(line, source, line_no);
        RagOutput out;
        try {
            auto id_it = record.find("id");
            if (id_it != record.end()) {
                if (!id_it->is_string() || trim(id_it->get<std::string>()).empty()) {
                    throw ValidationError("field 'id' must be a non-empty string");
                }
                out.id = id_it->get<std::string>();
            } else {
                out.id = "q" + std::to_string(line_no);
            }
            out.question = require_string(record, "question");
            out.response_text = require_string(record, "response_text");
            if (trim(out.question).empty() || trim(out.response_text).empty()) {
                throw ValidationError("question and response_text must be non-empty");
            }
            if (auto it = record.find("chosen_answer"); it != record.end() && !it->is_null()) {
                if (!it->is_string()) {
                    throw ValidationError("field 'chosen_answer' must be a string");
                }
                out.chosen_answer = it->get<std::string>();
            }
            if (auto it = record.find("gold_label"); it != record.end() && !it->is_null()) {
                if (!it->is_boolean()) {
                    throw ValidationError("field 'gold_label' must be a boolean");
                }
                out.gold_label = it->get<bool>();
            }
            auto ev = record.find("given_evidence");
            if (ev != record.end() && !ev->is_null()) {
                if (!ev->is_array()) {
                    throw ValidationError("field 'given_evidence' must be an array");
                }
                for (const auto& entry : *ev) {
                    if (entry.is_object() && entry.size() == 1 && entry.contains("ref")) {
                        if (!entry["ref"].is_string()) {
                            throw ValidationError("'ref' must be a string");
                        }
                        pending.push_back({outputs.size(), out.given_evidence.size(),
                                           entry["ref"].get<std::string>(), line_no});
                        out.given_evidence.emplace_back();
                    } else {
                        out.given_evidence.push_back(article_from_json(entry, today));
                    }
                }
            }
        } catch (const ValidationError& e) {
            throw ParseError(source, line_no, e.what());
        }
        outputs.push_back(std::move(out));
    }
    for (const auto& ref : pending) {
        const Article* article = corpus.find(ref.id);
        if (article == nullptr) {
            throw ValidationError(source + ":" + std::to_string(ref.line) +
                                  ": unresolved evidence reference '" + ref.id + "'");
        }
        outputs[ref.output].given_evidence[ref.slot] = *article;
    }
    return outputs;
}

std::vector<RagOutput> load_rag_outputs(const std::filesystem::path& path, const Corpus& corpus,
                                        Date today) {
    auto in = open_input(path);
    return parse_rag_outputs(in, corpus, today, path.string());
}

void write_rag_outputs(std::ostream& out, std::span<const RagOutput> outputs, bool as_refs) {
    for (const auto& rag : outputs) {
        json record{{"id", rag.id}, {"question", rag.question}, {"response_text", rag.response_text}};
        if (rag.chosen_answer) {
            record["chosen_answer"] = *rag.chosen_answer;
        }
        json given = json::array();
        for (const auto& article : rag.given_evidence) {
            given.push_back(as_refs ? json{{"ref", article.id}} : article_to_json(article));
        }
        record["given_evidence"] = std::move(given);
        if (rag.gold_label) {
            record["gold_label"] = *rag.gold_label;
        }
        out << record.dump() << '\n';
    }
}

}  // namespace ragaudit
