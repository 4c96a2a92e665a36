#include "ragaudit/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "ragaudit/error.hpp"

namespace ragaudit {

namespace {

constexpr std::string_view kConsonants = "bdfgklmnprstv";
constexpr std::string_view kVowels = "aeiou";

// (years since revision, publication type) reaching each reliability level
// once the topic token's MeSH point is added.
struct Level {
    int days_ago;
    const char* type;
};

Level level_for(int reliability) {
    switch (reliability) {
        case 7:
            return {200, "Meta-Analysis"};
        case 6:
            return {200, "Randomized Controlled Trial"};
        case 5:
            return {4 * 365, "Randomized Controlled Trial"};
        case 4:
            return {200, "Journal Article"};
        case 3:
            return {4 * 365, "Journal Article"};
        case 2:
            return {8 * 365, "Journal Article"};
        default:
            return {20 * 365, "Journal Article"};
    }
}

std::string topic_token(std::size_t index) {
    std::string code;
    for (int i = 0; i < 4; ++i) {
        code.insert(code.begin(), static_cast<char>('a' + index % 26));
        index /= 26;
    }
    return "zx" + code;
}

std::string capitalize(std::string word) {
    if (!word.empty()) {
        word[0] = static_cast<char>(word[0] - 'a' + 'A');
    }
    return word;
}

class WordSource {
public:
    explicit WordSource(std::uint64_t seed) : rng_(seed) {
        // Words used in the response templates must never become topic words.
        for (const char* reserved : {"several", "examined", "reduces", "pathway", "explains", "reduction", "dosage",
                                     "typical", "results", "consult", "physician", "before", "starting",
                                     "treatment", "outcomes", "remain", "patients", "trials", "reduce"}) {
            used_.insert(reserved);
        }
    }

    std::string fresh() {
        for (;;) {
            std::string word;
            for (int s = 0; s < 3; ++s) {
                word.push_back(kConsonants[rng_() % kConsonants.size()]);
                word.push_back(kVowels[rng_() % kVowels.size()]);
            }
            word.push_back(kConsonants[rng_() % kConsonants.size()]);
            if (used_.insert(word).second) {
                return word;
            }
        }
    }

    std::mt19937_64& rng() { return rng_; }

private:
    std::mt19937_64 rng_;
    std::unordered_set<std::string> used_;
};

struct PlannedArticle {
    int reliability;
    Stance stance;
};

struct TopicPlan {
    std::vector<PlannedArticle> given;
    std::vector<PlannedArticle> extra;
    bool gold_correct;
};

TopicPlan plan_clean(bool correct) {
    Stance s = correct ? Stance::Support : Stance::Contradict;
    return {{{4, s}, {3, s}}, {{7, s}, {6, s}, {5, s}, {2, s}, {1, Stance::Neutral}}, correct};
}

TopicPlan plan_injection(bool correct, std::size_t ordinal) {
    if (correct) {
        TopicPlan plan{{{3, Stance::Support}, {2, Stance::Support}},
                       {{6, Stance::Support}, {5, Stance::Support}, {4, Stance::Support}, {2, Stance::Support},
                        {1, Stance::Contradict}, {1, Stance::Contradict}},
                       true};
        if (ordinal % 4 == 3) {
            plan.given[1] = {1, Stance::Contradict};
        }
        return plan;
    }
    const std::size_t decoys = ordinal % 3;
    TopicPlan plan{{{3, Stance::Support}, {2, Stance::Support}}, {}, false};
    for (std::size_t i = 0; i < decoys; ++i) {
        plan.extra.push_back({7, Stance::Support});
    }
    for (int i = 0; i < 5; ++i) {
        plan.extra.push_back({6, Stance::Contradict});
    }
    plan.extra.push_back({2, Stance::Support});
    plan.extra.push_back({1, Stance::Neutral});
    return plan;
}

}  // namespace

SyntheticBenchmark generate_benchmark(const SynthOptions& options) {
    if (options.queries == 0) {
        throw ValidationError("synthetic benchmark needs at least one query");
    }
    double fraction = options.incorrect_fraction.value_or(options.kind == SynthKind::Clean ? 0.5 : 0.2);
    if (fraction < 0.0 || fraction > 1.0) {
        throw ValidationError("incorrect_fraction must be in [0, 1]");
    }
    WordSource words(options.seed);
    auto& rng = words.rng();

    std::vector<std::size_t> order(options.queries);
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    std::shuffle(order.begin(), order.end(), rng);
    auto incorrect_count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(options.queries)));
    std::vector<bool> correct(options.queries, true);
    for (std::size_t i = 0; i < incorrect_count; ++i) {
        correct[order[i]] = false;
    }

    SyntheticBenchmark bench;
    bench.today = options.today;
    std::vector<Article> articles;
    std::size_t correct_ordinal = 0;
    std::size_t incorrect_ordinal = 0;

    for (std::size_t q = 0; q < options.queries; ++q) {
        const std::string key = topic_token(q);
        std::vector<std::string> w;
        for (int i = 0; i < 8; ++i) {
            w.push_back(words.fresh());
        }
        TopicPlan plan = options.kind == SynthKind::Clean
                             ? plan_clean(correct[q])
                             : plan_injection(correct[q], correct[q] ? correct_ordinal++ : incorrect_ordinal++);

        std::size_t serial = 0;
        auto make_article = [&](const PlannedArticle& planned) {
            Level level = level_for(planned.reliability);
            Article a;
            a.id = key + "-" + std::to_string(serial++);
            std::string extra_word = words.fresh();
            a.title = capitalize(w[serial % 8]) + " " + w[(serial + 1) % 8] + " " + key + " " + extra_word;
            a.abstract = capitalize(w[0]) + " " + w[1] + " " + w[2] + " " + key + " " + w[(serial + 3) % 8] + ". " +
                         capitalize(extra_word) + " " + w[(serial + 5) % 8] + " " + key + " " + w[6] + ".";
            a.mesh_headings = {key, w[3] + " " + w[4]};
            a.publication_types = {level.type};
            a.date_revised = days_before(options.today, level.days_ago);
            bench.stances.push_back({a.id, key, planned.stance});
            articles.push_back(a);
            return a;
        };

        RagOutput rag;
        rag.id = "query-" + std::to_string(q);
        rag.question = "Does " + w[0] + " " + w[1] + " reduce " + w[2] + " in " + key + " patients?";
        std::string answer = capitalize(w[0]) + " " + w[1] + " reduces " + w[2] + " in " + key + " patients.";
        std::vector<std::string> body = {
            "Several " + key + " trials examined " + w[3] + " and " + w[4] + ".",
            "The " + w[5] + " pathway in " + key + " explains the " + w[2] + " reduction.",
            "A dosage of 2.5 mg of " + w[0] + " is typical in " + key + " care.",
            "Results for " + w[6] + " in " + key + " vary, e.g. by age and sex.",
            "Please consult a physician before starting any treatment.",
            capitalize(key) + " outcomes with " + w[7] + " remain under study.",
        };
        std::shuffle(body.begin(), body.end(), rng);
        rag.response_text = answer;
        for (const auto& sentence : body) {
            rag.response_text += " " + sentence;
        }
        rag.chosen_answer = answer;
        rag.gold_label = plan.gold_correct;
        for (const auto& planned : plan.given) {
            rag.given_evidence.push_back(make_article(planned));
        }
        for (const auto& planned : plan.extra) {
            make_article(planned);
        }
        bench.items.push_back(std::move(rag));
    }
    bench.corpus = Corpus(std::move(articles));
    return bench;
}

void save_benchmark(const SyntheticBenchmark& benchmark, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream out(dir / name);
        if (!out) {
            throw IoError("cannot write " + (dir / name).string());
        }
        return out;
    };
    {
        auto out = open("corpus.jsonl");
        write_corpus(out, benchmark.corpus);
    }
    {
        auto out = open("rag.jsonl");
        write_rag_outputs(out, benchmark.items, true);
    }
    {
        auto out = open("stances.jsonl");
        write_planted_stances(out, benchmark.stances);
    }
    {
        auto out = open("config.json");
        out << nlohmann::json{{"today", format_date(benchmark.today)}, {"stance_provider", "oracle"}}.dump(2) << '\n';
    }
}

}  // namespace ragaudit
