#include "ragaudit/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include "ragaudit/error.hpp"

namespace ragaudit {

namespace {

std::string fixed(std::optional<double> value) {
    if (!value) {
        return "";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *value);
    return buf;
}

void write_header(std::ostream& out, const TableHeader& header) {
    if (!header.title.empty()) {
        out << "# title=" << header.title << '\n';
    }
    out << "# seed=" << header.seed << '\n';
    out << "# config=" << header.config_fingerprint << '\n';
    out << "# positive_class=incorrect_response\n";
}

// Unbiased index in [0, n) from a 64-bit engine.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw = rng();
    while (draw >= limit) {
        draw = rng();
    }
    return static_cast<std::size_t>(draw % bound);
}

}  // namespace

EvalMetrics metrics_from_counts(const ConfusionCounts& c) {
    EvalMetrics m;
    m.counts = c;
    auto total = c.total();
    m.accuracy = total == 0 ? 0.0 : static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
    if (c.tp + c.fn > 0) {
        m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    }
    if (c.tn + c.fp > 0) {
        m.specificity = static_cast<double>(c.tn) / static_cast<double>(c.tn + c.fp);
    }
    return m;
}

namespace {

void tally(ConfusionCounts& c, bool predicted_error, bool actual_error) {
    if (actual_error) {
        (predicted_error ? c.tp : c.fn)++;
    } else {
        (predicted_error ? c.fp : c.tn)++;
    }
}

}  // namespace

EvalMetrics evaluate(std::span<const ResponseLabel> predicted, std::span<const bool> gold_correct) {
    if (predicted.size() != gold_correct.size()) {
        throw ValidationError("prediction and gold label counts differ");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        tally(c, is_positive(predicted[i]), !gold_correct[i]);
    }
    return metrics_from_counts(c);
}

EvalMetrics evaluate(std::span<const VerificationReport> reports) {
    ConfusionCounts c;
    for (const auto& r : reports) {
        if (!r.gold_label) {
            throw ValidationError("report '" + r.query_id + "' has no gold label");
        }
        tally(c, is_positive(r.response_label), !*r.gold_label);
    }
    return metrics_from_counts(c);
}

EvidenceGroups build_groups(std::span<const ScoredArticle> candidates,
                            const std::unordered_map<std::string, int>& reliability, std::uint64_t seed,
                            RandomPool pool, std::size_t group_size) {
    if (candidates.size() < group_size) {
        throw ValidationError("need at least " + std::to_string(group_size) + " candidates, got " +
                              std::to_string(candidates.size()));
    }
    EvidenceGroups groups;
    auto ranked = rerank_by_reliability(candidates, reliability, candidates.size());
    groups.finer.assign(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(group_size));

    std::vector<ScoredArticle> sample_pool;
    if (pool == RandomPool::AllCandidates) {
        sample_pool.assign(candidates.begin(), candidates.end());
    } else {
        sample_pool.assign(ranked.begin() + static_cast<std::ptrdiff_t>(group_size), ranked.end());
    }
    if (sample_pool.size() < group_size) {
        throw ValidationError("random pool has fewer than " + std::to_string(group_size) + " candidates");
    }
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < group_size; ++i) {
        std::size_t j = i + uniform_index(rng, sample_pool.size() - i);
        std::swap(sample_pool[i], sample_pool[j]);
        groups.random.push_back(sample_pool[i]);
    }
    return groups;
}

std::vector<VerificationReport> run_dataset(std::span<const RagOutput> items, const Index& index,
                                            const PipelineConfig& config, const StanceProvider& stance,
                                            std::size_t workers) {
    Verifier verifier(index, config, stance);
    std::vector<VerificationReport> reports(items.size());
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(items.size(), 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < items.size(); ++i) {
            try {
                reports[i] = verifier.verify(items[i]);
            } catch (const std::exception& e) {
                throw Error("query '" + items[i].id + "': " + e.what());
            }
        }
        return reports;
    }
    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (auto i = next.fetch_add(1); i < items.size(); i = next.fetch_add(1)) {
                    try {
                        reports[i] = verifier.verify(items[i]);
                    } catch (const std::exception& e) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::make_exception_ptr(Error("query '" + items[i].id + "': " + e.what()));
                        }
                        next = items.size();
                    }
                }
            });
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return reports;
}

PipelineConfig with_extra_evidence(PipelineConfig config, std::size_t m) {
    if (m == 0) {
        config.use_extra_evidence = false;
        return config;
    }
    config.use_extra_evidence = true;
    config.extra_m = m;
    config.retrieval_k = std::max(config.retrieval_k, m);
    return config;
}

std::vector<SweepRow> sweep_extra_evidence(std::span<const RagOutput> items, const Index& index,
                                           const PipelineConfig& config, const StanceProvider& stance,
                                           std::span<const std::size_t> m_values, std::size_t workers) {
    std::vector<SweepRow> rows;
    for (auto m : m_values) {
        auto reports = run_dataset(items, index, with_extra_evidence(config, m), stance, workers);
        std::vector<QueryContribution> contributions;
        contributions.reserve(reports.size());
        for (const auto& r : reports) {
            contributions.push_back(r.contribution);
        }
        rows.push_back({m, evaluate(reports), contribution_ratio(contributions)});
    }
    return rows;
}

std::string_view to_string(Ablation kind) noexcept {
    switch (kind) {
        case Ablation::RandomReliability:
            return "a-reli";
        case Ablation::AnyNegation:
            return "a-hete";
        case Ablation::NoRetrieval:
            break;
    }
    return "a-retr";
}

std::optional<Ablation> parse_ablation(std::string_view text) noexcept {
    if (text == "a-reli") {
        return Ablation::RandomReliability;
    }
    if (text == "a-hete") {
        return Ablation::AnyNegation;
    }
    if (text == "a-retr") {
        return Ablation::NoRetrieval;
    }
    return std::nullopt;
}

PipelineConfig ablate(PipelineConfig config, Ablation kind, std::uint64_t seed) {
    switch (kind) {
        case Ablation::RandomReliability:
            config.random_reliability_seed = seed;
            break;
        case Ablation::AnyNegation:
            config.adjudication.aggregation = Aggregation::AnyNegation;
            break;
        case Ablation::NoRetrieval:
            config = with_extra_evidence(std::move(config), 0);
            break;
    }
    return config;
}

EvalMetrics run_ablation(Ablation kind, std::span<const RagOutput> items, const Index& index,
                         const PipelineConfig& config, const StanceProvider& stance, std::uint64_t seed,
                         std::size_t workers) {
    return evaluate(run_dataset(items, index, ablate(config, kind, seed), stance, workers));
}

void write_metrics_table(std::ostream& out, const TableHeader& header,
                         std::span<const std::pair<std::string, EvalMetrics>> rows) {
    write_header(out, header);
    out << "method,accuracy,recall,specificity,tp,fp,tn,fn\n";
    for (const auto& [name, m] : rows) {
        out << name << ',' << fixed(m.accuracy) << ',' << fixed(m.recall) << ',' << fixed(m.specificity) << ','
            << m.counts.tp << ',' << m.counts.fp << ',' << m.counts.tn << ',' << m.counts.fn << '\n';
    }
}

void write_sweep_table(std::ostream& out, const TableHeader& header, std::span<const SweepRow> rows) {
    write_header(out, header);
    out << "extra_m,accuracy,recall,specificity,contribution_ratio,tp,fp,tn,fn\n";
    for (const auto& row : rows) {
        const auto& m = row.metrics;
        out << row.extra_m << ',' << fixed(m.accuracy) << ',' << fixed(m.recall) << ',' << fixed(m.specificity)
            << ',' << fixed(row.contribution_ratio) << ',' << m.counts.tp << ',' << m.counts.fp << ','
            << m.counts.tn << ',' << m.counts.fn << '\n';
    }
}

void write_contribution_csv(std::ostream& out, const TableHeader& header, std::span<const SweepRow> rows) {
    write_header(out, header);
    out << "extra_count,contribution_ratio\n";
    for (const auto& row : rows) {
        out << row.extra_m << ',' << fixed(row.contribution_ratio) << '\n';
    }
}

}  // namespace ragaudit
