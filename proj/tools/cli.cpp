#include "cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "ragaudit/error.hpp"
#include "ragaudit/harness.hpp"
#include "ragaudit/http_provider.hpp"
#include "ragaudit/pipeline.hpp"
#include "ragaudit/report.hpp"
#include "ragaudit/synth.hpp"

namespace ragaudit::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kPrecedence =
    "Settings resolve as: command-line flag > environment variable > --config file > built-in default.\n"
    "Environment: RAGAUDIT_STANCE_PROVIDER, RAGAUDIT_PROVIDER_ENDPOINT, RAGAUDIT_PROVIDER_TOKEN, RAGAUDIT_WORKERS.";

struct CommonOptions {
    std::string config_path;
    std::string provider;
    std::string stances_path;
    std::string endpoint;
    std::string token;
    std::string today;
    std::size_t workers = 0;
    std::optional<std::size_t> extra_m;
};

struct DataOptions {
    std::string corpus;
    std::string rag;
    std::string index_dir;
};

// Thrown for flag combinations the parser cannot express.
struct UsageError : Error {
    using Error::Error;
};

std::string env_or_empty(const char* name) {
    const char* value = std::getenv(name);
    return value == nullptr ? std::string() : std::string(value);
}

void add_common(CLI::App* cmd, CommonOptions& common) {
    cmd->add_option("--config", common.config_path, "Pipeline config JSON")->check(CLI::ExistingFile);
    cmd->add_option("--provider", common.provider, "Stance provider: lexical, oracle or http");
    cmd->add_option("--stances", common.stances_path, "Planted stances JSONL for the oracle provider")
        ->check(CLI::ExistingFile);
    cmd->add_option("--endpoint", common.endpoint, "HTTP provider endpoint");
    cmd->add_option("--token", common.token, "HTTP provider bearer token");
    cmd->add_option("--today", common.today, "Reference date YYYY-MM-DD");
    cmd->add_option("--workers", common.workers, "Worker threads (default: logical processors)");
    cmd->add_option("--extra-m", common.extra_m, "Extra articles kept per claim (0 = none)");
}

void add_data(CLI::App* cmd, DataOptions& data) {
    cmd->add_option("--corpus", data.corpus, "Corpus JSONL")->required();
    cmd->add_option("--rag", data.rag, "RAG outputs JSONL")->required();
    cmd->add_option("--index", data.index_dir, "Directory holding a cached index from `index`");
}

PipelineConfig resolve_config(const CommonOptions& common) {
    PipelineConfig config;
    if (!common.config_path.empty()) {
        config = PipelineConfig::load(common.config_path, config);
    }
    if (auto env = env_or_empty("RAGAUDIT_STANCE_PROVIDER"); !env.empty()) {
        config.stance_provider = env;
    }
    if (!common.provider.empty()) {
        config.stance_provider = common.provider;
    }
    if (!common.today.empty()) {
        auto date = parse_date(common.today);
        if (!date) {
            throw UsageError("--today must be YYYY-MM-DD");
        }
        config.today = *date;
    }
    if (common.extra_m) {
        config = with_extra_evidence(config, *common.extra_m);
    }
    config.validate();
    return config;
}

std::size_t resolve_workers(const CommonOptions& common) {
    if (common.workers > 0) {
        return common.workers;
    }
    if (auto env = env_or_empty("RAGAUDIT_WORKERS"); !env.empty()) {
        try {
            auto n = std::stoul(env);
            if (n > 0) {
                return n;
            }
        } catch (const std::exception&) {
        }
        throw UsageError("RAGAUDIT_WORKERS must be a positive integer");
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

struct Providers {
    std::vector<PlantedStance> planted;
    std::unique_ptr<StanceProvider> stance;
};

Providers make_providers(const PipelineConfig& config, const CommonOptions& common) {
    Providers p;
    if (config.stance_provider == "lexical") {
        p.stance = std::make_unique<LexicalStanceProvider>();
    } else if (config.stance_provider == "oracle") {
        if (common.stances_path.empty()) {
            throw UsageError("the oracle provider needs --stances");
        }
        p.planted = load_planted_stances(common.stances_path);
        p.stance = std::make_unique<OracleStanceProvider>(p.planted);
    } else {
        auto http = HttpProviderConfig::from_environment();
        if (!common.endpoint.empty()) {
            http.endpoint = common.endpoint;
        }
        if (!common.token.empty()) {
            http.auth_token = common.token;
        }
        if (http.endpoint.empty()) {
            throw UsageError("the http provider needs --endpoint or RAGAUDIT_PROVIDER_ENDPOINT");
        }
        http.max_in_flight = config.stance_parallelism;
        p.stance = std::make_unique<HttpStanceProvider>(http);
    }
    return p;
}

struct LoadedData {
    Corpus corpus;
    std::vector<RagOutput> items;
    std::optional<Index> index;
};

std::unique_ptr<LoadedData> load_data(const DataOptions& data, const PipelineConfig& config) {
    auto loaded = std::make_unique<LoadedData>();
    loaded->corpus = load_corpus(data.corpus, config.today);
    loaded->items = load_rag_outputs(data.rag, loaded->corpus, config.today);
    if (!data.index_dir.empty()) {
        loaded->index = Index::load(fs::path(data.index_dir) / "index.bm25", loaded->corpus);
    } else {
        loaded->index = Index::build(loaded->corpus);
    }
    return loaded;
}

void guard_output(const std::string& output, std::initializer_list<std::string> inputs) {
    for (const auto& input : inputs) {
        if (!input.empty() && fs::exists(input) && fs::exists(output) && fs::equivalent(input, output)) {
            throw UsageError("output " + output + " would overwrite an input file");
        }
    }
}

std::ofstream open_output(const std::string& path) {
    if (auto parent = fs::path(path).parent_path(); !parent.empty()) {
        fs::create_directories(parent);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path);
    }
    return out;
}

std::string format_metric(std::optional<double> value) {
    if (!value) {
        return "n/a";
    }
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(4);
    s << *value;
    return s.str();
}

void print_metrics(std::ostream& out, const std::string& name, const EvalMetrics& m) {
    out << name << ": accuracy " << format_metric(m.accuracy) << ", recall " << format_metric(m.recall)
        << ", specificity " << format_metric(m.specificity) << " (tp " << m.counts.tp << ", fp " << m.counts.fp
        << ", tn " << m.counts.tn << ", fn " << m.counts.fn << ")\n";
}

std::vector<std::size_t> parse_m_values(const std::string& text) {
    std::vector<std::size_t> values;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            auto v = std::stoul(item, &used);
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
            values.push_back(v);
        } catch (const std::exception&) {
            throw UsageError("--m expects a comma-separated list of integers");
        }
    }
    if (values.empty()) {
        throw UsageError("--m expects at least one value");
    }
    return values;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Verify retrieval-augmented medical answers against weighted, reliability-scored evidence."};
    app.footer(kPrecedence);
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    bool verbose = false;
    bool quiet = false;
    app.add_flag("-v,--verbose", verbose, "Debug logging");
    app.add_flag("-q,--quiet", quiet, "Only log errors");

    // index
    std::string index_corpus;
    std::string index_out;
    std::string index_today;
    auto* index_cmd = app.add_subcommand("index", "Build and cache the BM25 index of a corpus");
    index_cmd->add_option("--corpus", index_corpus, "Corpus JSONL")->required();
    index_cmd->add_option("--out", index_out, "Output directory for the index cache")->required();
    index_cmd->add_option("--today", index_today, "Reference date YYYY-MM-DD");

    // verify
    CommonOptions verify_common;
    DataOptions verify_data;
    std::string verify_out;
    bool verify_no_timings = false;
    auto* verify_cmd = app.add_subcommand("verify", "Verify every RAG output and write one report per line");
    add_data(verify_cmd, verify_data);
    add_common(verify_cmd, verify_common);
    verify_cmd->add_option("--out", verify_out, "Report JSONL")->required();
    verify_cmd->add_flag("--no-timings", verify_no_timings, "Omit per-stage timings from reports");

    // evaluate
    CommonOptions eval_common;
    DataOptions eval_data;
    std::string eval_out;
    std::string eval_reports;
    std::string eval_ablation;
    std::uint64_t eval_seed = 0;
    auto* eval_cmd = app.add_subcommand("evaluate", "Accuracy, recall and specificity against gold labels");
    add_data(eval_cmd, eval_data);
    add_common(eval_cmd, eval_common);
    eval_cmd->add_option("--out", eval_out, "Metrics CSV")->required();
    eval_cmd->add_option("--reports", eval_reports, "Also write the reports to this JSONL file");
    eval_cmd->add_option("--ablation", eval_ablation, "a-reli, a-hete or a-retr")
        ->check(CLI::IsMember({"a-reli", "a-hete", "a-retr"}));
    eval_cmd->add_option("--seed", eval_seed, "Seed for a-reli");

    // sweep
    CommonOptions sweep_common;
    DataOptions sweep_data;
    std::string sweep_out;
    std::string sweep_contribution;
    std::string sweep_m = "0,1,2,3,4,5";
    auto* sweep_cmd = app.add_subcommand("sweep", "Metrics and contribution ratio per number of extra articles");
    add_data(sweep_cmd, sweep_data);
    add_common(sweep_cmd, sweep_common);
    sweep_cmd->add_option("--out", sweep_out, "Sweep CSV")->required();
    sweep_cmd->add_option("--contribution-out", sweep_contribution, "extra_count,contribution_ratio CSV");
    sweep_cmd->add_option("--m", sweep_m, "Comma-separated extra article counts (0 = none)")->capture_default_str();

    // ablate
    CommonOptions ablate_common;
    DataOptions ablate_data;
    std::string ablate_out;
    std::uint64_t ablate_seed = 0;
    auto* ablate_cmd = app.add_subcommand("ablate", "Full pipeline plus the three ablations in one table");
    add_data(ablate_cmd, ablate_data);
    add_common(ablate_cmd, ablate_common);
    ablate_cmd->add_option("--out", ablate_out, "Ablation CSV")->required();
    ablate_cmd->add_option("--seed", ablate_seed, "Seed for a-reli");

    // synth
    std::string synth_out;
    std::size_t synth_queries = 200;
    std::uint64_t synth_seed = 1;
    std::string synth_kind = "clean";
    std::optional<double> synth_fraction;
    std::string synth_today = "2025-01-01";
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic benchmark with planted stances");
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();
    synth_cmd->add_option("--queries", synth_queries, "Number of responses")->capture_default_str();
    synth_cmd->add_option("--seed", synth_seed, "Generator seed")->capture_default_str();
    synth_cmd->add_option("--kind", synth_kind, "clean or injection")->capture_default_str()
        ->check(CLI::IsMember({"clean", "injection"}));
    synth_cmd->add_option("--incorrect-fraction", synth_fraction, "Share of gold-incorrect responses");
    synth_cmd->add_option("--today", synth_today, "Reference date YYYY-MM-DD")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 1;
    }

    spdlog::set_level(verbose ? spdlog::level::debug : quiet ? spdlog::level::err : spdlog::level::info);

    try {
        if (*index_cmd) {
            Date today = today_utc();
            if (!index_today.empty()) {
                auto date = parse_date(index_today);
                if (!date) {
                    throw UsageError("--today must be YYYY-MM-DD");
                }
                today = *date;
            }
            auto corpus = load_corpus(index_corpus, today);
            auto index = Index::build(corpus);
            fs::create_directories(index_out);
            auto path = fs::path(index_out) / "index.bm25";
            guard_output(path.string(), {index_corpus});
            index.save(path);
            out << "indexed " << corpus.size() << " articles, " << index.stats().document_frequency.size()
                << " terms -> " << path.string() << '\n';
            return 0;
        }

        if (*synth_cmd) {
            SynthOptions options;
            options.queries = synth_queries;
            options.seed = synth_seed;
            options.kind = synth_kind == "clean" ? SynthKind::Clean : SynthKind::ContradictionInjection;
            options.incorrect_fraction = synth_fraction;
            auto date = parse_date(synth_today);
            if (!date) {
                throw UsageError("--today must be YYYY-MM-DD");
            }
            options.today = *date;
            auto bench = generate_benchmark(options);
            save_benchmark(bench, synth_out);
            out << "wrote " << bench.items.size() << " responses and " << bench.corpus.size() << " articles to "
                << synth_out << '\n';
            return 0;
        }

        struct Selected {
            CommonOptions* common;
            DataOptions* data;
            std::string* output;
        };
        Selected sel = *verify_cmd ? Selected{&verify_common, &verify_data, &verify_out}
                       : *eval_cmd ? Selected{&eval_common, &eval_data, &eval_out}
                       : *sweep_cmd ? Selected{&sweep_common, &sweep_data, &sweep_out}
                                    : Selected{&ablate_common, &ablate_data, &ablate_out};

        auto config = resolve_config(*sel.common);
        auto workers = resolve_workers(*sel.common);
        auto providers = make_providers(config, *sel.common);
        guard_output(*sel.output, {sel.data->corpus, sel.data->rag, sel.common->config_path, sel.common->stances_path});
        auto data = load_data(*sel.data, config);
        const Index& index = *data->index;
        TableHeader header{0, config.fingerprint(), ""};

        if (*verify_cmd) {
            auto reports = run_dataset(data->items, index, config, *providers.stance, workers);
            auto file = open_output(verify_out);
            write_reports(file, reports, !verify_no_timings);
            std::size_t incorrect = 0;
            std::size_t degraded = 0;
            for (const auto& r : reports) {
                incorrect += r.response_label == ResponseLabel::Incorrect ? 1 : 0;
                degraded += r.degraded ? 1 : 0;
            }
            out << "verified " << reports.size() << " responses: " << reports.size() - incorrect << " correct, "
                << incorrect << " incorrect -> " << verify_out << '\n';
            if (degraded > 0) {
                err << degraded << " report(s) degraded by provider failures\n";
                return 2;
            }
            return 0;
        }

        if (*eval_cmd) {
            auto run_config = config;
            std::string method = "full";
            if (!eval_ablation.empty()) {
                run_config = ablate(config, *parse_ablation(eval_ablation), eval_seed);
                method = eval_ablation;
            }
            header = {eval_seed, run_config.fingerprint(), "evaluation"};
            auto reports = run_dataset(data->items, index, run_config, *providers.stance, workers);
            auto metrics = evaluate(reports);
            std::vector<std::pair<std::string, EvalMetrics>> rows{{method, metrics}};
            {
                auto file = open_output(eval_out);
                write_metrics_table(file, header, rows);
            }
            if (!eval_reports.empty()) {
                auto file = open_output(eval_reports);
                write_reports(file, reports, false);
            }
            print_metrics(out, method, metrics);
            return 0;
        }

        if (*sweep_cmd) {
            auto m_values = parse_m_values(sweep_m);
            auto rows = sweep_extra_evidence(data->items, index, config, *providers.stance, m_values, workers);
            header.title = "extra evidence sweep";
            {
                auto file = open_output(sweep_out);
                write_sweep_table(file, header, rows);
            }
            if (!sweep_contribution.empty()) {
                auto file = open_output(sweep_contribution);
                write_contribution_csv(file, header, rows);
            }
            for (const auto& row : rows) {
                print_metrics(out, "m=" + std::to_string(row.extra_m), row.metrics);
            }
            return 0;
        }

        // ablate
        header = {ablate_seed, config.fingerprint(), "ablations"};
        std::vector<std::pair<std::string, EvalMetrics>> rows;
        rows.emplace_back("full", evaluate(run_dataset(data->items, index, config, *providers.stance, workers)));
        for (auto kind : {Ablation::RandomReliability, Ablation::AnyNegation, Ablation::NoRetrieval}) {
            rows.emplace_back(std::string(to_string(kind)),
                              run_ablation(kind, data->items, index, config, *providers.stance, ablate_seed, workers));
        }
        {
            auto file = open_output(ablate_out);
            write_metrics_table(file, header, rows);
        }
        for (const auto& [name, metrics] : rows) {
            print_metrics(out, name, metrics);
        }
        return 0;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const ProviderError& e) {
        err << "provider failure: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace ragaudit::cli
