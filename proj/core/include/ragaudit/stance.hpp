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

#include "ragaudit/claims.hpp"
#include "ragaudit/corpus.hpp"

namespace ragaudit {

enum class Stance : int { Contradict = -1, Neutral = 0, Support = 1 };

inline int stance_value(Stance s) noexcept { return static_cast<int>(s); }

std::string_view to_string(Stance s) noexcept;
/// "support" | "contradict" | "neutral"; nullopt for anything else.
std::optional<Stance> parse_stance(std::string_view text) noexcept;

/// What a provider returns for one pair. `coerced` marks an out-of-enum reply
/// that was mapped to Neutral.
struct StanceJudgement {
    Stance value = Stance::Neutral;
    bool coerced = false;
    std::optional<std::string> rationale;
};

/// Implementations must tolerate concurrent judge() calls.
class StanceProvider {
public:
    virtual ~StanceProvider() = default;
    virtual std::string tag() const = 0;
    /// Throws ProviderError when no answer could be obtained.
    virtual StanceJudgement judge(const Claim& claim, const Article& article) const = 0;
    /// Upper bound on concurrent judge() calls worth issuing.
    virtual std::size_t max_in_flight() const { return 1; }
};

struct StanceVerdict {
    std::size_t claim_index = 0;
    std::string article_id;
    Stance value = Stance::Neutral;
    std::string provider;
    std::optional<std::string> rationale;

    bool operator==(const StanceVerdict&) const = default;
};

struct LexicalStanceOptions {
    double overlap_threshold = 0.35;  // fraction of claim content tokens found in the article
    std::size_t negation_window = 3;  // tokens either side of an overlapping token
};

/// Deterministic baseline. Enough content-token overlap means support; a
/// negation token near an overlapping token turns that into contradict.
class LexicalStanceProvider final : public StanceProvider {
public:
    explicit LexicalStanceProvider(LexicalStanceOptions options = {}) : options_(options) {}

    std::string tag() const override { return "lexical"; }
    StanceJudgement judge(const Claim& claim, const Article& article) const override;
    std::size_t max_in_flight() const override { return 64; }

private:
    LexicalStanceOptions options_;
};

bool is_negation_token(std::string_view token);

/// A ground-truth stance for every claim that mentions `topic`.
struct PlantedStance {
    std::string article_id;
    std::string topic;
    Stance stance = Stance::Neutral;
};

/// Replays planted stances: an article's planted value when the claim contains
/// the article's topic token, Neutral otherwise.
class OracleStanceProvider final : public StanceProvider {
public:
    explicit OracleStanceProvider(std::span<const PlantedStance> planted);

    std::string tag() const override { return "oracle"; }
    StanceJudgement judge(const Claim& claim, const Article& article) const override;
    std::size_t max_in_flight() const override { return 64; }

private:
    std::unordered_map<std::string, PlantedStance> planted_;
};

std::vector<PlantedStance> read_planted_stances(std::istream& in, const std::string& source = "<stances>");
std::vector<PlantedStance> load_planted_stances(const std::filesystem::path& path);
void write_planted_stances(std::ostream& out, std::span<const PlantedStance> planted);

/// Calls the provider once. Provider failures become Neutral with provider
/// tag "error"; out-of-enum replies become Neutral tagged "<tag>:coerced".
/// Throws std::invalid_argument on an empty claim or article.
StanceVerdict judge(const StanceProvider& provider, const Claim& claim, std::size_t claim_index,
                    const Article& article);

struct StancePair {
    std::size_t claim_index = 0;
    const Claim* claim = nullptr;
    const Article* article = nullptr;
};

/// Order-preserving. Runs at most min(parallelism, provider.max_in_flight())
/// calls at once. Preconditions are checked for every pair before any call.
std::vector<StanceVerdict> judge_batch(const StanceProvider& provider, std::span<const StancePair> pairs,
                                       std::size_t parallelism = 4);

}  // namespace ragaudit
