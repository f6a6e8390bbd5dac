#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "typocorpus/corpus.hpp"
#include "typocorpus/unicode.hpp"

namespace typocorpus {

inline constexpr int kLangIdMaxOrder = 3;
inline constexpr std::size_t kMinTrainingChars = 10'000;
inline constexpr std::string_view kUnknownLang = "unknown";

/// Character n-gram counts (n = 1..3) for one language. Counts are what gets
/// persisted; log-probabilities depend on the whole profile set and are
/// derived by LanguageDetector.
struct LangProfile {
    std::string lang;
    double prior = 0.0;  // log-probability
    std::array<std::map<Codepoints, std::uint64_t>, kLangIdMaxOrder> counts;

    bool operator==(const LangProfile&) const = default;
};

/// The n-grams scored for text: lowercased ASCII, whitespace runs collapsed,
/// one space of padding on each side.
std::vector<Codepoints> langid_ngrams(std::string_view text, int order);

LangProfile train_profile(std::string lang, std::string_view text);

/// One profile per corpus with uniform priors. Throws DataError naming the
/// language when a corpus has fewer than 10,000 characters.
std::vector<LangProfile> train_profiles(const std::map<std::string, std::string>& corpora);
std::vector<LangProfile> train_profiles(const std::map<std::string, std::filesystem::path>& corpus_files);

struct Detection {
    std::string lang;
    double confidence = 0.0;

    bool operator==(const Detection&) const = default;
};

/// Multinomial naive Bayes over the n-grams of every order with add-one
/// smoothing. The vocabulary of each order is shared by all languages and
/// carries one extra slot for n-grams no profile has seen, so every order's
/// distribution sums to one.
class LanguageDetector {
public:
    /// Throws std::invalid_argument on an empty set or duplicate tags, and
    /// DataError if a distribution fails to normalize.
    explicit LanguageDetector(std::vector<LangProfile> profiles);

    /// ("unknown", 0) for text shorter than four characters; otherwise the
    /// argmax language and its posterior.
    Detection detect(std::string_view text) const;

    std::vector<std::string> languages() const;
    const std::vector<LangProfile>& profiles() const { return profiles_; }

    double log_prob(std::size_t lang_index, const Codepoints& ngram) const;

    /// Σ exp(log_prob) over the shared vocabulary of one order, unseen slot
    /// included.
    double total_probability(std::size_t lang_index, int order) const;

private:
    struct Table {
        std::unordered_map<Codepoints, double> log_probs;
        std::array<double, kLangIdMaxOrder> unseen{};
    };

    std::vector<LangProfile> profiles_;
    std::vector<Table> tables_;
    std::array<std::vector<Codepoints>, kLangIdMaxOrder> vocab_;
};

/// Scores how much a line looks like program code, in [0,1]. Combines the
/// share of non-space characters from {}();=<>[]|&#$\/@*+~`^% (monotone,
/// saturating), camelCase or snake_case identifiers, and the absence of spaces.
double code_likeness(std::string_view text);

struct LangFilterConfig {
    double code_threshold = 0.5;
    double min_confidence = 0.5;
};

/// Keeps an edit only if neither side looks like code, both detections are
/// confident, and both sides are the same language; the kept edit has
/// src.lang and tgt.lang filled in.
std::optional<Edit> filter_edit(const Edit& e, const LanguageDetector& detector, const LangFilterConfig& cfg = {});

void save_profile(const LangProfile& profile, const std::filesystem::path& file);
LangProfile load_profile(const std::filesystem::path& file);

/// Writes <dir>/<lang>.profile.json for each profile.
void save_profiles(const std::vector<LangProfile>& profiles, const std::filesystem::path& dir);

/// Loads every *.profile.json in dir, sorted by file name.
std::vector<LangProfile> load_profiles(const std::filesystem::path& dir);

}  // namespace typocorpus
