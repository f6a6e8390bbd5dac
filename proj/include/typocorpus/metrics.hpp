#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "typocorpus/corpus.hpp"

namespace typocorpus {

struct ConfusionCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;

    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        fn += o.fn;
        return *this;
    }
    bool operator==(const ConfusionCounts&) const = default;
};

struct Prf {
    double precision = 0.0;
    double recall = 0.0;
    double f = 0.0;
};

/// F-beta from precision and recall; 0 when both are 0. Throws
/// std::invalid_argument unless beta > 0.
double fbeta(double precision, double recall, double beta);

/// Precision is 1 when nothing was proposed (tp + fp == 0) and recall is 1
/// when nothing was expected (tp + fn == 0).
Prf precision_recall_fbeta(const ConfusionCounts& c, double beta);

/// A gold line: its category (an ERRANT-style label such as SPELL) and the
/// corrected target.
struct GoldEdit {
    std::string id;
    std::string category;
    std::string src;
    std::string tgt;
};

struct SystemOutput {
    std::string id;
    std::string hypothesis;
};

inline constexpr std::string_view kOtherCategory = "OTHER";

/// Compares the atomic edits each system hypothesis makes against the gold
/// atomic edits of its line. A system edit with the same source span and
/// replacement as a gold edit is a true positive. Other system edits are
/// false positives, charged to the gold category when they overlap a gold
/// span and to OTHER otherwise. Unmatched gold edits are false negatives.
/// Throws DataError listing ids present on only one side, or duplicated.
std::map<std::string, ConfusionCounts> score_system(const std::vector<GoldEdit>& gold,
                                                    const std::vector<SystemOutput>& system);

/// Reads rows of exactly `columns` tab-separated fields. Fields may use \t,
/// \n and \\ escapes; blank lines and lines starting with '#' are skipped.
/// Gold TSV: id, category, src, tgt. System TSV: id, hypothesis.
std::vector<std::vector<std::string>> read_tsv(const std::filesystem::path& file, std::size_t columns);
std::vector<GoldEdit> read_gold_tsv(const std::filesystem::path& file);
std::vector<SystemOutput> read_system_tsv(const std::filesystem::path& file);

struct StatsRow {
    std::string lang;
    std::uint64_t n_commits = 0;
    std::optional<std::uint64_t> n_typo_edits;  // absent when no edit carries a label
    std::uint64_t n_all_edits = 0;
    std::uint64_t n_chars = 0;

    bool operator==(const StatsRow&) const = default;
};

struct StatsReport {
    std::vector<StatsRow> languages;  // by commits desc, then tag
    StatsRow total;
};

/// Accumulates per-language corpus statistics. A commit counts once for each
/// language it has an edit in; characters are |src| + |tgt| in scalar values.
class CorpusStatsBuilder {
public:
    void add(const CommitRecord& rec);

    /// top_n > 0 folds languages beyond the first top_n into an "others" row.
    StatsReport report(std::size_t top_n = 0) const;

private:
    struct Acc {
        std::uint64_t commits = 0;
        std::uint64_t typo = 0;
        bool any_label = false;
        std::uint64_t edits = 0;
        std::uint64_t chars = 0;
    };
    std::map<std::string, Acc> per_lang_;
    Acc total_;
    // Commits touching languages outside the top rows are needed for the
    // "others" row, so language sets are remembered per commit.
    std::vector<std::vector<std::string>> commit_langs_;
};

StatsReport corpus_stats(const std::vector<CommitRecord>& corpus, std::size_t top_n = 0);

/// Columns: lang, commits, typo_edits, all_edits, chars. Absent typo counts
/// are written as "---".
std::string render_stats_tsv(const StatsReport& report);
std::string render_stats_table(const StatsReport& report);

/// One row per category (sorted) plus an overall row: category, tp, fp, fn,
/// precision, recall, F-beta.
std::string render_scores_tsv(const std::map<std::string, ConfusionCounts>& scores, double beta);
std::string render_scores_table(const std::map<std::string, ConfusionCounts>& scores, double beta);

struct TTestResult {
    double t = 0.0;
    double df = 0.0;
    double p_two_tailed = 1.0;
};

/// Welch's unequal-variance t-test with Welch–Satterthwaite degrees of
/// freedom. Throws std::invalid_argument when a sample has fewer than two
/// values or both samples have zero variance.
TTestResult welch_ttest(const std::vector<double>& a, const std::vector<double>& b);

/// Two-tailed tail probability of Student's t with df degrees of freedom,
/// through the regularized incomplete beta function.
double student_t_two_tailed(double t, double df);

}  // namespace typocorpus
