#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace typocorpus {

using Timestamp = std::chrono::sys_seconds;

/// Parses "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS[.fff](Z|+HH:MM|-HH:MM)" or the
/// same with a space separator. Throws std::invalid_argument.
Timestamp parse_timestamp(std::string_view text);

/// Renders as "YYYY-MM-DDTHH:MM:SSZ".
std::string format_timestamp(Timestamp ts);

struct RepoMeta {
    std::string full_name;  // "owner/name"
    std::int64_t stars = 0;
    std::int64_t size_bytes = 0;
    std::string license_id;
    Timestamp last_event_time{};
    std::string event_kind;

    bool operator==(const RepoMeta&) const = default;
};

void validate(const RepoMeta& meta);

enum class Category { mechanical, spell, grammatical, semantic };

std::string_view to_string(Category c);
std::optional<Category> parse_category(std::string_view name);

/// Mechanical, spell and grammatical edits are typos; semantic edits are not.
constexpr bool is_typo_category(Category c) { return c != Category::semantic; }

struct FeatureVector {
    double ppl_ratio = 1.0;  // PP(target) / PP(source), clamped
    double norm_dist = 0.0;
    int numeric_only = 0;

    bool operator==(const FeatureVector&) const = default;
};

void validate(const FeatureVector& f, const std::string& field = "features");

struct EditSide {
    std::string text;
    std::optional<std::string> lang;
    std::optional<double> ppl;

    bool operator==(const EditSide&) const = default;
};

struct Edit {
    EditSide src;
    EditSide tgt;
    std::optional<FeatureVector> features;
    std::optional<double> prob_typo;
    std::optional<bool> is_typo;
    std::optional<Category> category;

    bool operator==(const Edit&) const = default;
};

/// Probability at or above which an edit is labeled a typo.
inline constexpr double kTypoDecisionThreshold = 0.5;

inline constexpr std::size_t kMaxEditsPerCommit = 10;

struct CommitRecord {
    std::string repo;
    std::string commit;
    std::string message;
    std::vector<Edit> edits;

    bool operator==(const CommitRecord&) const = default;
};

void validate(const EditSide& side, const std::string& field);
void validate(const Edit& edit, const std::string& field = "edit");
void validate(const CommitRecord& rec);

bool is_commit_hash(std::string_view s);

/// One JSON object on a single line (no trailing newline). Keys appear in a
/// fixed order and absent optionals are omitted, so output is byte-stable.
/// Throws ValidationError when rec breaks an invariant.
std::string serialize_commit(const CommitRecord& rec);

struct ParseWarnings {
    std::size_t unknown_keys = 0;
};

/// Inverse of serialize_commit. Unknown keys are ignored and counted in
/// warnings. Throws ParseError (malformed JSON or wrong types) or
/// ValidationError.
CommitRecord parse_commit(std::string_view line, ParseWarnings* warnings = nullptr);

std::string serialize_repo_meta(const RepoMeta& meta);
RepoMeta parse_repo_meta(std::string_view line);

/// Reads a JSONL corpus; blank lines are skipped. Errors name the line.
std::vector<CommitRecord> read_corpus(std::istream& in, const std::string& source_name,
                                      ParseWarnings* warnings = nullptr);
std::vector<CommitRecord> read_corpus(const std::filesystem::path& file, ParseWarnings* warnings = nullptr);
void write_corpus(std::ostream& out, const std::vector<CommitRecord>& corpus);

std::vector<RepoMeta> read_repo_metas(const std::filesystem::path& file);

}  // namespace typocorpus
