#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "typocorpus/corpus.hpp"

namespace typocorpus {

struct EligibilityConfig {
    std::int64_t min_stars = 50;
    std::int64_t min_size_bytes = 1'000'000;
    std::int64_t max_size_bytes = 1'000'000'000;
    std::set<std::string> allowed_licenses{"apache-2.0", "mit",       "bsd-3-clause", "bsd-2-clause",
                                           "cc0-1.0",    "unlicense", "cc-by-4.0",    "bsl-1.0"};
    Timestamp window_start = parse_timestamp("2017-11-01T00:00:00Z");
    Timestamp window_end = parse_timestamp("2019-09-30T23:59:59Z");
    std::set<std::string> required_event_kinds{"pull-request", "pull-request-review-comment"};

    // Each criterion can be switched off; doing so never shrinks the output.
    bool check_events = true;
    bool check_stars = true;
    bool check_size = true;
    bool check_license = true;
};

/// Throws ValidationError when the size range or the window is empty.
void validate(const EligibilityConfig& cfg);

bool passes_event_window(const RepoMeta& meta, const EligibilityConfig& cfg);
bool passes_stars(const RepoMeta& meta, const EligibilityConfig& cfg);
bool passes_size(const RepoMeta& meta, const EligibilityConfig& cfg);
bool passes_license(const RepoMeta& meta, const EligibilityConfig& cfg);

bool is_eligible(const RepoMeta& meta, const EligibilityConfig& cfg);

/// Maps GH Archive style type names ("PullRequestEvent") and loose spellings
/// onto the kebab-case kinds used in EligibilityConfig.
std::string normalize_event_kind(std::string_view kind);

/// Parses one event-dump line:
///   {"repo_full_name", "stars", "size_bytes", "license", "event_kind", "created_at"}
/// Throws ParseError or ValidationError.
RepoMeta parse_event(std::string_view line);

struct HarvestReport {
    std::size_t lines = 0;
    std::size_t malformed = 0;
    std::size_t qualifying_events = 0;
    std::size_t distinct_repos = 0;
    std::size_t eligible = 0;
};

/// Reads every dump file (concurrently when workers > 1), keeps for each
/// repository the earliest event passing the event criterion, and returns the
/// eligible ones sorted by full_name. Throws IoError for unreadable files.
std::vector<RepoMeta> harvest(const std::vector<std::filesystem::path>& dump_paths, const EligibilityConfig& cfg,
                              HarvestReport* report = nullptr, unsigned workers = 1);

}  // namespace typocorpus
