#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "typocorpus/corpus.hpp"
#include "typocorpus/diff.hpp"

namespace typocorpus {

struct ExtractOptions {
    std::string keyword = "typo";
    bool case_sensitive = false;
    std::size_t max_edits = kMaxEditsPerCommit;
    // Longer lines are minified assets, not prose.
    std::size_t max_line_chars = 2000;
};

bool is_typo_commit(std::string_view message, const ExtractOptions& opts = {});

/// Pairs the i-th line of each maximal deletion run with the i-th line of the
/// insertion run that immediately follows it. Surplus lines on either side
/// are dropped, as are pairs whose two lines are identical.
std::vector<std::pair<std::string, std::string>> pair_edits(const std::vector<DiffHunk>& hunks);

struct ExtractStats {
    std::size_t commits_seen = 0;
    std::size_t keyword_commits = 0;
    std::size_t merges_skipped = 0;
    std::size_t root_skipped = 0;
    std::size_t too_many_edits = 0;
    std::size_t no_edits = 0;
    std::size_t files_malformed = 0;
    std::size_t files_binary = 0;
    std::size_t pairs_dropped = 0;  // over-long, undecodable or equal after NFC
    std::size_t records = 0;

    ExtractStats& operator+=(const ExtractStats& o);
};

/// Optional per-edit filter applied after the edit-count rule (for example a
/// language filter). Returning nullopt drops the edit.
using EditFilter = std::function<std::optional<Edit>(const Edit&)>;

/// Turns a parsed commit into a record. Returns nullopt unless the commit has
/// exactly one parent, its message matches the keyword, and it yields between
/// 1 and max_edits edits. Edit text is NFC-normalized.
std::optional<CommitRecord> extract_commit(const std::string& repo_name, const RawCommit& commit,
                                           const ExtractOptions& opts = {}, const EditFilter* filter = nullptr,
                                           ExtractStats* stats = nullptr);

/// Somewhere commits can be read from: a local git repository or a directory
/// of pre-produced diff files.
class CommitSource {
public:
    virtual ~CommitSource() = default;

    virtual const std::string& name() const = 0;

    /// First-parent history of the default branch, tip first.
    virtual void walk(const std::function<void(RawCommit&&)>& visit) const = 0;

    /// Loads one commit; nullopt when it does not exist.
    virtual std::optional<RawCommit> load(const std::string& commit_id) const = 0;
};

class GitRepository final : public CommitSource {
public:
    /// Throws IoError when path is not a git repository.
    GitRepository(std::filesystem::path path, std::string name);

    const std::string& name() const override { return name_; }
    void walk(const std::function<void(RawCommit&&)>& visit) const override;
    std::optional<RawCommit> load(const std::string& commit_id) const override;

    /// origin/HEAD when the repository is a clone, else the branch HEAD points
    /// at, else HEAD itself (detached).
    const std::string& default_branch() const { return branch_; }

    static bool is_repository(const std::filesystem::path& path);

private:
    std::filesystem::path path_;
    std::string name_;
    std::string branch_;
};

/// Reads every *.diff file in a directory. Each file holds one or more
/// commits in the layout of RawCommit. History is walked from the newest
/// commit that is nobody's parent, following first parents.
class DiffSetRepository final : public CommitSource {
public:
    /// Throws IoError when dir is unreadable.
    DiffSetRepository(const std::filesystem::path& dir, std::string name);

    const std::string& name() const override { return name_; }
    void walk(const std::function<void(RawCommit&&)>& visit) const override;
    std::optional<RawCommit> load(const std::string& commit_id) const override;

    static bool is_diff_set(const std::filesystem::path& dir);

private:
    std::string name_;
    std::vector<RawCommit> commits_;
};

std::vector<CommitRecord> extract_repo(const CommitSource& source, const ExtractOptions& opts = {},
                                       const EditFilter* filter = nullptr, ExtractStats* stats = nullptr);

/// Opens path as a git repository or a diff set. Throws IoError when it is
/// neither.
std::unique_ptr<CommitSource> open_source(const std::filesystem::path& path, const std::string& name);

std::vector<CommitRecord> extract_repo(const std::filesystem::path& repo_path, const ExtractOptions& opts = {},
                                       ExtractStats* stats = nullptr);

}  // namespace typocorpus
