#pragma once

#include <cstdint>
#include <functional>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace typocorpus {

enum class LineKind { context, deletion, insertion };

struct DiffLine {
    LineKind kind;
    std::string text;

    bool operator==(const DiffLine&) const = default;
};

struct DiffHunk {
    std::int64_t old_start = 0;
    std::int64_t old_count = 0;
    std::int64_t new_start = 0;
    std::int64_t new_count = 0;
    std::vector<DiffLine> lines;

    bool operator==(const DiffHunk&) const = default;
};

struct FileDiff {
    std::string old_path;
    std::string new_path;
    bool binary = false;
    // Non-empty when a hunk of this file could not be parsed; the file's hunks
    // are then unusable.
    std::string error;
    std::vector<DiffHunk> hunks;
};

/// A commit as read from `git log -p` style output:
///
///   commit <sha>
///   parents <sha> [<sha>...]
///   date <unix seconds>
///
///       message, indented by four spaces
///
///   diff --git a/path b/path
///   ...
struct RawCommit {
    std::string sha;
    std::vector<std::string> parents;
    std::int64_t time = 0;
    std::string message;
    std::vector<FileDiff> files;
};

/// The `git log --format` string that produces the layout above.
inline constexpr std::string_view kGitLogFormat = "commit %H%nparents %P%ndate %ct%n%n%w(0,4,4)%B";

using LineSource = std::function<bool(std::string& line)>;

/// Streams commits out of the layout above. Lines before the first
/// "commit" header are ignored. Malformed hunks mark FileDiff::error and do
/// not abort the stream.
void parse_commit_stream(const LineSource& next_line, const std::function<void(RawCommit&&)>& on_commit);

std::vector<RawCommit> parse_commit_stream(std::istream& in);

/// Parses a bare unified diff (no commit header).
std::vector<FileDiff> parse_unified_diff(std::istream& in);

/// Parses "@@ -a[,b] +c[,d] @@". Returns false when the header is malformed.
bool parse_hunk_header(std::string_view line, DiffHunk& hunk);

}  // namespace typocorpus
