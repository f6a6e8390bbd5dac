#include "typocorpus/extract.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>

#include "typocorpus/errors.hpp"
#include "typocorpus/unicode.hpp"

namespace typocorpus {
namespace fs = std::filesystem;

namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string shell_quote(std::string_view arg) {
    std::string out = "'";
    for (char c : arg) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += '\'';
    return out;
}

// Runs a command and hands its stdout to the caller line by line.
class ProcessLines {
public:
    explicit ProcessLines(const std::vector<std::string>& argv) {
        std::string cmd;
        for (const auto& a : argv) {
            if (!cmd.empty()) cmd += ' ';
            cmd += shell_quote(a);
        }
        cmd += " 2>/dev/null";
        pipe_ = ::popen(cmd.c_str(), "r");
        if (!pipe_) throw IoError("cannot spawn: " + cmd);
    }

    ProcessLines(const ProcessLines&) = delete;
    ProcessLines& operator=(const ProcessLines&) = delete;

    ~ProcessLines() {
        if (pipe_) ::pclose(pipe_);
    }

    bool next(std::string& line) {
        line.clear();
        int c = 0;
        bool any = false;
        while ((c = std::fgetc(pipe_)) != EOF) {
            any = true;
            if (c == '\n') return true;
            line += static_cast<char>(c);
        }
        return any;
    }

    // Drains remaining output and returns the exit status.
    int close() {
        while (std::fgetc(pipe_) != EOF) {
        }
        const int status = ::pclose(pipe_);
        pipe_ = nullptr;
        return status;
    }

private:
    FILE* pipe_ = nullptr;
};

std::string run_single_line(const std::vector<std::string>& argv, bool& ok) {
    ProcessLines proc(argv);
    std::string line;
    const bool got = proc.next(line);
    ok = proc.close() == 0 && got;
    return line;
}

std::vector<std::string> git_base(const fs::path& repo) { return {"git", "-C", repo.string(), "-c", "core.quotepath=off"}; }

std::vector<std::string> git_log_args(const fs::path& repo) {
    auto args = git_base(repo);
    for (const char* a : {"log", "--first-parent", "--no-color", "--no-ext-diff", "--no-textconv", "-p"}) args.emplace_back(a);
    args.push_back("--format=" + std::string(kGitLogFormat));
    return args;
}

}  // namespace

ExtractStats& ExtractStats::operator+=(const ExtractStats& o) {
    commits_seen += o.commits_seen;
    keyword_commits += o.keyword_commits;
    merges_skipped += o.merges_skipped;
    root_skipped += o.root_skipped;
    too_many_edits += o.too_many_edits;
    no_edits += o.no_edits;
    files_malformed += o.files_malformed;
    files_binary += o.files_binary;
    pairs_dropped += o.pairs_dropped;
    records += o.records;
    return *this;
}

bool is_typo_commit(std::string_view message, const ExtractOptions& opts) {
    if (opts.keyword.empty()) return true;
    if (opts.case_sensitive) return message.find(opts.keyword) != std::string_view::npos;
    return ascii_lower(message).find(ascii_lower(opts.keyword)) != std::string::npos;
}

std::vector<std::pair<std::string, std::string>> pair_edits(const std::vector<DiffHunk>& hunks) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& hunk : hunks) {
        const auto& lines = hunk.lines;
        std::size_t i = 0;
        while (i < lines.size()) {
            if (lines[i].kind != LineKind::deletion) {
                ++i;
                continue;
            }
            const std::size_t del_begin = i;
            while (i < lines.size() && lines[i].kind == LineKind::deletion) ++i;
            const std::size_t ins_begin = i;
            while (i < lines.size() && lines[i].kind == LineKind::insertion) ++i;
            const std::size_t pairs = std::min(ins_begin - del_begin, i - ins_begin);
            for (std::size_t k = 0; k < pairs; ++k) {
                const auto& src = lines[del_begin + k].text;
                const auto& tgt = lines[ins_begin + k].text;
                if (src != tgt) out.emplace_back(src, tgt);
            }
        }
    }
    return out;
}

std::optional<CommitRecord> extract_commit(const std::string& repo_name, const RawCommit& commit,
                                           const ExtractOptions& opts, const EditFilter* filter, ExtractStats* stats) {
    ExtractStats local;
    ExtractStats& st = stats ? *stats : local;
    ++st.commits_seen;
    if (!is_typo_commit(commit.message, opts)) return std::nullopt;
    ++st.keyword_commits;
    if (commit.parents.size() > 1) {
        ++st.merges_skipped;
        return std::nullopt;
    }
    if (commit.parents.empty()) {
        ++st.root_skipped;
        return std::nullopt;
    }
    if (!is_commit_hash(commit.sha)) return std::nullopt;

    std::vector<Edit> edits;
    for (const auto& file : commit.files) {
        if (file.binary) {
            ++st.files_binary;
            continue;
        }
        if (!file.error.empty()) {
            ++st.files_malformed;
            continue;
        }
        for (auto& [src, tgt] : pair_edits(file.hunks)) {
            if (!is_valid_utf8(src) || !is_valid_utf8(tgt) || src.find('\r') != std::string::npos ||
                tgt.find('\r') != std::string::npos || codepoint_length(src) > opts.max_line_chars ||
                codepoint_length(tgt) > opts.max_line_chars) {
                ++st.pairs_dropped;
                continue;
            }
            Edit e;
            e.src.text = nfc_normalize(src);
            e.tgt.text = nfc_normalize(tgt);
            if (e.src.text == e.tgt.text) {
                ++st.pairs_dropped;
                continue;
            }
            edits.push_back(std::move(e));
        }
    }
    if (edits.size() > opts.max_edits) {
        ++st.too_many_edits;
        return std::nullopt;
    }
    if (filter) {
        std::vector<Edit> kept;
        for (const auto& e : edits) {
            if (auto f = (*filter)(e)) kept.push_back(std::move(*f));
        }
        edits = std::move(kept);
    }
    if (edits.empty()) {
        ++st.no_edits;
        return std::nullopt;
    }
    CommitRecord rec;
    rec.repo = repo_name;
    rec.commit = commit.sha;
    rec.message = is_valid_utf8(commit.message) ? commit.message : std::string();
    rec.edits = std::move(edits);
    ++st.records;
    return rec;
}

bool GitRepository::is_repository(const fs::path& path) {
    std::error_code ec;
    const auto canonical = fs::canonical(path, ec);
    if (ec || !fs::is_directory(canonical)) return false;
    // The path must be the repository root, not a directory inside some
    // enclosing work tree.
    bool ok = false;
    auto args = git_base(path);
    args.insert(args.end(), {"rev-parse", "--is-bare-repository"});
    const bool bare = run_single_line(args, ok) == "true";
    if (!ok) return false;
    args = git_base(path);
    args.insert(args.end(), {"rev-parse", bare ? "--absolute-git-dir" : "--show-toplevel"});
    const auto root = run_single_line(args, ok);
    if (!ok) return false;
    return fs::equivalent(fs::path(root), canonical, ec) && !ec;
}

GitRepository::GitRepository(fs::path path, std::string name) : path_(std::move(path)), name_(std::move(name)) {
    if (!is_repository(path_)) throw IoError("not a git repository: " + path_.string());
    bool ok = false;
    auto args = git_base(path_);
    args.insert(args.end(), {"symbolic-ref", "--quiet", "refs/remotes/origin/HEAD"});
    branch_ = run_single_line(args, ok);
    if (ok && !branch_.empty()) return;
    args = git_base(path_);
    args.insert(args.end(), {"symbolic-ref", "--quiet", "HEAD"});
    branch_ = run_single_line(args, ok);
    if (!ok || branch_.empty()) branch_ = "HEAD";
}

void GitRepository::walk(const std::function<void(RawCommit&&)>& visit) const {
    // An unborn branch has no history to walk.
    auto verify = git_base(path_);
    verify.insert(verify.end(), {"rev-parse", "--verify", "--quiet", branch_ + "^{commit}"});
    bool ok = false;
    run_single_line(verify, ok);
    if (!ok) return;

    auto args = git_log_args(path_);
    args.push_back(branch_);
    args.emplace_back("--");
    ProcessLines proc(args);
    const LineSource src = [&proc](std::string& line) { return proc.next(line); };
    parse_commit_stream(src, visit);
    if (proc.close() != 0) throw IoError("git log failed in " + path_.string());
}

std::optional<RawCommit> GitRepository::load(const std::string& commit_id) const {
    auto args = git_log_args(path_);
    args.insert(args.end(), {"-1", commit_id, "--"});
    ProcessLines proc(args);
    std::optional<RawCommit> found;
    const LineSource src = [&proc](std::string& line) { return proc.next(line); };
    parse_commit_stream(src, [&found](RawCommit&& c) {
        if (!found) found = std::move(c);
    });
    if (proc.close() != 0) return std::nullopt;
    return found;
}

bool DiffSetRepository::is_diff_set(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) return false;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".diff") return true;
    }
    return false;
}

DiffSetRepository::DiffSetRepository(const fs::path& dir, std::string name) : name_(std::move(name)) {
    std::error_code ec;
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        if (entry.is_regular_file() && entry.path().extension() == ".diff") files.push_back(entry.path());
    }
    if (ec) throw IoError("cannot read diff set " + dir.string() + ": " + ec.message());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
        std::ifstream in(f, std::ios::binary);
        if (!in) throw IoError("cannot read " + f.string());
        for (auto& c : parse_commit_stream(in)) commits_.push_back(std::move(c));
    }
}

void DiffSetRepository::walk(const std::function<void(RawCommit&&)>& visit) const {
    std::map<std::string, const RawCommit*> by_sha;
    std::set<std::string> referenced;
    for (const auto& c : commits_) {
        by_sha.emplace(c.sha, &c);
        for (const auto& p : c.parents) referenced.insert(p);
    }
    const RawCommit* tip = nullptr;
    for (const auto& c : commits_) {
        if (referenced.count(c.sha)) continue;
        if (!tip || c.time > tip->time || (c.time == tip->time && c.sha > tip->sha)) tip = &c;
    }
    std::set<std::string> seen;
    for (const RawCommit* c = tip; c && seen.insert(c->sha).second;) {
        RawCommit copy = *c;
        const std::string parent = c->parents.empty() ? std::string() : c->parents.front();
        visit(std::move(copy));
        auto it = by_sha.find(parent);
        c = it == by_sha.end() ? nullptr : it->second;
    }
}

std::optional<RawCommit> DiffSetRepository::load(const std::string& commit_id) const {
    for (const auto& c : commits_) {
        if (c.sha == commit_id) return c;
    }
    return std::nullopt;
}

std::vector<CommitRecord> extract_repo(const CommitSource& source, const ExtractOptions& opts,
                                       const EditFilter* filter, ExtractStats* stats) {
    std::vector<CommitRecord> out;
    ExtractStats local;
    source.walk([&](RawCommit&& c) {
        if (auto rec = extract_commit(source.name(), c, opts, filter, &local)) out.push_back(std::move(*rec));
    });
    if (stats) *stats += local;
    return out;
}

std::unique_ptr<CommitSource> open_source(const fs::path& path, const std::string& name) {
    if (DiffSetRepository::is_diff_set(path)) return std::make_unique<DiffSetRepository>(path, name);
    if (GitRepository::is_repository(path)) return std::make_unique<GitRepository>(path, name);
    throw IoError("neither a git repository nor a diff set: " + path.string());
}

std::vector<CommitRecord> extract_repo(const fs::path& repo_path, const ExtractOptions& opts, ExtractStats* stats) {
    const auto source = open_source(repo_path, repo_path.filename().string());
    return extract_repo(*source, opts, nullptr, stats);
}

}  // namespace typocorpus
