#include "typocorpus/diff.hpp"

#include <charconv>
#include <optional>

namespace typocorpus {
namespace {

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

bool parse_int(std::string_view s, std::int64_t& out) {
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && out >= 0;
}

bool parse_range(std::string_view s, std::int64_t& start, std::int64_t& count) {
    const auto comma = s.find(',');
    if (comma == std::string_view::npos) {
        count = 1;
        return parse_int(s, start);
    }
    return parse_int(s.substr(0, comma), start) && parse_int(s.substr(comma + 1), count);
}

std::string strip_path_prefix(std::string_view path) {
    // "--- a/README.md\t2020-01-01 ..." carries an optional timestamp after a tab.
    if (const auto tab = path.find('\t'); tab != std::string_view::npos) path = path.substr(0, tab);
    if (starts_with(path, "a/") || starts_with(path, "b/")) path.remove_prefix(2);
    return std::string(path);
}

class StreamParser {
public:
    StreamParser(const LineSource& source, const std::function<void(RawCommit&&)>& sink, bool bare)
        : source_(source), sink_(sink), bare_(bare) {}

    void run() {
        if (bare_) current_.emplace();
        std::string line;
        while (next(line)) {
            if (starts_with(line, "commit ") && !bare_) {
                finish_commit();
                start_commit(line);
                continue;
            }
            if (!current_) continue;
            switch (state_) {
            case State::header: on_header(line); break;
            case State::message: on_message(line); break;
            case State::diff: on_diff(line); break;
            }
        }
        finish_commit();
    }

private:
    enum class State { header, message, diff };

    bool next(std::string& line) {
        if (pushed_back_) {
            line = std::move(*pushed_back_);
            pushed_back_.reset();
            return true;
        }
        if (!source_(line)) return false;
        if (!line.empty() && line.back() == '\r' && !in_hunk_) line.pop_back();
        return true;
    }

    void start_commit(std::string_view line) {
        current_.emplace();
        std::string_view sha = line.substr(7);
        while (!sha.empty() && sha.back() == ' ') sha.remove_suffix(1);
        current_->sha = std::string(sha);
        state_ = State::header;
        message_lines_.clear();
    }

    void finish_commit() {
        if (!current_) return;
        while (!message_lines_.empty() && message_lines_.back().empty()) message_lines_.pop_back();
        std::string message;
        for (std::size_t i = 0; i < message_lines_.size(); ++i) {
            if (i) message += '\n';
            message += message_lines_[i];
        }
        current_->message = std::move(message);
        sink_(std::move(*current_));
        current_.reset();
        message_lines_.clear();
    }

    void on_header(const std::string& line) {
        if (line.empty()) {
            state_ = State::message;
        } else if (starts_with(line, "parents")) {
            std::string_view rest = std::string_view(line).substr(7);
            while (!rest.empty()) {
                const auto start = rest.find_first_not_of(' ');
                if (start == std::string_view::npos) break;
                rest.remove_prefix(start);
                const auto end = rest.find(' ');
                current_->parents.emplace_back(rest.substr(0, end));
                rest = end == std::string_view::npos ? std::string_view{} : rest.substr(end);
            }
        } else if (starts_with(line, "date ")) {
            std::int64_t t = 0;
            if (parse_int(std::string_view(line).substr(5), t)) current_->time = t;
        } else if (starts_with(line, "diff --git ")) {
            state_ = State::diff;
            on_diff(line);
        }
    }

    void on_message(const std::string& line) {
        if (starts_with(line, "    ")) {
            message_lines_.push_back(line.substr(4));
        } else if (line.empty() || line.find_first_not_of(' ') == std::string::npos) {
            message_lines_.emplace_back();
        } else {
            state_ = State::diff;
            on_diff(line);
        }
    }

    FileDiff& new_file() {
        current_->files.emplace_back();
        return current_->files.back();
    }

    FileDiff* file() { return current_->files.empty() ? nullptr : &current_->files.back(); }

    void on_diff(const std::string& line) {
        if (starts_with(line, "diff --git ")) {
            FileDiff& f = new_file();
            // "diff --git a/x b/x"; exact for paths without " b/" inside them,
            // and overwritten by the ---/+++ lines when present.
            std::string_view rest = std::string_view(line).substr(11);
            const auto sep = rest.find(" b/");
            if (sep != std::string_view::npos) {
                f.old_path = strip_path_prefix(rest.substr(0, sep));
                f.new_path = strip_path_prefix(rest.substr(sep + 1));
            }
            header_open_ = true;
            return;
        }
        FileDiff* f = file();
        if (f && !f->error.empty()) return;
        if (starts_with(line, "--- ")) {
            if (!f || !header_open_) {
                f = &new_file();
            }
            f->old_path = strip_path_prefix(std::string_view(line).substr(4));
            header_open_ = true;
            return;
        }
        if (starts_with(line, "+++ ") && f && header_open_) {
            f->new_path = strip_path_prefix(std::string_view(line).substr(4));
            return;
        }
        if (starts_with(line, "Binary files ") || line == "GIT binary patch") {
            if (!f) f = &new_file();
            f->binary = true;
            return;
        }
        if (starts_with(line, "@@ ")) {
            if (!f) f = &new_file();
            header_open_ = false;
            DiffHunk hunk;
            if (!parse_hunk_header(line, hunk)) {
                f->error = "malformed hunk header: " + line;
                return;
            }
            read_hunk(*f, std::move(hunk));
            return;
        }
        // index, mode, rename and similarity lines carry nothing we use.
    }

    void read_hunk(FileDiff& f, DiffHunk hunk) {
        std::int64_t old_left = hunk.old_count;
        std::int64_t new_left = hunk.new_count;
        std::string line;
        in_hunk_ = true;
        while (old_left > 0 || new_left > 0) {
            if (!next(line)) {
                in_hunk_ = false;
                f.error = "unexpected end of input inside hunk";
                return;
            }
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const char tag = line.empty() ? ' ' : line[0];
            const std::string payload = line.empty() ? std::string() : line.substr(1);
            if (tag == '\\') continue;
            if (tag == ' ' && old_left > 0 && new_left > 0) {
                --old_left;
                --new_left;
                hunk.lines.push_back({LineKind::context, payload});
            } else if (tag == '-' && old_left > 0) {
                --old_left;
                hunk.lines.push_back({LineKind::deletion, payload});
            } else if (tag == '+' && new_left > 0) {
                --new_left;
                hunk.lines.push_back({LineKind::insertion, payload});
            } else {
                in_hunk_ = false;
                f.error = "hunk line does not match header counts: " + line;
                pushed_back_ = line;
                return;
            }
        }
        in_hunk_ = false;
        // A trailing "\ No newline at end of file" is consumed by the next
        // on_diff call as an ignorable line.
        f.hunks.push_back(std::move(hunk));
    }

    const LineSource& source_;
    const std::function<void(RawCommit&&)>& sink_;
    bool bare_;
    std::optional<RawCommit> current_;
    std::vector<std::string> message_lines_;
    std::optional<std::string> pushed_back_;
    State state_ = State::diff;
    bool header_open_ = false;
    bool in_hunk_ = false;
};

}  // namespace

bool parse_hunk_header(std::string_view line, DiffHunk& hunk) {
    if (!starts_with(line, "@@ -")) return false;
    line.remove_prefix(4);
    const auto space = line.find(' ');
    if (space == std::string_view::npos) return false;
    if (!parse_range(line.substr(0, space), hunk.old_start, hunk.old_count)) return false;
    line.remove_prefix(space + 1);
    if (!starts_with(line, "+")) return false;
    line.remove_prefix(1);
    const auto end = line.find(' ');
    if (end == std::string_view::npos) return false;
    if (!parse_range(line.substr(0, end), hunk.new_start, hunk.new_count)) return false;
    return starts_with(line.substr(end), " @@");
}

void parse_commit_stream(const LineSource& next_line, const std::function<void(RawCommit&&)>& on_commit) {
    StreamParser(next_line, on_commit, false).run();
}

std::vector<RawCommit> parse_commit_stream(std::istream& in) {
    std::vector<RawCommit> out;
    const LineSource src = [&in](std::string& line) { return static_cast<bool>(std::getline(in, line)); };
    const std::function<void(RawCommit&&)> sink = [&out](RawCommit&& c) { out.push_back(std::move(c)); };
    parse_commit_stream(src, sink);
    return out;
}

std::vector<FileDiff> parse_unified_diff(std::istream& in) {
    std::vector<FileDiff> files;
    const LineSource src = [&in](std::string& line) { return static_cast<bool>(std::getline(in, line)); };
    const std::function<void(RawCommit&&)> sink = [&files](RawCommit&& c) { files = std::move(c.files); };
    StreamParser(src, sink, true).run();
    return files;
}

}  // namespace typocorpus
