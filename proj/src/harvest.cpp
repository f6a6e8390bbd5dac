#include "typocorpus/harvest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <future>
#include <map>

#include <json.hpp>

#include "typocorpus/errors.hpp"

namespace typocorpus {

void validate(const EligibilityConfig& cfg) {
    if (cfg.min_size_bytes >= cfg.max_size_bytes)
        throw ValidationError("min_size_bytes", "must be smaller than max_size_bytes");
    if (cfg.window_start >= cfg.window_end) throw ValidationError("window_start", "must precede window_end");
}

bool passes_event_window(const RepoMeta& meta, const EligibilityConfig& cfg) {
    return cfg.required_event_kinds.count(meta.event_kind) > 0 && cfg.window_start <= meta.last_event_time &&
           meta.last_event_time <= cfg.window_end;
}

bool passes_stars(const RepoMeta& meta, const EligibilityConfig& cfg) { return meta.stars >= cfg.min_stars; }

bool passes_size(const RepoMeta& meta, const EligibilityConfig& cfg) {
    return cfg.min_size_bytes <= meta.size_bytes && meta.size_bytes <= cfg.max_size_bytes;
}

bool passes_license(const RepoMeta& meta, const EligibilityConfig& cfg) {
    return cfg.allowed_licenses.count(meta.license_id) > 0;
}

bool is_eligible(const RepoMeta& meta, const EligibilityConfig& cfg) {
    return (!cfg.check_events || passes_event_window(meta, cfg)) && (!cfg.check_stars || passes_stars(meta, cfg)) &&
           (!cfg.check_size || passes_size(meta, cfg)) && (!cfg.check_license || passes_license(meta, cfg));
}

std::string normalize_event_kind(std::string_view kind) {
    if (kind == "PullRequestEvent") return "pull-request";
    if (kind == "PullRequestReviewCommentEvent") return "pull-request-review-comment";
    std::string out;
    for (char c : kind) out += c == '_' ? '-' : static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

RepoMeta parse_event(std::string_view line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line.begin(), line.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.byte, e.what());
    }
    if (!j.is_object()) throw ParseError(0, "event is not an object");
    auto str = [&](const char* key) {
        auto it = j.find(key);
        if (it == j.end() || !it->is_string()) throw ParseError(0, std::string(key) + ": expected string");
        return it->get<std::string>();
    };
    auto integer = [&](const char* key) {
        auto it = j.find(key);
        if (it == j.end() || !it->is_number_integer()) throw ParseError(0, std::string(key) + ": expected integer");
        return it->get<std::int64_t>();
    };
    RepoMeta m;
    m.full_name = str("repo_full_name");
    m.stars = integer("stars");
    m.size_bytes = integer("size_bytes");
    // A missing or null license is a repository without one.
    if (auto it = j.find("license"); it != j.end() && it->is_string()) {
        for (char c : it->get<std::string>()) m.license_id += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    m.event_kind = normalize_event_kind(str("event_kind"));
    try {
        m.last_event_time = parse_timestamp(str("created_at"));
    } catch (const std::invalid_argument& e) {
        throw ParseError(0, std::string("created_at: ") + e.what());
    }
    validate(m);
    return m;
}

namespace {

// Earliest event wins; exact ties fall back to the serialized form so the
// choice does not depend on file order.
bool earlier(const RepoMeta& a, const RepoMeta& b) {
    if (a.last_event_time != b.last_event_time) return a.last_event_time < b.last_event_time;
    return serialize_repo_meta(a) < serialize_repo_meta(b);
}

void keep_earliest(std::map<std::string, RepoMeta>& into, const RepoMeta& meta) {
    auto [it, inserted] = into.try_emplace(meta.full_name, meta);
    if (!inserted && earlier(meta, it->second)) it->second = meta;
}

// The anchor event of a repository is its earliest event passing the event
// criterion. Only when the criterion is disabled and no such event exists does
// the earliest event of any kind stand in.
struct FileResult {
    std::map<std::string, RepoMeta> first_qualifying;
    std::map<std::string, RepoMeta> first_any;
    HarvestReport report;
};

FileResult scan_file(const std::filesystem::path& path, const EligibilityConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read dump file " + path.string());
    FileResult result;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        ++result.report.lines;
        RepoMeta meta;
        try {
            meta = parse_event(line);
        } catch (const std::exception&) {
            ++result.report.malformed;
            continue;
        }
        if (passes_event_window(meta, cfg)) {
            ++result.report.qualifying_events;
            keep_earliest(result.first_qualifying, meta);
        } else if (!cfg.check_events) {
            keep_earliest(result.first_any, meta);
        }
    }
    if (in.bad()) throw IoError("error while reading " + path.string());
    return result;
}

}  // namespace

std::vector<RepoMeta> harvest(const std::vector<std::filesystem::path>& dump_paths, const EligibilityConfig& cfg,
                              HarvestReport* report, unsigned workers) {
    validate(cfg);
    std::vector<FileResult> results(dump_paths.size());
    if (workers <= 1 || dump_paths.size() <= 1) {
        for (std::size_t i = 0; i < dump_paths.size(); ++i) results[i] = scan_file(dump_paths[i], cfg);
    } else {
        for (std::size_t start = 0; start < dump_paths.size(); start += workers) {
            std::vector<std::future<FileResult>> batch;
            const auto end = std::min(dump_paths.size(), start + workers);
            for (std::size_t i = start; i < end; ++i)
                batch.push_back(std::async(std::launch::async, scan_file, std::cref(dump_paths[i]), std::cref(cfg)));
            for (std::size_t i = start; i < end; ++i) results[i] = batch[i - start].get();
        }
    }

    HarvestReport total;
    std::map<std::string, RepoMeta> merged;
    std::map<std::string, RepoMeta> fallback;
    for (auto& r : results) {
        total.lines += r.report.lines;
        total.malformed += r.report.malformed;
        total.qualifying_events += r.report.qualifying_events;
        for (auto& [name, meta] : r.first_qualifying) keep_earliest(merged, meta);
        for (auto& [name, meta] : r.first_any) keep_earliest(fallback, meta);
    }
    for (auto& [name, meta] : fallback) merged.try_emplace(name, meta);
    total.distinct_repos = merged.size();

    std::vector<RepoMeta> out;
    for (auto& [name, meta] : merged) {
        if (is_eligible(meta, cfg)) out.push_back(meta);
    }
    total.eligible = out.size();
    if (report) *report = total;
    return out;
}

}  // namespace typocorpus
