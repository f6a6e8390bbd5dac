#include "typocorpus/cli.hpp"

#include <fnmatch.h>
#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "typocorpus/atomic_edits.hpp"
#include "typocorpus/char_lm.hpp"
#include "typocorpus/classifier.hpp"
#include "typocorpus/corpus.hpp"
#include "typocorpus/errors.hpp"
#include "typocorpus/extract.hpp"
#include "typocorpus/features.hpp"
#include "typocorpus/harvest.hpp"
#include "typocorpus/langid.hpp"
#include "typocorpus/metrics.hpp"
#include "typocorpus/parallel.hpp"
#include "typocorpus/unicode.hpp"

namespace typocorpus::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct Globals {
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::uint64_t seed = kDefaultSeed;
    bool quiet = false;
};

class Log {
public:
    Log(std::ostream& err, const bool& quiet) : err_(err), quiet_(quiet) {}

    template <typename... Args>
    void info(const Args&... args) const {
        if (quiet_) return;
        err_ << "typocorpus: ";
        (err_ << ... << args);
        err_ << '\n';
    }
    template <typename... Args>
    void warn(const Args&... args) const {
        err_ << "typocorpus: warning: ";
        (err_ << ... << args);
        err_ << '\n';
    }

private:
    std::ostream& err_;
    const bool& quiet_;
};

std::string sha256_hex(std::string_view data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("sha256 failed");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += kHex[md[i] >> 4];
        out += kHex[md[i] & 15];
    }
    return out;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error reading " + p.string());
    return ss.str();
}

// Written to a sibling temporary first so a failed run never leaves a
// truncated output behind.
void write_file(const fs::path& p, const std::string& data) {
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
    }
    const fs::path tmp = p.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + p.string());
        out << data;
        out.flush();
        if (!out) throw IoError("cannot write " + p.string());
    }
    std::error_code ec;
    fs::rename(tmp, p, ec);
    if (ec) throw IoError("cannot write " + p.string() + ": " + ec.message());
}

std::string now_string() {
    return format_timestamp(std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now()));
}

// Describes one invocation. Only the manifest carries volatile fields such
// as timestamps; data files stay byte-stable.
struct Manifest {
    std::string command;
    std::string config;
    std::vector<fs::path> inputs;
    ojson counts = ojson::object();
    std::string started_at = now_string();

    void write_beside(const fs::path& output) const {
        ojson j;
        j["tool"] = "typocorpus";
        j["version"] = kToolVersion;
        j["command"] = command;
        ojson ins = ojson::array();
        for (const auto& p : inputs) {
            ojson in;
            in["path"] = p.string();
            std::error_code ec;
            if (fs::is_regular_file(p, ec)) {
                in["sha256"] = sha256_hex(read_file(p));
            } else {
                in["kind"] = "directory";
            }
            ins.push_back(std::move(in));
        }
        j["inputs"] = std::move(ins);
        j["config"] = config;
        j["config_sha256"] = sha256_hex(config);
        j["counts"] = counts;
        ojson out;
        out["path"] = output.string();
        out["sha256"] = sha256_hex(read_file(output));
        j["output"] = std::move(out);
        j["started_at"] = started_at;
        j["finished_at"] = now_string();
        write_file(output.string() + ".manifest.json", j.dump(2) + "\n");
    }
};

// Emits data to --out (with a manifest) or to stdout.
void emit(const std::string& out_path, const std::string& data, std::ostream& out, const Manifest& manifest) {
    if (out_path.empty() || out_path == "-") {
        out << data;
        out.flush();
        return;
    }
    write_file(out_path, data);
    manifest.write_beside(out_path);
}

std::string corpus_text(const std::vector<CommitRecord>& corpus) {
    std::ostringstream ss;
    write_corpus(ss, corpus);
    return ss.str();
}

std::vector<CommitRecord> load_corpus(const std::string& path, std::istream& in, ParseWarnings* w) {
    if (path.empty() || path == "-") return read_corpus(in, "<stdin>", w);
    return read_corpus(fs::path(path), w);
}

std::string escape_field(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '\t': out += "\\t"; break;
        case '\n': out += "\\n"; break;
        case '\\': out += "\\\\"; break;
        default: out += c;
        }
    }
    return out;
}

std::pair<std::string, fs::path> split_lang_path(const std::string& arg) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size())
        throw CLI::ValidationError("--corpus", "expected LANG=PATH, got '" + arg + "'");
    return {arg.substr(0, eq), fs::path(arg.substr(eq + 1))};
}

// Files named directly, every *.jsonl in a named directory, or files matching
// a wildcard in the last path component.
std::vector<fs::path> expand_inputs(const std::vector<std::string>& specs, const std::string& ext) {
    std::vector<fs::path> out;
    for (const auto& arg : specs) {
        const fs::path p(arg);
        std::error_code ec;
        if (fs::is_directory(p, ec)) {
            std::vector<fs::path> found;
            for (const auto& e : fs::directory_iterator(p, ec))
                if (e.is_regular_file() && e.path().extension() == ext) found.push_back(e.path());
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else if (arg.find_first_of("*?[") != std::string::npos) {
            const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
            const std::string pattern = p.filename().string();
            std::vector<fs::path> found;
            for (const auto& e : fs::directory_iterator(dir, ec))
                if (e.is_regular_file() && fnmatch(pattern.c_str(), e.path().filename().c_str(), 0) == 0)
                    found.push_back(e.path());
            if (ec) throw IoError("cannot read " + dir.string());
            std::sort(found.begin(), found.end());
            out.insert(out.end(), found.begin(), found.end());
        } else {
            out.push_back(p);
        }
    }
    return out;
}

// ---------------------------------------------------------------- stages

struct RepoLocation {
    std::string name;
    fs::path path;
};

bool is_source(const fs::path& p) { return DiffSetRepository::is_diff_set(p) || GitRepository::is_repository(p); }

std::vector<fs::path> sorted_subdirs(const fs::path& dir) {
    std::vector<fs::path> out;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(dir, ec))
        if (e.is_directory() && e.path().filename().string().front() != '.') out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

// A root may itself be a repository, hold repositories as children
// (named after the child) or as grandchildren (named owner/name).
std::vector<RepoLocation> discover(const fs::path& root) {
    std::vector<RepoLocation> out;
    std::error_code ec;
    if (fs::is_regular_file(root, ec)) {
        std::istringstream list(read_file(root));
        std::string line;
        while (std::getline(list, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            std::string name;
            fs::path path;
            if (const auto tab = line.find('\t'); tab != std::string::npos) {
                name = line.substr(0, tab);
                path = line.substr(tab + 1);
            } else {
                path = line;
            }
            if (path.is_relative()) path = root.parent_path() / path;
            if (name.empty()) name = path.lexically_normal().filename().string();
            out.push_back({name, path});
        }
        return out;
    }
    if (!fs::is_directory(root, ec)) throw IoError("no such repository directory: " + root.string());
    if (is_source(root)) return {{root.lexically_normal().filename().string(), root}};
    for (const auto& child : sorted_subdirs(root)) {
        if (is_source(child)) {
            out.push_back({child.filename().string(), child});
            continue;
        }
        for (const auto& grandchild : sorted_subdirs(child))
            if (is_source(grandchild))
                out.push_back({child.filename().string() + "/" + grandchild.filename().string(), grandchild});
    }
    return out;
}

std::vector<RepoLocation> discover_all(const std::vector<std::string>& roots) {
    std::vector<RepoLocation> out;
    std::set<std::string> seen;
    for (const auto& r : roots)
        for (auto& loc : discover(r)) {
            if (!seen.insert(loc.name).second) throw DataError("repository name appears twice: " + loc.name);
            out.push_back(std::move(loc));
        }
    std::sort(out.begin(), out.end(), [](const RepoLocation& a, const RepoLocation& b) { return a.name < b.name; });
    return out;
}

struct ExtractOutcome {
    std::vector<CommitRecord> records;
    ExtractStats stats;
    std::string error;
};

std::vector<CommitRecord> run_extract(const std::vector<RepoLocation>& repos, const ExtractOptions& opts,
                                      unsigned workers, const Log& log, ojson& counts) {
    auto outcomes = parallel_map(
        repos,
        [&opts](const RepoLocation& loc) {
            ExtractOutcome o;
            try {
                const auto source = open_source(loc.path, loc.name);
                o.records = extract_repo(*source, opts, nullptr, &o.stats);
            } catch (const IoError& e) {
                o.error = e.what();
            }
            return o;
        },
        workers);
    std::vector<CommitRecord> out;
    ExtractStats total;
    std::size_t failed = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        auto& o = outcomes[i];
        if (!o.error.empty()) {
            log.warn(repos[i].name, ": ", o.error);
            ++failed;
            continue;
        }
        total += o.stats;
        for (auto& r : o.records) out.push_back(std::move(r));
    }
    counts["repositories"] = repos.size();
    counts["repositories_failed"] = failed;
    counts["commits_seen"] = total.commits_seen;
    counts["keyword_commits"] = total.keyword_commits;
    counts["merges_skipped"] = total.merges_skipped;
    counts["root_commits_skipped"] = total.root_skipped;
    counts["too_many_edits"] = total.too_many_edits;
    counts["no_edits"] = total.no_edits;
    counts["files_binary"] = total.files_binary;
    counts["files_malformed"] = total.files_malformed;
    counts["pairs_dropped"] = total.pairs_dropped;
    counts["records_out"] = out.size();
    if (total.files_malformed) log.warn(total.files_malformed, " malformed file diffs skipped");
    return out;
}

std::size_t count_edits(const std::vector<CommitRecord>& corpus) {
    std::size_t n = 0;
    for (const auto& r : corpus) n += r.edits.size();
    return n;
}

std::vector<CommitRecord> run_langfilter(std::vector<CommitRecord> corpus, const LanguageDetector& detector,
                                         const LangFilterConfig& cfg, unsigned workers, ojson& counts) {
    const std::size_t records_in = corpus.size();
    const std::size_t edits_in = count_edits(corpus);
    auto filtered = parallel_map(
        corpus,
        [&](const CommitRecord& rec) {
            std::optional<CommitRecord> kept = rec;
            kept->edits.clear();
            for (const auto& e : rec.edits)
                if (auto f = filter_edit(e, detector, cfg)) kept->edits.push_back(std::move(*f));
            if (kept->edits.empty()) kept.reset();
            return kept;
        },
        workers);
    std::vector<CommitRecord> out;
    for (auto& r : filtered)
        if (r) out.push_back(std::move(*r));
    counts["records_in"] = records_in;
    counts["edits_in"] = edits_in;
    counts["records_out"] = out.size();
    counts["edits_out"] = count_edits(out);
    return out;
}

std::map<std::string, CharLangModel> load_models(const fs::path& dir) {
    std::map<std::string, CharLangModel> out;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError("models directory not found: " + dir.string());
    for (const auto& e : fs::directory_iterator(dir, ec))
        if (e.is_regular_file() && e.path().extension() == ".lm")
            out.emplace(e.path().stem().string(), CharLangModel::load(e.path()));
    if (out.empty()) throw IoError("no *.lm models in " + dir.string());
    return out;
}

std::vector<CommitRecord> run_featurize(std::vector<CommitRecord> corpus,
                                        const std::map<std::string, CharLangModel>& models, unsigned workers,
                                        const Log& log, ojson& counts) {
    struct Result {
        CommitRecord rec;
        std::map<std::string, std::size_t> missing;
        std::size_t featurized = 0;
    };
    auto results = parallel_map(
        corpus,
        [&models](const CommitRecord& in) {
            Result r{in, {}, 0};
            for (auto& e : r.rec.edits) {
                const std::string lang = e.src.lang.value_or(std::string(kUnknownLang));
                const auto m = models.find(lang);
                if (m == models.end()) {
                    ++r.missing[lang];
                    continue;
                }
                e.features = featurize(e, m->second);
                ++r.featurized;
            }
            return r;
        },
        workers);
    std::vector<CommitRecord> out;
    std::map<std::string, std::size_t> missing;
    std::size_t featurized = 0;
    for (auto& r : results) {
        for (const auto& [lang, n] : r.missing) missing[lang] += n;
        featurized += r.featurized;
        out.push_back(std::move(r.rec));
    }
    std::size_t skipped = 0;
    for (const auto& [lang, n] : missing) {
        log.warn(n, " edits skipped: no language model for '", lang, "'");
        skipped += n;
    }
    counts["records"] = out.size();
    counts["edits_featurized"] = featurized;
    counts["edits_skipped"] = skipped;
    return out;
}

// A single weights file for every language, or a directory holding
// <lang>.weights.json files.
struct WeightSet {
    std::optional<ClassifierWeights> shared;
    std::map<std::string, ClassifierWeights> per_lang;

    const ClassifierWeights* find(const std::string& lang) const {
        if (shared) return &*shared;
        const auto it = per_lang.find(lang);
        return it == per_lang.end() ? nullptr : &it->second;
    }
};

WeightSet load_weight_set(const fs::path& p) {
    WeightSet ws;
    std::error_code ec;
    if (fs::is_regular_file(p, ec)) {
        ws.shared = load_weights(p).weights;
        return ws;
    }
    if (!fs::is_directory(p, ec)) throw IoError("weights not found: " + p.string());
    const std::string suffix = ".weights.json";
    for (const auto& e : fs::directory_iterator(p, ec)) {
        const std::string fname = e.path().filename().string();
        if (e.is_regular_file() && fname.size() > suffix.size() &&
            fname.compare(fname.size() - suffix.size(), suffix.size(), suffix) == 0)
            ws.per_lang.emplace(fname.substr(0, fname.size() - suffix.size()), load_weights(e.path()).weights);
    }
    if (ws.per_lang.empty()) throw IoError("no *.weights.json files in " + p.string());
    return ws;
}

std::vector<CommitRecord> run_classify(std::vector<CommitRecord> corpus, const WeightSet& weights, unsigned workers,
                                       const Log& log, ojson& counts) {
    struct Result {
        CommitRecord rec;
        LabelStats stats;
        std::size_t no_weights = 0;
    };
    auto results = parallel_map(
        corpus,
        [&weights](const CommitRecord& in) {
            Result r{in, {}, 0};
            for (auto& e : r.rec.edits) {
                const auto* w = weights.find(e.src.lang.value_or(std::string(kUnknownLang)));
                if (!w) {
                    ++r.stats.edits;
                    ++r.stats.unlabeled;
                    ++r.no_weights;
                    continue;
                }
                CommitRecord one;
                one.edits.push_back(std::move(e));
                label_record(one, *w, &r.stats);
                e = std::move(one.edits.front());
            }
            return r;
        },
        workers);
    std::vector<CommitRecord> out;
    LabelStats total;
    std::size_t no_weights = 0;
    for (auto& r : results) {
        total.edits += r.stats.edits;
        total.labeled += r.stats.labeled;
        total.unlabeled += r.stats.unlabeled;
        no_weights += r.no_weights;
        out.push_back(std::move(r.rec));
    }
    if (total.unlabeled) log.warn(total.unlabeled, " edits left unlabeled (no features or no weights)");
    counts["records"] = out.size();
    counts["edits"] = total.edits;
    counts["edits_labeled"] = total.labeled;
    counts["edits_unlabeled"] = total.unlabeled;
    counts["edits_without_weights"] = no_weights;
    return out;
}

std::vector<LabeledExample> load_annotations(const fs::path& tsv, const CharLangModel& model, const Log& log) {
    std::vector<LabeledExample> out;
    std::size_t n = 0;
    std::size_t skipped = 0;
    for (auto& row : read_tsv(tsv, 3)) {
        ++n;
        const auto cat = parse_category(row[2]);
        if (!cat) throw DataError(tsv.string() + ": row " + std::to_string(n) + ": unknown category '" + row[2] + "'");
        Edit e;
        e.src.text = nfc_normalize(row[0]);
        e.tgt.text = nfc_normalize(row[1]);
        if (e.src.text == e.tgt.text) {
            ++skipped;
            continue;
        }
        out.push_back({featurize(e, model), is_typo_category(*cat)});
    }
    if (skipped) log.warn(skipped, " annotation rows skipped: source equals target");
    return out;
}

// ---------------------------------------------------------------- options

struct HarvestArgs {
    std::vector<std::string> dumps;
    std::string out;
    std::int64_t min_stars = 50;
    std::int64_t min_size = 1'000'000;
    std::int64_t max_size = 1'000'000'000;
    std::vector<std::string> licenses;
    std::vector<std::string> event_kinds;
    std::string window_start = "2017-11-01T00:00:00Z";
    std::string window_end = "2019-09-30T23:59:59Z";
    std::vector<std::string> skip;

    void add_to(CLI::App& app) {
        app.add_option("--dump", dumps, "Event dump files, directories of *.jsonl, or wildcard patterns")
            ->required();
        app.add_option("--min-stars", min_stars, "Minimum star count")->capture_default_str();
        app.add_option("--min-size", min_size, "Minimum repository size in bytes")->capture_default_str();
        app.add_option("--max-size", max_size, "Maximum repository size in bytes")->capture_default_str();
        app.add_option("--license", licenses, "Allowed license id (repeatable; replaces the default list)");
        app.add_option("--event-kind", event_kinds, "Qualifying event kind (repeatable; replaces the default list)");
        app.add_option("--window-start", window_start, "Event window start (UTC)")->capture_default_str();
        app.add_option("--window-end", window_end, "Event window end (UTC)")->capture_default_str();
        app.add_option("--skip-criterion", skip, "Disable a criterion: events, stars, size or license")
            ->check(CLI::IsMember({"events", "stars", "size", "license"}));
    }

    EligibilityConfig config() const {
        EligibilityConfig cfg;
        cfg.min_stars = min_stars;
        cfg.min_size_bytes = min_size;
        cfg.max_size_bytes = max_size;
        if (!licenses.empty()) cfg.allowed_licenses = {licenses.begin(), licenses.end()};
        if (!event_kinds.empty()) {
            cfg.required_event_kinds.clear();
            for (const auto& k : event_kinds) cfg.required_event_kinds.insert(normalize_event_kind(k));
        }
        try {
            cfg.window_start = parse_timestamp(window_start);
            cfg.window_end = parse_timestamp(window_end);
        } catch (const std::invalid_argument& e) {
            throw CLI::ValidationError("--window-start/--window-end", e.what());
        }
        for (const auto& s : skip) {
            if (s == "events") cfg.check_events = false;
            if (s == "stars") cfg.check_stars = false;
            if (s == "size") cfg.check_size = false;
            if (s == "license") cfg.check_license = false;
        }
        try {
            validate(cfg);
        } catch (const ValidationError& e) {
            throw CLI::ValidationError(e.field(), e.what());
        }
        return cfg;
    }
};

struct ExtractArgs {
    std::vector<std::string> repos;
    std::vector<std::string> diff_dirs;
    std::string eligible;
    std::size_t max_edits = kMaxEditsPerCommit;
    std::string keyword = "typo";
    bool case_sensitive = false;

    void add_to(CLI::App& app, bool with_eligible) {
        app.add_option("--repos", repos, "Repository, directory of repositories, or list file");
        app.add_option("--diff-dir", diff_dirs, "Directory of diff sets (owner/name/*.diff)");
        if (with_eligible)
            app.add_option("--eligible", eligible, "Only repositories named in this harvest output")
                ->check(CLI::ExistingFile);
        app.add_option("--max-edits", max_edits, "Drop commits with more edits than this")
            ->capture_default_str()
            ->check(CLI::PositiveNumber & CLI::Range(1, 10));
        app.add_option("--keyword", keyword, "Commit message keyword")->capture_default_str();
        app.add_flag("--case-sensitive", case_sensitive, "Match the keyword literally");
    }

    ExtractOptions options() const {
        ExtractOptions o;
        o.keyword = keyword;
        o.case_sensitive = case_sensitive;
        o.max_edits = max_edits;
        return o;
    }

    std::vector<RepoLocation> locations() const {
        std::vector<std::string> roots = repos;
        roots.insert(roots.end(), diff_dirs.begin(), diff_dirs.end());
        if (roots.empty()) throw CLI::RequiredError("--repos or --diff-dir");
        return discover_all(roots);
    }
};

std::vector<RepoLocation> restrict_to(std::vector<RepoLocation> repos, const std::vector<RepoMeta>& eligible) {
    std::set<std::string> names;
    for (const auto& m : eligible) names.insert(m.full_name);
    std::erase_if(repos, [&](const RepoLocation& r) { return !names.count(r.name); });
    return repos;
}

struct FilterArgs {
    std::string profiles;
    double code_threshold = 0.5;
    double min_confidence = 0.5;

    void add_to(CLI::App& app) {
        app.add_option("--profiles", profiles, "Directory of *.profile.json language profiles")
            ->required()
            ->check(CLI::ExistingDirectory);
        app.add_option("--code-threshold", code_threshold, "Reject sides at or above this code likeness")
            ->capture_default_str()
            ->check(CLI::Range(0.0, 1.0));
        app.add_option("--min-confidence", min_confidence, "Minimum language detection confidence")
            ->capture_default_str()
            ->check(CLI::Range(0.0, 1.0));
    }

    LangFilterConfig config() const { return {code_threshold, min_confidence}; }
};

std::string harvest_text(const std::vector<RepoMeta>& metas) {
    std::string out;
    for (const auto& m : metas) out += serialize_repo_meta(m) + "\n";
    return out;
}

void put_harvest_counts(const HarvestReport& rep, ojson& counts) {
    counts["lines"] = rep.lines;
    counts["malformed"] = rep.malformed;
    counts["qualifying_events"] = rep.qualifying_events;
    counts["distinct_repos"] = rep.distinct_repos;
    counts["eligible"] = rep.eligible;
}

std::string scores_line(const PrfScores& s) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.6f\t%.6f\t%.6f\n", s.precision, s.recall, s.f1);
    return std::string("precision\trecall\tf1\n") + buf;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Build a typo-edit corpus from commit histories and evaluate it", "typocorpus"};
    app.set_version_flag("--version", kToolVersion);
    app.set_config("--config", "", "Read options from a TOML file; command-line flags win");
    app.allow_config_extras(CLI::config_extras_mode::error);
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", g.seed, "Random seed for cross-validation")->capture_default_str();
    app.add_flag("--quiet,-q", g.quiet, "Only print warnings and errors");
    const Log log(err, g.quiet);

    std::istream& in = std::cin;
    std::map<CLI::App*, std::function<void()>> actions;
    auto manifest_for = [&g](CLI::App* sub) {
        Manifest m;
        m.command = sub->get_name();
        m.config = "seed=" + std::to_string(g.seed) + "\n" + sub->config_to_str(true, false);
        return m;
    };

    // harvest
    HarvestArgs harvest_args;
    {
        auto* sub = app.add_subcommand("harvest", "Select eligible repositories from event dumps");
        harvest_args.add_to(*sub);
        auto* out_opt = sub->add_option("--out", "Output JSONL (default stdout)");
        actions[sub] = [&, sub, out_opt] {
            const auto cfg = harvest_args.config();
            const auto files = expand_inputs(harvest_args.dumps, ".jsonl");
            HarvestReport rep;
            const auto metas = harvest(files, cfg, &rep, g.workers);
            if (rep.malformed) log.warn(rep.malformed, " malformed event lines skipped");
            Manifest m = manifest_for(sub);
            m.inputs = files;
            put_harvest_counts(rep, m.counts);
            emit(out_opt->as<std::string>(), harvest_text(metas), out, m);
            log.info("harvest: ", rep.eligible, " eligible of ", rep.distinct_repos, " repositories");
        };
    }

    // extract
    ExtractArgs extract_args;
    {
        auto* sub = app.add_subcommand("extract", "Extract typo-commit edits from repositories");
        extract_args.add_to(*sub, true);
        auto* out_opt = sub->add_option("--out", "Output JSONL (default stdout)");
        actions[sub] = [&, sub, out_opt] {
            auto repos = extract_args.locations();
            Manifest m = manifest_for(sub);
            for (const auto& r : repos) m.inputs.push_back(r.path);
            if (!extract_args.eligible.empty()) {
                repos = restrict_to(std::move(repos), read_repo_metas(extract_args.eligible));
                m.inputs.emplace_back(extract_args.eligible);
            }
            const auto corpus = run_extract(repos, extract_args.options(), g.workers, log, m.counts);
            emit(out_opt->as<std::string>(), corpus_text(corpus), out, m);
            log.info("extract: ", corpus.size(), " records from ", repos.size(), " repositories");
        };
    }

    // langfilter
    FilterArgs filter_args;
    {
        auto* sub = app.add_subcommand("langfilter", "Drop code-like and language-mismatched edits");
        auto* in_opt = sub->add_option("--in", "Input JSONL (default stdin)");
        auto* out_opt = sub->add_option("--out", "Output JSONL (default stdout)");
        filter_args.add_to(*sub);
        actions[sub] = [&, sub, in_opt, out_opt] {
            const std::string in_path = in_opt->empty() ? "" : in_opt->as<std::string>();
            ParseWarnings w;
            auto corpus = load_corpus(in_path, in, &w);
            const LanguageDetector detector(load_profiles(filter_args.profiles));
            Manifest m = manifest_for(sub);
            if (!in_path.empty()) m.inputs.emplace_back(in_path);
            m.inputs.emplace_back(filter_args.profiles);
            m.counts["unknown_keys"] = w.unknown_keys;
            const auto kept = run_langfilter(std::move(corpus), detector, filter_args.config(), g.workers, m.counts);
            emit(out_opt->empty() ? "" : out_opt->as<std::string>(), corpus_text(kept), out, m);
        };
    }

    // featurize
    std::string models_dir;
    {
        auto* sub = app.add_subcommand("featurize", "Add perplexities and classifier features to edits");
        auto* in_opt = sub->add_option("--in", "Input JSONL (default stdin)");
        auto* out_opt = sub->add_option("--out", "Output JSONL (default stdout)");
        sub->add_option("--models", models_dir, "Directory of <lang>.lm models")
            ->required()
            ->check(CLI::ExistingDirectory);
        actions[sub] = [&, sub, in_opt, out_opt] {
            const std::string in_path = in_opt->empty() ? "" : in_opt->as<std::string>();
            ParseWarnings w;
            auto corpus = load_corpus(in_path, in, &w);
            const auto models = load_models(models_dir);
            Manifest m = manifest_for(sub);
            if (!in_path.empty()) m.inputs.emplace_back(in_path);
            m.inputs.emplace_back(models_dir);
            const auto done = run_featurize(std::move(corpus), models, g.workers, log, m.counts);
            emit(out_opt->empty() ? "" : out_opt->as<std::string>(), corpus_text(done), out, m);
        };
    }

    // train-classifier
    std::string annotations;
    std::string train_lang = "eng";
    TrainOptions train_opts;
    {
        auto* sub = app.add_subcommand("train-classifier", "Fit the logistic typo classifier on annotated edits");
        sub->add_option("--annotations", annotations, "TSV of src, tgt, category")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--models", models_dir, "Directory of <lang>.lm models")
            ->required()
            ->check(CLI::ExistingDirectory);
        sub->add_option("--lang", train_lang, "Language of the annotations")->capture_default_str();
        sub->add_option("--max-iter", train_opts.max_iter, "Iteration cap")->capture_default_str();
        sub->add_option("--tol", train_opts.tol, "Stop when the loss improves by less than this")
            ->capture_default_str();
        auto* out_opt = sub->add_option("--out", "Weights JSON file")->required();
        actions[sub] = [&, sub, out_opt] {
            const auto models = load_models(models_dir);
            const auto model = models.find(train_lang);
            if (model == models.end()) throw DataError("no language model for '" + train_lang + "'");
            const auto data = load_annotations(annotations, model->second, log);
            TrainReport rep;
            WeightsFile wf;
            wf.weights = train(data, train_opts, &rep);
            wf.trained_on = fs::path(annotations).filename().string();
            wf.seed = g.seed;
            if (rep.hit_max_iter)
                log.warn("training stopped at the iteration cap (", rep.iterations,
                         "); the data may be separable and the weights unbounded");
            const std::string path = out_opt->as<std::string>();
            save_weights(wf, path);
            Manifest m = manifest_for(sub);
            m.inputs = {annotations, models_dir};
            m.counts["examples"] = data.size();
            m.counts["iterations"] = rep.iterations;
            m.counts["final_loss"] = rep.final_loss;
            m.counts["gradient_norm"] = rep.gradient_norm;
            m.write_beside(path);
            log.info("train-classifier: ", data.size(), " examples, ", rep.iterations, " iterations, loss ",
                     rep.final_loss);
        };
    }

    // classify
    std::string weights_path;
    {
        auto* sub = app.add_subcommand("classify", "Attach typo-ness scores and labels to featurized edits");
        auto* in_opt = sub->add_option("--in", "Input JSONL (default stdin)");
        auto* out_opt = sub->add_option("--out", "Output JSONL (default stdout)");
        sub->add_option("--weights", weights_path, "Weights file, or directory of <lang>.weights.json")
            ->required()
            ->check(CLI::ExistingPath);
        actions[sub] = [&, sub, in_opt, out_opt] {
            const std::string in_path = in_opt->empty() ? "" : in_opt->as<std::string>();
            ParseWarnings w;
            auto corpus = load_corpus(in_path, in, &w);
            const auto weights = load_weight_set(weights_path);
            Manifest m = manifest_for(sub);
            if (!in_path.empty()) m.inputs.emplace_back(in_path);
            m.inputs.emplace_back(weights_path);
            const auto done = run_classify(std::move(corpus), weights, g.workers, log, m.counts);
            emit(out_opt->empty() ? "" : out_opt->as<std::string>(), corpus_text(done), out, m);
        };
    }

    // cv
    std::size_t folds = 10;
    {
        auto* sub = app.add_subcommand("cv", "Cross-validate the classifier on annotated edits");
        sub->add_option("--annotations", annotations, "TSV of src, tgt, category")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--models", models_dir, "Directory of <lang>.lm models")
            ->required()
            ->check(CLI::ExistingDirectory);
        sub->add_option("--lang", train_lang, "Language of the annotations")->capture_default_str();
        sub->add_option("--folds,-k", folds, "Number of folds")->capture_default_str()->check(CLI::Range(2, 1000));
        auto* out_opt = sub->add_option("--out", "Output TSV (default stdout)");
        actions[sub] = [&, sub, out_opt] {
            const auto models = load_models(models_dir);
            const auto model = models.find(train_lang);
            if (model == models.end()) throw DataError("no language model for '" + train_lang + "'");
            const auto data = load_annotations(annotations, model->second, log);
            const auto scores = cross_validate(data, folds, g.seed);
            Manifest m = manifest_for(sub);
            m.inputs = {annotations, models_dir};
            m.counts["examples"] = data.size();
            m.counts["folds"] = folds;
            emit(out_opt->empty() ? "" : out_opt->as<std::string>(), scores_line(scores), out, m);
        };
    }

    // atomic-stats
    std::size_t top = 30;
    bool typo_only = false;
    bool pretty = false;
    {
        auto* sub = app.add_subcommand("atomic-stats", "Most frequent atomic edits per language");
        auto* in_opt = sub->add_option("--in", "Input JSONL (default stdin)");
        auto* out_opt = sub->add_option("--out", "Output TSV (default stdout)");
        sub->add_option("--top", top, "Entries per language (0 = all)")->capture_default_str();
        sub->add_flag("--typo-only", typo_only, "Count only edits labeled as typos");
        sub->add_flag("--pretty", pretty, "Human-readable: '_' for spaces, 'φ' for empty strings");
        actions[sub] = [&, sub, in_opt, out_opt] {
            const std::string in_path = in_opt->empty() ? "" : in_opt->as<std::string>();
            const auto corpus = load_corpus(in_path, in, nullptr);
            const auto tables = frequency_table(corpus, top, typo_only);
            std::string text = "lang\tsrc_text\ttgt_text\tcount\n";
            for (const auto& [lang, rows] : tables)
                for (const auto& r : rows) {
                    const std::string s = pretty ? visible_text(r.src_text) : escape_field(r.src_text);
                    const std::string t = pretty ? visible_text(r.tgt_text) : escape_field(r.tgt_text);
                    text += lang + "\t" + s + "\t" + t + "\t" + std::to_string(r.count) + "\n";
                }
            Manifest m = manifest_for(sub);
            if (!in_path.empty()) m.inputs.emplace_back(in_path);
            m.counts["records"] = corpus.size();
            m.counts["languages"] = tables.size();
            emit(out_opt->empty() ? "" : out_opt->as<std::string>(), text, out, m);
        };
    }

    // stats
    std::size_t stats_top = 0;
    bool tsv = false;
    {
        auto* sub = app.add_subcommand("stats", "Per-language corpus statistics");
        auto* in_opt = sub->add_option("--in", "Input JSONL (default stdin)");
        auto* out_opt = sub->add_option("--out", "Also write the report as TSV here");
        sub->add_option("--top", stats_top, "Languages to list before folding the rest (0 = all)")
            ->capture_default_str();
        sub->add_flag("--tsv", tsv, "Print TSV instead of a table");
        actions[sub] = [&, sub, in_opt, out_opt] {
            const std::string in_path = in_opt->empty() ? "" : in_opt->as<std::string>();
            const auto corpus = load_corpus(in_path, in, nullptr);
            const auto report = corpus_stats(corpus, stats_top);
            out << (tsv ? render_stats_tsv(report) : render_stats_table(report));
            if (!out_opt->empty()) {
                Manifest m = manifest_for(sub);
                if (!in_path.empty()) m.inputs.emplace_back(in_path);
                m.counts["records"] = corpus.size();
                emit(out_opt->as<std::string>(), render_stats_tsv(report), out, m);
            }
        };
    }

    // eval
    std::string gold_path;
    std::string system_path;
    double beta = 0.5;
    {
        auto* sub = app.add_subcommand("eval", "Score spell-checker output against gold edits per category");
        sub->add_option("--gold", gold_path, "Gold TSV: id, category, src, tgt")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--system", system_path, "System TSV: id, hypothesis")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--beta", beta, "F-measure beta")->capture_default_str()->check(CLI::PositiveNumber);
        auto* out_opt = sub->add_option("--out", "Also write the scores as TSV here");
        sub->add_flag("--tsv", tsv, "Print TSV instead of a table");
        actions[sub] = [&, sub, out_opt] {
            const auto scores = score_system(read_gold_tsv(gold_path), read_system_tsv(system_path));
            out << (tsv ? render_scores_tsv(scores, beta) : render_scores_table(scores, beta));
            if (!out_opt->empty()) {
                Manifest m = manifest_for(sub);
                m.inputs = {gold_path, system_path};
                m.counts["categories"] = scores.size();
                emit(out_opt->as<std::string>(), render_scores_tsv(scores, beta), out, m);
            }
        };
    }

    // train-lm
    std::vector<std::string> corpora;
    std::string out_dir;
    int lm_order = 5;
    {
        auto* sub = app.add_subcommand("train-lm", "Train character language models");
        sub->add_option("--corpus", corpora, "LANG=PATH of a plain-text training file (repeatable)")->required();
        sub->add_option("--order", lm_order, "n-gram order")->capture_default_str()->check(CLI::Range(2, 12));
        sub->add_option("--out", out_dir, "Directory for <lang>.lm files")->required();
        actions[sub] = [&, sub] {
            for (const auto& arg : corpora) {
                const auto [lang, path] = split_lang_path(arg);
                const auto model = train_lm_text(read_file(path), lm_order);
                const fs::path target = fs::path(out_dir) / (lang + ".lm");
                fs::create_directories(out_dir);
                write_file(target, model.serialize());
                Manifest m = manifest_for(sub);
                m.inputs = {path};
                m.counts["order"] = lm_order;
                m.counts["vocabulary"] = model.vocabulary().size();
                m.write_beside(target);
                log.info("train-lm: wrote ", target.string());
            }
        };
    }

    // train-profiles
    {
        auto* sub = app.add_subcommand("train-profiles", "Train language identification profiles");
        sub->add_option("--corpus", corpora, "LANG=PATH of a plain-text training file (repeatable)")->required();
        sub->add_option("--out", out_dir, "Directory for <lang>.profile.json files")->required();
        actions[sub] = [&, sub] {
            std::map<std::string, fs::path> files;
            for (const auto& arg : corpora) {
                auto [lang, path] = split_lang_path(arg);
                if (!files.emplace(lang, path).second) throw DataError("language given twice: " + lang);
            }
            const auto profiles = train_profiles(files);
            fs::create_directories(out_dir);
            save_profiles(profiles, out_dir);
            for (const auto& p : profiles) {
                Manifest m = manifest_for(sub);
                m.inputs = {files.at(p.lang)};
                m.counts["unigrams"] = p.counts[0].size();
                m.write_beside(fs::path(out_dir) / (p.lang + ".profile.json"));
            }
            log.info("train-profiles: wrote ", profiles.size(), " profiles to ", out_dir);
        };
    }

    // pipeline: every stage in one process, same bytes as running them apart
    std::vector<std::string> dumps;
    std::string work_dir;
    HarvestArgs pipe_harvest;
    ExtractArgs pipe_extract;
    FilterArgs pipe_filter;
    {
        auto* sub = app.add_subcommand("pipeline", "Run harvest, extract, langfilter, featurize and classify");
        pipe_harvest.add_to(*sub);
        sub->get_option("--dump")->required(false);
        pipe_extract.add_to(*sub, false);
        pipe_filter.add_to(*sub);
        sub->add_option("--models", models_dir, "Directory of <lang>.lm models")
            ->required()
            ->check(CLI::ExistingDirectory);
        sub->add_option("--weights", weights_path, "Weights file, or directory of <lang>.weights.json")
            ->required()
            ->check(CLI::ExistingPath);
        sub->add_option("--work-dir", work_dir, "Also keep every intermediate stage output here");
        auto* out_opt = sub->add_option("--out", "Output JSONL (default stdout)");
        actions[sub] = [&, sub, out_opt] {
            Manifest m = manifest_for(sub);
            auto keep = [&](const std::string& name, const std::string& text, const Manifest& stage) {
                if (work_dir.empty()) return;
                const fs::path p = fs::path(work_dir) / name;
                write_file(p, text);
                stage.write_beside(p);
            };
            auto repos = pipe_extract.locations();
            for (const auto& r : repos) m.inputs.push_back(r.path);
            if (!pipe_harvest.dumps.empty()) {
                const auto files = expand_inputs(pipe_harvest.dumps, ".jsonl");
                HarvestReport rep;
                const auto metas = harvest(files, pipe_harvest.config(), &rep, g.workers);
                Manifest stage = m;
                stage.inputs = files;
                put_harvest_counts(rep, stage.counts);
                keep("eligible.jsonl", harvest_text(metas), stage);
                put_harvest_counts(rep, m.counts["harvest"]);
                m.inputs.insert(m.inputs.end(), files.begin(), files.end());
                repos = restrict_to(std::move(repos), metas);
            }
            Manifest stage = m;
            stage.counts = ojson::object();
            auto corpus = run_extract(repos, pipe_extract.options(), g.workers, log, stage.counts);
            keep("extracted.jsonl", corpus_text(corpus), stage);
            m.counts["extract"] = stage.counts;

            stage.counts = ojson::object();
            const LanguageDetector detector(load_profiles(pipe_filter.profiles));
            corpus = run_langfilter(std::move(corpus), detector, pipe_filter.config(), g.workers, stage.counts);
            keep("filtered.jsonl", corpus_text(corpus), stage);
            m.counts["langfilter"] = stage.counts;

            stage.counts = ojson::object();
            corpus = run_featurize(std::move(corpus), load_models(models_dir), g.workers, log, stage.counts);
            keep("featurized.jsonl", corpus_text(corpus), stage);
            m.counts["featurize"] = stage.counts;

            stage.counts = ojson::object();
            corpus = run_classify(std::move(corpus), load_weight_set(weights_path), g.workers, log, stage.counts);
            m.counts["classify"] = stage.counts;
            m.inputs.insert(m.inputs.end(), {pipe_filter.profiles, models_dir, weights_path});
            emit(out_opt->empty() ? "" : out_opt->as<std::string>(), corpus_text(corpus), out, m);
            log.info("pipeline: ", corpus.size(), " records");
        };
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << '\n';
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        const auto rest = app.remaining();
        if (app.get_subcommands().empty() && !rest.empty())
            err << "typocorpus: unknown subcommand '" << rest.front() << "'\n\n" << app.help();
        else
            err << "typocorpus: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    CLI::App* chosen = app.get_subcommands().front();
    try {
        actions.at(chosen)();
    } catch (const CLI::ParseError& e) {
        err << "typocorpus: " << e.what() << "\n\n" << chosen->help();
        return kExitUsage;
    } catch (const IoError& e) {
        err << "typocorpus: I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        err << "typocorpus: I/O error: " << e.what() << '\n';
        return kExitIo;
    } catch (const ValidationError& e) {
        err << "typocorpus: invalid data: " << e.what() << '\n';
        return kExitData;
    } catch (const ParseError& e) {
        err << "typocorpus: malformed input: " << e.what() << '\n';
        return kExitData;
    } catch (const DataError& e) {
        err << "typocorpus: " << e.what() << '\n';
        return kExitData;
    } catch (const std::invalid_argument& e) {
        err << "typocorpus: " << e.what() << '\n';
        return kExitData;
    }
    return kExitOk;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.push_back("typocorpus");
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace typocorpus::cli
