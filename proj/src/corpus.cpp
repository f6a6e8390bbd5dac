#include "typocorpus/corpus.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "typocorpus/errors.hpp"
#include "typocorpus/unicode.hpp"

namespace typocorpus {

using ojson = nlohmann::ordered_json;

namespace {

int parse_fixed_int(std::string_view text, std::size_t pos, std::size_t len) {
    if (pos + len > text.size()) throw std::invalid_argument("timestamp too short");
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') throw std::invalid_argument("bad digit in timestamp");
        v = v * 10 + (c - '0');
    }
    return v;
}

void expect_char(std::string_view text, std::size_t pos, char c) {
    if (pos >= text.size() || text[pos] != c) throw std::invalid_argument("malformed timestamp");
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
    using namespace std::chrono;
    const int y = parse_fixed_int(text, 0, 4);
    expect_char(text, 4, '-');
    const int mo = parse_fixed_int(text, 5, 2);
    expect_char(text, 7, '-');
    const int d = parse_fixed_int(text, 8, 2);
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) throw std::invalid_argument("invalid calendar date");
    Timestamp ts = sys_days{ymd};
    if (text.size() == 10) return ts;
    if (text[10] != 'T' && text[10] != ' ') throw std::invalid_argument("malformed timestamp");
    const int hh = parse_fixed_int(text, 11, 2);
    expect_char(text, 13, ':');
    const int mm = parse_fixed_int(text, 14, 2);
    expect_char(text, 16, ':');
    const int ss = parse_fixed_int(text, 17, 2);
    if (hh > 23 || mm > 59 || ss > 60) throw std::invalid_argument("time out of range");
    ts += hours{hh} + minutes{mm} + seconds{ss};
    std::size_t pos = 19;
    if (pos < text.size() && text[pos] == '.') {
        ++pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
    }
    if (pos == text.size()) return ts;
    if (text[pos] == 'Z' && pos + 1 == text.size()) return ts;
    if ((text[pos] == '+' || text[pos] == '-') && pos + 6 == text.size()) {
        const int oh = parse_fixed_int(text, pos + 1, 2);
        expect_char(text, pos + 3, ':');
        const int om = parse_fixed_int(text, pos + 4, 2);
        const auto offset = hours{oh} + minutes{om};
        return text[pos] == '+' ? ts - offset : ts + offset;
    }
    throw std::invalid_argument("malformed timestamp zone");
}

std::string format_timestamp(Timestamp ts) {
    using namespace std::chrono;
    const auto day_point = floor<days>(ts);
    const year_month_day ymd{day_point};
    const hh_mm_ss hms{ts - day_point};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

void validate(const RepoMeta& meta) {
    const auto slash = meta.full_name.find('/');
    if (slash == std::string::npos || meta.full_name.find('/', slash + 1) != std::string::npos)
        throw ValidationError("full_name", "must contain exactly one '/'");
    if (meta.stars < 0) throw ValidationError("stars", "must be non-negative");
    if (meta.size_bytes < 0) throw ValidationError("size_bytes", "must be non-negative");
}

std::string_view to_string(Category c) {
    switch (c) {
    case Category::mechanical: return "mechanical";
    case Category::spell: return "spell";
    case Category::grammatical: return "grammatical";
    case Category::semantic: return "semantic";
    }
    return "semantic";
}

std::optional<Category> parse_category(std::string_view name) {
    if (name == "mechanical") return Category::mechanical;
    if (name == "spell") return Category::spell;
    if (name == "grammatical") return Category::grammatical;
    if (name == "semantic") return Category::semantic;
    return std::nullopt;
}

bool is_commit_hash(std::string_view s) {
    if (s.size() != 40) return false;
    for (char c : s) {
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    }
    return true;
}

void validate(const FeatureVector& f, const std::string& field) {
    if (!std::isfinite(f.ppl_ratio) || f.ppl_ratio <= 0.0)
        throw ValidationError(field + ".ppl_ratio", "must be a positive finite number");
    if (!(f.norm_dist >= 0.0 && f.norm_dist <= 1.0)) throw ValidationError(field + ".norm_dist", "must lie in [0,1]");
    if (f.numeric_only != 0 && f.numeric_only != 1) throw ValidationError(field + ".numeric_only", "must be 0 or 1");
}

void validate(const EditSide& side, const std::string& field) {
    if (side.text.find_first_of("\r\n") != std::string::npos)
        throw ValidationError(field + ".text", "must not contain line breaks");
    if (!is_valid_utf8(side.text)) throw ValidationError(field + ".text", "must be valid UTF-8");
    if (side.ppl && !(std::isfinite(*side.ppl) && *side.ppl >= 1.0))
        throw ValidationError(field + ".ppl", "must be a finite value >= 1");
}

void validate(const Edit& edit, const std::string& field) {
    validate(edit.src, field + ".src");
    validate(edit.tgt, field + ".tgt");
    if (edit.src.text == edit.tgt.text) throw ValidationError(field + ".tgt.text", "must differ from src.text");
    if (edit.features) validate(*edit.features, field + ".features");
    if (edit.prob_typo && !(*edit.prob_typo >= 0.0 && *edit.prob_typo <= 1.0))
        throw ValidationError(field + ".prob_typo", "must lie in [0,1]");
    if (edit.is_typo) {
        if (!edit.prob_typo) throw ValidationError(field + ".is_typo", "requires prob_typo");
        if (*edit.is_typo != (*edit.prob_typo >= kTypoDecisionThreshold))
            throw ValidationError(field + ".is_typo", "inconsistent with prob_typo");
    }
}

void validate(const CommitRecord& rec) {
    if (!is_commit_hash(rec.commit)) throw ValidationError("commit", "must be 40 lowercase hex characters");
    if (rec.edits.empty() || rec.edits.size() > kMaxEditsPerCommit)
        throw ValidationError("edits", "must hold between 1 and 10 edits, got " + std::to_string(rec.edits.size()));
    if (!is_valid_utf8(rec.repo)) throw ValidationError("repo", "must be valid UTF-8");
    if (!is_valid_utf8(rec.message)) throw ValidationError("message", "must be valid UTF-8");
    for (std::size_t i = 0; i < rec.edits.size(); ++i) validate(rec.edits[i], "edits[" + std::to_string(i) + "]");
}

namespace {

ojson side_to_json(const EditSide& side) {
    ojson j;
    j["text"] = side.text;
    if (side.lang) j["lang"] = *side.lang;
    if (side.ppl) j["ppl"] = *side.ppl;
    return j;
}

ojson edit_to_json(const Edit& e) {
    ojson j;
    j["src"] = side_to_json(e.src);
    j["tgt"] = side_to_json(e.tgt);
    if (e.features) {
        ojson f;
        f["ppl_ratio"] = e.features->ppl_ratio;
        f["norm_dist"] = e.features->norm_dist;
        f["numeric_only"] = e.features->numeric_only;
        j["features"] = std::move(f);
    }
    if (e.prob_typo) j["prob_typo"] = *e.prob_typo;
    if (e.is_typo) j["is_typo"] = *e.is_typo;
    if (e.category) j["category"] = std::string(to_string(*e.category));
    return j;
}

// Field accessors that turn type mismatches into ParseError. Offsets are not
// tracked past the JSON parser, so structural errors report byte 0.
class Reader {
public:
    explicit Reader(ParseWarnings* warnings) : warnings_(warnings) {}

    const ojson& object(const ojson& j, const std::string& path) const {
        if (!j.is_object()) fail(path, "expected object");
        return j;
    }

    void check_keys(const ojson& j, std::initializer_list<std::string_view> known) const {
        for (const auto& item : j.items()) {
            bool found = false;
            for (auto k : known) found = found || item.key() == k;
            if (!found && warnings_) ++warnings_->unknown_keys;
        }
    }

    const ojson* find(const ojson& j, const char* key) const {
        auto it = j.find(key);
        if (it == j.end() || it->is_null()) return nullptr;
        return &*it;
    }

    const ojson& require(const ojson& j, const char* key, const std::string& path) const {
        const ojson* v = find(j, key);
        if (!v) fail(path + "." + key, "missing required field");
        return *v;
    }

    std::string string(const ojson& v, const std::string& path) const {
        if (!v.is_string()) fail(path, "expected string");
        return v.get<std::string>();
    }

    double number(const ojson& v, const std::string& path) const {
        if (!v.is_number()) fail(path, "expected number");
        return v.get<double>();
    }

    bool boolean(const ojson& v, const std::string& path) const {
        if (!v.is_boolean()) fail(path, "expected boolean");
        return v.get<bool>();
    }

    [[noreturn]] void fail(const std::string& path, const std::string& what) const {
        throw ParseError(0, path + ": " + what);
    }

private:
    ParseWarnings* warnings_;
};

EditSide side_from_json(const Reader& r, const ojson& j, const std::string& path) {
    r.object(j, path);
    r.check_keys(j, {"text", "lang", "ppl"});
    EditSide side;
    side.text = r.string(r.require(j, "text", path), path + ".text");
    if (const auto* v = r.find(j, "lang")) side.lang = r.string(*v, path + ".lang");
    if (const auto* v = r.find(j, "ppl")) side.ppl = r.number(*v, path + ".ppl");
    return side;
}

Edit edit_from_json(const Reader& r, const ojson& j, const std::string& path) {
    r.object(j, path);
    r.check_keys(j, {"src", "tgt", "features", "prob_typo", "is_typo", "category"});
    Edit e;
    e.src = side_from_json(r, r.require(j, "src", path), path + ".src");
    e.tgt = side_from_json(r, r.require(j, "tgt", path), path + ".tgt");
    if (const auto* f = r.find(j, "features")) {
        const std::string fp = path + ".features";
        r.object(*f, fp);
        r.check_keys(*f, {"ppl_ratio", "norm_dist", "numeric_only"});
        FeatureVector fv;
        fv.ppl_ratio = r.number(r.require(*f, "ppl_ratio", fp), fp + ".ppl_ratio");
        fv.norm_dist = r.number(r.require(*f, "norm_dist", fp), fp + ".norm_dist");
        const auto& num = r.require(*f, "numeric_only", fp);
        if (!num.is_number_integer()) r.fail(fp + ".numeric_only", "expected integer");
        fv.numeric_only = num.get<int>();
        e.features = fv;
    }
    if (const auto* v = r.find(j, "prob_typo")) e.prob_typo = r.number(*v, path + ".prob_typo");
    if (const auto* v = r.find(j, "is_typo")) e.is_typo = r.boolean(*v, path + ".is_typo");
    if (const auto* v = r.find(j, "category")) {
        const auto name = r.string(*v, path + ".category");
        const auto cat = parse_category(name);
        if (!cat) throw ValidationError(path + ".category", "unknown category '" + name + "'");
        e.category = cat;
    }
    return e;
}

ojson parse_json(std::string_view line) {
    try {
        return ojson::parse(line.begin(), line.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.byte, e.what());
    }
}

}  // namespace

std::string serialize_commit(const CommitRecord& rec) {
    validate(rec);
    ojson j;
    j["repo"] = rec.repo;
    j["commit"] = rec.commit;
    j["message"] = rec.message;
    ojson edits = ojson::array();
    for (const auto& e : rec.edits) edits.push_back(edit_to_json(e));
    j["edits"] = std::move(edits);
    return j.dump();
}

CommitRecord parse_commit(std::string_view line, ParseWarnings* warnings) {
    const ojson j = parse_json(line);
    const Reader r(warnings);
    r.object(j, "record");
    r.check_keys(j, {"repo", "commit", "message", "edits"});
    CommitRecord rec;
    rec.repo = r.string(r.require(j, "repo", "record"), "repo");
    rec.commit = r.string(r.require(j, "commit", "record"), "commit");
    rec.message = r.string(r.require(j, "message", "record"), "message");
    const auto& edits = r.require(j, "edits", "record");
    if (!edits.is_array()) r.fail("edits", "expected array");
    for (std::size_t i = 0; i < edits.size(); ++i)
        rec.edits.push_back(edit_from_json(r, edits[i], "edits[" + std::to_string(i) + "]"));
    validate(rec);
    return rec;
}

std::string serialize_repo_meta(const RepoMeta& meta) {
    validate(meta);
    ojson j;
    j["full_name"] = meta.full_name;
    j["stars"] = meta.stars;
    j["size_bytes"] = meta.size_bytes;
    j["license_id"] = meta.license_id;
    j["last_event_time"] = format_timestamp(meta.last_event_time);
    j["event_kind"] = meta.event_kind;
    return j.dump();
}

RepoMeta parse_repo_meta(std::string_view line) {
    const ojson j = parse_json(line);
    const Reader r(nullptr);
    r.object(j, "repo");
    RepoMeta m;
    m.full_name = r.string(r.require(j, "full_name", "repo"), "full_name");
    const auto& stars = r.require(j, "stars", "repo");
    const auto& size = r.require(j, "size_bytes", "repo");
    if (!stars.is_number_integer()) r.fail("stars", "expected integer");
    if (!size.is_number_integer()) r.fail("size_bytes", "expected integer");
    m.stars = stars.get<std::int64_t>();
    m.size_bytes = size.get<std::int64_t>();
    m.license_id = r.string(r.require(j, "license_id", "repo"), "license_id");
    try {
        m.last_event_time = parse_timestamp(r.string(r.require(j, "last_event_time", "repo"), "last_event_time"));
    } catch (const std::invalid_argument& e) {
        throw ValidationError("last_event_time", e.what());
    }
    m.event_kind = r.string(r.require(j, "event_kind", "repo"), "event_kind");
    validate(m);
    return m;
}

std::vector<CommitRecord> read_corpus(std::istream& in, const std::string& source_name, ParseWarnings* warnings) {
    std::vector<CommitRecord> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(parse_commit(line, warnings));
        } catch (const ParseError& e) {
            throw ParseError(e.byte_offset(), source_name + ":" + std::to_string(lineno) + ": " + e.detail());
        } catch (const ValidationError& e) {
            throw ValidationError(e.field(), source_name + ":" + std::to_string(lineno) + ": " + e.detail());
        }
    }
    if (in.bad()) throw IoError("error reading " + source_name);
    return out;
}

std::vector<CommitRecord> read_corpus(const std::filesystem::path& file, ParseWarnings* warnings) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot read " + file.string());
    return read_corpus(in, file.string(), warnings);
}

void write_corpus(std::ostream& out, const std::vector<CommitRecord>& corpus) {
    for (const auto& rec : corpus) out << serialize_commit(rec) << '\n';
}

std::vector<RepoMeta> read_repo_metas(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot read " + file.string());
    std::vector<RepoMeta> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(parse_repo_meta(line));
        } catch (const ParseError& e) {
            throw ParseError(e.byte_offset(), file.string() + ":" + std::to_string(lineno) + ": " + e.detail());
        }
    }
    return out;
}

}  // namespace typocorpus
