#include "typocorpus/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/beta.hpp>

#include "typocorpus/atomic_edits.hpp"
#include "typocorpus/errors.hpp"
#include "typocorpus/unicode.hpp"

namespace typocorpus {

double fbeta(double precision, double recall, double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
    if (precision == 0.0 && recall == 0.0) return 0.0;
    const double b2 = beta * beta;
    return (1.0 + b2) * precision * recall / (b2 * precision + recall);
}

Prf precision_recall_fbeta(const ConfusionCounts& c, double beta) {
    Prf out;
    out.precision = c.tp + c.fp == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    out.recall = c.tp + c.fn == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    out.f = fbeta(out.precision, out.recall, beta);
    return out;
}

namespace {

struct SpanKey {
    std::size_t start;
    std::size_t end;
    std::string replacement;

    auto operator<=>(const SpanKey&) const = default;
};

bool overlaps(const SpanKey& a, const SpanKey& b) { return a.start <= b.end && b.start <= a.end; }

std::vector<SpanKey> keys(std::string_view src, std::string_view tgt) {
    std::vector<SpanKey> out;
    for (auto& e : atomic_edits(src, tgt)) out.push_back({e.src_start, e.src_end, std::move(e.tgt_text)});
    return out;
}

std::string id_list(const std::vector<std::string>& ids) {
    std::string out;
    for (const auto& id : ids) {
        if (!out.empty()) out += ", ";
        out += id;
    }
    return out;
}

}  // namespace

std::map<std::string, ConfusionCounts> score_system(const std::vector<GoldEdit>& gold,
                                                    const std::vector<SystemOutput>& system) {
    std::map<std::string, const GoldEdit*> gold_by_id;
    std::vector<std::string> dup;
    for (const auto& g : gold)
        if (!gold_by_id.emplace(g.id, &g).second) dup.push_back(g.id);
    std::map<std::string, const SystemOutput*> sys_by_id;
    for (const auto& s : system)
        if (!sys_by_id.emplace(s.id, &s).second) dup.push_back(s.id);
    if (!dup.empty()) throw DataError("duplicate ids: " + id_list(dup));

    std::vector<std::string> no_system;
    std::vector<std::string> no_gold;
    for (const auto& [id, g] : gold_by_id)
        if (!sys_by_id.count(id)) no_system.push_back(id);
    for (const auto& [id, s] : sys_by_id)
        if (!gold_by_id.count(id)) no_gold.push_back(id);
    if (!no_system.empty() || !no_gold.empty()) {
        std::string msg = "gold and system ids differ";
        if (!no_system.empty()) msg += "; missing from system: " + id_list(no_system);
        if (!no_gold.empty()) msg += "; missing from gold: " + id_list(no_gold);
        throw DataError(msg);
    }

    std::map<std::string, ConfusionCounts> out;
    for (const auto& [id, g] : gold_by_id) {
        auto& cat = out[g->category];
        const auto gold_edits = keys(g->src, g->tgt);
        const auto sys_edits = keys(g->src, sys_by_id.at(id)->hypothesis);
        std::vector<char> gold_used(gold_edits.size());
        for (const auto& s : sys_edits) {
            auto hit = std::find(gold_edits.begin(), gold_edits.end(), s);
            while (hit != gold_edits.end() && gold_used[hit - gold_edits.begin()])
                hit = std::find(hit + 1, gold_edits.end(), s);
            if (hit != gold_edits.end()) {
                gold_used[hit - gold_edits.begin()] = 1;
                ++cat.tp;
                continue;
            }
            const bool near_gold =
                std::any_of(gold_edits.begin(), gold_edits.end(), [&](const SpanKey& k) { return overlaps(k, s); });
            ++out[near_gold ? g->category : std::string(kOtherCategory)].fp;
        }
        cat.fn += static_cast<std::uint64_t>(std::count(gold_used.begin(), gold_used.end(), 0));
    }
    return out;
}

namespace {

std::string unescape_field(std::string_view f) {
    std::string out;
    out.reserve(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] != '\\' || i + 1 == f.size()) {
            out += f[i];
            continue;
        }
        switch (f[++i]) {
        case 't': out += '\t'; break;
        case 'n': out += '\n'; break;
        case '\\': out += '\\'; break;
        default:
            out += '\\';
            out += f[i];
        }
    }
    return out;
}

}  // namespace

std::vector<std::vector<std::string>> read_tsv(const std::filesystem::path& file, std::size_t columns) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot read " + file.string());
    std::vector<std::vector<std::string>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::size_t start = 0;
        for (;;) {
            const std::size_t tab = line.find('\t', start);
            fields.push_back(unescape_field(std::string_view(line).substr(start, tab - start)));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (fields.size() != columns)
            throw DataError(file.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(columns) +
                            " fields, got " + std::to_string(fields.size()));
        for (const auto& f : fields)
            if (!is_valid_utf8(f)) throw DataError(file.string() + ":" + std::to_string(lineno) + ": invalid UTF-8");
        rows.push_back(std::move(fields));
    }
    if (in.bad()) throw IoError("error reading " + file.string());
    return rows;
}

std::vector<GoldEdit> read_gold_tsv(const std::filesystem::path& file) {
    std::vector<GoldEdit> out;
    for (auto& r : read_tsv(file, 4)) out.push_back({std::move(r[0]), std::move(r[1]), std::move(r[2]), std::move(r[3])});
    return out;
}

std::vector<SystemOutput> read_system_tsv(const std::filesystem::path& file) {
    std::vector<SystemOutput> out;
    for (auto& r : read_tsv(file, 2)) out.push_back({std::move(r[0]), std::move(r[1])});
    return out;
}

void CorpusStatsBuilder::add(const CommitRecord& rec) {
    std::set<std::string> langs;
    for (const auto& e : rec.edits) {
        const std::string lang = e.src.lang.value_or("unknown");
        auto& acc = per_lang_[lang];
        const std::uint64_t chars = codepoint_length(e.src.text) + codepoint_length(e.tgt.text);
        for (Acc* a : {&acc, &total_}) {
            ++a->edits;
            a->chars += chars;
            if (e.is_typo) {
                a->any_label = true;
                if (*e.is_typo) ++a->typo;
            }
        }
        langs.insert(lang);
    }
    for (const auto& l : langs) ++per_lang_[l].commits;
    ++total_.commits;
    commit_langs_.emplace_back(langs.begin(), langs.end());
}

StatsReport CorpusStatsBuilder::report(std::size_t top_n) const {
    auto to_row = [](const std::string& lang, const Acc& a) {
        StatsRow r;
        r.lang = lang;
        r.n_commits = a.commits;
        if (a.any_label) r.n_typo_edits = a.typo;
        r.n_all_edits = a.edits;
        r.n_chars = a.chars;
        return r;
    };
    StatsReport out;
    for (const auto& [lang, acc] : per_lang_) out.languages.push_back(to_row(lang, acc));
    std::stable_sort(out.languages.begin(), out.languages.end(),
                     [](const StatsRow& a, const StatsRow& b) { return a.n_commits > b.n_commits; });
    out.total = to_row("total", total_);

    if (top_n > 0 && out.languages.size() > top_n) {
        std::set<std::string> rest;
        for (std::size_t i = top_n; i < out.languages.size(); ++i) rest.insert(out.languages[i].lang);
        Acc others;
        for (const auto& l : rest) {
            const Acc& a = per_lang_.at(l);
            others.typo += a.typo;
            others.any_label = others.any_label || a.any_label;
            others.edits += a.edits;
            others.chars += a.chars;
        }
        for (const auto& langs : commit_langs_)
            if (std::any_of(langs.begin(), langs.end(), [&](const std::string& l) { return rest.count(l) > 0; }))
                ++others.commits;
        out.languages.resize(top_n);
        out.languages.push_back(to_row("others", others));
    }
    return out;
}

StatsReport corpus_stats(const std::vector<CommitRecord>& corpus, std::size_t top_n) {
    CorpusStatsBuilder b;
    for (const auto& rec : corpus) b.add(rec);
    return b.report(top_n);
}

namespace {

std::string typo_cell(const StatsRow& r) { return r.n_typo_edits ? std::to_string(*r.n_typo_edits) : "---"; }

std::vector<std::vector<std::string>> stats_cells(const StatsReport& report) {
    std::vector<std::vector<std::string>> rows;
    rows.push_back({"lang", "commits", "typo_edits", "all_edits", "chars"});
    auto add = [&](const StatsRow& r) {
        rows.push_back({r.lang, std::to_string(r.n_commits), typo_cell(r), std::to_string(r.n_all_edits),
                        std::to_string(r.n_chars)});
    };
    for (const auto& r : report.languages) add(r);
    add(report.total);
    return rows;
}

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::vector<std::vector<std::string>> score_cells(const std::map<std::string, ConfusionCounts>& scores, double beta) {
    std::vector<std::vector<std::string>> rows;
    char fname[32];
    std::snprintf(fname, sizeof fname, "f%g", beta);
    rows.push_back({"category", "tp", "fp", "fn", "precision", "recall", fname});
    ConfusionCounts all;
    auto add = [&](const std::string& name, const ConfusionCounts& c) {
        const Prf s = precision_recall_fbeta(c, beta);
        rows.push_back({name, std::to_string(c.tp), std::to_string(c.fp), std::to_string(c.fn), fixed3(s.precision),
                        fixed3(s.recall), fixed3(s.f)});
    };
    for (const auto& [cat, c] : scores) {
        add(cat, c);
        all += c;
    }
    add("all", all);
    return rows;
}

std::string as_tsv(const std::vector<std::vector<std::string>>& rows) {
    std::string out;
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) out += '\t';
            out += r[i];
        }
        out += '\n';
    }
    return out;
}

// First column left-aligned, the rest right-aligned; a rule under the header
// and above the last row.
std::string as_table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width(rows.front().size(), 0);
    for (const auto& r : rows)
        for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], codepoint_length(r[i]));
    std::size_t total = 0;
    for (auto w : width) total += w;
    total += 2 * (width.size() - 1);
    const std::string rule(total, '-');

    std::string out;
    for (std::size_t n = 0; n < rows.size(); ++n) {
        if (n + 1 == rows.size() && rows.size() > 1) out += rule + '\n';
        const auto& r = rows[n];
        for (std::size_t i = 0; i < r.size(); ++i) {
            const std::string pad(width[i] - codepoint_length(r[i]), ' ');
            if (i) out += "  ";
            out += i == 0 ? r[i] + pad : pad + r[i];
        }
        // trailing spaces from a left-aligned last column are not wanted
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += '\n';
        if (n == 0) out += rule + '\n';
    }
    return out;
}

}  // namespace

std::string render_stats_tsv(const StatsReport& report) { return as_tsv(stats_cells(report)); }
std::string render_stats_table(const StatsReport& report) { return as_table(stats_cells(report)); }

std::string render_scores_tsv(const std::map<std::string, ConfusionCounts>& scores, double beta) {
    return as_tsv(score_cells(scores, beta));
}
std::string render_scores_table(const std::map<std::string, ConfusionCounts>& scores, double beta) {
    return as_table(score_cells(scores, beta));
}

double student_t_two_tailed(double t, double df) {
    if (!(df > 0.0)) throw std::invalid_argument("degrees of freedom must be positive");
    if (std::isnan(t)) throw std::invalid_argument("t is NaN");
    if (std::isinf(t)) return 0.0;
    const double x = df / (df + t * t);
    return boost::math::ibeta(df / 2.0, 0.5, x);
}

TTestResult welch_ttest(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("each sample needs at least two values");
    auto moments = [](const std::vector<double>& v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        return std::pair{mean, ss / static_cast<double>(v.size() - 1)};
    };
    const auto [ma, va] = moments(a);
    const auto [mb, vb] = moments(b);
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    const double qa = va / na;
    const double qb = vb / nb;
    const double se2 = qa + qb;
    if (!(se2 > 0.0)) throw std::invalid_argument("both samples have zero variance");
    if (!std::isfinite(se2)) throw std::invalid_argument("samples contain non-finite values");

    TTestResult r;
    r.t = (ma - mb) / std::sqrt(se2);
    r.df = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    r.p_two_tailed = student_t_two_tailed(r.t, r.df);
    return r;
}

}  // namespace typocorpus
