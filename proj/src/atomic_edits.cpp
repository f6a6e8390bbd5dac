#include "typocorpus/atomic_edits.hpp"

#include <algorithm>

namespace typocorpus {

std::vector<AlignOp> align(std::u32string_view x, std::u32string_view y) {
    const std::size_t m = x.size();
    const std::size_t n = y.size();
    const std::size_t w = n + 1;
    std::vector<std::uint32_t> d((m + 1) * w);
    for (std::size_t i = 0; i <= m; ++i) d[i * w] = static_cast<std::uint32_t>(i);
    for (std::size_t j = 0; j <= n; ++j) d[j] = static_cast<std::uint32_t>(j);
    for (std::size_t i = 1; i <= m; ++i) {
        for (std::size_t j = 1; j <= n; ++j) {
            const std::uint32_t diag = d[(i - 1) * w + j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1);
            const std::uint32_t up = d[(i - 1) * w + j] + 1;
            const std::uint32_t left = d[i * w + j - 1] + 1;
            d[i * w + j] = std::min({diag, up, left});
        }
    }

    std::vector<AlignOp> ops;
    ops.reserve(std::max(m, n));
    std::size_t i = m;
    std::size_t j = n;
    while (i > 0 || j > 0) {
        const std::uint32_t here = d[i * w + j];
        if (i > 0 && j > 0 && x[i - 1] == y[j - 1] && d[(i - 1) * w + j - 1] == here) {
            ops.push_back({AlignKind::match, i - 1, j - 1});
            --i;
            --j;
        } else if (i > 0 && j > 0 && d[(i - 1) * w + j - 1] + 1 == here) {
            ops.push_back({AlignKind::substitute, i - 1, j - 1});
            --i;
            --j;
        } else if (i > 0 && d[(i - 1) * w + j] + 1 == here) {
            ops.push_back({AlignKind::del, i - 1, j});
            --i;
        } else {
            ops.push_back({AlignKind::insert, i, j - 1});
            --j;
        }
    }
    std::reverse(ops.begin(), ops.end());
    return ops;
}

std::vector<AlignOp> align(std::string_view x, std::string_view y) { return align(to_codepoints(x), to_codepoints(y)); }

std::size_t alignment_cost(const std::vector<AlignOp>& ops) {
    return static_cast<std::size_t>(
        std::count_if(ops.begin(), ops.end(), [](const AlignOp& op) { return op.kind != AlignKind::match; }));
}

std::string_view to_string(AtomicKind k) {
    switch (k) {
    case AtomicKind::insert: return "insert";
    case AtomicKind::del: return "delete";
    case AtomicKind::substitute: return "substitute";
    }
    return "substitute";
}

std::vector<AtomicEdit> atomic_edits(std::string_view x, std::string_view y) {
    const Codepoints xs = to_codepoints(x);
    const Codepoints ys = to_codepoints(y);
    const auto ops = align(xs, ys);

    std::vector<AtomicEdit> out;
    std::size_t src = 0;
    std::size_t tgt = 0;
    std::size_t k = 0;
    while (k < ops.size()) {
        if (ops[k].kind == AlignKind::match) {
            ++src;
            ++tgt;
            ++k;
            continue;
        }
        AtomicEdit e{};
        e.src_start = src;
        e.tgt_start = tgt;
        bool consumed_src = false;
        bool consumed_tgt = false;
        for (; k < ops.size() && ops[k].kind != AlignKind::match; ++k) {
            if (ops[k].kind != AlignKind::insert) {
                ++src;
                consumed_src = true;
            }
            if (ops[k].kind != AlignKind::del) {
                ++tgt;
                consumed_tgt = true;
            }
        }
        e.src_end = src;
        e.tgt_end = tgt;
        e.kind = !consumed_src ? AtomicKind::insert : !consumed_tgt ? AtomicKind::del : AtomicKind::substitute;
        e.src_text = to_utf8(std::u32string_view(xs).substr(e.src_start, e.src_end - e.src_start));
        e.tgt_text = to_utf8(std::u32string_view(ys).substr(e.tgt_start, e.tgt_end - e.tgt_start));
        out.push_back(std::move(e));
    }
    return out;
}

std::string apply_atomic_edits(std::string_view x, const std::vector<AtomicEdit>& edits) {
    const Codepoints xs = to_codepoints(x);
    std::string out;
    std::size_t pos = 0;
    for (const auto& e : edits) {
        out += to_utf8(std::u32string_view(xs).substr(pos, e.src_start - pos));
        out += e.tgt_text;
        pos = e.src_end;
    }
    out += to_utf8(std::u32string_view(xs).substr(pos));
    return out;
}

void AtomicEditCounter::add(const CommitRecord& rec) {
    for (const auto& e : rec.edits) {
        if (typo_only_ && !(e.is_typo && *e.is_typo)) continue;
        const std::string lang = e.src.lang.value_or("unknown");
        auto& table = counts_[lang];
        for (auto& a : atomic_edits(e.src.text, e.tgt.text)) ++table[{std::move(a.src_text), std::move(a.tgt_text)}];
    }
}

void AtomicEditCounter::merge(const AtomicEditCounter& other) {
    for (const auto& [lang, table] : other.counts_) {
        auto& mine = counts_[lang];
        for (const auto& [key, count] : table) mine[key] += count;
    }
}

FrequencyTables AtomicEditCounter::tables(std::size_t top_n) const {
    FrequencyTables out;
    for (const auto& [lang, table] : counts_) {
        std::vector<AtomicCount> rows;
        for (const auto& [key, count] : table) rows.push_back({key.first, key.second, count});
        std::stable_sort(rows.begin(), rows.end(),
                         [](const AtomicCount& a, const AtomicCount& b) { return a.count > b.count; });
        if (top_n > 0 && rows.size() > top_n) rows.resize(top_n);
        out.emplace(lang, std::move(rows));
    }
    return out;
}

FrequencyTables frequency_table(const std::vector<CommitRecord>& corpus, std::size_t top_n, bool typo_only) {
    AtomicEditCounter counter(typo_only);
    for (const auto& rec : corpus) counter.add(rec);
    return counter.tables(top_n);
}

std::string visible_text(std::string_view text) {
    if (text.empty()) return "φ";
    std::string out(text);
    std::replace(out.begin(), out.end(), ' ', '_');
    return out;
}

}  // namespace typocorpus
