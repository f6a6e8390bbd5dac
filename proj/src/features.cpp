#include "typocorpus/features.hpp"

#include <algorithm>
#include <limits>
#include <vector>

#include "typocorpus/atomic_edits.hpp"

namespace typocorpus {
namespace {

// Distance restricted to cells with |i - j| <= band. Exact whenever the true
// distance is at most band; otherwise returns something larger than band.
std::size_t banded_distance(std::u32string_view x, std::u32string_view y, std::size_t band) {
    const std::size_t m = x.size();
    const std::size_t n = y.size();
    constexpr std::size_t kInf = std::numeric_limits<std::size_t>::max() / 2;
    std::vector<std::size_t> prev(n + 1, kInf);
    std::vector<std::size_t> cur(n + 1, kInf);
    for (std::size_t j = 0; j <= std::min(n, band); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= m; ++i) {
        const std::size_t lo = i > band ? i - band : 0;
        const std::size_t hi = std::min(n, i + band);
        std::fill(cur.begin(), cur.end(), kInf);
        if (lo == 0) cur[0] = i;
        for (std::size_t j = std::max<std::size_t>(lo, 1); j <= hi; ++j) {
            const std::size_t diag = prev[j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1);
            const std::size_t up = prev[j] + 1;
            const std::size_t left = cur[j - 1] + 1;
            cur[j] = std::min({diag, up, left});
        }
        std::swap(prev, cur);
    }
    return prev[n];
}

}  // namespace

std::size_t edit_distance(std::u32string_view x, std::u32string_view y) {
    const std::size_t len_gap = x.size() > y.size() ? x.size() - y.size() : y.size() - x.size();
    const std::size_t longest = std::max(x.size(), y.size());
    std::size_t band = std::max<std::size_t>(len_gap, 8);
    for (;;) {
        if (band >= longest) return banded_distance(x, y, longest);
        const std::size_t d = banded_distance(x, y, band);
        if (d <= band) return d;
        band *= 2;
    }
}

std::size_t edit_distance(std::string_view x, std::string_view y) {
    return edit_distance(to_codepoints(x), to_codepoints(y));
}

double norm_edit_distance(std::string_view x, std::string_view y) {
    const Codepoints xs = to_codepoints(x);
    const Codepoints ys = to_codepoints(y);
    const std::size_t longest = std::max(xs.size(), ys.size());
    if (longest == 0) return 0.0;
    return static_cast<double>(edit_distance(xs, ys)) / static_cast<double>(longest);
}

bool numeric_only(std::string_view x, std::string_view y) {
    const auto edits = atomic_edits(x, y);
    if (edits.empty()) return false;
    auto digits = [](const std::string& s) {
        return std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
    };
    return std::all_of(edits.begin(), edits.end(),
                       [&](const AtomicEdit& e) { return digits(e.src_text) && digits(e.tgt_text); });
}

double clamp_ppl_ratio(double ratio) { return std::clamp(ratio, kMinPplRatio, kMaxPplRatio); }

FeatureVector featurize(Edit& e, const CharLangModel& model) {
    e.src.ppl = e.src.text.empty() ? std::nullopt : std::optional<double>(model.perplexity(e.src.text));
    e.tgt.ppl = e.tgt.text.empty() ? std::nullopt : std::optional<double>(model.perplexity(e.tgt.text));
    FeatureVector f;
    // An empty side has no perplexity; its ratio is taken as neutral.
    f.ppl_ratio = e.src.ppl && e.tgt.ppl ? clamp_ppl_ratio(*e.tgt.ppl / *e.src.ppl) : 1.0;
    f.norm_dist = norm_edit_distance(e.src.text, e.tgt.text);
    f.numeric_only = numeric_only(e.src.text, e.tgt.text) ? 1 : 0;
    return f;
}

std::optional<FeatureVector> features_from_perplexities(const Edit& e) {
    if (!e.src.ppl || !e.tgt.ppl) return std::nullopt;
    FeatureVector f;
    f.ppl_ratio = clamp_ppl_ratio(*e.tgt.ppl / *e.src.ppl);
    f.norm_dist = norm_edit_distance(e.src.text, e.tgt.text);
    f.numeric_only = numeric_only(e.src.text, e.tgt.text) ? 1 : 0;
    return f;
}

}  // namespace typocorpus
