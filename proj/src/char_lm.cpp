#include "typocorpus/char_lm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "typocorpus/errors.hpp"

namespace typocorpus {
namespace {

constexpr char kMagic[4] = {'T', 'C', 'L', 'M'};
constexpr std::uint32_t kFormatVersion = 1;
constexpr std::size_t kMinTrainingChars = 10'000;

class Writer {
public:
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_ += static_cast<char>((v >> (8 * i)) & 0xFF);
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_ += static_cast<char>((v >> (8 * i)) & 0xFF);
    }
    void raw(const char* p, std::size_t n) { out_.append(p, n); }
    std::string take() { return std::move(out_); }

private:
    std::string out_;
};

class Reader {
public:
    explicit Reader(std::string_view in) : in_(in) {}

    std::uint64_t uint(int bytes) {
        if (pos_ + static_cast<std::size_t>(bytes) > in_.size()) throw DataError("truncated language model file");
        std::uint64_t v = 0;
        for (int i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in_[pos_ + i])) << (8 * i);
        pos_ += static_cast<std::size_t>(bytes);
        return v;
    }
    std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
    std::uint64_t u64() { return uint(8); }
    std::string_view raw(std::size_t n) {
        if (pos_ + n > in_.size()) throw DataError("truncated language model file");
        auto v = in_.substr(pos_, n);
        pos_ += n;
        return v;
    }
    bool done() const { return pos_ == in_.size(); }

private:
    std::string_view in_;
    std::size_t pos_ = 0;
};

}  // namespace

char32_t CharLangModel::map_symbol(char32_t c) const {
    if (c == kBos) return c;
    return std::binary_search(vocab_.begin(), vocab_.end(), c) ? c : kUnk;
}

void CharLangModel::finalize() {
    vocab_.clear();
    unigram_total_ = 0;
    std::uint64_t singletons = 0;
    if (!tables_.empty()) {
        if (auto it = tables_[0].find(Codepoints{}); it != tables_[0].end()) {
            unigram_total_ = it->second.total;
            for (const auto& [sym, count] : it->second.next) {
                vocab_.push_back(sym);
                if (count == 1) ++singletons;
            }
        }
    }
    std::sort(vocab_.begin(), vocab_.end());
    const double n = static_cast<double>(unigram_total_);
    const double n1 = static_cast<double>(singletons);
    unk_mass_ = n + n1 > 0.0 ? std::max(n1 / (n + n1), kMinUnkMass) : 1.0;
}

double CharLangModel::prob(std::u32string_view history, char32_t next) const {
    if (order_ == 0) throw std::logic_error("language model is not trained");
    next = map_symbol(next);

    double p = 0.0;
    if (next == kUnk) {
        p = unk_mass_;
    } else {
        // At the unigram level T equals |V|, so the uniform share T/|V| is one.
        const auto& uni = tables_[0].at(Codepoints{});
        const double types = static_cast<double>(uni.next.size());
        auto it = uni.next.find(next);
        const double c = it == uni.next.end() ? 0.0 : static_cast<double>(it->second);
        p = (1.0 - unk_mass_) * (c + 1.0) / (static_cast<double>(uni.total) + types);
    }

    Codepoints ctx;
    const std::size_t max_ctx = static_cast<std::size_t>(order_ - 1);
    const std::size_t take = std::min(max_ctx, history.size());
    for (std::size_t i = history.size() - take; i < history.size(); ++i) ctx.push_back(map_symbol(history[i]));
    // Pad short histories with BOS, as at the start of a line.
    while (ctx.size() < max_ctx) ctx.insert(ctx.begin(), kBos);

    for (std::size_t k = 1; k <= max_ctx; ++k) {
        const Codepoints h = ctx.substr(ctx.size() - k);
        const auto& table = tables_[k];
        auto it = table.find(h);
        if (it == table.end()) continue;
        const auto& stats = it->second;
        const double t = static_cast<double>(stats.next.size());
        auto nit = stats.next.find(next);
        const double c = nit == stats.next.end() ? 0.0 : static_cast<double>(nit->second);
        p = (c + t * p) / (static_cast<double>(stats.total) + t);
    }
    return p;
}

std::vector<std::pair<char32_t, double>> CharLangModel::next_distribution(std::u32string_view history) const {
    std::vector<std::pair<char32_t, double>> out;
    out.reserve(vocab_.size() + 1);
    for (char32_t s : vocab_) out.emplace_back(s, prob(history, s));
    out.emplace_back(kUnk, prob(history, kUnk));
    return out;
}

double CharLangModel::perplexity(std::u32string_view text) const {
    if (text.empty()) throw std::invalid_argument("perplexity of empty text is undefined");
    double log2_sum = 0.0;
    for (std::size_t i = 0; i < text.size(); ++i) log2_sum += std::log2(prob(text.substr(0, i), text[i]));
    return std::exp2(-log2_sum / static_cast<double>(text.size()));
}

double CharLangModel::perplexity(std::string_view text) const { return perplexity(to_codepoints(text)); }

std::string CharLangModel::serialize() const {
    Writer w;
    w.raw(kMagic, 4);
    w.u32(kFormatVersion);
    w.u32(static_cast<std::uint32_t>(order_));
    for (const auto& table : tables_) {
        std::vector<const std::pair<const Codepoints, ContextStats>*> entries;
        for (const auto& e : table) entries.push_back(&e);
        std::sort(entries.begin(), entries.end(), [](auto* a, auto* b) { return a->first < b->first; });
        w.u64(entries.size());
        for (const auto* e : entries) {
            w.u32(static_cast<std::uint32_t>(e->first.size()));
            for (char32_t c : e->first) w.u32(c);
            std::vector<std::pair<char32_t, std::uint64_t>> next(e->second.next.begin(), e->second.next.end());
            std::sort(next.begin(), next.end());
            w.u64(next.size());
            for (const auto& [sym, count] : next) {
                w.u32(sym);
                w.u64(count);
            }
        }
    }
    return w.take();
}

CharLangModel CharLangModel::deserialize(std::string_view bytes) {
    Reader r(bytes);
    if (r.raw(4) != std::string_view(kMagic, 4)) throw DataError("not a character language model file");
    const auto version = r.u32();
    if (version != kFormatVersion) throw DataError("unsupported language model version " + std::to_string(version));
    CharLangModel m;
    m.order_ = static_cast<int>(r.u32());
    if (m.order_ < 2 || m.order_ > 64) throw DataError("implausible model order");
    m.tables_.resize(static_cast<std::size_t>(m.order_));
    for (int k = 0; k < m.order_; ++k) {
        const auto contexts = r.u64();
        for (std::uint64_t i = 0; i < contexts; ++i) {
            const auto len = r.u32();
            if (len != static_cast<std::uint32_t>(k)) throw DataError("context length does not match its table");
            Codepoints ctx;
            for (std::uint32_t j = 0; j < len; ++j) ctx.push_back(static_cast<char32_t>(r.u32()));
            ContextStats stats;
            const auto n = r.u64();
            for (std::uint64_t j = 0; j < n; ++j) {
                const auto sym = static_cast<char32_t>(r.u32());
                const auto count = r.u64();
                stats.next[sym] = count;
                stats.total += count;
            }
            m.tables_[static_cast<std::size_t>(k)].emplace(std::move(ctx), std::move(stats));
        }
    }
    if (!r.done()) throw DataError("trailing bytes in language model file");
    if (m.tables_[0].find(Codepoints{}) == m.tables_[0].end()) throw DataError("language model has no unigram table");
    m.finalize();
    return m;
}

void CharLangModel::save(const std::filesystem::path& file) const {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write " + file.string());
    const auto bytes = serialize();
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("error writing " + file.string());
}

CharLangModel CharLangModel::load(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot read " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize(ss.str());
}

CharLangModel train_lm(const std::vector<std::string>& lines, int order) {
    if (order < 2) throw std::invalid_argument("model order must be at least 2");
    CharLangModel m;
    m.order_ = order;
    m.tables_.resize(static_cast<std::size_t>(order));
    std::size_t chars = 0;
    const std::size_t max_ctx = static_cast<std::size_t>(order - 1);
    for (const auto& line : lines) {
        Codepoints padded(max_ctx, CharLangModel::kBos);
        padded += to_codepoints(line);
        chars += padded.size() - max_ctx;
        for (std::size_t i = max_ctx; i < padded.size(); ++i) {
            const char32_t sym = padded[i];
            for (std::size_t k = 0; k <= max_ctx; ++k) {
                auto& stats = m.tables_[k][padded.substr(i - k, k)];
                ++stats.total;
                ++stats.next[sym];
            }
        }
    }
    if (chars < kMinTrainingChars)
        throw DataError("language model training text has " + std::to_string(chars) +
                        " characters; at least 10000 are required");
    m.finalize();
    return m;
}

CharLangModel train_lm_text(std::string_view text, int order) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) lines.emplace_back(line);
        start = nl + 1;
    }
    return train_lm(lines, order);
}

}  // namespace typocorpus
