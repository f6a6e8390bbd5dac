#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "typocorpus/unicode.hpp"

namespace typocorpus {

/// Character n-gram language model over Unicode scalar values with
/// interpolated Witten-Bell smoothing.
///
/// The recursion bottoms out in a unigram distribution that reserves mass u
/// for UNK, the symbol standing for everything unseen in training:
///
///   p1(w)     = (1 - u) (c(w) + T/|V|) / (N + T)          w in V
///   p1(UNK)   = u,   u = max(n1 / (N + n1), 1e-10)
///   pk(w | h) = (c(h,w) + T(h) p(k-1)(w | h')) / (c(h) + T(h))
///
/// where T counts distinct successors, n1 counts symbols seen exactly once
/// and h' drops the oldest symbol of h. Unseen contexts defer to the lower
/// order. Every distribution over V and UNK sums to one.
class CharLangModel {
public:
    static constexpr char32_t kBos = 0x110000;
    static constexpr char32_t kUnk = 0x110001;
    static constexpr double kMinUnkMass = 1e-10;

    CharLangModel() = default;

    int order() const { return order_; }
    const std::vector<char32_t>& vocabulary() const { return vocab_; }
    double unk_mass() const { return unk_mass_; }

    /// p(next | history); history holds preceding symbols, oldest first, and
    /// may contain kBos. Unseen symbols are scored as kUnk.
    double prob(std::u32string_view history, char32_t next) const;

    /// Distribution over the vocabulary followed by kUnk.
    std::vector<std::pair<char32_t, double>> next_distribution(std::u32string_view history) const;

    /// 2^(-(1/L) Σ log2 p(x_i | context_i)) with BOS padding. Throws
    /// std::invalid_argument for empty text.
    double perplexity(std::string_view text) const;
    double perplexity(std::u32string_view text) const;

    /// Versioned little-endian binary image; identical models give identical
    /// bytes.
    std::string serialize() const;
    static CharLangModel deserialize(std::string_view bytes);

    void save(const std::filesystem::path& file) const;
    static CharLangModel load(const std::filesystem::path& file);

    bool operator==(const CharLangModel& o) const { return serialize() == o.serialize(); }

private:
    struct ContextStats {
        std::uint64_t total = 0;
        std::unordered_map<char32_t, std::uint64_t> next;
    };

    friend CharLangModel train_lm(const std::vector<std::string>& lines, int order);

    char32_t map_symbol(char32_t c) const;
    void finalize();

    int order_ = 0;
    // tables_[k] maps contexts of length k to successor counts.
    std::vector<std::unordered_map<Codepoints, ContextStats>> tables_;
    std::vector<char32_t> vocab_;
    std::uint64_t unigram_total_ = 0;
    double unk_mass_ = kMinUnkMass;
};

/// Throws DataError when the lines hold fewer than 10,000 characters and
/// std::invalid_argument when order < 2.
CharLangModel train_lm(const std::vector<std::string>& lines, int order = 5);

/// Splits text on newlines and trains on the lines.
CharLangModel train_lm_text(std::string_view text, int order = 5);

}  // namespace typocorpus
