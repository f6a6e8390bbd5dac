#include "typocorpus/langid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "typocorpus/errors.hpp"

namespace typocorpus {
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kProfileFormat = "typocorpus-langid-profile";
constexpr int kProfileVersion = 1;

bool is_space(char32_t c) { return c == U' ' || c == U'\t' || c == U'\u00A0' || c == U'\u3000'; }

Codepoints normalize_for_langid(std::string_view text) {
    Codepoints out{U' '};
    for (char32_t c : to_codepoints(text)) {
        if (is_space(c)) {
            if (out.back() != U' ') out.push_back(U' ');
            continue;
        }
        if (c >= U'A' && c <= U'Z') c += U'a' - U'A';
        out.push_back(c);
    }
    if (out.back() != U' ') out.push_back(U' ');
    return out;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::vector<Codepoints> langid_ngrams(std::string_view text, int order) {
    const Codepoints norm = normalize_for_langid(text);
    std::vector<Codepoints> out;
    const auto n = static_cast<std::size_t>(order);
    if (norm.size() < n) return out;
    for (std::size_t i = 0; i + n <= norm.size(); ++i) {
        Codepoints g = norm.substr(i, n);
        if (n == 1 && g == U" ") continue;
        out.push_back(std::move(g));
    }
    return out;
}

LangProfile train_profile(std::string lang, std::string_view text) {
    LangProfile p;
    p.lang = std::move(lang);
    std::string_view rest = text;
    // Line by line so padding marks line boundaries.
    while (!rest.empty()) {
        const auto nl = rest.find('\n');
        std::string_view line = rest.substr(0, nl);
        rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
        for (int n = 1; n <= kLangIdMaxOrder; ++n) {
            for (auto& g : langid_ngrams(line, n)) ++p.counts[n - 1][g];
        }
    }
    return p;
}

std::vector<LangProfile> train_profiles(const std::map<std::string, std::string>& corpora) {
    if (corpora.empty()) throw DataError("no training corpora given");
    std::vector<LangProfile> out;
    for (const auto& [lang, text] : corpora) {
        std::size_t chars = 0;
        try {
            chars = codepoint_length(text);
        } catch (const std::invalid_argument& e) {
            throw DataError("corpus for '" + lang + "' is not valid UTF-8");
        }
        if (chars < kMinTrainingChars)
            throw DataError("corpus for '" + lang + "' has " + std::to_string(chars) +
                            " characters; at least 10000 are required");
        out.push_back(train_profile(lang, text));
    }
    const double prior = -std::log(static_cast<double>(out.size()));
    for (auto& p : out) p.prior = prior;
    return out;
}

std::vector<LangProfile> train_profiles(const std::map<std::string, fs::path>& corpus_files) {
    std::map<std::string, std::string> corpora;
    for (const auto& [lang, path] : corpus_files) corpora[lang] = read_file(path);
    return train_profiles(corpora);
}

LanguageDetector::LanguageDetector(std::vector<LangProfile> profiles) : profiles_(std::move(profiles)) {
    if (profiles_.empty()) throw std::invalid_argument("language detector needs at least one profile");
    std::set<std::string> tags;
    for (const auto& p : profiles_) {
        if (!tags.insert(p.lang).second) throw std::invalid_argument("duplicate language profile '" + p.lang + "'");
        if (p.lang == kUnknownLang) throw std::invalid_argument("'unknown' is reserved");
    }
    for (int n = 0; n < kLangIdMaxOrder; ++n) {
        std::set<Codepoints> v;
        for (const auto& p : profiles_) {
            for (const auto& [g, c] : p.counts[n]) v.insert(g);
        }
        vocab_[n].assign(v.begin(), v.end());
    }
    tables_.resize(profiles_.size());
    for (std::size_t li = 0; li < profiles_.size(); ++li) {
        auto& table = tables_[li];
        for (int n = 0; n < kLangIdMaxOrder; ++n) {
            std::uint64_t total = 0;
            for (const auto& [g, c] : profiles_[li].counts[n]) total += c;
            const double denom = static_cast<double>(total) + static_cast<double>(vocab_[n].size()) + 1.0;
            table.unseen[n] = -std::log(denom);
            for (const auto& [g, c] : profiles_[li].counts[n])
                table.log_probs[g] = std::log(static_cast<double>(c) + 1.0) - std::log(denom);
        }
        for (int n = 1; n <= kLangIdMaxOrder; ++n) {
            const double sum = total_probability(li, n);
            if (std::abs(sum - 1.0) > 1e-9)
                throw DataError("profile '" + profiles_[li].lang + "' order " + std::to_string(n) +
                                " does not normalize (sum " + std::to_string(sum) + ")");
        }
    }
}

double LanguageDetector::log_prob(std::size_t lang_index, const Codepoints& ngram) const {
    const auto& table = tables_.at(lang_index);
    if (auto it = table.log_probs.find(ngram); it != table.log_probs.end()) return it->second;
    return table.unseen.at(ngram.size() - 1);
}

double LanguageDetector::total_probability(std::size_t lang_index, int order) const {
    const auto& table = tables_.at(lang_index);
    const auto& vocab = vocab_.at(order - 1);
    // Seen n-grams of this language plus the add-one mass of the rest of the
    // shared vocabulary and the unseen slot.
    double seen = 0.0;
    std::size_t seen_types = 0;
    for (const auto& [g, c] : profiles_[lang_index].counts[order - 1]) {
        seen += std::exp(table.log_probs.at(g));
        ++seen_types;
    }
    const double unseen_each = std::exp(table.unseen[order - 1]);
    return seen + unseen_each * static_cast<double>(vocab.size() - seen_types + 1);
}

std::vector<std::string> LanguageDetector::languages() const {
    std::vector<std::string> out;
    for (const auto& p : profiles_) out.push_back(p.lang);
    return out;
}

Detection LanguageDetector::detect(std::string_view text) const {
    Codepoints cps;
    try {
        cps = to_codepoints(text);
    } catch (const std::invalid_argument&) {
        return {std::string(kUnknownLang), 0.0};
    }
    if (cps.size() < 4) return {std::string(kUnknownLang), 0.0};

    std::vector<double> scores(profiles_.size());
    for (std::size_t li = 0; li < profiles_.size(); ++li) scores[li] = profiles_[li].prior;
    for (int n = 1; n <= kLangIdMaxOrder; ++n) {
        for (const auto& g : langid_ngrams(text, n)) {
            for (std::size_t li = 0; li < profiles_.size(); ++li) scores[li] += log_prob(li, g);
        }
    }
    const auto best = static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
    double z = 0.0;
    for (double s : scores) z += std::exp(s - scores[best]);
    return {profiles_[best].lang, 1.0 / z};
}

double code_likeness(std::string_view text) {
    static constexpr std::string_view kSymbols = "{}();=<>[]|&#$\\/@*+~`^%";
    std::size_t non_space = 0;
    std::size_t symbols = 0;
    bool has_space = false;
    for (char c : text) {
        if (c == ' ' || c == '\t') {
            has_space = true;
            continue;
        }
        if ((static_cast<unsigned char>(c) & 0xC0) == 0x80) continue;  // UTF-8 continuation byte
        ++non_space;
        if (kSymbols.find(c) != std::string_view::npos) ++symbols;
    }
    if (non_space == 0) return 0.0;

    // Identifier shapes: a lowercase letter directly followed by an uppercase
    // one inside a word, or an underscore between two word characters.
    auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
    bool identifier = false;
    for (std::size_t i = 1; i + 1 <= text.size() && !identifier; ++i) {
        const char prev = text[i - 1];
        const char cur = text[i];
        if (std::islower(static_cast<unsigned char>(prev)) && std::isupper(static_cast<unsigned char>(cur))) identifier = true;
        if (cur == '_' && i + 1 < text.size() && is_word(prev) && is_word(text[i + 1])) identifier = true;
    }

    constexpr double kSymbolSaturation = 0.12;
    const double symbol_share = static_cast<double>(symbols) / static_cast<double>(non_space);
    const double symbol_score = std::min(1.0, symbol_share / kSymbolSaturation);
    const bool no_space = !has_space && non_space >= 2;
    return 0.6 * symbol_score + 0.3 * (identifier ? 1.0 : 0.0) + 0.1 * (no_space ? 1.0 : 0.0);
}

std::optional<Edit> filter_edit(const Edit& e, const LanguageDetector& detector, const LangFilterConfig& cfg) {
    if (code_likeness(e.src.text) >= cfg.code_threshold || code_likeness(e.tgt.text) >= cfg.code_threshold)
        return std::nullopt;
    const auto src = detector.detect(e.src.text);
    const auto tgt = detector.detect(e.tgt.text);
    if (src.lang == kUnknownLang || tgt.lang == kUnknownLang) return std::nullopt;
    if (src.confidence < cfg.min_confidence || tgt.confidence < cfg.min_confidence) return std::nullopt;
    if (src.lang != tgt.lang) return std::nullopt;
    Edit out = e;
    out.src.lang = src.lang;
    out.tgt.lang = tgt.lang;
    return out;
}

void save_profile(const LangProfile& profile, const fs::path& file) {
    nlohmann::ordered_json j;
    j["format"] = kProfileFormat;
    j["version"] = kProfileVersion;
    j["lang"] = profile.lang;
    j["prior"] = profile.prior;
    auto orders = nlohmann::ordered_json::array();
    for (int n = 0; n < kLangIdMaxOrder; ++n) {
        nlohmann::ordered_json counts = nlohmann::ordered_json::object();
        for (const auto& [g, c] : profile.counts[n]) counts[to_utf8(g)] = c;
        orders.push_back({{"n", n + 1}, {"counts", std::move(counts)}});
    }
    j["orders"] = std::move(orders);
    std::ofstream out(file, std::ios::binary);
    if (!out) throw IoError("cannot write " + file.string());
    out << j.dump() << '\n';
    if (!out) throw IoError("error writing " + file.string());
}

LangProfile load_profile(const fs::path& file) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(file));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(e.byte, file.string() + ": " + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != kProfileFormat) throw DataError(file.string() + ": not a langid profile");
        if (j.at("version").get<int>() != kProfileVersion)
            throw DataError(file.string() + ": unsupported profile version " + j.at("version").dump());
        LangProfile p;
        p.lang = j.at("lang").get<std::string>();
        p.prior = j.at("prior").get<double>();
        for (const auto& order : j.at("orders")) {
            const int n = order.at("n").get<int>();
            if (n < 1 || n > kLangIdMaxOrder) throw DataError(file.string() + ": bad n-gram order");
            for (const auto& [g, c] : order.at("counts").items()) p.counts[n - 1][to_codepoints(g)] = c.get<std::uint64_t>();
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(file.string() + ": " + e.what());
    }
}

void save_profiles(const std::vector<LangProfile>& profiles, const fs::path& dir) {
    fs::create_directories(dir);
    for (const auto& p : profiles) save_profile(p, dir / (p.lang + ".profile.json"));
}

std::vector<LangProfile> load_profiles(const fs::path& dir) {
    std::vector<fs::path> files;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir, ec)) {
        const auto name = entry.path().filename().string();
        if (entry.is_regular_file() && name.size() > 13 && name.ends_with(".profile.json")) files.push_back(entry.path());
    }
    if (ec) throw IoError("cannot read profile directory " + dir.string() + ": " + ec.message());
    std::sort(files.begin(), files.end());
    std::vector<LangProfile> out;
    for (const auto& f : files) out.push_back(load_profile(f));
    if (out.empty()) throw DataError("no *.profile.json files in " + dir.string());
    return out;
}

}  // namespace typocorpus
