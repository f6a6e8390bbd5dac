#include <gtest/gtest.h>

#include <cmath>

#include "test_support.hpp"
#include "trained.hpp"
#include "typocorpus/errors.hpp"
#include "typocorpus/langid.hpp"

using namespace typocorpus;
using testsupport::fixture;
using testsupport::fixture_detector;

namespace {

Edit make_edit(const std::string& src, const std::string& tgt) {
    Edit e;
    e.src.text = src;
    e.tgt.text = tgt;
    return e;
}

}  // namespace

TEST(LangId, SingleSymbolCorporaSeparate) {
    const auto profiles =
        train_profiles(std::map<std::string, std::string>{{"a", std::string(10000, 'a')}, {"b", std::string(10000, 'b')}});
    ASSERT_EQ(profiles.size(), 2u);
    LanguageDetector det(profiles);
    EXPECT_GT(det.log_prob(0, U"a"), det.log_prob(1, U"a"));
    EXPECT_GT(det.log_prob(1, U"b"), det.log_prob(0, U"b"));
    EXPECT_EQ(det.detect("aaaaaa").lang, "a");
    EXPECT_EQ(det.detect("bbbbbb").lang, "b");
}

TEST(LangId, SmallOrEmptyCorpusNamesLanguage) {
    try {
        train_profiles(std::map<std::string, std::string>{{"eng", std::string(10000, 'x')}, {"xyz", ""}});
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("xyz"), std::string::npos);
    }
    EXPECT_THROW(train_profiles(std::map<std::string, std::string>{{"eng", std::string(9999, 'x')}}), DataError);
}

TEST(LangId, DistributionsNormalized) {
    const auto& det = fixture_detector();
    for (std::size_t l = 0; l < det.profiles().size(); ++l)
        for (int order = 1; order <= kLangIdMaxOrder; ++order)
            EXPECT_NEAR(det.total_probability(l, order), 1.0, 1e-9) << l << " " << order;
}

TEST(LangId, HeldOutAccuracy) {
    const auto& det = fixture_detector();
    std::size_t total = 0, correct = 0;
    for (const auto& [lang, file] : {std::pair<std::string, std::string>{"eng", "text/eng_heldout.txt"},
                                     {"jpn", "text/jpn_heldout.txt"}}) {
        const auto lines = testsupport::read_lines(fixture(file));
        const std::size_t take = std::min<std::size_t>(lines.size(), 100);
        for (std::size_t i = 0; i < take; ++i) {
            ++total;
            correct += det.detect(lines[i]).lang == lang;
        }
    }
    ASSERT_EQ(total, 200u);
    EXPECT_GE(static_cast<double>(correct) / total, 0.95);
}

TEST(LangId, QuickBrownFox) {
    const auto d = fixture_detector().detect("the quick brown fox jumps over");
    EXPECT_EQ(d.lang, "eng");
    EXPECT_GE(d.confidence, 0.9);
}

TEST(LangId, ShortTextUnknown) {
    EXPECT_EQ(fixture_detector().detect(""), (Detection{"unknown", 0.0}));
    EXPECT_EQ(fixture_detector().detect("abc"), (Detection{"unknown", 0.0}));
}

TEST(LangId, PureAndBounded) {
    const auto& det = fixture_detector();
    for (const char* s : {"Hello there, how are you?", "これは日本語の文です。", "1234 5678", "x += 1;", "?!?!"}) {
        const auto a = det.detect(s);
        EXPECT_EQ(a, det.detect(s));
        EXPECT_GE(a.confidence, 0.0);
        EXPECT_LE(a.confidence, 1.0);
        EXPECT_TRUE(a.lang == "eng" || a.lang == "jpn" || a.lang == "unknown") << a.lang;
    }
}

TEST(LangId, RejectsBadProfileSets) {
    EXPECT_THROW(LanguageDetector({}), std::invalid_argument);
    auto p = testsupport::fixture_profiles();
    p.push_back(p.front());
    EXPECT_THROW(LanguageDetector(std::move(p)), std::invalid_argument);
}

TEST(LangId, NgramsNormalizeCaseAndSpace) {
    const auto grams = langid_ngrams("Ab  C", 2);
    const std::vector<Codepoints> expected{U" a", U"ab", U"b ", U" c", U"c "};
    EXPECT_EQ(grams, expected);
}

TEST(LangId, ProfileRoundTrip) {
    testsupport::TempDir tmp;
    save_profiles(testsupport::fixture_profiles(), tmp.path());
    EXPECT_EQ(load_profiles(tmp.path()), testsupport::fixture_profiles());
}

TEST(CodeLikeness, Examples) {
    EXPECT_GE(code_likeness("int main(void) { return 0; }"), 0.5);
    EXPECT_LT(code_likeness("This sentence is plain prose."), 0.2);
    EXPECT_EQ(code_likeness(""), 0.0);
    EXPECT_GE(code_likeness("x += 1;"), 0.5);
}

TEST(CodeLikeness, FixtureSeparation) {
    const auto rows = testsupport::read_labeled(fixture("text/code_prose.tsv"));
    ASSERT_EQ(rows.size(), 100u);
    std::size_t correct = 0;
    for (const auto& [label, line] : rows) correct += (code_likeness(line) >= 0.5) == (label == "code");
    EXPECT_GE(correct, 95u);
}

TEST(CodeLikeness, MonotoneInSymbolShare) {
    // Swapping letters for symbols one at a time never lowers the score.
    std::string s = "abcdefghijklmnopqrst";
    double prev = code_likeness(s);
    for (std::size_t i = 0; i < s.size(); ++i) {
        s[i] = "{}();=<>"[i % 8];
        const double now = code_likeness(s);
        EXPECT_GE(now + 1e-12, prev) << s;
        EXPECT_LE(now, 1.0);
        prev = now;
    }
}

TEST(FilterEdit, SameLanguageKept) {
    const auto kept = filter_edit(make_edit("teh cat sat on the mat", "the cat sat on the mat"), fixture_detector());
    ASSERT_TRUE(kept);
    EXPECT_EQ(kept->src.lang, "eng");
    EXPECT_EQ(kept->tgt.lang, "eng");
    EXPECT_EQ(kept->src.text, "teh cat sat on the mat");
    EXPECT_EQ(kept->tgt.text, "the cat sat on the mat");
}

TEST(FilterEdit, MismatchAndCodeDropped) {
    EXPECT_FALSE(filter_edit(make_edit("Please read the guide first.", "最初にガイドを読んでください。"),
                             fixture_detector()));
    EXPECT_FALSE(filter_edit(make_edit("x += 1;", "x += 2;"), fixture_detector()));
}

TEST(FilterEdit, SymmetricAndTextPreserving) {
    const std::vector<std::pair<std::string, std::string>> pairs{
        {"teh cat sat on the mat", "the cat sat on the mat"},
        {"Please read the guide first.", "最初にガイドを読んでください。"},
        {"x += 1;", "x += 2;"},
        {"インストールの説明を読んでくだい。", "インストールの説明を読んでください。"},
        {"ok", "okay"},
        {"The tool recieves input.", "foo_bar = baz(qux);"},
    };
    for (const auto& [a, b] : pairs) {
        const auto fwd = filter_edit(make_edit(a, b), fixture_detector());
        const auto rev = filter_edit(make_edit(b, a), fixture_detector());
        EXPECT_EQ(fwd.has_value(), rev.has_value()) << a;
        if (fwd) {
            EXPECT_EQ(fwd->src.text, a);
            EXPECT_EQ(fwd->tgt.text, b);
        }
    }
}
