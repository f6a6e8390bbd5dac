#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "test_support.hpp"
#include "typocorpus/atomic_edits.hpp"
#include "typocorpus/features.hpp"

using namespace typocorpus;

namespace {

CommitRecord record_with(const std::vector<std::tuple<std::string, std::string, std::string>>& edits,
                         std::optional<bool> typo = std::nullopt) {
    CommitRecord r;
    r.repo = "o/r";
    r.commit = std::string(40, 'd');
    r.message = "typo";
    for (const auto& [src, tgt, lang] : edits) {
        Edit e;
        e.src.text = src;
        e.tgt.text = tgt;
        if (!lang.empty()) e.src.lang = e.tgt.lang = lang;
        if (typo) {
            e.prob_typo = *typo ? 0.9 : 0.1;
            e.is_typo = *typo;
        }
        r.edits.push_back(e);
    }
    return r;
}

void check_invariants(const std::u32string& x, const std::u32string& y) {
    const auto xs = to_utf8(x), ys = to_utf8(y);
    const auto edits = atomic_edits(xs, ys);
    ASSERT_EQ(apply_atomic_edits(xs, edits), ys) << xs << " -> " << ys;

    const std::size_t dist = testsupport::memo_edit_distance(x, y);
    const auto ops = align(x, y);
    EXPECT_EQ(alignment_cost(ops), dist);
    std::size_t non_match = 0;
    for (const auto& op : ops) non_match += op.kind != AlignKind::match;
    EXPECT_EQ(non_match, dist);

    std::size_t cost_sum = 0;
    for (std::size_t i = 0; i < edits.size(); ++i) {
        const auto& e = edits[i];
        EXPECT_EQ(to_utf8(x.substr(e.src_start, e.src_end - e.src_start)), e.src_text);
        EXPECT_EQ(to_utf8(y.substr(e.tgt_start, e.tgt_end - e.tgt_start)), e.tgt_text);
        switch (e.kind) {
            case AtomicKind::insert:
                EXPECT_EQ(e.src_start, e.src_end);
                EXPECT_FALSE(e.tgt_text.empty());
                cost_sum += e.tgt_end - e.tgt_start;
                break;
            case AtomicKind::del:
                EXPECT_EQ(e.tgt_start, e.tgt_end);
                EXPECT_FALSE(e.src_text.empty());
                cost_sum += e.src_end - e.src_start;
                break;
            case AtomicKind::substitute:
                EXPECT_FALSE(e.src_text.empty());
                EXPECT_FALSE(e.tgt_text.empty());
                cost_sum += std::max(e.src_end - e.src_start, e.tgt_end - e.tgt_start);
                break;
        }
        if (i > 0) EXPECT_LE(edits[i - 1].src_end, e.src_start);
    }
    EXPECT_GE(cost_sum, dist);
}

}  // namespace

TEST(Align, IdenticalAllMatches) {
    const auto ops = align(std::string_view("abc"), std::string_view("abc"));
    ASSERT_EQ(ops.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(ops[i], (AlignOp{AlignKind::match, i, i}));
}

TEST(Align, HeloHello) {
    const auto ops = align(std::string_view("helo"), std::string_view("hello"));
    EXPECT_EQ(alignment_cost(ops), 1u);
    std::size_t inserts = 0;
    for (const auto& op : ops) {
        if (op.kind == AlignKind::insert) {
            ++inserts;
            EXPECT_EQ(U"hello"[op.tgt_pos], U'l');
        } else {
            EXPECT_EQ(op.kind, AlignKind::match);
        }
    }
    EXPECT_EQ(inserts, 1u);
}

TEST(Align, TehThe) {
    EXPECT_EQ(alignment_cost(align(std::string_view("teh"), std::string_view("the"))), 2u);
    EXPECT_EQ(edit_distance(std::string_view("teh"), std::string_view("the")), 2u);
}

TEST(Align, TieBreakOrder) {
    // "ab" -> "ba": cost 2 either as two substitutions or as delete+insert.
    // Backtrace from the end prefers substitution.
    const auto ops = align(std::string_view("ab"), std::string_view("ba"));
    ASSERT_EQ(ops.size(), 2u);
    EXPECT_EQ(ops[0].kind, AlignKind::substitute);
    EXPECT_EQ(ops[1].kind, AlignKind::substitute);
    // "aa" -> "a": the deleted character is the first one.
    const auto del = align(std::string_view("aa"), std::string_view("a"));
    ASSERT_EQ(del.size(), 2u);
    EXPECT_EQ(del[0].kind, AlignKind::del);
    EXPECT_EQ(del[0].src_pos, 0u);
    EXPECT_EQ(del[1].kind, AlignKind::match);
}

TEST(AtomicEdits, Examples) {
    EXPECT_TRUE(atomic_edits("same", "same").empty());

    const auto teh = atomic_edits("teh", "the");
    ASSERT_EQ(teh.size(), 1u);
    EXPECT_EQ(teh[0].kind, AtomicKind::substitute);
    EXPECT_EQ(teh[0].src_text, "eh");
    EXPECT_EQ(teh[0].tgt_text, "he");
    EXPECT_EQ(teh[0].src_start, 1u);
    EXPECT_EQ(teh[0].src_end, 3u);

    const auto colour = atomic_edits("color", "colour");
    ASSERT_EQ(colour.size(), 1u);
    EXPECT_EQ(colour[0].kind, AtomicKind::insert);
    EXPECT_EQ(colour[0].tgt_text, "u");
    EXPECT_EQ(colour[0].src_start, 4u);
    EXPECT_EQ(colour[0].src_end, 4u);

    const auto del = atomic_edits("the the cat", "the cat");
    ASSERT_EQ(del.size(), 1u);
    EXPECT_EQ(del[0].kind, AtomicKind::del);
    EXPECT_EQ(del[0].src_text, "the ");
}

TEST(AtomicEdits, CharacterOffsetsNotBytes) {
    const auto e = atomic_edits("日本語のテキスト", "日本語のテクスト");
    ASSERT_EQ(e.size(), 1u);
    EXPECT_EQ(e[0].src_start, 5u);
    EXPECT_EQ(e[0].src_text, "キ");
    EXPECT_EQ(e[0].tgt_text, "ク");
}

TEST(AtomicEdits, RandomRoundTripAndCosts) {
    std::mt19937_64 rng(51);
    for (int i = 0; i < 500; ++i)
        check_invariants(testsupport::random_u32(rng, 30), testsupport::random_u32(rng, 30));
    for (int i = 0; i < 500; ++i)
        check_invariants(testsupport::random_small_alphabet(rng, 12, U"ab _"),
                         testsupport::random_small_alphabet(rng, 12, U"ab _"));
}

TEST(AtomicEdits, Deterministic) {
    EXPECT_EQ(atomic_edits("Thank you for you help", "Thank you for your help"),
              atomic_edits("Thank you for you help", "Thank you for your help"));
}

TEST(FrequencyTable, ThreeCopiesCounted) {
    const auto rec = record_with({{"helo", "hello", "eng"}, {"helo", "hello", "eng"}, {"helo", "hello", "eng"}});
    const auto t = frequency_table({rec}, 0, false);
    ASSERT_EQ(t.size(), 1u);
    ASSERT_EQ(t.at("eng").size(), 1u);
    EXPECT_EQ(t.at("eng")[0], (AtomicCount{"", "l", 3}));
}

TEST(FrequencyTable, EmptyCorpus) { EXPECT_TRUE(frequency_table({}, 30, false).empty()); }

TEST(FrequencyTable, SeparateLanguagesAndUnknown) {
    const auto rec =
        record_with({{"teh", "the", "eng"}, {"くだい", "ください", "jpn"}, {"colr", "color", ""}});
    const auto t = frequency_table({rec}, 0, false);
    ASSERT_EQ(t.size(), 3u);
    EXPECT_EQ(t.at("eng")[0], (AtomicCount{"eh", "he", 1}));
    EXPECT_EQ(t.at("jpn")[0], (AtomicCount{"", "さ", 1}));
    EXPECT_EQ(t.at("unknown")[0], (AtomicCount{"", "o", 1}));
}

TEST(FrequencyTable, OrderingTopNAndTypoFilter) {
    const auto typos = record_with({{"ab", "aB", "eng"}, {"cd", "cD", "eng"}, {"xb", "xB", "eng"}}, true);
    const auto semantic = record_with({{"1", "2", "eng"}, {"3", "4", "eng"}, {"5", "6", "eng"}}, false);
    const auto all = frequency_table({typos, semantic}, 0, false);
    const std::vector<AtomicCount> expected{{"b", "B", 2}, {"1", "2", 1}, {"3", "4", 1},
                                            {"5", "6", 1}, {"d", "D", 1}};
    EXPECT_EQ(all.at("eng"), expected);
    const auto top2 = frequency_table({typos, semantic}, 2, false);
    EXPECT_EQ(top2.at("eng").size(), 2u);
    const auto typo_only = frequency_table({typos, semantic}, 0, true);
    EXPECT_EQ(typo_only.at("eng"), (std::vector<AtomicCount>{{"b", "B", 2}, {"d", "D", 1}}));
}

TEST(FrequencyTable, MergeEqualsSingleCounter) {
    const auto a = record_with({{"teh", "the", "eng"}, {"helo", "hello", "eng"}});
    const auto b = record_with({{"teh", "the", "eng"}});
    AtomicEditCounter one, left, right;
    one.add(a);
    one.add(b);
    left.add(a);
    right.add(b);
    right.merge(left);
    EXPECT_EQ(one.tables(), right.tables());
}

TEST(VisibleText, Sentinels) {
    EXPECT_EQ(visible_text(""), "φ");
    EXPECT_EQ(visible_text("a b "), "a_b_");
    EXPECT_EQ(to_string(AtomicKind::del), "delete");
}
