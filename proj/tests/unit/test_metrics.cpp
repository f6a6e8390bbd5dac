#include <gtest/gtest.h>

#include <random>

#include "test_support.hpp"
#include "typocorpus/atomic_edits.hpp"
#include "typocorpus/errors.hpp"
#include "typocorpus/metrics.hpp"

using namespace typocorpus;

namespace {

Edit edit(const std::string& src, const std::string& tgt, const std::string& lang, std::optional<bool> typo = {}) {
    Edit e;
    e.src.text = src;
    e.tgt.text = tgt;
    e.src.lang = e.tgt.lang = lang;
    if (typo) {
        e.prob_typo = *typo ? 0.8 : 0.2;
        e.is_typo = *typo;
    }
    return e;
}

CommitRecord commit(char c, std::vector<Edit> edits) {
    CommitRecord r;
    r.repo = "o/r";
    r.commit = std::string(40, c);
    r.message = "typo";
    r.edits = std::move(edits);
    return r;
}

}  // namespace

TEST(FBeta, ReportedSpellCheckerRow) {
    EXPECT_NEAR(fbeta(0.563, 0.643, 0.5), 0.577, 0.001);
}

TEST(FBeta, ReportedEnglishClassifierRow) {
    EXPECT_NEAR(fbeta(0.874, 0.969, 1.0), 0.917, 0.003);
}

TEST(FBeta, Degenerate) {
    for (double b : {0.25, 0.5, 1.0, 2.0}) EXPECT_EQ(fbeta(1.0, 1.0, b), 1.0);
    EXPECT_EQ(fbeta(0.0, 0.0, 0.5), 0.0);
    EXPECT_EQ(fbeta(1.0, 0.0, 0.5), 0.0);
    EXPECT_THROW(fbeta(0.5, 0.5, 0.0), std::invalid_argument);
    EXPECT_THROW(fbeta(0.5, 0.5, -1.0), std::invalid_argument);
}

TEST(FBeta, BetweenPrecisionAndRecall) {
    std::mt19937_64 rng(61);
    std::uniform_real_distribution<double> u(1e-6, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double p = u(rng), r = u(rng), b = 0.1 + 3 * u(rng);
        const double f = fbeta(p, r, b);
        EXPECT_GE(f, std::min(p, r) - 1e-12);
        EXPECT_LE(f, std::max(p, r) + 1e-12);
    }
}

TEST(PrecisionRecall, ZeroDenominators) {
    const auto none = precision_recall_fbeta({0, 0, 5}, 0.5);
    EXPECT_EQ(none.precision, 1.0);
    EXPECT_EQ(none.recall, 0.0);
    EXPECT_EQ(none.f, 0.0);
    const auto nothing_expected = precision_recall_fbeta({0, 3, 0}, 0.5);
    EXPECT_EQ(nothing_expected.precision, 0.0);
    EXPECT_EQ(nothing_expected.recall, 1.0);
    const auto empty = precision_recall_fbeta({0, 0, 0}, 0.5);
    EXPECT_EQ(empty.precision, 1.0);
    EXPECT_EQ(empty.recall, 1.0);
    EXPECT_EQ(empty.f, 1.0);
}

TEST(PrecisionRecall, ScaleFree) {
    std::mt19937_64 rng(62);
    for (int i = 0; i < 500; ++i) {
        const ConfusionCounts c{rng() % 50, rng() % 50, rng() % 50};
        const std::uint64_t k = 1 + rng() % 20;
        const auto a = precision_recall_fbeta(c, 0.5);
        const auto b = precision_recall_fbeta({c.tp * k, c.fp * k, c.fn * k}, 0.5);
        EXPECT_NEAR(a.precision, b.precision, 1e-12);
        EXPECT_NEAR(a.recall, b.recall, 1e-12);
        EXPECT_NEAR(a.f, b.f, 1e-12);
    }
}

TEST(ScoreSystem, PerfectSystem) {
    const std::vector<GoldEdit> gold{{"1", "SPELL", "I recieve mail", "I receive mail"},
                                     {"2", "VERB", "He go home", "He goes home"}};
    const std::vector<SystemOutput> sys{{"1", "I receive mail"}, {"2", "He goes home"}};
    const auto s = score_system(gold, sys);
    for (const auto& [cat, c] : s) {
        const auto prf = precision_recall_fbeta(c, 0.5);
        EXPECT_EQ(prf.precision, 1.0) << cat;
        EXPECT_EQ(prf.recall, 1.0) << cat;
    }
    EXPECT_EQ(s.at("SPELL").tp, 1u);
    EXPECT_EQ(s.at("VERB").tp, 1u);
}

TEST(ScoreSystem, NoCorrection) {
    const std::vector<GoldEdit> gold{{"1", "SPELL", "I recieve teh mail", "I receive the mail"}};
    const std::vector<SystemOutput> sys{{"1", "I recieve teh mail"}};
    const auto s = score_system(gold, sys);
    const std::size_t n_gold = atomic_edits(gold[0].src, gold[0].tgt).size();
    EXPECT_EQ(s.at("SPELL"), (ConfusionCounts{0, 0, n_gold}));
    const auto prf = precision_recall_fbeta(s.at("SPELL"), 0.5);
    EXPECT_EQ(prf.precision, 1.0);
    EXPECT_EQ(prf.recall, 0.0);
}

TEST(ScoreSystem, OneFixedOneMissedOneSpurious) {
    // Two spelling errors; the system fixes "teh" only and adds a stray "!".
    const std::vector<GoldEdit> gold{{"1", "SPELL", "I recieve teh mail", "I receive the mail"}};
    ASSERT_EQ(atomic_edits(gold[0].src, gold[0].tgt).size(), 2u);
    const std::vector<SystemOutput> sys{{"1", "I recieve the mail!"}};
    const auto s = score_system(gold, sys);
    EXPECT_EQ(s.at("SPELL"), (ConfusionCounts{1, 0, 1}));
    EXPECT_EQ(s.at(std::string(kOtherCategory)), (ConfusionCounts{0, 1, 0}));
}

TEST(ScoreSystem, WrongFixOverlappingGoldChargedToGoldCategory) {
    const std::vector<GoldEdit> gold{{"1", "SPELL", "teh cat", "the cat"}};
    const std::vector<SystemOutput> sys{{"1", "tea cat"}};
    const auto s = score_system(gold, sys);
    EXPECT_EQ(s.at("SPELL"), (ConfusionCounts{0, 1, 1}));
    EXPECT_EQ(s.count(std::string(kOtherCategory)), 0u);
}

TEST(ScoreSystem, IdMismatchListsIds) {
    const std::vector<GoldEdit> gold{{"a", "SPELL", "x", "y"}, {"b", "SPELL", "x", "y"}};
    try {
        score_system(gold, {{"a", "y"}, {"c", "y"}});
        FAIL();
    } catch (const DataError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("b"), std::string::npos);
        EXPECT_NE(msg.find("c"), std::string::npos);
    }
    EXPECT_THROW(score_system(gold, {{"a", "y"}, {"b", "y"}, {"b", "y"}}), DataError);
}

TEST(ScoreSystem, GoldEditsConserved) {
    std::mt19937_64 rng(63);
    const char* cats[] = {"SPELL", "ORTH", "VERB"};
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<GoldEdit> gold;
        std::vector<SystemOutput> sys;
        std::size_t gold_atomic = 0;
        for (int i = 0; i < 10; ++i) {
            const auto src = to_utf8(testsupport::random_small_alphabet(rng, 15, U"abc de"));
            const auto tgt = to_utf8(testsupport::random_small_alphabet(rng, 15, U"abc de"));
            const auto hyp = rng() % 3 == 0 ? tgt : to_utf8(testsupport::random_small_alphabet(rng, 15, U"abc de"));
            gold.push_back({std::to_string(i), cats[rng() % 3], src, tgt});
            sys.push_back({std::to_string(i), hyp});
            gold_atomic += atomic_edits(src, tgt).size();
        }
        std::uint64_t tp_fn = 0;
        for (const auto& [cat, c] : score_system(gold, sys)) tp_fn += c.tp + c.fn;
        EXPECT_EQ(tp_fn, gold_atomic);
    }
}

TEST(Tsv, EscapesCommentsAndColumnCount) {
    testsupport::TempDir tmp;
    testsupport::write_file(tmp / "g.tsv", "# id\tcat\tsrc\ttgt\n\n1\tSPELL\ta\\tb\tc\\\\d\r\n");
    const auto rows = read_gold_tsv(tmp / "g.tsv");
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].src, "a\tb");
    EXPECT_EQ(rows[0].tgt, "c\\d");
    testsupport::write_file(tmp / "bad.tsv", "1\tonly two\n");
    EXPECT_THROW(read_gold_tsv(tmp / "bad.tsv"), std::exception);
    EXPECT_THROW(read_system_tsv(tmp / "absent.tsv"), IoError);
}

TEST(CorpusStats, HandCountedFixture) {
    const std::vector<CommitRecord> corpus{
        commit('a', {edit("teh", "the", "eng"), edit("recieve", "receive", "eng")}),
        commit('b', {edit("colr", "color", "eng"), edit("くだい", "ください", "jpn")}),
    };
    const auto rep = corpus_stats(corpus);
    ASSERT_EQ(rep.languages.size(), 2u);
    EXPECT_EQ(rep.languages[0], (StatsRow{"eng", 2, std::nullopt, 3, 3 + 3 + 7 + 7 + 4 + 5}));
    EXPECT_EQ(rep.languages[1], (StatsRow{"jpn", 1, std::nullopt, 1, 3 + 4}));
    EXPECT_EQ(rep.total.n_commits, 2u);
    EXPECT_EQ(rep.total.n_all_edits, 4u);
    EXPECT_EQ(rep.total.n_chars, 29u + 7u);
    EXPECT_FALSE(rep.total.n_typo_edits);
    EXPECT_NE(render_stats_table(rep).find("---"), std::string::npos);
    EXPECT_NE(render_stats_tsv(rep).find("eng\t2\t---\t3\t29\n"), std::string::npos);
}

TEST(CorpusStats, Empty) {
    const auto rep = corpus_stats({});
    EXPECT_TRUE(rep.languages.empty());
    EXPECT_EQ(rep.total.n_commits, 0u);
    EXPECT_EQ(rep.total.n_all_edits, 0u);
    EXPECT_EQ(rep.total.n_chars, 0u);
}

TEST(CorpusStats, TypoCountsAndOthersRow) {
    const std::vector<CommitRecord> corpus{
        commit('a', {edit("teh", "the", "eng", true), edit("1", "2", "eng", false)}),
        commit('b', {edit("abcd", "abce", "deu", true)}),
        commit('c', {edit("wxyz", "wxyy", "fra", true), edit("qqqq", "qqqr", "deu", false)}),
    };
    const auto rep = corpus_stats(corpus, 1);
    ASSERT_EQ(rep.languages.size(), 2u);
    EXPECT_EQ(rep.languages[0].lang, "deu");  // two commits; ties broken by tag
    EXPECT_EQ(rep.languages[1].lang, "others");
    EXPECT_EQ(rep.languages[1].n_commits, 2u);  // commits a and c
    EXPECT_EQ(rep.languages[1].n_all_edits, 3u);
    EXPECT_EQ(rep.languages[1].n_typo_edits, 2u);
    EXPECT_EQ(rep.total.n_typo_edits, 3u);

    const auto full = corpus_stats(corpus);
    std::uint64_t sum = 0;
    for (const auto& row : full.languages) {
        sum += row.n_all_edits;
        EXPECT_LE(row.n_typo_edits.value_or(0), row.n_all_edits);
    }
    EXPECT_EQ(sum, full.total.n_all_edits);
    EXPECT_EQ(full.total.n_all_edits, 5u);
}

TEST(Welch, IdenticalSamples) {
    const std::vector<double> a{1, 2, 3, 4, 5};
    const auto r = welch_ttest(a, a);
    EXPECT_EQ(r.t, 0.0);
    EXPECT_NEAR(r.p_two_tailed, 1.0, 1e-12);
}

TEST(Welch, Antisymmetric) {
    const std::vector<double> a{1.0, 2.5, 2.0, 3.1}, b{4.0, 3.5, 5.5, 4.2, 6.0};
    const auto ab = welch_ttest(a, b), ba = welch_ttest(b, a);
    EXPECT_EQ(ab.t, -ba.t);
    EXPECT_EQ(ab.df, ba.df);
    EXPECT_EQ(ab.p_two_tailed, ba.p_two_tailed);
}

TEST(Welch, HandComputedStatistic) {
    // means 2, 5; variances 1, 2.5; n 3, 5
    const std::vector<double> a{1, 2, 3}, b{3, 4, 5, 6, 7};
    const auto r = welch_ttest(a, b);
    const double se2 = 1.0 / 3 + 2.5 / 5;
    EXPECT_NEAR(r.t, -3.0 / std::sqrt(se2), 1e-12);
    const double df = se2 * se2 / ((1.0 / 3) * (1.0 / 3) / 2 + 0.5 * 0.5 / 4);
    EXPECT_NEAR(r.df, df, 1e-12);
    EXPECT_NEAR(r.p_two_tailed, testsupport::simpson_two_tailed(r.t, r.df), 1e-8);
}

TEST(Welch, SeparatedSamplesAgainstIntegrationOracle) {
    std::mt19937_64 rng(64);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> a, b;
    for (int i = 0; i < 100; ++i) a.push_back(g(rng));
    for (int i = 0; i < 100; ++i) b.push_back(1.0 + g(rng));
    const auto r = welch_ttest(a, b);
    EXPECT_LT(r.p_two_tailed, 0.01);
    EXPECT_NEAR(r.p_two_tailed, testsupport::simpson_two_tailed(r.t, r.df), 1e-9);
}

TEST(Welch, TailMatchesIntegrationOracle) {
    for (double df : {1.0, 2.5, 7.0, 30.0, 250.0})
        for (double t : {0.1, 0.7, 1.5, 2.0, 3.3, 6.0})
            EXPECT_NEAR(student_t_two_tailed(t, df), testsupport::simpson_two_tailed(t, df), 1e-8) << t << " " << df;
}

TEST(Welch, DegenerateSamples) {
    EXPECT_THROW(welch_ttest({1.0}, {1.0, 2.0}), std::invalid_argument);
    EXPECT_THROW(welch_ttest({3.0, 3.0}, {4.0, 4.0, 4.0}), std::invalid_argument);
    EXPECT_NO_THROW(welch_ttest({3.0, 3.0}, {4.0, 4.5}));
}

TEST(Render, ScoresTable) {
    std::map<std::string, ConfusionCounts> s{{"SPELL", {1, 0, 1}}, {"OTHER", {0, 1, 0}}};
    const auto tsv = render_scores_tsv(s, 0.5);
    EXPECT_NE(tsv.find("SPELL\t1\t0\t1\t1.000\t0.500\t0.833\n"), std::string::npos) << tsv;
    EXPECT_NE(tsv.find("all\t1\t1\t1\t0.500\t0.500\t0.500\n"), std::string::npos) << tsv;
    EXPECT_NE(render_scores_table(s, 0.5).find("SPELL"), std::string::npos);
}
