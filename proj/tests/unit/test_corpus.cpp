#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "test_support.hpp"
#include "typocorpus/corpus.hpp"
#include "typocorpus/errors.hpp"
#include "typocorpus/unicode.hpp"

using namespace typocorpus;

namespace {

CommitRecord minimal_record() {
    CommitRecord r;
    r.repo = "a/b";
    r.commit = std::string(40, '0');
    r.message = "fix typo";
    Edit e;
    e.src.text = "teh";
    e.tgt.text = "the";
    r.edits.push_back(e);
    return r;
}

std::string random_text(std::mt19937_64& rng) {
    std::u32string s;
    while (s.empty()) s = testsupport::random_u32(rng, 24);
    return to_utf8(s);
}

CommitRecord random_record(std::mt19937_64& rng) {
    static const char* hex = "0123456789abcdef";
    CommitRecord r;
    r.repo = "owner" + std::to_string(rng() % 100) + "/" + random_text(rng);
    for (int i = 0; i < 40; ++i) r.commit += hex[rng() % 16];
    r.message = random_text(rng) + "\n\n" + random_text(rng);
    const std::size_t n = 1 + rng() % kMaxEditsPerCommit;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        Edit e;
        e.src.text = random_text(rng);
        do e.tgt.text = random_text(rng);
        while (e.tgt.text == e.src.text);
        if (rng() % 2) {
            e.src.lang = "eng";
            e.tgt.lang = rng() % 2 ? "eng" : "jpn";
        }
        if (rng() % 2) {
            e.src.ppl = 1.0 + 100 * unit(rng);
            e.tgt.ppl = 1.0 + 100 * unit(rng);
        }
        if (rng() % 2) e.features = FeatureVector{0.001 + 999 * unit(rng), unit(rng), static_cast<int>(rng() % 2)};
        if (rng() % 2) {
            e.prob_typo = unit(rng);
            if (rng() % 2) e.is_typo = *e.prob_typo >= kTypoDecisionThreshold;
        }
        if (rng() % 2) e.category = static_cast<Category>(rng() % 4);
        r.edits.push_back(std::move(e));
    }
    return r;
}

}  // namespace

TEST(CorpusModel, MinimalRecordRoundTrips) {
    const auto r = minimal_record();
    const auto line = serialize_commit(r);
    EXPECT_EQ(line,
              R"({"repo":"a/b","commit":"0000000000000000000000000000000000000000","message":"fix typo",)"
              R"("edits":[{"src":{"text":"teh"},"tgt":{"text":"the"}}]})");
    EXPECT_EQ(parse_commit(line), r);
}

TEST(CorpusModel, ElevenEditsIsValidationError) {
    auto r = minimal_record();
    for (int i = 0; i < 10; ++i) r.edits.push_back(r.edits.front());
    ASSERT_EQ(r.edits.size(), 11u);
    EXPECT_THROW(serialize_commit(r), ValidationError);
}

TEST(CorpusModel, ZeroEditsIsValidationError) {
    auto r = minimal_record();
    r.edits.clear();
    EXPECT_THROW(serialize_commit(r), ValidationError);
}

TEST(CorpusModel, ProbabilityAndLabelPreserved) {
    auto r = minimal_record();
    r.edits[0].prob_typo = 0.97;
    r.edits[0].is_typo = true;
    const auto line = serialize_commit(r);
    EXPECT_NE(line.find("\"prob_typo\":0.97"), std::string::npos);
    EXPECT_NE(line.find("\"is_typo\":true"), std::string::npos);
    const auto back = parse_commit(line);
    EXPECT_EQ(back.edits[0].prob_typo, 0.97);
    EXPECT_EQ(back.edits[0].is_typo, true);
}

TEST(CorpusModel, NonHexCommitRejected) {
    auto line = serialize_commit(minimal_record());
    line.replace(line.find(std::string(40, '0')), 40, "XYZ");
    try {
        parse_commit(line);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "commit");
    }
}

TEST(CorpusModel, UppercaseHexRejected) {
    EXPECT_TRUE(is_commit_hash(std::string(40, 'a')));
    EXPECT_FALSE(is_commit_hash(std::string(40, 'A')));
    EXPECT_FALSE(is_commit_hash(std::string(39, 'a')));
}

TEST(CorpusModel, UnknownKeyCountedNotFatal) {
    auto line = serialize_commit(minimal_record());
    line.insert(1, R"("note":"hello",)");
    ParseWarnings w;
    const auto r = parse_commit(line, &w);
    EXPECT_EQ(r, minimal_record());
    EXPECT_EQ(w.unknown_keys, 1u);
}

TEST(CorpusModel, MalformedJsonReportsByteOffset) {
    try {
        parse_commit(R"({"repo":"a/b", oops})");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_GT(e.byte_offset(), 0u);
        EXPECT_LE(e.byte_offset(), 20u);
    }
}

TEST(CorpusModel, WrongTypeIsParseError) {
    EXPECT_THROW(parse_commit(R"({"repo":1,"commit":"0000000000000000000000000000000000000000","message":"m","edits":[]})"),
                 ParseError);
}

TEST(CorpusModel, InvariantsEnforced) {
    auto r = minimal_record();
    r.edits[0].tgt.text = "teh";
    EXPECT_THROW(validate(r), ValidationError);

    r = minimal_record();
    r.edits[0].src.text = "a\nb";
    EXPECT_THROW(validate(r), ValidationError);

    r = minimal_record();
    r.edits[0].src.ppl = 0.5;
    EXPECT_THROW(validate(r), ValidationError);

    r = minimal_record();
    r.edits[0].is_typo = true;  // without prob_typo
    EXPECT_THROW(validate(r), ValidationError);

    r = minimal_record();
    r.edits[0].prob_typo = 0.4;
    r.edits[0].is_typo = true;  // disagrees with the threshold
    EXPECT_THROW(validate(r), ValidationError);

    r = minimal_record();
    r.edits[0].prob_typo = 0.5;
    r.edits[0].is_typo = true;
    EXPECT_NO_THROW(validate(r));
}

TEST(CorpusModel, ValidationErrorNamesField) {
    auto r = minimal_record();
    r.edits.push_back(r.edits[0]);
    r.edits[1].tgt.text = "x\ry";
    try {
        validate(r);
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "edits[1].tgt.text");
    }
}

TEST(CorpusModel, CategoryNamesLowercase) {
    EXPECT_EQ(to_string(Category::mechanical), "mechanical");
    EXPECT_EQ(to_string(Category::spell), "spell");
    EXPECT_EQ(to_string(Category::grammatical), "grammatical");
    EXPECT_EQ(to_string(Category::semantic), "semantic");
    EXPECT_EQ(parse_category("spell"), Category::spell);
    EXPECT_FALSE(parse_category("SPELL_X").has_value());
    EXPECT_FALSE(is_typo_category(Category::semantic));
    EXPECT_TRUE(is_typo_category(Category::grammatical));
}

TEST(CorpusModel, RandomizedRoundTripWithCjkAndEmoji) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const auto r = random_record(rng);
        const auto line = serialize_commit(r);
        EXPECT_EQ(line.find('\n'), std::string::npos);
        EXPECT_EQ(line.find('\r'), std::string::npos);
        EXPECT_TRUE(is_valid_utf8(line));
        ASSERT_EQ(parse_commit(line), r) << line;
        EXPECT_EQ(serialize_commit(parse_commit(line)), line);
    }
}

TEST(CorpusModel, MessageNewlinesEscaped) {
    auto r = minimal_record();
    r.message = "Fix typo\n\nBody line";
    const auto line = serialize_commit(r);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    EXPECT_EQ(parse_commit(line).message, r.message);
}

TEST(CorpusModel, KeyOrderFixed) {
    auto r = minimal_record();
    auto& e = r.edits[0];
    e.src.lang = "eng";
    e.src.ppl = 3.5;
    e.tgt.lang = "eng";
    e.tgt.ppl = 2.0;
    e.features = FeatureVector{0.5, 0.25, 0};
    e.prob_typo = 0.75;
    e.is_typo = true;
    e.category = Category::spell;
    const auto line = serialize_commit(r);
    const char* keys[] = {"\"repo\"", "\"commit\"", "\"message\"", "\"edits\"", "\"src\"", "\"text\"", "\"lang\"",
                          "\"ppl\"", "\"tgt\"", "\"features\"", "\"ppl_ratio\"", "\"norm_dist\"", "\"numeric_only\"",
                          "\"prob_typo\"", "\"is_typo\"", "\"category\""};
    std::size_t pos = 0;
    for (const char* k : keys) {
        const auto at = line.find(k, pos);
        ASSERT_NE(at, std::string::npos) << k;
        pos = at;
    }
    EXPECT_EQ(parse_commit(line), r);
}

TEST(CorpusModel, RepoMetaRoundTripAndValidation) {
    RepoMeta m;
    m.full_name = "acme/docs";
    m.stars = 120;
    m.size_bytes = 2'000'000;
    m.license_id = "mit";
    m.last_event_time = parse_timestamp("2018-03-01T12:00:00Z");
    m.event_kind = "pull-request";
    EXPECT_EQ(parse_repo_meta(serialize_repo_meta(m)), m);

    m.full_name = "acme/docs/extra";
    EXPECT_THROW(validate(m), ValidationError);
    m.full_name = "nodash";
    EXPECT_THROW(validate(m), ValidationError);
    m.full_name = "acme/docs";
    m.stars = -1;
    EXPECT_THROW(validate(m), ValidationError);
}

TEST(CorpusModel, Timestamps) {
    EXPECT_EQ(format_timestamp(parse_timestamp("2019-09-30")), "2019-09-30T00:00:00Z");
    EXPECT_EQ(format_timestamp(parse_timestamp("2018-01-02T03:04:05+02:00")), "2018-01-02T01:04:05Z");
    EXPECT_EQ(format_timestamp(parse_timestamp("2018-01-02 03:04:05.250Z")), "2018-01-02T03:04:05Z");
    EXPECT_THROW(parse_timestamp("2018-13-01"), std::invalid_argument);
    EXPECT_THROW(parse_timestamp("yesterday"), std::invalid_argument);
}

TEST(CorpusModel, ReadCorpusNamesLine) {
    std::istringstream in(serialize_commit(minimal_record()) + "\n\n{broken\n");
    try {
        read_corpus(in, "c.jsonl");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("c.jsonl:3"), std::string::npos) << e.what();
    }
}

TEST(CorpusModel, WriteReadCorpus) {
    std::mt19937_64 rng(11);
    std::vector<CommitRecord> corpus;
    for (int i = 0; i < 5; ++i) corpus.push_back(random_record(rng));
    std::ostringstream out;
    write_corpus(out, corpus);
    std::istringstream in(out.str());
    EXPECT_EQ(read_corpus(in, "mem"), corpus);
}

TEST(Unicode, CodepointsAndNfc) {
    EXPECT_EQ(codepoint_length("日本語😀"), 4u);
    EXPECT_EQ(to_utf8(to_codepoints("héllo 世界 🎉")), "héllo 世界 🎉");
    EXPECT_FALSE(is_valid_utf8("\xff\xfe"));
    EXPECT_FALSE(is_valid_utf8("\xed\xa0\x80"));  // encoded surrogate
    EXPECT_THROW(to_codepoints("\xc3"), std::invalid_argument);
    // e + combining acute composes to é.
    EXPECT_EQ(nfc_normalize("e\xcc\x81"), "\xc3\xa9");
}
