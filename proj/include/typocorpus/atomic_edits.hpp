#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "typocorpus/corpus.hpp"
#include "typocorpus/unicode.hpp"

namespace typocorpus {

enum class AlignKind { match, substitute, del, insert };

/// One column of a character alignment. src_pos/tgt_pos index the consumed
/// characters (an insert consumes no source character; src_pos is then the
/// position it is inserted before, and likewise for deletes).
struct AlignOp {
    AlignKind kind;
    std::size_t src_pos;
    std::size_t tgt_pos;

    bool operator==(const AlignOp&) const = default;
};

/// Minimal unit-cost alignment over Unicode scalar values. Among optimal
/// alignments the backtrace, which runs from the end of both strings,
/// prefers match, then substitute, then delete, then insert.
std::vector<AlignOp> align(std::u32string_view x, std::u32string_view y);
std::vector<AlignOp> align(std::string_view x, std::string_view y);

std::size_t alignment_cost(const std::vector<AlignOp>& ops);

enum class AtomicKind { insert, del, substitute };

std::string_view to_string(AtomicKind k);

/// A maximal run of non-matching alignment columns. Offsets are in
/// characters, half-open; texts are UTF-8.
struct AtomicEdit {
    AtomicKind kind;
    std::size_t src_start;
    std::size_t src_end;
    std::size_t tgt_start;
    std::size_t tgt_end;
    std::string src_text;
    std::string tgt_text;

    bool operator==(const AtomicEdit&) const = default;
};

/// Sorted by src_start and non-overlapping.
std::vector<AtomicEdit> atomic_edits(std::string_view x, std::string_view y);

/// Replaces each edit's source span with its target text.
std::string apply_atomic_edits(std::string_view x, const std::vector<AtomicEdit>& edits);

struct AtomicCount {
    std::string src_text;
    std::string tgt_text;
    std::uint64_t count = 0;

    bool operator==(const AtomicCount&) const = default;
};

/// Per-language tables ordered by count (descending), then source and target
/// text. Edits without a language tag are grouped under "unknown".
using FrequencyTables = std::map<std::string, std::vector<AtomicCount>>;

class AtomicEditCounter {
public:
    explicit AtomicEditCounter(bool typo_only = false) : typo_only_(typo_only) {}

    void add(const CommitRecord& rec);
    void merge(const AtomicEditCounter& other);

    /// top_n == 0 keeps every entry.
    FrequencyTables tables(std::size_t top_n = 0) const;

private:
    bool typo_only_;
    std::map<std::string, std::map<std::pair<std::string, std::string>, std::uint64_t>> counts_;
};

FrequencyTables frequency_table(const std::vector<CommitRecord>& corpus, std::size_t top_n, bool typo_only);

/// Display form: spaces become '_' and the empty string becomes 'φ'.
std::string visible_text(std::string_view text);

}  // namespace typocorpus
