#pragma once

#include <string>
#include <string_view>

namespace typocorpus {

// Sequences of Unicode scalar values. All distances, alignments and n-gram
// statistics in this project operate on these, never on raw bytes.
using Codepoints = std::u32string;

bool is_valid_utf8(std::string_view bytes);

// Throws std::invalid_argument on malformed input.
Codepoints to_codepoints(std::string_view utf8);

std::string to_utf8(std::u32string_view cps);

std::string to_utf8(char32_t cp);

// Length in scalar values; malformed input throws like to_codepoints.
std::size_t codepoint_length(std::string_view utf8);

std::string nfc_normalize(std::string_view utf8);

}  // namespace typocorpus
