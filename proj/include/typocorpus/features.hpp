#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include "typocorpus/char_lm.hpp"
#include "typocorpus/corpus.hpp"

namespace typocorpus {

/// Unit-cost Levenshtein distance over Unicode scalar values. Uses a
/// diagonal band that widens until the result fits inside it.
std::size_t edit_distance(std::u32string_view x, std::u32string_view y);
std::size_t edit_distance(std::string_view x, std::string_view y);

/// edit_distance / max(|x|, |y|); 0 when both are empty.
double norm_edit_distance(std::string_view x, std::string_view y);

/// True when every atomic edit between x and y changes only ASCII digits
/// on both sides. False for identical strings.
bool numeric_only(std::string_view x, std::string_view y);

inline constexpr double kMinPplRatio = 1e-3;
inline constexpr double kMaxPplRatio = 1e3;

double clamp_ppl_ratio(double ratio);

/// Computes the three classifier features for e and stores the perplexities
/// of both sides on it.
FeatureVector featurize(Edit& e, const CharLangModel& model);

/// Features recomputed from stored perplexities; nullopt when either side
/// lacks one.
std::optional<FeatureVector> features_from_perplexities(const Edit& e);

}  // namespace typocorpus
