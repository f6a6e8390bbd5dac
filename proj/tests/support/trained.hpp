#pragma once

// Models trained once per process from the text fixtures.

#include <map>

#include "test_support.hpp"
#include "typocorpus/char_lm.hpp"
#include "typocorpus/langid.hpp"

namespace testsupport {

inline const std::vector<typocorpus::LangProfile>& fixture_profiles() {
    static const auto profiles = typocorpus::train_profiles(std::map<std::string, std::filesystem::path>{
        {"eng", fixture("text/eng_train.txt")}, {"jpn", fixture("text/jpn_train.txt")}});
    return profiles;
}

inline const typocorpus::LanguageDetector& fixture_detector() {
    static const typocorpus::LanguageDetector detector(fixture_profiles());
    return detector;
}

inline const typocorpus::CharLangModel& eng_model() {
    static const auto model = typocorpus::train_lm_text(read_file(fixture("text/eng_train.txt")));
    return model;
}

}  // namespace testsupport
