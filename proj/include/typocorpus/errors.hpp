#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace typocorpus {

// A value breaks a domain invariant. field() names the offending field path,
// e.g. "edits[3].src.text".
class ValidationError : public std::runtime_error {
public:
    ValidationError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)), detail_(what) {}

    const std::string& field() const noexcept { return field_; }
    // The message without the field prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string field_;
    std::string detail_;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t byte_offset, const std::string& what)
        : std::runtime_error("parse error at byte " + std::to_string(byte_offset) + ": " + what),
          byte_offset_(byte_offset),
          detail_(what) {}

    std::size_t byte_offset() const noexcept { return byte_offset_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::size_t byte_offset_;
    std::string detail_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input data is well formed but unusable (too small, single-class, ...).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace typocorpus
