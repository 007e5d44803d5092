#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cmsa {

// Malformed input in one of the text formats. Carries the 1-based line number.
class FormatError : public std::runtime_error {
 public:
  FormatError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// A caller broke a precondition (shape mismatch, bad config, length mismatch).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace cmsa
