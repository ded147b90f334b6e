#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace isoembed {

/// Root of everything the library throws.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class dimension_mismatch : public error {
 public:
  using error::error;
};

/// Malformed literal or file content.
class parse_error : public error {
 public:
  using error::error;
};

class numeric_error : public error {
 public:
  using error::error;
};

/// Linear system whose rows are not independent; carries the first dependent row.
class rank_deficient : public error {
 public:
  rank_deficient(std::size_t row, const std::string& what)
      : error(what), row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

/// A documented precondition of an operation was violated by its input.
/// `witness` names the offending vertices/edges when there are any.
class precondition_error : public error {
 public:
  explicit precondition_error(const std::string& what, std::vector<std::string> witness = {})
      : error(what), witness_(std::move(witness)) {}
  const std::vector<std::string>& witness() const noexcept { return witness_; }

 private:
  std::vector<std::string> witness_;
};

/// Should not happen if the mathematics holds; raised when a numeric check contradicts it.
class internal_error : public error {
 public:
  using error::error;
};

class retry_exhausted : public error {
 public:
  retry_exhausted(const std::string& what, std::size_t attempts)
      : error(what), attempts_(attempts) {}
  std::size_t attempts() const noexcept { return attempts_; }

 private:
  std::size_t attempts_;
};

}  // namespace isoembed
