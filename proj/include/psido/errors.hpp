#pragma once

#include <stdexcept>
#include <string>

namespace psido {

enum class ErrorKind {
  InvalidInput,
  InsufficientData,
  Budget,
  Invariant,
  Numeric,
  Io,
  Ellipticity,
  Degenerate,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const { return kind_; }
  // Message without the kind prefix.
  const std::string& detail() const { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace psido
