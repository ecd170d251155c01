#include "psido/errors.hpp"

namespace psido {

const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidInput: return "invalid-input";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::Budget: return "budget-error";
    case ErrorKind::Invariant: return "invariant-violation";
    case ErrorKind::Numeric: return "numeric-failure";
    case ErrorKind::Io: return "io-error";
    case ErrorKind::Ellipticity: return "ellipticity-error";
    case ErrorKind::Degenerate: return "degenerate-system";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind), detail_(what) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace psido
