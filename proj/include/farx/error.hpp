#pragma once

#include <stdexcept>
#include <string>

namespace farx {

// Base of every error raised by the library. `kind()` is a stable
// machine-readable tag used in CLI error records.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define FARX_DEFINE_ERROR(Name, tag)                                   \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(tag, what) {}       \
  };

FARX_DEFINE_ERROR(InvalidGridError, "invalid_grid")
FARX_DEFINE_ERROR(DimensionError, "dimension_mismatch")
FARX_DEFINE_ERROR(InsufficientDataError, "insufficient_data")
FARX_DEFINE_ERROR(NumericalError, "numerical_failure")
FARX_DEFINE_ERROR(SingularSystemError, "singular_system")
FARX_DEFINE_ERROR(ArgumentError, "invalid_argument")
FARX_DEFINE_ERROR(DegenerateSpectrumError, "degenerate_spectrum")
FARX_DEFINE_ERROR(ParseError, "parse_error")
FARX_DEFINE_ERROR(DataError, "data_error")
FARX_DEFINE_ERROR(ConfigError, "config_error")

#undef FARX_DEFINE_ERROR

}  // namespace farx
