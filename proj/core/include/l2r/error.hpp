#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace l2r {

// Every failure the library reports derives from Error and carries a stable
// machine-readable kind, which the CLI prints on its error line.
enum class ErrorKind {
  structural,  // dimension or shape mismatch
  parse,       // malformed input file
  validation,  // well-formed input violating a domain invariant
  lookup,      // unknown id
  domain,      // argument outside a function's mathematical domain
  index,       // out-of-range index
  no_path,     // destination unreachable
  config,      // bad configuration or CLI usage
  io,          // filesystem failure
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define L2R_DEFINE_ERROR(Name, Kind)                                    \
  class Name : public Error {                                           \
   public:                                                              \
    explicit Name(const std::string& message) : Error(Kind, message) {} \
  };

L2R_DEFINE_ERROR(StructuralError, ErrorKind::structural)
L2R_DEFINE_ERROR(ParseError, ErrorKind::parse)
L2R_DEFINE_ERROR(ValidationError, ErrorKind::validation)
L2R_DEFINE_ERROR(LookupError, ErrorKind::lookup)
L2R_DEFINE_ERROR(DomainError, ErrorKind::domain)
L2R_DEFINE_ERROR(IndexError, ErrorKind::index)
L2R_DEFINE_ERROR(ConfigError, ErrorKind::config)
L2R_DEFINE_ERROR(IoError, ErrorKind::io)

#undef L2R_DEFINE_ERROR

}  // namespace l2r
