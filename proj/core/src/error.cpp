#include "l2r/error.hpp"

namespace l2r {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::structural: return "structural";
    case ErrorKind::parse: return "parse";
    case ErrorKind::validation: return "validation";
    case ErrorKind::lookup: return "lookup";
    case ErrorKind::domain: return "domain";
    case ErrorKind::index: return "index";
    case ErrorKind::no_path: return "no_path";
    case ErrorKind::config: return "config";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace l2r
