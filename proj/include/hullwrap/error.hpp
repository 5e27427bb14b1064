#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hullwrap {

enum class ErrorKind {
  DimensionalDeficiency,
  DegenerateFacet,
  DuplicateVertex,
  InconsistentInput,
  InvalidMesh,
  Parse,
  Io,
  Config,
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionalDeficiency: return "dimensional-deficiency";
    case ErrorKind::DegenerateFacet: return "degenerate-facet";
    case ErrorKind::DuplicateVertex: return "duplicate-vertex";
    case ErrorKind::InconsistentInput: return "inconsistent-input";
    case ErrorKind::InvalidMesh: return "invalid-mesh";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hullwrap
