#include "forge/common.hpp"

namespace forge {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::Discretization: return "discretization";
    case ErrorKind::Infeasible: return "infeasible";
    case ErrorKind::Geometry: return "geometry";
    case ErrorKind::EmptyMesh: return "empty-mesh";
    case ErrorKind::Topology: return "topology";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Io: return "io";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Domain: return "domain";
  }
  return "unknown";
}

}  // namespace forge
