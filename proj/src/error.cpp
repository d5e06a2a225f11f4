#include "minles/error.hpp"

namespace minles {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::config: return "ConfigError";
    case ErrorKind::io: return "IoError";
    case ErrorKind::mesh: return "MeshError";
    case ErrorKind::tree: return "TreeError";
    case ErrorKind::solver: return "SolverError";
    case ErrorKind::divergence: return "DivergenceError";
    case ErrorKind::integrator: return "IntegratorError";
    case ErrorKind::stats: return "StatsError";
    case ErrorKind::budget: return "BudgetError";
    case ErrorKind::internal: return "InternalError";
  }
  return "InternalError";
}

}  // namespace minles
