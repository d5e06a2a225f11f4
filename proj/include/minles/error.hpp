#pragma once

#include <stdexcept>
#include <string>

namespace minles {

enum class ErrorKind {
  config,
  io,
  mesh,
  tree,
  solver,
  divergence,
  integrator,
  stats,
  budget,
  internal,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define MINLES_DEFINE_ERROR(Name, Kind)                                   \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

MINLES_DEFINE_ERROR(ConfigError, config)
MINLES_DEFINE_ERROR(IoError, io)
MINLES_DEFINE_ERROR(MeshError, mesh)
MINLES_DEFINE_ERROR(TreeError, tree)
MINLES_DEFINE_ERROR(SolverError, solver)
MINLES_DEFINE_ERROR(DivergenceError, divergence)
MINLES_DEFINE_ERROR(IntegratorError, integrator)
MINLES_DEFINE_ERROR(StatsError, stats)
MINLES_DEFINE_ERROR(BudgetError, budget)

#undef MINLES_DEFINE_ERROR

}  // namespace minles
