#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nodalab {

/// Invalid domain description (violated DomainSpec/QuarterBoundary invariant).
class GeometryError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mesh generation cannot honor the requested resolution.
class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AssemblyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eigensolver failure. Carries the best residuals reached before giving up.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<double> best_residuals = {})
      : std::runtime_error(what), best_residuals_(std::move(best_residuals)) {}

  const std::vector<double>& best_residuals() const noexcept { return best_residuals_; }

 private:
  std::vector<double> best_residuals_;
};

class NodalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nodalab
