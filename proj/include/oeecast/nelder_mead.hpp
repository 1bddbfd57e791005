#pragma once

#include <functional>
#include <span>
#include <vector>

namespace oeecast {

struct NelderMeadOptions {
  int max_iterations = 5000;
  // Stop once the spread of objective values over the simplex falls below this.
  double f_tolerance = 1e-8;
  double initial_step = 0.5;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Derivative-free downhill simplex minimisation (standard coefficients:
/// reflection 1, expansion 2, contraction 1/2, shrink 1/2).
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::vector<double> x0, const NelderMeadOptions& options = {});

}  // namespace oeecast
