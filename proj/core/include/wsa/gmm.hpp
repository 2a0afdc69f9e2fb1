#pragma once

#include <span>
#include <vector>

#include "wsa/types.hpp"

namespace wsa {

// Two-component 1-D Gaussian mixture. Component b (background) always has the
// lower mean.
struct GmmParams {
  double w_b = 0.5;
  double w_o = 0.5;
  double mu_b = 0.0;
  double mu_o = 0.0;
  double sigma_b = 1.0;
  double sigma_o = 1.0;
};

struct GmmFit {
  GmmParams params;
  // Mixture log-likelihood of the initial parameters followed by one entry
  // per EM iteration.
  std::vector<double> log_likelihood;
  int iterations = 0;
  bool converged = false;
};

// EM fit with deterministic initialization: means at the 25th/75th
// percentiles, both variances at the sample population variance, equal weights.
// Variances are floored at cfg.var_floor. Stops when the log-likelihood gains
// less than cfg.tol or after cfg.max_iters iterations.
//
// Throws ArgumentError for fewer than 4 values, DataError for non-finite
// values and DegenerateInputError when the population variance is at or
// below cfg.var_floor.
GmmFit fit_gmm_1d_traced(std::span<const double> values, const EmConfig& cfg);

inline GmmParams fit_gmm_1d(std::span<const double> values, const EmConfig& cfg) {
  return fit_gmm_1d_traced(values, cfg).params;
}

double gmm_log_likelihood(std::span<const double> values, const GmmParams& p);

// Linear-interpolated percentile of already-sorted data, q in [0, 1].
double sorted_percentile(std::span<const double> sorted, double q);

}  // namespace wsa
