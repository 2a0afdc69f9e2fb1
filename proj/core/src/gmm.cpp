#include "wsa/gmm.hpp"

#include <algorithm>
#include <cmath>

#include "wsa/error.hpp"

namespace wsa {
namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178;  // 0.5 * log(2 pi)
constexpr double kMinWeight = 1e-12;

double log_normal(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) - kHalfLog2Pi;
}

// Log-likelihood of the mixture; fills resp_b with the background
// responsibility of every sample when given.
double e_step(std::span<const double> x, const GmmParams& p, std::vector<double>* resp_b) {
  const double lw_b = std::log(p.w_b);
  const double lw_o = std::log(p.w_o);
  double ll = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lb = lw_b + log_normal(x[i], p.mu_b, p.sigma_b);
    const double lo = lw_o + log_normal(x[i], p.mu_o, p.sigma_o);
    const double peak = std::max(lb, lo);
    const double lse = peak + std::log(std::exp(lb - peak) + std::exp(lo - peak));
    ll += lse;
    if (resp_b) (*resp_b)[i] = std::exp(lb - lse);
  }
  return ll;
}

GmmParams m_step(std::span<const double> x, const std::vector<double>& resp_b,
                 const GmmParams& prev, double var_floor) {
  const double n = static_cast<double>(x.size());
  double nb = 0.0;
  double sum_b = 0.0;
  double sum_o = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    nb += resp_b[i];
    sum_b += resp_b[i] * x[i];
    sum_o += (1.0 - resp_b[i]) * x[i];
  }
  const double no = n - nb;

  GmmParams next = prev;
  // A component that lost all its mass keeps its previous location.
  const bool b_alive = nb > kMinWeight * n;
  const bool o_alive = no > kMinWeight * n;
  if (b_alive) next.mu_b = sum_b / nb;
  if (o_alive) next.mu_o = sum_o / no;

  double ss_b = 0.0;
  double ss_o = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double db = x[i] - next.mu_b;
    const double d_o = x[i] - next.mu_o;
    ss_b += resp_b[i] * db * db;
    ss_o += (1.0 - resp_b[i]) * d_o * d_o;
  }
  if (b_alive) next.sigma_b = std::sqrt(std::max(ss_b / nb, var_floor));
  if (o_alive) next.sigma_o = std::sqrt(std::max(ss_o / no, var_floor));

  next.w_b = std::clamp(nb / n, kMinWeight, 1.0 - kMinWeight);
  next.w_o = 1.0 - next.w_b;
  return next;
}

}  // namespace

double sorted_percentile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw ArgumentError("percentile of empty data");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double gmm_log_likelihood(std::span<const double> values, const GmmParams& p) {
  return e_step(values, p, nullptr);
}

GmmFit fit_gmm_1d_traced(std::span<const double> values, const EmConfig& cfg) {
  cfg.validate();
  if (values.size() < 4) {
    throw ArgumentError("GMM fit needs at least 4 values, got " + std::to_string(values.size()));
  }
  double mean = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw DataError("non-finite value in GMM input");
    mean += v;
  }
  const double n = static_cast<double>(values.size());
  mean /= n;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= n;
  if (!(var > cfg.var_floor)) {
    throw DegenerateInputError("GMM input has no spread (variance " + std::to_string(var) + ")");
  }

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  GmmFit fit;
  GmmParams p;
  p.mu_b = sorted_percentile(sorted, 0.25);
  p.mu_o = sorted_percentile(sorted, 0.75);
  p.sigma_b = p.sigma_o = std::sqrt(var);
  p.w_b = p.w_o = 0.5;

  std::vector<double> resp(values.size());
  double ll = e_step(values, p, &resp);
  fit.log_likelihood.push_back(ll);

  for (int it = 0; it < cfg.max_iters; ++it) {
    const GmmParams next = m_step(values, resp, p, cfg.var_floor);
    const double next_ll = e_step(values, next, &resp);
    // EM cannot lower the likelihood in exact arithmetic; a drop is rounding
    // noise at the fixed point, so keep the previous parameters and stop.
    if (next_ll < ll) {
      fit.converged = true;
      break;
    }
    p = next;
    fit.log_likelihood.push_back(next_ll);
    fit.iterations = it + 1;
    const double gain = next_ll - ll;
    ll = next_ll;
    if (gain < cfg.tol) {
      fit.converged = true;
      break;
    }
  }

  if (p.mu_b > p.mu_o) {
    std::swap(p.mu_b, p.mu_o);
    std::swap(p.sigma_b, p.sigma_o);
    std::swap(p.w_b, p.w_o);
  }
  fit.params = p;
  return fit;
}

}  // namespace wsa
