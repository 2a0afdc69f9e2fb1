#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "wsa/error.hpp"
#include "wsa/gmm.hpp"

using namespace wsa;

namespace {

std::vector<double> two_normals(std::size_t n, double mu0, double s0, double mu1, double s1,
                                double w0, std::uint64_t seed) {
  PortableRng rng(seed);
  std::vector<double> v;
  for (std::size_t i = 0; i < n; ++i) {
    const bool first = rng.uniform() < w0;
    v.push_back(first ? mu0 + s0 * rng.normal() : mu1 + s1 * rng.normal());
  }
  return v;
}

double mixture_ll_oracle(const std::vector<double>& v, double wb, double mb, double sb,
                         double mo, double so) {
  double ll = 0.0;
  for (double x : v) {
    const double a = std::log(wb) + wsa::test::log_normal_pdf(x, mb, sb);
    const double b = std::log(1.0 - wb) + wsa::test::log_normal_pdf(x, mo, so);
    const double m = std::max(a, b);
    ll += m + std::log(std::exp(a - m) + std::exp(b - m));
  }
  return ll;
}

}  // namespace

TEST_CASE("percentile interpolation") {
  const std::vector<double> s{1, 2, 3, 4};
  CHECK(sorted_percentile(s, 0.0) == 1.0);
  CHECK(sorted_percentile(s, 1.0) == 4.0);
  CHECK(sorted_percentile(s, 0.25) == doctest::Approx(1.75));
  CHECK(sorted_percentile(s, 0.75) == doctest::Approx(3.25));
}

TEST_CASE("GMM recovers a well separated mixture") {
  const auto v = two_normals(5000, 0.0, 1.0, 4.0, 1.0, 0.5, 20240607);
  const auto fit = fit_gmm_1d_traced(v, {});
  const auto& p = fit.params;
  CHECK(std::abs(p.mu_b - 0.0) <= 0.1);
  CHECK(std::abs(p.mu_o - 4.0) <= 0.1);
  CHECK(std::abs(p.sigma_b - 1.0) <= 0.1);
  CHECK(std::abs(p.sigma_o - 1.0) <= 0.1);
  CHECK(std::abs(p.w_b - 0.5) <= 0.05);
  CHECK(std::abs(p.w_o - 0.5) <= 0.05);
  CHECK(p.w_b + p.w_o == doctest::Approx(1.0));
  CHECK(fit.converged);
  for (std::size_t i = 1; i < fit.log_likelihood.size(); ++i) {
    CHECK(fit.log_likelihood[i] >= fit.log_likelihood[i - 1]);
  }
  CHECK(fit.log_likelihood.back() ==
        doctest::Approx(mixture_ll_oracle(v, p.w_b, p.mu_b, p.sigma_b, p.mu_o, p.sigma_o)));
}

TEST_CASE("GMM on a tiny bimodal set matches a brute-force likelihood grid") {
  const std::vector<double> v{0, 0, 0, 1, 1, 1};
  EmConfig cfg;
  const auto p = fit_gmm_1d(v, cfg);
  const double floor_sigma = std::sqrt(cfg.var_floor);

  // Grid search over means, weights and floored sigmas.
  double best = -INFINITY, best_mb = 0, best_mo = 0, best_s = 0;
  const std::vector<double> means{-0.5, 0.0, 0.25, 0.5, 0.75, 1.0, 1.5};
  const std::vector<double> sigmas{floor_sigma, 1e-3, 0.1, 0.5, 1.0};
  for (double mb : means)
    for (double mo : means)
      for (double s : sigmas)
        for (double wb : {0.25, 0.5, 0.75}) {
          if (mb >= mo) continue;
          const double ll = mixture_ll_oracle(v, wb, mb, s, mo, s);
          if (ll > best) {
            best = ll;
            best_mb = mb;
            best_mo = mo;
            best_s = s;
          }
        }
  REQUIRE(best_mb == 0.0);
  REQUIRE(best_mo == 1.0);
  REQUIRE(best_s == floor_sigma);

  CHECK(p.mu_b == doctest::Approx(0.0));
  CHECK(p.mu_o == doctest::Approx(1.0));
  CHECK(p.sigma_b == doctest::Approx(floor_sigma).epsilon(1e-6));
  CHECK(p.sigma_o == doctest::Approx(floor_sigma).epsilon(1e-6));
  CHECK(gmm_log_likelihood(v, p) >= best - 1e-6);
}

TEST_CASE("GMM labels the lower mean as background") {
  const auto v = two_normals(2000, 10.0, 0.5, -3.0, 0.5, 0.3, 9);
  const auto p = fit_gmm_1d(v, {});
  CHECK(p.mu_b < p.mu_o);
  CHECK(p.mu_b == doctest::Approx(-3.0).epsilon(0.05));
  CHECK(p.w_b == doctest::Approx(0.7).epsilon(0.1));
}

TEST_CASE("GMM input errors") {
  const std::vector<double> flat(10, 2.5);
  CHECK_THROWS_AS(fit_gmm_1d(flat, {}), DegenerateInputError);
  const std::vector<double> tiny{1, 2, 3};
  CHECK_THROWS_AS(fit_gmm_1d(tiny, {}), ArgumentError);
  const std::vector<double> bad{1, 2, NAN, 4, 5};
  CHECK_THROWS_AS(fit_gmm_1d(bad, {}), DataError);
}

TEST_CASE("property: EM log-likelihood never decreases") {
  PortableRng rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = static_cast<std::size_t>(rng.between(8, 400));
    const auto v = two_normals(n, rng.normal(), 0.1 + rng.uniform(), rng.normal() * 3,
                               0.1 + rng.uniform() * 2, 0.2 + 0.6 * rng.uniform(), rng.below(1u << 30));
    const auto fit = fit_gmm_1d_traced(v, {});
    for (std::size_t i = 1; i < fit.log_likelihood.size(); ++i) {
      CHECK(fit.log_likelihood[i] >= fit.log_likelihood[i - 1]);
    }
    CHECK(fit.params.mu_b <= fit.params.mu_o);
    CHECK(fit.params.sigma_b > 0.0);
    CHECK(fit.params.sigma_o > 0.0);
  }
}
