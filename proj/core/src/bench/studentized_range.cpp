#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "tfr/bench/stats.hpp"
#include "tfr/error.hpp"

namespace tfr::bench {
namespace {

using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;

double phi(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }
double Phi(double z) { return 0.5 * boost::math::erfc(-z / std::numbers::sqrt2); }

// Range of k iid standard normals: P(W < w) = k * int phi(z) [Phi(z) - Phi(z - w)]^(k-1) dz.
double range_cdf(double w, int k) {
  if (w <= 0.0) return 0.0;
  auto f = [&](double z) {
    const double d = Phi(z) - Phi(z - w);
    return d > 0.0 ? phi(z) * std::pow(d, k - 1) : 0.0;
  };
  const double v = Quad::integrate(f, -8.5, 8.5 + w, 15, 1e-12);
  return std::min(1.0, k * v);
}

}  // namespace

double studentized_range_cdf(double q, int k, double df) {
  if (k < 2) throw std::invalid_argument("studentized range: k must be >= 2");
  if (!(df > 0.0)) throw std::invalid_argument("studentized range: df must be > 0");
  if (std::isnan(q)) throw std::invalid_argument("studentized range: q is NaN");
  if (q <= 0.0) return 0.0;
  if (std::isinf(q)) return 1.0;
  if (std::isinf(df)) return range_cdf(q, k);

  // Average the normal-theory CDF over s = sqrt(chi2_df / df).
  const double half = 0.5 * df;
  const double log_norm = half * std::log(df) - std::lgamma(half) - (half - 1.0) * std::log(2.0);
  auto g = [&](double s) {
    if (s <= 0.0) return 0.0;
    const double log_density = log_norm + (df - 1.0) * std::log(s) - half * s * s;
    return std::exp(log_density) * range_cdf(q * s, k);
  };
  const double spread = 10.0 / std::sqrt(df);
  const double lo = std::max(0.0, 1.0 - spread);
  const double hi = 1.0 + spread + (df < 4.0 ? 4.0 : 0.0);
  const double v = Quad::integrate(g, lo, hi, 15, 1e-11);
  return std::clamp(v, 0.0, 1.0);
}

double studentized_range_quantile(double p, int k, double df) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("studentized range quantile: p in (0, 1)");
  double hi = 4.0;
  while (studentized_range_cdf(hi, k, df) < p) {
    hi *= 2.0;
    if (hi > 1e6) throw Error("studentized range quantile: no bracket");
  }
  auto f = [&](double q) { return studentized_range_cdf(q, k, df) - p; };
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(
      f, 0.0, hi, -p, studentized_range_cdf(hi, k, df) - p,
      boost::math::tools::eps_tolerance<double>(40), iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace tfr::bench
