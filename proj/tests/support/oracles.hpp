#pragma once

// Independent numerical oracles shared by unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>

namespace dynlsm::oracle {

// Integral of exp(g(u)) over the real line for concave g, returned as
// (log scale m, value J) with integral = exp(m) * J. The range is cut where
// g falls 60 below its maximum.
struct LogIntegral {
  double log_scale;
  double value;
};

inline LogIntegral integrate_concave(const std::function<double(double)>& g,
                                     double lo = -200.0, double hi = 200.0) {
  const auto neg = [&](double u) { return -g(u); };
  const auto [u_star, neg_max] =
      boost::math::tools::brent_find_minima(neg, lo, hi, 52);
  const double gmax = -neg_max;
  const auto edge = [&](double dir) {
    double step = 1e-3;
    while (g(u_star + dir * step) > gmax - 60.0 && step < 1e3) step *= 2.0;
    return u_star + dir * step;
  };
  const double a = edge(-1.0), b = edge(1.0);
  const auto f = [&](double u) { return std::exp(g(u) - gmax); };
  // Split at the mode so each panel sees one monotone flank.
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double left = GK::integrate(f, a, u_star, 12, 1e-12);
  const double right = GK::integrate(f, u_star, b, 12, 1e-12);
  return {gmax, left + right};
}

// E[1/X] under the unnormalised density exp(log_f(x)) on x > 0, by
// quadrature in u = log x.
inline double mean_inverse_by_quadrature(
    const std::function<double(double)>& log_f) {
  // int f(x) dx = int f(e^u) e^u du, int f(x)/x dx = int f(e^u) du.
  const auto norm = integrate_concave([&](double u) { return log_f(std::exp(u)) + u; });
  const auto inv = integrate_concave([&](double u) { return log_f(std::exp(u)); });
  return std::exp(inv.log_scale - norm.log_scale) * inv.value / norm.value;
}

// Unnormalised log density of q(tau^2) for m transitions of dimension d,
// expected squared transition sum B and Gamma(c, d_tau) hyperparameters:
//   -B / (2x) - (m d + c - 1) / 2 log x - d_tau x.
inline double log_tau_density(double x, double B, double m, double d,
                              double c_tau, double d_tau) {
  return -B / (2.0 * x) - (m * d + c_tau - 1.0) / 2.0 * std::log(x) -
         d_tau * x;
}

// Unnormalised log density of q(sigma0^2) for k initial positions:
//   -S / (2x) - (k d / 2 + a + 1) log x - b / x.
inline double log_sigma0_density(double x, double S, double k, double d,
                                 double a, double b) {
  return -S / (2.0 * x) - (k * d / 2.0 + a + 1.0) * std::log(x) - b / x;
}

// K_{n+1/2}(x) from the terminating series, as a log.
inline double log_bessel_k_half_integer(int n, double x) {
  // term_k / term_{k-1} = (n + k)(n - k + 1) / (2 x k)
  std::vector<double> terms{0.0};
  double lt = 0.0, m = 0.0;
  for (int k = 1; k <= n; ++k) {
    lt += std::log((n + k) * double(n - k + 1) / (2.0 * x * k));
    terms.push_back(lt);
    m = std::max(m, lt);
  }
  double s = 0.0;
  for (double v : terms) s += std::exp(v - m);
  return 0.5 * std::log(M_PI / (2.0 * x)) - x + m + std::log(s);
}

}  // namespace dynlsm::oracle
