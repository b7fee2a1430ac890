#include "dynlsm/bessel.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

namespace dynlsm {

namespace {

// Orders at or above this use the uniform (Debye) expansion.
constexpr double kDebyeOrder = 50.0;
// Base orders in [0, 2) switch to the Hankel expansion past this argument,
// where K itself underflows.
constexpr double kHankelArg = 500.0;
constexpr int kDebyeTerms = 9;

using Poly = std::vector<double>;  // coefficients in ascending powers

// Debye polynomials u_k(p) from the recursion
//   u_{k+1}(p) = p^2 (1 - p^2) u_k'(p) / 2 + (1/8) int_0^p (1 - 5 t^2) u_k(t) dt.
std::array<Poly, kDebyeTerms> make_debye_polys() {
  std::array<Poly, kDebyeTerms> u;
  u[0] = {1.0};
  for (int k = 0; k + 1 < kDebyeTerms; ++k) {
    const Poly& cur = u[k];
    Poly next(cur.size() + 3, 0.0);
    for (std::size_t m = 1; m < cur.size(); ++m) {
      const double dc = static_cast<double>(m) * cur[m];  // p^{m-1}
      next[m + 1] += 0.5 * dc;                             // p^2 * p^{m-1}
      next[m + 3] -= 0.5 * dc;
    }
    for (std::size_t m = 0; m < cur.size(); ++m) {
      next[m + 1] += cur[m] / (8.0 * static_cast<double>(m + 1));
      next[m + 3] -= 5.0 * cur[m] / (8.0 * static_cast<double>(m + 3));
    }
    u[k + 1] = std::move(next);
  }
  return u;
}

double eval_poly(const Poly& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double log_k_debye(double nu, double x) {
  static const auto polys = make_debye_polys();
  const double z = x / nu;
  const double root = std::hypot(1.0, z);  // sqrt(1 + z^2)
  const double p = 1.0 / root;
  const double eta = root + std::log(z / (1.0 + root));
  double series = 0.0;
  double scale = 1.0;
  for (int k = 0; k < kDebyeTerms; ++k) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    series += sign * eval_poly(polys[k], p) * scale;
    scale /= nu;
  }
  return 0.5 * std::log(std::numbers::pi / (2.0 * nu)) - nu * eta -
         0.5 * std::log(root) + std::log(series);
}

// Large-argument expansion, valid for small orders.
double log_k_hankel(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (8.0 * k * x);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return 0.5 * std::log(std::numbers::pi / (2.0 * x)) - x + std::log(sum);
}

double log_k_base(double nu, double x) {
  if (x > kHankelArg) return log_k_hankel(nu, x);
  return std::log(boost::math::cyl_bessel_k(nu, x));
}

}  // namespace

double log_bessel_k(double nu, double x) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw std::domain_error("log_bessel_k: argument must be positive");
  nu = std::abs(nu);
  if (nu >= kDebyeOrder) return log_k_debye(nu, x);

  const double steps = std::floor(nu);
  const double mu = nu - steps;
  const double log_k0 = log_k_base(mu, x);
  if (steps == 0.0) return log_k0;

  // Forward recurrence on ratios r_k = K_{mu+k+1} / K_{mu+k}, stable for K.
  double ratio = std::exp(log_k_base(mu + 1.0, x) - log_k0);
  double log_k = log_k0 + std::log(ratio);
  for (int k = 1; k < static_cast<int>(steps); ++k) {
    ratio = 1.0 / ratio + 2.0 * (mu + k) / x;
    log_k += std::log(ratio);
  }
  return log_k;
}

double gig_mean_inverse(double p, double a, double b) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::domain_error("gig_mean_inverse: a and b must be positive");
  const double omega = std::sqrt(a * b);
  // E[X^-1] = sqrt(a/b) K_{p-1}(omega) / K_p(omega); all terms positive.
  return std::sqrt(a / b) *
         std::exp(log_bessel_k(p - 1.0, omega) - log_bessel_k(p, omega));
}

}  // namespace dynlsm
