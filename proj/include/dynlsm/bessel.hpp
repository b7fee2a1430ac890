#pragma once

namespace dynlsm {

// log K_nu(x), the modified Bessel function of the second kind, for real
// order nu and x > 0. Stays finite where K itself over- or underflows:
// |nu| up to 1e5 and x up to 1e4.
double log_bessel_k(double nu, double x);

// E[1/X] for X ~ GIG(p, a, b), density x^{p-1} exp(-(a x + b / x) / 2).
double gig_mean_inverse(double p, double a, double b);

}  // namespace dynlsm
