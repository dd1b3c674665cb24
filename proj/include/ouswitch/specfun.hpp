#pragma once

#include <stdexcept>

// Hermite functions of real (mostly negative) degree and their supporting
// Gamma / confluent-hypergeometric machinery.  Everything here is a pure
// function of its arguments.
namespace ouswitch::specfun {

struct GammaLog {
    double log_abs;  // log |Gamma(x)|
    int sign;        // sign of Gamma(x), +1 or -1
};

// log |Gamma(x)| with the sign of Gamma(x).  Throws std::domain_error at the
// poles (non-positive integers).
GammaLog log_gamma(double x);

// Gamma(x) itself, via log_gamma.  Overflows to +/-inf for large x.
double gamma_fn(double x);

// Confluent hypergeometric M(a,b,x) by compensated power series.
// Throws std::domain_error when b is a non-positive integer, and
// std::runtime_error if the series fails to converge within max_terms.
double kummer_m(double a, double b, double x, int max_terms = 10000);

// Hermite function H_nu(z) for real degree nu, |z| <= 8.
//
// Three evaluation branches stitched together (see hermite_kummer below for
// the textbook two-term form and why it alone is not enough):
//   z <= 1.5          two-term Kummer representation (no cancellation here)
//   1.5 < z < 7       Taylor-series ODE march from z = 7 downward
//   z >= 7            asymptotic series in 1/z^2
double hermite_h(double nu, double z);

// The raw two-term Kummer representation
//   H_nu(z) = 2^nu sqrt(pi) [ M(-nu/2,1/2,z^2)/Gamma((1-nu)/2)
//                             - 2 z M((1-nu)/2,3/2,z^2)/Gamma(-nu/2) ].
// For z > 0 the two terms cancel to roughly e^{-z^2} of their size, losing
// about z^2*log10(e) decimal digits; exposed separately so tests can
// demonstrate exactly where the representation stops being trustworthy.
double hermite_kummer(double nu, double z);

// H'_nu(z) = 2 nu H_{nu-1}(z).
double hermite_h_d1(double nu, double z);

// H''_nu(z) = 2 z H'_nu(z) - 2 nu H_nu(z) (Hermite ODE).
double hermite_h_d2(double nu, double z);

// Independent oracle: H_nu(z) = (1/Gamma(-nu)) Int_0^inf t^{-nu-1}
// e^{-t^2-2tz} dt for nu < 0, evaluated by adaptive Gauss-Kronrod
// quadrature after an integration by parts and the substitution t = u^2
// that remove the endpoint singularity.  Throws std::runtime_error on
// non-convergence.
double hermite_oracle_integral(double nu, double z);

}  // namespace ouswitch::specfun
