#pragma once

#include <complex>

namespace cbi::special {

/// Upper incomplete gamma function Gamma(s, z) for real s (any sign) and z > 0.
double upper_gamma(double s, double z);

/// Lower incomplete gamma function gamma(s, z) for s > 0, z >= 0.
double lower_gamma(double s, double z);

/// Complete gamma function (poles at non-positive integers).
double gamma_fn(double s);

/// Exponential integral E1(z), z > 0.
double expint_e1(double z);

/// h(z) = e^{-z} - 1 + z, accurate for small |z|.
double h2(double z);
std::complex<double> h2(std::complex<double> z);

/// H(z) = 1 - e^{-z} - z + z^2/2, the primitive of h2 with H(0) = 0.
double h3(double z);
std::complex<double> h3(std::complex<double> z);

/// g(z) = 1 - e^{-z}, accurate for small |z|.
double one_minus_exp(double z);
std::complex<double> one_minus_exp(std::complex<double> z);

}  // namespace cbi::special
