#pragma once

namespace f3bp {

/// F(mu, x) = (1 + mu/x^2) / (1 + mu x), the existence-test function that
/// decides which Euler-aligned family reaches the resting configuration.
///
/// All three functions throw std::domain_error unless mu > 0 and x > 0.
double F(double mu, double x);
double F_prime(double mu, double x);   // dF/dx, strictly negative
double F_second(double mu, double x);  // d2F/dx2, strictly positive

}  // namespace f3bp
