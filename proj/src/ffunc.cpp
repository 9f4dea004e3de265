#include "f3bp/ffunc.hpp"

#include <cmath>
#include <stdexcept>

namespace f3bp {

namespace {
void check(double mu, double x) {
  if (!(mu > 0.0) || !(x > 0.0) || !std::isfinite(mu) || !std::isfinite(x))
    throw std::domain_error("F(mu, x) requires mu > 0 and x > 0");
}
}  // namespace

double F(double mu, double x) {
  check(mu, x);
  return (1.0 + mu / (x * x)) / (1.0 + mu * x);
}

double F_prime(double mu, double x) {
  check(mu, x);
  const double q = 1.0 + mu * x;
  const double n = 1.0 + mu / (x * x);
  return -2.0 * mu / (x * x * x * q) - mu * n / (q * q);
}

double F_second(double mu, double x) {
  check(mu, x);
  const double q = 1.0 + mu * x;
  const double n = 1.0 + mu / (x * x);
  const double x3 = x * x * x;
  return 6.0 * mu / (x3 * x * q) + 4.0 * mu * mu / (x3 * q * q) + 2.0 * mu * mu * n / (q * q * q);
}

}  // namespace f3bp
