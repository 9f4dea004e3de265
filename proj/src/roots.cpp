#include "f3bp/roots.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include <cmath>
#include <exception>
#include <cstdint>
#include <limits>

namespace f3bp::roots {

std::optional<double> bracketed(const std::function<double(double)>& f, double lo, double hi,
                                const std::function<double(double)>& df, double xtol) {
  if (!(lo <= hi)) return std::nullopt;
  double flo = f(lo), fhi = f(hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi)) return std::nullopt;
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) return std::nullopt;

  const double scale = std::max(std::abs(lo), std::abs(hi));
  const double tol = std::max(xtol, 4.0 * std::numeric_limits<double>::epsilon() * scale);
  auto stop = [tol](double a, double b) { return std::abs(b - a) <= tol; };
  std::uintmax_t iters = 200;
  auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iters);
  double x = 0.5 * (a + b);
  if (df && a != b) {
    // Newton polish confined to the final bracket; falls back to bisection
    // whenever a step would leave it.
    auto fd = [&](double t) { return std::make_pair(f(t), df(t)); };
    std::uintmax_t nit = 50;
    try {
      x = boost::math::tools::newton_raphson_iterate(fd, x, std::min(a, b), std::max(a, b),
                                                     std::numeric_limits<double>::digits - 4, nit);
    } catch (const std::exception&) {
      // keep the bracketing estimate
    }
  }
  return x;
}

std::pair<double, double> minimize(const std::function<double(double)>& f, double lo, double hi) {
  std::uintmax_t iters = 500;
  auto r = boost::math::tools::brent_find_minima(f, lo, hi, std::numeric_limits<double>::digits / 2, iters);
  return {r.first, r.second};
}

double bisect_predicate(const std::function<bool(double)>& holds, double a, double b, double xtol) {
  for (int it = 0; it < 200 && std::abs(b - a) > xtol; ++it) {
    const double m = 0.5 * (a + b);
    if (holds(m))
      a = m;
    else
      b = m;
  }
  return a;
}

}  // namespace f3bp::roots
