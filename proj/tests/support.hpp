#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "f3bp/model.hpp"

namespace f3bp::test {

// Random interior parameter point: three distinct radii, smallest at least
// 5 % of the largest.
inline SystemParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (;;) {
    std::array<double, 3> r{u(rng), u(rng), u(rng)};
    std::sort(r.begin(), r.end());
    if (r[1] - r[0] < 1e-3 || r[2] - r[1] < 1e-3) continue;
    return SystemParams::from_radii(r);
  }
}

// Random feasible, non-collinear configuration in an angle chart with a
// random ordering.
inline AngleChart random_angle_chart(const SystemParams& p, std::mt19937_64& rng) {
  static const Ordering orders[6] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  std::uniform_int_distribution<int> pick(0, 5);
  std::uniform_real_distribution<double> stretch(1.0, 4.0), angle(0.15, std::numbers::pi - 0.15);
  for (;;) {
    const Ordering o = orders[pick(rng)];
    AngleChart a{o, p.contact(o[0], o[1]) * stretch(rng), p.contact(o[1], o[2]) * stretch(rng), angle(rng)};
    const Configuration c = to_configuration(a);
    if (c.dist(o[2], o[0]) > p.contact(o[2], o[0]) * 1.001) return a;
  }
}

using Fn3 = std::function<double(std::array<double, 3>)>;

// Central differences with per-coordinate steps h * s[i].
inline std::array<double, 3> fd_gradient(const Fn3& f, std::array<double, 3> x, const std::array<double, 3>& s,
                                         double h) {
  std::array<double, 3> g{};
  for (int i = 0; i < 3; ++i) {
    const double step = h * s[i];
    auto a = x, b = x;
    a[i] += step;
    b[i] -= step;
    g[i] = (f(a) - f(b)) / (2 * step);
  }
  return g;
}

inline std::array<std::array<double, 3>, 3> fd_hessian(const Fn3& f, std::array<double, 3> x,
                                                       const std::array<double, 3>& s, double h) {
  std::array<std::array<double, 3>, 3> m{};
  const double f0 = f(x);
  for (int i = 0; i < 3; ++i) {
    const double hi = h * s[i];
    auto a = x, b = x;
    a[i] += hi;
    b[i] -= hi;
    m[i][i] = (f(a) - 2 * f0 + f(b)) / (hi * hi);
    for (int j = i + 1; j < 3; ++j) {
      const double hj = h * s[j];
      auto pp = x, pm = x, mp = x, mm = x;
      pp[i] += hi, pp[j] += hj;
      pm[i] += hi, pm[j] -= hj;
      mp[i] -= hi, mp[j] += hj;
      mm[i] -= hi, mm[j] -= hj;
      m[i][j] = m[j][i] = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * hi * hj);
    }
  }
  return m;
}

// Error relative to the larger of |reference| and the unit scale of
// already-normalised quantities.
inline double rel_err(double value, double reference) {
  return std::abs(value - reference) / std::max(1.0, std::abs(reference));
}

}  // namespace f3bp::test
