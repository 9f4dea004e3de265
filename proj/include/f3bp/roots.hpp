#pragma once

#include <functional>
#include <optional>
#include <utility>

namespace f3bp {

/// Scalar root finding and 1-D minimization used by the class solvers.
/// All routines require a valid bracket and return nullopt otherwise.
namespace roots {

/// Root of f on [lo, hi] with f(lo), f(hi) of opposite sign (or one of them zero).
/// Bracketing first, then a safeguarded Newton polish when `df` is given.
std::optional<double> bracketed(const std::function<double(double)>& f, double lo, double hi,
                                const std::function<double(double)>& df = {}, double xtol = 0.0);

/// Minimizer of a unimodal f on [lo, hi] (Brent's method), returned as (x, f(x)).
std::pair<double, double> minimize(const std::function<double(double)>& f, double lo, double hi);

/// Bisection on a boolean predicate that is true at `a` and false at `b`; returns the
/// last point where it holds, to within `xtol`.
double bisect_predicate(const std::function<bool(double)>& holds, double a, double b, double xtol);

}  // namespace roots
}  // namespace f3bp
