#include "f3bp/stability.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace f3bp {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::unstable: return "unstable";
    case Verdict::marginal: return "marginal";
  }
  return "marginal";
}

ChartPoint ChartPoint::from_angle(const AngleChart& a, std::array<bool, 3> constrained) {
  ChartPoint p;
  p.angle = true;
  p.chart = a;
  p.cfg = to_configuration(a);
  p.constrained = constrained;
  return p;
}

ChartPoint ChartPoint::from_distances(const Configuration& c, std::array<bool, 3> constrained) {
  ChartPoint p;
  p.angle = false;
  p.cfg = c;
  p.constrained = constrained;
  return p;
}

std::array<double, 3> ChartPoint::coords() const {
  if (angle) return {chart.u, chart.v, chart.theta};
  return cfg.d;
}

std::string ChartPoint::coord_name(int c) const {
  auto pair = [](int i, int j) { return "d" + body_label(i) + body_label(j); };
  if (!angle) {
    static const char* n[3] = {"d12", "d23", "d31"};
    return n[c];
  }
  const auto [i, j, k] = chart.ord;
  if (c == 0) return pair(i, j);
  if (c == 1) return pair(j, k);
  return "theta" + body_label(k) + body_label(i);
}

double StabilityCertificate::max_free_residual() const {
  double r = 0.0;
  for (double x : free_residuals) r = std::max(r, std::abs(x));
  return r;
}

std::vector<double> leading_minors(const std::vector<std::vector<double>>& m) {
  const std::size_t n = m.size();
  std::vector<double> out;
  if (n >= 1) out.push_back(m[0][0]);
  if (n >= 2) out.push_back(m[0][0] * m[1][1] - m[0][1] * m[1][0]);
  if (n >= 3) {
    out.push_back(m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                  m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                  m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]));
  }
  return out;
}

std::vector<double> symmetric_eigenvalues(const std::vector<std::vector<double>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return {};
  if (n == 1) return {m[0][0]};
  if (n == 2) {
    const double tr = 0.5 * (m[0][0] + m[1][1]);
    const double df = 0.5 * (m[0][0] - m[1][1]);
    const double r = std::hypot(df, m[0][1]);
    return {tr - r, tr + r};
  }
  // Trigonometric solution of the characteristic cubic.
  const double p1 = m[0][1] * m[0][1] + m[0][2] * m[0][2] + m[1][2] * m[1][2];
  const double q = (m[0][0] + m[1][1] + m[2][2]) / 3.0;
  if (p1 == 0.0) {
    std::vector<double> e{m[0][0], m[1][1], m[2][2]};
    std::sort(e.begin(), e.end());
    return e;
  }
  const double p2 = (m[0][0] - q) * (m[0][0] - q) + (m[1][1] - q) * (m[1][1] - q) + (m[2][2] - q) * (m[2][2] - q) +
                    2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  std::vector<std::vector<double>> b(3, std::vector<double>(3));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b[i][j] = (m[i][j] - (i == j ? q : 0.0)) / p;
  const double r = std::clamp(leading_minors(b)[2] / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  std::vector<double> e{e1, e2, e3};
  std::sort(e.begin(), e.end());
  return e;
}

StabilityCertificate certify(const SystemParams& p, const ChartPoint& pt, double H, const Tolerances& tol,
                             double residual_limit) {
  std::array<double, 3> g{};
  Mat3 M{}, A{};
  std::array<double, 3> s{};
  if (pt.angle) {
    g = first_variations_angle_form(p, pt.chart, H);
    M = second_variation_matrix(p, pt.chart, H);
    A = second_variation_magnitude(p, pt.chart, H);
    s = {pt.chart.u, pt.chart.v, 1.0};
  } else {
    // Algebraic distance-chart derivatives; valid off the collinear set.
    if (is_collinear(pt.cfg, tol.triangle)) throw UnsupportedChart("collinear configuration needs the angle chart");
    g = first_variations_distance_form(p, pt.cfg, H, tol.triangle);
    M = distance_hessian(p, pt.cfg, H);
    A = distance_hessian_magnitude(p, pt.cfg, H);
    s = pt.cfg.d;
  }
  const double es = energy_scale(p, pt.cfg, H);

  StabilityCertificate c;
  std::vector<int> free;
  for (int a = 0; a < 3; ++a) {
    const double val = g[a] * s[a] / es;
    if (pt.constrained[a]) {
      c.constrained_names.push_back(pt.coord_name(a));
      c.constrained_values.push_back(val);
    } else {
      free.push_back(a);
      c.free_names.push_back(pt.coord_name(a));
      c.free_residuals.push_back(val);
    }
  }
  if (c.max_free_residual() > residual_limit)
    throw NotAnEquilibrium("free first variation " + std::to_string(c.max_free_residual()) + " exceeds limit");

  c.free_block.assign(free.size(), std::vector<double>(free.size()));
  for (std::size_t a = 0; a < free.size(); ++a)
    for (std::size_t b = 0; b < free.size(); ++b)
      c.free_block[a][b] = M[free[a]][free[b]] * s[free[a]] * s[free[b]] / es;
  // Definiteness is judged on the diagonally normalised block D^-1/2 B D^-1/2
  // (D = |diag B|). It is congruent to B, so the inertia is unchanged, but the
  // margins no longer depend on how each coordinate happens to be scaled: far
  // orbital configurations have angular stiffnesses many orders below the
  // energy scale that are nevertheless resolved to full relative precision.
  // Whether a diagonal entry is resolved at all is judged against the size of
  // the terms that cancel in it, not against the energy scale.
  const double t = tol.definiteness;
  bool unstable = false, strict = true;
  for (double v : c.constrained_values) {
    if (v < -t) unstable = true;
    if (!(v > t)) strict = false;
  }
  const std::size_t n = free.size();
  std::vector<std::vector<double>> N = c.free_block;
  bool degenerate = false;
  for (std::size_t a = 0; a < n; ++a) {
    const double d = c.free_block[a][a];
    const double floor = kDiagonalFloor * A[free[a]][free[a]] * s[free[a]] * s[free[a]] / es;
    if (d < -floor) unstable = true;
    if (!(std::abs(d) > floor)) degenerate = true;
  }
  if (!degenerate) {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        N[a][b] = c.free_block[a][b] / std::sqrt(std::abs(c.free_block[a][a] * c.free_block[b][b]));
  } else {
    strict = false;
  }
  c.minors = leading_minors(N);
  c.eigenvalues = symmetric_eigenvalues(N);
  for (double e : c.eigenvalues) {
    if (e < -t) unstable = true;
    if (!(e > t)) strict = false;
  }
  for (double m : c.minors)
    if (!(m > t)) strict = false;
  c.verdict = unstable ? Verdict::unstable : (strict ? Verdict::stable : Verdict::marginal);
  return c;
}

SignLawReport family_sign_test(const std::vector<FamilySample>& samples) {
  if (samples.size() < 3) throw InsufficientData("sign law needs at least three samples");
  SignLawReport rep;
  for (std::size_t n = 1; n + 1 < samples.size(); ++n) {
    const auto& a = samples[n - 1];
    const auto& b = samples[n];
    const auto& c = samples[n + 1];
    if (b.verdict == Verdict::marginal || a.verdict == Verdict::marginal || c.verdict == Verdict::marginal) {
      ++rep.skipped_marginal;
      continue;
    }
    const double dq = c.q - a.q;
    if (dq == 0.0) {
      ++rep.skipped_marginal;
      continue;
    }
    const double dHdq = (c.H - a.H) / dq;
    std::vector<double> t;
    for (int k = 0; k < 3; ++k)
      if (b.free[k]) t.push_back(c.coords[k] - a.coords[k]);
    double e = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
      for (std::size_t j = 0; j < t.size(); ++j) e += t[i] * b.free_block[i][j] * t[j];
    ++rep.checked;
    if ((e > 0) != (dHdq > 0) || e == 0.0 || dHdq == 0.0) rep.mismatches.push_back({n, b.H, dHdq, e});
  }
  return rep;
}

}  // namespace f3bp
