#include "f3bp/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace f3bp {

namespace {

void require_finite_positive(const std::array<double, 3>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x) || x <= 0.0)
      throw InvalidInput(std::string(what) + " must be finite and strictly positive");
  }
}

struct DistanceTerms {
  double IH, w;  // w = H^2 / I_H^2
};

DistanceTerms terms(const SystemParams& p, const std::array<double, 3>& d, double H) {
  const double IH = p.pair_mass(0, 1) * d[0] * d[0] + p.pair_mass(1, 2) * d[1] * d[1] +
                    p.pair_mass(2, 0) * d[2] * d[2] + p.spin_inertia;
  return {IH, H * H / (IH * IH)};
}

// Pair masses in (12, 23, 31) order.
std::array<double, 3> pair_masses(const SystemParams& p) {
  return {p.pair_mass(0, 1), p.pair_mass(1, 2), p.pair_mass(2, 0)};
}

std::array<double, 3> distance_gradient(const SystemParams& p, const std::array<double, 3>& d, double H) {
  const auto [IH, w] = terms(p, d, H);
  const auto mm = pair_masses(p);
  std::array<double, 3> g{};
  for (int a = 0; a < 3; ++a) g[a] = mm[a] * d[a] * (-w + 1.0 / (d[a] * d[a] * d[a]));
  return g;
}

// Third side and its first/second partials in (u, v, theta).
struct ThirdSide {
  double D;
  std::array<double, 3> grad;
  Mat3 hess;
};

ThirdSide third_side(double u, double v, double th) {
  const double c = std::cos(th), s = std::sin(th);
  const double D2 = u * u + v * v - 2.0 * u * v * c;
  if (!(D2 > 0.0)) throw InvalidConfiguration("third side vanishes in angle chart");
  const double D = std::sqrt(D2);
  ThirdSide t{D, {}, {}};
  const double Du = (u - v * c) / D, Dv = (v - u * c) / D, Dt = u * v * s / D;
  t.grad = {Du, Dv, Dt};
  t.hess[0][0] = (1.0 - Du * Du) / D;
  t.hess[1][1] = (1.0 - Dv * Dv) / D;
  t.hess[2][2] = (u * v * c - Dt * Dt) / D;
  t.hess[0][1] = t.hess[1][0] = (-c - Du * Dv) / D;
  t.hess[0][2] = t.hess[2][0] = (v * s - Du * Dt) / D;
  t.hess[1][2] = t.hess[2][1] = (u * s - Dv * Dt) / D;
  return t;
}

}  // namespace

RadiiTriple RadiiTriple::canonical(std::array<double, 3> input, bool permissive) {
  require_finite_positive(input, "radii");
  const double sum = input[0] + input[1] + input[2];
  std::array<int, 3> idx{0, 1, 2};
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return input[a] > input[b]; });
  RadiiTriple t;
  for (int c = 0; c < 3; ++c) {
    t.r_[c] = input[idx[c]] / sum;
    t.perm_[c] = idx[c];
  }
  // Fix the rounding residue on the largest radius so the sum is one to the last bit
  // that matters.
  t.r_[0] = 1.0 - t.r_[1] - t.r_[2];
  const double rmin = permissive ? kMinRadius : kDefaultMinRadius;
  if (t.r_[2] < rmin)
    throw InvalidInput("smallest radius below " + std::to_string(rmin) + " (degenerate body)");
  return t;
}

MassTriple masses_from_radii(const RadiiTriple& radii) {
  MassTriple m;
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += radii[i] * radii[i] * radii[i];
  for (int i = 0; i < 3; ++i) m.m[i] = radii[i] * radii[i] * radii[i] / s;
  return m;
}

RadiiTriple radii_from_masses(std::array<double, 3> masses, bool permissive) {
  require_finite_positive(masses, "masses");
  std::array<double, 3> r{};
  for (int i = 0; i < 3; ++i) r[i] = std::cbrt(masses[i]);
  return RadiiTriple::canonical(r, permissive);
}

SystemParams SystemParams::from_radii(std::array<double, 3> radii, bool permissive) {
  SystemParams p;
  p.radii = RadiiTriple::canonical(radii, permissive);
  p.masses = masses_from_radii(p.radii);
  double s = 0.0;
  for (int i = 0; i < 3; ++i) s += p.masses[i] * p.radii[i] * p.radii[i];
  p.spin_inertia = 0.4 * s;
  return p;
}

SystemParams SystemParams::from_masses(std::array<double, 3> masses, bool permissive) {
  const RadiiTriple r = radii_from_masses(masses, permissive);
  SystemParams p = from_radii(r.values(), permissive);
  p.radii = r;  // keep the permutation relative to the mass input
  return p;
}

std::string ContactSet::to_string() const {
  std::string s;
  const char* names[3] = {"12", "23", "31"};
  for (int a = 0; a < 3; ++a) {
    if ((bits >> a) & 1u) {
      if (!s.empty()) s += ',';
      s += names[a];
    }
  }
  return s;
}

double moment_of_inertia(const SystemParams& p, const Configuration& cfg) {
  return terms(p, cfg.d, 0.0).IH;
}

double potential(const SystemParams& p, const Configuration& cfg) {
  const auto mm = pair_masses(p);
  return -(mm[0] / cfg.d[0] + mm[1] / cfg.d[1] + mm[2] / cfg.d[2]);
}

double amended_potential(const SystemParams& p, const Configuration& cfg, double H) {
  return H * H / (2.0 * moment_of_inertia(p, cfg)) + potential(p, cfg);
}

double energy_scale(const SystemParams& p, const Configuration& cfg, double H) {
  return -potential(p, cfg) + H * H / (2.0 * moment_of_inertia(p, cfg));
}

bool is_collinear(const Configuration& cfg, double tol) {
  const auto& d = cfg.d;
  for (int a = 0; a < 3; ++a) {
    const double slack = d[(a + 1) % 3] + d[(a + 2) % 3] - d[a];
    if (std::abs(slack) <= tol * std::max(1.0, d[a])) return true;
  }
  return false;
}

bool is_feasible(const SystemParams& p, const Configuration& cfg, const Tolerances& tol) {
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    if (!(cfg.dist(i, j) >= p.contact(i, j) - tol.contact)) return false;
  }
  const auto& d = cfg.d;
  for (int a = 0; a < 3; ++a) {
    if (d[(a + 1) % 3] + d[(a + 2) % 3] - d[a] < -tol.triangle * std::max(1.0, d[a])) return false;
  }
  return true;
}

ContactSet active_contacts(const SystemParams& p, const Configuration& cfg, double tol) {
  ContactSet c;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    if (std::abs(cfg.dist(i, j) - p.contact(i, j)) < tol) c.add(i, j);
  }
  return c;
}

Configuration to_configuration(const AngleChart& chart) {
  const auto [i, j, k] = chart.ord;
  Configuration cfg;
  cfg.set(i, j, chart.u);
  cfg.set(j, k, chart.v);
  const double D2 = chart.u * chart.u + chart.v * chart.v - 2.0 * chart.u * chart.v * std::cos(chart.theta);
  cfg.set(k, i, std::sqrt(std::max(0.0, D2)));
  return cfg;
}

AngleChart to_angle_chart(const Configuration& cfg, const Ordering& ord) {
  const auto [i, j, k] = ord;
  AngleChart a;
  a.ord = ord;
  a.u = cfg.dist(i, j);
  a.v = cfg.dist(j, k);
  const double D = cfg.dist(k, i);
  const double c = (a.u * a.u + a.v * a.v - D * D) / (2.0 * a.u * a.v);
  a.theta = std::acos(std::clamp(c, -1.0, 1.0));
  return a;
}

std::array<double, 3> first_variations_distance_form(const SystemParams& p, const Configuration& cfg, double H,
                                                     double triangle_tol) {
  if (is_collinear(cfg, triangle_tol))
    throw UnsupportedChart("distance chart is singular on collinear configurations; use the angle chart");
  return distance_gradient(p, cfg.d, H);
}

Mat3 distance_hessian(const SystemParams& p, const Configuration& cfg, double H) {
  const auto [IH, w] = terms(p, cfg.d, H);
  const auto mm = pair_masses(p);
  const auto& d = cfg.d;
  Mat3 h{};
  const double c = 4.0 * H * H / (IH * IH * IH);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) h[a][b] = c * mm[a] * mm[b] * d[a] * d[b];
    h[a][a] += mm[a] * (-w - 2.0 / (d[a] * d[a] * d[a]));
  }
  return h;
}

Mat3 distance_hessian_magnitude(const SystemParams& p, const Configuration& cfg, double H) {
  const auto [IH, w] = terms(p, cfg.d, H);
  const auto mm = pair_masses(p);
  const auto& d = cfg.d;
  Mat3 h{};
  const double c = 4.0 * H * H / (IH * IH * IH);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) h[a][b] = c * mm[a] * mm[b] * d[a] * d[b];
    h[a][a] += mm[a] * (w + 2.0 / (d[a] * d[a] * d[a]));
  }
  return h;
}

namespace {

// Gradient and Hessian of E in (u, v, theta), assembled from the distance
// chart through the chain rule.
void angle_derivatives(const SystemParams& p, const AngleChart& ch, double H, std::array<double, 3>* grad,
                       Mat3* hess, Mat3* mag = nullptr) {
  if (!(ch.u > 0.0) || !(ch.v > 0.0)) throw InvalidConfiguration("angle chart sides must be positive");
  const auto [i, j, k] = ch.ord;
  const ThirdSide t = third_side(ch.u, ch.v, ch.theta);
  Configuration cfg;
  cfg.set(i, j, ch.u);
  cfg.set(j, k, ch.v);
  cfg.set(k, i, t.D);
  const int a_ij = pair_index(i, j), a_jk = pair_index(j, k), a_ki = pair_index(k, i);
  const auto g = distance_gradient(p, cfg.d, H);
  // J maps (u, v, theta) -> (d_ij, d_jk, d_ki) in chart-local order.
  const double J[3][3] = {{1, 0, 0}, {0, 1, 0}, {t.grad[0], t.grad[1], t.grad[2]}};
  const std::array<int, 3> loc{a_ij, a_jk, a_ki};
  if (grad) {
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int r = 0; r < 3; ++r) s += g[loc[r]] * J[r][c];
      (*grad)[c] = s;
    }
  }
  if (hess) {
    const Mat3 hd = distance_hessian(p, cfg, H);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        double s = 0.0;
        for (int r = 0; r < 3; ++r)
          for (int q = 0; q < 3; ++q) s += J[r][a] * hd[loc[r]][loc[q]] * J[q][b];
        (*hess)[a][b] = s + g[a_ki] * t.hess[a][b];
      }
    }
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) (*hess)[b][a] = (*hess)[a][b];
  }
  if (mag) {
    const Mat3 hm = distance_hessian_magnitude(p, cfg, H);
    const auto mm = pair_masses(p);
    const auto [IH, w] = terms(p, cfg.d, H);
    const double gm = mm[a_ki] * t.D * (w + 1.0 / (t.D * t.D * t.D));
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) {
        double s = 0.0;
        for (int r = 0; r < 3; ++r)
          for (int q = 0; q < 3; ++q) s += std::abs(J[r][a]) * hm[loc[r]][loc[q]] * std::abs(J[q][b]);
        (*mag)[a][b] = s + gm * std::abs(t.hess[a][b]);
      }
  }
}

}  // namespace

std::array<double, 3> first_variations_angle_form(const SystemParams& p, const AngleChart& chart, double H) {
  std::array<double, 3> g{};
  angle_derivatives(p, chart, H, &g, nullptr);
  return g;
}

Mat3 second_variation_matrix(const SystemParams& p, const AngleChart& chart, double H) {
  Mat3 h{};
  angle_derivatives(p, chart, H, nullptr, &h);
  return h;
}

Mat3 second_variation_magnitude(const SystemParams& p, const AngleChart& chart, double H) {
  Mat3 m{};
  angle_derivatives(p, chart, H, nullptr, nullptr, &m);
  return m;
}

std::string body_label(int i) { return std::to_string(i + 1); }

}  // namespace f3bp
