#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

/// Spherical, equal-density full three-body problem in normalized units.
///
/// Lengths are scaled by the sum of the three radii and masses by the total
/// mass, so r1 + r2 + r3 = 1 and m1 + m2 + m3 = 1. Angular momentum and energy
/// are expressed in the matching units; dimensional values are recovered by
/// multiplying H by sqrt(G M^3 R) and energies by G M^2 / R.
///
/// Bodies are indexed 0, 1, 2 internally and printed as 1, 2, 3.
namespace f3bp {

/// Raised for malformed user input (radii, masses, labels, H < 0).
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a configuration is geometrically degenerate for the requested
/// operation (e.g. a vanishing third side).
class InvalidConfiguration : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when the distance chart is asked for variations on a collinear
/// configuration; the angle chart has to be used there.
class UnsupportedChart : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct Tolerances {
  double contact = 1e-9;       // |d_ij - (r_i + r_j)| below this is an active contact
  double triangle = 1e-12;     // slack on triangle inequalities
  double equilibrium = 1e-10;  // normalized first-variation residual
  double definiteness = 1e-9;  // normalized minors / constrained variations
};

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Ordered triple of body indices. For angle charts (i, j, k) the vertex of
/// the angle is body j.
using Ordering = std::array<int, 3>;

inline constexpr int third_body(int i, int j) { return 3 - i - j; }

/// Index of the unordered pair {i, j} in (12, 23, 31) order.
inline constexpr int pair_index(int i, int j) {
  const int s = i + j;
  return s == 1 ? 0 : (s == 3 ? 1 : 2);
}

/// Maps canonical body index -> index in the user's input.
using Permutation = std::array<int, 3>;

class RadiiTriple {
 public:
  /// Builds a canonical triple r1 >= r2 >= r3 from arbitrary positive input.
  /// The input is rescaled to sum to one. With `permissive` a smallest radius
  /// down to `kMinRadius` is accepted; otherwise r3 must be at least 1e-3.
  static RadiiTriple canonical(std::array<double, 3> input, bool permissive = false);

  double operator[](int i) const { return r_[i]; }
  const std::array<double, 3>& values() const { return r_; }
  const Permutation& permutation() const { return perm_; }

  static constexpr double kMinRadius = 1e-4;
  static constexpr double kDefaultMinRadius = 1e-3;

 private:
  std::array<double, 3> r_{};
  Permutation perm_{0, 1, 2};
};

struct MassTriple {
  std::array<double, 3> m{};
  double operator[](int i) const { return m[i]; }
};

MassTriple masses_from_radii(const RadiiTriple& radii);

/// Inverse of the constant-density relation, r_i = m_i^(1/3) / sum m_j^(1/3).
/// The result is canonicalized; its permutation refers to the mass input order.
RadiiTriple radii_from_masses(std::array<double, 3> masses, bool permissive = false);

struct SystemParams {
  RadiiTriple radii;
  MassTriple masses;
  double spin_inertia = 0.0;  // (2/5) sum m_i r_i^2

  static SystemParams from_radii(std::array<double, 3> radii, bool permissive = false);
  static SystemParams from_masses(std::array<double, 3> masses, bool permissive = false);

  double r(int i) const { return radii[i]; }
  double m(int i) const { return masses[i]; }
  double pair_mass(int i, int j) const { return masses[i] * masses[j]; }
  double contact(int i, int j) const { return radii[i] + radii[j]; }
};

/// Mutual center distances (d12, d23, d31).
struct Configuration {
  std::array<double, 3> d{};

  double dist(int i, int j) const { return d[pair_index(i, j)]; }
  void set(int i, int j, double value) { d[pair_index(i, j)] = value; }
};

/// Two sides and the included angle at body j: u = d_ij, v = d_jk and
/// theta = angle between the rays j->i and j->k. theta = pi is the collinear
/// arrangement with j in the middle. Values in (pi, 2 pi) are accepted and
/// describe the mirror image.
struct AngleChart {
  Ordering ord{0, 1, 2};
  double u = 0.0;
  double v = 0.0;
  double theta = 0.0;
};

/// Bit set over the pairs in (12, 23, 31) order.
struct ContactSet {
  std::uint8_t bits = 0;

  bool has(int i, int j) const { return (bits >> pair_index(i, j)) & 1u; }
  void add(int i, int j) { bits = static_cast<std::uint8_t>(bits | (1u << pair_index(i, j))); }
  int count() const { return (bits & 1) + ((bits >> 1) & 1) + ((bits >> 2) & 1); }
  std::string to_string() const;
  bool operator==(const ContactSet&) const = default;
};

double moment_of_inertia(const SystemParams& p, const Configuration& cfg);
double potential(const SystemParams& p, const Configuration& cfg);
double amended_potential(const SystemParams& p, const Configuration& cfg, double H);

/// True if every distance respects its contact bound and the triangle
/// inequalities hold, both within the given tolerances.
bool is_feasible(const SystemParams& p, const Configuration& cfg, const Tolerances& tol = {});
bool is_collinear(const Configuration& cfg, double tol = 1e-12);
ContactSet active_contacts(const SystemParams& p, const Configuration& cfg, double tol = 1e-9);

Configuration to_configuration(const AngleChart& chart);
/// Angle chart with theta in (0, pi] for a given ordering.
AngleChart to_angle_chart(const Configuration& cfg, const Ordering& ord);

/// Partials of E with respect to (d12, d23, d31) treated as independent,
/// m_i m_j (1/d_ij^3 - H^2/I_H^2) d_ij. Throws UnsupportedChart on collinear input.
std::array<double, 3> first_variations_distance_form(const SystemParams& p, const Configuration& cfg,
                                                     double H, double triangle_tol = 1e-12);

/// Hessian of E in the distance chart. Algebraic; valid wherever the
/// distances are treated as independent coordinates.
Mat3 distance_hessian(const SystemParams& p, const Configuration& cfg, double H);

/// Partials of E with respect to (d_ij, d_jk, theta_ki) of the angle chart.
std::array<double, 3> first_variations_angle_form(const SystemParams& p, const AngleChart& chart, double H);

/// Hessian of E with respect to (d_ij, d_jk, theta_ki).
Mat3 second_variation_matrix(const SystemParams& p, const AngleChart& chart, double H);

/// Entrywise sums of the magnitudes of the terms that make up the two
/// Hessians above. Rounding error in an entry is a small multiple of machine
/// epsilon times the corresponding magnitude.
Mat3 distance_hessian_magnitude(const SystemParams& p, const Configuration& cfg, double H);
Mat3 second_variation_magnitude(const SystemParams& p, const AngleChart& chart, double H);

/// Natural energy scale |U| + H^2 / (2 I_H) used to normalize variations.
double energy_scale(const SystemParams& p, const Configuration& cfg, double H);

std::string body_label(int i);

}  // namespace f3bp
