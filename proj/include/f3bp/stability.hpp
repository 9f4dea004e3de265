#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "f3bp/model.hpp"

namespace f3bp {

/// A free-block diagonal entry is treated as numerically zero when it is at or
/// below this fraction of the magnitude of the terms summed into it.
inline constexpr double kDiagonalFloor = 1e-10;

enum class Verdict { stable, unstable, marginal };
std::string to_string(Verdict v);

class NotAnEquilibrium : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientData : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configuration expressed in the chart used for certification.
///
/// Angle chart coordinates are (d_ij, d_jk, theta); distance chart
/// coordinates are (d12, d23, d31). `constrained[c]` marks coordinates that
/// sit on an active contact and may only increase.
struct ChartPoint {
  bool angle = true;
  AngleChart chart;
  Configuration cfg;
  std::array<bool, 3> constrained{false, false, false};

  static ChartPoint from_angle(const AngleChart& a, std::array<bool, 3> constrained);
  static ChartPoint from_distances(const Configuration& c, std::array<bool, 3> constrained);

  std::array<double, 3> coords() const;
  std::string coord_name(int c) const;
};

/// Scaled first and second variations. Entries are made dimensionless by the
/// coordinate scale (the distance itself; angles are already dimensionless)
/// and the energy scale |U| + H^2/(2 I_H).
struct StabilityCertificate {
  std::vector<std::string> constrained_names;
  std::vector<double> constrained_values;
  std::vector<std::string> free_names;
  std::vector<double> free_residuals;
  std::vector<std::vector<double>> free_block;
  std::vector<double> minors;       // leading principal minors of the normalised block
  std::vector<double> eigenvalues;  // of the normalised block, ascending, closed form
  Verdict verdict = Verdict::marginal;

  double max_free_residual() const;
};

/// Constrained first variations strictly positive and a positive definite
/// free block give a strict constrained minimum. Definiteness is decided on
/// the free block normalised by its diagonal, D^-1/2 B D^-1/2. Throws
/// NotAnEquilibrium when a free residual exceeds `residual_limit`.
StabilityCertificate certify(const SystemParams& p, const ChartPoint& pt, double H, const Tolerances& tol = {},
                             double residual_limit = 1e-8);

/// Closed-form eigenvalues of a symmetric matrix of size 1, 2 or 3, ascending.
std::vector<double> symmetric_eigenvalues(const std::vector<std::vector<double>>& m);
std::vector<double> leading_minors(const std::vector<std::vector<double>>& m);

/// One sample of a one-parameter family, as used by the sign-law check.
struct FamilySample {
  double H = 0.0;
  double q = 0.0;                     // family parameter (grows with the configuration)
  std::array<double, 3> coords{};     // chart coordinates
  std::array<bool, 3> free{};         // which coordinates are free
  std::vector<std::vector<double>> free_block;  // raw (unscaled) Hessian on the free coordinates
  Verdict verdict = Verdict::marginal;
};

struct SignMismatch {
  std::size_t index;
  double H;
  double dH_dq;
  double second_variation;
};

struct SignLawReport {
  std::size_t checked = 0;
  std::size_t skipped_marginal = 0;
  std::vector<SignMismatch> mismatches;
  bool ok() const { return mismatches.empty(); }
};

/// Checks sign(E_qq) = sign(dH/dq) at the interior samples of a family, where
/// E_qq is the second variation along the family tangent (estimated from the
/// neighbouring samples) and dH/dq is a centred finite difference.
SignLawReport family_sign_test(const std::vector<FamilySample>& samples);

}  // namespace f3bp
