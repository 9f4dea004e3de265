#pragma once

#include <optional>
#include <string>
#include <vector>

#include "f3bp/equilibria.hpp"

namespace f3bp {

/// Brute-force cross-check of the analytic solvers.
///
/// The amended potential is re-derived from planar Cartesian positions
/// (inertia about the centre of mass) and differentiated with forward-mode
/// hyper-dual numbers, so nothing here reuses the model's closed forms.
/// Each contact face is scanned on its own grid: the resting triangle
/// directly, double-contact edges in 1-D, single-contact faces in 2-D and the
/// contact-free interior in 3-D.
namespace oracle {

struct CriticalPoint {
  Configuration cfg;
  ContactSet contacts;
  int orientation = 0;  // sign of the signed area of (p1, p2, p3)
  double energy = 0.0;
  double grad_norm = 0.0;            // free-coordinate gradient / energy scale
  std::vector<double> multipliers;   // active contacts, scaled, >= 0 when feasible
  std::vector<double> eigenvalues;   // free Hessian (chart coordinates), scaled
  bool minimum = false;              // strict constrained local minimum
  bool marginal = false;             // some multiplier or eigenvalue within tolerance of zero
};

struct ScanReport {
  int res = 0;
  double H = 0.0;
  std::size_t nodes_evaluated = 0;
  std::vector<CriticalPoint> points;
  double global_min_energy = 0.0;  // lowest feasible grid value
  Configuration global_min_cfg;
  std::optional<CriticalPoint> global_min;  // refined lowest local minimum

  // Filled by match().
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (record, point)
  std::vector<std::size_t> unmatched_records;
  std::vector<std::size_t> unmatched_points;
  std::vector<std::size_t> verdict_mismatches;  // record indices
  std::size_t marginal_skipped = 0;

  bool agrees() const {
    return unmatched_records.empty() && unmatched_points.empty() && verdict_mismatches.empty();
  }
};

/// Amended potential evaluated from Cartesian positions.
double cartesian_energy(const SystemParams& p, const Configuration& cfg, double H);

/// Locates every constrained critical point at H. `res` (>= 16) is the base
/// resolution: the interior uses res^3 nodes, faces (4 res)^2 and edges 64 res.
ScanReport scan(const SystemParams& p, double H, int res = 64, const Tolerances& tol = {});

/// Pairs scan points with analytic records (same contacts, orientation and
/// distances within `rel_tol`) and compares minimum/saddle classification.
void match(ScanReport& rep, const std::vector<EquilibriumRecord>& records, double rel_tol = 1e-6);

/// Newton refinement of a critical point on the face selected by the
/// contacts active at the seed (within `face_tol`).
std::optional<CriticalPoint> refine(const SystemParams& p, double H, const Configuration& seed, int orientation = 1,
                                    const Tolerances& tol = {}, double face_tol = 1e-6);

struct DescentResult {
  Configuration cfg;
  ContactSet contacts;
  double energy = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Projected gradient descent on E from a feasible seed; contacts that become
/// active are kept as bounds.
DescentResult descend(const SystemParams& p, double H, const Configuration& seed, int max_iter = 20000);

}  // namespace oracle
}  // namespace f3bp
