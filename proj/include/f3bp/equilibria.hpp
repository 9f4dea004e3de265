#pragma once

#include <optional>
#include <string>
#include <vector>

#include "f3bp/model.hpp"
#include "f3bp/stability.hpp"

namespace f3bp {

enum class ClassTag { LR, ER, TR, EA, IS, LO, EO };
std::string to_string(ClassTag t);

/// Position of a solution relative to the minimum of its family's H(q)
/// curve: `inner` below the minimizing q, `outer` above it. Fixed
/// configurations (LR, ER) use `single`.
enum class Branch { single, inner, outer };
std::string to_string(Branch b);

/// Family label, e.g. ER132, EA13-2, IS12-3 with an orientation flag.
///
/// Orderings use 0-based body indices:
///   LR, LO       ordering unused
///   ER, TR, EO   (i, j, k) with j the middle body / the angle vertex
///   IS           (i, j, k) with {i, j} the contact pair, k separated
///   EA           (i, j, k) collinear i-j-k, {i, j} in contact
struct EquilibriumClass {
  ClassTag tag = ClassTag::LR;
  Ordering ord{0, 1, 2};
  bool mirror = false;

  /// Label without the orientation marker ("TR132").
  std::string label() const;
  /// Label with a trailing '*' for the mirror orientation ("TR132*").
  std::string full_label() const;
  int contact_count() const;

  bool operator==(const EquilibriumClass& o) const;
  bool operator<(const EquilibriumClass& o) const;
};

/// Parses labels such as "LR", "ER132", "EA13-2", "IS12-3*". Throws InvalidInput.
EquilibriumClass parse_label(const std::string& s);

/// All 28 labels of the census, in deterministic order.
std::vector<EquilibriumClass> all_classes();

struct FamilyKey {
  EquilibriumClass cls;
  Branch branch = Branch::single;
  std::string name() const;  // e.g. "EA12-3/outer"
  bool operator==(const FamilyKey& o) const { return cls == o.cls && branch == o.branch; }
  bool operator<(const FamilyKey& o) const;
};

/// Family keys that can carry solutions for the given parameters.
std::vector<FamilyKey> all_family_keys(const SystemParams& p);

struct EquilibriumRecord {
  EquilibriumClass cls;
  Branch branch = Branch::single;
  Configuration cfg;
  ChartPoint chart;
  ContactSet contacts;
  double H = 0.0;
  double spin_rate = 0.0;
  double energy = 0.0;
  double q = 0.0;  // family parameter
  StabilityCertificate cert;
  Verdict verdict = Verdict::marginal;
  std::string diagnostic;

  FamilyKey key() const { return {cls, branch}; }
  /// Signed orientation of the triangle (p1, p2, p3): +1, -1, or 0 if collinear.
  int orientation() const;
};

/// One-parameter description of a family: H as a function of the family
/// parameter q on [q_lo, q_hi], with the H-minimizing q_star (may lie
/// outside the domain). Fixed families (LR, ER) have no curve.
struct FamilyCurve {
  double q_lo = 0.0;
  double q_hi = 0.0;  // may be +inf
  double q_star = 0.0;
  bool valid = false;
};

FamilyCurve family_curve(const SystemParams& p, const EquilibriumClass& cls);
/// H as a function of the family parameter (throws for LR/ER).
double family_H(const SystemParams& p, const EquilibriumClass& cls, double q);
/// Closed H interval on which the family branch exists (hi may be +inf).
std::optional<std::pair<double, double>> family_H_range(const SystemParams& p, const FamilyKey& key);

std::optional<EquilibriumRecord> solve_family(const SystemParams& p, const FamilyKey& key, double H,
                                              const Tolerances& tol = {});

std::vector<EquilibriumRecord> solve_LR(const SystemParams& p, double H, const Tolerances& tol = {});
std::optional<EquilibriumRecord> solve_ER(const SystemParams& p, const Ordering& ijk, double H,
                                          const Tolerances& tol = {});
std::vector<EquilibriumRecord> solve_TR(const SystemParams& p, const Ordering& ijk, Branch branch, double H,
                                        const Tolerances& tol = {});
std::vector<EquilibriumRecord> solve_IS(const SystemParams& p, int i, int j, Branch branch, double H,
                                        const Tolerances& tol = {});
std::optional<EquilibriumRecord> solve_EA(const SystemParams& p, int i, int j, Branch branch, double H,
                                          const Tolerances& tol = {});
std::vector<EquilibriumRecord> solve_LO(const SystemParams& p, Branch branch, double H, const Tolerances& tol = {});
std::optional<EquilibriumRecord> solve_EO(const SystemParams& p, const Ordering& ijk, Branch branch, double H,
                                          const Tolerances& tol = {});

/// Every relative equilibrium at H, certified and ordered by (label, branch).
std::vector<EquilibriumRecord> enumerate_all(const SystemParams& p, double H, const Tolerances& tol = {});

// Closed-form helpers shared with the tests and region charts.

/// Largest H at which the resting triangle survives.
double LR_termination_H(const SystemParams& p);
/// H above which ER ijk is stable: I_H (1 + r_j)^(-3/2).
double ER_stabilization_H(const SystemParams& p, const Ordering& ijk);
/// Largest H at which ER ijk exists.
double ER_existence_H(const SystemParams& p, const Ordering& ijk);
/// Critical equilateral distance sqrt(3 I_S / sum m_i m_j).
double LO_critical_distance(const SystemParams& p);
/// Positive root of the collinear central-configuration quintic, rho = d_jk / d_ij.
double euler_quintic_ratio(double mi, double mj, double mk);
/// Contact function of EA ij-k along its family; increasing in x = d_jk,
/// non-negative where the i-j contact can hold.
double EA_contact_function(const SystemParams& p, int i, int j, double x);

/// The three ER/TR/EO orderings (123, 132, 312) in 0-based form.
const std::vector<Ordering>& collinear_orderings();

}  // namespace f3bp
