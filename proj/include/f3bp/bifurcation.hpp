#pragma once

#include <map>
#include <string>
#include <vector>

#include "f3bp/equilibria.hpp"

namespace f3bp {

struct BranchSample {
  double H = 0.0;
  double q = 0.0;
  Configuration cfg;
  ChartPoint chart;
  Verdict verdict = Verdict::marginal;
};

/// A traced family branch: all samples of one (label, orientation, branch)
/// ordered by H, plus the indices of the events touching it.
struct FamilyBranch {
  FamilyKey key;
  std::vector<BranchSample> samples;
  std::vector<int> events;
};

enum class EventKind { H_bifurcation, symmetric_bifurcation, termination_fission, transition_fission, branch_merge };
std::string to_string(EventKind k);

/// Where a branch begins or ends (or changes verdict) inside the sweep range.
struct Endpoint {
  FamilyKey key;
  double H = 0.0;
  enum class Type { start, end, verdict_change } type = Type::start;
  Configuration cfg;
  int orientation = 0;
  int contacts = 0;
  Verdict before = Verdict::marginal;  // verdict just below H (verdict changes only)
  Verdict after = Verdict::marginal;
  bool reduced_precision = false;
};

struct BifurcationEvent {
  EventKind kind = EventKind::branch_merge;
  double H = 0.0;
  std::vector<Endpoint> participants;
  std::string released_contact;  // pair label such as "23", empty if none
  bool orphan = false;           // single participant: no partner found
  bool reduced_precision = false;
};

struct SweepOptions {
  double H_lo = 1e-3;
  double H_hi = 10.0;
  int samples = 400;
  double event_tol = 1e-10;
  Tolerances tol;
};

struct SweepResult {
  std::vector<double> H_samples;
  std::vector<int> stable_count;   // per H sample
  std::vector<int> record_count;   // per H sample
  std::vector<FamilyBranch> branches;
  std::vector<BifurcationEvent> events;
  std::vector<std::string> warnings;

  /// Distinct full labels (label plus orientation) seen anywhere in the sweep.
  std::vector<std::string> labels() const;
};

/// Traces every family over [H_lo, H_hi] on a log grid (plus the midpoints of
/// each family's existence interval so short-lived branches are not missed),
/// bisects existence and verdict changes, and clusters the endpoints into
/// bifurcation events.
SweepResult sweep(const SystemParams& p, const SweepOptions& opts = {});

struct DiagramNode {
  std::string id;  // "origin", "tail" or "e<N>"
  std::string kind;
  double H = 0.0;
};

struct DiagramEdge {
  std::string family;  // FamilyKey::name()
  std::string label;   // class label without orientation
  std::string from, to;
  double H_from = 0.0, H_to = 0.0;
  Verdict verdict = Verdict::marginal;
};

struct DiagramGraph {
  std::vector<DiagramNode> nodes;
  std::vector<DiagramEdge> edges;
  std::vector<std::string> templates;  // e.g. "bif2a"
  std::vector<std::vector<std::string>> pathways;  // connected label sets
  std::vector<std::string> warnings;
};

DiagramGraph diagram_assembly(const SweepResult& s);

/// Families of the four qualitative pathways, by label.
const std::map<std::string, std::vector<std::string>>& pathway_templates();

/// Sign-law samples for a traced branch (fixed-configuration classes yield none).
std::vector<FamilySample> family_samples(const SystemParams& p, const FamilyBranch& b);
SignLawReport family_sign_test(const SystemParams& p, const FamilyBranch& b);

}  // namespace f3bp
