#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "f3bp/bifurcation.hpp"
#include "f3bp/equilibria.hpp"
#include "f3bp/region.hpp"

namespace f3bp::io {

inline constexpr int kSchemaVersion = 1;

/// "%.17g" formatting used for every CSV number.
std::string num(double x);

/// Physical parameters plus the permutation from canonical to input order.
nlohmann::json params_json(const SystemParams& p, const std::string& input_kind, const std::array<double, 3>& input);

nlohmann::json record_json(const EquilibriumRecord& r);
nlohmann::json records_json(const std::vector<EquilibriumRecord>& records);

/// class,label,branch,orientation,contacts,H,d12,d23,d31,theta,spin_rate,energy,verdict
void write_records_csv(std::ostream& os, const std::vector<EquilibriumRecord>& records);

/// Diagram graph (nodes = events, edges = branch segments), event list and
/// per-sample stable counts.
nlohmann::json sweep_json(const SweepResult& s, const DiagramGraph& g);

/// class,label,H,d12,d23,d31,verdict for every traced branch sample.
void write_branches_csv(std::ostream& os, const SweepResult& s);

/// m1,m3,value on the valid grid points.
void write_field_csv(std::ostream& os, const RegionChart& rc);

/// polyline,m1,m3 for every vertex of the zero level set.
void write_boundary_csv(std::ostream& os, const RegionChart& rc);

}  // namespace f3bp::io
