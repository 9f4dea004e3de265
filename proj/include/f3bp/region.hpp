#pragma once

#include <string>
#include <utility>
#include <vector>

#include "f3bp/model.hpp"

namespace f3bp {

enum class ChartId { TR132_stable, EA123_fission, EA132_fission, EA312_fission, LO_mode, EO_mode };
std::string to_string(ChartId id);
ChartId parse_chart_id(const std::string& s);  // throws InvalidInput

/// Signed scalar whose zero level separates the two regimes of a chart.
///
///   EA ijk fission  > 0: ER ijk releases the j-k contact (fissions into EA ij-k)
///   TR132-stable    > 0: a stable TR132 branch exists
///   LO-mode         > 0: LO appears through an H-bifurcation (two branches)
///   EO-mode         > 0: EO appears through a transition from its EA family
double chart_value(ChartId id, const SystemParams& p, const Ordering& eo_ordering = {0, 1, 2});

struct RegionPoint {
  double m1 = 0.0, m3 = 0.0;
  double value = 0.0;
  bool valid = false;  // inside the canonical triangle, away from its edges
};

struct RegionChart {
  ChartId id = ChartId::LO_mode;
  int res = 0;
  std::vector<RegionPoint> grid;  // row-major, m3 index fastest
  std::vector<std::vector<std::pair<double, double>>> boundary;  // zero-level polylines in (m1, m3)

  const RegionPoint& at(int a, int b) const { return grid[static_cast<std::size_t>(a) * res + b]; }
  bool has_sign_change() const;
};

/// Grid over m1 in [1/3, 1] by m3 in [0, 1/3]; points with m2 outside
/// [m3, m1] or within `edge_margin` of the triangle's edges are masked.
RegionChart region_chart(ChartId id, int res, const Ordering& eo_ordering = {0, 1, 2}, double edge_margin = 1e-3);

}  // namespace f3bp
