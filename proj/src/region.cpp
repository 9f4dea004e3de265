#include "f3bp/region.hpp"

#include <cmath>
#include <map>

#include "f3bp/equilibria.hpp"
#include "f3bp/ffunc.hpp"

namespace f3bp {

std::string to_string(ChartId id) {
  switch (id) {
    case ChartId::TR132_stable: return "TR132-stable";
    case ChartId::EA123_fission: return "EA123";
    case ChartId::EA132_fission: return "EA132";
    case ChartId::EA312_fission: return "EA312";
    case ChartId::LO_mode: return "LO-mode";
    case ChartId::EO_mode: return "EO-mode";
  }
  return "?";
}

ChartId parse_chart_id(const std::string& s) {
  static const std::map<std::string, ChartId> m{
      {"TR132-stable", ChartId::TR132_stable}, {"TR132", ChartId::TR132_stable},
      {"EA123", ChartId::EA123_fission},       {"EA123-fission", ChartId::EA123_fission},
      {"EA132", ChartId::EA132_fission},       {"EA132-fission", ChartId::EA132_fission},
      {"EA312", ChartId::EA312_fission},       {"EA312-fission", ChartId::EA312_fission},
      {"LO-mode", ChartId::LO_mode},           {"LO", ChartId::LO_mode},
      {"EO-mode", ChartId::EO_mode},           {"EO", ChartId::EO_mode},
  };
  auto it = m.find(s);
  if (it == m.end()) throw InvalidInput("unknown chart id: " + s);
  return it->second;
}

namespace {

// Sign decides which Euler-aligned family the resting ER ijk configuration
// hands over to: positive means EA ij-k (the j-k contact releases first).
double ea_fission_value(const SystemParams& p, const Ordering& o) {
  const auto [i, j, k] = o;
  const double D = 1.0 + p.r(j);
  return F(p.m(j) / p.m(k), (1.0 - p.r(k)) / D) - F(p.m(j) / p.m(i), (1.0 - p.r(i)) / D);
}

}  // namespace

double chart_value(ChartId id, const SystemParams& p, const Ordering& eo) {
  switch (id) {
    case ChartId::EA123_fission: return ea_fission_value(p, {0, 1, 2});
    case ChartId::EA132_fission: return ea_fission_value(p, {0, 2, 1});
    case ChartId::EA312_fission: return ea_fission_value(p, {2, 0, 1});
    case ChartId::LO_mode: {
      const double ds = LO_critical_distance(p), lo = 1.0 - p.r(2);
      return ds * ds - lo * lo;
    }
    case ChartId::TR132_stable: {
      // TR132 is stable beyond the minimum of its H(q) curve; the branch is
      // non-empty when that minimum lies below the ER132 end q = 1 + r3.
      const EquilibriumClass c{ClassTag::TR, {0, 2, 1}, false};
      const double qs = family_curve(p, c).q_star, hi = 1.0 + p.r(2);
      return hi * hi - qs * qs;
    }
    case ChartId::EO_mode: {
      // dH/dq of the uniformly scaled central configuration at its contact end.
      const EquilibriumClass c{ClassTag::EO, eo, false};
      const FamilyCurve fc = family_curve(p, c);
      const double H0 = family_H(p, c, fc.q_lo);
      const double h = 1e-6 * fc.q_lo;
      const double dH = (family_H(p, c, fc.q_lo + h) - family_H(p, c, fc.q_lo - h)) / (2 * h);
      return dH * fc.q_lo / H0;
    }
  }
  return 0.0;
}

bool RegionChart::has_sign_change() const {
  bool pos = false, neg = false;
  for (const auto& g : grid) {
    if (!g.valid) continue;
    pos |= g.value > 0;
    neg |= g.value < 0;
  }
  return pos && neg;
}

namespace {

using Pt = std::pair<double, double>;

// Joins marching-squares segments into polylines by matching endpoints.
std::vector<std::vector<Pt>> join_segments(std::vector<std::pair<Pt, Pt>> segs, double eps) {
  auto close = [eps](const Pt& a, const Pt& b) {
    return std::abs(a.first - b.first) <= eps && std::abs(a.second - b.second) <= eps;
  };
  std::vector<std::vector<Pt>> lines;
  std::vector<bool> used(segs.size(), false);
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (used[s]) continue;
    used[s] = true;
    std::vector<Pt> line{segs[s].first, segs[s].second};
    bool grown = true;
    while (grown) {
      grown = false;
      for (std::size_t t = 0; t < segs.size(); ++t) {
        if (used[t]) continue;
        const auto& [a, b] = segs[t];
        if (close(line.back(), a)) line.push_back(b);
        else if (close(line.back(), b)) line.push_back(a);
        else if (close(line.front(), b)) line.insert(line.begin(), a);
        else if (close(line.front(), a)) line.insert(line.begin(), b);
        else continue;
        used[t] = true;
        grown = true;
      }
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

}  // namespace

RegionChart region_chart(ChartId id, int res, const Ordering& eo, double margin) {
  if (res < 32) throw InvalidInput("region chart resolution must be at least 32");
  RegionChart rc;
  rc.id = id;
  rc.res = res;
  rc.grid.resize(static_cast<std::size_t>(res) * res);
  for (int a = 0; a < res; ++a) {
    for (int b = 0; b < res; ++b) {
      RegionPoint& g = rc.grid[static_cast<std::size_t>(a) * res + b];
      g.m1 = 1.0 / 3.0 + (2.0 / 3.0) * a / (res - 1);
      g.m3 = (1.0 / 3.0) * b / (res - 1);
      const double m2 = 1.0 - g.m1 - g.m3;
      g.valid = g.m3 >= margin && m2 - g.m3 >= margin && g.m1 - m2 >= margin;
      if (!g.valid) continue;
      const SystemParams p = SystemParams::from_masses({g.m1, m2, g.m3}, true);
      g.value = chart_value(id, p, eo);
    }
  }
  // Marching squares on cells whose four corners are all valid.
  std::vector<std::pair<Pt, Pt>> segs;
  auto interp = [](const RegionPoint& p, const RegionPoint& q) {
    const double t = p.value / (p.value - q.value);
    return Pt{p.m1 + t * (q.m1 - p.m1), p.m3 + t * (q.m3 - p.m3)};
  };
  for (int a = 0; a + 1 < res; ++a) {
    for (int b = 0; b + 1 < res; ++b) {
      const RegionPoint* c[4] = {&rc.at(a, b), &rc.at(a + 1, b), &rc.at(a + 1, b + 1), &rc.at(a, b + 1)};
      if (!(c[0]->valid && c[1]->valid && c[2]->valid && c[3]->valid)) continue;
      std::vector<Pt> cross;
      for (int e = 0; e < 4; ++e) {
        const RegionPoint& p = *c[e];
        const RegionPoint& q = *c[(e + 1) % 4];
        if ((p.value > 0) != (q.value > 0)) cross.push_back(interp(p, q));
      }
      if (cross.size() == 2) {
        segs.push_back({cross[0], cross[1]});
      } else if (cross.size() == 4) {
        // Saddle cell: resolve with the centre value.
        const double centre = 0.25 * (c[0]->value + c[1]->value + c[2]->value + c[3]->value);
        if ((centre > 0) == (c[0]->value > 0)) {
          segs.push_back({cross[0], cross[1]});
          segs.push_back({cross[2], cross[3]});
        } else {
          segs.push_back({cross[3], cross[0]});
          segs.push_back({cross[1], cross[2]});
        }
      }
    }
  }
  rc.boundary = join_segments(std::move(segs), 1e-12);
  return rc;
}

}  // namespace f3bp
