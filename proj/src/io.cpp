#include "f3bp/io.hpp"

#include <algorithm>
#include <cstdio>

namespace f3bp::io {

using nlohmann::json;

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

json distances(const Configuration& c) { return {{"d12", c.d[0]}, {"d23", c.d[1]}, {"d31", c.d[2]}}; }

std::string ordering_label(const Ordering& o) {
  return body_label(o[0]) + body_label(o[1]) + body_label(o[2]);
}

const char* header_comment() { return "# schema_version=1\n"; }

// Contact sets print as "12,23"; inside CSV cells the pairs are space separated.
std::string csv_contacts(const ContactSet& c) {
  std::string s = c.to_string();
  std::replace(s.begin(), s.end(), ',', ' ');
  return s;
}

}  // namespace

json params_json(const SystemParams& p, const std::string& input_kind, const std::array<double, 3>& input) {
  const auto& perm = p.radii.permutation();
  return {
      {"input", {{"kind", input_kind}, {"values", input}}},
      {"radii", p.radii.values()},
      {"masses", p.masses.m},
      {"spin_inertia", p.spin_inertia},
      {"permutation", perm},
      {"permutation_note", "body i (canonical, 1-based) is input entry permutation[i-1]+1"},
  };
}

json record_json(const EquilibriumRecord& r) {
  json cons = json::array();
  for (std::size_t a = 0; a < r.cert.constrained_names.size(); ++a)
    cons.push_back({{"name", r.cert.constrained_names[a]}, {"value", r.cert.constrained_values[a]}});
  json fr = json::array();
  for (std::size_t a = 0; a < r.cert.free_names.size(); ++a)
    fr.push_back({{"name", r.cert.free_names[a]}, {"residual", r.cert.free_residuals[a]}});
  json j = {
      {"class", to_string(r.cls.tag)},
      {"label", r.cls.label()},
      {"full_label", r.cls.full_label()},
      {"branch", to_string(r.branch)},
      {"orientation", r.orientation()},
      {"contacts", r.contacts.to_string()},
      {"H", r.H},
      {"distances", distances(r.cfg)},
      {"angle",
       {{"ordering", ordering_label(r.chart.chart.ord)},
        {"u", r.chart.chart.u},
        {"v", r.chart.chart.v},
        {"theta", r.chart.chart.theta}}},
      {"spin_rate", r.spin_rate},
      {"energy", r.energy},
      {"q", r.q},
      {"verdict", to_string(r.verdict)},
      {"certificate",
       {{"constrained", cons},
        {"free", fr},
        {"free_block", r.cert.free_block},
        {"minors", r.cert.minors},
        {"eigenvalues", r.cert.eigenvalues}}},
  };
  if (!r.diagnostic.empty()) j["diagnostic"] = r.diagnostic;
  return j;
}

json records_json(const std::vector<EquilibriumRecord>& records) {
  json a = json::array();
  for (const auto& r : records) a.push_back(record_json(r));
  return a;
}

void write_records_csv(std::ostream& os, const std::vector<EquilibriumRecord>& records) {
  os << header_comment();
  os << "class,label,branch,orientation,contacts,H,d12,d23,d31,theta,spin_rate,energy,verdict\n";
  for (const auto& r : records) {
    os << to_string(r.cls.tag) << ',' << r.cls.label() << ',' << to_string(r.branch) << ',' << r.orientation()
       << ',' << csv_contacts(r.contacts) << ',' << num(r.H) << ',' << num(r.cfg.d[0]) << ',' << num(r.cfg.d[1])
       << ',' << num(r.cfg.d[2]) << ',' << num(r.chart.chart.theta) << ',' << num(r.spin_rate) << ','
       << num(r.energy) << ',' << to_string(r.verdict) << '\n';
  }
}

json sweep_json(const SweepResult& s, const DiagramGraph& g) {
  json nodes = json::array();
  for (const auto& n : g.nodes) nodes.push_back({{"id", n.id}, {"kind", n.kind}, {"H", n.H}});
  json edges = json::array();
  for (const auto& e : g.edges)
    edges.push_back({{"family", e.family},
                     {"label", e.label},
                     {"from", e.from},
                     {"to", e.to},
                     {"H_from", e.H_from},
                     {"H_to", e.H_to},
                     {"stability", to_string(e.verdict)}});
  json events = json::array();
  for (const auto& ev : s.events) {
    json parts = json::array();
    for (const auto& p : ev.participants) {
      const char* type = p.type == Endpoint::Type::start ? "start" : (p.type == Endpoint::Type::end ? "end" : "verdict_change");
      parts.push_back({{"family", p.key.name()}, {"type", type}, {"H", p.H}, {"distances", distances(p.cfg)}});
    }
    json e = {{"kind", to_string(ev.kind)}, {"H", ev.H}, {"participants", parts}};
    if (!ev.released_contact.empty()) e["released_contact"] = ev.released_contact;
    if (ev.orphan) e["orphan"] = true;
    if (ev.reduced_precision) e["reduced_precision"] = true;
    events.push_back(e);
  }
  json samples = json::array();
  for (std::size_t k = 0; k < s.H_samples.size(); ++k)
    samples.push_back({{"H", s.H_samples[k]}, {"records", s.record_count[k]}, {"stable", s.stable_count[k]}});
  std::vector<std::string> warnings = s.warnings;
  warnings.insert(warnings.end(), g.warnings.begin(), g.warnings.end());
  return {{"graph", {{"nodes", nodes}, {"edges", edges}}},
          {"events", events},
          {"templates", g.templates},
          {"pathways", g.pathways},
          {"labels", s.labels()},
          {"samples", samples},
          {"warnings", warnings}};
}

void write_branches_csv(std::ostream& os, const SweepResult& s) {
  os << header_comment();
  os << "class,label,H,d12,d23,d31,verdict\n";
  for (const auto& b : s.branches)
    for (const auto& x : b.samples)
      os << to_string(b.key.cls.tag) << ',' << b.key.name() << ',' << num(x.H) << ',' << num(x.cfg.d[0]) << ','
         << num(x.cfg.d[1]) << ',' << num(x.cfg.d[2]) << ',' << to_string(x.verdict) << '\n';
}

void write_field_csv(std::ostream& os, const RegionChart& rc) {
  os << header_comment();
  os << "m1,m3,value\n";
  for (const auto& g : rc.grid)
    if (g.valid) os << num(g.m1) << ',' << num(g.m3) << ',' << num(g.value) << '\n';
}

void write_boundary_csv(std::ostream& os, const RegionChart& rc) {
  os << header_comment();
  os << "polyline,m1,m3\n";
  for (std::size_t k = 0; k < rc.boundary.size(); ++k)
    for (const auto& [m1, m3] : rc.boundary[k]) os << k << ',' << num(m1) << ',' << num(m3) << '\n';
}

}  // namespace f3bp::io
