#include "f3bp/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "f3bp/roots.hpp"

namespace f3bp {

namespace {

// Unordered contact pairs carried by a class, as pair indices.
std::vector<int> class_contacts(const EquilibriumClass& c) {
  const auto [i, j, k] = c.ord;
  switch (c.tag) {
    case ClassTag::LR: return {0, 1, 2};
    case ClassTag::ER:
    case ClassTag::TR: return {pair_index(i, j), pair_index(j, k)};
    case ClassTag::EA:
    case ClassTag::IS: return {pair_index(i, j)};
    default: return {};
  }
}

std::string pair_name(int a) {
  static const char* n[3] = {"12", "23", "31"};
  return n[a];
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void join(int a, int b) { parent[find(a)] = find(b); }
};

bool same_geometry(const Endpoint& a, const Endpoint& b) {
  if (a.orientation != 0 && b.orientation != 0 && a.orientation != b.orientation) return false;
  if (std::abs(a.H - b.H) > 1e-7 * std::max(1.0, a.H)) return false;
  for (int n = 0; n < 3; ++n)
    if (std::abs(a.cfg.d[n] - b.cfg.d[n]) > 1e-3 * std::max(a.cfg.d[n], b.cfg.d[n])) return false;
  return true;
}

std::vector<double> build_grid(const SystemParams& p, const SweepOptions& o) {
  std::vector<double> g;
  double lo = o.H_lo;
  if (lo <= 0.0) {
    g.push_back(0.0);
    lo = std::min(1e-3, o.H_hi);
  }
  const int n = std::max(o.samples, 2);
  const double a = std::log(lo), b = std::log(o.H_hi);
  for (int k = 0; k < n; ++k) g.push_back(std::exp(a + (b - a) * k / (n - 1)));
  g.back() = o.H_hi;
  // Midpoints of analytic existence intervals so that short branches are sampled.
  auto add_mid = [&](double x, double y) {
    x = std::max(x, o.H_lo);
    y = std::min(y, o.H_hi);
    if (y > x) g.push_back(0.5 * (x + y));
  };
  for (const auto& key : all_family_keys(p))
    if (auto r = family_H_range(p, key)) add_mid(r->first, r->second);
  for (const auto& ord : collinear_orderings()) {
    const double hs = ER_stabilization_H(p, ord), he = ER_existence_H(p, ord);
    add_mid(0.0, std::min(hs, he));
    if (he > hs) add_mid(hs, he);
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

Endpoint make_endpoint(const EquilibriumRecord& r, Endpoint::Type t) {
  Endpoint e;
  e.key = r.key();
  e.H = r.H;
  e.type = t;
  e.cfg = r.cfg;
  e.orientation = r.orientation();
  e.contacts = r.cls.contact_count();
  e.after = r.verdict;
  return e;
}

EventKind classify(const std::vector<Endpoint>& ps, int* parent_out) {
  *parent_out = -1;
  for (const auto& e : ps)
    if (e.type == Endpoint::Type::verdict_change) return EventKind::symmetric_bifurcation;
  const bool same_family = std::all_of(ps.begin(), ps.end(), [&](const Endpoint& e) { return e.key.cls == ps[0].key.cls; });
  const bool all_start = std::all_of(ps.begin(), ps.end(), [](const Endpoint& e) { return e.type == Endpoint::Type::start; });
  if (same_family && all_start) return EventKind::H_bifurcation;
  int parent = 0;
  for (int n = 1; n < static_cast<int>(ps.size()); ++n) {
    const auto& a = ps[n];
    const auto& b = ps[parent];
    if (a.contacts > b.contacts || (a.contacts == b.contacts && a.key.cls.tag < b.key.cls.tag)) parent = n;
  }
  *parent_out = parent;
  if (ps[parent].type == Endpoint::Type::start) return EventKind::branch_merge;
  for (int n = 0; n < static_cast<int>(ps.size()); ++n)
    if (n != parent && ps[n].type == Endpoint::Type::start) return EventKind::transition_fission;
  return EventKind::termination_fission;
}

}  // namespace

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::H_bifurcation: return "H-bifurcation";
    case EventKind::symmetric_bifurcation: return "symmetric-bifurcation";
    case EventKind::termination_fission: return "termination-fission";
    case EventKind::transition_fission: return "transition-fission";
    case EventKind::branch_merge: return "branch-merge";
  }
  return "branch-merge";
}

std::vector<std::string> SweepResult::labels() const {
  std::set<std::string> s;
  for (const auto& b : branches)
    if (!b.samples.empty()) s.insert(b.key.cls.full_label());
  return {s.begin(), s.end()};
}

SweepResult sweep(const SystemParams& p, const SweepOptions& o) {
  if (!(o.H_lo >= 0.0) || !(o.H_hi > o.H_lo) || !std::isfinite(o.H_hi))
    throw InvalidInput("H range must satisfy 0 <= lo < hi < inf");
  SweepResult res;
  res.H_samples = build_grid(p, o);
  const std::size_t N = res.H_samples.size();

  std::map<FamilyKey, std::vector<std::pair<std::size_t, EquilibriumRecord>>> per_key;
  for (std::size_t n = 0; n < N; ++n) {
    const auto recs = enumerate_all(p, res.H_samples[n], o.tol);
    int stable = 0;
    for (const auto& r : recs) {
      if (r.verdict == Verdict::stable) ++stable;
      per_key[r.key()].push_back({n, r});
    }
    res.stable_count.push_back(stable);
    res.record_count.push_back(static_cast<int>(recs.size()));
  }

  std::vector<Endpoint> endpoints;
  for (const auto& [key, list] : per_key) {
    FamilyBranch br;
    br.key = key;
    for (const auto& [n, r] : list) br.samples.push_back({r.H, r.q, r.cfg, r.chart, r.verdict});
    res.branches.push_back(std::move(br));

    auto exists = [&, k = key](double H) {
      try {
        return solve_family(p, k, H, o.tol).has_value();
      } catch (const std::exception&) {
        return false;
      }
    };
    std::vector<int> present(N, -1);
    for (std::size_t m = 0; m < list.size(); ++m) present[list[m].first] = static_cast<int>(m);

    for (std::size_t n = 0; n + 1 < N; ++n) {
      const bool a = present[n] >= 0, b = present[n + 1] >= 0;
      const double Ha = res.H_samples[n], Hb = res.H_samples[n + 1];
      const double xtol = o.event_tol * std::max(1.0, Hb);
      if (a != b) {
        const double Hin = a ? Ha : Hb, Hout = a ? Hb : Ha;
        const double He = roots::bisect_predicate(exists, Hin, Hout, xtol);
        auto r = solve_family(p, key, He, o.tol);
        if (!r) {
          res.warnings.push_back("lost " + key.name() + " at H=" + std::to_string(He));
          continue;
        }
        endpoints.push_back(make_endpoint(*r, a ? Endpoint::Type::end : Endpoint::Type::start));
      } else if (a && b) {
        const Verdict va = list[present[n]].second.verdict, vb = list[present[n + 1]].second.verdict;
        if (va == vb) continue;
        auto same = [&, k = key, va](double H) {
          auto r = solve_family(p, k, H, o.tol);
          return r && r->verdict == va;
        };
        const double He = roots::bisect_predicate(same, Ha, Hb, xtol);
        auto r = solve_family(p, key, He, o.tol);
        if (!r) continue;
        Endpoint e = make_endpoint(*r, Endpoint::Type::verdict_change);
        e.before = va;
        e.after = vb;
        endpoints.push_back(e);
      }
    }
  }

  // Cluster endpoints that share H and geometry into events.
  std::sort(endpoints.begin(), endpoints.end(), [](const Endpoint& a, const Endpoint& b) { return a.H < b.H; });
  UnionFind uf(endpoints.size());
  for (std::size_t a = 0; a < endpoints.size(); ++a)
    for (std::size_t b = a + 1; b < endpoints.size(); ++b) {
      if (endpoints[b].H - endpoints[a].H > 1e-7 * std::max(1.0, endpoints[a].H)) break;
      if (same_geometry(endpoints[a], endpoints[b])) uf.join(static_cast<int>(a), static_cast<int>(b));
    }
  std::map<int, std::vector<Endpoint>> groups;
  for (std::size_t a = 0; a < endpoints.size(); ++a) groups[uf.find(static_cast<int>(a))].push_back(endpoints[a]);

  for (auto& [root, ps] : groups) {
    BifurcationEvent ev;
    std::sort(ps.begin(), ps.end(), [](const Endpoint& a, const Endpoint& b) { return a.key < b.key; });
    ev.participants = ps;
    double hsum = 0.0;
    for (const auto& e : ps) hsum += e.H;
    ev.H = hsum / ps.size();
    int parent = -1;
    ev.kind = classify(ps, &parent);
    ev.orphan = ps.size() == 1;
    if (parent >= 0 && (ev.kind == EventKind::termination_fission || ev.kind == EventKind::transition_fission)) {
      const auto pc = class_contacts(ps[parent].key.cls);
      std::set<int> mine(pc.begin(), pc.end());
      std::set<int> kept;
      for (std::size_t n = 0; n < ps.size(); ++n)
        if (static_cast<int>(n) != parent)
          for (int c : class_contacts(ps[n].key.cls)) kept.insert(c);
      for (int c : mine)
        if (!kept.count(c) && ps.size() > 1) {
          if (!ev.released_contact.empty()) ev.released_contact += ",";
          ev.released_contact += pair_name(c);
        }
    }
    if (ev.orphan) res.warnings.push_back("orphan endpoint of " + ps[0].key.name() + " at H=" + std::to_string(ev.H));
    res.events.push_back(std::move(ev));
  }
  std::sort(res.events.begin(), res.events.end(),
            [](const BifurcationEvent& a, const BifurcationEvent& b) { return a.H < b.H; });
  for (std::size_t e = 0; e < res.events.size(); ++e)
    for (const auto& pt : res.events[e].participants)
      for (auto& br : res.branches)
        if (br.key == pt.key) br.events.push_back(static_cast<int>(e));
  return res;
}

const std::map<std::string, std::vector<std::string>>& pathway_templates() {
  static const std::map<std::string, std::vector<std::string>> t{
      {"bif1", {"ER123", "TR123", "IS23-1", "EA12-3", "EA32-1", "EO123"}},
      {"bif2", {"LR", "ER132", "TR132", "EA13-2", "EA23-1", "EO132"}},
      {"bif3", {"ER312", "TR312", "IS31-2", "EA31-2", "EA21-3", "EO312"}},
      {"bif4", {"IS12-3", "LO"}},
  };
  return t;
}

DiagramGraph diagram_assembly(const SweepResult& s) {
  DiagramGraph g;
  if (s.H_samples.empty()) return g;
  const double H0 = s.H_samples.front(), H1 = s.H_samples.back();
  g.nodes.push_back({"origin", "origin", H0});
  g.nodes.push_back({"tail", "tail", H1});
  for (std::size_t e = 0; e < s.events.size(); ++e)
    g.nodes.push_back({"e" + std::to_string(e), to_string(s.events[e].kind), s.events[e].H});

  for (const auto& br : s.branches) {
    if (br.samples.empty()) continue;
    std::vector<std::pair<double, std::string>> stops;
    if (br.samples.front().H == H0) stops.push_back({H0, "origin"});
    for (int e : br.events) stops.push_back({s.events[e].H, "e" + std::to_string(e)});
    if (br.samples.back().H == H1) stops.push_back({H1, "tail"});
    std::sort(stops.begin(), stops.end());
    if (stops.size() < 2) {
      g.warnings.push_back("branch " + br.key.name() + " has fewer than two ends");
      continue;
    }
    for (std::size_t n = 0; n + 1 < stops.size(); ++n) {
      DiagramEdge ed;
      ed.family = br.key.name();
      ed.label = br.key.cls.label();
      ed.from = stops[n].second;
      ed.to = stops[n + 1].second;
      ed.H_from = stops[n].first;
      ed.H_to = stops[n + 1].first;
      ed.verdict = Verdict::marginal;
      for (const auto& sm : br.samples)
        if (sm.H > ed.H_from && sm.H < ed.H_to) {
          ed.verdict = sm.verdict;
          break;
        }
      g.edges.push_back(ed);
    }
  }

  // Pathways: labels linked through shared events.
  std::vector<std::string> labels;
  for (const auto& br : s.branches)
    if (!br.samples.empty()) labels.push_back(br.key.cls.label());
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  auto idx = [&](const std::string& l) {
    return static_cast<int>(std::lower_bound(labels.begin(), labels.end(), l) - labels.begin());
  };
  UnionFind uf(labels.size());
  for (const auto& ev : s.events)
    for (std::size_t n = 1; n < ev.participants.size(); ++n)
      uf.join(idx(ev.participants[0].key.cls.label()), idx(ev.participants[n].key.cls.label()));
  std::map<int, std::vector<std::string>> comps;
  for (const auto& l : labels) comps[uf.find(idx(l))].push_back(l);
  for (auto& [r, c] : comps) g.pathways.push_back(c);

  auto event_has = [&](const std::string& parent, const std::string& child) {
    for (const auto& ev : s.events) {
      bool a = false, b = false;
      for (const auto& pt : ev.participants) {
        a |= pt.key.cls.label() == parent && pt.type == Endpoint::Type::end;
        b |= pt.key.cls.label() == child;
      }
      if (a && b) return true;
    }
    return false;
  };
  auto any_stable = [&](const std::string& label) {
    for (const auto& br : s.branches)
      if (br.key.cls.label() == label)
        for (const auto& sm : br.samples)
          if (sm.verdict == Verdict::stable) return true;
    return false;
  };
  auto has_branch = [&](const std::string& label, Branch b) {
    for (const auto& br : s.branches)
      if (br.key.cls.label() == label && br.key.branch == b && !br.samples.empty()) return true;
    return false;
  };

  for (const auto& [id, fams] : pathway_templates()) {
    const std::set<std::string> want(fams.begin(), fams.end());
    bool ok = true;
    for (const auto& f : fams)
      if (!std::binary_search(labels.begin(), labels.end(), f)) ok = false;
    for (const auto& c : g.pathways) {
      const bool touches = std::any_of(c.begin(), c.end(), [&](const std::string& l) { return want.count(l) > 0; });
      if (!touches) continue;
      for (const auto& l : c)
        if (!want.count(l)) ok = false;
    }
    if (!ok) continue;
    char variant = 'a';
    if (id == "bif1") variant = event_has("ER123", "EA12-3") ? 'a' : 'b';
    if (id == "bif2") variant = any_stable("TR132") ? 'b' : 'a';
    if (id == "bif3") variant = event_has("ER312", "EA31-2") ? 'a' : 'b';
    if (id == "bif4") variant = has_branch("LO", Branch::inner) ? 'b' : 'a';
    g.templates.push_back(id + std::string(1, variant));
  }
  for (const auto& w : s.warnings) g.warnings.push_back(w);
  return g;
}

std::vector<FamilySample> family_samples(const SystemParams& p, const FamilyBranch& b) {
  std::vector<FamilySample> out;
  if (b.key.cls.tag == ClassTag::LR || b.key.cls.tag == ClassTag::ER) return out;
  for (const auto& sm : b.samples) {
    FamilySample fs;
    fs.H = sm.H;
    fs.q = sm.q;
    fs.coords = sm.chart.coords();
    fs.verdict = sm.verdict;
    const Mat3 M = sm.chart.angle ? second_variation_matrix(p, sm.chart.chart, sm.H) : distance_hessian(p, sm.cfg, sm.H);
    std::vector<int> free;
    for (int a = 0; a < 3; ++a) {
      fs.free[a] = !sm.chart.constrained[a];
      if (fs.free[a]) free.push_back(a);
    }
    fs.free_block.assign(free.size(), std::vector<double>(free.size()));
    for (std::size_t r = 0; r < free.size(); ++r)
      for (std::size_t c = 0; c < free.size(); ++c) fs.free_block[r][c] = M[free[r]][free[c]];
    out.push_back(std::move(fs));
  }
  return out;
}

SignLawReport family_sign_test(const SystemParams& p, const FamilyBranch& b) {
  return family_sign_test(family_samples(p, b));
}

}  // namespace f3bp
