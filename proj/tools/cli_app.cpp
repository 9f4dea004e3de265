#include "cli_app.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>

#include "f3bp/bifurcation.hpp"
#include "f3bp/equilibria.hpp"
#include "f3bp/io.hpp"
#include "f3bp/oracle.hpp"
#include "f3bp/region.hpp"

namespace f3bp::cli {

using nlohmann::json;

double parse_number(const std::string& raw) {
  std::string s = raw;
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  auto one = [&](const std::string& t) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &pos);
    } catch (const std::exception&) {
      throw InvalidInput("not a number: '" + raw + "'");
    }
    if (pos != t.size() || !std::isfinite(v)) throw InvalidInput("not a number: '" + raw + "'");
    return v;
  };
  const auto slash = s.find('/');
  if (slash == std::string::npos) return one(s);
  const double den = one(s.substr(slash + 1));
  if (den == 0.0) throw InvalidInput("zero denominator in '" + raw + "'");
  return one(s.substr(0, slash)) / den;
}

namespace {

std::array<double, 3> parse_triple(const std::string& s) {
  std::array<double, 3> v{};
  std::stringstream ss(s);
  std::string item;
  int n = 0;
  while (std::getline(ss, item, ',')) {
    if (n == 3) throw InvalidInput("expected three comma-separated values: '" + s + "'");
    v[n++] = parse_number(item);
  }
  if (n != 3) throw InvalidInput("expected three comma-separated values: '" + s + "'");
  return v;
}

struct RunConfig {
  std::string radii, masses;
  std::string H, H_range;
  int res = 0;
  std::string out;
  std::string format = "json";
  double tol_eq = Tolerances{}.equilibrium;
  double tol_def = Tolerances{}.definiteness;
  std::uint64_t seed = 1;
  std::string chart = "LO-mode";
  std::string eo_ordering = "123";
  int oracle_samples = 6;
  bool inject_fault = false;

  Tolerances tol() const {
    Tolerances t;
    t.equilibrium = tol_eq;
    t.definiteness = tol_def;
    return t;
  }
};

struct Params {
  SystemParams p;
  json meta;
};

Params make_params(const RunConfig& c) {
  if (!c.radii.empty() && !c.masses.empty()) throw InvalidInput("give either --radii or --masses, not both");
  Params out;
  if (!c.masses.empty()) {
    const auto m = parse_triple(c.masses);
    out.p = SystemParams::from_masses(m);
    out.meta = io::params_json(out.p, "masses", m);
  } else {
    const auto r = c.radii.empty() ? std::array<double, 3>{1.0 / 3, 1.0 / 3, 1.0 / 3} : parse_triple(c.radii);
    out.p = SystemParams::from_radii(r);
    out.meta = io::params_json(out.p, c.radii.empty() ? "radii (default)" : "radii", r);
  }
  return out;
}

std::pair<double, double> H_range(const RunConfig& c, double lo, double hi) {
  if (!c.H.empty()) throw InvalidInput("--H is not accepted here; use --H-range lo:hi");
  if (c.H_range.empty()) return {lo, hi};
  const auto colon = c.H_range.find(':');
  if (colon == std::string::npos) throw InvalidInput("--H-range expects lo:hi");
  lo = parse_number(c.H_range.substr(0, colon));
  hi = parse_number(c.H_range.substr(colon + 1));
  if (lo < 0.0 || hi < 0.0) throw InvalidInput("H must be nonnegative");
  if (!(hi > lo)) throw InvalidInput("--H-range needs lo < hi");
  return {lo, hi};
}

json envelope(const std::string& command, const Params& P) {
  return {{"schema_version", io::kSchemaVersion}, {"command", command}, {"params", P.meta}};
}

std::string comment_params(const Params& P) {
  std::ostringstream os;
  os << "# params " << P.meta.dump() << '\n';
  return os.str();
}

// Writes `text` to `path`, or to `out` when no path is given.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file " + path);
  f << text;
}

std::string strip_extension(const std::string& path) {
  const auto slash = path.find_last_of('/');
  const auto dot = path.find_last_of('.');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return path.substr(0, dot);
  return path;
}

void check_format(const RunConfig& c) {
  if (c.format != "json" && c.format != "csv") throw InvalidInput("--format must be json or csv");
}

int cmd_equilibria(const RunConfig& c, std::ostream& out) {
  check_format(c);
  if (!c.H_range.empty()) throw InvalidInput("equilibria takes a single --H");
  const double H = c.H.empty() ? 0.0 : parse_number(c.H);
  if (H < 0.0) throw InvalidInput("H must be nonnegative");
  const Params P = make_params(c);
  const auto recs = enumerate_all(P.p, H, c.tol());
  std::string text;
  if (c.format == "json") {
    json j = envelope("equilibria", P);
    j["H"] = H;
    j["records"] = io::records_json(recs);
    text = j.dump(2) + "\n";
  } else {
    std::ostringstream os;
    io::write_records_csv(os, recs);
    const std::string body = os.str();
    const auto nl = body.find('\n');
    text = body.substr(0, nl + 1) + comment_params(P) + body.substr(nl + 1);
  }
  emit(c.out, text, out);
  return kOk;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
  check_format(c);
  const Params P = make_params(c);
  SweepOptions o;
  std::tie(o.H_lo, o.H_hi) = H_range(c, o.H_lo, o.H_hi);
  if (c.res > 0) o.samples = c.res;
  o.tol = c.tol();
  const SweepResult s = sweep(P.p, o);
  const DiagramGraph g = diagram_assembly(s);
  json j = envelope("sweep", P);
  j["H_range"] = {o.H_lo, o.H_hi};
  j.update(io::sweep_json(s, g));
  std::ostringstream branches;
  io::write_branches_csv(branches, s);
  if (c.out.empty()) {
    out << (c.format == "json" ? j.dump(2) + "\n" : branches.str());
  } else {
    emit(c.out, j.dump(2) + "\n", out);
    emit(strip_extension(c.out) + ".branches.csv", branches.str(), out);
  }
  return kOk;
}

Ordering parse_ordering(const std::string& s) {
  if (s.size() != 3) throw InvalidInput("ordering must be three body digits, e.g. 123");
  Ordering o{};
  for (int k = 0; k < 3; ++k) {
    if (s[k] < '1' || s[k] > '3') throw InvalidInput("bad ordering: " + s);
    o[k] = s[k] - '1';
  }
  if (o[0] == o[1] || o[1] == o[2] || o[0] == o[2]) throw InvalidInput("bad ordering: " + s);
  return o;
}

int cmd_region(const RunConfig& c, std::ostream& out) {
  check_format(c);
  const ChartId id = parse_chart_id(c.chart);
  const RegionChart rc = region_chart(id, c.res > 0 ? c.res : 128, parse_ordering(c.eo_ordering));
  std::ostringstream field, boundary;
  io::write_field_csv(field, rc);
  io::write_boundary_csv(boundary, rc);
  if (c.format == "json") {
    json j{{"schema_version", io::kSchemaVersion},
           {"command", "region"},
           {"chart", to_string(id)},
           {"res", rc.res},
           {"sign_change", rc.has_sign_change()},
           {"boundary", rc.boundary}};
    if (c.out.empty()) {
      out << j.dump(2) << '\n';
      return kOk;
    }
    emit(c.out, j.dump(2) + "\n", out);
  } else if (c.out.empty()) {
    out << field.str();
    return kOk;
  }
  const std::string base = strip_extension(c.out);
  emit(base + ".field.csv", field.str(), out);
  emit(base + ".boundary.csv", boundary.str(), out);
  return kOk;
}

struct Check {
  std::string name;
  bool pass = true;
  std::vector<std::string> details;
};

int cmd_verify(const RunConfig& c, std::ostream& out, std::ostream& err) {
  check_format(c);
  const Params P = make_params(c);
  const SystemParams& p = P.p;
  SweepOptions o;
  std::tie(o.H_lo, o.H_hi) = H_range(c, o.H_lo, o.H_hi);
  o.tol = c.tol();
  const SweepResult s = sweep(p, o);
  std::vector<Check> checks;

  // Count law: distinct labels never exceed the census, and a generic
  // (pairwise distinct) mass triple realises all of it over the default range.
  {
    Check ch{"count_law"};
    const auto labels = s.labels();
    const double dm = std::min({p.m(0) - p.m(1), p.m(1) - p.m(2)});
    const bool generic = dm > 1e-6 && o.H_lo <= 1e-3 && o.H_hi >= 10.0;
    ch.pass = labels.size() <= all_classes().size() && (!generic || labels.size() == all_classes().size());
    ch.details.push_back(std::to_string(labels.size()) + " distinct labels" + (generic ? " (generic masses)" : ""));
    checks.push_back(ch);
  }
  {
    Check ch{"stable_count_law"};
    for (std::size_t k = 0; k < s.H_samples.size(); ++k)
      if (s.stable_count[k] < 1) {
        ch.pass = false;
        ch.details.push_back("no stable equilibrium at H=" + io::num(s.H_samples[k]));
      }
    checks.push_back(ch);
  }
  {
    Check ch{"sign_law"};
    std::size_t checked = 0;
    for (const auto& b : s.branches) {
      if (b.samples.size() < 3) continue;
      SignLawReport r;
      try {
        r = family_sign_test(p, b);
      } catch (const InsufficientData&) {
        continue;  // fixed-shape classes carry no family parameter
      }
      checked += r.checked;
      for (const auto& m : r.mismatches) {
        ch.pass = false;
        ch.details.push_back(b.key.name() + " at H=" + io::num(m.H));
      }
    }
    ch.details.push_back(std::to_string(checked) + " samples checked");
    checks.push_back(ch);
  }
  {
    Check ch{"oracle_agreement"};
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> jitter(-0.25, 0.25);
    const double lo = std::max(o.H_lo, 1e-3), hi = o.H_hi;
    const int n = std::max(1, c.oracle_samples);
    const double step = n > 1 ? std::log(hi / lo) / (n - 1) : 0.0;
    std::vector<double> hs;
    for (int k = 0; k < n; ++k) {
      double H = std::exp(std::clamp(std::log(lo) + (k + jitter(rng)) * step, std::log(lo), std::log(hi)));
      // Keep clear of events, where branches meet and the grid cannot
      // separate them.
      for (int guard = 0; guard < 20; ++guard) {
        bool near = false;
        for (const auto& e : s.events) near = near || std::abs(H - e.H) <= 1e-3 * e.H;
        if (!near) break;
        H *= 1.003;
      }
      hs.push_back(H);
    }
    const int res = c.res > 0 ? c.res : 64;
    for (std::size_t k = 0; k < hs.size(); ++k) {
      auto recs = enumerate_all(p, hs[k], o.tol);
      if (c.inject_fault && k == 0 && !recs.empty()) recs[0].cfg.d[0] *= 1.0 + 1e-4;
      auto rep = oracle::scan(p, hs[k], res, o.tol);
      oracle::match(rep, recs);
      const std::string at = " at H=" + io::num(hs[k]);
      for (auto r : rep.unmatched_records) {
        ch.pass = false;
        ch.details.push_back("record " + recs[r].key().name() + at + " has no matching critical point");
      }
      for (auto q : rep.unmatched_points) {
        ch.pass = false;
        const auto& cp = rep.points[q];
        ch.details.push_back("critical point with contacts {" + cp.contacts.to_string() + "} d=(" +
                             io::num(cp.cfg.d[0]) + "," + io::num(cp.cfg.d[1]) + "," + io::num(cp.cfg.d[2]) + ")" +
                             at + " matches no record");
      }
      for (auto r : rep.verdict_mismatches) {
        ch.pass = false;
        ch.details.push_back("record " + recs[r].key().name() + at + " disagrees on minimum/saddle");
      }
    }
    ch.details.push_back(std::to_string(hs.size()) + " H values at base resolution " + std::to_string(res));
    checks.push_back(ch);
  }

  bool all = true;
  for (const auto& ch : checks) all = all && ch.pass;
  std::string text;
  if (c.format == "json") {
    json j = envelope("verify", P);
    j["H_range"] = {o.H_lo, o.H_hi};
    json arr = json::array();
    for (const auto& ch : checks) arr.push_back({{"name", ch.name}, {"pass", ch.pass}, {"details", ch.details}});
    j["checks"] = arr;
    j["pass"] = all;
    text = j.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << "# schema_version=1\n" << comment_params(P) << "check,pass,detail\n";
    for (const auto& ch : checks) {
      const char* pass = ch.pass ? "true" : "false";
      if (ch.details.empty()) os << ch.name << ',' << pass << ",\n";
      for (const auto& d : ch.details) os << ch.name << ',' << pass << ",\"" << d << "\"\n";
    }
    text = os.str();
  }
  emit(c.out, text, out);
  for (const auto& ch : checks)
    if (!ch.pass)
      for (const auto& d : ch.details) err << "verify: " << ch.name << ": " << d << '\n';
  return all ? kOk : kInvariantFailure;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Relative equilibria of the spherical full three-body problem"};
  app.require_subcommand(1);
  RunConfig c;

  auto common = [&c](CLI::App* sc, bool single_H, bool range) {
    auto* r = sc->add_option("--radii", c.radii, "radii a,b,c (fractions allowed)");
    auto* m = sc->add_option("--masses", c.masses, "masses a,b,c (fractions allowed)");
    r->excludes(m);
    if (single_H) sc->add_option("--H", c.H, "total angular momentum");
    if (range) sc->add_option("--H-range", c.H_range, "angular momentum range lo:hi");
    sc->add_option("--out", c.out, "output path (default: standard output)");
    sc->add_option("--format", c.format, "json or csv");
    sc->add_option("--tol-eq", c.tol_eq, "equilibrium residual tolerance");
    sc->add_option("--tol-def", c.tol_def, "definiteness tolerance");
    sc->add_option("--seed", c.seed, "seed for randomized choices");
  };
  auto* eq = app.add_subcommand("equilibria", "all relative equilibria at one H");
  common(eq, true, false);
  auto* sw = app.add_subcommand("sweep", "trace families and bifurcations over an H range");
  common(sw, false, true);
  sw->add_option("--res", c.res, "number of log-spaced H samples (default 400)");
  auto* rg = app.add_subcommand("region", "parameter-triangle region chart");
  rg->add_option("--chart", c.chart, "TR132-stable, EA123, EA132, EA312, LO-mode or EO-mode");
  rg->add_option("--res", c.res, "grid points per axis (default 128)");
  rg->add_option("--eo-ordering", c.eo_ordering, "collinear ordering for EO-mode (default 123)");
  rg->add_option("--out", c.out, "output base path");
  rg->add_option("--format", c.format, "json or csv");
  auto* vf = app.add_subcommand("verify", "cross-check the solvers against the brute-force oracle");
  common(vf, false, true);
  vf->add_option("--res", c.res, "oracle base resolution (default 64)");
  vf->add_option("--oracle-samples", c.oracle_samples, "number of H values scanned by the oracle");
  vf->add_flag("--inject-fault", c.inject_fault, "perturb one record before matching (negative control)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (eq->parsed()) return cmd_equilibria(c, out);
    if (sw->parsed()) return cmd_sweep(c, out);
    if (rg->parsed()) return cmd_region(c, out);
    return cmd_verify(c, out, err);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kInvariantFailure;
  }
}

}  // namespace f3bp::cli
