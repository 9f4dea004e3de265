// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>

#include "f3bp/bifurcation.hpp"
#include "f3bp/equilibria.hpp"
#include "f3bp/ffunc.hpp"
#include "f3bp/oracle.hpp"
#include "f3bp/region.hpp"
#include "support.hpp"

using namespace f3bp;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

const SystemParams& generic() {
  static const SystemParams p = SystemParams::from_radii({0.40, 0.35, 0.25});
  return p;
}

std::vector<SystemParams> random_points(std::uint64_t seed, int n) {
  std::mt19937_64 rng(seed);
  std::vector<SystemParams> v;
  for (int k = 0; k < n; ++k) v.push_back(test::random_params(rng));
  return v;
}

template <class F>
double bisect(F f, double a, double b, int iters = 200) {
  const bool fa = f(a) > 0;
  for (int k = 0; k < iters; ++k) {
    const double m = 0.5 * (a + b);
    if ((f(m) > 0) == fa) a = m;
    else b = m;
  }
  return 0.5 * (a + b);
}

// 1. Census.
Outcome census() {
  const auto t0 = Clock::now();
  const SweepResult s = sweep(generic());
  const double dt = seconds_since(t0);
  const auto labels = s.labels();
  std::map<std::string, int> per;
  for (const auto& l : labels) ++per[l.substr(0, 2)];
  const std::map<std::string, int> want{{"LR", 2}, {"ER", 3}, {"TR", 6}, {"EA", 6}, {"IS", 6}, {"LO", 2}, {"EO", 3}};
  Outcome o;
  o.pass = labels.size() == 28 && per == want && dt < 60.0;
  o.detail = std::to_string(labels.size()) + " labels (LR " + std::to_string(per["LR"]) + ", ER " +
             std::to_string(per["ER"]) + ", TR " + std::to_string(per["TR"]) + ", EA " + std::to_string(per["EA"]) +
             ", IS " + std::to_string(per["IS"]) + ", LO " + std::to_string(per["LO"]) + ", EO " +
             std::to_string(per["EO"]) + ") in " + fmt("%.2f s", dt);
  return o;
}

// 2. Stable existence.
Outcome stable_existence() {
  Outcome o;
  int samples = 0, min_stable = 1 << 30, bad_H0 = 0, bad_H10 = 0;
  auto pts = random_points(2002, 20);
  pts.push_back(generic());
  for (const auto& p : pts) {
    const SweepResult s = sweep(p);
    for (int c : s.stable_count) {
      ++samples;
      min_stable = std::min(min_stable, c);
    }
    std::set<std::string> st0;
    for (const auto& r : enumerate_all(p, 0.0))
      if (r.verdict == Verdict::stable) st0.insert(r.cls.full_label());
    if (st0 != std::set<std::string>{"LR", "LR*"}) ++bad_H0;
    int ea_outer = 0;
    for (const auto& r : enumerate_all(p, 10.0))
      if (r.verdict == Verdict::stable && r.cls.tag == ClassTag::EA && r.branch == Branch::outer) ++ea_outer;
    if (ea_outer != 6) ++bad_H10;
  }
  o.pass = min_stable >= 1 && bad_H0 == 0 && bad_H10 == 0;
  o.detail = std::to_string(pts.size()) + " parameter points, " + std::to_string(samples) +
             " samples, min stable count " + std::to_string(min_stable) + "; H=0 stable set != {LR, LR*}: " +
             std::to_string(bad_H0) + "; H=10 without 6 stable EA outer: " + std::to_string(bad_H10);
  return o;
}

// 3. Closed-form thresholds.
Outcome thresholds() {
  Outcome o;
  const double closed = 26.0 / 135.0 * std::pow(1.5, 1.5);
  const SweepResult s = sweep(SystemParams::from_radii({1, 1, 1}));
  double lr_err = 1e300;
  for (const auto& e : s.events)
    for (const auto& x : e.participants)
      if (x.key.cls.tag == ClassTag::LR && x.type == Endpoint::Type::end) lr_err = std::min(lr_err, std::abs(e.H - closed));

  // ER stabilisation: locate the verdict flip of each resting line by
  // bisection on the certified verdict and compare with I_H (1 + r_j)^(-3/2).
  double er_err = 0.0;
  int er_checked = 0, er_points_without = 0;
  for (const auto& p : random_points(3003, 10)) {
    int here = 0;
    for (const auto& ord : collinear_orderings()) {
      const auto [i, j, k] = ord;
      Configuration c;
      c.set(i, j, p.contact(i, j));
      c.set(j, k, p.contact(j, k));
      c.set(k, i, p.contact(i, j) + p.contact(j, k));
      const double formula = moment_of_inertia(p, c) * std::pow(1.0 + p.r(j), -1.5);
      // The existence end itself is marginal (a contact multiplier vanishes).
      const double top = ER_existence_H(p, ord) * (1.0 - 1e-7);
      auto stable_at = [&](double H) {
        const auto r = solve_ER(p, ord, H);
        return r && r->verdict == Verdict::stable;
      };
      if (!stable_at(top) || stable_at(0.0)) continue;
      const double Hflip = bisect([&](double H) { return stable_at(H) ? 1.0 : -1.0; }, 0.0, top, 80);
      er_err = std::max(er_err, std::abs(Hflip - formula) / formula);
      ++er_checked;
      ++here;
    }
    if (here == 0) ++er_points_without;
  }
  o.pass = lr_err <= 1e-6 && er_checked > 0 && er_err <= 1e-8;
  o.detail = "equal-mass LR termination |dH| = " + fmt("%.2e", lr_err) + "; ER stabilisation max rel err " +
             fmt("%.2e", er_err) + " over " + std::to_string(er_checked) + " resting lines (" +
             std::to_string(er_points_without) + " points without a stabilising line)";
  return o;
}

// 4. LO critical distance.
Outcome lo_distance() {
  Outcome o;
  double worst = 0.0;
  for (const auto& p : random_points(4004, 10)) {
    const double pm = p.pair_mass(0, 1) + p.pair_mass(1, 2) + p.pair_mass(2, 0);
    // H(d) from the equilateral balance H^2 = I_H^2 / d^3; the minimum is
    // located from a complex-step derivative.
    auto H = [&](std::complex<double> d) { return (pm * d * d + p.spin_inertia) / std::pow(d, 1.5); };
    auto dH = [&](double d) { return std::imag(H({d, 1e-30})) / 1e-30; };
    const double dmin = bisect(dH, 1e-3, 100.0);
    worst = std::max(worst, std::abs(dmin - LO_critical_distance(p)) / LO_critical_distance(p));
    // The traced LO curve agrees with that minimum.
    const EquilibriumClass lo{ClassTag::LO, {0, 1, 2}, false};
    worst = std::max(worst, std::abs(family_H(p, lo, dmin) - H(dmin).real()) / H(dmin).real());
  }
  const auto eq = SystemParams::from_radii({1, 1, 1});
  const bool single = LO_critical_distance(eq) < 2.0 / 3;
  o.pass = worst <= 1e-8 && single;
  o.detail = "max rel err " + fmt("%.2e", worst) + " over 10 points; equal-mass d* = " +
             fmt("%.6f", LO_critical_distance(eq)) + (single ? " < 2/3 (single branch)" : " >= 2/3");
  return o;
}

// 5. Instability certificates.
Outcome instability() {
  Outcome o;
  std::mt19937_64 rng(5005);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  int lo_bad = 0, eo_bad = 0, is_bad = 0, lo_n = 0, eo_n = 0, is_n = 0;
  for (int n = 0; n < 1000; ++n) {
    const auto p = test::random_params(rng);
    const double m1 = p.m(0), m2 = p.m(1), m3 = p.m(2);

    // LO: the d23 diagonal of the distance Hessian.
    if (m2 * m3 - 3 * m1 * (m2 + m3) >= 0) ++lo_bad;
    const EquilibriumClass lo{ClassTag::LO, {0, 1, 2}, false};
    const FamilyCurve fc = family_curve(p, lo);
    const double d = fc.q_lo * (1.0 + 5.0 * u01(rng));
    Configuration c;
    c.d = {d, d, d};
    const double H = family_H(p, lo, d);
    const Mat3 M = distance_hessian(p, c, H);
    if (!(M[1][1] < 0)) ++lo_bad;
    ++lo_n;

    // EO: both distance diagonals positive never happens.
    for (const auto& ord : collinear_orderings()) {
      const double mi = p.m(ord[0]), mj = p.m(ord[1]), mk = p.m(ord[2]);
      const bool a = mi * mj - 3 * (mi + mj) * mk > 0, b = mj * mk - 3 * (mj + mk) * mi > 0;
      if (a && b) ++eo_bad;
      const auto rec = solve_EO(p, ord, Branch::outer, 0.5 + 5.0 * u01(rng));
      if (rec && rec->verdict != Verdict::unstable) ++eo_bad;
      ++eo_n;
    }

    // IS: theta-theta diagonal negative when the vertex carries the heavier
    // of the contacting pair.
    for (int k = 0; k < 3; ++k) {
      const int i = (k + 1) % 3, j = (k + 2) % 3;
      const EquilibriumClass is{ClassTag::IS, {i, j, k}, false};
      for (const auto& key : all_family_keys(p)) {
        if (!(key.cls == is)) continue;
        const auto range = family_H_range(p, key);
        if (!range) continue;
        const double Hs = range->first + (std::min(range->second, 10.0) - range->first) * u01(rng);
        const auto rec = solve_family(p, key, Hs);
        if (!rec) continue;
        const auto& ch = rec->chart.chart;
        const int vi = ch.ord[0], vj = ch.ord[1], vk = ch.ord[2];
        if (!(p.m(vj) >= p.m(vi))) ++is_bad;
        const Mat3 S = second_variation_matrix(p, ch, Hs);
        const double cc = 1.0 - p.r(vk);
        const double dki = rec->cfg.dist(vk, vi);
        const double bracket = p.m(vk) * (p.m(vi) - 3 * p.m(vj)) * dki * dki - 3 * p.spin_inertia -
                               3 * p.m(vi) * p.m(vj) * cc * cc;
        if (!(S[2][2] < 0) || !(bracket < 0) || rec->verdict != Verdict::unstable) ++is_bad;
        ++is_n;
      }
    }
  }
  o.pass = lo_bad == 0 && eo_bad == 0 && is_bad == 0;
  o.detail = "violations LO " + std::to_string(lo_bad) + "/" + std::to_string(lo_n) + ", EO " +
             std::to_string(eo_bad) + "/" + std::to_string(eo_n) + ", IS " + std::to_string(is_bad) + "/" +
             std::to_string(is_n) + " over 1000 triples";
  return o;
}

// 6. Oracle equivalence.
Outcome oracle_equivalence() {
  Outcome o;
  const auto t0 = Clock::now();
  std::vector<SystemParams> pts{generic(), SystemParams::from_radii({1, 1, 1})};
  for (const auto& p : random_points(6006, 3)) pts.push_back(p);
  std::size_t scans = 0, records = 0, unmatched = 0, extra = 0, verdict = 0, marginal = 0;
  std::string first_problem;
  for (const auto& p : pts) {
    const SweepResult s = sweep(p, {1e-3, 10.0, 200});
    std::mt19937_64 rng(6006 + scans);
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);
    for (int k = 0; k < 24; ++k) {
      double H = std::exp(std::log(1e-3) + (k + 0.5 + jitter(rng)) * std::log(1e4) / 24);
      for (int guard = 0; guard < 50; ++guard) {
        bool near = false;
        for (const auto& e : s.events) near = near || std::abs(H - e.H) <= 2e-3 * e.H;
        if (!near) break;
        H *= 1.005;
      }
      const auto recs = enumerate_all(p, H);
      auto rep = oracle::scan(p, H, 64);
      oracle::match(rep, recs);
      ++scans;
      records += recs.size();
      unmatched += rep.unmatched_records.size();
      extra += rep.unmatched_points.size();
      verdict += rep.verdict_mismatches.size();
      marginal += rep.marginal_skipped;
      if (!rep.agrees() && first_problem.empty()) {
        first_problem = " first disagreement at H=" + fmt("%.6g", H);
        if (!rep.unmatched_records.empty()) first_problem += " record " + recs[rep.unmatched_records[0]].key().name();
      }
    }
  }
  const double dt = seconds_since(t0);
  o.pass = unmatched == 0 && extra == 0 && verdict == 0 && dt < 600.0;
  o.detail = std::to_string(scans) + " scans at 64^3, " + std::to_string(records) + " records; unmatched records " +
             std::to_string(unmatched) + ", unmatched points " + std::to_string(extra) + ", verdict mismatches " +
             std::to_string(verdict) + ", marginal skipped " + std::to_string(marginal) + "; " + fmt("%.1f s", dt) +
             first_problem;
  return o;
}

// 7. Gradient / Hessian fidelity.
Outcome fidelity() {
  Outcome o;
  std::mt19937_64 rng(7007);
  double g_worst = 0.0, h_worst = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const auto p = test::random_params(rng);
    const auto a = test::random_angle_chart(p, rng);
    const double H = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
    const Configuration cfg = to_configuration(a);
    const double es = energy_scale(p, cfg, H);
    auto E = [&](std::array<double, 3> x) {
      AngleChart b = a;
      b.u = x[0];
      b.v = x[1];
      b.theta = x[2];
      return amended_potential(p, to_configuration(b), H);
    };
    const std::array<double, 3> s{a.u, a.v, 1.0};
    const auto g = first_variations_angle_form(p, a, H);
    const auto M = second_variation_matrix(p, a, H);
    const auto fg = test::fd_gradient(E, {a.u, a.v, a.theta}, s, 1e-5);
    const auto fM = test::fd_hessian(E, {a.u, a.v, a.theta}, s, 1e-4);
    auto Ed = [&](std::array<double, 3> d) {
      Configuration c;
      c.d = d;
      return amended_potential(p, c, H);
    };
    const auto gd = first_variations_distance_form(p, cfg, H);
    const auto Md = distance_hessian(p, cfg, H);
    const auto fgd = test::fd_gradient(Ed, cfg.d, cfg.d, 1e-5);
    const auto fMd = test::fd_hessian(Ed, cfg.d, cfg.d, 1e-4);
    for (int i = 0; i < 3; ++i) {
      g_worst = std::max(g_worst, test::rel_err(g[i] * s[i] / es, fg[i] * s[i] / es));
      g_worst = std::max(g_worst, test::rel_err(gd[i] * cfg.d[i] / es, fgd[i] * cfg.d[i] / es));
      for (int j = 0; j < 3; ++j) {
        h_worst = std::max(h_worst, test::rel_err(M[i][j] * s[i] * s[j] / es, fM[i][j] * s[i] * s[j] / es));
        h_worst = std::max(h_worst, test::rel_err(Md[i][j] * cfg.d[i] * cfg.d[j] / es,
                                                  fMd[i][j] * cfg.d[i] * cfg.d[j] / es));
      }
    }
  }
  o.pass = g_worst <= 1e-6 && h_worst <= 1e-5;
  o.detail = "1000 configurations, max rel err gradient " + fmt("%.2e", g_worst) + ", Hessian " + fmt("%.2e", h_worst);
  return o;
}

// 8. F-function shape and reciprocal identity.
Outcome f_function() {
  Outcome o;
  std::mt19937_64 rng(8008);
  std::uniform_real_distribution<double> lu(std::log(1e-3), std::log(1e3)), lx(std::log(1e-2), std::log(1e2));
  int mono = 0, convex = 0;
  double ident = 0.0;
  for (int n = 0; n < 10000; ++n) {
    const double mu = std::exp(lu(rng));
    double a = std::exp(lx(rng)), b = std::exp(lx(rng));
    if (a > b) std::swap(a, b);
    if (!(F_prime(mu, a) < 0) || (b > a * (1 + 1e-12) && !(F(mu, b) < F(mu, a)))) ++mono;
    const double mid = F(mu, 0.5 * (a + b)), chord = 0.5 * (F(mu, a) + F(mu, b));
    if (!(F_second(mu, a) > 0) || mid > chord * (1 + 1e-14)) ++convex;
    ident = std::max(ident, std::abs(a * a * a * F(mu, a) - F(1 / mu, 1 / a)) / F(1 / mu, 1 / a));
  }
  o.pass = mono == 0 && convex == 0 && ident <= 1e-12;
  o.detail = "10^4 points: monotonicity violations " + std::to_string(mono) + ", convexity violations " +
             std::to_string(convex) + ", identity max rel err " + fmt("%.2e", ident);
  return o;
}

// 9. Sign law.
Outcome sign_law() {
  Outcome o;
  std::size_t checked = 0, skipped = 0, mismatches = 0, families = 0;
  auto pts = random_points(9009, 5);
  pts.push_back(generic());
  std::string first;
  for (const auto& p : pts) {
    for (const auto& b : sweep(p).branches) {
      const auto samples = family_samples(p, b);
      if (samples.size() < 3) continue;
      const auto r = family_sign_test(samples);
      ++families;
      checked += r.checked;
      skipped += r.skipped_marginal;
      mismatches += r.mismatches.size();
      if (!r.ok() && first.empty()) first = " first at " + b.key.name();
    }
  }
  o.pass = mismatches == 0 && checked > 0;
  o.detail = std::to_string(families) + " traced branches, " + std::to_string(checked) + " interior samples, " +
             std::to_string(skipped) + " marginal skipped, " + std::to_string(mismatches) + " mismatches" + first;
  return o;
}

// 10. Region charts against observed fission products.
Outcome regions() {
  Outcome o;
  const auto ea132 = region_chart(ChartId::EA132_fission, 128);
  const auto ea123 = region_chart(ChartId::EA123_fission, 128);
  const auto ea312 = region_chart(ChartId::EA312_fission, 128);
  bool shape = !ea132.has_sign_change() && ea123.boundary.size() == 1 && ea312.boundary.size() == 1;

  // ER ijk ends on EA ij-k where the chart is positive, on EA kj-i otherwise.
  auto product = [](const SystemParams& p, const Ordering& ord) -> std::string {
    const SweepResult s = sweep(p);
    const std::string er = EquilibriumClass{ClassTag::ER, ord, false}.label() + "/single";
    for (const auto& e : s.events) {
      bool has_er = false;
      for (const auto& x : e.participants) has_er |= x.key.name() == er && x.type == Endpoint::Type::end;
      if (!has_er) continue;
      for (const auto& x : e.participants)
        if (x.key.cls.tag == ClassTag::EA) return x.key.cls.label();
    }
    return "";
  };
  int tested = 0, wrong = 0;
  const std::pair<const RegionChart*, Ordering> charts[] = {
      {&ea123, {0, 1, 2}}, {&ea312, {2, 0, 1}}, {&ea132, {0, 2, 1}}};
  std::string first;
  for (const auto& [rc, ord] : charts) {
    for (int side : {1, -1}) {
      // Three well-separated grid points on this side, at least 0.05 from the line in value.
      std::vector<const RegionPoint*> cand;
      for (const auto& g : rc->grid)
        if (g.valid && side * g.value > 0.05 && g.m3 > 0.02 && 1 - g.m1 - g.m3 - g.m3 > 0.02 &&
            g.m1 - (1 - g.m1 - g.m3) > 0.02)
          cand.push_back(&g);
      if (cand.empty()) {
        if (rc != &ea132 || side > 0) {
          ++wrong;
          if (first.empty()) first = " no test points on one side of " + to_string(rc->id);
        }
        continue;
      }
      for (int t = 0; t < 3; ++t) {
        const RegionPoint& g = *cand[(cand.size() - 1) * t / 2];
        const double m2 = 1 - g.m1 - g.m3;
        const auto p = SystemParams::from_masses({g.m1, m2, g.m3}, true);
        const auto [i, j, k] = ord;
        const std::string want =
            side > 0 ? EquilibriumClass{ClassTag::EA, {i, j, k}, false}.label()
                     : EquilibriumClass{ClassTag::EA, {k, j, i}, false}.label();
        const std::string got = product(p, ord);
        ++tested;
        if (got != want) {
          ++wrong;
          if (first.empty()) first = " first mismatch: " + to_string(rc->id) + " expected " + want + " got " + got;
        }
      }
    }
  }
  o.pass = shape && wrong == 0;
  o.detail = std::string("EA132 sign change ") + (ea132.has_sign_change() ? "yes" : "no") + ", EA123 lines " +
             std::to_string(ea123.boundary.size()) + ", EA312 lines " + std::to_string(ea312.boundary.size()) +
             "; fission products checked " + std::to_string(tested) + ", wrong " + std::to_string(wrong) + first;
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"census", census},
      {"stable existence", stable_existence},
      {"closed-form thresholds", thresholds},
      {"LO critical distance", lo_distance},
      {"instability certificates", instability},
      {"oracle equivalence", oracle_equivalence},
      {"gradient/Hessian fidelity", fidelity},
      {"F-function", f_function},
      {"sign law", sign_law},
      {"region charts", regions},
  };
  int failed = 0;
  for (std::size_t n = 0; n < criteria.size(); ++n) {
    Outcome o;
    try {
      o = criteria[n].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("criterion %2zu %-27s %s  %s\n", n + 1, criteria[n].first, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
