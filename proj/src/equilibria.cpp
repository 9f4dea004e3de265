#include "f3bp/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include "f3bp/ffunc.hpp"
#include "f3bp/roots.hpp"

namespace f3bp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

std::string digits(const Ordering& o) { return body_label(o[0]) + body_label(o[1]) + body_label(o[2]); }

int tag_rank(ClassTag t) { return static_cast<int>(t); }

double min_radius(const SystemParams& p) { return std::min({p.r(0), p.r(1), p.r(2)}); }

// Generic H(q) = K (C + a q^2) q^(-3/2) used by TR, IS, LO and EO.
struct PowerCurve {
  double K = 1.0, C = 0.0, a = 0.0;
  double H(double q) const { return K * (C + a * q * q) / std::pow(q, 1.5); }
  double dH(double q) const { return K * (0.5 * a * q * q - 1.5 * C) / std::pow(q, 2.5); }
  double q_star() const { return std::sqrt(3.0 * C / a); }
};

struct EOShape {
  double alpha = 0.5;  // d_ij / d_ki
  double w0 = 0.0;     // (H/I_H)^2 d_ki^3
  double A = 0.0;      // I_H = A d_ki^2 + I_S
};

EOShape eo_shape(const SystemParams& p, const Ordering& o) {
  const auto [i, j, k] = o;
  const double mi = p.m(i), mj = p.m(j), mk = p.m(k);
  const double rho = euler_quintic_ratio(mi, mj, mk);
  EOShape s;
  s.alpha = 1.0 / (1.0 + rho);
  const double al = s.alpha;
  s.w0 = (mj / (al * al) + mk) / (mj * al + mk);
  s.A = mi * mj * al * al + mj * mk * (1 - al) * (1 - al) + mk * mi;
  return s;
}

PowerCurve power_curve(const SystemParams& p, const EquilibriumClass& cls) {
  const auto [i, j, k] = cls.ord;
  PowerCurve c;
  switch (cls.tag) {
    case ClassTag::TR: {
      const double u = 1.0 - p.r(k), v = 1.0 - p.r(i);
      c.C = p.pair_mass(i, j) * u * u + p.pair_mass(j, k) * v * v + p.spin_inertia;
      c.a = p.pair_mass(k, i);
      break;
    }
    case ClassTag::IS: {
      const double cc = 1.0 - p.r(k);
      c.C = p.pair_mass(i, j) * cc * cc + p.spin_inertia;
      c.a = p.m(k) * (p.m(i) + p.m(j));
      break;
    }
    case ClassTag::LO:
      c.C = p.spin_inertia;
      c.a = p.pair_mass(0, 1) + p.pair_mass(1, 2) + p.pair_mass(2, 0);
      break;
    case ClassTag::EO: {
      const EOShape s = eo_shape(p, cls.ord);
      c.K = std::sqrt(s.w0);
      c.C = p.spin_inertia;
      c.a = s.A;
      break;
    }
    default: throw InvalidInput("no power-law curve for class " + to_string(cls.tag));
  }
  return c;
}

// Euler-aligned family, chart (i, j, k), u = 1 - r_k fixed, x = d_jk free.
struct EACurve {
  double mi, mj, mk, c, IS;
  double D(double x) const { return c + x; }
  double w(double x) const {
    const double d = D(x);
    return (mj / (x * x) + mi / (d * d)) / (mj * x + mi * d);
  }
  double IH(double x) const {
    const double d = D(x);
    return mi * mj * c * c + mj * mk * x * x + mk * mi * d * d + IS;
  }
  double H(double x) const { return IH(x) * std::sqrt(w(x)); }
  double dlogH(double x) const {
    const double d = D(x);
    const double dI = 2.0 * mj * mk * x + 2.0 * mk * mi * d;
    const double N = mj / (x * x) + mi / (d * d);
    const double Q = mj * x + mi * d;
    const double dN = -2.0 * mj / (x * x * x) - 2.0 * mi / (d * d * d);
    return dI / IH(x) + 0.5 * (dN / N - (mj + mi) / Q);
  }
};

EACurve ea_curve(const SystemParams& p, const Ordering& o) {
  const auto [i, j, k] = o;
  return {p.m(i), p.m(j), p.m(k), 1.0 - p.r(k), p.spin_inertia};
}

// Expands `hi` geometrically until pred(hi) holds.
double expand_until(double start, const std::function<bool(double)>& pred) {
  double x = start;
  for (int n = 0; n < 200 && !pred(x); ++n) x *= 2.0;
  return x;
}

FamilyCurve ea_family_curve(const SystemParams& p, const Ordering& o) {
  const auto [i, j, k] = o;
  const EACurve ea = ea_curve(p, o);
  FamilyCurve fc;
  fc.q_hi = kInf;
  const double x0 = 1.0 - p.r(i);
  auto psi = [&](double x) { return EA_contact_function(p, i, j, x); };
  if (psi(x0) >= 0.0) {
    fc.q_lo = x0;
  } else {
    const double hi = expand_until(2.0 * x0, [&](double x) { return psi(x) > 0.0; });
    fc.q_lo = roots::bracketed(psi, x0, hi).value();
  }
  // Minimizer of H along the family: first sign change of d log H / dx.
  const double lo = fc.q_lo;
  if (ea.dlogH(lo) >= 0.0) {
    fc.q_star = lo;
  } else {
    double a = lo, b = lo;
    for (int n = 0; n < 2000; ++n) {
      b = a * 1.02;
      if (ea.dlogH(b) >= 0.0) break;
      a = b;
    }
    fc.q_star = roots::bracketed([&](double x) { return ea.dlogH(x); }, a, b).value();
  }
  fc.valid = true;
  return fc;
}

std::optional<double> invert_on(const std::function<double(double)>& Hq, double a, double b, double H) {
  // H(q) is monotone on [a, b]; b may be infinite.
  if (std::isinf(b)) {
    const double start = std::max(2.0 * a, 1.0);
    b = expand_until(start, [&](double q) { return Hq(q) >= H; });
  }
  double Ha = Hq(a), Hb = Hq(b);
  const double lo = std::min(Ha, Hb), hi = std::max(Ha, Hb);
  const double slack = 1e-14 * std::max(1.0, hi);
  if (H < lo - slack || H > hi + slack) return std::nullopt;
  if (std::abs(H - Ha) <= slack) return a;
  if (std::abs(H - Hb) <= slack) return b;
  return roots::bracketed([&](double q) { return Hq(q) - H; }, a, b, {}, 1e-15 * std::max(1.0, b));
}

ContactSet contacts_of(const SystemParams& p, const Configuration& cfg, const Tolerances& tol) {
  return active_contacts(p, cfg, tol.contact);
}

EquilibriumRecord finish(const SystemParams& p, const EquilibriumClass& cls, Branch br, const ChartPoint& pt, double H,
                         double q, const Tolerances& tol) {
  EquilibriumRecord r;
  r.cls = cls;
  r.branch = br;
  r.chart = pt;
  r.cfg = pt.cfg;
  r.contacts = contacts_of(p, r.cfg, tol);
  r.H = H;
  const double IH = moment_of_inertia(p, r.cfg);
  r.spin_rate = H / IH;
  r.energy = amended_potential(p, r.cfg, H);
  r.q = q;
  r.cert = certify(p, pt, H, tol);
  r.verdict = r.cert.verdict;
  return r;
}

ChartPoint chart_point(const Ordering& o, double u, double v, double th, std::array<bool, 3> constrained) {
  AngleChart a;
  a.ord = o;
  a.u = u;
  a.v = v;
  a.theta = th;
  return ChartPoint::from_angle(a, constrained);
}

// Solution of a curve family (TR, IS, EA, LO, EO) for one orientation.
std::optional<EquilibriumRecord> solve_curve(const SystemParams& p, const EquilibriumClass& cls, Branch br, double H,
                                             const Tolerances& tol) {
  if (H < 0.0) throw InvalidInput("H must be nonnegative");
  const FamilyCurve fc = family_curve(p, cls);
  if (!fc.valid) return std::nullopt;
  double a, b;
  if (br == Branch::inner) {
    if (!(fc.q_star > fc.q_lo)) return std::nullopt;
    a = fc.q_lo;
    b = std::min(fc.q_star, fc.q_hi);
  } else if (br == Branch::outer) {
    if (!(fc.q_star < fc.q_hi)) return std::nullopt;
    a = std::max(fc.q_star, fc.q_lo);
    b = fc.q_hi;
  } else {
    return std::nullopt;
  }
  auto Hq = [&](double q) { return family_H(p, cls, q); };
  const auto q = invert_on(Hq, a, b, H);
  if (!q) return std::nullopt;
  const auto [i, j, k] = cls.ord;

  switch (cls.tag) {
    case ClassTag::TR: {
      const double u = 1.0 - p.r(k), v = 1.0 - p.r(i);
      const double c = std::clamp((u * u + v * v - (*q) * (*q)) / (2.0 * u * v), -1.0, 1.0);
      return finish(p, cls, br, chart_point(cls.ord, u, v, std::acos(c), {true, true, false}), H, *q, tol);
    }
    case ClassTag::IS: {
      // Heavier of the contact pair at the angle vertex.
      const bool swap = p.m(i) > p.m(j);
      const Ordering o = swap ? Ordering{j, i, k} : cls.ord;
      const double c = 1.0 - p.r(k);
      const double th = std::acos(std::clamp(c / (2.0 * (*q)), -1.0, 1.0));
      return finish(p, cls, br, chart_point(o, c, *q, th, {true, false, false}), H, *q, tol);
    }
    case ClassTag::EA: {
      const double c = 1.0 - p.r(k);
      return finish(p, cls, br, chart_point(cls.ord, c, *q, kPi, {true, false, false}), H, *q, tol);
    }
    case ClassTag::LO: {
      Configuration cfg;
      cfg.d = {*q, *q, *q};
      return finish(p, cls, br, ChartPoint::from_distances(cfg, {false, false, false}), H, *q, tol);
    }
    case ClassTag::EO: {
      const EOShape s = eo_shape(p, cls.ord);
      double x = s.alpha * (*q), y = (1.0 - s.alpha) * (*q);
      // Damped Newton polish on the two collinear force-balance conditions.
      for (int it = 0; it < 20; ++it) {
        AngleChart ac{cls.ord, x, y, kPi};
        const auto g = first_variations_angle_form(p, ac, H);
        const double es = energy_scale(p, to_configuration(ac), H);
        if (std::max(std::abs(g[0] * x), std::abs(g[1] * y)) / es < 1e-15) break;
        const Mat3 M = second_variation_matrix(p, ac, H);
        const double det = M[0][0] * M[1][1] - M[0][1] * M[1][0];
        if (det == 0.0) break;
        double dx = -(M[1][1] * g[0] - M[0][1] * g[1]) / det;
        double dy = -(-M[1][0] * g[0] + M[0][0] * g[1]) / det;
        const double lim = 0.1 * std::min(x, y);
        const double step = std::max(std::abs(dx), std::abs(dy));
        if (step > lim) {
          dx *= lim / step;
          dy *= lim / step;
        }
        x += dx;
        y += dy;
      }
      return finish(p, cls, br, chart_point(cls.ord, x, y, kPi, {false, false, false}), H, x + y, tol);
    }
    default: return std::nullopt;
  }
}

const std::array<Ordering, 3> kPairs{{{0, 1, 2}, {1, 2, 0}, {2, 0, 1}}};

}  // namespace

std::string to_string(ClassTag t) {
  static const char* n[] = {"LR", "ER", "TR", "EA", "IS", "LO", "EO"};
  return n[static_cast<int>(t)];
}

std::string to_string(Branch b) {
  switch (b) {
    case Branch::single: return "single";
    case Branch::inner: return "inner";
    case Branch::outer: return "outer";
  }
  return "single";
}

const std::vector<Ordering>& collinear_orderings() {
  static const std::vector<Ordering> o{{0, 1, 2}, {0, 2, 1}, {2, 0, 1}};
  return o;
}

std::string EquilibriumClass::label() const {
  switch (tag) {
    case ClassTag::LR:
    case ClassTag::LO: return to_string(tag);
    case ClassTag::ER:
    case ClassTag::TR:
    case ClassTag::EO: return to_string(tag) + digits(ord);
    case ClassTag::IS:
    case ClassTag::EA: return to_string(tag) + body_label(ord[0]) + body_label(ord[1]) + "-" + body_label(ord[2]);
  }
  return "?";
}

std::string EquilibriumClass::full_label() const { return label() + (mirror ? "*" : ""); }

int EquilibriumClass::contact_count() const {
  switch (tag) {
    case ClassTag::LR: return 3;
    case ClassTag::ER:
    case ClassTag::TR: return 2;
    case ClassTag::EA:
    case ClassTag::IS: return 1;
    default: return 0;
  }
}

bool EquilibriumClass::operator==(const EquilibriumClass& o) const {
  return tag == o.tag && ord == o.ord && mirror == o.mirror;
}

bool EquilibriumClass::operator<(const EquilibriumClass& o) const {
  return std::make_tuple(tag_rank(tag), ord, mirror) < std::make_tuple(tag_rank(o.tag), o.ord, o.mirror);
}

bool FamilyKey::operator<(const FamilyKey& o) const {
  if (!(cls == o.cls)) return cls < o.cls;
  return static_cast<int>(branch) < static_cast<int>(o.branch);
}

std::string FamilyKey::name() const { return cls.full_label() + "/" + to_string(branch); }

EquilibriumClass parse_label(const std::string& raw) {
  std::string s = raw;
  EquilibriumClass c;
  if (!s.empty() && s.back() == '*') {
    c.mirror = true;
    s.pop_back();
  }
  if (s.size() < 2) throw InvalidInput("bad label: " + raw);
  const std::string tag = s.substr(0, 2);
  const std::string rest = s.substr(2);
  auto body = [&](char ch) {
    if (ch < '1' || ch > '3') throw InvalidInput("bad body index in label: " + raw);
    return ch - '1';
  };
  if (tag == "LR" || tag == "LO") {
    if (!rest.empty() && rest != "123") throw InvalidInput("bad label: " + raw);
    c.tag = tag == "LR" ? ClassTag::LR : ClassTag::LO;
    return c;
  }
  if (tag == "ER" || tag == "TR" || tag == "EO") {
    if (rest.size() != 3) throw InvalidInput("bad label: " + raw);
    Ordering o{body(rest[0]), body(rest[1]), body(rest[2])};
    if (o[0] == o[1] || o[1] == o[2] || o[0] == o[2]) throw InvalidInput("bad label: " + raw);
    c.tag = tag == "ER" ? ClassTag::ER : (tag == "TR" ? ClassTag::TR : ClassTag::EO);
    for (const auto& co : collinear_orderings())
      if (co[1] == o[1]) c.ord = co;
    if (c.tag != ClassTag::TR && c.mirror) throw InvalidInput("collinear class has no mirror: " + raw);
    return c;
  }
  if (tag == "IS" || tag == "EA") {
    if (rest.size() != 4 || rest[2] != '-') throw InvalidInput("bad label: " + raw);
    const int i = body(rest[0]), j = body(rest[1]), k = body(rest[3]);
    if (i == j || j == k || i == k) throw InvalidInput("bad label: " + raw);
    if (tag == "EA") {
      if (c.mirror) throw InvalidInput("collinear class has no mirror: " + raw);
      c.tag = ClassTag::EA;
      c.ord = {i, j, k};
      return c;
    }
    c.tag = ClassTag::IS;
    c.ord = kPairs[k == 2 ? 0 : (k == 0 ? 1 : 2)];
    return c;
  }
  throw InvalidInput("unknown class in label: " + raw);
}

std::vector<EquilibriumClass> all_classes() {
  std::vector<EquilibriumClass> out;
  for (bool m : {false, true}) out.push_back({ClassTag::LR, {0, 1, 2}, m});
  for (const auto& o : collinear_orderings()) out.push_back({ClassTag::ER, o, false});
  for (const auto& o : collinear_orderings())
    for (bool m : {false, true}) out.push_back({ClassTag::TR, o, m});
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) out.push_back({ClassTag::EA, {i, j, third_body(i, j)}, false});
  for (const auto& o : kPairs)
    for (bool m : {false, true}) out.push_back({ClassTag::IS, o, m});
  for (bool m : {false, true}) out.push_back({ClassTag::LO, {0, 1, 2}, m});
  for (const auto& o : collinear_orderings()) out.push_back({ClassTag::EO, o, false});
  return out;
}

std::vector<FamilyKey> all_family_keys(const SystemParams& p) {
  std::vector<FamilyKey> keys;
  for (const auto& c : all_classes()) {
    if (c.tag == ClassTag::LR || c.tag == ClassTag::ER) {
      keys.push_back({c, Branch::single});
      continue;
    }
    const FamilyCurve fc = family_curve(p, c);
    if (!fc.valid) continue;
    if (fc.q_star > fc.q_lo) keys.push_back({c, Branch::inner});
    if (fc.q_star < fc.q_hi) keys.push_back({c, Branch::outer});
  }
  return keys;
}

int EquilibriumRecord::orientation() const {
  if (cls.tag == ClassTag::ER || cls.tag == ClassTag::EA || cls.tag == ClassTag::EO) return 0;
  return cls.mirror ? -1 : 1;
}

double euler_quintic_ratio(double mi, double mj, double mk) {
  const double c5 = mi + mj, c4 = 3 * mi + 2 * mj, c3 = 3 * mi + mj;
  const double c2 = -(mj + 3 * mk), c1 = -(2 * mj + 3 * mk), c0 = -(mj + mk);
  auto f = [&](double r) { return ((((c5 * r + c4) * r + c3) * r + c2) * r + c1) * r + c0; };
  auto df = [&](double r) { return (((5 * c5 * r + 4 * c4) * r + 3 * c3) * r + 2 * c2) * r + c1; };
  // One sign change in the coefficients: exactly one positive root.
  double hi = 1.0;
  while (f(hi) < 0.0) hi *= 2.0;
  return roots::bracketed(f, 0.0, hi, df).value();
}

double EA_contact_function(const SystemParams& p, int i, int j, double x) {
  const int k = third_body(i, j);
  const double c = 1.0 - p.r(k);
  const double D = c + x;
  return F(p.m(j) / p.m(k), c / D) - F(p.m(j) / p.m(i), x / D);
}

FamilyCurve family_curve(const SystemParams& p, const EquilibriumClass& cls) {
  FamilyCurve fc;
  const auto [i, j, k] = cls.ord;
  switch (cls.tag) {
    case ClassTag::TR:
      fc.q_lo = 1.0 - min_radius(p);
      fc.q_hi = 1.0 + p.r(j);
      fc.q_star = power_curve(p, cls).q_star();
      fc.valid = true;
      break;
    case ClassTag::IS:
      fc.q_lo = 1.0 - min_radius(p);
      fc.q_hi = kInf;
      fc.q_star = power_curve(p, cls).q_star();
      fc.valid = true;
      break;
    case ClassTag::LO:
      fc.q_lo = 1.0 - min_radius(p);
      fc.q_hi = kInf;
      fc.q_star = power_curve(p, cls).q_star();
      fc.valid = true;
      break;
    case ClassTag::EO: {
      const EOShape s = eo_shape(p, cls.ord);
      fc.q_lo = std::max((1.0 - p.r(k)) / s.alpha, (1.0 - p.r(i)) / (1.0 - s.alpha));
      fc.q_hi = kInf;
      fc.q_star = power_curve(p, cls).q_star();
      fc.valid = true;
      break;
    }
    case ClassTag::EA: return ea_family_curve(p, cls.ord);
    default: break;
  }
  return fc;
}

double family_H(const SystemParams& p, const EquilibriumClass& cls, double q) {
  if (cls.tag == ClassTag::EA) return ea_curve(p, cls.ord).H(q);
  return power_curve(p, cls).H(q);
}

double LR_termination_H(const SystemParams& p) {
  Configuration cfg;
  cfg.d = {1.0 - p.r(2), 1.0 - p.r(0), 1.0 - p.r(1)};
  return moment_of_inertia(p, cfg) / std::pow(1.0 - min_radius(p), 1.5);
}

namespace {
Configuration er_config(const SystemParams& p, const Ordering& o) {
  const auto [i, j, k] = o;
  Configuration cfg;
  cfg.set(i, j, 1.0 - p.r(k));
  cfg.set(j, k, 1.0 - p.r(i));
  cfg.set(k, i, 1.0 + p.r(j));
  return cfg;
}
}  // namespace

double ER_stabilization_H(const SystemParams& p, const Ordering& o) {
  return moment_of_inertia(p, er_config(p, o)) / std::pow(1.0 + p.r(o[1]), 1.5);
}

double ER_existence_H(const SystemParams& p, const Ordering& o) {
  const auto [i, j, k] = o;
  const double u = 1.0 - p.r(k), v = 1.0 - p.r(i), D = 1.0 + p.r(j);
  const double mi = p.m(i), mj = p.m(j), mk = p.m(k);
  const double Rij = (mj / (u * u) + mk / (D * D)) / (mj * u + mk * D);
  const double Rjk = (mj / (v * v) + mi / (D * D)) / (mj * v + mi * D);
  return moment_of_inertia(p, er_config(p, o)) * std::sqrt(std::min(Rij, Rjk));
}

double LO_critical_distance(const SystemParams& p) {
  return std::sqrt(3.0 * p.spin_inertia / (p.pair_mass(0, 1) + p.pair_mass(1, 2) + p.pair_mass(2, 0)));
}

std::optional<std::pair<double, double>> family_H_range(const SystemParams& p, const FamilyKey& key) {
  const auto& cls = key.cls;
  if (cls.tag == ClassTag::LR) return std::make_pair(0.0, LR_termination_H(p));
  if (cls.tag == ClassTag::ER) return std::make_pair(0.0, ER_existence_H(p, cls.ord));
  const FamilyCurve fc = family_curve(p, cls);
  if (!fc.valid) return std::nullopt;
  auto Hq = [&](double q) { return std::isinf(q) ? kInf : family_H(p, cls, q); };
  if (key.branch == Branch::inner) {
    if (!(fc.q_star > fc.q_lo)) return std::nullopt;
    return std::make_pair(Hq(std::min(fc.q_star, fc.q_hi)), Hq(fc.q_lo));
  }
  if (key.branch == Branch::outer) {
    if (!(fc.q_star < fc.q_hi)) return std::nullopt;
    return std::make_pair(Hq(std::max(fc.q_star, fc.q_lo)), Hq(fc.q_hi));
  }
  return std::nullopt;
}

std::vector<EquilibriumRecord> solve_LR(const SystemParams& p, double H, const Tolerances& tol) {
  if (H < 0.0) throw InvalidInput("H must be nonnegative");
  std::vector<EquilibriumRecord> out;
  if (H > LR_termination_H(p)) return out;
  Configuration cfg;
  cfg.d = {1.0 - p.r(2), 1.0 - p.r(0), 1.0 - p.r(1)};
  for (bool m : {false, true}) {
    EquilibriumClass cls{ClassTag::LR, {0, 1, 2}, m};
    out.push_back(finish(p, cls, Branch::single, ChartPoint::from_distances(cfg, {true, true, true}), H, 0.0, tol));
  }
  return out;
}

std::optional<EquilibriumRecord> solve_ER(const SystemParams& p, const Ordering& o, double H, const Tolerances& tol) {
  if (H < 0.0) throw InvalidInput("H must be nonnegative");
  EquilibriumClass cls = parse_label("ER" + digits(o));
  if (cls.ord[1] != o[1]) throw InvalidInput("invalid ER ordering");
  if (H > ER_existence_H(p, cls.ord)) return std::nullopt;
  const auto [i, j, k] = cls.ord;
  return finish(p, cls, Branch::single, chart_point(cls.ord, 1.0 - p.r(k), 1.0 - p.r(i), kPi, {true, true, false}), H,
                0.0, tol);
}

std::vector<EquilibriumRecord> solve_TR(const SystemParams& p, const Ordering& o, Branch br, double H,
                                        const Tolerances& tol) {
  std::vector<EquilibriumRecord> out;
  EquilibriumClass cls = parse_label("TR" + digits(o));
  for (bool m : {false, true}) {
    cls.mirror = m;
    if (auto r = solve_curve(p, cls, br, H, tol)) out.push_back(*r);
  }
  return out;
}

std::vector<EquilibriumRecord> solve_IS(const SystemParams& p, int i, int j, Branch br, double H,
                                        const Tolerances& tol) {
  std::vector<EquilibriumRecord> out;
  EquilibriumClass cls = parse_label("IS" + body_label(i) + body_label(j) + "-" + body_label(third_body(i, j)));
  for (bool m : {false, true}) {
    cls.mirror = m;
    if (auto r = solve_curve(p, cls, br, H, tol)) out.push_back(*r);
  }
  return out;
}

std::optional<EquilibriumRecord> solve_EA(const SystemParams& p, int i, int j, Branch br, double H,
                                          const Tolerances& tol) {
  if (i == j || i < 0 || j < 0 || i > 2 || j > 2) throw InvalidInput("invalid EA pair");
  EquilibriumClass cls{ClassTag::EA, {i, j, third_body(i, j)}, false};
  return solve_curve(p, cls, br, H, tol);
}

std::vector<EquilibriumRecord> solve_LO(const SystemParams& p, Branch br, double H, const Tolerances& tol) {
  std::vector<EquilibriumRecord> out;
  for (bool m : {false, true}) {
    EquilibriumClass cls{ClassTag::LO, {0, 1, 2}, m};
    if (auto r = solve_curve(p, cls, br, H, tol)) out.push_back(*r);
  }
  return out;
}

std::optional<EquilibriumRecord> solve_EO(const SystemParams& p, const Ordering& o, Branch br, double H,
                                          const Tolerances& tol) {
  EquilibriumClass cls = parse_label("EO" + digits(o));
  return solve_curve(p, cls, br, H, tol);
}

std::optional<EquilibriumRecord> solve_family(const SystemParams& p, const FamilyKey& key, double H,
                                              const Tolerances& tol) {
  if (H < 0.0) throw InvalidInput("H must be nonnegative");
  const auto& cls = key.cls;
  switch (cls.tag) {
    case ClassTag::LR: {
      auto v = solve_LR(p, H, tol);
      if (v.empty()) return std::nullopt;
      return v[cls.mirror ? 1 : 0];
    }
    case ClassTag::ER: return solve_ER(p, cls.ord, H, tol);
    default: return solve_curve(p, cls, key.branch, H, tol);
  }
}

std::vector<EquilibriumRecord> enumerate_all(const SystemParams& p, double H, const Tolerances& tol) {
  if (H < 0.0 || !std::isfinite(H)) throw InvalidInput("H must be nonnegative");
  std::vector<EquilibriumRecord> out;
  for (const auto& key : all_family_keys(p)) {
    auto r = solve_family(p, key, H, tol);
    if (!r) continue;
    // Inner and outer branches coincide at the family minimum.
    const bool dup = std::any_of(out.begin(), out.end(), [&](const EquilibriumRecord& e) {
      if (!(e.cls == r->cls)) return false;
      for (int a = 0; a < 3; ++a)
        if (std::abs(e.cfg.d[a] - r->cfg.d[a]) > 1e-8 * std::max(1.0, e.cfg.d[a])) return false;
      return true;
    });
    if (!dup) out.push_back(std::move(*r));
  }
  std::sort(out.begin(), out.end(),
            [](const EquilibriumRecord& a, const EquilibriumRecord& b) { return a.key() < b.key(); });
  return out;
}

}  // namespace f3bp
