#include "f3bp/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "f3bp/roots.hpp"

namespace f3bp::oracle {

namespace {

constexpr double kPi = std::numbers::pi;

// Forward-mode number carrying value, gradient and (optionally) Hessian with
// respect to three chart coordinates. Extended precision: for a distant third
// body the angular derivatives are differences of terms a/R apart, and the
// tidal stiffness that remains must stay well above round-off.
using Real = long double;

template <bool WithHessian>
struct Jet {
  Real v = 0.0;
  std::array<Real, 3> g{};
  std::array<std::array<Real, 3>, 3> h{};

  static Jet constant(Real c) { return Jet{c, {}, {}}; }
  static Jet variable(Real x, int i) {
    Jet j{x, {}, {}};
    j.g[i] = 1.0;
    return j;
  }
};

template <bool W>
Jet<W> operator+(const Jet<W>& a, const Jet<W>& b) {
  Jet<W> r;
  r.v = a.v + b.v;
  for (int i = 0; i < 3; ++i) r.g[i] = a.g[i] + b.g[i];
  if constexpr (W)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.h[i][j] = a.h[i][j] + b.h[i][j];
  return r;
}

template <bool W>
Jet<W> operator*(Real s, const Jet<W>& a) {
  Jet<W> r;
  r.v = s * a.v;
  for (int i = 0; i < 3; ++i) r.g[i] = s * a.g[i];
  if constexpr (W)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.h[i][j] = s * a.h[i][j];
  return r;
}

template <bool W>
Jet<W> operator-(const Jet<W>& a, const Jet<W>& b) {
  return a + Real(-1) * b;
}

template <bool W>
Jet<W> operator*(const Jet<W>& a, const Jet<W>& b) {
  Jet<W> r;
  r.v = a.v * b.v;
  for (int i = 0; i < 3; ++i) r.g[i] = a.g[i] * b.v + a.v * b.g[i];
  if constexpr (W)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        r.h[i][j] = a.h[i][j] * b.v + a.v * b.h[i][j] + a.g[i] * b.g[j] + b.g[i] * a.g[j];
  return r;
}

// Applies a scalar function with derivatives f1, f2 at a.v.
template <bool W>
Jet<W> chain(const Jet<W>& a, Real f0, Real f1, Real f2) {
  Jet<W> r;
  r.v = f0;
  for (int i = 0; i < 3; ++i) r.g[i] = f1 * a.g[i];
  if constexpr (W)
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r.h[i][j] = f1 * a.h[i][j] + f2 * a.g[i] * a.g[j];
  return r;
}

template <bool W>
Jet<W> jexp(const Jet<W>& a) {
  const Real e = std::exp(a.v);
  return chain(a, e, e, e);
}
template <bool W>
Jet<W> jcos(const Jet<W>& a) {
  return chain(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v));
}
template <bool W>
Jet<W> jsin(const Jet<W>& a) {
  return chain(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v));
}
template <bool W>
Jet<W> jinv(const Jet<W>& a) {
  const Real x = a.v;
  return chain(a, 1 / x, -1 / (x * x), 2 / (x * x * x));
}
template <bool W>
Jet<W> jinvsqrt(const Jet<W>& a) {
  const Real x = a.v, s = 1 / std::sqrt(x);
  return chain(a, s, Real(-0.5) * s / x, Real(0.75) * s / (x * x));
}

// Chart centred on body c: p_c at the origin, p_n1 on the +x axis at
// distance exp(s1), p_n2 at distance exp(s2) and polar angle phi.
struct Chart {
  int c = 0, n1 = 1, n2 = 2;
  int parity() const {
    // +1 if (c, n1, n2) is a cyclic shift of (0, 1, 2).
    return (n1 == (c + 1) % 3) ? 1 : -1;
  }
};

struct Positions {
  std::array<double, 3> x{}, y{};
};

Positions positions(const Chart& ch, const std::array<double, 3>& q) {
  Positions P;
  P.x[ch.n1] = std::exp(q[0]);
  P.x[ch.n2] = std::exp(q[1]) * std::cos(q[2]);
  P.y[ch.n2] = std::exp(q[1]) * std::sin(q[2]);
  return P;
}

Configuration config_of(const Chart& ch, const std::array<double, 3>& q) {
  const Real a = std::exp(Real(q[0])), b = std::exp(Real(q[1]));
  Configuration cfg;
  cfg.set(ch.c, ch.n1, static_cast<double>(a));
  cfg.set(ch.c, ch.n2, static_cast<double>(b));
  cfg.set(ch.n1, ch.n2, static_cast<double>(std::sqrt(a * a + b * b - 2 * a * b * std::cos(Real(q[2])))));
  return cfg;
}

int orientation_of(const Positions& P, double scale) {
  const double a = (P.x[1] - P.x[0]) * (P.y[2] - P.y[0]) - (P.y[1] - P.y[0]) * (P.x[2] - P.x[0]);
  if (std::abs(a) <= 1e-9 * scale * scale) return 0;
  return a > 0 ? 1 : -1;
}

// Energy split into the rotational term and the three pair potentials, from
// the squared separations in (12, 23, 31) order. The moment of inertia uses
// Lagrange's identity (sum of m_i m_j d_ij^2 over the total mass).
//
// Squared separations come from the law of cosines in each chart rather than
// from differences of Cartesian coordinates: for a distant third body the
// latter cancel terms of order R^2 in every angular derivative, which swamps
// the tidal stiffness that decides the classification.
template <bool W>
std::array<Jet<W>, 4> energy_parts(const SystemParams& p, const std::array<Jet<W>, 3>& d2, double H) {
  using J = Jet<W>;
  const double M = p.m(0) + p.m(1) + p.m(2);
  J I = J::constant(p.spin_inertia);
  std::array<J, 4> parts;
  for (int a = 0; a < 3; ++a) {
    const int i = a, j = (a + 1) % 3;
    I = I + (p.m(i) * p.m(j) / M) * d2[a];
    parts[1 + a] = (-p.m(i) * p.m(j)) * jinvsqrt(d2[a]);
  }
  parts[0] = (0.5 * H * H) * jinv(I);
  return parts;
}

template <bool W>
Jet<W> energy_of(const std::array<Jet<W>, 4>& parts) {
  return parts[0] + parts[1] + parts[2] + parts[3];
}

// Entrywise magnitude of the Hessian terms, the scale of its rounding error.
Mat3 to_mat3(const std::array<std::array<Real, 3>, 3>& h) {
  Mat3 m{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) m[a][b] = static_cast<double>(h[a][b]);
  return m;
}

Mat3 hessian_magnitude(const std::array<Jet<true>, 4>& parts) {
  Mat3 m{};
  for (const auto& e : parts)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) m[a][b] += static_cast<double>(std::abs(e.h[a][b]));
  return m;
}

// Jacobi chart: the pair (i, j) at separation exp(q0) along x, centred on its
// own centre of mass; body k at distance exp(q1) from that centre, polar angle
// q2. Near hierarchical configurations this keeps the Hessian well scaled.
template <bool W>
std::array<Jet<W>, 4> jacobi_parts(const SystemParams& p, int i, int j, const std::array<double, 3>& q, double H) {
  using J = Jet<W>;
  const int k = third_body(i, j);
  const J a = jexp(J::variable(q[0], 0)), R = jexp(J::variable(q[1], 1)), ps = J::variable(q[2], 2);
  const double mi = p.m(i), mj = p.m(j), mu = mi + mj;
  // Signed offsets of i and j from their centre of mass along the pair axis.
  const J xi = (-mj / mu) * a, xj = (mi / mu) * a;
  const J c = jcos(ps);
  std::array<J, 3> d2;
  d2[pair_index(i, j)] = a * a;
  d2[pair_index(i, k)] = R * R + xi * xi - 2.0 * (R * xi * c);
  d2[pair_index(j, k)] = R * R + xj * xj - 2.0 * (R * xj * c);
  return energy_parts(p, d2, H);
}

template <bool W>
std::array<Jet<W>, 4> chart_parts(const SystemParams& p, const Chart& ch, const std::array<double, 3>& q, double H) {
  using J = Jet<W>;
  const J a = jexp(J::variable(q[0], 0)), b = jexp(J::variable(q[1], 1)), ph = J::variable(q[2], 2);
  std::array<J, 3> d2;
  d2[pair_index(ch.c, ch.n1)] = a * a;
  d2[pair_index(ch.c, ch.n2)] = b * b;
  d2[pair_index(ch.n1, ch.n2)] = a * a + b * b - 2.0 * (a * b * jcos(ph));
  return energy_parts(p, d2, H);
}

template <bool W>
Jet<W> chart_energy(const SystemParams& p, const Chart& ch, const std::array<double, 3>& q, double H) {
  return energy_of(chart_parts<W>(p, ch, q, H));
}

double scale_of(const SystemParams& p, const Configuration& cfg, double H) { return energy_scale(p, cfg, H); }

// A face of the feasible set: the chart, which coordinates are pinned at a
// contact, and the contacts that are active on it.
struct Face {
  Chart ch;
  std::array<bool, 3> fixed{false, false, false};
  ContactSet contacts;
};

double wrap(double phi) {
  phi = std::fmod(phi + kPi, 2.0 * kPi);
  if (phi < 0) phi += 2.0 * kPi;
  return phi - kPi;
}

bool feasible_on_face(const SystemParams& p, const Face& f, const Configuration& cfg) {
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    const double c = p.contact(i, j), d = cfg.dist(i, j);
    if (f.contacts.has(i, j)) {
      if (std::abs(d - c) > 1e-9 * c) return false;
    } else if (!(d > c * (1.0 + 1e-9))) {
      return false;
    }
  }
  return true;
}

std::optional<CriticalPoint> classify_point(const SystemParams& p, const Face& f, const std::array<double, 3>& q,
                                            double H, const Tolerances& tol) {
  const Positions P = positions(f.ch, q);
  const Configuration cfg = config_of(f.ch, q);
  if (!feasible_on_face(p, f, cfg)) return std::nullopt;
  const auto parts = chart_parts<true>(p, f.ch, q, H);
  const auto e = energy_of(parts);
  const double es = scale_of(p, cfg, H);
  CriticalPoint cp;
  cp.cfg = cfg;
  cp.contacts = f.contacts;
  cp.orientation = orientation_of(P, std::max({cfg.d[0], cfg.d[1], cfg.d[2]}));
  cp.energy = e.v;

  std::vector<int> fr;
  for (int i = 0; i < 3; ++i)
    if (!f.fixed[i]) fr.push_back(i);
  double gn = 0.0;
  for (int i : fr) gn = std::max(gn, static_cast<double>(std::abs(e.g[i])) / es);
  cp.grad_norm = gn;

  if (f.contacts.count() == 3) {
    // Resting triangle: gradient = sum of multipliers times constraint gradients.
    const auto d3 = [&]() {
      Jet<false> s1 = Jet<false>::variable(q[0], 0), s2 = Jet<false>::variable(q[1], 1),
                 ph = Jet<false>::variable(q[2], 2);
      const Jet<false> a = jexp(s1), b = jexp(s2);
      const Jet<false> dx = a - b * jcos(ph), dy = b * jsin(ph);
      return (dx * dx + dy * dy);
    }();
    const double d = std::sqrt(d3.v);
    Eigen::Matrix3d A;
    A << 1, 0, 0.5 * d3.g[0] / d, 0, 1, 0.5 * d3.g[1] / d, 0, 0, 0.5 * d3.g[2] / d;
    const Eigen::Vector3d rhs(e.g[0], e.g[1], e.g[2]);
    const Eigen::Vector3d lam = A.fullPivLu().solve(rhs);
    cp.multipliers = {lam[0] / es, lam[1] / es, lam[2] * d / es};
  } else {
    for (int i = 0; i < 3; ++i)
      if (f.fixed[i]) cp.multipliers.push_back(e.g[i] / es);
  }

  bool marg_diag = false;
  if (!fr.empty()) {
    // At a critical point Hessians in different charts are congruent, so the
    // classification may use whichever chart is better scaled.
    Mat3 hess = to_mat3(e.h), mag = hessian_magnitude(parts);
    if (f.contacts.count() <= 1) {
      int i = 0, j = 1;
      if (f.contacts.count() == 1) {
        i = f.ch.c;
        j = f.ch.n1;
      } else {
        double best = 1e300;
        for (int a = 0; a < 3; ++a) {
          const int b = (a + 1) % 3;
          if (cfg.dist(a, b) / p.contact(a, b) < best) {
            best = cfg.dist(a, b) / p.contact(a, b);
            i = a;
            j = b;
          }
        }
      }
      const int k = third_body(i, j);
      const double mu = p.m(i) + p.m(j);
      const double cx = (p.m(i) * P.x[i] + p.m(j) * P.x[j]) / mu, cy = (p.m(i) * P.y[i] + p.m(j) * P.y[j]) / mu;
      const double ax = P.x[j] - P.x[i], ay = P.y[j] - P.y[i];
      const double kx = P.x[k] - cx, ky = P.y[k] - cy;
      const std::array<double, 3> jq{std::log(std::hypot(ax, ay)), std::log(std::hypot(kx, ky)),
                                     std::atan2(ax * ky - ay * kx, ax * kx + ay * ky)};
      const auto jp = jacobi_parts<true>(p, i, j, jq, H);
      hess = to_mat3(energy_of(jp).h);
      mag = hessian_magnitude(jp);
    }
    Eigen::MatrixXd Hf(fr.size(), fr.size());
    for (std::size_t a = 0; a < fr.size(); ++a)
      for (std::size_t b = 0; b < fr.size(); ++b) Hf(a, b) = hess[fr[a]][fr[b]] / es;
    // Normalise by the diagonal (a congruence) so the margins do not depend on
    // coordinate scaling.
    bool degenerate = false;
    for (Eigen::Index a = 0; a < Hf.rows(); ++a)
      if (!(std::abs(Hf(a, a)) > kDiagonalFloor * mag[fr[a]][fr[a]] / es)) degenerate = true;
    if (degenerate) {
      marg_diag = true;
    } else {
      const Eigen::VectorXd inv = Hf.diagonal().cwiseAbs().cwiseSqrt().cwiseInverse();
      Hf = inv.asDiagonal() * Hf * inv.asDiagonal();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Hf, Eigen::EigenvaluesOnly);
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) cp.eigenvalues.push_back(eig.eigenvalues()[i]);
  }
  const double t = tol.definiteness;
  bool strict = !marg_diag, neg = false, marg = marg_diag;
  for (double m : cp.multipliers) {
    if (m < -t) neg = true;
    if (!(m > t)) strict = false;
    if (std::abs(m) <= 10 * t) marg = true;
  }
  for (double l : cp.eigenvalues) {
    if (l < -t) neg = true;
    if (!(l > t)) strict = false;
    if (std::abs(l) <= 10 * t) marg = true;
  }
  // A negative multiplier means the point is not a constrained critical point.
  if (neg && std::any_of(cp.multipliers.begin(), cp.multipliers.end(), [&](double m) { return m < -t; }))
    return std::nullopt;
  cp.minimum = strict && !neg;
  cp.marginal = marg;
  return cp;
}

// Damped Newton on the free coordinates of a face. Returns the converged
// chart coordinates.
std::optional<std::array<double, 3>> newton(const SystemParams& p, const Face& f, std::array<double, 3> q, double H) {
  std::vector<int> fr;
  for (int i = 0; i < 3; ++i)
    if (!f.fixed[i]) fr.push_back(i);
  auto gnorm = [&](const std::array<double, 3>& x, Jet<true>* out) {
    const auto e = chart_energy<true>(p, f.ch, x, H);
    const double es = scale_of(p, config_of(f.ch, x), H);
    double n = 0.0;
    for (int i : fr) n = std::max(n, static_cast<double>(std::abs(e.g[i])) / es);
    if (out) *out = e;
    return n;
  };
  if (fr.empty()) return q;
  Jet<true> e;
  double n = gnorm(q, &e);
  int stalled = 0;
  for (int it = 0; it < 100; ++it) {
    Eigen::MatrixXd Hf(fr.size(), fr.size());
    Eigen::VectorXd g(fr.size());
    for (std::size_t a = 0; a < fr.size(); ++a) {
      g[a] = e.g[fr[a]];
      for (std::size_t b = 0; b < fr.size(); ++b) Hf(a, b) = e.h[fr[a]][fr[b]];
    }
    // Equilibrate by the diagonal first: angular and radial stiffnesses of a
    // distant body differ by far more than 1/eps, and an unscaled pivoted
    // solve would drop the angular direction as rank deficient.
    Eigen::VectorXd sc = Hf.diagonal().cwiseAbs().cwiseSqrt();
    for (Eigen::Index a = 0; a < sc.size(); ++a)
      if (!(sc[a] > 0.0)) sc[a] = 1.0;
    const Eigen::VectorXd inv = sc.cwiseInverse();
    const Eigen::MatrixXd Hs = inv.asDiagonal() * Hf * inv.asDiagonal();
    Eigen::VectorXd step = inv.cwiseProduct(Hs.fullPivLu().solve(-inv.cwiseProduct(g)));
    if (!step.allFinite()) return std::nullopt;
    const double big = step.cwiseAbs().maxCoeff();
    // Converged only once the Newton correction itself is negligible: on
    // nearly flat directions a small gradient alone is not enough.
    if (n <= 1e-10 && big <= 1e-11) return q;
    // Far hierarchical states resolve their angle only to about eps R / a;
    // a correction that stays that small is the round-off floor, not drift.
    stalled = (n <= 1e-10 && big <= 1e-7) ? stalled + 1 : 0;
    if (stalled >= 8) return q;
    if (big > 0.5) step *= 0.5 / big;
    bool moved = false;
    for (int h = 0; h < 30; ++h) {
      std::array<double, 3> x = q;
      for (std::size_t a = 0; a < fr.size(); ++a) x[fr[a]] += step[a];
      x[2] = wrap(x[2]);
      Jet<true> ex;
      const double nx = gnorm(x, &ex);
      // Close to the root take full steps; round-off can stall the merit test.
      if (std::isfinite(nx) && (nx < n || (n <= 1e-10 && h == 0 && big <= 1e-3))) {
        q = x;
        e = ex;
        n = nx;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved) break;
  }
  return std::nullopt;
}

// Log-distance grid: half the nodes within a factor four of contact, the rest
// log-spaced out to dmax.
std::vector<double> distance_grid(double contact, double dmax, int n) {
  std::vector<double> s(n);
  const double lo = std::log(contact), mid = lo + std::log(4.0), hi = std::log(std::max(dmax, 8.0 * contact));
  const int n1 = n / 2;
  const double h1 = (mid - lo) / n1;
  for (int k = 0; k < n1; ++k) s[k] = lo + (k - 0.5) * h1;
  const int n2 = n - n1;
  for (int k = 0; k < n2; ++k) s[n1 + k] = mid + (hi - mid) * (k + 0.5) / n2;
  return s;
}

std::vector<double> angle_grid(int n) {
  std::vector<double> a(n);
  for (int k = 0; k < n; ++k) a[k] = -kPi + (k + 0.5) * 2.0 * kPi / n;
  return a;
}

double max_distance(const SystemParams& p, double H) {
  const double mmin = std::min({p.pair_mass(0, 1), p.pair_mass(1, 2), p.pair_mass(2, 0)});
  const double r = H / mmin;
  return 1.05 * std::max(2.0, r * r);
}

bool well_separated(const SystemParams& p, const Configuration& cfg) {
  const double cmin = std::min({p.contact(0, 1), p.contact(1, 2), p.contact(2, 0)});
  return cfg.d[0] > 0.5 * cmin && cfg.d[1] > 0.5 * cmin && cfg.d[2] > 0.5 * cmin;
}

// Same triangle within a relative tolerance. The difference of the two
// longest sides is compared against the shortest one as well: far
// hierarchical states that differ only in where the close pair sits
// (mirror-aligned, isosceles) agree in every side to far better than tol.
bool same_shape(const Configuration& a, const Configuration& b, double tol) {
  for (int i = 0; i < 3; ++i)
    if (std::abs(a.d[i] - b.d[i]) > tol * b.d[i]) return false;
  std::array<int, 3> o{0, 1, 2};
  std::sort(o.begin(), o.end(), [&](int x, int y) { return b.d[x] < b.d[y]; });
  const double da = a.d[o[2]] - a.d[o[1]], db = b.d[o[2]] - b.d[o[1]];
  return std::abs(da - db) <= tol * b.d[o[0]];
}

struct Collector {
  const SystemParams& p;
  double H;
  const Tolerances& tol;
  ScanReport& rep;

  void node(const Configuration& cfg, double E) {
    ++rep.nodes_evaluated;
    if (!is_feasible(p, cfg) || !std::isfinite(E)) return;
    if (rep.nodes_evaluated == 1 || E < rep.global_min_energy) {
      rep.global_min_energy = E;
      rep.global_min_cfg = cfg;
    }
  }

  void add(const Face& f, const std::array<double, 3>& seed) {
    auto q = newton(p, f, seed, H);
    if (!q) return;
    auto cp = classify_point(p, f, *q, H, tol);
    if (!cp) return;
    for (const auto& o : rep.points) {
      if (!(o.contacts == cp->contacts) || o.orientation != cp->orientation) continue;
      if (same_shape(cp->cfg, o.cfg, 1e-7)) return;
    }
    rep.points.push_back(*cp);
  }
};

bool straddles(const double* v, int n) {
  double lo = v[0], hi = v[0];
  for (int i = 1; i < n; ++i) {
    lo = std::min(lo, v[i]);
    hi = std::max(hi, v[i]);
  }
  return lo <= 0.0 && hi >= 0.0;
}

void scan_resting(Collector& col) {
  const SystemParams& p = col.p;
  Face f;
  f.ch = {0, 1, 2};
  f.fixed = {true, true, true};
  for (int i = 0; i < 3; ++i) f.contacts.add(i, (i + 1) % 3);
  const double a = p.contact(0, 1), b = p.contact(0, 2), c = p.contact(1, 2);
  const double phi = std::acos(std::clamp((a * a + b * b - c * c) / (2 * a * b), -1.0, 1.0));
  for (double s : {1.0, -1.0}) {
    const std::array<double, 3> q{std::log(a), std::log(b), s * phi};
    const auto cfg = config_of(f.ch, q);
    col.node(cfg, chart_energy<false>(p, f.ch, q, col.H).v);
    if (auto cp = classify_point(p, f, q, col.H, col.tol)) col.rep.points.push_back(*cp);
  }
}

void scan_edges(Collector& col, int n) {
  const SystemParams& p = col.p;
  const auto phis = angle_grid(n);
  for (int c = 0; c < 3; ++c) {
    Face f;
    f.ch = {c, (c + 1) % 3, (c + 2) % 3};
    f.fixed = {true, true, false};
    f.contacts.add(c, f.ch.n1);
    f.contacts.add(c, f.ch.n2);
    const double s1 = std::log(p.contact(c, f.ch.n1)), s2 = std::log(p.contact(c, f.ch.n2));
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k) {
      const std::array<double, 3> q{s1, s2, phis[k]};
      const auto e = chart_energy<false>(p, f.ch, q, col.H);
      col.node(config_of(f.ch, q), e.v);
      g[k] = e.g[2];
    }
    auto dphi = [&](double ph) { return chart_energy<false>(p, f.ch, {s1, s2, ph}, col.H).g[2]; };
    for (int k = 0; k < n; ++k) {
      const int k2 = (k + 1) % n;
      if ((g[k] > 0) == (g[k2] > 0) && g[k] != 0.0) continue;
      const double a = phis[k], b = k2 == 0 ? phis[0] + 2 * kPi : phis[k2];
      const auto r = roots::bracketed(dphi, a, b);
      if (!r) continue;
      col.add(f, {s1, s2, wrap(*r)});
    }
  }
}

void scan_faces(Collector& col, int ns, int na, double dmax) {
  const SystemParams& p = col.p;
  const auto phis = angle_grid(na);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (i == j || (j != (i + 1) % 3)) continue;  // each unordered pair once
      const int k = third_body(i, j);
      Face f;
      f.ch = {i, j, k};
      f.fixed = {true, false, false};
      f.contacts.add(i, j);
      const double s1 = std::log(p.contact(i, j));
      const auto s2g = distance_grid(p.contact(i, k), dmax, ns);
      std::vector<std::array<double, 2>> g(static_cast<std::size_t>(ns) * na);
      std::vector<char> ok(g.size(), 0);
      for (int a = 0; a < ns; ++a)
        for (int b = 0; b < na; ++b) {
          const std::array<double, 3> q{s1, s2g[a], phis[b]};
          const auto cfg = config_of(f.ch, q);
          const std::size_t id = static_cast<std::size_t>(a) * na + b;
          if (!well_separated(p, cfg)) continue;
          const auto e = chart_energy<false>(p, f.ch, q, col.H);
          col.node(cfg, e.v);
          g[id] = {static_cast<double>(e.g[1]), static_cast<double>(e.g[2])};
          ok[id] = 1;
        }
      for (int a = 0; a + 1 < ns; ++a)
        for (int b = 0; b < na; ++b) {
          const int b2 = (b + 1) % na;
          const std::size_t ids[4] = {static_cast<std::size_t>(a) * na + b, static_cast<std::size_t>(a + 1) * na + b,
                                      static_cast<std::size_t>(a) * na + b2,
                                      static_cast<std::size_t>(a + 1) * na + b2};
          if (!(ok[ids[0]] && ok[ids[1]] && ok[ids[2]] && ok[ids[3]])) continue;
          double c0[4], c1[4];
          for (int t = 0; t < 4; ++t) {
            c0[t] = g[ids[t]][0];
            c1[t] = g[ids[t]][1];
          }
          if (!straddles(c0, 4) || !straddles(c1, 4)) continue;
          const double phc = b2 == 0 ? wrap(phis[b] + kPi / na) : 0.5 * (phis[b] + phis[b2]);
          col.add(f, {s1, 0.5 * (s2g[a] + s2g[a + 1]), phc});
        }
    }
  }
}

void scan_interior(Collector& col, int n, double dmax) {
  const SystemParams& p = col.p;
  Face f;
  f.ch = {0, 1, 2};
  const auto s1g = distance_grid(p.contact(0, 1), dmax, n);
  const auto s2g = distance_grid(p.contact(0, 2), dmax, n);
  const auto phis = angle_grid(n);
  const std::size_t N = static_cast<std::size_t>(n);
  std::vector<std::array<double, 3>> g(N * N * N);
  std::vector<char> ok(g.size(), 0);
  auto id = [&](int a, int b, int c) { return (static_cast<std::size_t>(a) * N + b) * N + c; };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        const std::array<double, 3> q{s1g[a], s2g[b], phis[c]};
        const auto cfg = config_of(f.ch, q);
        if (!well_separated(p, cfg)) continue;
        const auto e = chart_energy<false>(p, f.ch, q, col.H);
        col.node(cfg, e.v);
        for (int t = 0; t < 3; ++t) g[id(a, b, c)][t] = static_cast<double>(e.g[t]);
        ok[id(a, b, c)] = 1;
      }
  for (int a = 0; a + 1 < n; ++a)
    for (int b = 0; b + 1 < n; ++b)
      for (int c = 0; c < n; ++c) {
        const int c2 = (c + 1) % n;
        std::size_t ids[8];
        int t = 0;
        for (int da = 0; da < 2; ++da)
          for (int db = 0; db < 2; ++db)
            for (int cc : {c, c2}) ids[t++] = id(a + da, b + db, cc);
        bool all = true;
        for (auto x : ids) all = all && ok[x];
        if (!all) continue;
        bool cand = true;
        for (int comp = 0; comp < 3 && cand; ++comp) {
          double v[8];
          for (int u = 0; u < 8; ++u) v[u] = g[ids[u]][comp];
          cand = straddles(v, 8);
        }
        if (!cand) continue;
        const double phc = c2 == 0 ? wrap(phis[c] + kPi / n) : 0.5 * (phis[c] + phis[c2]);
        col.add(f, {0.5 * (s1g[a] + s1g[a + 1]), 0.5 * (s2g[b] + s2g[b + 1]), phc});
      }
}

}  // namespace

double cartesian_energy(const SystemParams& p, const Configuration& cfg, double H) {
  // Place the bodies in the plane and evaluate about the centre of mass.
  const double a = cfg.dist(0, 1), b = cfg.dist(0, 2), c = cfg.dist(1, 2);
  const double phi = std::acos(std::clamp((a * a + b * b - c * c) / (2 * a * b), -1.0, 1.0));
  const double x[3] = {0.0, a, b * std::cos(phi)}, y[3] = {0.0, 0.0, b * std::sin(phi)};
  double M = 0.0, X = 0.0, Y = 0.0;
  for (int i = 0; i < 3; ++i) {
    M += p.m(i);
    X += p.m(i) * x[i];
    Y += p.m(i) * y[i];
  }
  X /= M;
  Y /= M;
  double I = p.spin_inertia, U = 0.0;
  for (int i = 0; i < 3; ++i) {
    I += p.m(i) * ((x[i] - X) * (x[i] - X) + (y[i] - Y) * (y[i] - Y));
    const int j = (i + 1) % 3;
    U -= p.m(i) * p.m(j) / std::hypot(x[i] - x[j], y[i] - y[j]);
  }
  return 0.5 * H * H / I + U;
}

ScanReport scan(const SystemParams& p, double H, int res, const Tolerances& tol) {
  if (res < 16) throw InvalidInput("scan resolution must be at least 16");
  if (H < 0.0) throw InvalidInput("H must be nonnegative");
  ScanReport rep;
  rep.res = res;
  rep.H = H;
  Collector col{p, H, tol, rep};
  const double dmax = max_distance(p, H);
  scan_resting(col);
  scan_edges(col, 64 * res);
  scan_faces(col, 4 * res, 4 * res, dmax);
  scan_interior(col, res, dmax);
  for (const auto& cp : rep.points)
    if (cp.minimum && (!rep.global_min || cp.energy < rep.global_min->energy)) rep.global_min = cp;
  return rep;
}

void match(ScanReport& rep, const std::vector<EquilibriumRecord>& records, double rel_tol) {
  rep.matches.clear();
  rep.unmatched_records.clear();
  rep.unmatched_points.clear();
  rep.verdict_mismatches.clear();
  rep.marginal_skipped = 0;
  std::vector<bool> used(rep.points.size(), false);
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    std::optional<std::size_t> hit;
    for (std::size_t k = 0; k < rep.points.size() && !hit; ++k) {
      const auto& cp = rep.points[k];
      if (used[k] || !(cp.contacts == rec.contacts) || cp.orientation != rec.orientation()) continue;
      if (same_shape(cp.cfg, rec.cfg, rel_tol)) hit = k;
    }
    if (!hit) {
      rep.unmatched_records.push_back(r);
      continue;
    }
    used[*hit] = true;
    rep.matches.push_back({r, *hit});
    const auto& cp = rep.points[*hit];
    if (rec.verdict == Verdict::marginal || cp.marginal) {
      ++rep.marginal_skipped;
      continue;
    }
    if ((rec.verdict == Verdict::stable) != cp.minimum) rep.verdict_mismatches.push_back(r);
  }
  for (std::size_t k = 0; k < rep.points.size(); ++k)
    if (!used[k]) rep.unmatched_points.push_back(k);
}

std::optional<CriticalPoint> refine(const SystemParams& p, double H, const Configuration& seed, int orientation,
                                    const Tolerances& tol, double face_tol) {
  ContactSet act;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    if (std::abs(seed.dist(i, j) - p.contact(i, j)) <= face_tol * p.contact(i, j)) act.add(i, j);
  }
  Face f;
  f.contacts = act;
  int c = 0, n1 = 1, n2 = 2;
  if (act.count() == 2) {
    for (int b = 0; b < 3; ++b) {
      const int o1 = (b + 1) % 3, o2 = (b + 2) % 3;
      if (act.has(b, o1) && act.has(b, o2)) c = b;
    }
    n1 = (c + 1) % 3;
    n2 = (c + 2) % 3;
    f.fixed = {true, true, false};
  } else if (act.count() == 1) {
    for (int i = 0; i < 3; ++i)
      if (act.has(i, (i + 1) % 3)) {
        c = i;
        n1 = (i + 1) % 3;
      }
    n2 = third_body(c, n1);
    f.fixed = {true, false, false};
  } else if (act.count() == 3) {
    f.fixed = {true, true, true};
  }
  f.ch = {c, n1, n2};
  const double a = seed.dist(c, n1), b = seed.dist(c, n2), d = seed.dist(n1, n2);
  double phi = std::acos(std::clamp((a * a + b * b - d * d) / (2 * a * b), -1.0, 1.0));
  const int sgn = orientation * f.ch.parity();
  if (sgn < 0) phi = -phi;
  std::array<double, 3> q{std::log(a), std::log(b), phi};
  if (f.fixed[0]) q[0] = std::log(p.contact(c, n1));
  if (f.fixed[1]) q[1] = std::log(p.contact(c, n2));
  if (act.count() == 3) {
    const double A = p.contact(c, n1), B = p.contact(c, n2), C = p.contact(n1, n2);
    q[2] = (sgn < 0 ? -1.0 : 1.0) * std::acos(std::clamp((A * A + B * B - C * C) / (2 * A * B), -1.0, 1.0));
  }
  auto x = newton(p, f, q, H);
  if (!x) return std::nullopt;
  return classify_point(p, f, *x, H, tol);
}

DescentResult descend(const SystemParams& p, double H, const Configuration& seed, int max_iter) {
  const Chart ch{0, 1, 2};
  const double a = seed.dist(0, 1), b = seed.dist(0, 2), d = seed.dist(1, 2);
  std::array<double, 3> q{std::log(a), std::log(b),
                          std::acos(std::clamp((a * a + b * b - d * d) / (2 * a * b), -1.0, 1.0))};
  const double lo1 = std::log(p.contact(0, 1)), lo2 = std::log(p.contact(0, 2));
  auto feasible = [&](const std::array<double, 3>& x) { return is_feasible(p, config_of(ch, x)); };
  DescentResult out;
  double step = 0.1;
  auto e = chart_energy<false>(p, ch, q, H);
  for (int it = 0; it < max_iter; ++it) {
    out.iterations = it + 1;
    std::array<double, 3> g{static_cast<double>(e.g[0]), static_cast<double>(e.g[1]), static_cast<double>(e.g[2])};
    // Project out gradient components pushing into active bounds.
    if (q[0] <= lo1 + 1e-15 && g[0] > 0) g[0] = 0.0;
    if (q[1] <= lo2 + 1e-15 && g[1] > 0) g[1] = 0.0;
    const double gn = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
    if (gn <= 1e-12 * std::abs(e.v)) {
      out.converged = true;
      break;
    }
    bool moved = false;
    for (int h = 0; h < 60; ++h) {
      std::array<double, 3> x{std::max(lo1, q[0] - step * g[0]), std::max(lo2, q[1] - step * g[1]),
                              wrap(q[2] - step * g[2])};
      if (feasible(x)) {
        const auto ex = chart_energy<false>(p, ch, x, H);
        if (ex.v < e.v) {
          q = x;
          e = ex;
          moved = true;
          step *= 1.5;
          break;
        }
      }
      step *= 0.5;
    }
    if (!moved) {
      out.converged = true;
      break;
    }
  }
  out.cfg = config_of(ch, q);
  out.contacts = active_contacts(p, out.cfg, 1e-6);
  out.energy = e.v;
  return out;
}

}  // namespace f3bp::oracle
