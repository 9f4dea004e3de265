#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "f3bp/equilibria.hpp"
#include "f3bp/stability.hpp"

using namespace f3bp;

namespace {

double det3(const std::vector<std::vector<double>>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace

TEST_CASE("closed-form eigenvalues solve the characteristic equation") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int n = 0; n < 500; ++n) {
    std::vector<std::vector<double>> m(3, std::vector<double>(3));
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) m[i][j] = m[j][i] = u(rng);
    const auto e = symmetric_eigenvalues(m);
    REQUIRE(e.size() == 3);
    CHECK(e[0] <= e[1]);
    CHECK(e[1] <= e[2]);
    CHECK(e[0] + e[1] + e[2] == doctest::Approx(m[0][0] + m[1][1] + m[2][2]).epsilon(1e-12));
    CHECK(e[0] * e[1] * e[2] == doctest::Approx(det3(m)).epsilon(1e-9));
    for (double l : e) {
      auto s = m;
      for (int i = 0; i < 3; ++i) s[i][i] -= l;
      CHECK(std::abs(det3(s)) < 1e-10);
    }
  }
  CHECK(symmetric_eigenvalues({{2.0}}) == std::vector<double>{2.0});
  const auto two = symmetric_eigenvalues({{2.0, 1.0}, {1.0, 2.0}});
  CHECK(two[0] == doctest::Approx(1.0));
  CHECK(two[1] == doctest::Approx(3.0));
}

TEST_CASE("leading minors") {
  const auto m = leading_minors({{2.0, 1.0, 0.0}, {1.0, 2.0, 1.0}, {0.0, 1.0, 2.0}});
  REQUIRE(m.size() == 3);
  CHECK(m[0] == doctest::Approx(2.0));
  CHECK(m[1] == doctest::Approx(3.0));
  CHECK(m[2] == doctest::Approx(4.0));
}

TEST_CASE("resting triangle at zero spin is a strict minimum") {
  const auto p = SystemParams::from_radii({0.4, 0.35, 0.25});
  Configuration c;
  c.d = {0.75, 0.6, 0.65};
  const auto cert = certify(p, ChartPoint::from_distances(c, {true, true, true}), 0.0);
  CHECK(cert.verdict == Verdict::stable);
  CHECK(cert.constrained_values.size() == 3);
  for (double v : cert.constrained_values) CHECK(v > 0);
}

TEST_CASE("a point off equilibrium is refused") {
  const auto p = SystemParams::from_radii({0.4, 0.35, 0.25});
  const AngleChart a{{0, 1, 2}, 1.0, 1.2, 2.0};
  CHECK_THROWS_AS(certify(p, ChartPoint::from_angle(a, {false, false, false}), 0.3), NotAnEquilibrium);
}

TEST_CASE("collinear points need the angle chart") {
  const auto p = SystemParams::from_radii({0.4, 0.35, 0.25});
  Configuration c;
  c.d = {0.75, 0.6, 1.35};
  CHECK_THROWS_AS(certify(p, ChartPoint::from_distances(c, {true, true, false}), 0.1), UnsupportedChart);
}

TEST_CASE("resting line: unstable below, stable above the stabilisation threshold") {
  const auto p = SystemParams::from_radii({1, 1, 1});
  const Ordering o{0, 1, 2};
  const AngleChart a{o, 2.0 / 3, 2.0 / 3, std::numbers::pi};
  const double Hs = ER_stabilization_H(p, o);
  const auto lo = certify(p, ChartPoint::from_angle(a, {true, true, false}), 0.9 * Hs);
  const auto hi = certify(p, ChartPoint::from_angle(a, {true, true, false}), std::min(1.05 * Hs, ER_existence_H(p, o)));
  CHECK(lo.verdict == Verdict::unstable);
  CHECK(hi.verdict == Verdict::stable);
  CHECK(lo.free_names == std::vector<std::string>{"theta31"});
}

TEST_CASE("verdict does not depend on the coordinate scaling of the free block") {
  // Far aligned states have angular stiffness far below the energy scale.
  const auto p = SystemParams::from_radii({0.4, 0.35, 0.25});
  const auto rec = solve_EA(p, 0, 1, Branch::outer, 10.0);
  REQUIRE(rec);
  CHECK(rec->verdict == Verdict::stable);
  CHECK(std::abs(rec->cert.free_block[1][1]) < 1e-9);
  for (double e : rec->cert.eigenvalues) CHECK(e > 0.5);
}

TEST_CASE("sign test needs three samples") {
  std::vector<FamilySample> s(2);
  CHECK_THROWS_AS(family_sign_test(s), InsufficientData);
}
