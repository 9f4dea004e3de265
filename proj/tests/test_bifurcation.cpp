#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "f3bp/bifurcation.hpp"

using namespace f3bp;

namespace {

const SweepResult& generic_sweep() {
  static const SweepResult s = sweep(SystemParams::from_radii({0.4, 0.35, 0.25}));
  return s;
}

bool has_participant(const BifurcationEvent& e, const std::string& family) {
  return std::any_of(e.participants.begin(), e.participants.end(),
                     [&](const Endpoint& x) { return x.key.name() == family; });
}

const BifurcationEvent* find_event(const SweepResult& s, const std::string& a, const std::string& b) {
  for (const auto& e : s.events)
    if (has_participant(e, a) && has_participant(e, b)) return &e;
  return nullptr;
}

}  // namespace

TEST_CASE("census over the default range") {
  const auto labels = generic_sweep().labels();
  CHECK(labels.size() == 28);
  std::map<std::string, int> per_tag;
  for (const auto& l : labels) ++per_tag[l.substr(0, 2)];
  CHECK(per_tag["LR"] == 2);
  CHECK(per_tag["ER"] == 3);
  CHECK(per_tag["TR"] == 6);
  CHECK(per_tag["EA"] == 6);
  CHECK(per_tag["IS"] == 6);
  CHECK(per_tag["LO"] == 2);
  CHECK(per_tag["EO"] == 3);
}

TEST_CASE("a stable state exists at every sample") {
  const auto& s = generic_sweep();
  REQUIRE(!s.stable_count.empty());
  CHECK(*std::min_element(s.stable_count.begin(), s.stable_count.end()) >= 1);
}

TEST_CASE("resting triangle ends together with the TR132 inner branch") {
  const auto* e = find_event(generic_sweep(), "LR/single", "TR132/inner");
  REQUIRE(e);
  CHECK(e->kind == EventKind::termination_fission);
  CHECK(e->released_contact == "12");
  CHECK(e->H == doctest::Approx(LR_termination_H(SystemParams::from_radii({0.4, 0.35, 0.25}))).epsilon(1e-9));
}

TEST_CASE("transitional branches end on isosceles branches") {
  const auto& s = generic_sweep();
  CHECK(find_event(s, "TR123/inner", "IS23-1/inner"));
  CHECK(find_event(s, "TR312/inner", "IS31-2/inner"));
}

TEST_CASE("EA23-1 pairs only with EO132") {
  const auto g = diagram_assembly(generic_sweep());
  bool found = false;
  for (const auto& pw : g.pathways)
    if (std::find(pw.begin(), pw.end(), "EA23-1") != pw.end()) {
      found = true;
      CHECK(pw == std::vector<std::string>{"EA23-1", "EO132"});
    }
  CHECK(found);
}

TEST_CASE("symmetric bifurcations spawn mirror pairs from resting lines") {
  const auto& s = generic_sweep();
  int symmetric = 0;
  for (const auto& e : s.events) {
    if (e.kind != EventKind::symmetric_bifurcation) continue;
    ++symmetric;
    CHECK(e.participants.size() == 3);
  }
  CHECK(symmetric == 3);
}

TEST_CASE("diagram matches one template per pathway family") {
  const auto g = diagram_assembly(generic_sweep());
  REQUIRE(g.templates.size() == 4);
  std::set<std::string> roots;
  for (const auto& t : g.templates) roots.insert(t.substr(0, 4));
  CHECK(roots == std::set<std::string>{"bif1", "bif2", "bif3", "bif4"});
  CHECK(!g.nodes.empty());
  CHECK(!g.edges.empty());
}

// With equal masses every partner of the resting triangle meets it at once, so
// the event is a single degenerate cluster rather than a two-family fission.
TEST_CASE("equal masses: resting triangle termination by event detection") {
  const auto s = sweep(SystemParams::from_radii({1, 1, 1}), {0.2, 0.5, 200});
  const double closed = 26.0 / 135.0 * std::pow(1.5, 1.5);
  bool found = false;
  for (const auto& e : s.events)
    if (has_participant(e, "LR/single")) {
      found = true;
      CHECK(std::abs(e.H - closed) <= 1e-6);
    }
  CHECK(found);
}

TEST_CASE("sign law along the traced branches") {
  const auto p = SystemParams::from_radii({0.4, 0.35, 0.25});
  std::size_t checked = 0;
  for (const auto& b : generic_sweep().branches) {
    const auto samples = family_samples(p, b);
    if (samples.size() < 3) continue;
    const auto r = family_sign_test(samples);
    CHECK_MESSAGE(r.ok(), b.key.name());
    checked += r.checked;
  }
  CHECK(checked > 1000);
}

TEST_CASE("invalid ranges are rejected") {
  const auto p = SystemParams::from_radii({1, 1, 1});
  CHECK_THROWS_AS(sweep(p, {-1.0, 1.0}), InvalidInput);
  CHECK_THROWS_AS(sweep(p, {1.0, 1.0}), InvalidInput);
}
