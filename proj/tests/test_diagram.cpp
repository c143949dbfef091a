#include <doctest.h>

#include <cmath>

#include "pdbayes/diagram.hpp"
#include "pdbayes/error.hpp"
#include "pdbayes/format.hpp"
#include "pdbayes/random.hpp"
#include "test_support.hpp"

using namespace pdbayes;

namespace {

PersistenceDiagram birth_death(const std::vector<std::tuple<double, double, int>>& rows) {
  PersistenceDiagram d;
  d.frame = Frame::BirthDeath;
  for (const auto& [b, e, k] : rows) d.features.push_back({Vector2d(b, e), k});
  return d;
}

PersistenceDiagram random_birth_death(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  PersistenceDiagram d;
  d.frame = Frame::BirthDeath;
  for (std::size_t i = 0; i < n; ++i) {
    const double b = rng.uniform(0, 5);
    d.features.push_back({Vector2d(b, b + rng.exponential()), static_cast<int>(rng.below(3))});
  }
  return d;
}

}  // namespace

TEST_SUITE("diagram") {

TEST_CASE("tilt examples") {
  const auto t = tilt(birth_death({{1, 1, 0}, {0.2, 0.5, 1}}));
  CHECK(t.frame == Frame::Tilted);
  CHECK(t.features[0].point == Vector2d(1, 0));
  CHECK(t.features[0].dim == 0);
  CHECK(t.features[1].point(0) == 0.2);
  CHECK(t.features[1].point(1) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(t.features[1].dim == 1);
}

TEST_CASE("untilt examples") {
  const auto u = untilt(testing::tilted_diagram({{1, 0}, {0.2, 0.3}}));
  CHECK(u.features[0].point == Vector2d(1, 1));
  CHECK(u.features[1].point == Vector2d(0.2, 0.5));
}

TEST_CASE("tilt rejects death before birth") {
  CHECK_THROWS_AS(tilt(birth_death({{1, 0.5, 1}})), ValidationError);
  CHECK_THROWS_AS(tilt(birth_death({{-0.1, 0.5, 1}})), ValidationError);
  CHECK_THROWS_AS(tilt(birth_death({{0.1, 0.5, 3}})), ValidationError);
}

TEST_CASE("untilt of tilt is exact") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = random_birth_death(100, seed);
    const auto back = untilt(tilt(d));
    REQUIRE(back.size() == d.size());
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(back.features[i] == d.features[i]);
  }
}

TEST_CASE("tilt of untilt is exact on tilted images") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto t = tilt(random_birth_death(100, seed + 100));
    const auto again = tilt(untilt(t));
    for (std::size_t i = 0; i < t.size(); ++i) CHECK(again.features[i] == t.features[i]);
  }
}

TEST_CASE("restriction partitions by dimension") {
  const auto d = tilt(random_birth_death(60, 3));
  std::size_t total = 0;
  for (int k = 0; k <= 2; ++k) {
    const auto dk = d.restrict_to(k);
    for (const auto& f : dk.features) CHECK(f.dim == k);
    total += dk.size();
  }
  CHECK(total == d.size());
}

TEST_CASE("csv parsing") {
  const auto one = parse_diagram_csv("0.0,1.5,0\n");
  REQUIRE(one.size() == 1);
  CHECK(one.frame == Frame::BirthDeath);
  CHECK(one.features[0].point == Vector2d(0, 1.5));
  CHECK(one.features[0].dim == 0);

  CHECK(parse_diagram_csv("birth,death,dim\n").empty());
  CHECK(parse_diagram_csv("").empty());

  const auto essential = parse_diagram_csv("birth,death,dim\n0,inf,0\n0,1,0\n");
  CHECK(essential.size() == 1);
  CHECK(essential.dropped_essential == 1);
}

TEST_CASE("csv errors carry the line") {
  try {
    parse_diagram_csv("birth,death,dim\n0,1,0\n0,1\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse_diagram_csv("0,abc,1\n"), ParseError);
  CHECK_THROWS_AS(parse_diagram_csv("birth,death,dim\n2,1,1\n"), ValidationError);
}

TEST_CASE("file round trip is bit exact") {
  const auto dir = testing::scratch_dir("diagram");
  auto d = birth_death({{0.1, 0.30000000000000004, 1}, {1.0 / 3.0, 2.0 / 3.0, 0}, {1e-300, 1.7976931348623157e308, 2}});
  for (const auto* name : {"d.csv", "d.json"}) {
    write_diagram(d, dir / name);
    const auto back = read_diagram(dir / name);
    REQUIRE(back.size() == d.size());
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(back.features[i] == d.features[i]);
    CHECK(same_multiset(back, d));
  }
  const auto random = random_birth_death(200, 11);
  write_diagram(random, dir / "r.csv");
  CHECK(same_multiset(read_diagram(dir / "r.csv"), random));
}

TEST_CASE("tilted diagrams are written in birth-death form") {
  const auto dir = testing::scratch_dir("diagram_tilted");
  const auto bd = birth_death({{0.25, 1.5, 1}});
  write_diagram(tilt(bd), dir / "t.csv");
  CHECK(read_text_file(dir / "t.csv") == "birth,death,dim\n0.25,1.5,1\n");
  CHECK(load_tilted(dir / "t.csv", 1).features[0].point == Vector2d(0.25, 1.25));
}

TEST_CASE("json parsing") {
  const auto d = parse_diagram_json(R"([{"birth": 0, "death": 2, "dim": 1}])");
  REQUIRE(d.size() == 1);
  CHECK(d.features[0].point == Vector2d(0, 2));
  CHECK_THROWS(parse_diagram_json(R"([{"birth": 0, "dim": 1}])"));
  CHECK_THROWS(parse_diagram_json("[{"));
}

TEST_CASE("multiset semantics") {
  const auto a = testing::tilted_diagram({{1, 1}, {1, 1}, {0, 2}});
  const auto b = testing::tilted_diagram({{0, 2}, {1, 1}, {1, 1}});
  const auto c = testing::tilted_diagram({{0, 2}, {1, 1}});
  CHECK(same_multiset(a, b));
  CHECK_FALSE(same_multiset(a, c));
}

}
