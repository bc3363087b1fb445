#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "support.hpp"

using namespace avgop;
using testsupport::make_s3;

TEST_CASE("space construction and validation") {
  SECTION("three points on a line") {
    const auto space = MetricMeasureSpace::from_points({{0.0}, {1.0}, {2.0}}, {1.0, 1.0, 1.0});
    REQUIRE(space.size() == 3);
    REQUIRE(space.total_mass() == Catch::Approx(3.0));
    REQUIRE(space.distance(0, 2) == Catch::Approx(2.0));
  }

  SECTION("weights default to one") {
    const auto space = MetricMeasureSpace::from_points({{0.0}, {1.0}});
    REQUIRE(space.weight(0) == 1.0);
    REQUIRE(space.total_mass() == 2.0);
  }

  SECTION("zero weight is rejected with its index") {
    try {
      MetricMeasureSpace::from_points({{0.0}, {1.0}, {2.0}}, {1.0, 1.0, 0.0});
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      REQUIRE(std::string(e.what()).find("nonpositive weight at index 2") != std::string::npos);
      REQUIRE(e.field() == "weights[2]");
    }
  }

  SECTION("asymmetric matrix is rejected") {
    REQUIRE_THROWS_AS(
        MetricMeasureSpace::from_matrix({{0.0, 1.0}, {2.0, 0.0}}),
        ValidationError);
  }

  SECTION("negative matrix entry is rejected") {
    REQUIRE_THROWS_AS(
        MetricMeasureSpace::from_matrix({{0.0, -1.0}, {-1.0, 0.0}}),
        ValidationError);
  }

  SECTION("nonzero diagonal is rejected") {
    REQUIRE_THROWS_AS(
        MetricMeasureSpace::from_matrix({{0.5, 1.0}, {1.0, 0.0}}),
        ValidationError);
  }

  SECTION("ragged coordinate rows are rejected") {
    REQUIRE_THROWS_AS(MetricMeasureSpace::from_points({{0.0, 0.0}, {1.0}}), ValidationError);
  }

  SECTION("weight length mismatch is rejected") {
    REQUIRE_THROWS_AS(MetricMeasureSpace::from_points({{0.0}, {1.0}}, {1.0}), ValidationError);
  }
}

TEST_CASE("closed balls") {
  const auto s3 = make_s3();

  REQUIRE(ball(s3, 1, 1.0).members == std::vector<int>{0, 1, 2});
  REQUIRE(ball(s3, 1, 1.0).mass == Catch::Approx(3.0));
  REQUIRE(ball(s3, 0, 0.0).members == std::vector<int>{0});
  REQUIRE(ball(s3, 0, 0.0).mass == Catch::Approx(1.0));
  REQUIRE(ball(s3, 0, 1.0).members == std::vector<int>{0, 1});

  SECTION("negative radius throws") { REQUIRE_THROWS_AS(ball(s3, 0, -0.1), std::invalid_argument); }

  SECTION("boundary points are kept") {
    // distance exactly equal to the radius stays inside
    const auto space = MetricMeasureSpace::from_points({{0.0}, {0.3}});
    REQUIRE(ball(space, 0, 0.3).members == std::vector<int>{0, 1});
  }
}

TEST_CASE("annuli") {
  const auto s3 = make_s3();

  REQUIRE(annulus(s3, 1, 1.0, 0.5).members == std::vector<int>{0, 2});
  REQUIRE(annulus(s3, 1, 1.0, 0.5).mass == Catch::Approx(2.0));
  REQUIRE(annulus(s3, 0, 0.4, 0.2).empty());
  REQUIRE(annulus(s3, 1, 2.0, 0.5).empty());

  REQUIRE_THROWS_AS(annulus(s3, 0, 1.0, 0.0), std::invalid_argument);
  REQUIRE_THROWS_AS(annulus(s3, 0, 1.0, 1.0), std::invalid_argument);
  REQUIRE_THROWS_AS(annulus(s3, 0, 1.0, -0.2), std::invalid_argument);
}

TEST_CASE("symmetric differences") {
  const auto s3 = make_s3();

  REQUIRE(sym_diff(s3, 0, 1, 1.0).members == std::vector<int>{2});
  REQUIRE(sym_diff(s3, 0, 0, 1.0).empty());
  REQUIRE(sym_diff(s3, 0, 2, 1.0).members == std::vector<int>{0, 2});
  REQUIRE(sym_diff(s3, 0, 2, 1.0).mass == Catch::Approx(2.0));
}

TEST_CASE("greedy nets") {
  const auto s3 = make_s3();

  REQUIRE(greedy_net(s3, full_set(s3), 1.0) == std::vector<int>{0, 2});
  REQUIRE(greedy_net(s3, full_set(s3), 2.0) == std::vector<int>{0});
  REQUIRE(greedy_net(s3, make_index_set(s3, {1}), 0.1) == std::vector<int>{1});
  REQUIRE_THROWS_AS(greedy_net(s3, IndexSet{}, 1.0), std::invalid_argument);
}

TEST_CASE("greedy packings") {
  const auto s3 = make_s3();
  const auto grid = line_grid(101);

  std::vector<int> expected;
  for (int i = 0; i <= 100; i += 5) expected.push_back(i);
  REQUIRE(greedy_packing(grid, full_set(grid), 4.0) == expected);

  REQUIRE(greedy_packing(s3, full_set(s3), 4.0) == std::vector<int>{0});
  REQUIRE(greedy_packing(s3, full_set(s3), 0.0) == std::vector<int>{0, 1, 2});
}

TEST_CASE("degenerate single-point space") {
  const auto space = MetricMeasureSpace::from_points({{7.0, 7.0}}, {2.5});
  REQUIRE(ball(space, 0, 0.5).members == std::vector<int>{0});
  REQUIRE(greedy_net(space, full_set(space), 0.1) == std::vector<int>{0});
  REQUIRE(greedy_packing(space, full_set(space), 10.0) == std::vector<int>{0});
  REQUIRE(diameter(space) == 0.0);
}

TEST_CASE("set-geometry properties on random spaces") {
  std::mt19937_64 rng(20240811);
  for (int round = 0; round < 5; ++round) {
    const auto space = random_euclidean_space(rng, 30, 1 + round % 3);
    const double diam = diameter(space);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> pick(0, space.size() - 1);

    SECTION("ball monotonicity, round " + std::to_string(round)) {
      for (int t = 0; t < 20; ++t) {
        const double s = unit(rng) * diam;
        const double u = s + unit(rng) * diam;
        const int x = pick(rng);
        const auto small = ball(space, x, s);
        const auto big = ball(space, x, u);
        REQUIRE(std::includes(big.members.begin(), big.members.end(), small.members.begin(),
                              small.members.end()));
      }
    }

    SECTION("annulus decomposition, round " + std::to_string(round)) {
      for (int t = 0; t < 20; ++t) {
        const double s = 0.1 + unit(rng) * diam;
        const double delta = s * (0.05 + 0.9 * unit(rng));
        const int x = pick(rng);
        const auto ann = annulus(space, x, s, delta);
        const auto outer = ball(space, x, s + delta);
        const auto inner = ball(space, x, s - delta);
        std::vector<int> expected;
        std::set_difference(outer.members.begin(), outer.members.end(), inner.members.begin(),
                            inner.members.end(), std::back_inserter(expected));
        REQUIRE(ann.members == expected);
      }
    }

    SECTION("symmetric-difference containment, round " + std::to_string(round)) {
      for (int t = 0; t < 20; ++t) {
        const int x = pick(rng);
        const int y = pick(rng);
        const double delta = std::max(space.distance(x, y), 1e-6) * (1.0 + unit(rng));
        const double s = delta * (1.0 + unit(rng));
        if (!(space.distance(x, y) <= delta) || !(s > delta)) continue;
        const double lhs = sym_diff(space, x, y, s).mass;
        const double rhs = annulus(space, x, s, delta).mass + annulus(space, y, s, delta).mass;
        REQUIRE(lhs <= rhs + 1e-10 * std::max(1.0, rhs));
      }
    }

    SECTION("mass consistency, round " + std::to_string(round)) {
      for (int t = 0; t < 10; ++t) {
        const auto b = ball(space, pick(rng), unit(rng) * diam);
        double recomputed = 0.0;
        for (int m : b.members) recomputed += space.weight(m);
        REQUIRE(b.mass == Catch::Approx(recomputed).epsilon(1e-12));
      }
    }

    SECTION("net covers and packing separates, round " + std::to_string(round)) {
      const double rho = 0.05 * diam + 0.2 * diam * unit(rng);
      const auto subset = full_set(space);
      const auto net = greedy_net(space, subset, rho);
      for (int m : subset.members) {
        bool covered = false;
        for (int c : net)
          if (space.distance(c, m) <= rho + ball_tolerance(rho)) covered = true;
        REQUIRE(covered);
      }
      const auto packing = greedy_packing(space, subset, 2.0 * rho);
      for (std::size_t a = 0; a < packing.size(); ++a)
        for (std::size_t b = a + 1; b < packing.size(); ++b)
          REQUIRE(space.distance(packing[a], packing[b]) > 2.0 * rho);
    }
  }
}

TEST_CASE("ball index agrees with linear scan") {
  std::mt19937_64 rng(7);
  const auto space = random_euclidean_space(rng, 40, 2);
  const BallIndex index(space);
  const double diam = diameter(space);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < 200; ++t) {
    const int center = static_cast<int>(rng() % 40);
    const double radius = unit(rng) * 1.2 * diam;
    const auto direct = ball(space, center, radius);
    const auto indexed = index.query(center, radius);
    REQUIRE(direct.members == indexed.members);
    REQUIRE(direct.mass == indexed.mass);
  }
}

TEST_CASE("triangle violation detection") {
  const auto good = MetricMeasureSpace::from_matrix(
      {{0.0, 1.0, 2.0}, {1.0, 0.0, 1.0}, {2.0, 1.0, 0.0}});
  REQUIRE(!triangle_violation(good).has_value());

  const auto bad = MetricMeasureSpace::from_matrix(
      {{0.0, 1.0, 5.0}, {1.0, 0.0, 1.0}, {5.0, 1.0, 0.0}});
  REQUIRE(triangle_violation(bad).has_value());
}
