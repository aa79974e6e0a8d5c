#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fugseg/polar_grid.hpp"
#include "test_support.hpp"

using namespace fugseg;
using doctest::Approx;

namespace {

GridConfig table_defaults() { return GridConfig{}; }  // 3 deg, M=80, 0.5..80 m

// Independent re-binning: direct index formula plus a linear boundary scan.
std::optional<CellIndex> naive_cell_index(const Point3& p, const GridConfig& cfg) {
  const double r = std::sqrt(p.x * p.x + p.y * p.y);
  const auto bounds = radial_boundaries(cfg);
  if (r < bounds.front() || r >= bounds.back()) return std::nullopt;
  const int num_segments = cfg.num_segments();
  int i = static_cast<int>(std::floor((std::numbers::pi - std::atan2(p.y, p.x)) / cfg.delta_alpha));
  if (i < 0) i = 0;
  if (i >= num_segments) i = num_segments - 1;
  for (int j = 0; j < cfg.num_cells; ++j) {
    if (bounds[j] <= r && r < bounds[j + 1]) return CellIndex{i, j};
  }
  return std::nullopt;
}

}  // namespace

TEST_CASE("equidistant radial boundaries") {
  const GridConfig cfg = table_defaults();
  CHECK(radial_boundary(cfg, 9) == Approx(9.44375).epsilon(1e-12));
  CHECK(radial_boundary(cfg, 0) == 0.5);
  CHECK(radial_boundary(cfg, cfg.num_cells) == 80.0);
  const auto [inner, outer] = radial_bounds(cfg, 9);
  CHECK(inner == Approx(9.44375));
  CHECK(outer == Approx(10.4375));
}

TEST_CASE("linear radial division") {
  GridConfig cfg = table_defaults();
  cfg.division.kind = RadialDivision::Kind::Linear;
  cfg.division.d0 = 0.05;
  CHECK(radial_boundary(cfg, 0) == 0.5);
  CHECK(radial_boundary(cfg, 80) == Approx(80.0).epsilon(1e-12));

  const auto bounds = radial_boundaries(cfg);
  // cell depths grow linearly: constant second difference a
  const double a = 2.0 * ((80.0 - 0.5) - 0.05 * 80) / (80.0 * 80.0);
  for (int j = 0; j + 2 <= 80; ++j) {
    const double d0 = bounds[j + 1] - bounds[j];
    const double d1 = bounds[j + 2] - bounds[j + 1];
    CHECK(d1 - d0 == Approx(a).epsilon(1e-6));
    CHECK(d1 > d0);
  }
  CHECK(bounds[1] - bounds[0] == Approx(0.05 + 0.5 * a).epsilon(1e-9));

  cfg.division.d0 = 1.2;  // 1.2 * 80 > 79.5
  CHECK_THROWS_AS(radial_boundary(cfg, 1), std::invalid_argument);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("manual radial division") {
  GridConfig cfg = table_defaults();
  cfg.num_cells = 4;
  cfg.division.kind = RadialDivision::Kind::Manual;
  cfg.division.boundaries = {0.5, 2.0, 10.0, 40.0, 80.0};
  CHECK_NOTHROW(cfg.validate());
  CHECK(radial_boundary(cfg, 1) == 2.0);
  CHECK(radial_boundary(cfg, 3) == 40.0);

  cfg.division.boundaries = {0.5, 10.0, 2.0, 40.0, 80.0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.division.boundaries = {0.5, 2.0, 10.0, 80.0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.division.boundaries = {1.0, 2.0, 10.0, 40.0, 80.0};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("monotone boundaries for all division kinds") {
  for (const auto kind : {RadialDivision::Kind::Equidistant, RadialDivision::Kind::Linear}) {
    GridConfig cfg = table_defaults();
    cfg.division.kind = kind;
    const auto bounds = radial_boundaries(cfg);
    for (std::size_t j = 1; j < bounds.size(); ++j) CHECK(bounds[j] > bounds[j - 1]);
  }
}

TEST_CASE("delta_alpha must divide the circle") {
  GridConfig cfg = table_defaults();
  cfg.delta_alpha = deg2rad(7.0);  // 360/7 is not integral
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.delta_alpha = deg2rad(3.0);
  CHECK(cfg.num_segments() == 120);
}

TEST_CASE("cell_index worked example and edges") {
  const GridConfig cfg = table_defaults();
  const auto idx = cell_index({0, 10, -1.7}, cfg);
  REQUIRE(idx.has_value());
  CHECK(idx->segment == 30);
  CHECK(idx->cell == 9);

  CHECK_FALSE(cell_index({0, 81, 0}, cfg).has_value());
  CHECK_FALSE(cell_index({0, 80, 0}, cfg).has_value());  // half-open outer bound
  CHECK_FALSE(cell_index({0.1, 0.1, 0}, cfg).has_value());
  CHECK(cell_index({0, 0.5, 0}, cfg).has_value());  // inner bound included

  // azimuth seam: atan2 = pi lands in segment 0
  const auto seam = cell_index({-10, 0, 0}, cfg);
  REQUIRE(seam.has_value());
  CHECK(seam->segment == 0);
}

TEST_CASE("segment index is invariant under XY scaling") {
  const GridConfig cfg = table_defaults();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(-30.0, 30.0);
  std::uniform_real_distribution<double> scale(0.5, 2.0);
  for (int k = 0; k < 2000; ++k) {
    const Point3 p{d(rng), d(rng), d(rng)};
    const auto a = cell_index(p, cfg);
    if (!a) continue;
    const double c = scale(rng);
    const auto b = cell_index({c * p.x, c * p.y, p.z}, cfg);
    if (!b) continue;
    CHECK(a->segment == b->segment);
  }
}

TEST_CASE("build_grid representative selection and labels") {
  const GridConfig cfg = table_defaults();
  const std::vector<Point3> scan{{0, 10, -1.2}, {0, 10.1, -1.7}, {0, 10.05, -1.7}};
  const auto result = build_grid(scan, cfg);
  const auto idx = cell_index(scan[0], cfg);
  REQUIRE(idx.has_value());
  const Cell& cell = result.grid.at(idx->segment, idx->cell);
  CHECK(cell.point_indices.size() == 3);
  CHECK(cell.rep_point->z == -1.7);
  CHECK(*cell.rep_index == 1);  // first of the tied lowest wins
  CHECK(cell.label == CellLabel::Unknown);

  // untouched regions stay empty
  CHECK(result.grid.at(0, 0).label == CellLabel::Empty);
  CHECK_FALSE(result.grid.at(0, 0).rep_point.has_value());

  CHECK_THROWS_AS(build_grid({}, cfg), std::invalid_argument);
}

TEST_CASE("partition conservation against naive re-binning") {
  GridConfig cfg = table_defaults();
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> d(-90.0, 90.0);
  std::vector<Point3> scan(10000);
  for (auto& p : scan) p = Point3{d(rng), d(rng), d(rng) * 0.05 - 1.7};

  const auto result = build_grid(scan, cfg);
  std::size_t binned = 0;
  for (int i = 0; i < result.grid.num_segments(); ++i) {
    for (int j = 0; j < result.grid.num_cells(); ++j) {
      binned += result.grid.at(i, j).point_indices.size();
    }
  }
  CHECK(binned + result.out_of_range.size() == scan.size());

  // every assignment matches the oracle
  std::vector<std::optional<CellIndex>> assignment(scan.size());
  for (int i = 0; i < result.grid.num_segments(); ++i) {
    for (int j = 0; j < result.grid.num_cells(); ++j) {
      for (const auto k : result.grid.at(i, j).point_indices) {
        assignment[k] = CellIndex{i, j};
      }
    }
  }
  for (std::size_t k = 0; k < scan.size(); ++k) {
    const auto expected = naive_cell_index(scan[k], cfg);
    REQUIRE(expected.has_value() == assignment[k].has_value());
    if (expected) {
      CHECK(expected->segment == assignment[k]->segment);
      CHECK(expected->cell == assignment[k]->cell);
    }
  }
}

TEST_CASE("node positions sit on boundaries") {
  PolarGrid grid(test::small_grid());
  const Point3 n00 = grid.node_position(0, 0);
  CHECK(xy_radius(n00) == Approx(0.5));
  CHECK(n00.x == Approx(-0.5));  // seam azimuth: atan2 = pi
  CHECK(n00.y == Approx(0.0));
  const Point3 n_outer = grid.node_position(0, grid.num_cells());
  CHECK(xy_radius(n_outer) == Approx(grid.config().r_max));
}
