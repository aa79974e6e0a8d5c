#include "fugseg/polar_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fugseg {

const char* to_string(CellLabel label) {
  switch (label) {
    case CellLabel::Empty: return "empty";
    case CellLabel::Unknown: return "unknown";
    case CellLabel::Ground: return "ground";
    case CellLabel::NoisyGround: return "noisy_ground";
    case CellLabel::Object: return "object";
  }
  return "?";
}

int GridConfig::num_segments() const {
  const double ratio = 2.0 * std::numbers::pi / delta_alpha;
  const double rounded = std::round(ratio);
  if (std::abs(ratio - rounded) > 1e-9 || rounded < 1.0) {
    throw std::invalid_argument("delta_alpha must evenly divide the full circle");
  }
  return static_cast<int>(rounded);
}

void GridConfig::validate() const {
  if (!(delta_alpha > 0.0)) throw std::invalid_argument("delta_alpha must be positive");
  (void)num_segments();
  if (num_cells < 2) throw std::invalid_argument("grid needs at least 2 radial cells");
  if (!(r0 < r_max)) throw std::invalid_argument("r0 must be smaller than r_max");
  if (!(r0 >= 0.0)) throw std::invalid_argument("r0 must be non-negative");
  switch (division.kind) {
    case RadialDivision::Kind::Equidistant:
      break;
    case RadialDivision::Kind::Linear:
      if (!(division.d0 > 0.0)) throw std::invalid_argument("linear division needs d0 > 0");
      (void)radial_boundary(*this, 1);  // surfaces "negative growth"
      break;
    case RadialDivision::Kind::Manual: {
      const auto& b = division.boundaries;
      if (static_cast<int>(b.size()) != num_cells + 1) {
        throw std::invalid_argument("manual division needs M+1 boundaries, got " +
                                    std::to_string(b.size()));
      }
      if (std::abs(b.front() - r0) > 1e-9 || std::abs(b.back() - r_max) > 1e-9) {
        throw std::invalid_argument("manual boundaries must run from r0 to r_max");
      }
      for (std::size_t k = 1; k < b.size(); ++k) {
        if (!(b[k] > b[k - 1])) {
          throw std::invalid_argument("manual boundaries must be strictly increasing");
        }
      }
      break;
    }
  }
}

double radial_boundary(const GridConfig& config, int j) {
  const int m = config.num_cells;
  if (j < 0 || j > m) throw std::out_of_range("radial boundary index out of range");
  if (j == 0) return config.r0;
  if (j == m) return config.r_max;
  switch (config.division.kind) {
    case RadialDivision::Kind::Equidistant:
      return config.r0 + j * (config.r_max - config.r0) / m;
    case RadialDivision::Kind::Linear: {
      const double span = config.r_max - config.r0;
      const double d0 = config.division.d0;
      const double a = 2.0 * (span - d0 * m) / (static_cast<double>(m) * m);
      if (a < 0.0) throw std::invalid_argument("negative growth: d0*M exceeds r_max-r0");
      // D(j) = a/2 j^2 + d0 j + r0, the integral of d(j) = a j + d0
      return 0.5 * a * j * j + d0 * j + config.r0;
    }
    case RadialDivision::Kind::Manual:
      return config.division.boundaries[static_cast<std::size_t>(j)];
  }
  throw std::logic_error("unknown radial division kind");
}

std::pair<double, double> radial_bounds(const GridConfig& config, int j) {
  return {radial_boundary(config, j), radial_boundary(config, std::min(j + 1, config.num_cells))};
}

std::vector<double> radial_boundaries(const GridConfig& config) {
  std::vector<double> out(static_cast<std::size_t>(config.num_cells) + 1);
  for (int j = 0; j <= config.num_cells; ++j) out[static_cast<std::size_t>(j)] = radial_boundary(config, j);
  return out;
}

std::optional<CellIndex> cell_index(const Point3& p, const GridConfig& config,
                                    std::span<const double> boundaries) {
  const double r = xy_radius(p);
  if (r < boundaries.front() || r >= boundaries.back()) {
    return std::nullopt;
  }
  const int num_segments = config.num_segments();
  const double u = (std::numbers::pi - std::atan2(p.y, p.x)) / config.delta_alpha;
  int i = static_cast<int>(std::floor(u));
  i = std::clamp(i, 0, num_segments - 1);  // guards the seam where u touches L

  const auto it = std::upper_bound(boundaries.begin(), boundaries.end(), r);
  int j = static_cast<int>(it - boundaries.begin()) - 1;
  j = std::clamp(j, 0, config.num_cells - 1);
  return CellIndex{i, j};
}

std::optional<CellIndex> cell_index(const Point3& p, const GridConfig& config) {
  return cell_index(p, config, radial_boundaries(config));
}

PolarGrid::PolarGrid(GridConfig config) : config_(std::move(config)) {
  config_.validate();
  num_segments_ = config_.num_segments();
  boundaries_ = radial_boundaries(config_);
  cells_.resize(static_cast<std::size_t>(num_segments_) * config_.num_cells);
}

Point3 PolarGrid::node_position(int i, int j) const {
  const double radius = boundaries_[static_cast<std::size_t>(j)];
  const double azimuth = std::numbers::pi - i * config_.delta_alpha;  // atan2 angle of the boundary
  return Point3{radius * std::cos(azimuth), radius * std::sin(azimuth), 0.0};
}

std::vector<CellLabel> PolarGrid::labels() const {
  std::vector<CellLabel> out(cells_.size());
  for (std::size_t k = 0; k < cells_.size(); ++k) out[k] = cells_[k].label;
  return out;
}

GridBuildResult build_grid(std::span<const Point3> scan, const GridConfig& config,
                           std::span<const std::uint8_t> exclude) {
  if (scan.empty()) throw std::invalid_argument("empty scan");
  GridBuildResult result{PolarGrid(config), {}};
  PolarGrid& grid = result.grid;
  const auto boundaries = grid.boundaries();

  for (std::uint32_t k = 0; k < scan.size(); ++k) {
    if (!exclude.empty() && exclude[k]) continue;
    const auto idx = cell_index(scan[k], config, boundaries);
    if (!idx) {
      result.out_of_range.push_back(k);
      continue;
    }
    Cell& cell = grid.at(idx->segment, idx->cell);
    cell.point_indices.push_back(k);
    if (cell.label == CellLabel::Empty) cell.label = CellLabel::Unknown;
    if (!cell.rep_point || scan[k].z < cell.rep_point->z) {
      cell.rep_point = scan[k];
      cell.rep_index = k;
    }
  }
  return result;
}

}  // namespace fugseg
