#include "fugseg/elevation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fugseg {

NodeHeightMap::NodeHeightMap(const PolarGrid& grid)
    : num_segments_(grid.num_segments()),
      num_radial_nodes_(grid.num_cells() + 1),
      delta_alpha_(grid.config().delta_alpha),
      boundaries_(grid.boundaries().begin(), grid.boundaries().end()),
      heights_(static_cast<std::size_t>(num_segments_) * num_radial_nodes_) {}

Point3 NodeHeightMap::position(int i, int j) const {
  const double radius = boundaries_[static_cast<std::size_t>(j)];
  const double azimuth = std::numbers::pi - i * delta_alpha_;
  return Point3{radius * std::cos(azimuth), radius * std::sin(azimuth), 0.0};
}

namespace {

// The up-to-four cells sharing node (i, j): segments i-1 and i (wrapping the
// seam), radial cells j-1 and j.
template <typename Fn>
void for_adjacent_cells(const PolarGrid& grid, int i, int j, Fn&& fn) {
  const int num_segments = grid.num_segments();
  const int segments[2] = {(i - 1 + num_segments) % num_segments, i};
  const int cells[2] = {j - 1, j};
  for (int si : segments) {
    for (int sj : cells) {
      if (sj < 0 || sj >= grid.num_cells()) continue;
      fn(si, sj);
    }
  }
}

}  // namespace

NodeHeightMap ground_node_heights(const PolarGrid& grid) {
  NodeHeightMap nodes(grid);
  for (int i = 0; i < grid.num_segments(); ++i) {
    for (int j = 0; j <= grid.num_cells(); ++j) {
      const Point3 node_xy = grid.node_position(i, j);
      double weight_sum = 0.0;
      double weighted_z = 0.0;
      for_adjacent_cells(grid, i, j, [&](int si, int sj) {
        const Cell& cell = grid.at(si, sj);
        if (cell.label != CellLabel::Ground) return;
        const double w = std::exp(-xy_distance(node_xy, *cell.rep_point));
        weight_sum += w;
        weighted_z += w * cell.rep_point->z;
      });
      if (weight_sum > 0.0) nodes.at(i, j) = weighted_z / weight_sum;
    }
  }
  return nodes;
}

PropagatedZ::PropagatedZ(int num_segments, int num_cells)
    : num_cells_(num_cells),
      entries_(static_cast<std::size_t>(num_segments) * num_cells) {}

PropagatedZ propagate_z_four_paths(const PolarGrid& grid) {
  const int num_segments = grid.num_segments();
  const int num_cells = grid.num_cells();
  PropagatedZ propagated(num_segments, num_cells);

  const auto sweep = [&](PropagationPath path, auto next_index) {
    const auto slot = static_cast<std::size_t>(path);
    const bool row_wise =
        path == PropagationPath::RowLeftToRight || path == PropagationPath::RowRightToLeft;
    const int lanes = row_wise ? num_cells : num_segments;
    const int steps = row_wise ? num_segments : num_cells;
    for (int lane = 0; lane < lanes; ++lane) {
      const Point3* carried = nullptr;
      for (int step = 0; step < steps; ++step) {
        const auto [i, j] = next_index(lane, step);
        const Cell& cell = grid.at(i, j);
        if (cell.label == CellLabel::Ground) {
          carried = &*cell.rep_point;
        } else if (cell.label == CellLabel::NoisyGround && carried != nullptr) {
          propagated.at(i, j)[slot] =
              ZSource{carried->z, xy_distance(*cell.rep_point, *carried)};
        }
      }
    }
  };

  sweep(PropagationPath::RowLeftToRight,
        [&](int j, int s) { return std::pair{s, j}; });
  sweep(PropagationPath::RowRightToLeft,
        [&](int j, int s) { return std::pair{num_segments - 1 - s, j}; });
  sweep(PropagationPath::SegNearToFar,
        [&](int i, int s) { return std::pair{i, s}; });
  sweep(PropagationPath::SegFarToNear,
        [&](int i, int s) { return std::pair{i, num_cells - 1 - s}; });
  return propagated;
}

void estimate_noisy_ground_heights(PolarGrid& grid, const PropagatedZ& propagated) {
  for (int i = 0; i < grid.num_segments(); ++i) {
    for (int j = 0; j < grid.num_cells(); ++j) {
      Cell& cell = grid.at(i, j);
      if (cell.label != CellLabel::NoisyGround) continue;
      double weight_sum = 0.0;
      double weighted_z = 0.0;
      for (const auto& source : propagated.at(i, j)) {
        if (!source) continue;
        const double w = std::exp(-source->distance);
        weight_sum += w;
        weighted_z += w * source->z;
      }
      if (weight_sum > 0.0) {
        cell.est_ground_z = weighted_z / weight_sum;
      } else {
        cell.label = CellLabel::Object;  // no elevation support
        cell.est_ground_z.reset();
      }
    }
  }
}

void noisy_node_heights(const PolarGrid& grid, NodeHeightMap& nodes) {
  for (int i = 0; i < grid.num_segments(); ++i) {
    for (int j = 0; j <= grid.num_cells(); ++j) {
      if (nodes.at(i, j).has_value()) continue;
      const Point3 node_xy = grid.node_position(i, j);
      double weight_sum = 0.0;
      double weighted_z = 0.0;
      for_adjacent_cells(grid, i, j, [&](int si, int sj) {
        const Cell& cell = grid.at(si, sj);
        if (cell.label != CellLabel::NoisyGround || !cell.est_ground_z) return;
        const double w = std::exp(-xy_distance(node_xy, *cell.rep_point));
        weight_sum += w;
        weighted_z += w * *cell.est_ground_z;
      });
      if (weight_sum > 0.0) nodes.at(i, j) = weighted_z / weight_sum;
    }
  }
}

InterpolationWeights interpolation_weights(const Point3& p, CellIndex cell,
                                           const GridConfig& config,
                                           std::span<const double> boundaries) {
  const double u = (std::numbers::pi - std::atan2(p.y, p.x)) / config.delta_alpha;
  const double a1 = std::clamp(u - cell.segment, 0.0, 1.0);
  const double a2 = 1.0 - a1;
  const double inner = boundaries[static_cast<std::size_t>(cell.cell)];
  const double outer = boundaries[static_cast<std::size_t>(cell.cell) + 1];
  const double b1 = std::clamp((xy_radius(p) - inner) / (outer - inner), 0.0, 1.0);
  const double b2 = 1.0 - b1;
  return InterpolationWeights{a2 + b2, a1 + b2, a2 + b1, a1 + b1};
}

double interpolate_elevation(const Point3& p, CellIndex cell, const NodeHeightMap& nodes,
                             const GridConfig& config, std::span<const double> boundaries) {
  const int i_next = (cell.segment + 1) % nodes.num_segments();
  const auto& h_bl = nodes.at(cell.segment, cell.cell);
  const auto& h_br = nodes.at(i_next, cell.cell);
  const auto& h_tl = nodes.at(cell.segment, cell.cell + 1);
  const auto& h_tr = nodes.at(i_next, cell.cell + 1);
  if (!h_bl || !h_br || !h_tl || !h_tr) {
    throw std::runtime_error("unsupported cell: undefined node height");
  }
  const auto w = interpolation_weights(p, cell, config, boundaries);
  return (w.bottom_left * *h_bl + w.bottom_right * *h_br + w.top_left * *h_tl +
          w.top_right * *h_tr) /
         w.sum();
}

void ClassifyThresholds::validate() const {
  if (!(t_z > 0.0)) throw std::invalid_argument("t_z must be positive");
}

PointClassification classify_points(const PolarGrid& grid, const NodeHeightMap& nodes,
                                    std::span<const Point3> scan,
                                    const ClassifyThresholds& thresholds) {
  PointClassification out;
  out.is_ground.assign(scan.size(), 0);
  out.elevation.assign(scan.size(), std::nullopt);
  const auto boundaries = grid.boundaries();

  for (int i = 0; i < grid.num_segments(); ++i) {
    for (int j = 0; j < grid.num_cells(); ++j) {
      const Cell& cell = grid.at(i, j);
      if (cell.label != CellLabel::Ground && cell.label != CellLabel::NoisyGround) continue;
      for (const std::uint32_t k : cell.point_indices) {
        const double e = interpolate_elevation(scan[k], CellIndex{i, j}, nodes,
                                               grid.config(), boundaries);
        out.elevation[k] = e;
        if (cell.label == CellLabel::Ground) {
          out.is_ground[k] = scan[k].z < e + thresholds.t_z ? 1 : 0;
        } else {
          out.is_ground[k] = std::abs(scan[k].z - e) < thresholds.t_z ? 1 : 0;
        }
      }
    }
  }
  return out;
}

}  // namespace fugseg
