#include "fugseg/labeling.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace fugseg {

namespace {

// Slope between measured representative points; nullopt on a degenerate
// (zero XY) baseline, which no labeling test may pass.
std::optional<double> checked_slope(const Point3& a, const Point3& b, const SensorModel& sensor,
                                    const LabelThresholds& thresholds, bool a_exact = false,
                                    bool b_exact = false) {
  if (xy_distance(a, b) <= 0.0) return std::nullopt;
  return cell_slope(a, b, sensor, thresholds, a_exact, b_exact);
}

std::vector<int> occupied_cells(const PolarGrid& grid, int segment) {
  std::vector<int> occ;
  occ.reserve(static_cast<std::size_t>(grid.num_cells()));
  for (int j = 0; j < grid.num_cells(); ++j) {
    if (!grid.at(segment, j).empty()) occ.push_back(j);
  }
  return occ;
}

}  // namespace

void LabelThresholds::validate() const {
  if (!(t_delta_slope > 0.0)) throw std::invalid_argument("t_delta_slope must be positive");
  if (!(t_delta_r > 0.0)) throw std::invalid_argument("t_delta_r must be positive");
}

Point3 virtual_origin(const SensorModel& sensor) {
  return Point3{0.0, 0.0, -sensor.mount_height};
}

double cell_slope(const Point3& a, const Point3& b, const SensorModel& sensor,
                  const LabelThresholds& thresholds, bool a_exact, bool b_exact) {
  if (thresholds.slope_mode == SlopeMode::Adaptive) {
    return adaptive_slope(a, b, sensor, a_exact, b_exact);
  }
  return traditional_slope(a, b);
}

std::optional<int> select_seed(const PolarGrid& grid, int segment, const SensorModel& sensor,
                               const LabelThresholds& thresholds) {
  const Point3 origin = virtual_origin(sensor);
  const auto occ = occupied_cells(grid, segment);
  for (std::size_t pos = 0; pos < occ.size(); ++pos) {
    const Point3& rep = *grid.at(segment, occ[pos]).rep_point;
    if (!(rep.z < sensor.seed_height_th)) continue;
    const auto slope_origin = checked_slope(origin, rep, sensor, thresholds, true, false);
    if (!slope_origin || std::abs(*slope_origin) >= thresholds.t_delta_slope) continue;
    if (pos + 1 < occ.size()) {
      const Point3& next = *grid.at(segment, occ[pos + 1]).rep_point;
      const auto slope_next = checked_slope(rep, next, sensor, thresholds);
      if (!slope_next || std::abs(*slope_origin - *slope_next) >= thresholds.t_delta_slope) {
        continue;
      }
    }
    return occ[pos];
  }
  return std::nullopt;
}

void label_segment(PolarGrid& grid, int segment, int j_seed, const SensorModel& sensor,
                   const LabelThresholds& thresholds) {
  const auto occ = occupied_cells(grid, segment);
  std::size_t seed_pos = occ.size();
  for (std::size_t pos = 0; pos < occ.size(); ++pos) {
    if (occ[pos] == j_seed) { seed_pos = pos; break; }
  }
  if (seed_pos == occ.size()) throw std::invalid_argument("seed cell is empty");

  const auto rep = [&](std::size_t pos) -> const Point3& {
    return *grid.at(segment, occ[pos]).rep_point;
  };
  const auto label_of = [&](std::size_t pos) -> CellLabel& {
    return grid.at(segment, occ[pos]).label;
  };

  label_of(seed_pos) = CellLabel::Ground;
  std::size_t last_pos = seed_pos;
  const auto seed_slope =
      checked_slope(virtual_origin(sensor), rep(seed_pos), sensor, thresholds, true, false);
  double s_last = seed_slope.value_or(0.0);

  // Forward: expand outward from the seed, anchored at the last ground cell.
  for (std::size_t pos = seed_pos + 1; pos < occ.size(); ++pos) {
    if (!(xy_distance(rep(last_pos), rep(pos)) < thresholds.t_delta_r)) continue;
    const auto s = checked_slope(rep(last_pos), rep(pos), sensor, thresholds);
    if (!s) continue;
    if (std::abs(s_last - *s) < thresholds.t_delta_slope) {
      label_of(pos) = CellLabel::Ground;
      last_pos = pos;
      s_last = *s;
    } else if (*s < 0.0) {
      label_of(pos) = CellLabel::NoisyGround;
    } else {
      label_of(pos) = CellLabel::Object;
    }
  }

  // Backward: fill toward the origin; a candidate needs its two nearest
  // farther neighbors to already be ground.
  for (int pos = static_cast<int>(last_pos) - 2; pos >= 0; --pos) {
    const auto p = static_cast<std::size_t>(pos);
    if (label_of(p) == CellLabel::Ground) continue;
    if (label_of(p + 1) != CellLabel::Ground || label_of(p + 2) != CellLabel::Ground) continue;
    const auto s_base = checked_slope(rep(p + 2), rep(p + 1), sensor, thresholds);
    const auto s = checked_slope(rep(p + 1), rep(p), sensor, thresholds);
    if (!s_base || !s) continue;
    if (std::abs(*s_base - *s) < thresholds.t_delta_slope) {
      label_of(p) = CellLabel::Ground;
    } else if (*s < 0.0) {
      label_of(p) = CellLabel::NoisyGround;
    } else {
      label_of(p) = CellLabel::Object;
    }
  }
}

void label_segments(PolarGrid& grid, const SensorModel& sensor,
                    const LabelThresholds& thresholds) {
  for (int i = 0; i < grid.num_segments(); ++i) {
    if (const auto seed = select_seed(grid, i, sensor, thresholds)) {
      label_segment(grid, i, *seed, sensor, thresholds);
    }
  }
}

std::optional<double> slope_vertical(const PolarGrid& grid, int i, int j,
                                     const SensorModel& sensor,
                                     const LabelThresholds& thresholds) {
  const Cell& cell = grid.at(i, j);
  if (cell.empty()) return std::nullopt;
  if (j - 1 >= 0 && grid.at(i, j - 1).label == CellLabel::Ground) {
    return checked_slope(*grid.at(i, j - 1).rep_point, *cell.rep_point, sensor, thresholds);
  }
  if (j + 1 < grid.num_cells() && grid.at(i, j + 1).label == CellLabel::Ground) {
    return checked_slope(*cell.rep_point, *grid.at(i, j + 1).rep_point, sensor, thresholds);
  }
  return std::nullopt;
}

void propagate_cross_segment(PolarGrid& grid, SweepDirection direction, RowOrder order,
                             const SensorModel& sensor, const LabelThresholds& thresholds,
                             bool wrap_azimuth) {
  const int num_segments = grid.num_segments();
  const int num_cells = grid.num_cells();
  const int step = direction == SweepDirection::LeftToRight ? 1 : -1;

  const auto visit = [&](int i, int j) {
    const int prev1 = wrap_azimuth ? (i - step + num_segments) % num_segments : i - step;
    const int prev2 = wrap_azimuth ? (i - 2 * step + 2 * num_segments) % num_segments
                                   : i - 2 * step;
    Cell& cur = grid.at(i, j);
    if (cur.empty() || cur.label == CellLabel::Ground) return;
    const Cell& neighbor = grid.at(prev1, j);
    if (neighbor.label != CellLabel::Ground) return;

    const auto s_h = checked_slope(*neighbor.rep_point, *cur.rep_point, sensor, thresholds);
    bool horizontal_ok = false;
    if (s_h && grid.at(prev2, j).label == CellLabel::Ground) {
      const auto s_base =
          checked_slope(*grid.at(prev2, j).rep_point, *neighbor.rep_point, sensor, thresholds);
      horizontal_ok = s_base && std::abs(*s_base - *s_h) < thresholds.t_delta_slope;
    }
    bool vertical_ok = false;
    if (!horizontal_ok) {
      const auto s_v = slope_vertical(grid, i, j, sensor, thresholds);
      const auto s_v_neighbor = slope_vertical(grid, prev1, j, sensor, thresholds);
      vertical_ok =
          s_v && s_v_neighbor && std::abs(*s_v_neighbor - *s_v) < thresholds.t_delta_slope;
    }
    if (horizontal_ok || vertical_ok) cur.label = CellLabel::Ground;
  };

  const int i_begin = wrap_azimuth ? (direction == SweepDirection::LeftToRight ? 0 : num_segments - 1)
                                   : (direction == SweepDirection::LeftToRight ? 2 : num_segments - 3);
  const auto sweep_row = [&](int j) {
    if (direction == SweepDirection::LeftToRight) {
      for (int i = i_begin; i < num_segments; ++i) visit(i, j);
    } else {
      for (int i = i_begin; i >= 0; --i) visit(i, j);
    }
  };

  if (order == RowOrder::NearToFar) {
    for (int j = 0; j < num_cells; ++j) sweep_row(j);
  } else {
    for (int j = num_cells - 1; j >= 0; --j) sweep_row(j);
  }
}

void run_cgp_schedule(PolarGrid& grid, const SensorModel& sensor,
                      const LabelThresholds& thresholds, bool wrap_azimuth) {
  propagate_cross_segment(grid, SweepDirection::LeftToRight, RowOrder::NearToFar, sensor,
                          thresholds, wrap_azimuth);
  propagate_cross_segment(grid, SweepDirection::RightToLeft, RowOrder::NearToFar, sensor,
                          thresholds, wrap_azimuth);
  propagate_cross_segment(grid, SweepDirection::LeftToRight, RowOrder::FarToNear, sensor,
                          thresholds, wrap_azimuth);
  propagate_cross_segment(grid, SweepDirection::RightToLeft, RowOrder::FarToNear, sensor,
                          thresholds, wrap_azimuth);
}

void finalize_labels(PolarGrid& grid) {
  for (int i = 0; i < grid.num_segments(); ++i) {
    for (int j = 0; j < grid.num_cells(); ++j) {
      Cell& cell = grid.at(i, j);
      if (cell.label == CellLabel::Unknown) cell.label = CellLabel::Object;
    }
  }
}

void label_grid(PolarGrid& grid, const SensorModel& sensor, const LabelThresholds& thresholds,
                bool cgp_wrap_azimuth) {
  label_segments(grid, sensor, thresholds);
  run_cgp_schedule(grid, sensor, thresholds, cgp_wrap_azimuth);
  finalize_labels(grid);
}

}  // namespace fugseg
