#pragma once

#include <optional>

#include "fugseg/polar_grid.hpp"

namespace fugseg {

enum class SlopeMode { Adaptive, Traditional };

struct LabelThresholds {
  double t_delta_slope = std::tan(deg2rad(7.0));  // slope-change gate, tan of angle
  double t_delta_r = 10.0;                        // forward-pass baseline cap, m
  SlopeMode slope_mode = SlopeMode::Adaptive;

  void validate() const;
  bool operator==(const LabelThresholds&) const = default;
};

/// The leveled-ground reference O = (0, 0, -H_s). A definition, not a
/// measurement: it contributes zero variance to adaptive slopes.
Point3 virtual_origin(const SensorModel& sensor);

/// Slope between two representative points under the configured mode.
/// Exact flags mark synthetic references such as the virtual origin.
double cell_slope(const Point3& a, const Point3& b, const SensorModel& sensor,
                  const LabelThresholds& thresholds, bool a_exact = false,
                  bool b_exact = false);

/// First cell (smallest j) of segment i that qualifies as the ground seed:
/// rep Z below the sensor's seed threshold, near-level slope from the
/// virtual origin, and a small slope change toward the next occupied cell.
std::optional<int> select_seed(const PolarGrid& grid, int segment, const SensorModel& sensor,
                               const LabelThresholds& thresholds);

/// Radial forward/backward ground labeling of one segment from its seed.
/// Index arithmetic skips empty cells: "next" and "previous" always mean the
/// nearest occupied cell in that direction.
void label_segment(PolarGrid& grid, int segment, int j_seed, const SensorModel& sensor,
                   const LabelThresholds& thresholds);

/// Seed + label every segment (the pre-propagation phase of label_grid).
void label_segments(PolarGrid& grid, const SensorModel& sensor,
                    const LabelThresholds& thresholds);

/// Slope of cell (i, j) toward its nearest radial ground neighbor: the
/// inner neighbor takes precedence, else the outer one; nullopt when
/// neither is ground.
std::optional<double> slope_vertical(const PolarGrid& grid, int i, int j,
                                     const SensorModel& sensor,
                                     const LabelThresholds& thresholds);

enum class SweepDirection { LeftToRight, RightToLeft };
enum class RowOrder { NearToFar, FarToNear };

/// One tangential propagation pass: relabels a non-ground cell to ground
/// when the slope change against its ground neighbor passes either the
/// horizontal (two consecutive ground cells in the row) or the vertical
/// (matching radial-neighbor slopes) test.
void propagate_cross_segment(PolarGrid& grid, SweepDirection direction, RowOrder order,
                             const SensorModel& sensor, const LabelThresholds& thresholds,
                             bool wrap_azimuth = false);

/// The full propagation schedule: both sweep directions in both row orders.
void run_cgp_schedule(PolarGrid& grid, const SensorModel& sensor,
                      const LabelThresholds& thresholds, bool wrap_azimuth = false);

/// Occupied cells never reached by labeling end up as objects.
void finalize_labels(PolarGrid& grid);

/// label_segments + run_cgp_schedule + finalize_labels.
void label_grid(PolarGrid& grid, const SensorModel& sensor, const LabelThresholds& thresholds,
                bool cgp_wrap_azimuth = false);

}  // namespace fugseg
