#pragma once

#include <cstdint>
#include <optional>

#include "fugseg/elevation.hpp"
#include "fugseg/labeling.hpp"
#include "fugseg/polar_grid.hpp"

namespace fugseg {

/// Axis-aligned box around the sensor whose returns are self-reflections.
struct EgoBox {
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
  double z_min = 0.0, z_max = 0.0;

  /// Strict interior; points on a face are kept.
  bool contains(const Point3& p) const {
    return p.x > x_min && p.x < x_max && p.y > y_min && p.y < y_max && p.z > z_min &&
           p.z < z_max;
  }
  void validate() const;
  bool operator==(const EgoBox&) const = default;
};

struct FugSegConfig {
  SensorModel sensor;
  GridConfig grid;
  LabelThresholds labeling;
  ClassifyThresholds classify;
  std::optional<EgoBox> ego_box;
  bool cgp_wrap_azimuth = false;

  void validate() const;
  bool operator==(const FugSegConfig&) const = default;
};

/// Wall-clock stage durations, microseconds.
struct StageTimings {
  std::int64_t pgm_us = 0;   // grid mapping (incl. ego filtering)
  std::int64_t ugl_us = 0;   // ground labeling
  std::int64_t ege_us = 0;   // elevation estimation
  std::int64_t pgs_us = 0;   // point-level segmentation
  std::int64_t total_us = 0;
};

struct SegmentationResult {
  std::vector<std::uint8_t> is_ground;              // per scan point
  std::vector<std::optional<double>> elevation;     // per scan point, where defined
  std::vector<CellLabel> cell_labels;               // L x M, segment-major
  int num_segments = 0;
  int num_cells = 0;
  NodeHeightMap nodes;
  StageTimings timings;
};

/// Indices of scan points strictly inside the box; they are excluded from
/// grid construction and fixed non-ground.
std::vector<std::uint32_t> apply_ego_filter(std::span<const Point3> scan, const EgoBox& box);

/// One deterministic single-threaded pass over a scan: ego filter, grid
/// mapping, ground labeling, elevation estimation, point classification.
SegmentationResult run_scan(std::span<const Point3> scan, const FugSegConfig& config);

}  // namespace fugseg
