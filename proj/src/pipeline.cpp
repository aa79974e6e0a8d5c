#include "fugseg/pipeline.hpp"

#include <chrono>
#include <stdexcept>

namespace fugseg {

namespace {

using Clock = std::chrono::steady_clock;

std::int64_t elapsed_us(Clock::time_point from, Clock::time_point to) {
  return std::chrono::duration_cast<std::chrono::microseconds>(to - from).count();
}

}  // namespace

void EgoBox::validate() const {
  if (!(x_min < x_max) || !(y_min < y_max) || !(z_min < z_max)) {
    throw std::invalid_argument("ego box extents must satisfy min < max");
  }
}

void FugSegConfig::validate() const {
  sensor.validate();
  grid.validate();
  labeling.validate();
  classify.validate();
  if (ego_box) ego_box->validate();
}

std::vector<std::uint32_t> apply_ego_filter(std::span<const Point3> scan, const EgoBox& box) {
  std::vector<std::uint32_t> inside;
  for (std::uint32_t k = 0; k < scan.size(); ++k) {
    if (box.contains(scan[k])) inside.push_back(k);
  }
  return inside;
}

SegmentationResult run_scan(std::span<const Point3> scan, const FugSegConfig& config) {
  config.validate();
  if (scan.empty()) throw std::invalid_argument("empty scan");

  const auto t_start = Clock::now();

  std::vector<std::uint8_t> excluded;
  if (config.ego_box) {
    excluded.assign(scan.size(), 0);
    for (const std::uint32_t k : apply_ego_filter(scan, *config.ego_box)) excluded[k] = 1;
  }
  auto built = build_grid(scan, config.grid, excluded);
  const auto t_pgm = Clock::now();

  label_grid(built.grid, config.sensor, config.labeling, config.cgp_wrap_azimuth);
  const auto t_ugl = Clock::now();

  NodeHeightMap nodes = ground_node_heights(built.grid);
  const PropagatedZ propagated = propagate_z_four_paths(built.grid);
  estimate_noisy_ground_heights(built.grid, propagated);
  noisy_node_heights(built.grid, nodes);
  const auto t_ege = Clock::now();

  PointClassification classified =
      classify_points(built.grid, nodes, scan, config.classify);
  const auto t_pgs = Clock::now();

  SegmentationResult result;
  result.is_ground = std::move(classified.is_ground);
  result.elevation = std::move(classified.elevation);
  result.cell_labels = built.grid.labels();
  result.num_segments = built.grid.num_segments();
  result.num_cells = built.grid.num_cells();
  result.nodes = std::move(nodes);
  result.timings.pgm_us = elapsed_us(t_start, t_pgm);
  result.timings.ugl_us = elapsed_us(t_pgm, t_ugl);
  result.timings.ege_us = elapsed_us(t_ugl, t_ege);
  result.timings.pgs_us = elapsed_us(t_ege, t_pgs);
  result.timings.total_us = elapsed_us(t_start, Clock::now());
  return result;
}

}  // namespace fugseg
