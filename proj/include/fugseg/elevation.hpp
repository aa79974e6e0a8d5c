#pragma once

#include <array>
#include <optional>
#include <vector>

#include "fugseg/polar_grid.hpp"

namespace fugseg {

/// Heights at the L x (M+1) polar cell corners, partially defined.
class NodeHeightMap {
 public:
  NodeHeightMap() = default;
  explicit NodeHeightMap(const PolarGrid& grid);

  int num_segments() const { return num_segments_; }
  int num_radial_nodes() const { return num_radial_nodes_; }  // M + 1

  std::optional<double>& at(int i, int j) { return heights_[flat(i, j)]; }
  const std::optional<double>& at(int i, int j) const { return heights_[flat(i, j)]; }

  Point3 position(int i, int j) const;

  bool operator==(const NodeHeightMap& other) const = default;

 private:
  std::size_t flat(int i, int j) const {
    return static_cast<std::size_t>(i) * num_radial_nodes_ + j;
  }

  int num_segments_ = 0;
  int num_radial_nodes_ = 0;
  double delta_alpha_ = 0.0;
  std::vector<double> boundaries_;
  std::vector<std::optional<double>> heights_;
};

/// Step 1: height of every node adjacent to at least one ground cell, as the
/// exp(-distance)-weighted mean of the adjacent ground reps' Z.
NodeHeightMap ground_node_heights(const PolarGrid& grid);

/// One propagated Z value: the source ground cell's rep Z plus the 2D
/// distance between the receiving and source reps.
struct ZSource {
  double z = 0.0;
  double distance = 0.0;
};

enum class PropagationPath : int {
  RowLeftToRight = 0,
  RowRightToLeft = 1,
  SegNearToFar = 2,
  SegFarToNear = 3,
};

/// Per noisy-ground cell, up to four propagated Z values (one per path).
class PropagatedZ {
 public:
  PropagatedZ() = default;
  PropagatedZ(int num_segments, int num_cells);

  std::array<std::optional<ZSource>, 4>& at(int i, int j) { return entries_[flat(i, j)]; }
  const std::array<std::optional<ZSource>, 4>& at(int i, int j) const {
    return entries_[flat(i, j)];
  }

 private:
  std::size_t flat(int i, int j) const {
    return static_cast<std::size_t>(i) * num_cells_ + j;
  }
  int num_cells_ = 0;
  std::vector<std::array<std::optional<ZSource>, 4>> entries_;
};

/// Step 2: sweep each row in both tangential directions and each segment in
/// both radial directions, carrying the last ground rep Z across non-ground
/// cells and depositing it into every noisy-ground cell passed.
PropagatedZ propagate_z_four_paths(const PolarGrid& grid);

/// Estimate est_ground_z of each noisy-ground cell as the exp(-d)-weighted
/// mean of its propagated Z values; cells with no support become objects.
void estimate_noisy_ground_heights(PolarGrid& grid, const PropagatedZ& propagated);

/// Step 3: define the remaining nodes adjacent to noisy-ground cells from
/// the estimated ground heights; step-1 values are never overwritten.
void noisy_node_heights(const PolarGrid& grid, NodeHeightMap& nodes);

struct InterpolationWeights {
  double bottom_left = 0.0;   // inner radius, lower-i boundary
  double bottom_right = 0.0;  // inner radius, upper-i boundary
  double top_left = 0.0;      // outer radius, lower-i boundary
  double top_right = 0.0;     // outer radius, upper-i boundary
  double sum() const { return bottom_left + bottom_right + top_left + top_right; }
};

/// Linear corner weights of a point inside its cell; they always sum to 4
/// and the nearer corner gets the larger weight.
InterpolationWeights interpolation_weights(const Point3& p, CellIndex cell,
                                           const GridConfig& config,
                                           std::span<const double> boundaries);

/// Ground elevation under p via the weighted mean of its cell's four node
/// heights. Throws "unsupported cell" when any node is undefined.
double interpolate_elevation(const Point3& p, CellIndex cell, const NodeHeightMap& nodes,
                             const GridConfig& config, std::span<const double> boundaries);

struct ClassifyThresholds {
  double t_z = 0.15;  // permitted elevation deviation, m

  void validate() const;
  bool operator==(const ClassifyThresholds&) const = default;
};

/// Per-point ground decision plus the interpolated elevation where defined.
struct PointClassification {
  std::vector<std::uint8_t> is_ground;
  std::vector<std::optional<double>> elevation;
};

/// Points in ground cells are ground below elevation + t_z (one-sided);
/// points in noisy-ground cells must lie within t_z of the elevation
/// (two-sided, which drops below-surface reflections). Everything else,
/// including points outside the grid, is non-ground.
PointClassification classify_points(const PolarGrid& grid, const NodeHeightMap& nodes,
                                    std::span<const Point3> scan,
                                    const ClassifyThresholds& thresholds);

}  // namespace fugseg
