#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fugseg/geometry.hpp"

namespace fugseg {

enum class CellLabel : std::uint8_t { Empty, Unknown, Ground, NoisyGround, Object };

const char* to_string(CellLabel label);

/// How segment radii are split into cells.
struct RadialDivision {
  enum class Kind { Equidistant, Linear, Manual };
  Kind kind = Kind::Equidistant;
  double d0 = 0.05;                 // Linear: innermost cell depth, m
  std::vector<double> boundaries;   // Manual: M+1 radii from r0 to r_max

  bool operator==(const RadialDivision&) const = default;
};

struct GridConfig {
  double delta_alpha = deg2rad(3.0);  // angular resolution, rad
  int num_cells = 80;                 // M, cells per segment
  double r0 = 0.5;                    // inner radius, m
  double r_max = 80.0;                // outer radius, m
  RadialDivision division;

  /// L = 2*pi / delta_alpha; throws unless delta_alpha divides the full
  /// circle to within 1e-9.
  int num_segments() const;

  void validate() const;
  bool operator==(const GridConfig&) const = default;
};

struct Cell {
  std::optional<Point3> rep_point;          // lowest-Z member
  std::optional<std::uint32_t> rep_index;   // index into the source scan
  std::vector<std::uint32_t> point_indices;
  CellLabel label = CellLabel::Empty;
  std::optional<double> est_ground_z;       // filled for noisy-ground cells

  bool empty() const { return point_indices.empty() && !rep_point.has_value(); }
};

struct CellIndex {
  int segment = 0;  // i
  int cell = 0;     // j
};

/// Radial boundary r_j for j in [0, M]; exact r0 at j=0 and r_max at j=M.
/// Linear division throws "negative growth" when d0*M exceeds r_max-r0.
double radial_boundary(const GridConfig& config, int j);

/// (r_j, r_{j+1}) of cell j.
std::pair<double, double> radial_bounds(const GridConfig& config, int j);

/// All M+1 boundaries, monotone increasing.
std::vector<double> radial_boundaries(const GridConfig& config);

/// Segment/cell index of a point, or nullopt when its XY radius falls
/// outside [r0, r_max). `boundaries` must come from radial_boundaries.
std::optional<CellIndex> cell_index(const Point3& p, const GridConfig& config,
                                    std::span<const double> boundaries);
std::optional<CellIndex> cell_index(const Point3& p, const GridConfig& config);

/// Dense L x M polar lattice over the XY plane. A "segment" is one azimuth
/// wedge (fixed i); a "row" is one radius band across all segments (fixed j).
class PolarGrid {
 public:
  explicit PolarGrid(GridConfig config);

  int num_segments() const { return num_segments_; }
  int num_cells() const { return config_.num_cells; }
  const GridConfig& config() const { return config_; }
  std::span<const double> boundaries() const { return boundaries_; }

  Cell& at(int i, int j) { return cells_[flat(i, j)]; }
  const Cell& at(int i, int j) const { return cells_[flat(i, j)]; }
  std::size_t flat(int i, int j) const {
    return static_cast<std::size_t>(i) * config_.num_cells + j;
  }

  /// XY position of node (i, j): the corner at radius r_j on the azimuth
  /// boundary between segments i-1 and i. i in [0, L), j in [0, M].
  Point3 node_position(int i, int j) const;

  std::vector<CellLabel> labels() const;

 private:
  GridConfig config_;
  int num_segments_ = 0;
  std::vector<double> boundaries_;
  std::vector<Cell> cells_;
};

struct GridBuildResult {
  PolarGrid grid;
  std::vector<std::uint32_t> out_of_range;  // scan indices, forced non-ground later
};

/// Bins a scan into the grid. Each in-range point lands in exactly one cell;
/// the representative is the lowest-Z member (first seen wins ties). Points
/// with exclude[k] != 0 are skipped entirely (neither binned nor reported
/// out of range).
GridBuildResult build_grid(std::span<const Point3> scan, const GridConfig& config,
                           std::span<const std::uint8_t> exclude = {});

}  // namespace fugseg
