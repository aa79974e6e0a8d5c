#pragma once

#include <cstdint>
#include <vector>

#include "fugseg/geometry.hpp"

namespace fugseg {

/// Box occluder resting on the terrain. In ray mode it blocks rays and
/// returns surface hits; in area mode it contributes samples on its top face
/// and on the side faces above `side_clearance`.
struct OccluderBox {
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
  double height = 1.0;
  double side_clearance = 0.3;  // area mode: skip the near-ground face band
};

/// A region whose ground returns may be mirrored below the surface, the way
/// reflective obstacles duplicate the ground plane downward.
struct MirrorPatch {
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
  double depth = 0.8;      // reflected points land this far below the surface
  double fraction = 0.2;   // probability that a ground return is mirrored
};

struct SceneSpec {
  enum class Terrain { Flat, Inclined, Curved };
  enum class Sampling { Rays, Area };

  Terrain terrain = Terrain::Flat;
  double base_z = -1.73;        // surface height at the origin
  double incline_deg = 0.0;     // Inclined: slope along +y
  double curve_amplitude = 0.3; // Curved: z = base + A sin(2 pi y / period)
  double curve_period = 40.0;

  Sampling sampling = Sampling::Rays;
  // Ray mode: a spinning-sensor pattern at the origin, elevations evenly
  // spaced over [ring_min_deg, ring_max_deg].
  int num_rings = 64;
  double ring_min_deg = -24.8;
  double ring_max_deg = -2.3;
  int num_azimuths = 900;
  double max_range = 80.0;
  // Area mode: points uniform over the annulus [r_min, r_max].
  int num_area_points = 50000;
  double area_r_min = 0.6;
  double area_r_max = 75.0;

  double noise_sigma = 0.0;  // Gaussian range noise, m
  std::vector<OccluderBox> occluders;
  std::vector<MirrorPatch> mirrors;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SyntheticScene {
  std::vector<Point3> points;
  std::vector<std::uint8_t> truth_ground;  // 1 = on the terrain surface
  SceneSpec spec;
};

/// Terrain surface height under (x, y).
double terrain_height(const SceneSpec& spec, double x, double y);

/// Deterministic scene for a given spec and seed. Truth is ground exactly
/// for points on the terrain surface; occluder hits and mirrored returns
/// are non-ground.
SyntheticScene synth_scene(const SceneSpec& spec);

}  // namespace fugseg
