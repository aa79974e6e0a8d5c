#pragma once

#include <cmath>
#include <numbers>

namespace fugseg {

constexpr double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// A 3D point in the sensor frame, Z up, meters.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline double norm(const Point3& p) { return std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z); }
inline double xy_radius(const Point3& p) { return std::hypot(p.x, p.y); }
inline double xy_distance(const Point3& a, const Point3& b) {
  return std::hypot(b.x - a.x, b.y - a.y);
}

/// Spherical coordinates with the convention
///   x = R cos(phi) sin(theta), y = R cos(phi) cos(theta), z = R sin(phi)
/// i.e. theta is measured from the +Y axis toward +X.
struct SphericalCoord {
  double radius = 0.0;     // R, meters, >= 0
  double elevation = 0.0;  // phi, radians, in [-pi/2, pi/2]
  double azimuth = 0.0;    // theta, radians
};

/// Per-sensor noise model and mount geometry. Angular sigmas are radians;
/// config files take degrees and convert on load.
struct SensorModel {
  double sigma_r = 0.02;                   // range stddev, m
  double sigma_phi = deg2rad(0.033);       // elevation stddev, rad
  double sigma_theta = deg2rad(0.009);     // azimuth stddev, rad
  double mount_height = 1.73;              // H_s, m above ground
  double seed_height_th = -1.43;           // T_h, threshold on cell Z, m
  double k_sigma = 1.0;                    // sigma multiplier

  void validate() const;  // throws std::invalid_argument on bad values
  bool operator==(const SensorModel&) const = default;
};

/// Cartesian standard deviations of one measured point.
struct PointSigma {
  double sigma_x = 0.0;
  double sigma_y = 0.0;
  double sigma_z = 0.0;
};

/// Standard deviations of the height difference and XY baseline of a pair.
struct PairSigma {
  double sigma_dz = 0.0;
  double sigma_dr = 0.0;
};

/// Inverse of cartesian_from_spherical. Throws on a zero-norm point.
SphericalCoord spherical_from_cartesian(const Point3& p);

Point3 cartesian_from_spherical(const SphericalCoord& s);

/// First-order propagation of (sigma_r, sigma_phi, sigma_theta) through the
/// spherical-to-cartesian conversion, scaled by sensor.k_sigma.
PointSigma point_sigma(const Point3& p, const SensorModel& sensor);

/// Pair uncertainty; a point flagged exact (a synthetic reference, not a
/// measurement) contributes zero variance. Throws on zero XY baseline.
PairSigma pair_sigma(const Point3& pk, const Point3& pl, const SensorModel& sensor,
                     bool pk_exact = false, bool pl_exact = false);

/// dz / dr between two points. Antisymmetric; throws on zero XY baseline.
double traditional_slope(const Point3& pk, const Point3& pl);

/// Uncertainty-aware slope: zero inside the dead zone |dz| <= sigma_dz,
/// otherwise the dz excess over sigma_dz divided by the inflated baseline.
double adaptive_slope(const Point3& pk, const Point3& pl, const SensorModel& sensor,
                      bool pk_exact = false, bool pl_exact = false);

}  // namespace fugseg
