#include "fugseg/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace fugseg {

void SensorModel::validate() const {
  if (!(sigma_r > 0.0) || !(sigma_phi > 0.0) || !(sigma_theta > 0.0)) {
    throw std::invalid_argument("sensor sigmas must be positive");
  }
  if (!(k_sigma > 0.0)) {
    throw std::invalid_argument("k_sigma must be positive");
  }
  if (!std::isfinite(mount_height) || !std::isfinite(seed_height_th)) {
    throw std::invalid_argument("sensor heights must be finite");
  }
}

SphericalCoord spherical_from_cartesian(const Point3& p) {
  const double r = norm(p);
  if (r <= 0.0) {
    throw std::invalid_argument("degenerate point at origin");
  }
  SphericalCoord s;
  s.radius = r;
  s.elevation = std::asin(std::clamp(p.z / r, -1.0, 1.0));
  s.azimuth = std::atan2(p.x, p.y);  // sin(theta) pairs with x, cos(theta) with y
  return s;
}

Point3 cartesian_from_spherical(const SphericalCoord& s) {
  Point3 p;
  p.x = s.radius * std::cos(s.elevation) * std::sin(s.azimuth);
  p.y = s.radius * std::cos(s.elevation) * std::cos(s.azimuth);
  p.z = s.radius * std::sin(s.elevation);
  return p;
}

PointSigma point_sigma(const Point3& p, const SensorModel& sensor) {
  const SphericalCoord s = spherical_from_cartesian(p);
  const double sin_phi = std::sin(s.elevation);
  const double cos_phi = std::cos(s.elevation);
  const double sin_theta = std::sin(s.azimuth);
  const double cos_theta = std::cos(s.azimuth);
  const double r2 = s.radius * s.radius;
  const double var_r = sensor.sigma_r * sensor.sigma_r;
  const double var_phi = sensor.sigma_phi * sensor.sigma_phi;
  const double var_theta = sensor.sigma_theta * sensor.sigma_theta;

  PointSigma out;
  out.sigma_x = std::sqrt(cos_phi * cos_phi * sin_theta * sin_theta * var_r +
                          r2 * sin_phi * sin_phi * sin_theta * sin_theta * var_phi +
                          r2 * cos_phi * cos_phi * cos_theta * cos_theta * var_theta);
  out.sigma_y = std::sqrt(cos_phi * cos_phi * cos_theta * cos_theta * var_r +
                          r2 * sin_phi * sin_phi * cos_theta * cos_theta * var_phi +
                          r2 * cos_phi * cos_phi * sin_theta * sin_theta * var_theta);
  out.sigma_z = std::sqrt(sin_phi * sin_phi * var_r + r2 * cos_phi * cos_phi * var_phi);
  out.sigma_x *= sensor.k_sigma;
  out.sigma_y *= sensor.k_sigma;
  out.sigma_z *= sensor.k_sigma;
  return out;
}

PairSigma pair_sigma(const Point3& pk, const Point3& pl, const SensorModel& sensor,
                     bool pk_exact, bool pl_exact) {
  const double dx = pl.x - pk.x;
  const double dy = pl.y - pk.y;
  const double dr = std::hypot(dx, dy);
  if (dr <= 0.0) {
    throw std::invalid_argument("zero baseline");
  }
  const PointSigma sk = pk_exact ? PointSigma{} : point_sigma(pk, sensor);
  const PointSigma sl = pl_exact ? PointSigma{} : point_sigma(pl, sensor);

  PairSigma out;
  out.sigma_dz = std::sqrt(sl.sigma_z * sl.sigma_z + sk.sigma_z * sk.sigma_z);
  const double ux = dx / dr;
  const double uy = dy / dr;
  out.sigma_dr = std::sqrt(ux * ux * (sl.sigma_x * sl.sigma_x + sk.sigma_x * sk.sigma_x) +
                           uy * uy * (sl.sigma_y * sl.sigma_y + sk.sigma_y * sk.sigma_y));
  return out;
}

double traditional_slope(const Point3& pk, const Point3& pl) {
  const double dr = xy_distance(pk, pl);
  if (dr <= 0.0) {
    throw std::invalid_argument("zero baseline");
  }
  return (pl.z - pk.z) / dr;
}

double adaptive_slope(const Point3& pk, const Point3& pl, const SensorModel& sensor,
                      bool pk_exact, bool pl_exact) {
  const double dz = pl.z - pk.z;
  const double dr = xy_distance(pk, pl);
  if (dr <= 0.0) {
    throw std::invalid_argument("zero baseline");
  }
  const PairSigma sig = pair_sigma(pk, pl, sensor, pk_exact, pl_exact);
  if (std::abs(dz) <= sig.sigma_dz) {
    return 0.0;
  }
  if (dz > sig.sigma_dz) {
    return (dz - sig.sigma_dz) / (dr + sig.sigma_dr);
  }
  return (dz + sig.sigma_dz) / (dr + sig.sigma_dr);
}

}  // namespace fugseg
