#include "fugseg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <stdexcept>

namespace fugseg {

void SceneSpec::validate() const {
  const auto fail = [](const std::string& what) {
    throw std::invalid_argument("invalid scene spec: " + what);
  };
  if (sampling == Sampling::Rays) {
    if (num_rings < 1 || num_azimuths < 1) fail("ray pattern needs rings and azimuths");
    if (!(ring_min_deg < ring_max_deg)) fail("ring_min_deg must be below ring_max_deg");
    if (!(max_range > 0.0)) fail("max_range must be positive");
    if (!(base_z < 0.0)) fail("rays start at the origin: base_z must be below it");
  } else {
    if (num_area_points < 1) fail("area sampling needs a positive point count");
    if (!(area_r_min >= 0.0 && area_r_min < area_r_max)) fail("bad area radius range");
  }
  if (!(noise_sigma >= 0.0)) fail("noise_sigma must be non-negative");
  if (terrain == Terrain::Curved && !(curve_period > 0.0)) fail("curve_period must be positive");
  for (const auto& box : occluders) {
    if (!(box.x_min < box.x_max) || !(box.y_min < box.y_max)) fail("degenerate occluder box");
    if (!(box.height > 0.0)) fail("occluder height must be positive");
  }
  for (const auto& patch : mirrors) {
    if (!(patch.x_min < patch.x_max) || !(patch.y_min < patch.y_max)) fail("degenerate mirror patch");
    if (!(patch.depth > 0.0)) fail("mirror depth must be positive");
    if (!(patch.fraction >= 0.0 && patch.fraction <= 1.0)) fail("mirror fraction must be in [0,1]");
  }
}

double terrain_height(const SceneSpec& spec, [[maybe_unused]] double x, double y) {
  switch (spec.terrain) {
    case SceneSpec::Terrain::Flat:
      return spec.base_z;
    case SceneSpec::Terrain::Inclined:
      return spec.base_z + std::tan(deg2rad(spec.incline_deg)) * y;
    case SceneSpec::Terrain::Curved:
      return spec.base_z +
             spec.curve_amplitude * std::sin(2.0 * std::numbers::pi * y / spec.curve_period);
  }
  return spec.base_z;
}

namespace {

struct Ray {
  double dx, dy, dz;  // unit direction from the origin
};

// Distance to the terrain surface along the ray, if it is hit within range.
std::optional<double> terrain_hit(const SceneSpec& spec, const Ray& ray) {
  switch (spec.terrain) {
    case SceneSpec::Terrain::Flat: {
      if (ray.dz >= 0.0) return std::nullopt;
      const double t = spec.base_z / ray.dz;
      return t > 0.0 && t <= spec.max_range ? std::optional(t) : std::nullopt;
    }
    case SceneSpec::Terrain::Inclined: {
      const double slope = std::tan(deg2rad(spec.incline_deg));
      const double denom = ray.dz - slope * ray.dy;
      if (denom == 0.0) return std::nullopt;
      const double t = spec.base_z / denom;
      return t > 0.0 && t <= spec.max_range ? std::optional(t) : std::nullopt;
    }
    case SceneSpec::Terrain::Curved: {
      // March until the ray drops below the surface, then bisect.
      const auto above = [&](double t) {
        return t * ray.dz - terrain_height(spec, t * ray.dx, t * ray.dy);
      };
      const double step = 0.25;
      double prev = 0.0;
      if (above(prev) <= 0.0) return std::nullopt;
      for (double t = step; t <= spec.max_range; t += step) {
        if (above(t) <= 0.0) {
          double lo = prev, hi = t;
          for (int it = 0; it < 50; ++it) {
            const double mid = 0.5 * (lo + hi);
            (above(mid) > 0.0 ? lo : hi) = mid;
          }
          return 0.5 * (lo + hi);
        }
        prev = t;
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

// Standard slab test against the box extruded from the terrain.
std::optional<double> box_hit(const SceneSpec& spec, const OccluderBox& box, const Ray& ray) {
  const double base =
      terrain_height(spec, 0.5 * (box.x_min + box.x_max), 0.5 * (box.y_min + box.y_max));
  const double lo[3] = {box.x_min, box.y_min, base};
  const double hi[3] = {box.x_max, box.y_max, base + box.height};
  const double dir[3] = {ray.dx, ray.dy, ray.dz};
  double t_enter = 0.0;
  double t_exit = spec.max_range;
  for (int axis = 0; axis < 3; ++axis) {
    if (dir[axis] == 0.0) {
      if (0.0 < lo[axis] || 0.0 > hi[axis]) return std::nullopt;
      continue;
    }
    double t0 = lo[axis] / dir[axis];
    double t1 = hi[axis] / dir[axis];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
    if (t_enter > t_exit) return std::nullopt;
  }
  return t_enter > 0.0 ? std::optional(t_enter) : std::nullopt;
}

bool inside_patch(const MirrorPatch& patch, double x, double y) {
  return x >= patch.x_min && x <= patch.x_max && y >= patch.y_min && y <= patch.y_max;
}

}  // namespace

SyntheticScene synth_scene(const SceneSpec& spec) {
  spec.validate();
  SyntheticScene scene;
  scene.spec = spec;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const auto draw_noise = [&] { return spec.noise_sigma > 0.0 ? noise(rng) : 0.0; };

  const auto emit = [&](const Point3& p, bool ground) {
    scene.points.push_back(p);
    scene.truth_ground.push_back(ground ? 1 : 0);
  };

  const auto mirror_here = [&](double x, double y) -> std::optional<double> {
    for (const auto& patch : spec.mirrors) {
      if (!inside_patch(patch, x, y)) continue;
      if (uniform(rng) < patch.fraction) return patch.depth;
      return std::nullopt;  // one membership draw per return
    }
    return std::nullopt;
  };

  if (spec.sampling == SceneSpec::Sampling::Rays) {
    for (int ring = 0; ring < spec.num_rings; ++ring) {
      const double elevation =
          deg2rad(spec.ring_min_deg +
                  (spec.num_rings == 1
                       ? 0.0
                       : ring * (spec.ring_max_deg - spec.ring_min_deg) / (spec.num_rings - 1)));
      for (int a = 0; a < spec.num_azimuths; ++a) {
        const double azimuth = a * 2.0 * std::numbers::pi / spec.num_azimuths;
        const Ray ray{std::cos(elevation) * std::sin(azimuth),
                      std::cos(elevation) * std::cos(azimuth), std::sin(elevation)};

        const auto t_ground = terrain_hit(spec, ray);
        std::optional<double> t_box;
        for (const auto& box : spec.occluders) {
          const auto t = box_hit(spec, box, ray);
          if (t && (!t_box || *t < *t_box)) t_box = t;
        }

        if (t_box && (!t_ground || *t_box < *t_ground)) {
          const double t = *t_box + draw_noise();
          emit(Point3{t * ray.dx, t * ray.dy, t * ray.dz}, false);
        } else if (t_ground) {
          const double x = *t_ground * ray.dx;
          const double y = *t_ground * ray.dy;
          if (const auto depth = mirror_here(x, y)) {
            emit(Point3{x, y, terrain_height(spec, x, y) - *depth + draw_noise()}, false);
          } else {
            const double t = *t_ground + draw_noise();
            emit(Point3{t * ray.dx, t * ray.dy, t * ray.dz}, true);
          }
        }
      }
    }
    return scene;
  }

  // Area sampling: uniform annulus on the terrain plus occluder shells.
  const double r_lo2 = spec.area_r_min * spec.area_r_min;
  const double r_hi2 = spec.area_r_max * spec.area_r_max;
  const auto under_box = [&](double x, double y) {
    return std::any_of(spec.occluders.begin(), spec.occluders.end(), [&](const OccluderBox& b) {
      return x >= b.x_min && x <= b.x_max && y >= b.y_min && y <= b.y_max;
    });
  };
  for (int k = 0; k < spec.num_area_points; ++k) {
    const double r = std::sqrt(r_lo2 + uniform(rng) * (r_hi2 - r_lo2));
    const double angle = uniform(rng) * 2.0 * std::numbers::pi;
    const double x = r * std::cos(angle);
    const double y = r * std::sin(angle);
    if (under_box(x, y)) continue;
    if (const auto depth = mirror_here(x, y)) {
      emit(Point3{x, y, terrain_height(spec, x, y) - *depth + draw_noise()}, false);
    } else {
      emit(Point3{x, y, terrain_height(spec, x, y) + draw_noise()}, true);
    }
  }
  const double annulus_area = std::numbers::pi * (r_hi2 - r_lo2);
  const double density = spec.num_area_points / annulus_area;
  for (const auto& box : spec.occluders) {
    const double base =
        terrain_height(spec, 0.5 * (box.x_min + box.x_max), 0.5 * (box.y_min + box.y_max));
    const double wx = box.x_max - box.x_min;
    const double wy = box.y_max - box.y_min;
    const double side_h = std::max(0.0, box.height - box.side_clearance);
    const double top_area = wx * wy;
    const double side_area = 2.0 * (wx + wy) * side_h;
    const int count = std::max(1, static_cast<int>(std::lround(density * (top_area + side_area))));
    for (int k = 0; k < count; ++k) {
      const double pick = uniform(rng) * (top_area + side_area);
      Point3 p;
      if (pick < top_area) {
        p = Point3{box.x_min + uniform(rng) * wx, box.y_min + uniform(rng) * wy,
                   base + box.height};
      } else {
        const double along = uniform(rng) * 2.0 * (wx + wy);
        const double z = base + box.side_clearance + uniform(rng) * side_h;
        if (along < wx) p = Point3{box.x_min + along, box.y_min, z};
        else if (along < wx + wy) p = Point3{box.x_max, box.y_min + (along - wx), z};
        else if (along < 2.0 * wx + wy) p = Point3{box.x_min + (along - wx - wy), box.y_max, z};
        else p = Point3{box.x_min, box.y_min + (along - 2.0 * wx - wy), z};
      }
      p.z += draw_noise();
      emit(p, false);
    }
  }
  return scene;
}

}  // namespace fugseg
