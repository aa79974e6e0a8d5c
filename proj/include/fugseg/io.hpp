#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <vector>

#include "fugseg/pipeline.hpp"

namespace fugseg {

/// One loaded scan; intensity and semantic class arrays are either empty or
/// parallel to points.
struct ScanRecord {
  std::vector<Point3> points;
  std::vector<float> intensity;
  std::vector<std::uint16_t> classes;
};

/// Reads little-endian float32 quadruples (x, y, z, intensity).
ScanRecord read_point_cloud_bin(const std::string& path);
void write_point_cloud_bin(const ScanRecord& scan, const std::string& path);

/// Reads little-endian uint32 labels, keeping the semantic class in the
/// lower 16 bits and discarding the instance bits.
std::vector<std::uint16_t> read_labels(const std::string& path);
void write_labels(const std::vector<std::uint16_t>& classes, const std::string& path);

/// Which semantic class ids count as ground and which are excluded from
/// evaluation entirely; everything else is non-ground.
struct LabelMapping {
  std::unordered_set<std::uint16_t> ground_classes;
  std::unordered_set<std::uint16_t> ignore_classes;

  bool is_ground(std::uint16_t cls) const { return ground_classes.count(cls) > 0; }
  bool is_ignored(std::uint16_t cls) const { return ignore_classes.count(cls) > 0; }
  void validate() const;  // ground and ignore must be disjoint
};

LabelMapping read_label_mapping(const std::string& path);
void write_label_mapping(const LabelMapping& mapping, const std::string& path);

/// Parses the INI-style config (sections [sensor], [grid], [thresholds],
/// [ego]; angles carry a _deg suffix and are stored in radians). Unknown
/// keys and invalid ranges are errors; absent algorithmic keys fall back to
/// the documented defaults.
FugSegConfig load_config(const std::string& path);
FugSegConfig parse_config(const std::string& text);
std::string config_to_string(const FugSegConfig& config);
void save_config(const FugSegConfig& config, const std::string& path);

enum class SegmentationFormat { Csv, ColoredPly };

/// CSV rows are "index,x,y,z,label,elevation" (label 1 = ground, empty
/// elevation when undefined); the PLY variant writes green/red vertices.
void write_segmentation(const SegmentationResult& result, std::span<const Point3> scan,
                        const std::string& path, SegmentationFormat format);

/// CSV of (i, j, node_x, node_y, height), one row per node, empty height
/// when undefined.
void export_elevation_map(const NodeHeightMap& nodes, const std::string& path);

}  // namespace fugseg
