#include "fugseg/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace fugseg {

namespace {

std::vector<char> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  in.seekg(0, std::ios::end);
  const std::streamoff size = in.tellg();
  in.seekg(0, std::ios::beg);
  std::vector<char> bytes(static_cast<std::size_t>(size));
  if (size > 0) in.read(bytes.data(), size);
  if (!in) throw std::runtime_error("failed reading '" + path + "'");
  return bytes;
}

void write_file_bytes(const std::string& path, const void* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& value, const std::string& key) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': not a number: '" + value + "'");
  }
  if (pos != value.size()) {
    throw std::invalid_argument("config key '" + key + "': trailing characters in '" + value + "'");
  }
  return out;
}

int parse_int(const std::string& value, const std::string& key) {
  const double d = parse_double(value, key);
  const int i = static_cast<int>(std::llround(d));
  if (std::abs(d - i) > 1e-9) {
    throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + value + "'");
  }
  return i;
}

bool parse_bool(const std::string& value, const std::string& key) {
  if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "off" || value == "no") return false;
  throw std::invalid_argument("config key '" + key + "': expected a boolean, got '" + value + "'");
}

using Section = std::map<std::string, std::string>;

// One key fetch; consumed keys are erased so leftovers can be reported.
std::string take(Section& section, const std::string& key, const std::string& fallback,
                 bool* present = nullptr) {
  const auto it = section.find(key);
  if (it == section.end()) {
    if (present) *present = false;
    return fallback;
  }
  if (present) *present = true;
  std::string value = it->second;
  section.erase(it);
  return value;
}

void expect_consumed(const Section& section, const std::string& name) {
  if (section.empty()) return;
  throw std::invalid_argument("unknown config key '" + section.begin()->first + "' in section [" +
                              name + "]");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Serialized keys must parse back to the exact stored value; the unit
// conversion is not bit-stable on its own, so nudge the printed degree value
// until the forward conversion reproduces the target.
template <typename Fn>
double exact_key_for(double target, double guess, Fn&& forward) {
  if (forward(guess) == target) return guess;
  double up = guess;
  double down = guess;
  for (int i = 0; i < 8; ++i) {
    up = std::nextafter(up, std::numeric_limits<double>::infinity());
    if (forward(up) == target) return up;
    down = std::nextafter(down, -std::numeric_limits<double>::infinity());
    if (forward(down) == target) return down;
  }
  return guess;
}

std::string format_angle_deg(double radians) {
  return format_double(
      exact_key_for(radians, rad2deg(radians), [](double deg) { return deg2rad(deg); }));
}

std::string format_slope_deg(double tan_value) {
  return format_double(exact_key_for(tan_value, rad2deg(std::atan(tan_value)),
                                     [](double deg) { return std::tan(deg2rad(deg)); }));
}

}  // namespace

ScanRecord read_point_cloud_bin(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() % 16 != 0) {
    throw std::runtime_error("truncated point cloud '" + path + "': " +
                             std::to_string(bytes.size()) + " bytes, " +
                             std::to_string(bytes.size() % 16) + " stray bytes at offset " +
                             std::to_string(bytes.size() - bytes.size() % 16));
  }
  const std::size_t count = bytes.size() / 16;
  ScanRecord scan;
  scan.points.resize(count);
  scan.intensity.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    float v[4];
    std::memcpy(v, bytes.data() + k * 16, 16);
    if (!std::isfinite(v[0]) || !std::isfinite(v[1]) || !std::isfinite(v[2])) {
      throw std::runtime_error("non-finite coordinates at point " + std::to_string(k) + " in '" +
                               path + "'");
    }
    scan.points[k] = Point3{v[0], v[1], v[2]};
    scan.intensity[k] = v[3];
  }
  return scan;
}

void write_point_cloud_bin(const ScanRecord& scan, const std::string& path) {
  std::vector<char> bytes(scan.points.size() * 16);
  for (std::size_t k = 0; k < scan.points.size(); ++k) {
    const float v[4] = {static_cast<float>(scan.points[k].x),
                        static_cast<float>(scan.points[k].y),
                        static_cast<float>(scan.points[k].z),
                        k < scan.intensity.size() ? scan.intensity[k] : 0.0f};
    std::memcpy(bytes.data() + k * 16, v, 16);
  }
  write_file_bytes(path, bytes.data(), bytes.size());
}

std::vector<std::uint16_t> read_labels(const std::string& path) {
  const auto bytes = read_file_bytes(path);
  if (bytes.size() % 4 != 0) {
    throw std::runtime_error("truncated label file '" + path + "': " +
                             std::to_string(bytes.size()) + " bytes is not a multiple of 4");
  }
  std::vector<std::uint16_t> classes(bytes.size() / 4);
  for (std::size_t k = 0; k < classes.size(); ++k) {
    std::uint32_t raw = 0;
    std::memcpy(&raw, bytes.data() + k * 4, 4);
    classes[k] = static_cast<std::uint16_t>(raw & 0xFFFFu);  // drop instance bits
  }
  return classes;
}

void write_labels(const std::vector<std::uint16_t>& classes, const std::string& path) {
  std::vector<char> bytes(classes.size() * 4);
  for (std::size_t k = 0; k < classes.size(); ++k) {
    const std::uint32_t raw = classes[k];
    std::memcpy(bytes.data() + k * 4, &raw, 4);
  }
  write_file_bytes(path, bytes.data(), bytes.size());
}

void LabelMapping::validate() const {
  for (const auto cls : ground_classes) {
    if (ignore_classes.count(cls)) {
      throw std::invalid_argument("label mapping: class " + std::to_string(cls) +
                                  " is both ground and ignored");
    }
  }
}

LabelMapping read_label_mapping(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  LabelMapping mapping;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("label mapping '" + path + "': expected 'key = ids', got '" +
                                  line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    std::string values = trim(line.substr(eq + 1));
    std::replace(values.begin(), values.end(), ',', ' ');
    std::unordered_set<std::uint16_t>* target = nullptr;
    if (key == "ground") target = &mapping.ground_classes;
    else if (key == "ignore") target = &mapping.ignore_classes;
    else throw std::invalid_argument("label mapping '" + path + "': unknown key '" + key + "'");
    std::istringstream stream(values);
    long id = 0;
    while (stream >> id) {
      if (id < 0 || id > 0xFFFF) {
        throw std::invalid_argument("label mapping '" + path + "': class id out of range: " +
                                    std::to_string(id));
      }
      target->insert(static_cast<std::uint16_t>(id));
    }
    if (!stream.eof()) {
      throw std::invalid_argument("label mapping '" + path + "': malformed id list '" + values +
                                  "'");
    }
  }
  mapping.validate();
  return mapping;
}

void write_label_mapping(const LabelMapping& mapping, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  const auto dump = [&](const char* key, const std::unordered_set<std::uint16_t>& set) {
    std::vector<std::uint16_t> sorted(set.begin(), set.end());
    std::sort(sorted.begin(), sorted.end());
    out << key << " =";
    for (const auto cls : sorted) out << ' ' << cls;
    out << '\n';
  };
  dump("ground", mapping.ground_classes);
  dump("ignore", mapping.ignore_classes);
}

FugSegConfig parse_config(const std::string& text) {
  std::map<std::string, Section> sections;
  std::istringstream in(text);
  std::string line;
  std::string current = "";
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw std::invalid_argument("config line " + std::to_string(line_no) +
                                    ": unterminated section header");
      }
      current = trim(line.substr(1, line.size() - 2));
      sections[current];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (current.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": key outside any [section]");
    }
    if (!sections[current].emplace(key, value).second) {
      throw std::invalid_argument("config: duplicate key '" + key + "' in [" + current + "]");
    }
  }
  for (const auto& [name, _] : sections) {
    if (name != "sensor" && name != "grid" && name != "thresholds" && name != "ego") {
      throw std::invalid_argument("config: unknown section [" + name + "]");
    }
  }

  FugSegConfig config;

  Section sensor = sections.count("sensor") ? sections["sensor"] : Section{};
  const auto require = [&](Section& section, const std::string& key) {
    bool present = false;
    const std::string v = take(section, key, "", &present);
    if (!present) throw std::invalid_argument("config: missing required key '" + key + "'");
    return v;
  };
  config.sensor.sigma_r = parse_double(require(sensor, "sigma_r"), "sigma_r");
  config.sensor.sigma_phi = deg2rad(parse_double(require(sensor, "sigma_phi_deg"), "sigma_phi_deg"));
  config.sensor.sigma_theta =
      deg2rad(parse_double(require(sensor, "sigma_theta_deg"), "sigma_theta_deg"));
  config.sensor.mount_height = parse_double(require(sensor, "h_s"), "h_s");
  config.sensor.seed_height_th = parse_double(require(sensor, "t_h"), "t_h");
  config.sensor.k_sigma = parse_double(take(sensor, "k_sigma", "1"), "k_sigma");
  expect_consumed(sensor, "sensor");

  Section grid = sections.count("grid") ? sections["grid"] : Section{};
  config.grid.delta_alpha = deg2rad(parse_double(take(grid, "delta_alpha_deg", "3"), "delta_alpha_deg"));
  config.grid.num_cells = parse_int(take(grid, "m", "80"), "m");
  config.grid.r0 = parse_double(take(grid, "r0", "0.5"), "r0");
  config.grid.r_max = parse_double(take(grid, "r_max", "80"), "r_max");
  const std::string division = take(grid, "radial_division", "equidistant");
  if (division == "equidistant") {
    config.grid.division.kind = RadialDivision::Kind::Equidistant;
  } else if (division == "linear") {
    config.grid.division.kind = RadialDivision::Kind::Linear;
  } else if (division == "manual") {
    config.grid.division.kind = RadialDivision::Kind::Manual;
  } else {
    throw std::invalid_argument("config: unknown radial_division '" + division + "'");
  }
  config.grid.division.d0 = parse_double(take(grid, "d0", "0.05"), "d0");
  {
    bool present = false;
    std::string list = take(grid, "boundaries", "", &present);
    if (present) {
      std::replace(list.begin(), list.end(), ',', ' ');
      std::istringstream stream(list);
      double v = 0.0;
      config.grid.division.boundaries.clear();
      while (stream >> v) config.grid.division.boundaries.push_back(v);
      if (!stream.eof()) throw std::invalid_argument("config: malformed boundaries list");
    } else if (config.grid.division.kind == RadialDivision::Kind::Manual) {
      throw std::invalid_argument("config: manual radial_division needs a boundaries list");
    }
  }
  expect_consumed(grid, "grid");

  Section thresholds = sections.count("thresholds") ? sections["thresholds"] : Section{};
  config.labeling.t_delta_slope =
      std::tan(deg2rad(parse_double(take(thresholds, "t_delta_slope_deg", "7"), "t_delta_slope_deg")));
  config.labeling.t_delta_r = parse_double(take(thresholds, "t_delta_r", "10"), "t_delta_r");
  config.classify.t_z = parse_double(take(thresholds, "t_z", "0.15"), "t_z");
  const std::string mode = take(thresholds, "slope_mode", "adaptive");
  if (mode == "adaptive") config.labeling.slope_mode = SlopeMode::Adaptive;
  else if (mode == "traditional") config.labeling.slope_mode = SlopeMode::Traditional;
  else throw std::invalid_argument("config: unknown slope_mode '" + mode + "'");
  config.cgp_wrap_azimuth =
      parse_bool(take(thresholds, "cgp_wrap_azimuth", "false"), "cgp_wrap_azimuth");
  expect_consumed(thresholds, "thresholds");

  if (sections.count("ego")) {
    Section ego = sections["ego"];
    EgoBox box;
    box.x_min = parse_double(require(ego, "x_min"), "x_min");
    box.x_max = parse_double(require(ego, "x_max"), "x_max");
    box.y_min = parse_double(require(ego, "y_min"), "y_min");
    box.y_max = parse_double(require(ego, "y_max"), "y_max");
    box.z_min = parse_double(require(ego, "z_min"), "z_min");
    box.z_max = parse_double(require(ego, "z_max"), "z_max");
    expect_consumed(ego, "ego");
    config.ego_box = box;
  }

  config.validate();
  return config;
}

FugSegConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string config_to_string(const FugSegConfig& config) {
  std::ostringstream out;
  out << "[sensor]\n";
  out << "sigma_r = " << format_double(config.sensor.sigma_r) << '\n';
  out << "sigma_phi_deg = " << format_angle_deg(config.sensor.sigma_phi) << '\n';
  out << "sigma_theta_deg = " << format_angle_deg(config.sensor.sigma_theta) << '\n';
  out << "h_s = " << format_double(config.sensor.mount_height) << '\n';
  out << "t_h = " << format_double(config.sensor.seed_height_th) << '\n';
  out << "k_sigma = " << format_double(config.sensor.k_sigma) << '\n';
  out << "\n[grid]\n";
  out << "delta_alpha_deg = " << format_angle_deg(config.grid.delta_alpha) << '\n';
  out << "m = " << config.grid.num_cells << '\n';
  out << "r0 = " << format_double(config.grid.r0) << '\n';
  out << "r_max = " << format_double(config.grid.r_max) << '\n';
  switch (config.grid.division.kind) {
    case RadialDivision::Kind::Equidistant:
      out << "radial_division = equidistant\n";
      break;
    case RadialDivision::Kind::Linear:
      out << "radial_division = linear\n";
      out << "d0 = " << format_double(config.grid.division.d0) << '\n';
      break;
    case RadialDivision::Kind::Manual: {
      out << "radial_division = manual\n";
      out << "boundaries =";
      for (const double b : config.grid.division.boundaries) out << ' ' << format_double(b);
      out << '\n';
      break;
    }
  }
  out << "\n[thresholds]\n";
  out << "t_delta_slope_deg = " << format_slope_deg(config.labeling.t_delta_slope) << '\n';
  out << "t_delta_r = " << format_double(config.labeling.t_delta_r) << '\n';
  out << "t_z = " << format_double(config.classify.t_z) << '\n';
  out << "slope_mode = "
      << (config.labeling.slope_mode == SlopeMode::Adaptive ? "adaptive" : "traditional") << '\n';
  out << "cgp_wrap_azimuth = " << (config.cgp_wrap_azimuth ? "true" : "false") << '\n';
  if (config.ego_box) {
    out << "\n[ego]\n";
    out << "x_min = " << format_double(config.ego_box->x_min) << '\n';
    out << "x_max = " << format_double(config.ego_box->x_max) << '\n';
    out << "y_min = " << format_double(config.ego_box->y_min) << '\n';
    out << "y_max = " << format_double(config.ego_box->y_max) << '\n';
    out << "z_min = " << format_double(config.ego_box->z_min) << '\n';
    out << "z_max = " << format_double(config.ego_box->z_max) << '\n';
  }
  return out.str();
}

void save_config(const FugSegConfig& config, const std::string& path) {
  const std::string text = config_to_string(config);
  write_file_bytes(path, text.data(), text.size());
}

void write_segmentation(const SegmentationResult& result, std::span<const Point3> scan,
                        const std::string& path, SegmentationFormat format) {
  if (result.is_ground.size() != scan.size()) {
    throw std::invalid_argument("segmentation result does not match scan length");
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  char buf[160];
  if (format == SegmentationFormat::Csv) {
    out << "index,x,y,z,label,elevation\n";
    for (std::size_t k = 0; k < scan.size(); ++k) {
      int n = std::snprintf(buf, sizeof(buf), "%zu,%.9g,%.9g,%.9g,%d,", k, scan[k].x, scan[k].y,
                            scan[k].z, result.is_ground[k] ? 1 : 0);
      out.write(buf, n);
      if (result.elevation[k]) {
        n = std::snprintf(buf, sizeof(buf), "%.9g", *result.elevation[k]);
        out.write(buf, n);
      }
      out.put('\n');
    }
  } else {
    out << "ply\nformat ascii 1.0\n";
    out << "element vertex " << scan.size() << '\n';
    out << "property float x\nproperty float y\nproperty float z\n";
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "end_header\n";
    for (std::size_t k = 0; k < scan.size(); ++k) {
      const bool ground = result.is_ground[k] != 0;
      const int n = std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %d %d %d\n", scan[k].x,
                                  scan[k].y, scan[k].z, ground ? 0 : 255, ground ? 255 : 0, 0);
      out.write(buf, n);
    }
  }
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

void export_elevation_map(const NodeHeightMap& nodes, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "i,j,x,y,height\n";
  char buf[128];
  for (int i = 0; i < nodes.num_segments(); ++i) {
    for (int j = 0; j < nodes.num_radial_nodes(); ++j) {
      const Point3 p = nodes.position(i, j);
      int n = std::snprintf(buf, sizeof(buf), "%d,%d,%.9g,%.9g,", i, j, p.x, p.y);
      out.write(buf, n);
      if (nodes.at(i, j)) {
        n = std::snprintf(buf, sizeof(buf), "%.9g", *nodes.at(i, j));
        out.write(buf, n);
      }
      out.put('\n');
    }
  }
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace fugseg
