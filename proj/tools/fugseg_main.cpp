#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

#include "fugseg/eval.hpp"
#include "fugseg/io.hpp"
#include "fugseg/pipeline.hpp"
#include "fugseg/synth.hpp"

namespace fs = std::filesystem;
using namespace fugseg;

namespace {

std::vector<fs::path> sorted_files(const std::string& dir, const std::string& extension) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: '" + dir + "'");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == extension) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

struct ScanPair {
  fs::path scan;
  fs::path label;
};

std::vector<ScanPair> pair_scans_with_labels(const std::string& scan_dir,
                                             const std::string& label_dir) {
  std::vector<ScanPair> pairs;
  for (const auto& scan : sorted_files(scan_dir, ".bin")) {
    fs::path label = fs::path(label_dir) / scan.stem();
    label += ".label";
    if (!fs::exists(label)) {
      throw std::runtime_error("no label file for scan '" + scan.string() + "' (expected '" +
                               label.string() + "')");
    }
    pairs.push_back({scan, label});
  }
  if (pairs.empty()) throw std::runtime_error("no .bin scans found in '" + scan_dir + "'");
  return pairs;
}

std::vector<double> parse_value_list(const std::string& csv) {
  std::vector<double> values;
  std::string item;
  std::istringstream stream(csv);
  while (std::getline(stream, item, ',')) {
    if (!item.empty()) values.push_back(std::stod(item));
  }
  return values;
}

int run_segment(const std::string& config_path, const std::string& in_path,
                const std::string& out_path, const std::string& format,
                const std::string& elevation_out) {
  const FugSegConfig config = load_config(config_path);
  const ScanRecord scan = read_point_cloud_bin(in_path);
  const SegmentationResult result = run_scan(scan.points, config);
  write_segmentation(result, scan.points, out_path,
                     format == "ply" ? SegmentationFormat::ColoredPly : SegmentationFormat::Csv);
  if (!elevation_out.empty()) export_elevation_map(result.nodes, elevation_out);
  std::size_t ground = 0;
  for (const auto g : result.is_ground) ground += g;
  std::fprintf(stderr, "%zu points, %zu ground (%.1f%%), %.2f ms\n", result.is_ground.size(),
               ground, 100.0 * ground / std::max<std::size_t>(1, result.is_ground.size()),
               result.timings.total_us / 1000.0);
  return 0;
}

int run_evaluate(const std::string& scan_dir, const std::string& label_dir,
                 const std::string& mapping_path, const std::string& config_path, int threads,
                 const std::string& out_csv) {
  const FugSegConfig config = load_config(config_path);
  const LabelMapping mapping = read_label_mapping(mapping_path);
  const auto pairs = pair_scans_with_labels(scan_dir, label_dir);

  std::vector<ConfusionCounts> counts(pairs.size());
  std::vector<MetricReport> reports(pairs.size());
  const auto evaluate_one = [&](std::size_t k) {
    const ScanRecord scan = read_point_cloud_bin(pairs[k].scan.string());
    const auto truth = read_labels(pairs[k].label.string());
    if (truth.size() != scan.points.size()) {
      throw std::runtime_error("scan '" + pairs[k].scan.string() + "' has " +
                               std::to_string(scan.points.size()) + " points but " +
                               std::to_string(truth.size()) + " labels");
    }
    const SegmentationResult result = run_scan(scan.points, config);
    auto [c, report] = compute_metrics(result.is_ground, truth, mapping);
    report.runtime_ms = result.timings.total_us / 1000.0;
    counts[k] = c;
    reports[k] = report;
  };

  const int workers = std::clamp<int>(threads, 1, static_cast<int>(pairs.size()));
  if (workers <= 1) {
    for (std::size_t k = 0; k < pairs.size(); ++k) evaluate_one(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next.fetch_add(1); k < pairs.size(); k = next.fetch_add(1)) {
          evaluate_one(k);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  std::vector<std::pair<std::string, MetricReport>> rows;
  double runtime_sum = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    rows.emplace_back(pairs[k].scan.stem().string(), reports[k]);
    runtime_sum += reports[k].runtime_ms;
  }
  MetricReport aggregate = aggregate_metrics(counts);
  aggregate.runtime_ms = runtime_sum / static_cast<double>(pairs.size());
  rows.emplace_back("TOTAL (micro)", aggregate);
  std::cout << format_metrics_table(rows);
  if (!out_csv.empty()) write_metrics_csv(rows, out_csv);
  return 0;
}

int run_benchmark(const std::string& config_path, const std::string& in_path, int repeats) {
  const FugSegConfig config = load_config(config_path);
  const ScanRecord scan = read_point_cloud_bin(in_path);
  const std::vector<std::vector<Point3>> scans{scan.points};
  const BenchmarkReport report = benchmark_runtime(scans, config, repeats);
  std::cout << format_benchmark_table(report);
  return 0;
}

int run_grid_search(const std::string& scan_dir, const std::string& label_dir,
                    const std::string& mapping_path, const std::string& config_path, bool preset,
                    const std::string& alpha_csv, const std::string& m_csv,
                    const std::string& slope_csv, const std::string& dr_csv,
                    const std::string& tz_csv, int threads, int top, const std::string& out_csv) {
  const FugSegConfig config = load_config(config_path);
  const LabelMapping mapping = read_label_mapping(mapping_path);
  const auto pairs = pair_scans_with_labels(scan_dir, label_dir);

  std::vector<std::vector<Point3>> scans;
  std::vector<std::vector<std::uint16_t>> truths;
  for (const auto& pair : pairs) {
    ScanRecord scan = read_point_cloud_bin(pair.scan.string());
    auto truth = read_labels(pair.label.string());
    if (truth.size() != scan.points.size()) {
      throw std::runtime_error("scan/label length mismatch for '" + pair.scan.string() + "'");
    }
    scans.push_back(std::move(scan.points));
    truths.push_back(std::move(truth));
  }

  GridSearchAxes axes;
  if (preset) {
    axes = grid_search_preset();
  } else {
    axes.delta_alpha_deg = parse_value_list(alpha_csv);
    for (const double v : parse_value_list(m_csv)) axes.num_cells.push_back(static_cast<int>(v));
    axes.t_delta_slope_deg = parse_value_list(slope_csv);
    axes.t_delta_r = parse_value_list(dr_csv);
    axes.t_z = parse_value_list(tz_csv);
  }
  const auto rows = grid_search(scans, truths, mapping, config, axes, threads);
  const std::size_t shown = top > 0 ? std::min<std::size_t>(top, rows.size()) : rows.size();
  std::cout << format_grid_search_table({rows.begin(), rows.begin() + shown});
  if (!out_csv.empty()) write_grid_search_csv(rows, out_csv);
  return 0;
}

int run_synth(const std::string& kind, const std::string& out_dir, std::uint64_t seed,
              double noise, int rings, int azimuths) {
  SceneSpec spec;
  spec.seed = seed;
  spec.noise_sigma = noise;
  spec.num_rings = rings;
  spec.num_azimuths = azimuths;
  if (kind == "flat") {
    // defaults
  } else if (kind == "inclined") {
    spec.terrain = SceneSpec::Terrain::Inclined;
    spec.incline_deg = 6.0;
  } else if (kind == "curved") {
    spec.terrain = SceneSpec::Terrain::Curved;
    spec.curve_amplitude = 0.3;
    spec.curve_period = 40.0;
  } else if (kind == "occlusion") {
    spec.base_z = -3.0;
    spec.num_rings = std::max(rings, 128);
    spec.ring_min_deg = -25.0;
    spec.ring_max_deg = -1.9;
    spec.occluders.push_back(OccluderBox{-5.0, 5.0, 10.0, 12.0, 2.0, 0.3});
  } else if (kind == "reflection") {
    spec.mirrors.push_back(MirrorPatch{-4.0, 4.0, 8.0, 38.0, 0.8, 0.12});
  } else {
    throw CLI::ValidationError("--kind", "unknown scene kind '" + kind + "'");
  }
  const SyntheticScene scene = synth_scene(spec);

  fs::create_directories(out_dir);
  ScanRecord record;
  record.points = scene.points;
  write_point_cloud_bin(record, (fs::path(out_dir) / "scan.bin").string());
  std::vector<std::uint16_t> truth(scene.truth_ground.begin(), scene.truth_ground.end());
  write_labels(truth, (fs::path(out_dir) / "scan.label").string());
  LabelMapping mapping;
  mapping.ground_classes = {1};
  write_label_mapping(mapping, (fs::path(out_dir) / "mapping.map").string());

  std::size_t ground = 0;
  for (const auto g : scene.truth_ground) ground += g;
  std::fprintf(stderr, "wrote %zu points (%zu ground) to %s\n", scene.points.size(), ground,
               out_dir.c_str());
  return 0;
}

int run_export_elevation(const std::string& config_path, const std::string& in_path,
                         const std::string& out_path) {
  const FugSegConfig config = load_config(config_path);
  const ScanRecord scan = read_point_cloud_bin(in_path);
  const SegmentationResult result = run_scan(scan.points, config);
  export_elevation_map(result.nodes, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fugseg: single-pass ground segmentation for 3D LiDAR point clouds"};
  app.require_subcommand(1);

  std::string config_path, in_path, out_path, elevation_out;
  std::string scan_dir, label_dir, mapping_path, out_csv;
  std::string format = "csv";
  std::string kind = "flat", synth_out;
  std::string alpha_csv, m_csv, slope_csv, dr_csv, tz_csv;
  int threads = 1, repeats = 10, top = 20, rings = 64, azimuths = 900;
  std::uint64_t seed = 1;
  double noise = 0.02;
  bool preset = false;

  auto* segment = app.add_subcommand("segment", "segment one scan and write the result");
  segment->add_option("--config", config_path, "config file")->required();
  segment->add_option("--in", in_path, "input .bin point cloud")->required();
  segment->add_option("--out", out_path, "output file")->required();
  segment->add_option("--format", format, "csv or ply")
      ->check(CLI::IsMember({"csv", "ply"}));
  segment->add_option("--elevation-out", elevation_out, "also export the node height map (CSV)");

  auto* evaluate = app.add_subcommand("evaluate", "metrics over scan/label pairs");
  evaluate->add_option("--scans", scan_dir, "directory of .bin scans")->required();
  evaluate->add_option("--labels", label_dir, "directory of .label files")->required();
  evaluate->add_option("--mapping", mapping_path, "label mapping file")->required();
  evaluate->add_option("--config", config_path, "config file")->required();
  evaluate->add_option("--threads", threads, "worker threads");
  evaluate->add_option("--out", out_csv, "also write a CSV report");

  auto* benchmark = app.add_subcommand("benchmark", "single-threaded stage timings");
  benchmark->add_option("--config", config_path, "config file")->required();
  benchmark->add_option("--in", in_path, "input .bin point cloud")->required();
  benchmark->add_option("--repeats", repeats, "timed repeats per scan");

  auto* gridsearch = app.add_subcommand("gridsearch", "parameter grid search ranked by mean F1");
  gridsearch->add_option("--scans", scan_dir)->required();
  gridsearch->add_option("--labels", label_dir)->required();
  gridsearch->add_option("--mapping", mapping_path)->required();
  gridsearch->add_option("--config", config_path, "base config")->required();
  gridsearch->add_flag("--preset", preset, "use the published 3125-combination ranges");
  gridsearch->add_option("--delta-alpha", alpha_csv, "degrees, comma separated");
  gridsearch->add_option("--m", m_csv, "radial cell counts, comma separated");
  gridsearch->add_option("--t-delta-slope", slope_csv, "degrees, comma separated");
  gridsearch->add_option("--t-delta-r", dr_csv, "meters, comma separated");
  gridsearch->add_option("--t-z", tz_csv, "meters, comma separated");
  gridsearch->add_option("--threads", threads, "worker threads across combinations");
  gridsearch->add_option("--top", top, "rows to print (0 = all)");
  gridsearch->add_option("--out", out_csv, "also write the full table as CSV");

  auto* synth = app.add_subcommand("synth", "generate a synthetic scene with ground truth");
  synth->add_option("--kind", kind, "flat | inclined | curved | occlusion | reflection");
  synth->add_option("--out", synth_out, "output directory")->required();
  synth->add_option("--seed", seed, "RNG seed");
  synth->add_option("--noise", noise, "range noise sigma, m");
  synth->add_option("--rings", rings, "laser rings");
  synth->add_option("--azimuths", azimuths, "azimuth steps per ring");

  auto* export_elev = app.add_subcommand("export-elevation", "run a scan and export node heights");
  export_elev->add_option("--config", config_path)->required();
  export_elev->add_option("--in", in_path)->required();
  export_elev->add_option("--out", out_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;  // usage errors -> 1, --help -> 0
  }

  try {
    if (segment->parsed()) {
      return run_segment(config_path, in_path, out_path, format, elevation_out);
    }
    if (evaluate->parsed()) {
      return run_evaluate(scan_dir, label_dir, mapping_path, config_path, threads, out_csv);
    }
    if (benchmark->parsed()) return run_benchmark(config_path, in_path, repeats);
    if (gridsearch->parsed()) {
      return run_grid_search(scan_dir, label_dir, mapping_path, config_path, preset, alpha_csv,
                             m_csv, slope_csv, dr_csv, tz_csv, threads, top, out_csv);
    }
    if (synth->parsed()) return run_synth(kind, synth_out, seed, noise, rings, azimuths);
    if (export_elev->parsed()) return run_export_elevation(config_path, in_path, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
