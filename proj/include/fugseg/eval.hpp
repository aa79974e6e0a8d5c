#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fugseg/io.hpp"
#include "fugseg/pipeline.hpp"

namespace fugseg {

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  ConfusionCounts& operator+=(const ConfusionCounts& other);
};

struct MetricReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  double miou = 0.0;
  double runtime_ms = 0.0;  // mean per scan where measured
};

/// precision, recall, F1, accuracy and mIoU from raw counts. Ratios with a
/// zero denominator are taken as 1 (vacuously perfect).
MetricReport metrics_from_counts(const ConfusionCounts& counts);

/// Counts ground-vs-non-ground agreement between a prediction and semantic
/// truth classes; points whose class is in mapping.ignore_classes do not
/// count at all. Throws when every point is ignored.
std::pair<ConfusionCounts, MetricReport> compute_metrics(
    std::span<const std::uint8_t> predicted_ground, std::span<const std::uint16_t> truth_classes,
    const LabelMapping& mapping);

/// Micro aggregation: confusion counts are summed across scans before the
/// metric formulas are applied once.
MetricReport aggregate_metrics(std::span<const ConfusionCounts> per_scan);

std::string format_metrics_row(const std::string& name, const MetricReport& report);
std::string format_metrics_table(const std::vector<std::pair<std::string, MetricReport>>& rows);
void write_metrics_csv(const std::vector<std::pair<std::string, MetricReport>>& rows,
                       const std::string& path);

struct StageStats {
  double mean_ms = 0.0;
  double stddev_ms = 0.0;
};

struct BenchmarkReport {
  StageStats pgm, ugl, ege, pgs, total;
  int runs = 0;
};

/// Single-threaded timing over `repeats` passes per scan; one warm-up pass
/// per scan is excluded from the statistics.
BenchmarkReport benchmark_runtime(std::span<const std::vector<Point3>> scans,
                                  const FugSegConfig& config, int repeats);

std::string format_benchmark_table(const BenchmarkReport& report);

/// One grid-search axis set; an empty vector keeps the base config's value.
struct GridSearchAxes {
  std::vector<double> delta_alpha_deg;
  std::vector<int> num_cells;
  std::vector<double> t_delta_slope_deg;
  std::vector<double> t_delta_r;
  std::vector<double> t_z;
};

/// The published search ranges (5 values per axis, 3125 combinations).
GridSearchAxes grid_search_preset();

struct GridSearchRow {
  double delta_alpha_deg = 0.0;
  int num_cells = 0;
  double t_delta_slope_deg = 0.0;
  double t_delta_r = 0.0;
  double t_z = 0.0;
  double mean_f1 = 0.0;       // per-scan F1 averaged; the ranking key
  MetricReport aggregated;    // micro-aggregated over the scans
};

/// Evaluates every combination over the supplied scans and returns rows
/// sorted by mean F1, best first. Combinations run in parallel on
/// `num_threads` workers; each pipeline invocation stays single-threaded.
std::vector<GridSearchRow> grid_search(std::span<const std::vector<Point3>> scans,
                                       std::span<const std::vector<std::uint16_t>> truths,
                                       const LabelMapping& mapping, const FugSegConfig& base,
                                       const GridSearchAxes& axes, int num_threads = 1);

std::string format_grid_search_table(const std::vector<GridSearchRow>& rows);
void write_grid_search_csv(const std::vector<GridSearchRow>& rows, const std::string& path);

}  // namespace fugseg
