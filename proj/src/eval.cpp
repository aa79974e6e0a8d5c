#include "fugseg/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace fugseg {

namespace {

double safe_ratio(double numerator, double denominator) {
  return denominator == 0.0 ? 1.0 : numerator / denominator;
}

StageStats stats_of(const std::vector<double>& samples_ms) {
  StageStats s;
  if (samples_ms.empty()) return s;
  double sum = 0.0;
  for (const double v : samples_ms) sum += v;
  s.mean_ms = sum / static_cast<double>(samples_ms.size());
  double sq = 0.0;
  for (const double v : samples_ms) sq += (v - s.mean_ms) * (v - s.mean_ms);
  s.stddev_ms =
      samples_ms.size() > 1 ? std::sqrt(sq / static_cast<double>(samples_ms.size() - 1)) : 0.0;
  return s;
}

}  // namespace

ConfusionCounts& ConfusionCounts::operator+=(const ConfusionCounts& other) {
  tp += other.tp;
  fp += other.fp;
  tn += other.tn;
  fn += other.fn;
  return *this;
}

MetricReport metrics_from_counts(const ConfusionCounts& c) {
  const auto tp = static_cast<double>(c.tp);
  const auto fp = static_cast<double>(c.fp);
  const auto tn = static_cast<double>(c.tn);
  const auto fn = static_cast<double>(c.fn);
  MetricReport r;
  r.precision = safe_ratio(tp, tp + fp);
  r.recall = safe_ratio(tp, tp + fn);
  r.f1 = safe_ratio(2.0 * tp, 2.0 * tp + fp + fn);
  r.accuracy = safe_ratio(tp + tn, tp + fp + tn + fn);
  r.miou = 0.5 * (safe_ratio(tp, tp + fp + fn) + safe_ratio(tn, tn + fp + fn));
  return r;
}

std::pair<ConfusionCounts, MetricReport> compute_metrics(
    std::span<const std::uint8_t> predicted_ground, std::span<const std::uint16_t> truth_classes,
    const LabelMapping& mapping) {
  if (predicted_ground.size() != truth_classes.size()) {
    throw std::invalid_argument("prediction and truth lengths differ: " +
                                std::to_string(predicted_ground.size()) + " vs " +
                                std::to_string(truth_classes.size()));
  }
  mapping.validate();
  ConfusionCounts counts;
  std::uint64_t evaluated = 0;
  for (std::size_t k = 0; k < predicted_ground.size(); ++k) {
    if (mapping.is_ignored(truth_classes[k])) continue;
    ++evaluated;
    const bool truth = mapping.is_ground(truth_classes[k]);
    const bool predicted = predicted_ground[k] != 0;
    if (truth && predicted) ++counts.tp;
    else if (!truth && predicted) ++counts.fp;
    else if (!truth && !predicted) ++counts.tn;
    else ++counts.fn;
  }
  if (evaluated == 0) throw std::invalid_argument("no evaluable points");
  return {counts, metrics_from_counts(counts)};
}

MetricReport aggregate_metrics(std::span<const ConfusionCounts> per_scan) {
  if (per_scan.empty()) throw std::invalid_argument("no scans to aggregate");
  ConfusionCounts total;
  for (const auto& c : per_scan) total += c;
  return metrics_from_counts(total);
}

std::string format_metrics_row(const std::string& name, const MetricReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-24s %8.2f %8.2f %8.2f %8.2f %8.2f %10.3f", name.c_str(),
                100.0 * r.precision, 100.0 * r.recall, 100.0 * r.f1, 100.0 * r.accuracy,
                100.0 * r.miou, r.runtime_ms);
  return buf;
}

std::string format_metrics_table(const std::vector<std::pair<std::string, MetricReport>>& rows) {
  std::ostringstream out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-24s %8s %8s %8s %8s %8s %10s", "scan", "P", "R", "F1", "A",
                "mIoU", "t[ms]");
  out << buf << '\n';
  for (const auto& [name, report] : rows) out << format_metrics_row(name, report) << '\n';
  return out.str();
}

void write_metrics_csv(const std::vector<std::pair<std::string, MetricReport>>& rows,
                       const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "name,precision,recall,f1,accuracy,miou,runtime_ms\n";
  char buf[256];
  for (const auto& [name, r] : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", name.c_str(),
                  r.precision, r.recall, r.f1, r.accuracy, r.miou, r.runtime_ms);
    out << buf;
  }
}

BenchmarkReport benchmark_runtime(std::span<const std::vector<Point3>> scans,
                                  const FugSegConfig& config, int repeats) {
  if (scans.empty()) throw std::invalid_argument("benchmark needs at least one scan");
  if (repeats < 1) throw std::invalid_argument("repeats must be >= 1");
  std::vector<double> pgm, ugl, ege, pgs, total;
  for (const auto& scan : scans) {
    (void)run_scan(scan, config);  // warm-up, excluded
    for (int r = 0; r < repeats; ++r) {
      const SegmentationResult result = run_scan(scan, config);
      pgm.push_back(result.timings.pgm_us / 1000.0);
      ugl.push_back(result.timings.ugl_us / 1000.0);
      ege.push_back(result.timings.ege_us / 1000.0);
      pgs.push_back(result.timings.pgs_us / 1000.0);
      total.push_back(result.timings.total_us / 1000.0);
    }
  }
  BenchmarkReport report;
  report.pgm = stats_of(pgm);
  report.ugl = stats_of(ugl);
  report.ege = stats_of(ege);
  report.pgs = stats_of(pgs);
  report.total = stats_of(total);
  report.runs = static_cast<int>(total.size());
  return report;
}

std::string format_benchmark_table(const BenchmarkReport& report) {
  std::ostringstream out;
  char buf[128];
  out << "stage    mean[ms]  stddev[ms]\n";
  const auto row = [&](const char* name, const StageStats& s) {
    std::snprintf(buf, sizeof(buf), "%-6s %9.3f %11.3f\n", name, s.mean_ms, s.stddev_ms);
    out << buf;
  };
  row("pgm", report.pgm);
  row("ugl", report.ugl);
  row("ege", report.ege);
  row("pgs", report.pgs);
  row("total", report.total);
  out << "runs: " << report.runs << " (single-threaded, warm-up excluded)\n";
  return out.str();
}

GridSearchAxes grid_search_preset() {
  GridSearchAxes axes;
  axes.delta_alpha_deg = {1.0, 2.0, 3.0, 4.0, 5.0};
  // radial resolutions 0.5 m .. 2.5 m over the default 0.5..80 m span
  axes.num_cells = {159, 80, 53, 40, 32};
  axes.t_delta_slope_deg = {3.0, 5.0, 7.0, 9.0, 11.0};
  axes.t_delta_r = {3.0, 5.0, 10.0, 15.0, 20.0};
  axes.t_z = {0.05, 0.10, 0.15, 0.20, 0.25};
  return axes;
}

std::vector<GridSearchRow> grid_search(std::span<const std::vector<Point3>> scans,
                                       std::span<const std::vector<std::uint16_t>> truths,
                                       const LabelMapping& mapping, const FugSegConfig& base,
                                       const GridSearchAxes& axes, int num_threads) {
  if (scans.empty()) throw std::invalid_argument("grid search needs at least one scan");
  if (scans.size() != truths.size()) {
    throw std::invalid_argument("scan and truth counts differ");
  }
  if (axes.delta_alpha_deg.empty() && axes.num_cells.empty() && axes.t_delta_slope_deg.empty() &&
      axes.t_delta_r.empty() && axes.t_z.empty()) {
    throw std::invalid_argument("empty parameter grid");
  }

  const std::vector<double> alphas =
      axes.delta_alpha_deg.empty() ? std::vector<double>{rad2deg(base.grid.delta_alpha)}
                                   : axes.delta_alpha_deg;
  const std::vector<int> cells =
      axes.num_cells.empty() ? std::vector<int>{base.grid.num_cells} : axes.num_cells;
  const std::vector<double> slopes =
      axes.t_delta_slope_deg.empty()
          ? std::vector<double>{rad2deg(std::atan(base.labeling.t_delta_slope))}
          : axes.t_delta_slope_deg;
  const std::vector<double> baselines =
      axes.t_delta_r.empty() ? std::vector<double>{base.labeling.t_delta_r} : axes.t_delta_r;
  const std::vector<double> t_zs =
      axes.t_z.empty() ? std::vector<double>{base.classify.t_z} : axes.t_z;

  std::vector<GridSearchRow> rows;
  for (const double a : alphas)
    for (const int m : cells)
      for (const double s : slopes)
        for (const double b : baselines)
          for (const double tz : t_zs) {
            GridSearchRow row;
            row.delta_alpha_deg = a;
            row.num_cells = m;
            row.t_delta_slope_deg = s;
            row.t_delta_r = b;
            row.t_z = tz;
            rows.push_back(row);
          }
  if (rows.empty()) throw std::invalid_argument("empty parameter grid");

  const auto evaluate = [&](GridSearchRow& row) {
    FugSegConfig config = base;
    config.grid.delta_alpha = deg2rad(row.delta_alpha_deg);
    config.grid.num_cells = row.num_cells;
    config.labeling.t_delta_slope = std::tan(deg2rad(row.t_delta_slope_deg));
    config.labeling.t_delta_r = row.t_delta_r;
    config.classify.t_z = row.t_z;
    if (config.grid.division.kind == RadialDivision::Kind::Manual &&
        static_cast<int>(config.grid.division.boundaries.size()) != config.grid.num_cells + 1) {
      config.grid.division.kind = RadialDivision::Kind::Equidistant;
    }
    std::vector<ConfusionCounts> counts;
    double f1_sum = 0.0;
    double runtime_ms_sum = 0.0;
    for (std::size_t s = 0; s < scans.size(); ++s) {
      const SegmentationResult result = run_scan(scans[s], config);
      const auto [c, report] = compute_metrics(result.is_ground, truths[s], mapping);
      counts.push_back(c);
      f1_sum += report.f1;
      runtime_ms_sum += result.timings.total_us / 1000.0;
    }
    row.mean_f1 = f1_sum / static_cast<double>(scans.size());
    row.aggregated = aggregate_metrics(counts);
    row.aggregated.runtime_ms = runtime_ms_sum / static_cast<double>(scans.size());
  };

  const int workers = std::max(1, num_threads);
  if (workers == 1) {
    for (auto& row : rows) evaluate(row);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next.fetch_add(1); k < rows.size(); k = next.fetch_add(1)) {
          evaluate(rows[k]);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const GridSearchRow& a, const GridSearchRow& b) { return a.mean_f1 > b.mean_f1; });
  return rows;
}

std::string format_grid_search_table(const std::vector<GridSearchRow>& rows) {
  std::ostringstream out;
  out << "alpha[deg]    M  slope[deg]  t_dr[m]  t_z[m]   meanF1       F1        P        R\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%10.1f %4d %11.1f %8.1f %7.2f %8.4f %8.4f %8.4f %8.4f\n",
                  r.delta_alpha_deg, r.num_cells, r.t_delta_slope_deg, r.t_delta_r, r.t_z,
                  r.mean_f1, r.aggregated.f1, r.aggregated.precision, r.aggregated.recall);
    out << buf;
  }
  return out.str();
}

void write_grid_search_csv(const std::vector<GridSearchRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << "delta_alpha_deg,m,t_delta_slope_deg,t_delta_r,t_z,mean_f1,f1,precision,recall,accuracy,"
         "miou,runtime_ms\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%.3f,%d,%.3f,%.3f,%.3f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.3f\n",
                  r.delta_alpha_deg, r.num_cells, r.t_delta_slope_deg, r.t_delta_r, r.t_z,
                  r.mean_f1, r.aggregated.f1, r.aggregated.precision, r.aggregated.recall,
                  r.aggregated.accuracy, r.aggregated.miou, r.aggregated.runtime_ms);
    out << buf;
  }
}

}  // namespace fugseg
