#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quakemodes/association.hpp"
#include "quakemodes/binning.hpp"
#include "quakemodes/catalog.hpp"
#include "quakemodes/classifier.hpp"
#include "quakemodes/fdr.hpp"

namespace quakemodes {

enum class FdrScope { Pooled, PerRegion };
const char* fdr_scope_name(FdrScope s);

struct RunConfig {
  std::vector<std::string> catalog_paths;  // NDK files (plain or .gz)
  std::string events_csv_path;             // alternative entry point
  std::string labels_csv_path;             // with events: skips classification
  double min_magnitude = 3.05;
  double depth_split_km = 200.0;
  int start_year = 1977;
  int end_year = 2010;
  std::vector<int> periods_per_year = {26, 6};
  std::vector<int> lags = {1, 2};
  int n_permutations = 10000;
  double q = 0.01;
  std::string regions_file;  // empty: ring-of-fire preset
  uint64_t seed = 1977;
  FdrScope fdr_scope = FdrScope::Pooled;
  std::string out_dir;
  int threads = 1;
  bool prefer_catalog_axes = true;
  bool strict_parse = false;
  std::size_t kde_grid_size = 512;
};

struct BoxStats {
  double q1 = 0, median = 0, q3 = 0;
  double lo_whisker = 0, hi_whisker = 0;  // Tukey 1.5 IQR
  std::vector<double> outliers;
  std::size_t count = 0;
};

BoxStats box_stats(std::vector<double> values);

struct OrderedPPoint {
  std::string test_id;
  double p = 1;
  double bh_line = 0;  // rank * q / m for the displayed pooled ordering
  bool interesting = false;
};

// One (periods_per_year, lag) combination: the five report panels.
struct FamilyPanel {
  int periods_per_year = 26;
  int lag = 1;
  std::vector<OrderedPPoint> within, cross, pooled;  // ascending p
  bool box_within_valid = false, box_cross_valid = false;
  BoxStats box_within, box_cross;
  // log-odds percentiles of FDR-selected tests
  std::vector<double> percentile_within, percentile_cross;
};

struct RunReport {
  std::vector<FamilyPanel> panels;
  bool confusion_valid = false;
  ConfusionTable confusion;
  std::size_t n_events = 0;
  std::size_t n_shallow = 0;
  std::size_t n_deep = 0;
  std::size_t n_eligible_cells = 0;
  std::size_t n_tests = 0;
  std::optional<ProjectionModel> model;
};

// FDR selection per (comparison, lag, periods_per_year) family plus the
// per-family plot-data CSVs. Reused by the report stage to re-select from a
// persisted results table without re-running permutations.
struct PanelBundle {
  std::vector<FamilyPanel> panels;
  std::vector<std::pair<std::string, std::string>> data_files;  // name, csv
};

PanelBundle assemble_panels(const std::vector<AssociationResult>& results,
                            const std::vector<int>& periods_per_year,
                            const std::vector<int>& lags, double q,
                            FdrScope scope);

// Full pipeline: ingest -> features -> classify -> bin -> test -> FDR ->
// report files. All outputs are buffered and written only after every stage
// succeeded; byte content is determined by (config, seed) alone.
RunReport run_analysis(const RunConfig& config);

// Static SVG panels (one five-panel figure per combination) from the report.
void render_plots(const RunReport& report, const std::string& out_dir);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace quakemodes
