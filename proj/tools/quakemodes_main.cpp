// quakemodes: classify catalog earthquakes into statistical failure modes
// from moment-tensor eigenstructure and test for temporal association across
// a spatial tiling, with permutation-calibrated contingency tests and
// Benjamini-Hochberg selection.

#include <cstdio>
#include <filesystem>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "quakemodes/features.hpp"
#include "quakemodes/pipeline.hpp"
#include "quakemodes/synth_catalog.hpp"
#include "quakemodes/time_utils.hpp"

namespace {

using namespace quakemodes;

struct SpanOption {
  int start_year = 1977;
  int end_year = 2010;
};

void add_span_option(CLI::App* cmd, SpanOption& span) {
  cmd->add_option_function<std::string>(
      "--span",
      [&span](const std::string& s) {
        int a = 0, b = 0;
        if (std::sscanf(s.c_str(), "%d:%d", &a, &b) != 2 || a > b) {
          throw CLI::ValidationError("--span expects START:END years");
        }
        span.start_year = a;
        span.end_year = b;
      },
      "Analysis span as START:END calendar years (default 1977:2010)");
}

std::vector<MomentTensorRecord> load_catalogs(
    const std::vector<std::string>& paths, bool strict, ParseStats* stats) {
  std::vector<MomentTensorRecord> events;
  for (const auto& p : paths) {
    auto batch =
        read_ndk_file(p, strict ? ParseMode::Strict : ParseMode::Lenient, stats);
    events.insert(events.end(), batch.begin(), batch.end());
  }
  return events;
}

int cmd_ingest(const std::vector<std::string>& catalogs, bool strict,
               double min_mw, bool filter_mw, const SpanOption& span,
               bool filter_span, const std::string& out) {
  ParseStats stats;
  auto events = load_catalogs(catalogs, strict, &stats);
  if (filter_mw || filter_span) {
    const double mw = filter_mw ? min_mw : -10.0;
    const int64_t t0 =
        filter_span ? year_start_epoch(span.start_year) : INT64_MIN / 2;
    const int64_t t1 =
        filter_span ? year_start_epoch(span.end_year + 1) : INT64_MAX / 2;
    events = filter_events(events, mw, t0, t1);
  }
  write_file(out, events_to_csv(events));
  std::printf("parsed %zu events (%zu malformed blocks skipped), wrote %zu to %s\n",
              stats.parsed, stats.skipped_blocks, events.size(), out.c_str());
  return 0;
}

int cmd_features(const std::vector<std::string>& catalogs,
                 const std::string& events_csv, bool strict, bool computed_axes,
                 double depth_split, const std::string& out) {
  std::vector<MomentTensorRecord> events;
  ParseStats stats;
  if (!catalogs.empty()) {
    events = load_catalogs(catalogs, strict, &stats);
  } else {
    events = events_from_csv(read_file(events_csv));
  }
  std::vector<EventFeatures> rows;
  rows.reserve(events.size());
  for (const auto& e : events) {
    rows.push_back({e.event_id, extract_features(e, !computed_axes),
                    depth_class(e, depth_split)});
  }
  write_file(out, features_to_csv(rows));
  std::printf("wrote %zu feature rows to %s\n", rows.size(), out.c_str());
  return 0;
}

void print_confusion(const ConfusionTable& c) {
  std::printf("confusion (suffix %s maps to predicted deep):\n",
              c.suffix2_is_predicted_deep ? "2" : "1");
  std::printf("%-14s %18s %18s\n", "actual depth", "predicted shallow",
              "predicted deep");
  std::printf("%-14s %18lld %18lld\n", "Shallow",
              static_cast<long long>(c.shallow_predicted_shallow()),
              static_cast<long long>(c.shallow_predicted_deep()));
  std::printf("%-14s %18lld %18lld\n", "Deep",
              static_cast<long long>(c.deep_predicted_shallow()),
              static_cast<long long>(c.deep_predicted_deep()));
}

int cmd_classify(const std::string& features_csv, const std::string& model_in,
                 const std::string& model_out, const std::string& labels_out,
                 std::size_t kde_grid) {
  const auto rows = features_from_csv(read_file(features_csv));

  ProjectionModel model;
  if (!model_in.empty()) {
    model = model_from_json(read_file(model_in));
  } else {
    std::vector<FeatureVector> shallow, deep;
    for (const auto& r : rows) {
      (r.depth == DepthClass::Shallow ? shallow : deep).push_back(r.features);
    }
    model = fit_mode_model(shallow, deep, kde_grid);
    if (!model.threshold_from_crossing) {
      std::fprintf(stderr,
                   "warning: densities never cross; threshold fell back to "
                   "the midpoint of class means\n");
    }
  }

  std::vector<LabeledEventRow> labels;
  std::vector<std::pair<DepthClass, ModeLabel>> pairs;
  labels.reserve(rows.size());
  for (const auto& r : rows) {
    const double proj = project(model, r.features);
    const ModeLabel label = classify(model, r.features, r.depth);
    labels.push_back({r.event_id, proj, label});
    pairs.emplace_back(r.depth, label);
  }

  if (!model_out.empty()) write_file(model_out, model_to_json(model));
  write_file(labels_out, labels_to_csv(labels));
  print_confusion(confusion_table(pairs));
  std::printf("threshold %.6f (%s), wrote %zu labels to %s\n", model.threshold,
              model.threshold_from_crossing ? "density crossing"
                                            : "midpoint fallback",
              labels.size(), labels_out.c_str());
  return 0;
}

int cmd_analyze(const RunConfig& cfg) {
  const RunReport report = run_analysis(cfg);
  std::printf("events analyzed: %zu (%zu shallow, %zu deep)\n", report.n_events,
              report.n_shallow, report.n_deep);
  std::printf("eligible cells: %zu, tests run: %zu\n", report.n_eligible_cells,
              report.n_tests);
  if (report.confusion_valid) print_confusion(report.confusion);
  if (report.n_eligible_cells == 0) {
    std::printf("notice: no eligible cells (need more than 5 events of both "
                "shallow modes in a cell)\n");
  }
  for (const auto& panel : report.panels) {
    auto count_sel = [](const std::vector<OrderedPPoint>& pts) {
      std::size_t n = 0;
      for (const auto& p : pts) n += p.interesting ? 1 : 0;
      return n;
    };
    std::printf("p%d lag%d: selected within=%zu cross=%zu pooled=%zu",
                panel.periods_per_year, panel.lag, count_sel(panel.within),
                count_sel(panel.cross), count_sel(panel.pooled));
    if (panel.box_within_valid) {
      std::printf("  median within log-odds %+0.3f", panel.box_within.median);
    }
    if (panel.box_cross_valid) {
      std::printf("  median cross log-odds %+0.3f", panel.box_cross.median);
    }
    std::printf("\n");
  }
  std::printf("outputs in %s\n", cfg.out_dir.c_str());
  return 0;
}

int cmd_report(const std::string& results_path, double q,
               const std::string& scope, const std::string& out_dir) {
  const auto results = results_from_csv(read_file(results_path));
  std::set<int> ppys, lags;
  for (const auto& r : results) {
    ppys.insert(r.periods_per_year);
    lags.insert(r.lag);
  }
  if (results.empty()) {
    std::printf("no tests in %s; nothing to select\n", results_path.c_str());
    ppys = {26};
    lags = {1};
  }
  const PanelBundle bundle = assemble_panels(
      results, {ppys.begin(), ppys.end()}, {lags.begin(), lags.end()}, q,
      scope == "per-region" ? FdrScope::PerRegion : FdrScope::Pooled);

  std::filesystem::create_directories(out_dir);
  for (const auto& [name, content] : bundle.data_files) {
    write_file(out_dir + "/" + name, content);
  }
  RunReport report;
  report.panels = bundle.panels;
  render_plots(report, out_dir);
  std::printf("wrote %zu plot-data files and %zu figures to %s\n",
              bundle.data_files.size(), bundle.panels.size(), out_dir.c_str());
  return 0;
}

int cmd_synth(const SyntheticCatalogSpec& spec, bool emit_ndk,
              const std::string& out_dir) {
  const SyntheticCatalog cat = gen_synthetic_catalog(spec);
  std::filesystem::create_directories(out_dir);
  write_file(out_dir + "/events.csv", events_to_csv(cat.events));
  write_file(out_dir + "/labels.csv", labels_to_csv(cat.true_labels));
  if (emit_ndk) write_file(out_dir + "/synthetic.ndk", to_ndk(cat.events));
  std::printf("wrote %zu synthetic events to %s\n", cat.events.size(),
              out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "quakemodes: failure-mode classification and temporal association "
      "tests for moment-tensor earthquake catalogs"};
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "Config file (TOML/INI); subcommand options live in a "
                 "section, e.g. [analyze]. Explicit flags take precedence");

  auto* ingest = app.add_subcommand(
      "ingest", "Parse NDK catalogs into the canonical event table");
  std::vector<std::string> in_catalogs;
  bool in_strict = false;
  double in_min_mw = 3.05;
  SpanOption in_span;
  std::string in_out = "events.csv";
  ingest->add_option("--catalog", in_catalogs, "NDK files (plain or .gz)")
      ->required()
      ->check(CLI::ExistingFile);
  ingest->add_flag("--strict", in_strict, "Abort on the first malformed block");
  auto* in_mw_opt = ingest->add_option(
      "--min-mw", in_min_mw, "Keep only events with Mw strictly above this");
  add_span_option(ingest, in_span);
  ingest->add_option("--out", in_out, "Output CSV path");

  auto* features = app.add_subcommand(
      "features", "Compute the four classifier variables per event");
  std::vector<std::string> ft_catalogs;
  std::string ft_events, ft_out = "features.csv";
  bool ft_strict = false, ft_computed = false;
  double ft_depth_split = 200.0;
  features
      ->add_option("--catalog", ft_catalogs,
                   "NDK files (preferred: catalog axes available)")
      ->check(CLI::ExistingFile);
  features
      ->add_option("--events", ft_events,
                   "Canonical event CSV (axes recomputed from tensors)")
      ->check(CLI::ExistingFile);
  features->add_flag("--strict", ft_strict, "Abort on the first malformed block");
  features->add_flag("--computed-axes", ft_computed,
                     "Ignore catalog axes and recompute from tensors");
  features->add_option("--depth-split", ft_depth_split,
                       "Depth split in km (default 200)");
  features->add_option("--out", ft_out, "Output CSV path");

  auto* classify = app.add_subcommand(
      "classify", "Fit the projection model and label every event");
  std::string cl_features, cl_model_in, cl_model_out = "model.json",
                           cl_labels_out = "labels.csv";
  std::size_t cl_grid = 512;
  classify->add_option("--features", cl_features, "Feature CSV")
      ->required()
      ->check(CLI::ExistingFile);
  classify
      ->add_option("--model", cl_model_in,
                   "Apply an existing model instead of refitting")
      ->check(CLI::ExistingFile);
  classify->add_option("--out-model", cl_model_out, "Where to store the model");
  classify->add_option("--out-labels", cl_labels_out,
                       "Where to store the label table");
  classify->add_option("--kde-grid", cl_grid, "Density evaluation grid size");

  auto* analyze = app.add_subcommand(
      "analyze", "Run the full pipeline and write all result files");
  RunConfig cfg;
  SpanOption an_span;
  std::string an_regions = "preset";
  std::string an_fdr_scope = "pooled";
  std::string an_periods = "26,6", an_lags = "1,2";
  bool an_computed_axes = false;
  cfg.threads = static_cast<int>(std::thread::hardware_concurrency());
  if (cfg.threads < 1) cfg.threads = 1;
  analyze->add_option("--catalog", cfg.catalog_paths, "NDK files (plain or .gz)")
      ->check(CLI::ExistingFile);
  analyze
      ->add_option("--events", cfg.events_csv_path,
                   "Canonical event CSV instead of NDK input")
      ->check(CLI::ExistingFile);
  analyze
      ->add_option("--labels", cfg.labels_csv_path,
                   "Label CSV; skips the classification stage")
      ->check(CLI::ExistingFile);
  analyze->add_option("--min-mw", cfg.min_magnitude,
                      "Magnitude cut (strictly above; default 3.05)");
  analyze->add_option("--depth-split", cfg.depth_split_km,
                      "Depth split in km (default 200)");
  add_span_option(analyze, an_span);
  analyze->add_option("--periods", an_periods,
                      "Periods per year, comma separated subset of 26,6");
  analyze->add_option("--lags", an_lags, "Lags, comma separated subset of 1,2");
  analyze->add_option("--nperm", cfg.n_permutations,
                      "Permutations per test (default 10000)");
  analyze->add_option("--q", cfg.q, "FDR q-value (default 0.01)");
  analyze->add_option("--regions", an_regions, "'preset' or a regions JSON file");
  analyze->add_option("--seed", cfg.seed, "Global seed (default 1977)");
  analyze->add_option("--fdr-scope", an_fdr_scope, "pooled or per-region")
      ->check(CLI::IsMember({"pooled", "per-region"}));
  analyze->add_option("--threads", cfg.threads,
                      "Worker threads (results identical for any count)");
  analyze->add_flag("--computed-axes", an_computed_axes,
                    "Ignore catalog axes and recompute from tensors");
  analyze->add_flag("--strict", cfg.strict_parse,
                    "Abort on the first malformed block");
  analyze->add_option("--kde-grid", cfg.kde_grid_size,
                      "Density evaluation grid size");
  analyze->add_option("--out", cfg.out_dir, "Output directory")->required();

  auto* report = app.add_subcommand(
      "report", "Re-run FDR selection and plots from a results table");
  std::string rp_results, rp_out = "report";
  double rp_q = 0.01;
  std::string rp_scope = "pooled";
  report->add_option("--results", rp_results, "results.csv from an analyze run")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--q", rp_q, "FDR q-value (default 0.01)");
  report->add_option("--fdr-scope", rp_scope, "pooled or per-region")
      ->check(CLI::IsMember({"pooled", "per-region"}));
  report->add_option("--out", rp_out, "Output directory");

  auto* synth = app.add_subcommand(
      "synth", "Generate a synthetic catalog with known temporal coupling");
  SyntheticCatalogSpec synth_spec;
  SpanOption sy_span;
  sy_span.start_year = synth_spec.start_year;
  sy_span.end_year = synth_spec.end_year;
  bool sy_ndk = false;
  std::string sy_out = "synth";
  synth->add_option("--cells", synth_spec.n_cells,
                    "Number of active cells (default 12)");
  synth->add_option("--deep", synth_spec.n_deep,
                    "Number of deep events (default 400)");
  synth->add_option("--base-rate", synth_spec.base_rate,
                    "Per-period firing probability");
  synth->add_option("--self-excite", synth_spec.self_excite,
                    "Hazard boost after same-mode firing");
  synth->add_option("--cross-inhibit", synth_spec.cross_inhibit,
                    "Hazard cut after other-mode firing");
  add_span_option(synth, sy_span);
  synth->add_option("--seed", synth_spec.seed, "Generator seed");
  synth->add_flag("--ndk", sy_ndk, "Also write the catalog in NDK form");
  synth->add_option("--out", sy_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) {
      return cmd_ingest(in_catalogs, in_strict, in_min_mw,
                        in_mw_opt->count() > 0, in_span,
                        ingest->count("--span") > 0, in_out);
    }
    if (features->parsed()) {
      if (ft_catalogs.empty() == ft_events.empty()) {
        std::fprintf(stderr,
                     "features: give exactly one of --catalog / --events\n");
        return 1;
      }
      return cmd_features(ft_catalogs, ft_events, ft_strict, ft_computed,
                          ft_depth_split, ft_out);
    }
    if (classify->parsed()) {
      return cmd_classify(cl_features, cl_model_in, cl_model_out, cl_labels_out,
                          cl_grid);
    }
    if (analyze->parsed()) {
      cfg.start_year = an_span.start_year;
      cfg.end_year = an_span.end_year;
      if (an_regions != "preset") cfg.regions_file = an_regions;
      cfg.fdr_scope = an_fdr_scope == "per-region" ? FdrScope::PerRegion
                                                   : FdrScope::Pooled;
      cfg.prefer_catalog_axes = !an_computed_axes;
      auto parse_list = [](const std::string& s) {
        std::vector<int> out;
        int v = 0;
        bool have = false;
        for (char c : s + ",") {
          if (c == ',') {
            if (have) out.push_back(v);
            v = 0;
            have = false;
          } else if (c >= '0' && c <= '9') {
            v = v * 10 + (c - '0');
            have = true;
          } else {
            throw ConfigError("bad list: " + s);
          }
        }
        return out;
      };
      cfg.periods_per_year = parse_list(an_periods);
      cfg.lags = parse_list(an_lags);
      return cmd_analyze(cfg);
    }
    if (report->parsed()) {
      return cmd_report(rp_results, rp_q, rp_scope, rp_out);
    }
    if (synth->parsed()) {
      synth_spec.start_year = sy_span.start_year;
      synth_spec.end_year = sy_span.end_year;
      return cmd_synth(synth_spec, sy_ndk, sy_out);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
