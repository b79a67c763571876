#include "quakemodes/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "quakemodes/features.hpp"
#include "quakemodes/rng.hpp"
#include "quakemodes/svg.hpp"
#include "quakemodes/time_utils.hpp"

namespace quakemodes {

const char* fdr_scope_name(FdrScope s) {
  return s == FdrScope::Pooled ? "pooled" : "per-region";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed for " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

BoxStats box_stats(std::vector<double> values) {
  BoxStats b;
  b.count = values.size();
  if (values.empty()) return b;
  std::sort(values.begin(), values.end());
  auto quantile = [&](double p) {
    const double idx = p * (static_cast<double>(values.size()) - 1.0);
    const auto lo = static_cast<std::size_t>(std::floor(idx));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = idx - std::floor(idx);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  b.q1 = quantile(0.25);
  b.median = quantile(0.5);
  b.q3 = quantile(0.75);
  const double iqr = b.q3 - b.q1;
  const double lo_fence = b.q1 - 1.5 * iqr;
  const double hi_fence = b.q3 + 1.5 * iqr;
  b.lo_whisker = b.q3;
  b.hi_whisker = b.q1;
  bool any_inside = false;
  for (double v : values) {
    if (v < lo_fence || v > hi_fence) {
      b.outliers.push_back(v);
    } else {
      if (!any_inside) {
        b.lo_whisker = b.hi_whisker = v;
        any_inside = true;
      }
      b.lo_whisker = std::min(b.lo_whisker, v);
      b.hi_whisker = std::max(b.hi_whisker, v);
    }
  }
  if (!any_inside) {
    b.lo_whisker = b.q1;
    b.hi_whisker = b.q3;
  }
  return b;
}

namespace {

struct CellSeries {
  SpatialCell cell;
  PresenceSeries mode1, mode2, pooled;
};

struct TestSpec {
  const CellSeries* cs = nullptr;
  Comparison comparison = Comparison::WithinModes;
  int lag = 1;
  int periods_per_year = 26;
};

std::string test_key(const TestSpec& t) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s/%d/%s/lag%d/p%d",
                t.cs->cell.region_id.c_str(), t.cs->cell.sub_index,
                comparison_name(t.comparison), t.lag, t.periods_per_year);
  return buf;
}

AssociationResult run_one_test(const TestSpec& t, const RunConfig& config) {
  AssociationResult r;
  r.region_id = t.cs->cell.region_id;
  r.sub_index = t.cs->cell.sub_index;
  r.comparison = t.comparison;
  r.lag = t.lag;
  r.periods_per_year = t.periods_per_year;
  const uint64_t seed = derive_seed(config.seed, test_key(t));
  try {
    if (t.comparison == Comparison::Pooled) {
      r.stats = pooled_control(t.cs->pooled.bits, t.lag, config.n_permutations, seed);
    } else {
      r.stats = permutation_calibrate(t.cs->mode1.bits, t.cs->mode2.bits, t.lag,
                                      t.comparison, config.n_permutations, seed);
    }
  } catch (const Error& e) {
    throw Error("test " + test_key(t) + ": " + e.what());
  }
  return r;
}

std::vector<AssociationResult> run_tests(const std::vector<TestSpec>& specs,
                                         const RunConfig& config) {
  std::vector<AssociationResult> results(specs.size());
  const int threads = std::max(1, config.threads);
  if (threads == 1 || specs.size() < 2) {
    for (std::size_t i = 0; i < specs.size(); ++i) {
      results[i] = run_one_test(specs[i], config);
    }
    return results;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= specs.size()) break;
      results[i] = run_one_test(specs[i], config);
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  return results;
}

nlohmann::ordered_json box_to_json(const BoxStats& b) {
  return {{"count", b.count},     {"q1", b.q1},
          {"median", b.median},   {"q3", b.q3},
          {"lo_whisker", b.lo_whisker}, {"hi_whisker", b.hi_whisker},
          {"outliers", b.outliers}};
}

std::string ordered_p_csv(const std::vector<OrderedPPoint>& points) {
  std::string out = "test_id,p_value,rank,bh_threshold,interesting\n";
  char buf[256];
  for (std::size_t k = 0; k < points.size(); ++k) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%zu,%.8f,%d\n",
                  points[k].test_id.c_str(), points[k].p, k + 1,
                  points[k].bh_line, points[k].interesting ? 1 : 0);
    out += buf;
  }
  return out;
}

}  // namespace

PanelBundle assemble_panels(const std::vector<AssociationResult>& results,
                            const std::vector<int>& periods_per_year,
                            const std::vector<int>& lags, double q,
                            FdrScope scope) {
  PanelBundle bundle;
  for (int ppy : periods_per_year) {
    for (int lag : lags) {
      FamilyPanel panel;
      panel.periods_per_year = ppy;
      panel.lag = lag;
      for (Comparison comp : {Comparison::WithinModes, Comparison::CrossModes,
                              Comparison::Pooled}) {
        std::vector<std::size_t> member_idx;
        for (std::size_t i = 0; i < results.size(); ++i) {
          const auto& r = results[i];
          if (r.periods_per_year == ppy && r.lag == lag && r.comparison == comp) {
            member_idx.push_back(i);
          }
        }
        std::vector<double> ps;
        ps.reserve(member_idx.size());
        for (std::size_t i : member_idx) ps.push_back(results[i].stats.p_value);

        std::vector<bool> interesting(member_idx.size(), false);
        if (!member_idx.empty()) {
          if (scope == FdrScope::Pooled) {
            const FdrOutcome outcome = bh_select(ps, q);
            interesting = outcome.interesting;
          } else {
            std::map<std::string, std::vector<std::size_t>> by_region;
            for (std::size_t k = 0; k < member_idx.size(); ++k) {
              by_region[results[member_idx[k]].region_id].push_back(k);
            }
            for (const auto& [region, members] : by_region) {
              (void)region;
              std::vector<double> sub_p;
              for (std::size_t k : members) sub_p.push_back(ps[k]);
              const FdrOutcome outcome = bh_select(sub_p, q);
              for (std::size_t j = 0; j < members.size(); ++j) {
                interesting[members[j]] = outcome.interesting[j];
              }
            }
          }
        }

        // Pooled ascending-p ordering for the panel and its data file.
        std::vector<std::size_t> order(member_idx.size());
        for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return ps[a] < ps[b]; });
        std::vector<OrderedPPoint> points;
        const double m = static_cast<double>(member_idx.size());
        for (std::size_t rank = 0; rank < order.size(); ++rank) {
          const std::size_t k = order[rank];
          OrderedPPoint pt;
          pt.test_id = results[member_idx[k]].test_id();
          pt.p = ps[k];
          pt.bh_line = static_cast<double>(rank + 1) * q / m;
          pt.interesting = interesting[k];
          points.push_back(std::move(pt));
        }
        char name[128];
        std::snprintf(name, sizeof(name), "ordered_p_%s_p%d_lag%d.csv",
                      comparison_name(comp), ppy, lag);
        bundle.data_files.emplace_back(name, ordered_p_csv(points));

        std::vector<double>* selected_percentiles = nullptr;
        std::vector<double> selected_logodds;
        if (comp == Comparison::WithinModes) {
          selected_percentiles = &panel.percentile_within;
        } else if (comp == Comparison::CrossModes) {
          selected_percentiles = &panel.percentile_cross;
        }
        for (std::size_t k = 0; k < member_idx.size(); ++k) {
          if (!interesting[k]) continue;
          const auto& r = results[member_idx[k]];
          if (selected_percentiles) {
            selected_logodds.push_back(r.stats.log_odds);
            selected_percentiles->push_back(r.stats.log_odds_percentile);
          }
        }
        if (comp == Comparison::WithinModes && !selected_logodds.empty()) {
          panel.box_within = box_stats(selected_logodds);
          panel.box_within_valid = true;
        }
        if (comp == Comparison::CrossModes && !selected_logodds.empty()) {
          panel.box_cross = box_stats(selected_logodds);
          panel.box_cross_valid = true;
        }

        if (comp == Comparison::WithinModes) panel.within = std::move(points);
        else if (comp == Comparison::CrossModes) panel.cross = std::move(points);
        else panel.pooled = std::move(points);
      }
      bundle.panels.push_back(std::move(panel));
    }
  }

  // Selected log-odds data files (box plot and percentile panels).
  for (const auto& panel : bundle.panels) {
    std::string csv = "comparison,test_id,log_odds,log_odds_percentile\n";
    char buf[256];
    for (const auto* points : {&panel.within, &panel.cross}) {
      for (const auto& pt : *points) {
        if (!pt.interesting) continue;
        for (const auto& r : results) {
          if (r.test_id() == pt.test_id) {
            std::snprintf(buf, sizeof(buf), "%s,%s,%.10g,%.6f\n",
                          comparison_name(r.comparison), pt.test_id.c_str(),
                          r.stats.log_odds, r.stats.log_odds_percentile);
            csv += buf;
            break;
          }
        }
      }
    }
    char name[128];
    std::snprintf(name, sizeof(name), "logodds_selected_p%d_lag%d.csv",
                  panel.periods_per_year, panel.lag);
    bundle.data_files.emplace_back(name, csv);
  }
  return bundle;
}

RunReport run_analysis(const RunConfig& config) {
  if (config.out_dir.empty()) throw ConfigError("output directory not set");
  if (config.start_year > config.end_year) {
    throw ConfigError("span start year after end year");
  }
  if (config.periods_per_year.empty() || config.lags.empty()) {
    throw ConfigError("need at least one period length and one lag");
  }
  for (int ppy : config.periods_per_year) {
    if (ppy != 26 && ppy != 6) {
      throw ConfigError("periods per year must be 26 or 6");
    }
  }
  for (int lag : config.lags) {
    if (lag != 1 && lag != 2) throw ConfigError("lag must be 1 or 2");
  }
  if (!(config.q > 0.0 && config.q < 1.0)) throw ConfigError("q must lie in (0,1)");
  if (config.n_permutations < 1) throw ConfigError("need at least 1 permutation");

  std::vector<std::string> notices;

  // Stage 1: ingest and filter.
  std::vector<MomentTensorRecord> events;
  ParseStats parse_stats;
  if (!config.catalog_paths.empty()) {
    for (const auto& path : config.catalog_paths) {
      auto batch = read_ndk_file(
          path, config.strict_parse ? ParseMode::Strict : ParseMode::Lenient,
          &parse_stats);
      events.insert(events.end(), batch.begin(), batch.end());
    }
  } else if (!config.events_csv_path.empty()) {
    events = events_from_csv(read_file(config.events_csv_path));
    parse_stats.parsed = events.size();
  } else {
    throw ConfigError("no catalog or event table input");
  }
  const std::size_t n_loaded = events.size();
  events = filter_events(events, config.min_magnitude,
                         year_start_epoch(config.start_year),
                         year_start_epoch(config.end_year + 1));

  RunReport report;
  report.n_events = events.size();

  // Stage 2+3: features and classification (or a supplied label table).
  std::vector<LabeledEvent> labeled;
  std::vector<LabeledEventRow> label_rows;
  std::vector<EventFeatures> feature_rows;
  std::vector<std::pair<DepthClass, ModeLabel>> depth_label_pairs;

  if (!config.labels_csv_path.empty()) {
    const auto rows = labels_from_csv(read_file(config.labels_csv_path));
    std::map<std::string, const LabeledEventRow*> by_id;
    for (const auto& r : rows) by_id[r.event_id] = &r;
    std::size_t unlabeled = 0;
    for (const auto& e : events) {
      const auto it = by_id.find(e.event_id);
      if (it == by_id.end()) {
        ++unlabeled;
        continue;
      }
      labeled.push_back({e.event_id, e.origin_time, e.latitude, e.longitude,
                         it->second->label});
      label_rows.push_back(*it->second);
      depth_label_pairs.emplace_back(depth_class(e, config.depth_split_km),
                                     it->second->label);
    }
    if (unlabeled > 0) {
      notices.push_back(std::to_string(unlabeled) +
                        " events without labels were skipped");
    }
  } else {
    std::vector<FeatureVector> shallow_fvs, deep_fvs;
    std::vector<DepthClass> depths(events.size());
    std::vector<FeatureVector> fvs(events.size());
    for (std::size_t i = 0; i < events.size(); ++i) {
      fvs[i] = extract_features(events[i], config.prefer_catalog_axes);
      depths[i] = depth_class(events[i], config.depth_split_km);
      feature_rows.push_back({events[i].event_id, fvs[i], depths[i]});
      (depths[i] == DepthClass::Shallow ? shallow_fvs : deep_fvs).push_back(fvs[i]);
    }
    if (shallow_fvs.empty() || deep_fvs.empty()) {
      throw EmptyClass("classification needs events on both sides of the depth split");
    }
    report.model = fit_mode_model(shallow_fvs, deep_fvs, config.kde_grid_size);
    for (std::size_t i = 0; i < events.size(); ++i) {
      const double proj = project(*report.model, fvs[i]);
      const ModeLabel label = classify(*report.model, fvs[i], depths[i]);
      labeled.push_back({events[i].event_id, events[i].origin_time,
                         events[i].latitude, events[i].longitude, label});
      label_rows.push_back({events[i].event_id, proj, label});
      depth_label_pairs.emplace_back(depths[i], label);
    }
  }

  if (!depth_label_pairs.empty()) {
    report.confusion = confusion_table(depth_label_pairs);
    report.confusion_valid = true;
  }
  for (const auto& [depth, label] : depth_label_pairs) {
    (void)label;
    (depth == DepthClass::Shallow ? report.n_shallow : report.n_deep)++;
  }

  // Stage 4: tiling and eligibility.
  const std::vector<RegionSpec> regions =
      config.regions_file.empty() ? ring_of_fire_preset()
                                  : regions_from_json(read_file(config.regions_file));
  const std::vector<SpatialCell> grid = make_grid(regions);

  std::vector<LabeledEvent> shallow_events;
  for (const auto& ev : labeled) {
    if (ev.label == ModeLabel::Shallow1 || ev.label == ModeLabel::Shallow2) {
      shallow_events.push_back(ev);
    }
  }
  const std::vector<SpatialCell> eligible = eligible_cells(grid, shallow_events);
  report.n_eligible_cells = eligible.size();
  if (eligible.empty()) {
    notices.push_back("no eligible cells: no sub-cell holds more than 5 "
                      "events of both shallow modes");
  }

  // Stage 5: presence series per period length.
  std::map<int, std::vector<CellSeries>> series_by_ppy;
  for (int ppy : config.periods_per_year) {
    auto& list = series_by_ppy[ppy];
    for (const auto& cell : eligible) {
      std::vector<int64_t> t1, t2, tall;
      for (const auto& ev : shallow_events) {
        if (!cell.contains(ev.lat, ev.lon)) continue;
        (ev.label == ModeLabel::Shallow1 ? t1 : t2).push_back(ev.time);
        tall.push_back(ev.time);
      }
      CellSeries cs;
      cs.cell = cell;
      cs.mode1 = build_presence(cell, PresenceMode::Shallow1, t1, ppy,
                                config.start_year, config.end_year);
      cs.mode2 = build_presence(cell, PresenceMode::Shallow2, t2, ppy,
                                config.start_year, config.end_year);
      cs.pooled = build_presence(cell, PresenceMode::Pooled, tall, ppy,
                                 config.start_year, config.end_year);
      list.push_back(std::move(cs));
    }
  }

  // Stage 6: association tests, order fixed by (ppy, lag, cell, comparison).
  std::vector<TestSpec> specs;
  for (int ppy : config.periods_per_year) {
    for (int lag : config.lags) {
      for (const auto& cs : series_by_ppy[ppy]) {
        for (Comparison comp : {Comparison::WithinModes, Comparison::CrossModes,
                                Comparison::Pooled}) {
          specs.push_back({&cs, comp, lag, ppy});
        }
      }
    }
  }
  const std::vector<AssociationResult> results = run_tests(specs, config);
  report.n_tests = results.size();

  // Stage 7: FDR per (comparison, lag, periods_per_year) family.
  PanelBundle bundle = assemble_panels(results, config.periods_per_year,
                                       config.lags, config.q, config.fdr_scope);
  report.panels = std::move(bundle.panels);

  // Stage 8: write everything.
  std::filesystem::create_directories(config.out_dir);
  const std::string dir = config.out_dir + "/";

  write_file(dir + "events.csv", events_to_csv(events));
  if (!feature_rows.empty()) {
    write_file(dir + "features.csv", features_to_csv(feature_rows));
  }
  if (report.model) {
    write_file(dir + "model.json", model_to_json(*report.model));
  }
  write_file(dir + "labels.csv", labels_to_csv(label_rows));
  for (int ppy : config.periods_per_year) {
    std::vector<PresenceSeries> flat;
    for (const auto& cs : series_by_ppy[ppy]) {
      flat.push_back(cs.mode1);
      flat.push_back(cs.mode2);
      flat.push_back(cs.pooled);
    }
    write_file(dir + "presence_p" + std::to_string(ppy) + ".csv",
               presence_to_csv(flat));
  }
  write_file(dir + "results.csv", results_to_csv(results));
  for (const auto& [name, content] : bundle.data_files) {
    write_file(dir + name, content);
  }

  // report.json
  {
    nlohmann::ordered_json j;
    j["notices"] = notices;
    j["n_events_loaded"] = n_loaded;
    j["n_events_analyzed"] = report.n_events;
    j["n_blocks_skipped"] = parse_stats.skipped_blocks;
    j["n_shallow"] = report.n_shallow;
    j["n_deep"] = report.n_deep;
    j["n_eligible_cells"] = report.n_eligible_cells;
    j["n_tests"] = report.n_tests;
    if (report.confusion_valid) {
      const auto& c = report.confusion;
      j["confusion"] = {
          {"shallow_suffix1", c.shallow_suffix1},
          {"shallow_suffix2", c.shallow_suffix2},
          {"deep_suffix1", c.deep_suffix1},
          {"deep_suffix2", c.deep_suffix2},
          {"suffix2_is_predicted_deep", c.suffix2_is_predicted_deep},
          {"shallow_predicted_shallow", c.shallow_predicted_shallow()},
          {"shallow_predicted_deep", c.shallow_predicted_deep()},
          {"deep_predicted_shallow", c.deep_predicted_shallow()},
          {"deep_predicted_deep", c.deep_predicted_deep()},
      };
    }
    j["panels"] = nlohmann::ordered_json::array();
    for (const auto& p : report.panels) {
      nlohmann::ordered_json pj;
      pj["periods_per_year"] = p.periods_per_year;
      pj["lag"] = p.lag;
      pj["n_within"] = p.within.size();
      pj["n_cross"] = p.cross.size();
      pj["n_pooled"] = p.pooled.size();
      auto count_sel = [](const std::vector<OrderedPPoint>& pts) {
        std::size_t n = 0;
        for (const auto& x : pts) n += x.interesting ? 1 : 0;
        return n;
      };
      pj["n_selected_within"] = count_sel(p.within);
      pj["n_selected_cross"] = count_sel(p.cross);
      pj["n_selected_pooled"] = count_sel(p.pooled);
      pj["box_within"] = p.box_within_valid ? box_to_json(p.box_within)
                                            : nlohmann::ordered_json(nullptr);
      pj["box_cross"] = p.box_cross_valid ? box_to_json(p.box_cross)
                                          : nlohmann::ordered_json(nullptr);
      pj["percentile_within"] = p.percentile_within;
      pj["percentile_cross"] = p.percentile_cross;
      j["panels"].push_back(std::move(pj));
    }
    write_file(dir + "report.json", j.dump(2) + "\n");
  }

  // run_meta.json: every tunable that affects results.
  {
    nlohmann::ordered_json j;
    j["tool"] = "quakemodes";
    j["config"] = {
        {"catalog_paths", config.catalog_paths},
        {"events_csv_path", config.events_csv_path},
        {"labels_csv_path", config.labels_csv_path},
        {"min_magnitude", config.min_magnitude},
        {"depth_split_km", config.depth_split_km},
        {"start_year", config.start_year},
        {"end_year", config.end_year},
        {"periods_per_year", config.periods_per_year},
        {"lags", config.lags},
        {"n_permutations", config.n_permutations},
        {"q", config.q},
        {"regions_file", config.regions_file},
        {"seed", config.seed},
        {"fdr_scope", fdr_scope_name(config.fdr_scope)},
        {"prefer_catalog_axes", config.prefer_catalog_axes},
        {"strict_parse", config.strict_parse},
        {"kde_grid_size", config.kde_grid_size},
    };
    nlohmann::ordered_json regions_json = nlohmann::ordered_json::array();
    for (const auto& r : regions) {
      regions_json.push_back({{"region_id", r.region_id},
                              {"lat_min", r.lat_min},
                              {"lon_min", r.lon_min}});
    }
    j["regions"] = std::move(regions_json);
    j["rules"] = {
        {"magnitude_filter", "strictly greater than min_magnitude"},
        {"depth_rule", "Deep iff depth_km > depth_split_km"},
        {"eligibility", "more than 5 events of each shallow mode per cell"},
        {"p_value_ties", "permuted chi-square >= observed counts toward p"},
        {"log_odds_percentile", "share of permuted log-odds strictly below observed"},
        {"log_odds_correction", "half added to every cell"},
        {"classify_boundary", "projection >= threshold is suffix 2"},
        {"permutation_scheme",
         "full vectors shuffled independently, lagged pair rebuilt"},
        {"seed_derivation",
         "per test: splitmix64(fnv1a64(region/sub/comparison/lag/ppy) xor "
         "global_seed * golden_ratio)"},
    };
    if (report.model) {
      j["model"] = {
          {"threshold", report.model->threshold},
          {"threshold_from_crossing", report.model->threshold_from_crossing},
          {"bandwidth_shallow", report.model->bandwidth_shallow},
          {"bandwidth_deep", report.model->bandwidth_deep},
      };
    }
    write_file(dir + "run_meta.json", j.dump(2) + "\n");
  }

  render_plots(report, config.out_dir);
  return report;
}

namespace {

void draw_ordered_p(SvgCanvas& svg, const PanelFrame& frame,
                    const std::vector<OrderedPPoint>& points,
                    const std::string& title) {
  if (points.empty()) {
    svg.rect(frame.x0, frame.y0, frame.w, frame.h, "none", "#444444");
    svg.text(frame.x0 + frame.w / 2, frame.y0 - 6, title, 12, "middle");
    svg.text(frame.x0 + frame.w / 2, frame.y0 + frame.h / 2, "no tests", 11,
             "middle");
    return;
  }
  frame.draw_axes(svg, title, "rank", "p-value");
  const double m = static_cast<double>(points.size());
  svg.line(frame.px(1), frame.py(points.front().bh_line), frame.px(m),
           frame.py(points.back().bh_line), "#2060c0", 1.2);
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& pt = points[k];
    svg.circle(frame.px(static_cast<double>(k + 1)), frame.py(pt.p), 1.6,
               pt.interesting ? "#cc2222" : "#222222");
  }
}

void draw_box(SvgCanvas& svg, const PanelFrame& frame, double x,
              const BoxStats& b, const std::string& color) {
  const double half = 0.28;
  svg.rect(frame.px(x - half), frame.py(b.q3), frame.px(x + half) - frame.px(x - half),
           frame.py(b.q1) - frame.py(b.q3), "none", color);
  svg.line(frame.px(x - half), frame.py(b.median), frame.px(x + half),
           frame.py(b.median), color, 2.0);
  svg.line(frame.px(x), frame.py(b.q3), frame.px(x), frame.py(b.hi_whisker), color);
  svg.line(frame.px(x), frame.py(b.q1), frame.px(x), frame.py(b.lo_whisker), color);
  svg.line(frame.px(x - half / 2), frame.py(b.hi_whisker), frame.px(x + half / 2),
           frame.py(b.hi_whisker), color);
  svg.line(frame.px(x - half / 2), frame.py(b.lo_whisker), frame.px(x + half / 2),
           frame.py(b.lo_whisker), color);
  for (double v : b.outliers) svg.circle(frame.px(x), frame.py(v), 2.0, color);
}

void draw_histogram(SvgCanvas& svg, const PanelFrame& frame,
                    const std::vector<double>& values, const std::string& color,
                    double max_count) {
  const int bins = 20;
  std::vector<int> counts(bins, 0);
  for (double v : values) {
    int b = static_cast<int>(v * bins);
    if (b >= bins) b = bins - 1;
    if (b < 0) b = 0;
    counts[b]++;
  }
  for (int b = 0; b < bins; ++b) {
    if (counts[b] == 0) continue;
    const double x0 = frame.px(static_cast<double>(b) / bins);
    const double x1 = frame.px(static_cast<double>(b + 1) / bins);
    const double y = frame.py(counts[b] / max_count);
    svg.rect(x0 + 1, y, x1 - x0 - 2, frame.y0 + frame.h - y, color);
  }
}

}  // namespace

void render_plots(const RunReport& report, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  for (const auto& panel : report.panels) {
    SvgCanvas svg(1240, 760);
    char title[160];
    std::snprintf(title, sizeof(title),
                  "lag %d, %d periods/year: ordered permutation p-values and "
                  "selected log-odds",
                  panel.lag, panel.periods_per_year);
    svg.text(620, 24, title, 15, "middle");

    auto p_range = [](const std::vector<OrderedPPoint>& pts) {
      const double m = pts.empty() ? 1.0 : static_cast<double>(pts.size());
      return PanelFrame{0, 0, 0, 0, 1.0, std::max(m, 2.0), 0.0, 1.0};
    };

    const double top_y = 60, top_h = 260, panel_w = 340, gap = 60;
    const char* names[3] = {"within modes", "cross modes", "pooled control"};
    const std::vector<OrderedPPoint>* pts[3] = {&panel.within, &panel.cross,
                                                &panel.pooled};
    for (int i = 0; i < 3; ++i) {
      PanelFrame f = p_range(*pts[i]);
      f.x0 = 60 + i * (panel_w + gap);
      f.y0 = top_y;
      f.w = panel_w;
      f.h = top_h;
      draw_ordered_p(svg, f, *pts[i], names[i]);
    }

    // Lower left: paired log-odds box plot for FDR-selected tests.
    {
      PanelFrame f{60, 420, 480, 280, 0.5, 2.5, -1.0, 1.0};
      if (panel.box_within_valid || panel.box_cross_valid) {
        double lo = 0, hi = 0;
        auto widen = [&](const BoxStats& b, bool valid) {
          if (!valid) return;
          lo = std::min({lo, b.lo_whisker, b.q1});
          hi = std::max({hi, b.hi_whisker, b.q3});
          for (double v : b.outliers) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
        };
        widen(panel.box_within, panel.box_within_valid);
        widen(panel.box_cross, panel.box_cross_valid);
        const double pad = 0.1 * std::max(hi - lo, 0.5);
        f.ymin = lo - pad;
        f.ymax = hi + pad;
        f.draw_axes(svg, "log-odds of FDR-selected tests", "", "log odds");
        svg.line(f.px(f.xmin), f.py(0.0), f.px(f.xmax), f.py(0.0), "#999999", 1.0,
                 "4,3");
        if (panel.box_within_valid) draw_box(svg, f, 1.0, panel.box_within, "#2060c0");
        if (panel.box_cross_valid) draw_box(svg, f, 2.0, panel.box_cross, "#cc6600");
        svg.text(f.px(1.0), f.y0 + f.h + 15, "within", 10, "middle");
        svg.text(f.px(2.0), f.y0 + f.h + 15, "cross", 10, "middle");
      } else {
        svg.rect(f.x0, f.y0, f.w, f.h, "none", "#444444");
        svg.text(f.x0 + f.w / 2, f.y0 - 6, "log-odds of FDR-selected tests", 12,
                 "middle");
        svg.text(f.x0 + f.w / 2, f.y0 + f.h / 2, "no selected tests", 11,
                 "middle");
      }
    }

    // Lower right: log-odds percentile histogram for selected tests.
    {
      PanelFrame f{640, 420, 480, 280, 0.0, 1.0, 0.0, 1.0};
      const auto& pw = panel.percentile_within;
      const auto& pc = panel.percentile_cross;
      if (pw.empty() && pc.empty()) {
        svg.rect(f.x0, f.y0, f.w, f.h, "none", "#444444");
        svg.text(f.x0 + f.w / 2, f.y0 - 6,
                 "share of permuted log-odds below observed", 12, "middle");
        svg.text(f.x0 + f.w / 2, f.y0 + f.h / 2, "no selected tests", 11,
                 "middle");
      } else {
        double max_count = 1;
        for (const auto* vals : {&pw, &pc}) {
          std::vector<int> counts(20, 0);
          for (double v : *vals) {
            int b = static_cast<int>(v * 20);
            if (b >= 20) b = 19;
            counts[b]++;
          }
          for (int c : counts) max_count = std::max(max_count, static_cast<double>(c));
        }
        f.ymax = max_count;
        f.draw_axes(svg, "share of permuted log-odds below observed",
                    "percentile", "tests");
        draw_histogram(svg, f, pw, "rgba(32,96,192,0.55)", max_count);
        draw_histogram(svg, f, pc, "rgba(204,102,0,0.55)", max_count);
        svg.rect(f.x0 + 8, f.y0 + 8, 10, 10, "rgba(32,96,192,0.55)");
        svg.text(f.x0 + 22, f.y0 + 17, "within", 10);
        svg.rect(f.x0 + 78, f.y0 + 8, 10, 10, "rgba(204,102,0,0.55)");
        svg.text(f.x0 + 92, f.y0 + 17, "cross", 10);
      }
    }

    char name[128];
    std::snprintf(name, sizeof(name), "%s/figure_p%d_lag%d.svg",
                  out_dir.c_str(), panel.periods_per_year, panel.lag);
    write_file(name, svg.finish());
  }
}

}  // namespace quakemodes
