#pragma once

#include <array>
#include <string>
#include <vector>

#include "quakemodes/catalog.hpp"
#include "quakemodes/features.hpp"

namespace quakemodes {

// Mean-difference projection with the density-crossing threshold.
struct ProjectionModel {
  std::array<double, 4> mean_shallow{};
  std::array<double, 4> mean_deep{};
  std::array<double, 4> direction{};  // unit Euclidean length
  double threshold = 0;
  bool threshold_set = false;
  bool threshold_from_crossing = true;  // false: midpoint-of-means fallback
  double bandwidth_shallow = 0;
  double bandwidth_deep = 0;
};

// Gaussian-kernel density on an equally spaced grid, normalized to unit mass.
struct DensityEstimate {
  std::vector<double> grid;
  std::vector<double> values;
  double bandwidth = 0;
};

// Suffix 1: projection < threshold; suffix 2: projection >= threshold.
enum class ModeLabel { Shallow1, Shallow2, Deep1, Deep2 };

const char* mode_label_name(ModeLabel m);
ModeLabel mode_label_from_name(const std::string& name);
DepthClass mode_label_depth(ModeLabel m);

// Component-wise class means over raw degree values; direction is the
// normalized deep-minus-shallow difference. Threshold left unset.
ProjectionModel fit_projection(const std::vector<FeatureVector>& shallow,
                               const std::vector<FeatureVector>& deep);

// Dot product of (feature - mean_shallow) with the unit direction.
double project(const ProjectionModel& model, const FeatureVector& f);

// Gaussian KDE with bandwidth chosen by unbiased least-squares
// cross-validation over 64 log-spaced candidates in [0.05, 5] times the
// normal-reference bandwidth. Grid spans data range +- 3 bandwidths.
DensityEstimate fit_kde(const std::vector<double>& samples,
                        std::size_t grid_size = 512);

struct ThresholdResult {
  double value = 0;
  bool crossing_found = false;
};

// Crossing of the two densities on a common grid; with several crossings the
// one nearest the midpoint of the two density means wins. Falls back to the
// midpoint when no crossing exists.
ThresholdResult find_threshold(const DensityEstimate& dens_shallow,
                               const DensityEstimate& dens_deep);

ModeLabel classify(const ProjectionModel& model, const FeatureVector& f,
                   DepthClass depth);

struct ConfusionTable {
  // Raw counts by (actual depth, projection side).
  int64_t shallow_suffix1 = 0;
  int64_t shallow_suffix2 = 0;
  int64_t deep_suffix1 = 0;
  int64_t deep_suffix2 = 0;
  // Side-to-prediction mapping, chosen so Deep events are majority-correct.
  bool suffix2_is_predicted_deep = true;
  int64_t shallow_predicted_shallow() const;
  int64_t shallow_predicted_deep() const;
  int64_t deep_predicted_shallow() const;
  int64_t deep_predicted_deep() const;
};

ConfusionTable confusion_table(
    const std::vector<std::pair<DepthClass, ModeLabel>>& labeled);

// Convenience: full fit (projection, per-class KDE, threshold).
ProjectionModel fit_mode_model(const std::vector<FeatureVector>& shallow,
                               const std::vector<FeatureVector>& deep,
                               std::size_t grid_size = 512);

std::string model_to_json(const ProjectionModel& model);
ProjectionModel model_from_json(const std::string& text);

struct LabeledEventRow {
  std::string event_id;
  double projection = 0;
  ModeLabel label = ModeLabel::Shallow1;
};

// event_id,projection,label
std::string labels_to_csv(const std::vector<LabeledEventRow>& rows);
std::vector<LabeledEventRow> labels_from_csv(const std::string& text);

}  // namespace quakemodes
