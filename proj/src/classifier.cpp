#include "quakemodes/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace quakemodes {

namespace {

constexpr double kSqrtPi = 1.7724538509055160;

std::array<double, 4> feature_array(const FeatureVector& f) {
  return {f.az1, f.az2, f.az3, f.plunge3};
}

std::array<double, 4> mean_features(const std::vector<FeatureVector>& fs) {
  std::array<double, 4> m{};
  for (const auto& f : fs) {
    const auto a = feature_array(f);
    for (int i = 0; i < 4; ++i) m[i] += a[i];
  }
  for (int i = 0; i < 4; ++i) m[i] /= static_cast<double>(fs.size());
  return m;
}

double sample_sd(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  double mean = 0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1));
}

// Type-7 quantile (linear interpolation of order statistics).
double quantile(std::vector<double> x, double p) {
  std::sort(x.begin(), x.end());
  const double idx = p * (static_cast<double>(x.size()) - 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(idx));
  const auto hi = std::min(lo + 1, x.size() - 1);
  const double frac = idx - std::floor(idx);
  return x[lo] + frac * (x[hi] - x[lo]);
}

double normal_reference_bandwidth(const std::vector<double>& x) {
  const double sd = sample_sd(x);
  const double iqr = quantile(x, 0.75) - quantile(x, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (spread <= 0) spread = sd;
  return 0.9 * spread * std::pow(static_cast<double>(x.size()), -0.2);
}

// Unbiased least-squares CV criterion for a Gaussian kernel, written over
// unordered pair distances:
//   LSCV(h) = 1/(2 n h sqrt(pi))
//           + sum_pairs w * [ (2/n^2) K_{h*sqrt2}(d) - (4/(n(n-1))) K_h(d) ]
// with K_h(u) = exp(-u^2/(2h^2)) / (h sqrt(2 pi)). Using
// e = exp(-d^2/(4h^2)): K_{h*sqrt2}(d) = e / (2 h sqrt(pi)) and
// K_h(d) = e^2 / (h sqrt(2 pi)).
double lscv_criterion(double h, double n, const std::vector<double>& dist2,
                      const std::vector<double>& weight) {
  const double inv4h2 = 1.0 / (4.0 * h * h);
  double sum_wide = 0;   // sum w * e
  double sum_tight = 0;  // sum w * e^2
  for (std::size_t i = 0; i < dist2.size(); ++i) {
    const double e = std::exp(-dist2[i] * inv4h2);
    sum_wide += weight[i] * e;
    sum_tight += weight[i] * e * e;
  }
  const double sqrt2pi = std::sqrt(2.0 * M_PI);
  const double integral_term =
      1.0 / (2.0 * n * h * kSqrtPi) + (2.0 / (n * n)) * sum_wide / (2.0 * h * kSqrtPi);
  const double loo_term = (4.0 / (n * (n - 1.0))) * sum_tight / (h * sqrt2pi);
  return integral_term - loo_term;
}

// Pairwise squared distances, exact for small n and binned for large n.
void pair_distances(const std::vector<double>& x, std::vector<double>& dist2,
                    std::vector<double>& weight) {
  const std::size_t n = x.size();
  if (n <= 1024) {
    dist2.reserve(n * (n - 1) / 2);
    weight.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = x[i] - x[j];
        dist2.push_back(d * d);
        weight.push_back(1.0);
      }
    }
    return;
  }
  const std::size_t nb = 1024;
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double lo = *lo_it, hi = *hi_it;
  const double w = (hi - lo) / static_cast<double>(nb - 1);
  std::vector<double> counts(nb, 0.0);
  for (double v : x) {
    auto k = static_cast<std::size_t>((v - lo) / w + 0.5);
    if (k >= nb) k = nb - 1;
    counts[k] += 1.0;
  }
  dist2.reserve(nb * (nb + 1) / 2);
  weight.reserve(nb * (nb + 1) / 2);
  for (std::size_t m = 0; m < nb; ++m) {
    double cnt = 0;
    if (m == 0) {
      for (double c : counts) cnt += c * (c - 1.0) / 2.0;
    } else {
      for (std::size_t k = 0; k + m < nb; ++k) cnt += counts[k] * counts[k + m];
    }
    if (cnt > 0) {
      const double d = static_cast<double>(m) * w;
      dist2.push_back(d * d);
      weight.push_back(cnt);
    }
  }
}

}  // namespace

const char* mode_label_name(ModeLabel m) {
  switch (m) {
    case ModeLabel::Shallow1: return "Shallow1";
    case ModeLabel::Shallow2: return "Shallow2";
    case ModeLabel::Deep1: return "Deep1";
    case ModeLabel::Deep2: return "Deep2";
  }
  return "Shallow1";
}

ModeLabel mode_label_from_name(const std::string& name) {
  if (name == "Shallow1") return ModeLabel::Shallow1;
  if (name == "Shallow2") return ModeLabel::Shallow2;
  if (name == "Deep1") return ModeLabel::Deep1;
  if (name == "Deep2") return ModeLabel::Deep2;
  throw Error("unknown mode label: " + name);
}

DepthClass mode_label_depth(ModeLabel m) {
  return (m == ModeLabel::Deep1 || m == ModeLabel::Deep2) ? DepthClass::Deep
                                                          : DepthClass::Shallow;
}

ProjectionModel fit_projection(const std::vector<FeatureVector>& shallow,
                               const std::vector<FeatureVector>& deep) {
  if (shallow.empty()) throw EmptyClass("no shallow feature vectors");
  if (deep.empty()) throw EmptyClass("no deep feature vectors");

  ProjectionModel model;
  model.mean_shallow = mean_features(shallow);
  model.mean_deep = mean_features(deep);

  double norm2 = 0;
  double max_mean = 1.0;
  for (int i = 0; i < 4; ++i) {
    model.direction[i] = model.mean_deep[i] - model.mean_shallow[i];
    norm2 += model.direction[i] * model.direction[i];
    max_mean = std::max({max_mean, std::fabs(model.mean_shallow[i]),
                         std::fabs(model.mean_deep[i])});
  }
  const double norm = std::sqrt(norm2);
  if (norm < 1e-9 * max_mean) {
    throw EmptyDirection("class means coincide, direction vector is zero");
  }
  for (int i = 0; i < 4; ++i) model.direction[i] /= norm;
  return model;
}

double project(const ProjectionModel& model, const FeatureVector& f) {
  const auto a = feature_array(f);
  double dot = 0;
  for (int i = 0; i < 4; ++i) dot += (a[i] - model.mean_shallow[i]) * model.direction[i];
  return dot;
}

DensityEstimate fit_kde(const std::vector<double>& samples,
                        std::size_t grid_size) {
  if (samples.size() < 10) {
    throw TooFewSamples("need at least 10 samples, got " +
                        std::to_string(samples.size()));
  }
  if (sample_sd(samples) <= 0) {
    throw TooFewSamples("zero variance: all samples equal");
  }

  const double h_ref = normal_reference_bandwidth(samples);
  std::vector<double> dist2, weight;
  pair_distances(samples, dist2, weight);

  const int n_candidates = 64;
  const double lo_factor = 0.05, hi_factor = 5.0;
  double best_h = h_ref, best_score = 0;
  bool first = true;
  const double n = static_cast<double>(samples.size());
  for (int k = 0; k < n_candidates; ++k) {
    const double t = static_cast<double>(k) / (n_candidates - 1);
    const double h = h_ref * lo_factor * std::pow(hi_factor / lo_factor, t);
    const double score = lscv_criterion(h, n, dist2, weight);
    if (first || score < best_score) {
      best_score = score;
      best_h = h;
      first = false;
    }
  }

  DensityEstimate out;
  out.bandwidth = best_h;
  const auto [min_it, max_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *min_it - 3.0 * best_h;
  const double hi = *max_it + 3.0 * best_h;
  out.grid.resize(grid_size);
  out.values.assign(grid_size, 0.0);

  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  const double inv2h2 = 1.0 / (2.0 * best_h * best_h);
  const double norm_const = 1.0 / (n * best_h * std::sqrt(2.0 * M_PI));
  const double cutoff = 10.0 * best_h;
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double g = lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(grid_size - 1);
    out.grid[i] = g;
    auto lo_it = std::lower_bound(sorted.begin(), sorted.end(), g - cutoff);
    auto hi_it = std::upper_bound(sorted.begin(), sorted.end(), g + cutoff);
    double s = 0;
    for (auto it = lo_it; it != hi_it; ++it) {
      const double d = g - *it;
      s += std::exp(-d * d * inv2h2);
    }
    out.values[i] = s * norm_const;
  }

  // Normalize to unit trapezoid mass.
  double integral = 0;
  for (std::size_t i = 0; i + 1 < grid_size; ++i) {
    integral += 0.5 * (out.values[i] + out.values[i + 1]) *
                (out.grid[i + 1] - out.grid[i]);
  }
  for (double& v : out.values) v /= integral;
  return out;
}

namespace {

double density_mean(const DensityEstimate& d) {
  double m = 0, mass = 0;
  for (std::size_t i = 0; i + 1 < d.grid.size(); ++i) {
    const double dx = d.grid[i + 1] - d.grid[i];
    m += 0.5 * (d.grid[i] * d.values[i] + d.grid[i + 1] * d.values[i + 1]) * dx;
    mass += 0.5 * (d.values[i] + d.values[i + 1]) * dx;
  }
  return m / mass;
}

double interp_density(const DensityEstimate& d, double x) {
  if (x <= d.grid.front() || x >= d.grid.back()) return 0.0;
  const auto it = std::upper_bound(d.grid.begin(), d.grid.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - d.grid.begin()) - 1;
  const double t = (x - d.grid[i]) / (d.grid[i + 1] - d.grid[i]);
  return d.values[i] + t * (d.values[i + 1] - d.values[i]);
}

}  // namespace

ThresholdResult find_threshold(const DensityEstimate& dens_shallow,
                               const DensityEstimate& dens_deep) {
  const double lo = std::min(dens_shallow.grid.front(), dens_deep.grid.front());
  const double hi = std::max(dens_shallow.grid.back(), dens_deep.grid.back());
  const std::size_t m = 2048;

  std::vector<double> xs(m), diff(m);
  double max_abs = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) /
                              static_cast<double>(m - 1);
    xs[i] = x;
    diff[i] = interp_density(dens_shallow, x) - interp_density(dens_deep, x);
    max_abs = std::max(max_abs, std::fabs(diff[i]));
  }

  const double midpoint =
      0.5 * (density_mean(dens_shallow) + density_mean(dens_deep));

  ThresholdResult out;
  if (max_abs == 0) {
    out.value = midpoint;
    out.crossing_found = false;
    return out;
  }

  // Sign transitions, tolerating runs of (near-)zero difference between the
  // two signed regions; the crossing interpolates between the endpoints.
  const double tol = 1e-12 * max_abs;
  std::vector<double> candidates;
  std::size_t last_idx = 0;
  int last_sign = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const int sign = diff[i] > tol ? 1 : (diff[i] < -tol ? -1 : 0);
    if (sign == 0) continue;
    if (last_sign != 0 && sign != last_sign) {
      const double da = std::fabs(diff[last_idx]);
      const double db = std::fabs(diff[i]);
      candidates.push_back(xs[last_idx] +
                           (xs[i] - xs[last_idx]) * da / (da + db));
    }
    last_sign = sign;
    last_idx = i;
  }

  if (candidates.empty()) {
    out.value = midpoint;
    out.crossing_found = false;
    return out;
  }
  out.crossing_found = true;
  out.value = candidates[0];
  for (double c : candidates) {
    if (std::fabs(c - midpoint) < std::fabs(out.value - midpoint)) out.value = c;
  }
  return out;
}

ModeLabel classify(const ProjectionModel& model, const FeatureVector& f,
                   DepthClass depth) {
  const bool suffix2 = project(model, f) >= model.threshold;
  if (depth == DepthClass::Shallow) {
    return suffix2 ? ModeLabel::Shallow2 : ModeLabel::Shallow1;
  }
  return suffix2 ? ModeLabel::Deep2 : ModeLabel::Deep1;
}

int64_t ConfusionTable::shallow_predicted_shallow() const {
  return suffix2_is_predicted_deep ? shallow_suffix1 : shallow_suffix2;
}
int64_t ConfusionTable::shallow_predicted_deep() const {
  return suffix2_is_predicted_deep ? shallow_suffix2 : shallow_suffix1;
}
int64_t ConfusionTable::deep_predicted_shallow() const {
  return suffix2_is_predicted_deep ? deep_suffix1 : deep_suffix2;
}
int64_t ConfusionTable::deep_predicted_deep() const {
  return suffix2_is_predicted_deep ? deep_suffix2 : deep_suffix1;
}

ConfusionTable confusion_table(
    const std::vector<std::pair<DepthClass, ModeLabel>>& labeled) {
  ConfusionTable t;
  for (const auto& [depth, label] : labeled) {
    const bool suffix2 = label == ModeLabel::Shallow2 || label == ModeLabel::Deep2;
    if (depth == DepthClass::Shallow) {
      (suffix2 ? t.shallow_suffix2 : t.shallow_suffix1)++;
    } else {
      (suffix2 ? t.deep_suffix2 : t.deep_suffix1)++;
    }
  }
  t.suffix2_is_predicted_deep = t.deep_suffix2 >= t.deep_suffix1;
  return t;
}

ProjectionModel fit_mode_model(const std::vector<FeatureVector>& shallow,
                               const std::vector<FeatureVector>& deep,
                               std::size_t grid_size) {
  ProjectionModel model = fit_projection(shallow, deep);

  std::vector<double> proj_shallow, proj_deep;
  proj_shallow.reserve(shallow.size());
  proj_deep.reserve(deep.size());
  for (const auto& f : shallow) proj_shallow.push_back(project(model, f));
  for (const auto& f : deep) proj_deep.push_back(project(model, f));

  const DensityEstimate ds = fit_kde(proj_shallow, grid_size);
  const DensityEstimate dd = fit_kde(proj_deep, grid_size);
  model.bandwidth_shallow = ds.bandwidth;
  model.bandwidth_deep = dd.bandwidth;

  const ThresholdResult tr = find_threshold(ds, dd);
  model.threshold = tr.value;
  model.threshold_set = true;
  model.threshold_from_crossing = tr.crossing_found;
  return model;
}

std::string model_to_json(const ProjectionModel& model) {
  nlohmann::ordered_json j;
  j["mean_shallow"] = model.mean_shallow;
  j["mean_deep"] = model.mean_deep;
  j["direction"] = model.direction;
  j["threshold"] = model.threshold;
  j["bandwidth_shallow"] = model.bandwidth_shallow;
  j["bandwidth_deep"] = model.bandwidth_deep;
  j["fit_metadata"] = {
      {"kernel", "gaussian"},
      {"bandwidth_selection",
       "least-squares cross-validation, 64 log-spaced candidates in "
       "[0.05,5] x normal reference bandwidth"},
      {"projection_centering", "mean_shallow"},
      {"direction_normalization", "unit Euclidean length"},
      {"threshold_rule", "density crossing nearest midpoint of class means"},
      {"threshold_from_crossing", model.threshold_from_crossing},
      {"boundary_rule", "projection >= threshold is suffix 2"},
  };
  return j.dump(2) + "\n";
}

ProjectionModel model_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  ProjectionModel model;
  for (int i = 0; i < 4; ++i) {
    model.mean_shallow[i] = j.at("mean_shallow").at(i).get<double>();
    model.mean_deep[i] = j.at("mean_deep").at(i).get<double>();
    model.direction[i] = j.at("direction").at(i).get<double>();
  }
  model.threshold = j.at("threshold").get<double>();
  model.threshold_set = true;
  model.bandwidth_shallow = j.at("bandwidth_shallow").get<double>();
  model.bandwidth_deep = j.at("bandwidth_deep").get<double>();
  if (j.contains("fit_metadata") &&
      j["fit_metadata"].contains("threshold_from_crossing")) {
    model.threshold_from_crossing =
        j["fit_metadata"]["threshold_from_crossing"].get<bool>();
  }
  return model;
}

std::string labels_to_csv(const std::vector<LabeledEventRow>& rows) {
  std::string out = "event_id,projection,label\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%s\n", r.event_id.c_str(),
                  r.projection, mode_label_name(r.label));
    out += buf;
  }
  return out;
}

std::vector<LabeledEventRow> labels_from_csv(const std::string& text) {
  std::vector<LabeledEventRow> out;
  std::istringstream iss(text);
  std::string line;
  bool header = true;
  while (std::getline(iss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw IoError("bad label row: " + line);
    }
    LabeledEventRow r;
    r.event_id = line.substr(0, c1);
    r.projection = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    r.label = mode_label_from_name(line.substr(c2 + 1));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace quakemodes
