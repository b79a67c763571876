#include "quakemodes/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace quakemodes {

namespace {

constexpr double kDegreesPerRadian = 57.29577951308232;

// One cyclic Jacobi sweep; returns the off-diagonal Frobenius norm squared.
double jacobi_sweep(std::array<std::array<double, 3>, 3>& a,
                    std::array<std::array<double, 3>, 3>& v) {
  static const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
  for (const auto& pq : pairs) {
    const int p = pq[0], q = pq[1];
    if (a[p][q] == 0.0) continue;
    const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
    const double t = (theta >= 0 ? 1.0 : -1.0) /
                     (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
    const double c = 1.0 / std::sqrt(t * t + 1.0);
    const double s = t * c;

    const double app = a[p][p], aqq = a[q][q], apq = a[p][q];
    a[p][p] = app - t * apq;
    a[q][q] = aqq + t * apq;
    a[p][q] = a[q][p] = 0.0;
    for (int k = 0; k < 3; ++k) {
      if (k == p || k == q) continue;
      const double akp = a[k][p], akq = a[k][q];
      a[k][p] = a[p][k] = c * akp - s * akq;
      a[k][q] = a[q][k] = s * akp + c * akq;
    }
    for (int k = 0; k < 3; ++k) {
      const double vkp = v[k][p], vkq = v[k][q];
      v[k][p] = c * vkp - s * vkq;
      v[k][q] = s * vkp + c * vkq;
    }
  }
  return a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
}

}  // namespace

PrincipalAxes symmetric_eig3(const TensorComponents& t) {
  std::array<std::array<double, 3>, 3> a = {{{t.mrr, t.mrt, t.mrp},
                                             {t.mrt, t.mtt, t.mtp},
                                             {t.mrp, t.mtp, t.mpp}}};
  std::array<std::array<double, 3>, 3> v = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

  double frob2 = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) frob2 += a[i][j] * a[i][j];

  for (int sweep = 0; sweep < 64; ++sweep) {
    const double off2 = jacobi_sweep(a, v);
    if (off2 <= 1e-30 * frob2 || off2 == 0.0) break;
  }

  PrincipalAxes out;
  int order[3] = {0, 1, 2};
  std::sort(order, order + 3,
            [&](int i, int j) { return a[i][i] > a[j][j]; });
  double max_abs = 0;
  for (int i = 0; i < 3; ++i) max_abs = std::max(max_abs, std::fabs(a[i][i]));
  for (int i = 0; i < 3; ++i) {
    const int k = order[i];
    out.axis[i].eigenvalue = a[k][k];
    out.axis[i].direction = {v[0][k], v[1][k], v[2][k]};
  }
  for (int i = 0; i < 2; ++i) {
    const double gap = std::fabs(out.axis[i].eigenvalue - out.axis[i + 1].eigenvalue);
    if (gap < 1e-9 * std::max(max_abs, 1e-300)) out.degenerate = true;
  }
  return out;
}

AzimuthPlunge vector_to_azimuth_plunge(const std::array<double, 3>& v) {
  // (r,t,p) = (up, south, east): down = -r, north = -t, east = p.
  double down = -v[0];
  double north = -v[1];
  double east = v[2];
  if (down < 0 || (down == 0 && (north < 0 || (north == 0 && east < 0)))) {
    down = -down;
    north = -north;
    east = -east;
  }
  AzimuthPlunge out;
  const double norm = std::sqrt(down * down + north * north + east * east);
  const double horiz = std::hypot(north, east);
  out.plunge = std::asin(std::clamp(down / norm, -1.0, 1.0)) * kDegreesPerRadian;
  if (horiz < 1e-9 * norm) {
    out.azimuth = 0.0;
    out.vertical = true;
    return out;
  }
  double az = std::atan2(east, north) * kDegreesPerRadian;
  if (az < 0) az += 360.0;
  if (az >= 360.0) az -= 360.0;
  out.azimuth = az;
  return out;
}

FeatureVector extract_features(const MomentTensorRecord& rec,
                               bool prefer_catalog_axes) {
  FeatureVector fv;
  if (prefer_catalog_axes && rec.catalog_axes) {
    std::array<CatalogAxis, 3> axes = *rec.catalog_axes;
    std::sort(axes.begin(), axes.end(),
              [](const CatalogAxis& a, const CatalogAxis& b) {
                return a.eigenvalue > b.eigenvalue;
              });
    fv.az1 = axes[0].azimuth;
    fv.az2 = axes[1].azimuth;
    fv.az3 = axes[2].azimuth;
    fv.plunge3 = axes[2].plunge;
    double max_abs = 0;
    for (const auto& a : axes) max_abs = std::max(max_abs, std::fabs(a.eigenvalue));
    for (int i = 0; i < 2; ++i) {
      if (std::fabs(axes[i].eigenvalue - axes[i + 1].eigenvalue) <
          1e-9 * std::max(max_abs, 1e-300)) {
        fv.quality |= kDegenerateSpectrum;
      }
    }
    return fv;
  }

  const PrincipalAxes axes = symmetric_eig3(rec.tensor);
  if (axes.degenerate) fv.quality |= kDegenerateSpectrum;
  double az[3], plunge[3];
  for (int i = 0; i < 3; ++i) {
    const AzimuthPlunge ap = vector_to_azimuth_plunge(axes.axis[i].direction);
    az[i] = ap.azimuth;
    plunge[i] = ap.plunge;
    if (ap.vertical) fv.quality |= kVerticalAxis;
  }
  fv.az1 = az[0];
  fv.az2 = az[1];
  fv.az3 = az[2];
  fv.plunge3 = plunge[2];
  return fv;
}

std::string quality_flag_name(unsigned quality) {
  if (quality == kFeatureOk) return "ok";
  std::string out;
  if (quality & kDegenerateSpectrum) out = "degenerate_spectrum";
  if (quality & kVerticalAxis) {
    if (!out.empty()) out += "+";
    out += "vertical_axis";
  }
  return out;
}

unsigned quality_flag_from_name(const std::string& name) {
  unsigned q = kFeatureOk;
  if (name.find("degenerate_spectrum") != std::string::npos) q |= kDegenerateSpectrum;
  if (name.find("vertical_axis") != std::string::npos) q |= kVerticalAxis;
  return q;
}

std::string features_to_csv(const std::vector<EventFeatures>& rows) {
  std::string out = "event_id,az1,az2,az3,plunge3,depth_class,quality_flag\n";
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.4f,%.4f,%.4f,%.4f,%s,%s\n",
                  r.event_id.c_str(), r.features.az1, r.features.az2,
                  r.features.az3, r.features.plunge3,
                  depth_class_name(r.depth),
                  quality_flag_name(r.features.quality).c_str());
    out += buf;
  }
  return out;
}

std::vector<EventFeatures> features_from_csv(const std::string& text) {
  std::vector<EventFeatures> out;
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
    std::vector<std::string> f;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) {
        f.push_back(line.substr(pos));
        break;
      }
      f.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    if (f.size() != 7) throw IoError("bad feature row: " + line);
    EventFeatures r;
    r.event_id = f[0];
    r.features.az1 = std::stod(f[1]);
    r.features.az2 = std::stod(f[2]);
    r.features.az3 = std::stod(f[3]);
    r.features.plunge3 = std::stod(f[4]);
    r.depth = f[5] == "Deep" ? DepthClass::Deep : DepthClass::Shallow;
    r.features.quality = quality_flag_from_name(f[6]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace quakemodes
