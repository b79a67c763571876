#include <doctest.h>

#include <array>
#include <cmath>
#include <random>

#include "quakemodes/features.hpp"
#include "quakemodes/rng.hpp"
#include "quakemodes/synth_catalog.hpp"

using namespace quakemodes;

namespace {

constexpr double kDeg = 0.017453292519943295;

TensorComponents random_symmetric(std::mt19937_64& rng, double scale) {
  auto r = [&]() { return scale * (2.0 * uniform_double(rng) - 1.0); };
  return {r(), r(), r(), r(), r(), r()};
}

double frobenius(const double m[3][3]) {
  double s = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) s += m[i][j] * m[i][j];
  return std::sqrt(s);
}

void to_matrix(const TensorComponents& t, double m[3][3]) {
  m[0][0] = t.mrr; m[0][1] = t.mrt; m[0][2] = t.mrp;
  m[1][0] = t.mrt; m[1][1] = t.mtt; m[1][2] = t.mtp;
  m[2][0] = t.mrp; m[2][1] = t.mtp; m[2][2] = t.mpp;
}

double circular_distance_deg(double a, double b) {
  double d = std::fabs(a - b);
  d = std::fmod(d, 360.0);
  return std::min(d, 360.0 - d);
}

// Rotation of the tensor about the vertical (r) axis by theta degrees,
// clockwise viewed from above, i.e. azimuths gain theta.
TensorComponents rotate_about_vertical(const TensorComponents& t, double theta_deg) {
  const double c = std::cos(theta_deg * kDeg);
  const double s = std::sin(theta_deg * kDeg);
  // Basis change on (t,p): t' = c*t + s*p, p' = -s*t + c*p (derived from the
  // azimuth convention north=-t, east=p).
  double m[3][3], r[3][3] = {{1, 0, 0}, {0, c, s}, {0, -s, c}};
  to_matrix(t, m);
  double rm[3][3] = {}, rmrt[3][3] = {};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) rm[i][j] += r[i][k] * m[k][j];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) rmrt[i][j] += rm[i][k] * r[j][k];
  return {rmrt[0][0], rmrt[1][1], rmrt[2][2], rmrt[0][1], rmrt[0][2], rmrt[1][2]};
}

}  // namespace

TEST_CASE("diagonal tensor decomposes onto coordinate axes") {
  const PrincipalAxes ax = symmetric_eig3({3, 2, 1, 0, 0, 0});
  CHECK(ax.axis[0].eigenvalue == doctest::Approx(3));
  CHECK(ax.axis[1].eigenvalue == doctest::Approx(2));
  CHECK(ax.axis[2].eigenvalue == doctest::Approx(1));
  CHECK(std::fabs(ax.axis[0].direction[0]) == doctest::Approx(1));
  CHECK(std::fabs(ax.axis[1].direction[1]) == doctest::Approx(1));
  CHECK(std::fabs(ax.axis[2].direction[2]) == doctest::Approx(1));
  CHECK_FALSE(ax.degenerate);
}

TEST_CASE("identity tensor is flagged degenerate") {
  const PrincipalAxes ax = symmetric_eig3({1, 1, 1, 0, 0, 0});
  CHECK(ax.degenerate);
  MomentTensorRecord rec;
  rec.tensor = {1, 1, 1, 0, 0, 0};
  const FeatureVector fv = extract_features(rec, false);
  CHECK((fv.quality & kDegenerateSpectrum) != 0);
}

TEST_CASE("reconstruction and orthonormality for random tensors") {
  std::mt19937_64 rng(12345);
  for (int iter = 0; iter < 500; ++iter) {
    const double scale = iter % 2 == 0 ? 1.0 : 1e24;
    const TensorComponents t = random_symmetric(rng, scale);
    const PrincipalAxes ax = symmetric_eig3(t);

    double m[3][3], rec[3][3] = {};
    to_matrix(t, m);
    for (int k = 0; k < 3; ++k) {
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          rec[i][j] += ax.axis[k].eigenvalue * ax.axis[k].direction[i] *
                       ax.axis[k].direction[j];
    }
    double diff[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) diff[i][j] = rec[i][j] - m[i][j];
    CHECK(frobenius(diff) <= 1e-10 * frobenius(m));

    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double dot = 0;
        for (int k = 0; k < 3; ++k)
          dot += ax.axis[i].direction[k] * ax.axis[j].direction[k];
        CHECK(std::fabs(dot - (i == j ? 1.0 : 0.0)) < 1e-9);
      }
    }
    CHECK(ax.axis[0].eigenvalue >= ax.axis[1].eigenvalue);
    CHECK(ax.axis[1].eigenvalue >= ax.axis[2].eigenvalue);
  }
}

TEST_CASE("axis conversion conventions") {
  // due north, horizontal: (r,t,p) = (0,-1,0)
  auto ap = vector_to_azimuth_plunge({0, -1, 0});
  CHECK(ap.azimuth == doctest::Approx(0));
  CHECK(ap.plunge == doctest::Approx(0));

  // due east, horizontal
  ap = vector_to_azimuth_plunge({0, 0, 1});
  CHECK(ap.azimuth == doctest::Approx(90));
  CHECK(ap.plunge == doctest::Approx(0));

  // straight down
  ap = vector_to_azimuth_plunge({-1, 0, 0});
  CHECK(ap.azimuth == doctest::Approx(0));
  CHECK(ap.plunge == doctest::Approx(90));
  CHECK(ap.vertical);

  // 45 degrees down to the southwest
  const double c = std::cos(45 * kDeg);
  ap = vector_to_azimuth_plunge({-c, c / std::sqrt(2.0), -c / std::sqrt(2.0)});
  CHECK(ap.azimuth == doctest::Approx(225));
  CHECK(ap.plunge == doctest::Approx(45));
}

TEST_CASE("sign invariance of axis orientation") {
  std::mt19937_64 rng(99);
  for (int iter = 0; iter < 200; ++iter) {
    std::array<double, 3> v;
    double norm = 0;
    for (auto& x : v) {
      x = 2.0 * uniform_double(rng) - 1.0;
      norm += x * x;
    }
    norm = std::sqrt(norm);
    if (norm < 1e-3) continue;
    for (auto& x : v) x /= norm;
    const auto a = vector_to_azimuth_plunge(v);
    const auto b = vector_to_azimuth_plunge({-v[0], -v[1], -v[2]});
    CHECK(circular_distance_deg(a.azimuth, b.azimuth) < 1e-9);
    CHECK(a.plunge == doctest::Approx(b.plunge));
  }
}

TEST_CASE("rotation about the vertical axis shifts azimuths, keeps plunges") {
  std::mt19937_64 rng(4242);
  int tested = 0;
  for (int iter = 0; iter < 100; ++iter) {
    const TensorComponents t = random_symmetric(rng, 1.0);
    const PrincipalAxes base = symmetric_eig3(t);
    if (base.degenerate) continue;
    const double theta = 360.0 * uniform_double(rng);
    const PrincipalAxes rot = symmetric_eig3(rotate_about_vertical(t, theta));

    MomentTensorRecord r1, r2;
    r1.tensor = t;
    r2.tensor = rotate_about_vertical(t, theta);
    const FeatureVector f1 = extract_features(r1, false);
    const FeatureVector f2 = extract_features(r2, false);
    if ((f1.quality | f2.quality) != kFeatureOk) continue;
    // Skip near-vertical axes, whose azimuth is ill-conditioned.
    bool stable = true;
    for (int i = 0; i < 3; ++i) {
      const auto ap = vector_to_azimuth_plunge(base.axis[i].direction);
      if (ap.plunge > 85.0) stable = false;
    }
    if (!stable) continue;
    ++tested;
    CHECK(circular_distance_deg(f2.az1, f1.az1 + theta) < 1e-6);
    CHECK(circular_distance_deg(f2.az2, f1.az2 + theta) < 1e-6);
    CHECK(circular_distance_deg(f2.az3, f1.az3 + theta) < 1e-6);
    CHECK(f2.plunge3 == doctest::Approx(f1.plunge3).epsilon(1e-9));
    CHECK(rot.axis[2].eigenvalue ==
          doctest::Approx(base.axis[2].eigenvalue).epsilon(1e-9));
  }
  CHECK(tested > 50);
}

TEST_CASE("catalog axes are copied in descending eigenvalue order") {
  MomentTensorRecord rec;
  rec.tensor = {3, 2, 1, 0, 0, 0};
  rec.catalog_axes = std::array<CatalogAxis, 3>{{
      {1e24, 70, 300},   // middle eigenvalue listed first on purpose
      {5e24, 10, 120},
      {-6e24, 15, 30},
  }};
  const FeatureVector fv = extract_features(rec, true);
  CHECK(fv.az1 == doctest::Approx(120));
  CHECK(fv.az2 == doctest::Approx(300));
  CHECK(fv.az3 == doctest::Approx(30));
  CHECK(fv.plunge3 == doctest::Approx(15));
  CHECK(fv.quality == kFeatureOk);
}

TEST_CASE("computed features for a diagonal tensor") {
  MomentTensorRecord rec;
  rec.tensor = {3, 2, 1, 0, 0, 0};
  const FeatureVector fv = extract_features(rec, false);
  // First axis is vertical (up), so azimuth degenerates to 0 with a flag;
  // second axis points south -> azimuth 0 after the horizontal sign rule;
  // third axis points east.
  CHECK(fv.az1 == doctest::Approx(0));
  CHECK((fv.quality & kVerticalAxis) != 0);
  CHECK(fv.az2 == doctest::Approx(0));
  CHECK(fv.az3 == doctest::Approx(90));
  CHECK(fv.plunge3 == doctest::Approx(0));
}

TEST_CASE("computed features agree with stored axes on synthetic events") {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int i = 0; i < 150; ++i) {
    const double az3 = 360.0 * uniform_double(rng);
    const double plunge3 = 75.0 * uniform_double(rng);
    const double spin = 360.0 * uniform_double(rng);
    const MomentTensorRecord ev = make_synthetic_event(
        "S" + std::to_string(i), 0, 10.0, 120.0, 30.0, 5.0, az3, plunge3, spin);

    const FeatureVector from_axes = extract_features(ev, true);
    const FeatureVector computed = extract_features(ev, false);
    if (computed.quality != kFeatureOk || from_axes.quality != kFeatureOk) continue;

    ++checked;
    CHECK(circular_distance_deg(from_axes.az1, computed.az1) < 1.0);
    CHECK(circular_distance_deg(from_axes.az2, computed.az2) < 1.0);
    CHECK(circular_distance_deg(from_axes.az3, computed.az3) < 1.0);
    CHECK(std::fabs(from_axes.plunge3 - computed.plunge3) < 1.0);
  }
  CHECK(checked >= 100);
}

TEST_CASE("feature CSV round trip") {
  std::vector<EventFeatures> rows;
  rows.push_back({"A", {10.5, 200.25, 355.0, 42.0, kFeatureOk}, DepthClass::Shallow});
  rows.push_back({"B", {0, 0, 90, 0, kVerticalAxis}, DepthClass::Deep});
  const auto back = features_from_csv(features_to_csv(rows));
  REQUIRE(back.size() == 2);
  CHECK(back[0].event_id == "A");
  CHECK(back[0].features.az2 == doctest::Approx(200.25));
  CHECK(back[0].depth == DepthClass::Shallow);
  CHECK(back[1].features.quality == kVerticalAxis);
  CHECK(back[1].depth == DepthClass::Deep);
}
