#pragma once

#include <array>
#include <string>
#include <vector>

#include "quakemodes/catalog.hpp"

namespace quakemodes {

// Quality flags attached to a feature vector instead of rejecting the event.
enum FeatureQuality : unsigned {
  kFeatureOk = 0,
  kDegenerateSpectrum = 1u << 0,  // two eigenvalues closer than 1e-9 relative
  kVerticalAxis = 1u << 1,        // an axis with no horizontal projection
};

struct PrincipalAxis {
  double eigenvalue = 0;
  std::array<double, 3> direction{};  // unit vector in (r,t,p) = (up,south,east)
};

// Eigenstructure of a symmetric tensor, eigenvalues descending.
struct PrincipalAxes {
  std::array<PrincipalAxis, 3> axis;
  bool degenerate = false;
};

// The four classifier variables.
struct FeatureVector {
  double az1 = 0, az2 = 0, az3 = 0;  // degrees [0,360)
  double plunge3 = 0;                // degrees [0,90]
  unsigned quality = kFeatureOk;
};

struct AzimuthPlunge {
  double azimuth = 0;  // degrees [0,360), clockwise from north
  double plunge = 0;   // degrees [0,90], downward dip
  bool vertical = false;
};

// Jacobi eigendecomposition of the symmetric 3x3 tensor. Reconstruction
// sum(lambda_i v_i v_i^T) matches the input within 1e-10 relative Frobenius.
PrincipalAxes symmetric_eig3(const TensorComponents& t);

// Axis orientation of a unit vector in (up, south, east) coordinates. The
// vector is sign-flipped to point downward (or, when exactly horizontal, so
// that its north component, then east component, is nonnegative).
AzimuthPlunge vector_to_azimuth_plunge(const std::array<double, 3>& v);

// The four variables for one event; catalog axes are used when present and
// preferred, otherwise they are computed from the tensor.
FeatureVector extract_features(const MomentTensorRecord& rec,
                               bool prefer_catalog_axes = true);

struct EventFeatures {
  std::string event_id;
  FeatureVector features;
  DepthClass depth;
};

std::string quality_flag_name(unsigned quality);
unsigned quality_flag_from_name(const std::string& name);

// event_id,az1,az2,az3,plunge3,depth_class,quality_flag
std::string features_to_csv(const std::vector<EventFeatures>& rows);
std::vector<EventFeatures> features_from_csv(const std::string& text);

}  // namespace quakemodes
