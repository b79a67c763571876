#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quakemodes/errors.hpp"

namespace quakemodes {

enum class DepthClass { Shallow, Deep };

// One principal axis as stored in the catalog: eigenvalue in dyne-cm, plunge
// in [0,90] degrees, azimuth in [0,360) degrees.
struct CatalogAxis {
  double eigenvalue = 0;
  double plunge = 0;
  double azimuth = 0;
};

// Symmetric moment tensor in dyne-cm, (r,t,p) = (up, south, east).
struct TensorComponents {
  double mrr = 0, mtt = 0, mpp = 0;
  double mrt = 0, mrp = 0, mtp = 0;
};

struct MomentTensorRecord {
  std::string event_id;
  int64_t origin_time = 0;   // unix seconds, UTC (centroid time)
  double latitude = 0;       // degrees [-90, 90]
  double longitude = 0;      // degrees [-180, 180)
  double depth_km = 0;       // > 0
  double scalar_moment = 0;  // dyne-cm
  double magnitude = 0;      // Mw
  TensorComponents tensor;
  // Principal axes as given by the catalog, eigenvalue-descending.
  std::optional<std::array<CatalogAxis, 3>> catalog_axes;
};

enum class ParseMode { Strict, Lenient };

struct ParseStats {
  std::size_t parsed = 0;
  std::size_t skipped_blocks = 0;
};

// Parses NDK text (5 lines of 80 columns per event). Strict mode throws
// MalformedBlock on the first bad block; lenient mode skips bad blocks and
// counts them in `stats`.
std::vector<MomentTensorRecord> parse_ndk(const std::string& text,
                                          ParseMode mode = ParseMode::Strict,
                                          ParseStats* stats = nullptr);

// Reads an NDK file, transparently inflating gzip.
std::vector<MomentTensorRecord> read_ndk_file(const std::string& path,
                                              ParseMode mode = ParseMode::Lenient,
                                              ParseStats* stats = nullptr);

// Writes a record back as a 5-line NDK block. Re-parsing yields the same
// field values (tensor and eigenvalues within one unit of the last stored
// digit).
std::string to_ndk(const MomentTensorRecord& rec);
std::string to_ndk(const std::vector<MomentTensorRecord>& recs);

// Keeps records with magnitude strictly above `min_magnitude` and
// origin_time in [window_start, window_end); order preserved.
std::vector<MomentTensorRecord> filter_events(
    const std::vector<MomentTensorRecord>& records, double min_magnitude,
    int64_t window_start, int64_t window_end);

// Deep iff depth_km > split_km.
DepthClass depth_class(const MomentTensorRecord& rec, double split_km = 200.0);
DepthClass depth_class_for(double depth_km, double split_km = 200.0);

const char* depth_class_name(DepthClass d);

double mw_from_scalar_moment(double m0_dyne_cm);
double scalar_moment_from_mw(double mw);

// Canonical event table:
// event_id,origin_time,lat,lon,depth_km,mw,mrr,mtt,mpp,mrt,mrp,mtp
std::string events_to_csv(const std::vector<MomentTensorRecord>& recs);
std::vector<MomentTensorRecord> events_from_csv(const std::string& text);

}  // namespace quakemodes
