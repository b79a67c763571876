#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "quakemodes/classifier.hpp"

namespace quakemodes {

// Anchor (south-west corner) of one 15x15 degree region.
struct RegionSpec {
  std::string region_id;
  double lat_min = 0;
  double lon_min = 0;  // normalized to [-180, 180)
};

// One 5x5 degree sub-cell. Longitude containment is modular, so cells that
// straddle the antimeridian work with plain lon_min/lon_max bookkeeping.
struct SpatialCell {
  std::string region_id;
  int sub_index = 0;  // 0..8, row-major south->north then west->east
  double lat_min = 0, lat_max = 0;
  double lon_min = 0;  // normalized to [-180, 180)
  double lon_max = 0;  // lon_min + 5, may reach past 180

  bool contains(double lat, double lon) const;
};

double normalize_lon(double lon);

// 9 sub-cells per region; throws OverlappingRegions when two regions share
// area.
std::vector<SpatialCell> make_grid(const std::vector<RegionSpec>& regions);

// The unique cell containing the point (closed lower, open upper bounds), or
// nullptr when the point lies outside every region.
const SpatialCell* assign_cell(double lat, double lon,
                               const std::vector<SpatialCell>& grid);

// Period index for a timestamp. Each calendar year is split into
// periods_per_year equal-duration slots (integer arithmetic on seconds, so
// slots within a year differ by at most one second); periods never straddle
// year boundaries.
int64_t time_bin(int64_t t, int periods_per_year, int start_year, int end_year);

int64_t periods_in_span(int periods_per_year, int start_year, int end_year);

enum class PresenceMode { Shallow1, Shallow2, Pooled };
const char* presence_mode_name(PresenceMode m);

struct PresenceSeries {
  std::string region_id;
  int sub_index = 0;
  PresenceMode mode = PresenceMode::Shallow1;
  int periods_per_year = 26;
  int start_year = 1977;
  int end_year = 2010;
  std::vector<uint8_t> bits;  // one entry per period, 1 = any event
};

// Bit i is 1 iff at least one event time maps to period i.
PresenceSeries build_presence(const SpatialCell& cell, PresenceMode mode,
                              const std::vector<int64_t>& event_times,
                              int periods_per_year, int start_year,
                              int end_year);

// A classified event reduced to what binning needs.
struct LabeledEvent {
  std::string event_id;
  int64_t time = 0;
  double lat = 0;
  double lon = 0;
  ModeLabel label = ModeLabel::Shallow1;
};

// Cells with strictly more than 5 events of both shallow modes.
std::vector<SpatialCell> eligible_cells(const std::vector<SpatialCell>& grid,
                                        const std::vector<LabeledEvent>& shallow_events);

// Eleven 15-degree regions along the circum-Pacific subduction margins. The
// numbered tiling this reconstructs is configuration, not ground truth; use
// a regions file to override.
std::vector<RegionSpec> ring_of_fire_preset();

// JSON array of {"region_id": ..., "lat_min": ..., "lon_min": ...}.
std::vector<RegionSpec> regions_from_json(const std::string& text);
std::string regions_to_json(const std::vector<RegionSpec>& regions);

// region_id,sub_index,mode,period_index,bit
std::string presence_to_csv(const std::vector<PresenceSeries>& series);

}  // namespace quakemodes
