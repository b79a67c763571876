#include "quakemodes/binning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include <json.hpp>

#include "quakemodes/time_utils.hpp"

namespace quakemodes {

double normalize_lon(double lon) {
  lon = std::fmod(lon + 180.0, 360.0);
  if (lon < 0) lon += 360.0;
  return lon - 180.0;
}

namespace {

// Eastward angular distance from `from` to `to`, in [0, 360).
double lon_offset(double from, double to) {
  double d = std::fmod(to - from, 360.0);
  if (d < 0) d += 360.0;
  return d;
}

}  // namespace

bool SpatialCell::contains(double lat, double lon) const {
  if (lat < lat_min || lat >= lat_max) return false;
  return lon_offset(lon_min, normalize_lon(lon)) < lon_max - lon_min;
}

std::vector<SpatialCell> make_grid(const std::vector<RegionSpec>& regions) {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    for (std::size_t j = i + 1; j < regions.size(); ++j) {
      const auto& a = regions[i];
      const auto& b = regions[j];
      const bool lat_overlap =
          a.lat_min < b.lat_min + 15.0 && b.lat_min < a.lat_min + 15.0;
      const bool lon_overlap = lon_offset(a.lon_min, b.lon_min) < 15.0 ||
                               lon_offset(b.lon_min, a.lon_min) < 15.0;
      if (lat_overlap && lon_overlap) {
        throw OverlappingRegions("regions " + a.region_id + " and " +
                                 b.region_id + " overlap");
      }
    }
  }

  std::vector<SpatialCell> grid;
  grid.reserve(regions.size() * 9);
  for (const auto& r : regions) {
    for (int row = 0; row < 3; ++row) {
      for (int col = 0; col < 3; ++col) {
        SpatialCell c;
        c.region_id = r.region_id;
        c.sub_index = row * 3 + col;
        c.lat_min = r.lat_min + 5.0 * row;
        c.lat_max = c.lat_min + 5.0;
        c.lon_min = normalize_lon(r.lon_min + 5.0 * col);
        c.lon_max = c.lon_min + 5.0;
        grid.push_back(std::move(c));
      }
    }
  }
  return grid;
}

const SpatialCell* assign_cell(double lat, double lon,
                               const std::vector<SpatialCell>& grid) {
  for (const auto& c : grid) {
    if (c.contains(lat, lon)) return &c;
  }
  return nullptr;
}

int64_t periods_in_span(int periods_per_year, int start_year, int end_year) {
  return static_cast<int64_t>(end_year - start_year + 1) * periods_per_year;
}

int64_t time_bin(int64_t t, int periods_per_year, int start_year,
                 int end_year) {
  if (t < year_start_epoch(start_year) || t >= year_start_epoch(end_year + 1)) {
    throw OutOfRange("timestamp " + format_iso8601(t) + " outside span " +
                     std::to_string(start_year) + ".." +
                     std::to_string(end_year));
  }
  const int year = civil_from_epoch(t).year;
  const int64_t into_year = t - year_start_epoch(year);
  const int64_t slot = into_year * periods_per_year / seconds_in_year(year);
  return static_cast<int64_t>(year - start_year) * periods_per_year + slot;
}

const char* presence_mode_name(PresenceMode m) {
  switch (m) {
    case PresenceMode::Shallow1: return "Shallow1";
    case PresenceMode::Shallow2: return "Shallow2";
    case PresenceMode::Pooled: return "Pooled";
  }
  return "Pooled";
}

PresenceSeries build_presence(const SpatialCell& cell, PresenceMode mode,
                              const std::vector<int64_t>& event_times,
                              int periods_per_year, int start_year,
                              int end_year) {
  PresenceSeries s;
  s.region_id = cell.region_id;
  s.sub_index = cell.sub_index;
  s.mode = mode;
  s.periods_per_year = periods_per_year;
  s.start_year = start_year;
  s.end_year = end_year;
  s.bits.assign(periods_in_span(periods_per_year, start_year, end_year), 0);
  for (int64_t t : event_times) {
    s.bits[time_bin(t, periods_per_year, start_year, end_year)] = 1;
  }
  return s;
}

std::vector<SpatialCell> eligible_cells(
    const std::vector<SpatialCell>& grid,
    const std::vector<LabeledEvent>& shallow_events) {
  std::vector<int64_t> count1(grid.size(), 0), count2(grid.size(), 0);
  for (const auto& ev : shallow_events) {
    if (ev.label != ModeLabel::Shallow1 && ev.label != ModeLabel::Shallow2) continue;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (grid[i].contains(ev.lat, ev.lon)) {
        (ev.label == ModeLabel::Shallow1 ? count1[i] : count2[i])++;
        break;
      }
    }
  }
  std::vector<SpatialCell> out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (count1[i] > 5 && count2[i] > 5) out.push_back(grid[i]);
  }
  return out;
}

std::vector<RegionSpec> ring_of_fire_preset() {
  return {
      {"aleutians", 45.0, 165.0},
      {"alaska", 45.0, -180.0},
      {"japan_kuriles", 30.0, 135.0},
      {"marianas", 15.0, 135.0},
      {"philippines", 0.0, 120.0},
      {"indonesia", -15.0, 105.0},
      {"solomon_vanuatu", -15.0, 150.0},
      {"tonga_kermadec", -30.0, 170.0},
      {"new_zealand", -45.0, 165.0},
      {"central_america", 5.0, -105.0},
      {"south_america", -30.0, -75.0},
  };
}

std::vector<RegionSpec> regions_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  std::vector<RegionSpec> out;
  for (const auto& item : j) {
    RegionSpec r;
    r.region_id = item.at("region_id").get<std::string>();
    r.lat_min = item.at("lat_min").get<double>();
    r.lon_min = normalize_lon(item.at("lon_min").get<double>());
    if (r.lat_min < -90.0 || r.lat_min + 15.0 > 90.0) {
      throw ConfigError("region " + r.region_id + " latitude out of range");
    }
    out.push_back(std::move(r));
  }
  if (out.empty()) throw ConfigError("regions file lists no regions");
  return out;
}

std::string regions_to_json(const std::vector<RegionSpec>& regions) {
  nlohmann::ordered_json j = nlohmann::ordered_json::array();
  for (const auto& r : regions) {
    j.push_back({{"region_id", r.region_id},
                 {"lat_min", r.lat_min},
                 {"lon_min", r.lon_min}});
  }
  return j.dump(2) + "\n";
}

std::string presence_to_csv(const std::vector<PresenceSeries>& series) {
  std::string out = "region_id,sub_index,mode,period_index,bit\n";
  char buf[160];
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.bits.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%s,%d,%s,%zu,%d\n", s.region_id.c_str(),
                    s.sub_index, presence_mode_name(s.mode), i,
                    static_cast<int>(s.bits[i]));
      out += buf;
    }
  }
  return out;
}

}  // namespace quakemodes
