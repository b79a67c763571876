#include "quakemodes/synth_catalog.hpp"

#include <cmath>
#include <cstdio>

#include "quakemodes/features.hpp"
#include "quakemodes/rng.hpp"
#include "quakemodes/time_utils.hpp"

namespace quakemodes {

namespace {

constexpr double kRadiansPerDegree = 0.017453292519943295;

std::array<double, 3> cross(const std::array<double, 3>& a,
                            const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

// Unit vector in (r,t,p) = (up, south, east) for an axis orientation.
std::array<double, 3> axis_vector(double az_deg, double plunge_deg) {
  const double az = az_deg * kRadiansPerDegree;
  const double pl = plunge_deg * kRadiansPerDegree;
  const double down = std::sin(pl);
  const double north = std::cos(pl) * std::cos(az);
  const double east = std::cos(pl) * std::sin(az);
  return {-down, -north, east};
}

}  // namespace

MomentTensorRecord make_synthetic_event(const std::string& event_id,
                                        int64_t origin_time, double lat,
                                        double lon, double depth_km, double mw,
                                        double az3_deg, double plunge3_deg,
                                        double spin_deg) {
  const std::array<double, 3> v3 = axis_vector(az3_deg, plunge3_deg);

  // Orthonormal basis of the plane perpendicular to v3.
  std::array<double, 3> up = {1, 0, 0};
  std::array<double, 3> e1 = cross(v3, up);
  double n = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
  if (n < 1e-6) {
    e1 = cross(v3, std::array<double, 3>{0, 1, 0});
    n = std::sqrt(e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]);
  }
  for (double& x : e1) x /= n;
  const std::array<double, 3> e2 = cross(v3, e1);

  const double spin = spin_deg * kRadiansPerDegree;
  std::array<double, 3> v1{}, v2{};
  for (int i = 0; i < 3; ++i) {
    v1[i] = std::cos(spin) * e1[i] + std::sin(spin) * e2[i];
  }
  v2 = cross(v3, v1);

  const double m0 = scalar_moment_from_mw(mw);
  const double lambda[3] = {m0, 0.0, -m0};
  const std::array<double, 3> axes[3] = {v1, v2, v3};

  double m[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        m[i][j] += lambda[k] * axes[k][i] * axes[k][j];
      }
    }
  }

  MomentTensorRecord rec;
  rec.event_id = event_id;
  rec.origin_time = origin_time;
  rec.latitude = lat;
  rec.longitude = lon;
  rec.depth_km = depth_km;
  rec.scalar_moment = m0;
  rec.magnitude = mw_from_scalar_moment(m0);
  rec.tensor = {m[0][0], m[1][1], m[2][2], m[0][1], m[0][2], m[1][2]};

  std::array<CatalogAxis, 3> catalog{};
  for (int k = 0; k < 3; ++k) {
    const AzimuthPlunge ap = vector_to_azimuth_plunge(axes[k]);
    catalog[k] = {lambda[k], ap.plunge, ap.azimuth};
  }
  rec.catalog_axes = catalog;
  return rec;
}

SyntheticCatalog gen_synthetic_catalog(const SyntheticCatalogSpec& spec) {
  const std::vector<RegionSpec> regions =
      spec.regions.empty() ? ring_of_fire_preset() : spec.regions;
  const std::vector<SpatialCell> grid = make_grid(regions);
  const std::size_t n_cells = std::min(spec.n_cells, grid.size());

  SyntheticCatalog out;
  std::size_t next_id = 0;
  auto make_id = [&]() {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "SYN%06zu", next_id++);
    return std::string(buf);
  };

  // Family orientations: A near azimuth 60, B near azimuth 240. The spin and
  // small orientation jitter vary per event.
  auto draw_event = [&](std::mt19937_64& rng, const SpatialCell& cell,
                        int64_t t, bool family_a, double depth) {
    const double az3 = (family_a ? 60.0 : 240.0) + 6.0 * (uniform_double(rng) - 0.5) * 2.0;
    const double plunge3 = (family_a ? 18.0 : 32.0) + 4.0 * (uniform_double(rng) - 0.5) * 2.0;
    const double spin = 360.0 * uniform_double(rng);
    const double lat = cell.lat_min + 0.5 + 4.0 * uniform_double(rng);
    const double lon = normalize_lon(cell.lon_min + 0.5 + 4.0 * uniform_double(rng));
    double mw = 4.6 + 1.2 * uniform_double(rng);
    if (next_id % 53 == 0) mw = 2.8;  // below the default magnitude cut
    return make_synthetic_event(make_id(), t, lat, lon, depth, mw, az3, plunge3,
                                spin);
  };

  const int64_t n_periods =
      periods_in_span(spec.periods_per_year, spec.start_year, spec.end_year);

  for (std::size_t c = 0; c < n_cells; ++c) {
    const SpatialCell& cell = grid[c];
    const uint64_t cell_seed =
        derive_seed(spec.seed, "synth/" + cell.region_id + "/" +
                                   std::to_string(cell.sub_index));
    MarkovPairSpec pair;
    pair.length = static_cast<std::size_t>(n_periods);
    pair.base_rate = spec.base_rate;
    pair.self_excite = spec.self_excite;
    pair.cross_inhibit = spec.cross_inhibit;
    pair.seed = cell_seed;
    const auto [v1, v2] = gen_markov_pair(pair);

    std::mt19937_64 rng(splitmix64(cell_seed ^ 0x5bd1e995u));
    for (int64_t period = 0; period < n_periods; ++period) {
      const int year = spec.start_year +
                       static_cast<int>(period / spec.periods_per_year);
      const int64_t slot = period % spec.periods_per_year;
      const int64_t y0 = year_start_epoch(year);
      const int64_t ysec = seconds_in_year(year);
      // Just inside the half-open period window.
      const int64_t t0 = y0 + (slot * ysec + spec.periods_per_year - 1) /
                                  spec.periods_per_year;
      for (int mode = 0; mode < 2; ++mode) {
        const bool fired = mode == 0 ? v1[period] : v2[period];
        if (!fired) continue;
        const int64_t t = t0 + static_cast<int64_t>(
                                   uniform_double(rng) *
                                   (static_cast<double>(ysec) /
                                        spec.periods_per_year -
                                    2.0));
        const MomentTensorRecord ev =
            draw_event(rng, cell, t, mode == 0, 15.0 + 45.0 * uniform_double(rng));
        out.true_labels.push_back({ev.event_id, mode == 0 ? -1.0 : 1.0,
                                   mode == 0 ? ModeLabel::Shallow1
                                             : ModeLabel::Shallow2});
        out.events.push_back(ev);
      }
    }
  }

  // Deep events: families mixed 1:3 so the depth contrast picks up the
  // family axis.
  {
    std::mt19937_64 rng(splitmix64(spec.seed ^ 0xdeefu));
    const int64_t span_start = year_start_epoch(spec.start_year);
    const int64_t span_len =
        year_start_epoch(spec.end_year + 1) - span_start;
    for (std::size_t k = 0; k < spec.n_deep; ++k) {
      const SpatialCell& cell = grid[k % std::max<std::size_t>(n_cells, 1)];
      const int64_t t =
          span_start + static_cast<int64_t>(uniform_double(rng) *
                                            static_cast<double>(span_len - 1));
      const bool family_a = uniform_double(rng) < 0.25;
      const MomentTensorRecord ev =
          draw_event(rng, cell, t, family_a, 300.0 + 350.0 * uniform_double(rng));
      out.true_labels.push_back({ev.event_id, family_a ? -1.0 : 1.0,
                                 family_a ? ModeLabel::Deep1 : ModeLabel::Deep2});
      out.events.push_back(ev);
    }
  }

  return out;
}

}  // namespace quakemodes
