#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quakemodes/binning.hpp"
#include "quakemodes/catalog.hpp"
#include "quakemodes/classifier.hpp"
#include "quakemodes/synthetic.hpp"

namespace quakemodes {

// Synthetic catalog: shallow events fall into two mechanism families with
// distinct third-axis orientations, placed in grid cells with coupled Markov
// temporal patterns; deep events mix the families unevenly so the
// depth-difference projection separates them.
struct SyntheticCatalogSpec {
  std::size_t n_cells = 12;    // cells taken in grid order
  std::size_t n_deep = 400;
  double base_rate = 0.35;
  double self_excite = 0.4;
  double cross_inhibit = 0.4;
  int start_year = 1977;
  int end_year = 2010;
  int periods_per_year = 26;   // temporal placement resolution
  uint64_t seed = 1;
  std::vector<RegionSpec> regions;  // empty: ring-of-fire preset
};

struct SyntheticCatalog {
  std::vector<MomentTensorRecord> events;
  // Generator's ground-truth mode per event (family A = Shallow1).
  std::vector<LabeledEventRow> true_labels;
};

SyntheticCatalog gen_synthetic_catalog(const SyntheticCatalogSpec& spec);

// Builds a moment tensor whose third principal axis has the given
// orientation; `spin` rotates the remaining two axes about it. Pure
// double-couple eigenvalues (m0, 0, -m0).
MomentTensorRecord make_synthetic_event(const std::string& event_id,
                                        int64_t origin_time, double lat,
                                        double lon, double depth_km, double mw,
                                        double az3_deg, double plunge3_deg,
                                        double spin_deg);

}  // namespace quakemodes
