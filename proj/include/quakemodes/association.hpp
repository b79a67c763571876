#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "quakemodes/errors.hpp"

namespace quakemodes {

enum class Comparison { WithinModes, CrossModes, Pooled };
const char* comparison_name(Comparison c);

// Stacked lagged vectors built from two presence series of length n:
//   A = v1[0..n-lag-1] ++ v2[0..n-lag-1]   (lagged predictor)
//   B = v1[lag..n-1]   ++ v2[lag..n-1]     (lead response)
//   C = v2[0..n-lag-1] ++ v1[0..n-lag-1]   (cross-stacked predictor)
struct LaggedPair {
  std::vector<uint8_t> a, b, c;
  int lag = 1;
  std::size_t n = 0;  // original series length
};

LaggedPair lagged_pair(const std::vector<uint8_t>& v1,
                       const std::vector<uint8_t>& v2, int lag);

struct ContingencyTable2x2 {
  int64_t n11 = 0;  // sum X*Y
  int64_t n10 = 0;  // sum X*(1-Y)
  int64_t n01 = 0;  // sum (1-X)*Y
  int64_t n00 = 0;  // sum (1-X)*(1-Y)
  int64_t total() const { return n11 + n10 + n01 + n00; }
  bool zero_margin() const;
};

ContingencyTable2x2 contingency(const std::vector<uint8_t>& x,
                                const std::vector<uint8_t>& y);

// Pearson statistic; 0 when any margin is zero (no association measurable).
double chi_square(const ContingencyTable2x2& t);

// ln((n11+1/2)(n00+1/2) / ((n10+1/2)(n01+1/2))); the half-count correction
// keeps the value finite for all tables.
double log_odds(const ContingencyTable2x2& t);

// Observed tables without materializing the stacked vectors.
ContingencyTable2x2 within_table(const std::vector<uint8_t>& v1,
                                 const std::vector<uint8_t>& v2, int lag);
ContingencyTable2x2 cross_table(const std::vector<uint8_t>& v1,
                                const std::vector<uint8_t>& v2, int lag);
ContingencyTable2x2 pooled_table(const std::vector<uint8_t>& v, int lag);

struct CalibrationResult {
  ContingencyTable2x2 table;
  double chi_square = 0;
  double log_odds = 0;
  double p_value = 1;             // share of permutations with chi2 >= observed
  double log_odds_percentile = 0; // share of permuted log-odds < observed
  int n_permutations = 0;
  uint64_t seed = 0;
  bool degenerate = false;  // observed table has a zero margin
};

// Shuffles each full-length vector independently n_perm times, rebuilds the
// lagged table, and recomputes both statistics. Fully determined by `seed`.
CalibrationResult permutation_calibrate(const std::vector<uint8_t>& v1,
                                        const std::vector<uint8_t>& v2, int lag,
                                        Comparison comparison, int n_perm,
                                        uint64_t seed);

// Single-vector control: A = v[0..n-lag-1], B = v[lag..n-1], only v permuted.
CalibrationResult pooled_control(const std::vector<uint8_t>& v_all, int lag,
                                 int n_perm, uint64_t seed);

// One fully attributed test result, as exported to results.csv.
struct AssociationResult {
  std::string region_id;
  int sub_index = 0;
  Comparison comparison = Comparison::WithinModes;
  int lag = 1;
  int periods_per_year = 26;
  CalibrationResult stats;
  std::string test_id() const;
};

std::string results_to_csv(const std::vector<AssociationResult>& results);
std::vector<AssociationResult> results_from_csv(const std::string& text);

}  // namespace quakemodes
