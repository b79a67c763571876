#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "quakemodes/errors.hpp"

namespace quakemodes {

struct FdrOutcome {
  double q = 0;
  std::size_t m = 0;
  // Test indices sorted by ascending p-value, ties in stable input order.
  std::vector<std::size_t> order;
  // Largest k with p(k) <= k*q/m; 0 when none.
  std::size_t threshold_rank = 0;
  // One flag per input test, true for the threshold_rank smallest p-values.
  std::vector<bool> interesting;
};

// Benjamini-Hochberg step-up selection.
FdrOutcome bh_select(const std::vector<double>& p_values, double q);

// test_id,p_value,rank,bh_threshold,interesting  (rows in ascending-p order)
std::string fdr_to_csv(const std::vector<std::string>& test_ids,
                       const std::vector<double>& p_values,
                       const FdrOutcome& outcome);

}  // namespace quakemodes
