#include "quakemodes/fdr.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

namespace quakemodes {

FdrOutcome bh_select(const std::vector<double>& p_values, double q) {
  if (p_values.empty()) throw EmptyInput("no p-values to select from");
  if (!(q > 0.0 && q < 1.0)) throw Error("q must lie in (0,1)");
  for (double p : p_values) {
    if (!(p >= 0.0 && p <= 1.0)) throw Error("p-value outside [0,1]");
  }

  FdrOutcome out;
  out.q = q;
  out.m = p_values.size();
  out.order.resize(out.m);
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return p_values[a] < p_values[b];
                   });

  out.threshold_rank = 0;
  const double md = static_cast<double>(out.m);
  for (std::size_t k = out.m; k >= 1; --k) {
    if (p_values[out.order[k - 1]] <= static_cast<double>(k) * q / md) {
      out.threshold_rank = k;
      break;
    }
  }

  out.interesting.assign(out.m, false);
  for (std::size_t k = 0; k < out.threshold_rank; ++k) {
    out.interesting[out.order[k]] = true;
  }
  return out;
}

std::string fdr_to_csv(const std::vector<std::string>& test_ids,
                       const std::vector<double>& p_values,
                       const FdrOutcome& outcome) {
  std::string out = "test_id,p_value,rank,bh_threshold,interesting\n";
  char buf[256];
  for (std::size_t k = 0; k < outcome.order.size(); ++k) {
    const std::size_t idx = outcome.order[k];
    const double bh = static_cast<double>(k + 1) * outcome.q /
                      static_cast<double>(outcome.m);
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%zu,%.8f,%d\n",
                  test_ids[idx].c_str(), p_values[idx], k + 1, bh,
                  outcome.interesting[idx] ? 1 : 0);
    out += buf;
  }
  return out;
}

}  // namespace quakemodes
