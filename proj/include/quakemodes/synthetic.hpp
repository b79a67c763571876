#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "quakemodes/association.hpp"

namespace quakemodes {

// Coupled two-state Bernoulli chain:
//   P(v_k[t] = 1) = clip(base_rate + self_excite * v_k[t-1]
//                                  - cross_inhibit * v_other[t-1], 0.01, 0.99)
struct MarkovPairSpec {
  std::size_t length = 884;
  double base_rate = 0.3;
  double self_excite = 0.0;
  double cross_inhibit = 0.0;
  uint64_t seed = 0;
};

std::pair<std::vector<uint8_t>, std::vector<uint8_t>> gen_markov_pair(
    const MarkovPairSpec& spec);

// Exact permutation p-value by enumeration over all distinct arrangements of
// each vector (multiset permutations carry equal weight, so the proportion
// over distinct arrangement pairs equals the proportion over all n!*n!
// orderings). Lengths above 7 throw TooLongForExact. Defined for n > lag.
double exact_permutation_p(const std::vector<uint8_t>& v1,
                           const std::vector<uint8_t>& v2, int lag,
                           Comparison comparison);

// The chi-square values over all distinct arrangement pairs, one value per
// pair. This multiset depends only on the bit counts, not the arrangement of
// the inputs.
std::vector<double> exact_chi_distribution(const std::vector<uint8_t>& v1,
                                           const std::vector<uint8_t>& v2,
                                           int lag, Comparison comparison);

}  // namespace quakemodes
