#include "quakemodes/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "quakemodes/rng.hpp"

namespace quakemodes {

std::pair<std::vector<uint8_t>, std::vector<uint8_t>> gen_markov_pair(
    const MarkovPairSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::vector<uint8_t> v1(spec.length, 0), v2(spec.length, 0);
  uint8_t prev1 = 0, prev2 = 0;
  for (std::size_t t = 0; t < spec.length; ++t) {
    const double h1 = std::clamp(spec.base_rate + spec.self_excite * prev1 -
                                     spec.cross_inhibit * prev2,
                                 0.01, 0.99);
    const double h2 = std::clamp(spec.base_rate + spec.self_excite * prev2 -
                                     spec.cross_inhibit * prev1,
                                 0.01, 0.99);
    v1[t] = uniform_double(rng) < h1 ? 1 : 0;
    v2[t] = uniform_double(rng) < h2 ? 1 : 0;
    prev1 = v1[t];
    prev2 = v2[t];
  }
  return {std::move(v1), std::move(v2)};
}

namespace {

void check_exact_input(const std::vector<uint8_t>& v, int lag) {
  if (v.size() > 7) {
    throw TooLongForExact("exact enumeration supports lengths up to 7, got " +
                          std::to_string(v.size()));
  }
  if (lag < 1 || v.size() < static_cast<std::size_t>(lag) + 1) {
    throw SeriesTooShort("series length " + std::to_string(v.size()) +
                         " too short for lag " + std::to_string(lag));
  }
}

// Generalized table builders that only require n > lag (one predictor/response
// position per half), matching the production builders on their shared domain.
ContingencyTable2x2 table_for(const std::vector<uint8_t>& a1,
                              const std::vector<uint8_t>& a2, int lag,
                              Comparison comparison) {
  ContingencyTable2x2 t;
  const std::size_t m = a1.size() - static_cast<std::size_t>(lag);
  auto tally = [&](const std::vector<uint8_t>& pred,
                   const std::vector<uint8_t>& resp) {
    for (std::size_t i = 0; i < m; ++i) {
      if (pred[i]) {
        (resp[i + lag] ? t.n11 : t.n10)++;
      } else {
        (resp[i + lag] ? t.n01 : t.n00)++;
      }
    }
  };
  switch (comparison) {
    case Comparison::WithinModes:
      tally(a1, a1);
      tally(a2, a2);
      break;
    case Comparison::CrossModes:
      tally(a2, a1);
      tally(a1, a2);
      break;
    case Comparison::Pooled:
      tally(a1, a1);
      break;
  }
  return t;
}

std::vector<std::vector<uint8_t>> distinct_arrangements(std::vector<uint8_t> v) {
  std::sort(v.begin(), v.end());
  std::vector<std::vector<uint8_t>> out;
  do {
    out.push_back(v);
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

}  // namespace

std::vector<double> exact_chi_distribution(const std::vector<uint8_t>& v1,
                                           const std::vector<uint8_t>& v2,
                                           int lag, Comparison comparison) {
  check_exact_input(v1, lag);
  std::vector<double> out;
  if (comparison == Comparison::Pooled) {
    for (const auto& a1 : distinct_arrangements(v1)) {
      out.push_back(chi_square(table_for(a1, a1, lag, comparison)));
    }
    return out;
  }
  if (v1.size() != v2.size()) {
    throw LengthMismatch("presence vectors differ in length");
  }
  check_exact_input(v2, lag);
  const auto arr1 = distinct_arrangements(v1);
  const auto arr2 = distinct_arrangements(v2);
  out.reserve(arr1.size() * arr2.size());
  for (const auto& a1 : arr1) {
    for (const auto& a2 : arr2) {
      out.push_back(chi_square(table_for(a1, a2, lag, comparison)));
    }
  }
  return out;
}

double exact_permutation_p(const std::vector<uint8_t>& v1,
                           const std::vector<uint8_t>& v2, int lag,
                           Comparison comparison) {
  check_exact_input(v1, lag);
  if (comparison != Comparison::Pooled) {
    if (v1.size() != v2.size()) {
      throw LengthMismatch("presence vectors differ in length");
    }
    check_exact_input(v2, lag);
  }
  const double observed =
      chi_square(table_for(v1, comparison == Comparison::Pooled ? v1 : v2, lag,
                           comparison));
  const std::vector<double> dist =
      exact_chi_distribution(v1, v2, lag, comparison);
  int64_t ge = 0;
  for (double chi : dist) {
    if (chi >= observed) ++ge;
  }
  return static_cast<double>(ge) / static_cast<double>(dist.size());
}

}  // namespace quakemodes
