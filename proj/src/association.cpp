#include "quakemodes/association.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "quakemodes/rng.hpp"

namespace quakemodes {

const char* comparison_name(Comparison c) {
  switch (c) {
    case Comparison::WithinModes: return "within";
    case Comparison::CrossModes: return "cross";
    case Comparison::Pooled: return "pooled";
  }
  return "within";
}

LaggedPair lagged_pair(const std::vector<uint8_t>& v1,
                       const std::vector<uint8_t>& v2, int lag) {
  if (v1.size() != v2.size()) {
    throw LengthMismatch("presence vectors differ in length");
  }
  const std::size_t n = v1.size();
  if (lag < 1 || n <= static_cast<std::size_t>(lag) + 1) {
    throw SeriesTooShort("series length " + std::to_string(n) +
                         " too short for lag " + std::to_string(lag));
  }
  LaggedPair p;
  p.lag = lag;
  p.n = n;
  const std::size_t m = n - static_cast<std::size_t>(lag);
  p.a.reserve(2 * m);
  p.b.reserve(2 * m);
  p.c.reserve(2 * m);
  for (std::size_t i = 0; i < m; ++i) p.a.push_back(v1[i]);
  for (std::size_t i = 0; i < m; ++i) p.a.push_back(v2[i]);
  for (std::size_t i = 0; i < m; ++i) p.b.push_back(v1[i + lag]);
  for (std::size_t i = 0; i < m; ++i) p.b.push_back(v2[i + lag]);
  for (std::size_t i = 0; i < m; ++i) p.c.push_back(v2[i]);
  for (std::size_t i = 0; i < m; ++i) p.c.push_back(v1[i]);
  return p;
}

ContingencyTable2x2 contingency(const std::vector<uint8_t>& x,
                                const std::vector<uint8_t>& y) {
  if (x.size() != y.size()) {
    throw LengthMismatch("contingency inputs differ in length");
  }
  ContingencyTable2x2 t;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i]) {
      (y[i] ? t.n11 : t.n10)++;
    } else {
      (y[i] ? t.n01 : t.n00)++;
    }
  }
  return t;
}

bool ContingencyTable2x2::zero_margin() const {
  return n11 + n10 == 0 || n01 + n00 == 0 || n11 + n01 == 0 || n10 + n00 == 0;
}

double chi_square(const ContingencyTable2x2& t) {
  const double r1 = static_cast<double>(t.n11 + t.n10);
  const double r0 = static_cast<double>(t.n01 + t.n00);
  const double c1 = static_cast<double>(t.n11 + t.n01);
  const double c0 = static_cast<double>(t.n10 + t.n00);
  if (r1 == 0 || r0 == 0 || c1 == 0 || c0 == 0) return 0.0;
  const double det = static_cast<double>(t.n11) * static_cast<double>(t.n00) -
                     static_cast<double>(t.n10) * static_cast<double>(t.n01);
  const double n = r1 + r0;
  return n * det * det / (r1 * r0 * c1 * c0);
}

double log_odds(const ContingencyTable2x2& t) {
  const double a = static_cast<double>(t.n11) + 0.5;
  const double b = static_cast<double>(t.n10) + 0.5;
  const double c = static_cast<double>(t.n01) + 0.5;
  const double d = static_cast<double>(t.n00) + 0.5;
  return std::log(a * d / (b * c));
}

namespace {

void check_pair(const std::vector<uint8_t>& v1, const std::vector<uint8_t>& v2,
                int lag) {
  if (v1.size() != v2.size()) {
    throw LengthMismatch("presence vectors differ in length");
  }
  if (lag < 1 || v1.size() <= static_cast<std::size_t>(lag) + 1) {
    throw SeriesTooShort("series length " + std::to_string(v1.size()) +
                         " too short for lag " + std::to_string(lag));
  }
}

inline void count_self(const std::vector<uint8_t>& pred,
                       const std::vector<uint8_t>& resp, int lag,
                       ContingencyTable2x2& t) {
  const std::size_t m = pred.size() - static_cast<std::size_t>(lag);
  for (std::size_t i = 0; i < m; ++i) {
    if (pred[i]) {
      (resp[i + lag] ? t.n11 : t.n10)++;
    } else {
      (resp[i + lag] ? t.n01 : t.n00)++;
    }
  }
}

}  // namespace

ContingencyTable2x2 within_table(const std::vector<uint8_t>& v1,
                                 const std::vector<uint8_t>& v2, int lag) {
  check_pair(v1, v2, lag);
  ContingencyTable2x2 t;
  count_self(v1, v1, lag, t);
  count_self(v2, v2, lag, t);
  return t;
}

ContingencyTable2x2 cross_table(const std::vector<uint8_t>& v1,
                                const std::vector<uint8_t>& v2, int lag) {
  check_pair(v1, v2, lag);
  ContingencyTable2x2 t;
  count_self(v2, v1, lag, t);  // predictor v2, response v1[lag..]
  count_self(v1, v2, lag, t);
  return t;
}

ContingencyTable2x2 pooled_table(const std::vector<uint8_t>& v, int lag) {
  if (lag < 1 || v.size() <= static_cast<std::size_t>(lag) + 1) {
    throw SeriesTooShort("series length " + std::to_string(v.size()) +
                         " too short for lag " + std::to_string(lag));
  }
  ContingencyTable2x2 t;
  count_self(v, v, lag, t);
  return t;
}

CalibrationResult permutation_calibrate(const std::vector<uint8_t>& v1,
                                        const std::vector<uint8_t>& v2, int lag,
                                        Comparison comparison, int n_perm,
                                        uint64_t seed) {
  if (comparison == Comparison::Pooled) {
    return pooled_control(v1, lag, n_perm, seed);
  }
  check_pair(v1, v2, lag);
  if (n_perm < 1) throw Error("n_perm must be at least 1");

  const bool within = comparison == Comparison::WithinModes;
  CalibrationResult r;
  r.table = within ? within_table(v1, v2, lag) : cross_table(v1, v2, lag);
  r.chi_square = chi_square(r.table);
  r.log_odds = log_odds(r.table);
  r.degenerate = r.table.zero_margin();
  r.n_permutations = n_perm;
  r.seed = seed;

  std::mt19937_64 rng(seed);
  std::vector<uint8_t> w1 = v1, w2 = v2;
  int64_t chi_ge = 0, lo_below = 0;
  for (int k = 0; k < n_perm; ++k) {
    fisher_yates(rng, w1);
    fisher_yates(rng, w2);
    const ContingencyTable2x2 t =
        within ? within_table(w1, w2, lag) : cross_table(w1, w2, lag);
    if (chi_square(t) >= r.chi_square) ++chi_ge;
    if (log_odds(t) < r.log_odds) ++lo_below;
  }
  r.p_value = static_cast<double>(chi_ge) / n_perm;
  r.log_odds_percentile = static_cast<double>(lo_below) / n_perm;
  return r;
}

CalibrationResult pooled_control(const std::vector<uint8_t>& v_all, int lag,
                                 int n_perm, uint64_t seed) {
  if (lag < 1 || v_all.size() <= static_cast<std::size_t>(lag) + 1) {
    throw SeriesTooShort("series length " + std::to_string(v_all.size()) +
                         " too short for lag " + std::to_string(lag));
  }
  if (n_perm < 1) throw Error("n_perm must be at least 1");

  CalibrationResult r;
  r.table = pooled_table(v_all, lag);
  r.chi_square = chi_square(r.table);
  r.log_odds = log_odds(r.table);
  r.degenerate = r.table.zero_margin();
  r.n_permutations = n_perm;
  r.seed = seed;

  std::mt19937_64 rng(seed);
  std::vector<uint8_t> w = v_all;
  int64_t chi_ge = 0, lo_below = 0;
  for (int k = 0; k < n_perm; ++k) {
    fisher_yates(rng, w);
    const ContingencyTable2x2 t = pooled_table(w, lag);
    if (chi_square(t) >= r.chi_square) ++chi_ge;
    if (log_odds(t) < r.log_odds) ++lo_below;
  }
  r.p_value = static_cast<double>(chi_ge) / n_perm;
  r.log_odds_percentile = static_cast<double>(lo_below) / n_perm;
  return r;
}

std::string AssociationResult::test_id() const {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%s/%d/%s/lag%d/p%d", region_id.c_str(),
                sub_index, comparison_name(comparison), lag, periods_per_year);
  return buf;
}

std::string results_to_csv(const std::vector<AssociationResult>& results) {
  std::string out =
      "region_id,sub_index,comparison,lag,periods_per_year,"
      "n11,n10,n01,n00,chi_square,log_odds,p_value,log_odds_percentile,"
      "degenerate,seed\n";
  char buf[512];
  for (const auto& r : results) {
    std::snprintf(
        buf, sizeof(buf),
        "%s,%d,%s,%d,%d,%lld,%lld,%lld,%lld,%.10g,%.10g,%.6f,%.6f,%d,%llu\n",
        r.region_id.c_str(), r.sub_index, comparison_name(r.comparison), r.lag,
        r.periods_per_year, static_cast<long long>(r.stats.table.n11),
        static_cast<long long>(r.stats.table.n10),
        static_cast<long long>(r.stats.table.n01),
        static_cast<long long>(r.stats.table.n00), r.stats.chi_square,
        r.stats.log_odds, r.stats.p_value, r.stats.log_odds_percentile,
        r.stats.degenerate ? 1 : 0,
        static_cast<unsigned long long>(r.stats.seed));
    out += buf;
  }
  return out;
}

std::vector<AssociationResult> results_from_csv(const std::string& text) {
  std::vector<AssociationResult> out;
  std::istringstream iss(text);
  std::string line;
  bool header = true;
  while (std::getline(iss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> f;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) {
        f.push_back(line.substr(pos));
        break;
      }
      f.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    if (f.size() != 15) throw Error("bad results row: " + line);
    AssociationResult r;
    r.region_id = f[0];
    r.sub_index = std::stoi(f[1]);
    if (f[2] == "within") r.comparison = Comparison::WithinModes;
    else if (f[2] == "cross") r.comparison = Comparison::CrossModes;
    else if (f[2] == "pooled") r.comparison = Comparison::Pooled;
    else throw Error("unknown comparison: " + f[2]);
    r.lag = std::stoi(f[3]);
    r.periods_per_year = std::stoi(f[4]);
    r.stats.table.n11 = std::stoll(f[5]);
    r.stats.table.n10 = std::stoll(f[6]);
    r.stats.table.n01 = std::stoll(f[7]);
    r.stats.table.n00 = std::stoll(f[8]);
    r.stats.chi_square = std::stod(f[9]);
    r.stats.log_odds = std::stod(f[10]);
    r.stats.p_value = std::stod(f[11]);
    r.stats.log_odds_percentile = std::stod(f[12]);
    r.stats.degenerate = f[13] == "1";
    r.stats.seed = std::strtoull(f[14].c_str(), nullptr, 10);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace quakemodes
