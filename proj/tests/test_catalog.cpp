#include <doctest.h>
#include <zlib.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "quakemodes/catalog.hpp"
#include "quakemodes/rng.hpp"
#include "quakemodes/time_utils.hpp"

using namespace quakemodes;

namespace {

// One NDK block assembled from the published 80-column layout and decoded by
// hand below.
const char* kBlock =
    "GCMT 1980/05/18 08:32:11.5  46.20 -122.18  15.0 5.2 5.5 CASCADES\n"
    "Q198005180832A   B:  0    0   0 S:  0    0   0 M:  0    0   0 CMT: 1 TRIHD:  0.7\n"
    "CENTROID:      1.2 0.2  46.25 0.03 -122.20 0.04  14.0  0.8 FREE S-19800518123456\n"
    "23  1.100 0.010 -0.200 0.010 -0.900 0.012  0.300 0.015  0.250 0.011 -0.400 0.013\n"
    "V10   1.250 45  20  -0.300 10 130  -0.950 43 250 1.100 0 15  60  70 200  30\n";

MomentTensorRecord make_record(const std::string& id, double mw, int64_t t) {
  MomentTensorRecord r;
  r.event_id = id;
  r.origin_time = t;
  r.latitude = 10.0;
  r.longitude = 120.0;
  r.depth_km = 33.0;
  r.magnitude = mw;
  r.scalar_moment = scalar_moment_from_mw(mw);
  r.tensor = {1e24, -0.5e24, -0.5e24, 0.1e24, 0.0, 0.2e24};
  return r;
}

}  // namespace

TEST_CASE("hand-decoded NDK block") {
  const auto recs = parse_ndk(kBlock);
  REQUIRE(recs.size() == 1);
  const auto& r = recs[0];

  CHECK(r.event_id == "Q198005180832A");
  // 1980-05-18 08:32:11.5 UTC is 327486731.5; plus the 1.2 s centroid offset
  // and rounding to whole seconds.
  CHECK(r.origin_time == 327486733);
  CHECK(r.latitude == doctest::Approx(46.25));
  CHECK(r.longitude == doctest::Approx(-122.20));
  CHECK(r.depth_km == doctest::Approx(14.0));

  CHECK(r.tensor.mrr == doctest::Approx(1.100e23));
  CHECK(r.tensor.mtt == doctest::Approx(-0.200e23));
  CHECK(r.tensor.mpp == doctest::Approx(-0.900e23));
  CHECK(r.tensor.mrt == doctest::Approx(0.300e23));
  CHECK(r.tensor.mrp == doctest::Approx(0.250e23));
  CHECK(r.tensor.mtp == doctest::Approx(-0.400e23));

  REQUIRE(r.catalog_axes.has_value());
  const auto& ax = *r.catalog_axes;
  CHECK(ax[0].eigenvalue == doctest::Approx(1.250e23));
  CHECK(ax[0].plunge == doctest::Approx(45));
  CHECK(ax[0].azimuth == doctest::Approx(20));
  CHECK(ax[1].eigenvalue == doctest::Approx(-0.300e23));
  CHECK(ax[1].plunge == doctest::Approx(10));
  CHECK(ax[1].azimuth == doctest::Approx(130));
  CHECK(ax[2].eigenvalue == doctest::Approx(-0.950e23));
  CHECK(ax[2].plunge == doctest::Approx(43));
  CHECK(ax[2].azimuth == doctest::Approx(250));

  CHECK(r.scalar_moment == doctest::Approx(1.100e23));
  // Mw = (2/3)(log10(1.1e23) - 16.1)
  CHECK(r.magnitude == doctest::Approx(4.6276).epsilon(1e-4));
}

TEST_CASE("empty input gives empty list") {
  CHECK(parse_ndk("").empty());
  CHECK(parse_ndk("\n\n").empty());
}

TEST_CASE("incomplete block reports the block's first line") {
  std::string four_lines;
  {
    std::string all = kBlock;
    four_lines = all.substr(0, all.rfind("V10"));
  }
  try {
    parse_ndk(four_lines, ParseMode::Strict);
    FAIL("expected MalformedBlock");
  } catch (const MalformedBlock& e) {
    CHECK(e.line_number == 1);
  }

  ParseStats stats;
  CHECK(parse_ndk(four_lines, ParseMode::Lenient, &stats).empty());
  CHECK(stats.skipped_blocks == 1);
}

TEST_CASE("lenient mode skips a bad middle block, strict throws with its line") {
  std::string text = std::string(kBlock);
  std::string bad = kBlock;
  bad.replace(bad.find("46.25"), 5, "oops!");
  text += bad;
  text += kBlock;

  ParseStats stats;
  const auto recs = parse_ndk(text, ParseMode::Lenient, &stats);
  CHECK(recs.size() == 2);
  CHECK(stats.parsed == 2);
  CHECK(stats.skipped_blocks == 1);

  try {
    parse_ndk(text, ParseMode::Strict);
    FAIL("expected MalformedBlock");
  } catch (const MalformedBlock& e) {
    CHECK(e.line_number == 6);
  }
}

TEST_CASE("round trip: parse, serialize, re-parse") {
  const auto first = parse_ndk(kBlock);
  REQUIRE(first.size() == 1);
  const auto again = parse_ndk(to_ndk(first[0]));
  REQUIRE(again.size() == 1);
  const auto& a = first[0];
  const auto& b = again[0];

  CHECK(a.event_id == b.event_id);
  CHECK(a.origin_time == b.origin_time);
  CHECK(a.latitude == b.latitude);
  CHECK(a.longitude == b.longitude);
  CHECK(a.depth_km == b.depth_km);
  CHECK(a.magnitude == doctest::Approx(b.magnitude).epsilon(1e-9));

  // One unit in the last stored digit (three decimals at the 10^23 exponent).
  const double last_digit = 1e20;
  CHECK(std::fabs(a.tensor.mrr - b.tensor.mrr) <= last_digit);
  CHECK(std::fabs(a.tensor.mtt - b.tensor.mtt) <= last_digit);
  CHECK(std::fabs(a.tensor.mpp - b.tensor.mpp) <= last_digit);
  CHECK(std::fabs(a.tensor.mrt - b.tensor.mrt) <= last_digit);
  CHECK(std::fabs(a.tensor.mrp - b.tensor.mrp) <= last_digit);
  CHECK(std::fabs(a.tensor.mtp - b.tensor.mtp) <= last_digit);
  REQUIRE(b.catalog_axes.has_value());
  for (int i = 0; i < 3; ++i) {
    CHECK(std::fabs((*a.catalog_axes)[i].eigenvalue -
                    (*b.catalog_axes)[i].eigenvalue) <= last_digit);
    CHECK((*a.catalog_axes)[i].plunge == (*b.catalog_axes)[i].plunge);
    CHECK((*a.catalog_axes)[i].azimuth == (*b.catalog_axes)[i].azimuth);
  }
}

TEST_CASE("magnitude filter is strict and window is half-open") {
  std::vector<MomentTensorRecord> recs;
  recs.push_back(make_record("A", 3.05, parse_iso8601("1980-01-01T00:00:00Z")));
  recs.push_back(make_record("B", 3.06, parse_iso8601("1980-01-01T00:00:00Z")));
  recs.push_back(make_record("C", 5.00, parse_iso8601("2011-01-01T00:00:00Z")));

  const int64_t start = year_start_epoch(1977);
  const int64_t end = year_start_epoch(2011);
  const auto kept = filter_events(recs, 3.05, start, end);
  REQUIRE(kept.size() == 1);
  CHECK(kept[0].event_id == "B");

  CHECK(filter_events({}, 3.05, start, end).empty());
}

TEST_CASE("filter is idempotent and commutes over nested windows") {
  std::mt19937_64 rng(7);
  std::vector<MomentTensorRecord> recs;
  for (int i = 0; i < 300; ++i) {
    const double mw = 2.0 + 4.0 * uniform_double(rng);
    const int64_t t = year_start_epoch(1975) +
                      static_cast<int64_t>(uniform_double(rng) * 1.2e9);
    recs.push_back(make_record("R" + std::to_string(i), mw, t));
  }
  const int64_t a0 = year_start_epoch(1977), a1 = year_start_epoch(2011);
  const int64_t b0 = year_start_epoch(1980), b1 = year_start_epoch(2000);

  const auto once = filter_events(recs, 3.05, a0, a1);
  const auto twice = filter_events(once, 3.05, a0, a1);
  REQUIRE(once.size() == twice.size());
  for (std::size_t i = 0; i < once.size(); ++i) {
    CHECK(once[i].event_id == twice[i].event_id);
  }

  const auto ab = filter_events(filter_events(recs, 3.05, a0, a1), 3.05, b0, b1);
  const auto ba = filter_events(filter_events(recs, 3.05, b0, b1), 3.05, a0, a1);
  REQUIRE(ab.size() == ba.size());
  for (std::size_t i = 0; i < ab.size(); ++i) {
    CHECK(ab[i].event_id == ba[i].event_id);
  }
}

TEST_CASE("depth class boundary") {
  auto rec = make_record("D", 5.0, 0);
  rec.depth_km = 33;
  CHECK(depth_class(rec) == DepthClass::Shallow);
  rec.depth_km = 600;
  CHECK(depth_class(rec) == DepthClass::Deep);
  rec.depth_km = 200.0;
  CHECK(depth_class(rec) == DepthClass::Shallow);
  rec.depth_km = 200.0000001;
  CHECK(depth_class(rec) == DepthClass::Deep);
}

TEST_CASE("parsed records satisfy the magnitude/moment consistency bound") {
  const auto recs = parse_ndk(kBlock);
  for (const auto& r : recs) {
    CHECK(std::fabs(r.magnitude - mw_from_scalar_moment(r.scalar_moment)) < 0.05);
  }
}

TEST_CASE("event CSV export/import preserves fields at format precision") {
  std::vector<MomentTensorRecord> recs;
  recs.push_back(make_record("E1", 4.5, parse_iso8601("1990-06-15T12:34:56Z")));
  recs.push_back(make_record("E2", 6.2, parse_iso8601("2001-02-03T04:05:06Z")));
  recs[1].longitude = -170.25;
  recs[1].latitude = -23.5;
  recs[1].depth_km = 550.0;

  const std::string csv = events_to_csv(recs);
  CHECK(csv.rfind("event_id,origin_time,lat,lon,depth_km,mw,mrr,mtt,mpp,mrt,mrp,mtp\n", 0) == 0);
  const auto back = events_from_csv(csv);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back[i].event_id == recs[i].event_id);
    CHECK(back[i].origin_time == recs[i].origin_time);
    CHECK(back[i].latitude == doctest::Approx(recs[i].latitude).epsilon(1e-9));
    CHECK(back[i].longitude == doctest::Approx(recs[i].longitude).epsilon(1e-9));
    CHECK(back[i].depth_km == doctest::Approx(recs[i].depth_km).epsilon(1e-9));
    CHECK(back[i].magnitude == doctest::Approx(recs[i].magnitude).epsilon(1e-4));
    CHECK(back[i].tensor.mrr ==
          doctest::Approx(recs[i].tensor.mrr).epsilon(1e-5));
    CHECK(back[i].tensor.mtp ==
          doctest::Approx(recs[i].tensor.mtp).epsilon(1e-5));
  }
}

TEST_CASE("gzip-compressed NDK files read transparently") {
  const std::string dir = "/tmp/quakemodes_test";
  std::filesystem::create_directories(dir);
  const std::string plain = dir + "/cat.ndk";
  const std::string gz = dir + "/cat.ndk.gz";

  {
    FILE* f = std::fopen(plain.c_str(), "wb");
    REQUIRE(f != nullptr);
    std::fputs(kBlock, f);
    std::fputs(kBlock, f);
    std::fclose(f);
  }
  {
    gzFile g = gzopen(gz.c_str(), "wb");
    REQUIRE(g != nullptr);
    gzputs(g, kBlock);
    gzputs(g, kBlock);
    gzclose(g);
  }

  const auto from_plain = read_ndk_file(plain, ParseMode::Strict);
  const auto from_gz = read_ndk_file(gz, ParseMode::Strict);
  REQUIRE(from_plain.size() == 2);
  REQUIRE(from_gz.size() == 2);
  CHECK(from_plain[0].event_id == from_gz[0].event_id);
  CHECK(from_plain[1].origin_time == from_gz[1].origin_time);
}
