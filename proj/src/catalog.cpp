#include "quakemodes/catalog.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "quakemodes/time_utils.hpp"

namespace quakemodes {

namespace {

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream iss(line);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, const char* what, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0' || !std::isfinite(v)) {
    throw MalformedBlock(line, std::string("bad ") + what + " '" + tok + "'");
  }
  return v;
}

long parse_long(const std::string& tok, const char* what, std::size_t line) {
  char* end = nullptr;
  const long v = std::strtol(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0') {
    throw MalformedBlock(line, std::string("bad ") + what + " '" + tok + "'");
  }
  return v;
}

double normalize_longitude(double lon) {
  lon = std::fmod(lon + 180.0, 360.0);
  if (lon < 0) lon += 360.0;
  return lon - 180.0;
}

struct NdkLine {
  std::string text;
  std::size_t number;  // 1-based
};

// Parses one 5-line block. `start` is the line number of the first line.
MomentTensorRecord parse_block(const NdkLine* lines) {
  const std::size_t start = lines[0].number;
  MomentTensorRecord rec;

  // Line 1: reference hypocenter. Only date/time are used (as the base for
  // the centroid time offset); position comes from the centroid line.
  const auto t1 = tokenize(lines[0].text);
  if (t1.size() < 8) throw MalformedBlock(start, "hypocenter line too short");
  int y = 0, mo = 0, d = 0, hh = 0, mm = 0;
  double ss = 0;
  if (std::sscanf(t1[1].c_str(), "%d/%d/%d", &y, &mo, &d) != 3 || mo < 1 ||
      mo > 12 || d < 1 || d > 31) {
    throw MalformedBlock(start, "bad date '" + t1[1] + "'");
  }
  if (std::sscanf(t1[2].c_str(), "%d:%d:%lf", &hh, &mm, &ss) != 3 || hh < 0 ||
      hh > 23 || mm < 0 || mm > 59 || ss < 0 || ss >= 61.0) {
    throw MalformedBlock(start, "bad time '" + t1[2] + "'");
  }
  const double ref_epoch =
      static_cast<double>(epoch_from_civil({y, mo, d, hh, mm, 0})) + ss;

  // Line 2: event name.
  const auto t2 = tokenize(lines[1].text);
  if (t2.empty()) throw MalformedBlock(start, "missing event name line");
  rec.event_id = t2[0];

  // Line 3: centroid parameters.
  const auto t3 = tokenize(lines[2].text);
  if (t3.size() < 9 || t3[0].rfind("CENTROID", 0) != 0) {
    throw MalformedBlock(start, "bad centroid line");
  }
  const double toff = parse_double(t3[1], "centroid time offset", start);
  rec.latitude = parse_double(t3[3], "centroid latitude", start);
  rec.longitude = normalize_longitude(parse_double(t3[5], "centroid longitude", start));
  rec.depth_km = parse_double(t3[7], "centroid depth", start);
  rec.origin_time = std::llround(ref_epoch + toff);
  if (rec.latitude < -90.0 || rec.latitude > 90.0) {
    throw MalformedBlock(start, "latitude out of range");
  }
  if (!(rec.depth_km > 0) || !std::isfinite(rec.depth_km)) {
    throw MalformedBlock(start, "depth not positive");
  }

  // Line 4: exponent and six (value, error) pairs.
  const auto t4 = tokenize(lines[3].text);
  if (t4.size() < 13) throw MalformedBlock(start, "tensor line too short");
  const long expo = parse_long(t4[0], "tensor exponent", start);
  const double scale = std::pow(10.0, static_cast<double>(expo));
  double* comps[6] = {&rec.tensor.mrr, &rec.tensor.mtt, &rec.tensor.mpp,
                      &rec.tensor.mrt, &rec.tensor.mrp, &rec.tensor.mtp};
  for (int i = 0; i < 6; ++i) {
    *comps[i] = parse_double(t4[1 + 2 * i], "tensor component", start) * scale;
  }

  // Line 5: version, three (value, plunge, azimuth) axis triples, scalar
  // moment; nodal planes ignored.
  const auto t5 = tokenize(lines[4].text);
  if (t5.size() < 11) throw MalformedBlock(start, "axis line too short");
  std::array<CatalogAxis, 3> axes;
  for (int i = 0; i < 3; ++i) {
    axes[i].eigenvalue = parse_double(t5[1 + 3 * i], "axis value", start) * scale;
    axes[i].plunge = parse_double(t5[2 + 3 * i], "axis plunge", start);
    axes[i].azimuth = parse_double(t5[3 + 3 * i], "axis azimuth", start);
    if (axes[i].plunge < 0 || axes[i].plunge > 90) {
      throw MalformedBlock(start, "axis plunge out of range");
    }
    if (axes[i].azimuth < 0) axes[i].azimuth += 360.0;
    if (axes[i].azimuth >= 360.0) axes[i].azimuth -= 360.0;
  }
  std::sort(axes.begin(), axes.end(),
            [](const CatalogAxis& a, const CatalogAxis& b) {
              return a.eigenvalue > b.eigenvalue;
            });
  rec.catalog_axes = axes;
  rec.scalar_moment = parse_double(t5[10], "scalar moment", start) * scale;
  if (!(rec.scalar_moment > 0)) {
    throw MalformedBlock(start, "scalar moment not positive");
  }
  rec.magnitude = mw_from_scalar_moment(rec.scalar_moment);

  for (double* c : comps) {
    if (!std::isfinite(*c)) throw MalformedBlock(start, "non-finite tensor");
  }
  return rec;
}

}  // namespace

double mw_from_scalar_moment(double m0_dyne_cm) {
  return (2.0 / 3.0) * (std::log10(m0_dyne_cm) - 16.1);
}

double scalar_moment_from_mw(double mw) {
  return std::pow(10.0, 1.5 * mw + 16.1);
}

std::vector<MomentTensorRecord> parse_ndk(const std::string& text,
                                          ParseMode mode, ParseStats* stats) {
  std::vector<NdkLine> lines;
  {
    std::size_t number = 1;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string::npos) eol = text.size();
      std::string line = text.substr(pos, eol - pos);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const bool blank = line.find_first_not_of(" \t") == std::string::npos;
      if (!blank) lines.push_back({std::move(line), number});
      ++number;
      if (eol == text.size()) break;
      pos = eol + 1;
    }
  }

  std::vector<MomentTensorRecord> out;
  for (std::size_t i = 0; i < lines.size(); i += 5) {
    if (i + 5 > lines.size()) {
      const MalformedBlock err(lines[i].number, "incomplete block (" +
                                                    std::to_string(lines.size() - i) +
                                                    " of 5 lines)");
      if (mode == ParseMode::Strict) throw err;
      if (stats) ++stats->skipped_blocks;
      break;
    }
    try {
      out.push_back(parse_block(&lines[i]));
      if (stats) ++stats->parsed;
    } catch (const MalformedBlock&) {
      if (mode == ParseMode::Strict) throw;
      if (stats) ++stats->skipped_blocks;
    }
  }
  return out;
}

std::vector<MomentTensorRecord> read_ndk_file(const std::string& path,
                                              ParseMode mode,
                                              ParseStats* stats) {
  // gzread inflates gzip members and passes plain files through unchanged.
  gzFile f = gzopen(path.c_str(), "rb");
  if (!f) throw IoError("cannot open " + path);
  std::string text;
  char buf[1 << 16];
  int n = 0;
  while ((n = gzread(f, buf, sizeof(buf))) > 0) text.append(buf, static_cast<std::size_t>(n));
  const bool bad = n < 0;
  gzclose(f);
  if (bad) throw IoError("read error in " + path);
  return parse_ndk(text, mode, stats);
}

std::string to_ndk(const MomentTensorRecord& rec) {
  const CivilTime c = civil_from_epoch(rec.origin_time);
  char buf[256];
  std::string out;

  std::snprintf(buf, sizeof(buf),
                "GCMT %04d/%02d/%02d %02d:%02d:%02d.0 %8.4f %9.4f %7.4f 0.0 0.0 SYNTHETIC\n",
                c.year, c.month, c.day, c.hour, c.minute, c.second,
                rec.latitude, rec.longitude, rec.depth_km);
  out += buf;

  std::snprintf(buf, sizeof(buf),
                "%-16s B:  0    0   0 S:  0    0   0 M:  0    0   0 CMT: 1 TRIHD:  0.0\n",
                rec.event_id.c_str());
  out += buf;

  std::snprintf(buf, sizeof(buf),
                "CENTROID:      0.0 0.0 %8.4f 0.00 %9.4f 0.00 %7.4f 0.0 FREE C-00000000000000\n",
                rec.latitude, rec.longitude, rec.depth_km);
  out += buf;

  const double comps[6] = {rec.tensor.mrr, rec.tensor.mtt, rec.tensor.mpp,
                           rec.tensor.mrt, rec.tensor.mrp, rec.tensor.mtp};
  double maxabs = rec.scalar_moment;
  for (double v : comps) maxabs = std::max(maxabs, std::fabs(v));
  const int expo = static_cast<int>(std::floor(std::log10(maxabs)));
  const double scale = std::pow(10.0, -expo);
  std::snprintf(buf, sizeof(buf), "%2d", expo);
  out += buf;
  for (double v : comps) {
    std::snprintf(buf, sizeof(buf), " %6.3f 0.000", v * scale);
    out += buf;
  }
  out += '\n';

  out += "V10";
  std::array<CatalogAxis, 3> axes{};
  if (rec.catalog_axes) axes = *rec.catalog_axes;
  for (const CatalogAxis& a : axes) {
    std::snprintf(buf, sizeof(buf), " %6.3f %g %g", a.eigenvalue * scale,
                  a.plunge, a.azimuth);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), " %.3f 0 0 0 0 0 0\n", rec.scalar_moment * scale);
  out += buf;
  return out;
}

std::string to_ndk(const std::vector<MomentTensorRecord>& recs) {
  std::string out;
  for (const auto& r : recs) out += to_ndk(r);
  return out;
}

std::vector<MomentTensorRecord> filter_events(
    const std::vector<MomentTensorRecord>& records, double min_magnitude,
    int64_t window_start, int64_t window_end) {
  std::vector<MomentTensorRecord> out;
  for (const auto& r : records) {
    if (r.magnitude > min_magnitude && r.origin_time >= window_start &&
        r.origin_time < window_end) {
      out.push_back(r);
    }
  }
  return out;
}

DepthClass depth_class_for(double depth_km, double split_km) {
  return depth_km > split_km ? DepthClass::Deep : DepthClass::Shallow;
}

DepthClass depth_class(const MomentTensorRecord& rec, double split_km) {
  return depth_class_for(rec.depth_km, split_km);
}

const char* depth_class_name(DepthClass d) {
  return d == DepthClass::Deep ? "Deep" : "Shallow";
}

std::string events_to_csv(const std::vector<MomentTensorRecord>& recs) {
  std::string out = "event_id,origin_time,lat,lon,depth_km,mw,mrr,mtt,mpp,mrt,mrp,mtp\n";
  char buf[512];
  for (const auto& r : recs) {
    std::snprintf(buf, sizeof(buf),
                  "%s,%s,%.5f,%.5f,%.3f,%.4f,%.5e,%.5e,%.5e,%.5e,%.5e,%.5e\n",
                  r.event_id.c_str(), format_iso8601(r.origin_time).c_str(),
                  r.latitude, r.longitude, r.depth_km, r.magnitude,
                  r.tensor.mrr, r.tensor.mtt, r.tensor.mpp, r.tensor.mrt,
                  r.tensor.mrp, r.tensor.mtp);
    out += buf;
  }
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      out.push_back(line.substr(pos));
      break;
    }
    out.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return out;
}

}  // namespace

std::vector<MomentTensorRecord> events_from_csv(const std::string& text) {
  std::vector<MomentTensorRecord> out;
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
    const auto f = split_csv(line);
    if (f.size() != 12) throw IoError("bad event row: " + line);
    MomentTensorRecord r;
    r.event_id = f[0];
    r.origin_time = parse_iso8601(f[1]);
    r.latitude = std::stod(f[2]);
    r.longitude = normalize_longitude(std::stod(f[3]));
    r.depth_km = std::stod(f[4]);
    r.magnitude = std::stod(f[5]);
    r.scalar_moment = scalar_moment_from_mw(r.magnitude);
    r.tensor.mrr = std::stod(f[6]);
    r.tensor.mtt = std::stod(f[7]);
    r.tensor.mpp = std::stod(f[8]);
    r.tensor.mrt = std::stod(f[9]);
    r.tensor.mrp = std::stod(f[10]);
    r.tensor.mtp = std::stod(f[11]);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace quakemodes
