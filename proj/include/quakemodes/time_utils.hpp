#pragma once

#include <cstdint>
#include <string>

namespace quakemodes {

// Civil UTC date-time at second resolution (proleptic Gregorian calendar).
struct CivilTime {
  int year = 1970;
  int month = 1;  // 1..12
  int day = 1;    // 1..31
  int hour = 0;
  int minute = 0;
  int second = 0;
};

bool is_leap_year(int year);

// Days since 1970-01-01 for a civil date.
int64_t days_from_civil(int year, int month, int day);

int64_t epoch_from_civil(const CivilTime& c);
CivilTime civil_from_epoch(int64_t t);

// Unix seconds of Jan 1 00:00:00 UTC of `year`.
int64_t year_start_epoch(int year);
int64_t seconds_in_year(int year);

// "YYYY-MM-DDTHH:MM:SSZ"
int64_t parse_iso8601(const std::string& s);
std::string format_iso8601(int64_t t);

}  // namespace quakemodes
