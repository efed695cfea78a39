// Copyright 2026 The fwcomp authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fwcomp/timeset.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>

namespace fwcomp {

namespace {

int64_t floor_div(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b) != 0 && ((a < 0) != (b < 0))) --q;
  return q;
}

int64_t floor_mod(int64_t a, int64_t b) { return a - floor_div(a, b) * b; }

const char* const kDayNames[7] = {"Mon", "Tue", "Wed", "Thu",
                                  "Fri", "Sat", "Sun"};

}  // namespace

int64_t minutes_from_civil(int year, int month, int day, int hour,
                           int minute) {
  std::chrono::year_month_day ymd{std::chrono::year{year},
                                  std::chrono::month{unsigned(month)},
                                  std::chrono::day{unsigned(day)}};
  auto days = std::chrono::sys_days(ymd).time_since_epoch().count();
  return int64_t{days} * kMinutesPerDay + hour * 60 + minute;
}

int weekday_of(int64_t abs_minutes) {
  int64_t days = floor_div(abs_minutes, kMinutesPerDay);
  return int(floor_mod(days + 3, 7));  // epoch day is a Thursday
}

int phase_of(int64_t abs_minutes) {
  return weekday_of(abs_minutes) * kMinutesPerDay +
         int(floor_mod(abs_minutes, kMinutesPerDay));
}

std::optional<int64_t> parse_datetime(std::string_view text) {
  int y, mo, d, h, mi;
  char trailing;
  std::string s(text);
  if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d%c", &y, &mo, &d, &h, &mi,
                  &trailing) != 5) {
    return std::nullopt;
  }
  if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 ||
      mi > 59) {
    return std::nullopt;
  }
  std::chrono::year_month_day ymd{std::chrono::year{y},
                                  std::chrono::month{unsigned(mo)},
                                  std::chrono::day{unsigned(d)}};
  if (!ymd.ok()) return std::nullopt;
  return minutes_from_civil(y, mo, d, h, mi);
}

std::string format_datetime(int64_t abs_minutes) {
  auto days = floor_div(abs_minutes, kMinutesPerDay);
  int rem = int(floor_mod(abs_minutes, kMinutesPerDay));
  std::chrono::year_month_day ymd{
      std::chrono::sys_days{std::chrono::days{days}}};
  char buf[24];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d",
                int(ymd.year()), unsigned(ymd.month()), unsigned(ymd.day()),
                rem / 60, rem % 60);
  return buf;
}

std::optional<int> parse_minute_of_day(std::string_view text) {
  int h, m;
  char trailing;
  std::string s(text);
  if (std::sscanf(s.c_str(), "%d:%d%c", &h, &m, &trailing) != 2) {
    return std::nullopt;
  }
  if (h < 0 || h > 23 || m < 0 || m > 59) return std::nullopt;
  return h * 60 + m;
}

std::string format_minute_of_day(int minute) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%02d:%02d", minute / 60, minute % 60);
  return buf;
}

std::optional<uint8_t> parse_weekdays(std::string_view text) {
  uint8_t out = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string_view::npos) comma = text.size();
    std::string_view token = text.substr(pos, comma - pos);
    bool found = false;
    for (int d = 0; d < 7; ++d) {
      if (token == kDayNames[d]) {
        out |= uint8_t(1 << d);
        found = true;
        break;
      }
    }
    if (!found) return std::nullopt;
    pos = comma + 1;
  }
  if (out == 0) return std::nullopt;
  return out;
}

std::string format_weekdays(uint8_t days) {
  std::string out;
  for (int d = 0; d < 7; ++d) {
    if (days & (1 << d)) {
      if (!out.empty()) out += ',';
      out += kDayNames[d];
    }
  }
  return out;
}

WeekBits weekly_bits(uint8_t weekdays, int daily_start, int daily_end) {
  if (weekdays == 0) weekdays = kAllWeekdays;  // empty set means all days
  WeekBits bits;
  for (int d = 0; d < 7; ++d) {
    if (!(weekdays & (1 << d))) continue;
    if (daily_start <= daily_end) {
      for (int m = daily_start; m <= daily_end; ++m) {
        bits.set(d * kMinutesPerDay + m);
      }
    } else {
      // wraps within the same day
      for (int m = daily_start; m < kMinutesPerDay; ++m) {
        bits.set(d * kMinutesPerDay + m);
      }
      for (int m = 0; m <= daily_end; ++m) {
        bits.set(d * kMinutesPerDay + m);
      }
    }
  }
  return bits;
}

// --- TimeSet ----------------------------------------------------------

namespace {

// Phases reachable inside a window; everything when a bound is open or
// the window spans a full week.
WeekBits reachable_phases(const std::optional<int64_t>& start,
                          const std::optional<int64_t>& end) {
  WeekBits bits;
  if (!start || !end || *end - *start + 1 >= kMinutesPerWeek) {
    bits.set();
    return bits;
  }
  int64_t len = *end - *start + 1;
  int p = phase_of(*start);
  for (int64_t i = 0; i < len; ++i) {
    bits.set(p);
    p = (p + 1) % kMinutesPerWeek;
  }
  return bits;
}

struct Cell {
  std::optional<int64_t> start, end;
  WeekBits a, b;
};

// Aligned elementary decomposition of two segment lists.
std::vector<Cell> refine(const std::vector<TimeSet::Segment>& a,
                         const std::vector<TimeSet::Segment>& b) {
  std::vector<int64_t> cuts;
  for (const auto* list : {&a, &b}) {
    for (const auto& seg : *list) {
      if (seg.start) cuts.push_back(*seg.start);
      if (seg.end && *seg.end != INT64_MAX) cuts.push_back(*seg.end + 1);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::vector<Cell> cells;
  for (size_t i = 0; i <= cuts.size(); ++i) {
    Cell cell;
    if (i > 0) cell.start = cuts[i - 1];
    if (i < cuts.size()) cell.end = cuts[i] - 1;
    if (cell.start && cell.end && *cell.start > *cell.end) continue;
    for (const auto& seg : a) {
      bool starts_ok = !seg.start || (cell.start && *cell.start >= *seg.start);
      bool ends_ok = !seg.end || (cell.end && *cell.end <= *seg.end);
      if (starts_ok && ends_ok) cell.a |= seg.weekly;
    }
    for (const auto& seg : b) {
      bool starts_ok = !seg.start || (cell.start && *cell.start >= *seg.start);
      bool ends_ok = !seg.end || (cell.end && *cell.end <= *seg.end);
      if (starts_ok && ends_ok) cell.b |= seg.weekly;
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

}  // namespace

TimeSet TimeSet::universe() {
  TimeSet t;
  Segment seg;
  seg.weekly.set();
  t.segs_.push_back(std::move(seg));
  return t;
}

TimeSet TimeSet::from_atom(const TimeAtom& atom) {
  TimeSet t;
  Segment seg;
  seg.start = atom.abs_start;
  seg.end = atom.abs_end;
  seg.weekly = weekly_bits(atom.weekdays, atom.daily_start, atom.daily_end);
  t.segs_.push_back(std::move(seg));
  return t.unite(empty_set());  // canonicalize
}

TimeSet TimeSet::combine(const TimeSet& other, BitOp op) const {
  std::vector<Segment> out;
  for (const Cell& cell : refine(segs_, other.segs_)) {
    WeekBits bits;
    switch (op) {
      case BitOp::Or:
        bits = cell.a | cell.b;
        break;
      case BitOp::And:
        bits = cell.a & cell.b;
        break;
      case BitOp::Diff:
        bits = cell.a & ~cell.b;
        break;
    }
    bits &= reachable_phases(cell.start, cell.end);
    if (bits.none()) continue;
    if (!out.empty()) {
      auto& prev = out.back();
      if (prev.end && cell.start && *prev.end + 1 == *cell.start &&
          prev.weekly == bits) {
        prev.end = cell.end;
        continue;
      }
    }
    out.push_back({cell.start, cell.end, bits});
  }
  TimeSet result;
  result.segs_ = std::move(out);
  return result;
}

TimeSet TimeSet::unite(const TimeSet& other) const {
  return combine(other, BitOp::Or);
}

TimeSet TimeSet::intersect(const TimeSet& other) const {
  return combine(other, BitOp::And);
}

TimeSet TimeSet::complement() const {
  return universe().combine(*this, BitOp::Diff);
}

bool TimeSet::subset_of(const TimeSet& other) const {
  return combine(other, BitOp::Diff).empty();
}

bool TimeSet::empty() const { return segs_.empty(); }

bool TimeSet::is_universe() const { return complement().empty(); }

bool TimeSet::contains(int64_t abs_minutes) const {
  for (const Segment& seg : segs_) {
    if (seg.start && abs_minutes < *seg.start) continue;
    if (seg.end && abs_minutes > *seg.end) continue;
    return seg.weekly[phase_of(abs_minutes)];
  }
  return false;
}

bool TimeSet::contains_phase_only(int phase) const {
  return phase_only_bits()[phase];
}

WeekBits TimeSet::phase_only_bits() const {
  // A phase holds at every date unless the complement reaches it.
  WeekBits missing;
  for (const Segment& seg : complement().segs_) {
    missing |= seg.weekly & reachable_phases(seg.start, seg.end);
  }
  return ~missing;
}

std::vector<TimeAtom> TimeSet::to_atoms() const {
  std::vector<TimeAtom> atoms;
  for (const Segment& seg : segs_) {
    WeekBits bits = seg.weekly & reachable_phases(seg.start, seg.end);
    if (bits.none()) continue;

    // Group weekdays by identical per-day minute runs.
    using Runs = std::vector<std::pair<int, int>>;
    std::map<Runs, uint8_t> groups;
    for (int d = 0; d < 7; ++d) {
      Runs runs;
      int run_start = -1;
      for (int m = 0; m <= kMinutesPerDay; ++m) {
        bool on = m < kMinutesPerDay && bits[d * kMinutesPerDay + m];
        if (on && run_start < 0) run_start = m;
        if (!on && run_start >= 0) {
          runs.push_back({run_start, m - 1});
          run_start = -1;
        }
      }
      if (!runs.empty()) groups[runs] |= uint8_t(1 << d);
    }
    for (const auto& [runs, days] : groups) {
      for (const auto& [lo, hi] : runs) {
        TimeAtom atom;
        atom.abs_start = seg.start;
        atom.abs_end = seg.end;
        atom.weekdays = days;
        atom.daily_start = lo;
        atom.daily_end = hi;
        atoms.push_back(atom);
      }
    }
  }
  return atoms;
}

}  // namespace fwcomp
