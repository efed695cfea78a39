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

#ifndef FWCOMP_TIMESET_HPP_
#define FWCOMP_TIMESET_HPP_

#include <bitset>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fwcomp {

// Time is modeled at minute granularity. Absolute instants are minutes
// since 1970-01-01 00:00 (a Thursday). The weekly phase is
// weekday * 1440 + minute_of_day with Monday = 0.
inline constexpr int kMinutesPerDay = 1440;
inline constexpr int kMinutesPerWeek = 10080;

using WeekBits = std::bitset<kMinutesPerWeek>;

enum Weekday : uint8_t {
  kMon = 1 << 0,
  kTue = 1 << 1,
  kWed = 1 << 2,
  kThu = 1 << 3,
  kFri = 1 << 4,
  kSat = 1 << 5,
  kSun = 1 << 6,
  kAllWeekdays = 0x7f,
};

int64_t minutes_from_civil(int year, int month, int day, int hour,
                           int minute);
int weekday_of(int64_t abs_minutes);  // 0 = Monday
int phase_of(int64_t abs_minutes);    // weekly phase

// "YYYY-MM-DDTHH:MM"
std::optional<int64_t> parse_datetime(std::string_view text);
std::string format_datetime(int64_t abs_minutes);
// "HH:MM" as minute of day
std::optional<int> parse_minute_of_day(std::string_view text);
std::string format_minute_of_day(int minute);
// "Mon,Tue,..." to weekday bit mask
std::optional<uint8_t> parse_weekdays(std::string_view text);
std::string format_weekdays(uint8_t days);

// Weekly bits of "on these weekdays, between daily_start and daily_end
// inclusive". A start past the end wraps within the same day.
WeekBits weekly_bits(uint8_t weekdays, int daily_start, int daily_end);

// One renderable time constraint: conjunctive absolute window, weekday
// set and daily window, all optional.
struct TimeAtom {
  std::optional<int64_t> abs_start, abs_end;
  uint8_t weekdays = kAllWeekdays;
  int daily_start = 0;
  int daily_end = kMinutesPerDay - 1;

  bool unconstrained() const {
    return !abs_start && !abs_end && weekdays == kAllWeekdays &&
           daily_start == 0 && daily_end == kMinutesPerDay - 1;
  }
  bool operator==(const TimeAtom&) const = default;
};

// A set of instants: union of segments, each an absolute window (either
// bound may be open) carrying a weekly-periodic phase set. Equality and
// subset tests are point-exact; representation is not unique, so
// equals() rather than operator==.
class TimeSet {
 public:
  struct Segment {
    std::optional<int64_t> start, end;  // inclusive, nullopt = unbounded
    WeekBits weekly;
  };

  TimeSet() = default;

  static TimeSet empty_set() { return TimeSet(); }
  static TimeSet universe();
  static TimeSet from_atom(const TimeAtom& atom);

  bool empty() const;
  bool is_universe() const;

  TimeSet unite(const TimeSet& other) const;
  TimeSet intersect(const TimeSet& other) const;
  TimeSet complement() const;
  bool subset_of(const TimeSet& other) const;
  bool equals(const TimeSet& other) const {
    return subset_of(other) && other.subset_of(*this);
  }

  // Membership. A phase-only instant (no date) is a member only when
  // every instant with that phase is in the set.
  bool contains(int64_t abs_minutes) const;
  bool contains_phase_only(int phase) const;

  // contains_phase_only for all phases at once.
  WeekBits phase_only_bits() const;

  // Decomposition into renderable atoms whose union is the set.
  std::vector<TimeAtom> to_atoms() const;

  const std::vector<Segment>& segments() const { return segs_; }

 private:
  enum class BitOp { Or, And, Diff };
  TimeSet combine(const TimeSet& other, BitOp op) const;

  // Disjoint segments in ascending order, maintained by combine().
  std::vector<Segment> segs_;
};

}  // namespace fwcomp

#endif  // FWCOMP_TIMESET_HPP_
