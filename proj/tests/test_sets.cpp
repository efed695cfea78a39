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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "fwcomp/addrset.hpp"
#include "fwcomp/serviceset.hpp"
#include "fwcomp/timeset.hpp"

using namespace fwcomp;

namespace {

// Brute-force membership over a window, the independent oracle for all
// interval-algebra checks.
std::vector<bool> window_bits(const AddressSet& set, uint32_t base,
                              uint32_t count) {
  std::vector<bool> bits(count);
  for (uint32_t i = 0; i < count; ++i) bits[i] = set.contains(base + i);
  return bits;
}

AddressSet random_set(std::mt19937& rng, uint32_t base, uint32_t span) {
  std::uniform_int_distribution<uint32_t> offset(0, span - 1);
  std::uniform_int_distribution<int> n_intervals(0, 4);
  std::vector<Interval> ivs;
  for (int i = n_intervals(rng); i > 0; --i) {
    uint32_t a = base + offset(rng);
    uint32_t b = base + offset(rng);
    ivs.push_back({std::min(a, b), std::max(a, b)});
  }
  return AddressSet::from_intervals(std::move(ivs));
}

// Optimal disjoint CIDR cover size by exhaustive recursion. A disjoint
// cover of [lo,hi] is a partition, so every decomposition picks some
// aligned power-of-two first block; minimize over all of them.
int optimal_cover_size(uint32_t lo, uint32_t hi) {
  struct Solver {
    uint64_t hi;
    std::map<uint64_t, int> memo;
    int solve(uint64_t pos) {
      if (pos > hi) return 0;
      auto it = memo.find(pos);
      if (it != memo.end()) return it->second;
      int best = INT32_MAX;
      for (int bits = 0; bits <= 32; ++bits) {
        uint64_t size = uint64_t{1} << bits;
        if (pos % size != 0) break;      // block must stay aligned
        if (pos + size - 1 > hi) break;  // and fit inside the range
        best = std::min(best, 1 + solve(pos + size));
      }
      memo[pos] = best;
      return best;
    }
  } solver{hi, {}};
  return solver.solve(lo);
}

}  // namespace

TEST_CASE("address set canonical form") {
  auto set = AddressSet::from_intervals(
      {{10, 20}, {15, 30}, {31, 40}, {50, 60}, {45, 45}});
  // overlapping and adjacent intervals coalesce
  CHECK(set.intervals() ==
        std::vector<Interval>{{10, 40}, {45, 45}, {50, 60}});
  CHECK(set.size() == 31 + 1 + 11);

  CHECK(AddressSet::universe().size() == uint64_t{1} << 32);
  CHECK(AddressSet::universe().is_universe());
  CHECK(AddressSet::empty_set().empty());
}

TEST_CASE("address set operations agree with brute force") {
  std::mt19937 rng(7);
  const uint32_t base = 0x0a000000;
  const uint32_t span = 1 << 12;
  for (int trial = 0; trial < 200; ++trial) {
    AddressSet a = random_set(rng, base, span);
    AddressSet b = random_set(rng, base, span);

    auto abits = window_bits(a, base, span);
    auto bbits = window_bits(b, base, span);

    auto u = window_bits(a.unite(b), base, span);
    auto i = window_bits(a.intersect(b), base, span);
    auto d = window_bits(a.subtract(b), base, span);
    bool subset = true;
    for (uint32_t k = 0; k < span; ++k) {
      CHECK(u[k] == (abits[k] || bbits[k]));
      CHECK(i[k] == (abits[k] && bbits[k]));
      CHECK(d[k] == (abits[k] && !bbits[k]));
      if (abits[k] && !bbits[k]) subset = false;
    }
    // sets are confined to the window, so window evidence decides
    CHECK(a.subset_of(b) == subset);

    // canonical: sorted, disjoint, non-adjacent
    const AddressSet merged = a.unite(b);
    const auto& ivs = merged.intervals();
    for (size_t k = 1; k < ivs.size(); ++k) {
      CHECK(ivs[k - 1].hi < ivs[k].lo);
      CHECK(uint64_t{ivs[k].lo} - ivs[k - 1].hi > 1);
    }
  }
}

TEST_CASE("complement at the edges of the space") {
  auto c = AddressSet::single(0).complement();
  CHECK(c.contains(1));
  CHECK(!c.contains(0));
  CHECK(c.contains(0xffffffffu));
  CHECK(AddressSet::universe().complement().empty());
  CHECK(AddressSet::empty_set().complement().is_universe());
  auto top = AddressSet::single(0xffffffffu).complement();
  CHECK(!top.contains(0xffffffffu));
  CHECK(top.contains(0xfffffffeu));
}

TEST_CASE("range_to_cidrs examples") {
  // aligned block
  auto aligned = range_to_cidrs(0x0a000000, 0x0a0000ff);
  REQUIRE(aligned.size() == 1);
  CHECK(format_cidr(aligned[0]) == "10.0.0.0/24");

  // singleton
  auto single = range_to_cidrs(0x0a000005, 0x0a000005);
  REQUIRE(single.size() == 1);
  CHECK(format_cidr(single[0]) == "10.0.0.5");

  // 10.0.0.1-10.0.0.6 needs four blocks and no three-block cover exists
  auto ragged = range_to_cidrs(0x0a000001, 0x0a000006);
  REQUIRE(ragged.size() == 4);
  CHECK(format_cidr(ragged[0]) == "10.0.0.1");
  CHECK(format_cidr(ragged[1]) == "10.0.0.2/31");
  CHECK(format_cidr(ragged[2]) == "10.0.0.4/31");
  CHECK(format_cidr(ragged[3]) == "10.0.0.6");
  CHECK(optimal_cover_size(0x0a000001, 0x0a000006) == 4);

  // full space
  auto all = range_to_cidrs(0, 0xffffffffu);
  REQUIRE(all.size() == 1);
  CHECK(all[0].prefix == 0);
}

TEST_CASE("range_to_cidrs is a correct minimal cover") {
  std::mt19937 rng(11);
  std::uniform_int_distribution<uint32_t> offset(0, (1 << 10) - 1);
  const uint32_t base = 0xc0a80000;  // unaligned activity around /16
  for (int trial = 0; trial < 500; ++trial) {
    uint32_t a = base + offset(rng);
    uint32_t b = base + offset(rng);
    uint32_t lo = std::min(a, b), hi = std::max(a, b);
    auto blocks = range_to_cidrs(lo, hi);

    // blocks tile [lo, hi] exactly, in ascending order
    uint64_t cursor = lo;
    for (const Cidr& c : blocks) {
      CHECK(c.first() == cursor);
      cursor = uint64_t{c.last()} + 1;
    }
    CHECK(cursor == uint64_t{hi} + 1);

    CHECK(int(blocks.size()) == optimal_cover_size(lo, hi));
  }
}

TEST_CASE("flag state cubes") {
  CHECK(flag_states(0, 0) == kAllFlagStates);
  // SYN set, ACK clear
  uint64_t syn_only = flag_states(kTcpSyn | kTcpAck, kTcpSyn);
  CHECK(std::popcount(syn_only) == 16);
  auto back = flag_states_to_mask_set(syn_only);
  REQUIRE(back.has_value());
  CHECK(back->first == (kTcpSyn | kTcpAck));
  CHECK(back->second == kTcpSyn);

  CHECK(format_flags(kTcpSyn | kTcpAck, kTcpSyn) == "S/SA");
  auto parsed = parse_flags("S/SA");
  REQUIRE(parsed.has_value());
  CHECK(parsed->first == (kTcpSyn | kTcpAck));
  CHECK(parsed->second == kTcpSyn);
  CHECK(!parse_flags("X/Y").has_value());
  CHECK(!parse_flags("SA/S").has_value());  // set outside mask
}

namespace {

BoxSet::Box random_box(std::mt19937& rng, uint32_t a_max, uint32_t b_max,
                       uint64_t states) {
  std::uniform_int_distribution<uint32_t> da(0, a_max), db(0, b_max);
  std::uniform_int_distribution<uint64_t> ds(1, states);
  uint32_t a1 = da(rng), a2 = da(rng), b1 = db(rng), b2 = db(rng);
  return {std::min(a1, a2), std::max(a1, a2),
          std::min(b1, b2), std::max(b1, b2), ds(rng)};
}

uint64_t brute_volume(const std::vector<BoxSet::Box>& boxes, uint32_t a_max,
                      uint32_t b_max, int states) {
  uint64_t v = 0;
  for (uint32_t a = 0; a <= a_max; ++a) {
    for (uint32_t b = 0; b <= b_max; ++b) {
      for (int s = 0; s < states; ++s) {
        for (const auto& box : boxes) {
          if (box.a_lo <= a && a <= box.a_hi && box.b_lo <= b &&
              b <= box.b_hi && ((box.states >> s) & 1)) {
            ++v;
            break;
          }
        }
      }
    }
  }
  return v;
}

}  // namespace

TEST_CASE("box set canonicalization matches brute force on a small space") {
  std::mt19937 rng(13);
  const uint32_t a_max = 15, b_max = 15;
  const uint64_t states = (uint64_t{1} << 4) - 1;  // 4-state universe

  for (int trial = 0; trial < 120; ++trial) {
    std::vector<BoxSet::Box> raw_a, raw_b;
    std::uniform_int_distribution<int> n(0, 3);
    for (int i = n(rng); i > 0; --i) {
      raw_a.push_back(random_box(rng, a_max, b_max, states));
    }
    for (int i = n(rng); i > 0; --i) {
      raw_b.push_back(random_box(rng, a_max, b_max, states));
    }
    BoxSet a = BoxSet::from_boxes(a_max, b_max, states, raw_a);
    BoxSet b = BoxSet::from_boxes(a_max, b_max, states, raw_b);

    CHECK(a.volume() == brute_volume(raw_a, a_max, b_max, 4));

    // disjointness of the canonical boxes
    for (size_t i = 0; i < a.boxes().size(); ++i) {
      for (size_t j = i + 1; j < a.boxes().size(); ++j) {
        const auto& x = a.boxes()[i];
        const auto& y = a.boxes()[j];
        bool overlap = x.a_lo <= y.a_hi && y.a_lo <= x.a_hi &&
                       x.b_lo <= y.b_hi && y.b_lo <= x.b_hi &&
                       (x.states & y.states) != 0;
        CHECK(!overlap);
      }
    }

    // pointwise agreement of all operations
    for (uint32_t pa = 0; pa <= a_max; ++pa) {
      for (uint32_t pb = 0; pb <= b_max; ++pb) {
        for (uint8_t s = 0; s < 4; ++s) {
          bool in_a = false, in_b = false;
          for (const auto& box : raw_a) {
            if (box.a_lo <= pa && pa <= box.a_hi && box.b_lo <= pb &&
                pb <= box.b_hi && ((box.states >> s) & 1)) {
              in_a = true;
            }
          }
          for (const auto& box : raw_b) {
            if (box.a_lo <= pa && pa <= box.a_hi && box.b_lo <= pb &&
                pb <= box.b_hi && ((box.states >> s) & 1)) {
              in_b = true;
            }
          }
          CHECK(a.contains(pa, pb, s) == in_a);
          CHECK(a.unite(b).contains(pa, pb, s) == (in_a || in_b));
          CHECK(a.intersect(b).contains(pa, pb, s) == (in_a && in_b));
          CHECK(a.subtract(b).contains(pa, pb, s) == (in_a && !in_b));
          CHECK(a.complement().contains(pa, pb, s) == !in_a);
        }
      }
    }

    // canonical form is unique: different construction orders agree
    std::vector<BoxSet::Box> shuffled = raw_a;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(BoxSet::from_boxes(a_max, b_max, states, shuffled) == a);

    CHECK(a.subset_of(a.unite(b)));
    CHECK(a.intersect(b).subset_of(a));
  }
}

TEST_CASE("service sets") {
  // Listing-style UDP service: src 30-70, dst 90-92
  ServiceSet udp = ServiceSet::udp(30, 70, 90, 92);
  CHECK(udp.contains({Proto::Udp, 0, 50, 91, 0, 0, 0}));
  CHECK(!udp.contains({Proto::Udp, 0, 50, 89, 0, 0, 0}));
  CHECK(!udp.contains({Proto::Udp, 0, 29, 91, 0, 0, 0}));
  CHECK(!udp.contains({Proto::Tcp, 0, 50, 91, 0, 0, 0}));

  CHECK(ServiceSet::universe().contains({Proto::Other, 47, 0, 0, 0, 0, 0}));
  CHECK(ServiceSet::universe().contains({Proto::Icmp, 0, 0, 0, 0, 8, 0}));
  CHECK(!ServiceSet::universe().subset_of(udp));
  CHECK(udp.subset_of(ServiceSet::universe()));

  // duplicate union coalesces
  ServiceSet http = ServiceSet::tcp(0, 65535, 80, 80);
  CHECK(http.unite(http) == http);

  // icmp wildcards
  ServiceSet echo = ServiceSet::icmp(8, 0);
  ServiceSet all_icmp = ServiceSet::icmp(std::nullopt, std::nullopt);
  CHECK(echo.subset_of(all_icmp));
  CHECK(!all_icmp.subset_of(echo));

  // complement closes over the whole space
  ServiceSet c = udp.complement();
  CHECK(c.contains({Proto::Tcp, 0, 50, 91, 0, 0, 0}));
  CHECK(c.contains({Proto::Udp, 0, 50, 89, 0, 0, 0}));
  CHECK(!c.contains({Proto::Udp, 0, 50, 91, 0, 0, 0}));
  CHECK(c.contains({Proto::Other, 47, 0, 0, 0, 0, 0}));
  CHECK(udp.unite(c).is_universe());

  // tcp flags participate in the space
  ServiceSet syn = ServiceSet::tcp(0, 65535, 80, 80, kTcpSyn | kTcpAck,
                                   kTcpSyn);
  CHECK(syn.contains({Proto::Tcp, 0, 1000, 80, kTcpSyn, 0, 0}));
  CHECK(!syn.contains({Proto::Tcp, 0, 1000, 80,
                       uint8_t(kTcpSyn | kTcpAck), 0, 0}));
  CHECK(syn.subset_of(http));
  CHECK(!http.subset_of(syn));
}

TEST_CASE("time sets") {
  TimeSet all = TimeSet::universe();
  CHECK(all.is_universe());
  CHECK(!all.empty());
  CHECK(TimeSet::empty_set().empty());

  // Mon-Fri 9:00-16:59
  TimeAtom atom;
  atom.weekdays = kMon | kTue | kWed | kThu | kFri;
  atom.daily_start = 9 * 60;
  atom.daily_end = 16 * 60 + 59;
  TimeSet work_hours = TimeSet::from_atom(atom);
  int64_t mon_noon = minutes_from_civil(2026, 1, 5, 12, 0);  // a Monday
  int64_t sat_noon = minutes_from_civil(2026, 1, 10, 12, 0);
  CHECK(weekday_of(mon_noon) == 0);
  CHECK(weekday_of(sat_noon) == 5);
  CHECK(work_hours.contains(mon_noon));
  CHECK(!work_hours.contains(sat_noon));
  CHECK(!work_hours.contains(minutes_from_civil(2026, 1, 5, 8, 59)));

  // complement flips membership everywhere
  TimeSet off = work_hours.complement();
  CHECK(!off.contains(mon_noon));
  CHECK(off.contains(sat_noon));
  CHECK(off.unite(work_hours).is_universe());
  CHECK(off.complement().equals(work_hours));

  // absolute windows
  TimeAtom january;
  january.abs_start = minutes_from_civil(2026, 1, 1, 0, 0);
  january.abs_end = minutes_from_civil(2026, 1, 31, 23, 59);
  TimeSet jan = TimeSet::from_atom(january);
  CHECK(jan.contains(mon_noon));
  CHECK(!jan.contains(minutes_from_civil(2026, 2, 1, 0, 0)));
  CHECK(jan.subset_of(all));
  CHECK(!all.subset_of(jan));
  CHECK(jan.intersect(work_hours).contains(mon_noon));
  CHECK(!jan.intersect(work_hours).contains(sat_noon));

  // phase-only membership needs the property at every date
  CHECK(all.contains_phase_only(0));
  CHECK(work_hours.contains_phase_only(9 * 60));           // Mon 09:00
  CHECK(!work_hours.contains_phase_only(8 * 60));          // Mon 08:00
  CHECK(!jan.contains_phase_only(9 * 60));             // bounded window

  // atoms reproduce the set
  TimeSet weekend = TimeSet::from_atom({std::nullopt, std::nullopt,
                                        uint8_t(kSat | kSun), 0,
                                        kMinutesPerDay - 1});
  auto atoms = weekend.unite(work_hours).to_atoms();
  TimeSet rebuilt;
  for (const TimeAtom& a : atoms) {
    rebuilt = rebuilt.unite(TimeSet::from_atom(a));
  }
  CHECK(rebuilt.equals(weekend.unite(work_hours)));
}

TEST_CASE("datetime helpers") {
  auto t = parse_datetime("2026-01-05T12:30");
  REQUIRE(t.has_value());
  CHECK(format_datetime(*t) == "2026-01-05T12:30");
  CHECK(weekday_of(*t) == 0);
  CHECK(!parse_datetime("2026-13-01T00:00").has_value());
  CHECK(!parse_datetime("garbage").has_value());

  CHECK(parse_minute_of_day("13:30") == 13 * 60 + 30);
  CHECK(format_minute_of_day(809) == "13:29");
  CHECK(parse_weekdays("Mon,Fri") == (kMon | kFri));
  CHECK(format_weekdays(kMon | kFri) == "Mon,Fri");
}
