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

#include "fwcomp/serviceset.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <string>

namespace fwcomp {

uint64_t flag_states(uint8_t mask, uint8_t set) {
  uint64_t out = 0;
  for (unsigned f = 0; f < 64; ++f) {
    if ((f & mask) == (set & mask)) out |= uint64_t{1} << f;
  }
  return out;
}

std::optional<std::pair<uint8_t, uint8_t>> flag_states_to_mask_set(
    uint64_t states) {
  for (unsigned mask = 0; mask < 64; ++mask) {
    for (unsigned set = 0; set < 64; ++set) {
      if ((set & mask) != set) continue;
      if (flag_states(mask, set) == states) return std::pair{uint8_t(mask),
                                                             uint8_t(set)};
    }
  }
  return std::nullopt;
}

namespace {
constexpr char kFlagLetters[] = "FSRPAU";
}  // namespace

std::string flag_letters(uint8_t bits) {
  std::string out;
  for (int i = 0; i < 6; ++i) {
    if (bits & (1 << i)) out += kFlagLetters[i];
  }
  return out;
}

std::string format_flags(uint8_t mask, uint8_t set) {
  return flag_letters(set & mask) + "/" + flag_letters(mask);
}

std::optional<std::pair<uint8_t, uint8_t>> parse_flags(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  uint8_t set = 0, mask = 0;
  auto decode = [](std::string_view letters, uint8_t* out) {
    for (char c : letters) {
      const char* pos =
          std::char_traits<char>::find(kFlagLetters, 6, c);
      if (pos == nullptr) return false;
      *out |= uint8_t(1 << (pos - kFlagLetters));
    }
    return true;
  };
  if (!decode(text.substr(0, slash), &set)) return std::nullopt;
  if (!decode(text.substr(slash + 1), &mask)) return std::nullopt;
  if ((set & mask) != set) return std::nullopt;
  return std::pair{mask, set};
}

// --- BoxSet -----------------------------------------------------------

namespace {

// (b interval, states) profile of one slab; merged, nonzero entries.
using Profile = std::vector<std::tuple<uint32_t, uint32_t, uint64_t>>;

void append_merged(Profile* profile, uint32_t lo, uint32_t hi,
                   uint64_t states) {
  if (states == 0) return;
  if (!profile->empty()) {
    auto& [plo, phi, pstates] = profile->back();
    if (pstates == states && phi + 1 == lo) {
      phi = hi;
      return;
    }
  }
  profile->push_back({lo, hi, states});
}

}  // namespace

BoxSet BoxSet::from_boxes(uint32_t a_max, uint32_t b_max,
                          uint64_t state_universe, std::vector<Box> boxes) {
  BoxSet seed(a_max, b_max, state_universe);
  BoxSet empty(a_max, b_max, state_universe);
  // Route through combine() so the result is canonical even when input
  // boxes overlap: combine ORs all covering boxes per cell.
  seed.boxes_ = std::move(boxes);
  std::erase_if(seed.boxes_, [&](const Box& b) {
    return b.a_lo > b.a_hi || b.b_lo > b.b_hi || (b.states & state_universe) == 0;
  });
  for (Box& b : seed.boxes_) b.states &= state_universe;
  return seed.combine(empty, [](uint64_t x, uint64_t y) { return x | y; });
}

BoxSet BoxSet::combine(const BoxSet& other,
                       uint64_t (*merge)(uint64_t, uint64_t)) const {
  // Elementary a-slab boundaries from both operands.
  std::vector<uint64_t> cuts;
  cuts.reserve(boxes_.size() * 2 + other.boxes_.size() * 2 + 2);
  cuts.push_back(0);
  cuts.push_back(uint64_t{a_max_} + 1);
  for (const auto* set : {this, &other}) {
    for (const Box& b : set->boxes_) {
      cuts.push_back(b.a_lo);
      cuts.push_back(uint64_t{b.a_hi} + 1);
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  BoxSet out(a_max_, b_max_, state_universe_);
  std::vector<std::pair<uint64_t, Profile>> slabs;  // (a_lo, profile)

  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    uint32_t a_lo = uint32_t(cuts[i]);
    uint32_t a_hi = uint32_t(cuts[i + 1] - 1);

    // b-axis boundaries within this slab.
    std::vector<uint64_t> bcuts;
    bcuts.push_back(0);
    bcuts.push_back(uint64_t{b_max_} + 1);
    for (const auto* set : {this, &other}) {
      for (const Box& b : set->boxes_) {
        if (b.a_lo > a_hi || b.a_hi < a_lo) continue;
        bcuts.push_back(b.b_lo);
        bcuts.push_back(uint64_t{b.b_hi} + 1);
      }
    }
    std::sort(bcuts.begin(), bcuts.end());
    bcuts.erase(std::unique(bcuts.begin(), bcuts.end()), bcuts.end());

    Profile profile;
    for (size_t j = 0; j + 1 < bcuts.size(); ++j) {
      uint32_t b_lo = uint32_t(bcuts[j]);
      uint32_t b_hi = uint32_t(bcuts[j + 1] - 1);
      uint64_t mine = 0, theirs = 0;
      for (const Box& b : boxes_) {
        if (b.a_lo <= a_lo && a_hi <= b.a_hi && b.b_lo <= b_lo &&
            b_hi <= b.b_hi) {
          mine |= b.states;
        }
      }
      for (const Box& b : other.boxes_) {
        if (b.a_lo <= a_lo && a_hi <= b.a_hi && b.b_lo <= b_lo &&
            b_hi <= b.b_hi) {
          theirs |= b.states;
        }
      }
      append_merged(&profile, b_lo, b_hi, merge(mine, theirs) & state_universe_);
    }

    // Coalesce with the previous slab when profiles match.
    if (!slabs.empty() && slabs.back().second == profile) continue;
    slabs.push_back({a_lo, profile});
  }

  for (size_t i = 0; i < slabs.size(); ++i) {
    uint32_t a_lo = uint32_t(slabs[i].first);
    uint32_t a_hi =
        i + 1 < slabs.size() ? uint32_t(slabs[i + 1].first - 1) : a_max_;
    for (const auto& [b_lo, b_hi, states] : slabs[i].second) {
      out.boxes_.push_back({a_lo, a_hi, b_lo, b_hi, states});
    }
  }
  return out;
}

bool BoxSet::is_universe() const {
  return boxes_.size() == 1 && boxes_[0].a_lo == 0 &&
         boxes_[0].a_hi == a_max_ && boxes_[0].b_lo == 0 &&
         boxes_[0].b_hi == b_max_ && boxes_[0].states == state_universe_;
}

uint64_t BoxSet::volume() const {
  uint64_t total = 0;
  for (const Box& b : boxes_) {
    total += uint64_t(b.a_hi - b.a_lo + 1) * (b.b_hi - b.b_lo + 1) *
             std::popcount(b.states);
  }
  return total;
}

bool BoxSet::contains(uint32_t a, uint32_t b, uint8_t state) const {
  for (const Box& box : boxes_) {
    if (box.a_lo <= a && a <= box.a_hi && box.b_lo <= b && b <= box.b_hi) {
      return (box.states >> state) & 1;
    }
  }
  return false;
}

BoxSet BoxSet::unite(const BoxSet& other) const {
  return combine(other, [](uint64_t x, uint64_t y) { return x | y; });
}

BoxSet BoxSet::intersect(const BoxSet& other) const {
  return combine(other, [](uint64_t x, uint64_t y) { return x & y; });
}

BoxSet BoxSet::subtract(const BoxSet& other) const {
  return combine(other, [](uint64_t x, uint64_t y) { return x & ~y; });
}

BoxSet BoxSet::complement() const {
  BoxSet full(a_max_, b_max_, state_universe_);
  full.boxes_.push_back({0, a_max_, 0, b_max_, state_universe_});
  return full.subtract(*this);
}

// --- ServiceSet -------------------------------------------------------

namespace {
constexpr uint32_t kPortMax = 65535;
constexpr uint32_t kIcmpMax = 255;

AddressSet other_protocol_universe() {
  std::vector<Interval> ivs;
  uint32_t next = 0;
  for (uint8_t reserved : {1, 6, 17}) {
    if (reserved > next) ivs.push_back({next, uint32_t(reserved) - 1});
    next = reserved + 1;
  }
  ivs.push_back({next, 255});
  return AddressSet::from_intervals(std::move(ivs));
}
}  // namespace

ServiceSet::ServiceSet()
    : tcp_(kPortMax, kPortMax, kAllFlagStates),
      udp_(kPortMax, kPortMax, 1),
      icmp_(kIcmpMax, kIcmpMax, 1) {}

ServiceSet ServiceSet::universe() {
  ServiceSet s;
  s.tcp_ = BoxSet::from_boxes(kPortMax, kPortMax, kAllFlagStates,
                              {{0, kPortMax, 0, kPortMax, kAllFlagStates}});
  s.udp_ = BoxSet::from_boxes(kPortMax, kPortMax, 1,
                              {{0, kPortMax, 0, kPortMax, 1}});
  s.icmp_ = BoxSet::from_boxes(kIcmpMax, kIcmpMax, 1,
                               {{0, kIcmpMax, 0, kIcmpMax, 1}});
  s.other_ = other_protocol_universe();
  return s;
}

ServiceSet ServiceSet::tcp(uint16_t src_lo, uint16_t src_hi, uint16_t dst_lo,
                           uint16_t dst_hi, uint8_t flags_mask,
                           uint8_t flags_set) {
  ServiceSet s;
  s.tcp_ = BoxSet::from_boxes(
      kPortMax, kPortMax, kAllFlagStates,
      {{src_lo, src_hi, dst_lo, dst_hi, flag_states(flags_mask, flags_set)}});
  return s;
}

ServiceSet ServiceSet::udp(uint16_t src_lo, uint16_t src_hi, uint16_t dst_lo,
                           uint16_t dst_hi) {
  ServiceSet s;
  s.udp_ = BoxSet::from_boxes(kPortMax, kPortMax, 1,
                              {{src_lo, src_hi, dst_lo, dst_hi, 1}});
  return s;
}

ServiceSet ServiceSet::icmp(std::optional<uint8_t> type,
                            std::optional<uint8_t> code) {
  ServiceSet s;
  uint32_t t_lo = type ? *type : 0, t_hi = type ? *type : kIcmpMax;
  uint32_t c_lo = code ? *code : 0, c_hi = code ? *code : kIcmpMax;
  s.icmp_ = BoxSet::from_boxes(kIcmpMax, kIcmpMax, 1,
                               {{t_lo, t_hi, c_lo, c_hi, 1}});
  return s;
}

ServiceSet ServiceSet::ip_proto(uint8_t protocol) {
  ServiceSet s;
  switch (protocol) {
    case 6:
      return tcp(0, 65535, 0, 65535);
    case 17:
      return udp(0, 65535, 0, 65535);
    case 1:
      return icmp(std::nullopt, std::nullopt);
    default:
      s.other_ = AddressSet::single(protocol);
      return s;
  }
}

bool ServiceSet::empty() const {
  return tcp_.empty() && udp_.empty() && icmp_.empty() && other_.empty();
}

bool ServiceSet::is_universe() const { return *this == universe(); }

bool ServiceSet::contains(const ServicePoint& p) const {
  switch (p.proto) {
    case Proto::Tcp:
      return tcp_.contains(p.src_port, p.dst_port, p.tcp_flags & 0x3f);
    case Proto::Udp:
      return udp_.contains(p.src_port, p.dst_port, 0);
    case Proto::Icmp:
      return icmp_.contains(p.icmp_type, p.icmp_code, 0);
    case Proto::Other:
      return other_.contains(p.proto_number);
  }
  return false;
}

ServiceSet ServiceSet::unite(const ServiceSet& o) const {
  ServiceSet s;
  s.tcp_ = tcp_.unite(o.tcp_);
  s.udp_ = udp_.unite(o.udp_);
  s.icmp_ = icmp_.unite(o.icmp_);
  s.other_ = other_.unite(o.other_);
  return s;
}

ServiceSet ServiceSet::intersect(const ServiceSet& o) const {
  ServiceSet s;
  s.tcp_ = tcp_.intersect(o.tcp_);
  s.udp_ = udp_.intersect(o.udp_);
  s.icmp_ = icmp_.intersect(o.icmp_);
  s.other_ = other_.intersect(o.other_);
  return s;
}

ServiceSet ServiceSet::subtract(const ServiceSet& o) const {
  ServiceSet s;
  s.tcp_ = tcp_.subtract(o.tcp_);
  s.udp_ = udp_.subtract(o.udp_);
  s.icmp_ = icmp_.subtract(o.icmp_);
  s.other_ = other_.subtract(o.other_);
  return s;
}

ServiceSet ServiceSet::complement() const {
  return universe().subtract(*this);
}

bool ServiceSet::subset_of(const ServiceSet& o) const {
  return tcp_.subset_of(o.tcp_) && udp_.subset_of(o.udp_) &&
         icmp_.subset_of(o.icmp_) && other_.subset_of(o.other_);
}

bool ServiceSet::intersects(const ServiceSet& o) const {
  return tcp_.intersects(o.tcp_) || udp_.intersects(o.udp_) ||
         icmp_.intersects(o.icmp_) || other_.intersects(o.other_);
}

}  // namespace fwcomp
