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

#include "fwcomp/addrset.hpp"

#include <algorithm>
#include <bit>

namespace fwcomp {

AddressSet AddressSet::from_intervals(std::vector<Interval> intervals) {
  std::erase_if(intervals, [](const Interval& iv) { return iv.lo > iv.hi; });
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) {
              return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
            });
  AddressSet out;
  for (const Interval& iv : intervals) {
    if (!out.intervals_.empty()) {
      Interval& back = out.intervals_.back();
      // Merge overlapping and adjacent intervals; hi+1 may wrap at the
      // top of the space, hence the guard.
      if (back.hi == 0xffffffffu || iv.lo <= back.hi + 1) {
        back.hi = std::max(back.hi, iv.hi);
        continue;
      }
    }
    out.intervals_.push_back(iv);
  }
  return out;
}

uint64_t AddressSet::size() const {
  uint64_t total = 0;
  for (const Interval& iv : intervals_) {
    total += uint64_t{iv.hi} - iv.lo + 1;
  }
  return total;
}

bool AddressSet::contains(uint32_t addr) const {
  auto it = std::upper_bound(
      intervals_.begin(), intervals_.end(), addr,
      [](uint32_t a, const Interval& iv) { return a < iv.lo; });
  if (it == intervals_.begin()) return false;
  --it;
  return addr >= it->lo && addr <= it->hi;
}

AddressSet AddressSet::unite(const AddressSet& other) const {
  std::vector<Interval> all = intervals_;
  all.insert(all.end(), other.intervals_.begin(), other.intervals_.end());
  return from_intervals(std::move(all));
}

AddressSet AddressSet::intersect(const AddressSet& other) const {
  std::vector<Interval> out;
  auto a = intervals_.begin();
  auto b = other.intervals_.begin();
  while (a != intervals_.end() && b != other.intervals_.end()) {
    uint32_t lo = std::max(a->lo, b->lo);
    uint32_t hi = std::min(a->hi, b->hi);
    if (lo <= hi) out.push_back({lo, hi});
    if (a->hi < b->hi) {
      ++a;
    } else {
      ++b;
    }
  }
  return from_intervals(std::move(out));
}

AddressSet AddressSet::complement() const {
  std::vector<Interval> out;
  uint64_t next = 0;  // 64-bit cursor avoids wrap at the top
  for (const Interval& iv : intervals_) {
    if (iv.lo > next) out.push_back({uint32_t(next), iv.lo - 1});
    next = uint64_t{iv.hi} + 1;
  }
  if (next <= 0xffffffffu) out.push_back({uint32_t(next), 0xffffffffu});
  AddressSet result;
  result.intervals_ = std::move(out);  // already canonical
  return result;
}

AddressSet AddressSet::subtract(const AddressSet& other) const {
  return intersect(other.complement());
}

bool AddressSet::subset_of(const AddressSet& other) const {
  return subtract(other).empty();
}

bool AddressSet::intersects(const AddressSet& other) const {
  auto a = intervals_.begin();
  auto b = other.intervals_.begin();
  while (a != intervals_.end() && b != other.intervals_.end()) {
    if (std::max(a->lo, b->lo) <= std::min(a->hi, b->hi)) return true;
    if (a->hi < b->hi) {
      ++a;
    } else {
      ++b;
    }
  }
  return false;
}

std::vector<Cidr> AddressSet::to_cidrs() const {
  std::vector<Cidr> out;
  for (const Interval& iv : intervals_) {
    auto blocks = range_to_cidrs(iv.lo, iv.hi);
    out.insert(out.end(), blocks.begin(), blocks.end());
  }
  return out;
}

std::optional<Cidr> AddressSet::as_single_cidr() const {
  if (intervals_.size() != 1) return std::nullopt;
  auto blocks = range_to_cidrs(intervals_[0].lo, intervals_[0].hi);
  if (blocks.size() != 1) return std::nullopt;
  return blocks[0];
}

std::vector<Cidr> range_to_cidrs(uint32_t first, uint32_t last) {
  std::vector<Cidr> out;
  uint64_t cursor = first;
  uint64_t end = last;
  while (cursor <= end) {
    // Largest block that starts at cursor without crossing alignment,
    // shrunk until it fits inside [cursor, end].
    int max_align =
        cursor == 0 ? 32 : std::countr_zero(static_cast<uint32_t>(cursor));
    uint64_t span = end - cursor + 1;
    int size_bits = std::min<int>(max_align, 63 - std::countl_zero(span));
    out.push_back({static_cast<uint32_t>(cursor), 32 - size_bits});
    cursor += uint64_t{1} << size_bits;
  }
  return out;
}

}  // namespace fwcomp
