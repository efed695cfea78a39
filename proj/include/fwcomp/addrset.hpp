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

#ifndef FWCOMP_ADDRSET_HPP_
#define FWCOMP_ADDRSET_HPP_

#include <cstdint>
#include <vector>

#include "fwcomp/ipv4.hpp"

namespace fwcomp {

// Inclusive interval of 32-bit addresses.
struct Interval {
  uint32_t lo = 0;
  uint32_t hi = 0;
  bool operator==(const Interval&) const = default;
};

// Canonical set of IPv4 addresses: sorted, disjoint, non-adjacent
// inclusive intervals. The canonical form is unique per set, so
// operator== is set equality.
class AddressSet {
 public:
  AddressSet() = default;

  static AddressSet empty_set() { return AddressSet(); }
  static AddressSet universe() {
    return from_intervals({{0u, 0xffffffffu}});
  }
  static AddressSet single(uint32_t addr) {
    return from_intervals({{addr, addr}});
  }
  static AddressSet range(uint32_t lo, uint32_t hi) {
    return from_intervals({{lo, hi}});
  }
  static AddressSet cidr(const Cidr& c) {
    return from_intervals({{c.first(), c.last()}});
  }
  // Normalizes an arbitrary interval list (unsorted, overlapping ok).
  static AddressSet from_intervals(std::vector<Interval> intervals);

  bool empty() const { return intervals_.empty(); }
  bool is_universe() const {
    return intervals_.size() == 1 && intervals_[0].lo == 0 &&
           intervals_[0].hi == 0xffffffffu;
  }
  uint64_t size() const;
  bool contains(uint32_t addr) const;

  AddressSet unite(const AddressSet& other) const;
  AddressSet intersect(const AddressSet& other) const;
  AddressSet subtract(const AddressSet& other) const;
  AddressSet complement() const;
  bool subset_of(const AddressSet& other) const;
  bool intersects(const AddressSet& other) const;

  const std::vector<Interval>& intervals() const { return intervals_; }

  // Minimal CIDR decomposition, ascending.
  std::vector<Cidr> to_cidrs() const;

  // If the whole set is exactly one CIDR block, returns it.
  std::optional<Cidr> as_single_cidr() const;

  bool operator==(const AddressSet&) const = default;

 private:
  std::vector<Interval> intervals_;
};

// Minimal-count list of CIDR blocks whose disjoint union is [first, last],
// in ascending order.
std::vector<Cidr> range_to_cidrs(uint32_t first, uint32_t last);

}  // namespace fwcomp

#endif  // FWCOMP_ADDRSET_HPP_
