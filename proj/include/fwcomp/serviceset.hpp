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

#ifndef FWCOMP_SERVICESET_HPP_
#define FWCOMP_SERVICESET_HPP_

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "fwcomp/addrset.hpp"

namespace fwcomp {

enum class Proto : uint8_t { Tcp, Udp, Icmp, Other };

// TCP flag bit positions (header order).
enum TcpFlagBit : uint8_t {
  kTcpFin = 1 << 0,
  kTcpSyn = 1 << 1,
  kTcpRst = 1 << 2,
  kTcpPsh = 1 << 3,
  kTcpAck = 1 << 4,
  kTcpUrg = 1 << 5,
};

// All 64 possible 6-bit flag states as a characteristic mask.
inline constexpr uint64_t kAllFlagStates = ~uint64_t{0};

// Characteristic mask of { f : (f & mask) == set }.
uint64_t flag_states(uint8_t mask, uint8_t set);

// Inverse of flag_states when the state set is a cube; nullopt otherwise.
std::optional<std::pair<uint8_t, uint8_t>> flag_states_to_mask_set(
    uint64_t states);

// Flag-bit letters in F,S,R,P,A,U order, e.g. "SA".
std::string flag_letters(uint8_t bits);

// "S/SA" notation: SET/MASK with letters F,S,R,P,A,U.
std::string format_flags(uint8_t mask, uint8_t set);
std::optional<std::pair<uint8_t, uint8_t>> parse_flags(std::string_view text);

// A set of (a, b, state) points over two bounded integer axes and a small
// state universe of at most 64 states. Canonical representation: the
// coarsest slab decomposition along axis A, which is unique per set, so
// operator== is set equality.
class BoxSet {
 public:
  struct Box {
    uint32_t a_lo, a_hi, b_lo, b_hi;
    uint64_t states;
    bool operator==(const Box&) const = default;
  };

  BoxSet(uint32_t a_max, uint32_t b_max, uint64_t state_universe)
      : a_max_(a_max), b_max_(b_max), state_universe_(state_universe) {}

  static BoxSet from_boxes(uint32_t a_max, uint32_t b_max,
                           uint64_t state_universe, std::vector<Box> boxes);

  bool empty() const { return boxes_.empty(); }
  bool is_universe() const;
  uint64_t volume() const;
  bool contains(uint32_t a, uint32_t b, uint8_t state) const;

  BoxSet unite(const BoxSet& other) const;
  BoxSet intersect(const BoxSet& other) const;
  BoxSet subtract(const BoxSet& other) const;
  BoxSet complement() const;
  bool subset_of(const BoxSet& other) const {
    return subtract(other).empty();
  }
  bool intersects(const BoxSet& other) const {
    return !intersect(other).empty();
  }

  const std::vector<Box>& boxes() const { return boxes_; }
  uint32_t a_max() const { return a_max_; }
  uint32_t b_max() const { return b_max_; }
  uint64_t state_universe() const { return state_universe_; }

  bool operator==(const BoxSet&) const = default;

 private:
  BoxSet combine(const BoxSet& other, uint64_t (*merge)(uint64_t,
                                                        uint64_t)) const;

  uint32_t a_max_;
  uint32_t b_max_;
  uint64_t state_universe_;
  std::vector<Box> boxes_;
};

// One point of the service dimension of a packet.
struct ServicePoint {
  Proto proto = Proto::Tcp;
  uint8_t proto_number = 0;  // Other only
  uint16_t src_port = 0, dst_port = 0;
  uint8_t tcp_flags = 0;
  uint8_t icmp_type = 0, icmp_code = 0;
};

// Canonical set over the full service space: the disjoint union of the
// TCP space (sport x dport x flag state), the UDP space (sport x dport),
// the ICMP space (type x code) and the remaining IP protocol numbers.
class ServiceSet {
 public:
  ServiceSet();

  static ServiceSet empty_set() { return ServiceSet(); }
  static ServiceSet universe();
  static ServiceSet tcp(uint16_t src_lo, uint16_t src_hi, uint16_t dst_lo,
                        uint16_t dst_hi, uint8_t flags_mask = 0,
                        uint8_t flags_set = 0);
  static ServiceSet udp(uint16_t src_lo, uint16_t src_hi, uint16_t dst_lo,
                        uint16_t dst_hi);
  static ServiceSet icmp(std::optional<uint8_t> type,
                         std::optional<uint8_t> code);
  static ServiceSet ip_proto(uint8_t protocol);

  // Protocol numbers carried by the dedicated spaces; excluded from the
  // "other protocol" axis.
  static bool reserved_protocol(uint8_t p) {
    return p == 1 || p == 6 || p == 17;
  }

  bool empty() const;
  bool is_universe() const;
  bool contains(const ServicePoint& p) const;

  ServiceSet unite(const ServiceSet& other) const;
  ServiceSet intersect(const ServiceSet& other) const;
  ServiceSet subtract(const ServiceSet& other) const;
  ServiceSet complement() const;
  bool subset_of(const ServiceSet& other) const;
  bool intersects(const ServiceSet& other) const;

  const BoxSet& tcp_boxes() const { return tcp_; }
  const BoxSet& udp_boxes() const { return udp_; }
  const BoxSet& icmp_boxes() const { return icmp_; }
  const AddressSet& other_protocols() const { return other_; }

  bool operator==(const ServiceSet&) const = default;

 private:
  BoxSet tcp_;
  BoxSet udp_;
  BoxSet icmp_;
  AddressSet other_;  // intervals over [0,255] minus reserved protocols
};

}  // namespace fwcomp

#endif  // FWCOMP_SERVICESET_HPP_
