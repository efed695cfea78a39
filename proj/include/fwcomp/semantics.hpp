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

#ifndef FWCOMP_SEMANTICS_HPP_
#define FWCOMP_SEMANTICS_HPP_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fwcomp/model.hpp"

namespace fwcomp {

struct PacketTime {
  std::optional<int64_t> abs_minutes;  // absent: weekday+minute only
  int weekday = 0;                     // 0 = Monday
  int minute_of_day = 0;

  int phase() const { return weekday * kMinutesPerDay + minute_of_day; }
  bool operator==(const PacketTime&) const = default;
};

struct Packet {
  uint32_t src_ip = 0;
  uint32_t dst_ip = 0;
  std::optional<uint64_t> src_mac;
  Proto proto = Proto::Tcp;
  uint8_t proto_number = 0;  // Other only
  uint16_t src_port = 0, dst_port = 0;
  uint8_t tcp_flags = 0;
  uint8_t icmp_type = 0, icmp_code = 0;
  std::string interface;
  Direction direction = Direction::Inbound;
  std::optional<PacketTime> time;

  ServicePoint service() const {
    return {proto,     proto_number, src_port, dst_port,
            tcp_flags, icmp_type,    icmp_code};
  }
  bool operator==(const Packet&) const = default;
};

enum class VerdictAction { Accept, Drop, Reject, DefaultDrop };

const char* verdict_action_name(VerdictAction a);

struct Verdict {
  VerdictAction action = VerdictAction::DefaultDrop;
  std::optional<int> matched_rule;  // absent iff DefaultDrop
  std::vector<int> counters_hit;    // accounting rule positions, in order
  Packet egress;                    // post-NAT header
};

// First matching NAT rule rewrites the packet; empty translation fields
// preserve the original value; at most one rewrite. Throws
// OpaqueSetError when a matched element cannot be evaluated.
Packet apply_nat(std::span<const NatRule> rules, const Packet& packet,
                 const ObjectDatabase& db);

// Whether one enabled rule matches a packet.
bool match_rule(const PolicyRule& rule, const Packet& packet,
                const ObjectDatabase& db);

// The full abstract processing model: NAT, then first-match filtering
// with accounting continuation and a default drop.
Verdict evaluate(const FirewallObj& firewall, const Packet& packet,
                 const ObjectDatabase& db);

// As above with the policy replaced; used by analysis.
Verdict evaluate_with_policy(const FirewallObj& firewall,
                             const Policy& policy, const Packet& packet,
                             const ObjectDatabase& db);

// Resolves every rule element once so packet enumeration stays cheap.
// Element resolution errors (opaque sets, cycles) surface at
// construction.
class Evaluator {
 public:
  Evaluator(const FirewallObj& firewall, const ObjectDatabase& db);
  Evaluator(const FirewallObj& firewall, const Policy& policy,
            const ObjectDatabase& db);

  Verdict evaluate(const Packet& packet) const;

 private:
  struct AddrMatcher {
    AddressSet ips;
    std::vector<uint64_t> macs;
    bool negated = false;

    bool matches(uint32_t ip, std::optional<uint64_t> mac) const;
  };
  // Negation folded in; universality and per-phase membership cached.
  struct TimeMatcher {
    TimeSet set;
    bool universal = true;
    WeekBits phase_ok;

    static TimeMatcher make(TimeSet effective);
    bool matches(const std::optional<PacketTime>& time) const;
  };
  struct RuleMatcher {
    int position = 0;
    RuleAction action = RuleAction::Deny;
    uint8_t dirs = 0;
    std::optional<std::vector<std::string>> itf;  // sorted; nullopt = any
    bool itf_negated = false;
    AddrMatcher src, dst;
    ServiceSet srv;  // negation folded in
    TimeMatcher when;

    bool matches(const Packet& packet) const;
  };
  struct NatMatcher {
    AddrMatcher osrc, odst;
    ServiceSet osrv;
    TimeMatcher when;
    std::optional<uint32_t> to_src, to_dst;
    std::optional<uint16_t> to_sport, to_dport;
  };

  void compile_policy(const Policy& policy, const ObjectDatabase& db);
  void compile_nat(const FirewallObj& firewall, const ObjectDatabase& db);

  std::vector<RuleMatcher> rules_;
  std::vector<NatMatcher> nat_;
};

// Packet literal for the CLI simulate command, e.g.
//   proto=udp src=10.0.0.5 dst=10.86.81.7 sport=50 dport=91
//   iface=if0 dir=in [day=Mon time=13:30 date=2026-01-07] [mac=..]
//   [flags=S,A] [icmptype=8 icmpcode=0]
Packet parse_packet_literal(const std::string& text);

}  // namespace fwcomp

#endif  // FWCOMP_SEMANTICS_HPP_
