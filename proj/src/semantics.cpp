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

#include "fwcomp/semantics.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <sstream>

namespace fwcomp {

const char* verdict_action_name(VerdictAction a) {
  switch (a) {
    case VerdictAction::Accept:
      return "Accept";
    case VerdictAction::Drop:
      return "Deny";
    case VerdictAction::Reject:
      return "Reject";
    case VerdictAction::DefaultDrop:
      return "DefaultDrop";
  }
  return "?";
}

namespace {

uint32_t single_address(const std::string& ref, const ObjectDatabase& db) {
  AddressSet set = address_set_of(db.resolve(ref), db);
  if (set.size() != 1) {
    throw SchemaError("NAT translation must be a single address");
  }
  return set.intervals()[0].lo;
}

struct PortRewrite {
  std::optional<uint16_t> sport, dport;
};

// A singleton range rewrites the port; a full range preserves it.
PortRewrite service_rewrite(const FwObject& svc) {
  uint16_t src_lo, src_hi, dst_lo, dst_hi;
  if (const auto* tcp = dynamic_cast<const TcpServiceObj*>(&svc)) {
    src_lo = tcp->src_lo;
    src_hi = tcp->src_hi;
    dst_lo = tcp->dst_lo;
    dst_hi = tcp->dst_hi;
  } else if (const auto* udp = dynamic_cast<const UdpServiceObj*>(&svc)) {
    src_lo = udp->src_lo;
    src_hi = udp->src_hi;
    dst_lo = udp->dst_lo;
    dst_hi = udp->dst_hi;
  } else {
    throw SchemaError("NAT service translation must be TCP or UDP");
  }
  PortRewrite out;
  if (src_lo == src_hi) out.sport = src_lo;
  if (dst_lo == dst_hi) out.dport = dst_lo;
  return out;
}

}  // namespace

Evaluator::TimeMatcher Evaluator::TimeMatcher::make(TimeSet effective) {
  TimeMatcher m;
  m.universal = effective.is_universe();
  m.phase_ok = effective.phase_only_bits();
  m.set = std::move(effective);
  return m;
}

bool Evaluator::TimeMatcher::matches(
    const std::optional<PacketTime>& time) const {
  if (!time) return universal;
  if (time->abs_minutes) return set.contains(*time->abs_minutes);
  return phase_ok[time->phase()];
}

bool Evaluator::AddrMatcher::matches(uint32_t ip,
                                     std::optional<uint64_t> mac) const {
  bool hit = ips.contains(ip);
  if (!hit && mac && !macs.empty()) {
    hit = std::binary_search(macs.begin(), macs.end(), *mac);
  }
  return negated ? !hit : hit;
}

bool Evaluator::RuleMatcher::matches(const Packet& packet) const {
  uint8_t dir_bit = packet.direction == Direction::Inbound ? 1 : 2;
  if ((dirs & dir_bit) == 0) return false;
  if (itf || itf_negated) {
    bool hit = !itf || std::binary_search(itf->begin(), itf->end(),
                                          packet.interface);
    if (itf_negated ? hit : !hit) return false;
  }
  if (!src.matches(packet.src_ip, packet.src_mac)) return false;
  if (!dst.matches(packet.dst_ip, std::nullopt)) return false;
  if (!srv.contains(packet.service())) return false;
  return when.matches(packet.time);
}

void Evaluator::compile_policy(const Policy& policy,
                               const ObjectDatabase& db) {
  for (const PolicyRule& rule : policy.rules) {
    if (rule.disabled) continue;
    RuleMatcher m;
    m.position = rule.position;
    m.action = rule.action;
    switch (rule.direction) {
      case Direction::Inbound:
        m.dirs = 1;
        break;
      case Direction::Outbound:
        m.dirs = 2;
        break;
      case Direction::Both:
        m.dirs = 3;
        break;
    }
    m.itf = element_interfaces(rule.itf, db);
    m.itf_negated = rule.itf.negated;

    ElementLayers src = element_layers(rule.src, db);
    m.src = {src.ips, src.macs, rule.src.negated};
    ElementLayers dst = element_layers(rule.dst, db);
    // Packets carry no destination MAC; that layer never matches.
    m.dst = {dst.ips, {}, rule.dst.negated};

    ServiceSet srv = element_services(rule.srv, db);
    m.srv = rule.srv.negated ? srv.complement() : srv;
    TimeSet when = element_interval(rule.when, db);
    m.when = TimeMatcher::make(rule.when.negated ? when.complement() : when);
    rules_.push_back(std::move(m));
  }
}

void Evaluator::compile_nat(const FirewallObj& firewall,
                            const ObjectDatabase& db) {
  for (const NatRule& rule : firewall.nat) {
    NatMatcher m;
    ElementLayers osrc = element_layers(rule.osrc, db);
    m.osrc = {osrc.ips, osrc.macs, rule.osrc.negated};
    ElementLayers odst = element_layers(rule.odst, db);
    m.odst = {odst.ips, {}, rule.odst.negated};
    ServiceSet osrv = element_services(rule.osrv, db);
    m.osrv = rule.osrv.negated ? osrv.complement() : osrv;
    TimeSet when = element_interval(rule.when, db);
    m.when = TimeMatcher::make(rule.when.negated ? when.complement() : when);
    if (rule.tsrc) m.to_src = single_address(*rule.tsrc, db);
    if (rule.tdst) m.to_dst = single_address(*rule.tdst, db);
    if (rule.tsrv) {
      PortRewrite ports = service_rewrite(db.resolve(*rule.tsrv));
      m.to_sport = ports.sport;
      m.to_dport = ports.dport;
    }
    nat_.push_back(std::move(m));
  }
}

Evaluator::Evaluator(const FirewallObj& firewall, const ObjectDatabase& db) {
  compile_policy(firewall.policy, db);
  compile_nat(firewall, db);
}

Evaluator::Evaluator(const FirewallObj& firewall, const Policy& policy,
                     const ObjectDatabase& db) {
  compile_policy(policy, db);
  compile_nat(firewall, db);
}

Verdict Evaluator::evaluate(const Packet& packet) const {
  Verdict verdict;
  verdict.egress = packet;

  for (const NatMatcher& rule : nat_) {
    if (!rule.osrc.matches(packet.src_ip, packet.src_mac)) continue;
    if (!rule.odst.matches(packet.dst_ip, std::nullopt)) continue;
    if (!rule.osrv.contains(packet.service())) continue;
    if (!rule.when.matches(packet.time)) continue;
    if (rule.to_src) verdict.egress.src_ip = *rule.to_src;
    if (rule.to_dst) verdict.egress.dst_ip = *rule.to_dst;
    if (rule.to_sport) verdict.egress.src_port = *rule.to_sport;
    if (rule.to_dport) verdict.egress.dst_port = *rule.to_dport;
    break;  // first match wins, one rewrite at most
  }

  for (const RuleMatcher& rule : rules_) {
    if (!rule.matches(verdict.egress)) continue;
    if (rule.action == RuleAction::Accounting) {
      verdict.counters_hit.push_back(rule.position);
      continue;
    }
    verdict.matched_rule = rule.position;
    switch (rule.action) {
      case RuleAction::Accept:
        verdict.action = VerdictAction::Accept;
        break;
      case RuleAction::Deny:
        verdict.action = VerdictAction::Drop;
        break;
      case RuleAction::Reject:
        verdict.action = VerdictAction::Reject;
        break;
      case RuleAction::Accounting:
        break;
    }
    return verdict;
  }
  verdict.action = VerdictAction::DefaultDrop;
  return verdict;
}

Packet apply_nat(std::span<const NatRule> rules, const Packet& packet,
                 const ObjectDatabase& db) {
  FirewallObj scratch;
  scratch.nat.assign(rules.begin(), rules.end());
  Evaluator evaluator(scratch, Policy{}, db);
  return evaluator.evaluate(packet).egress;
}

bool match_rule(const PolicyRule& rule, const Packet& packet,
                const ObjectDatabase& db) {
  FirewallObj scratch;
  Policy policy;
  PolicyRule copy = rule;
  copy.action = RuleAction::Accept;
  policy.rules.push_back(std::move(copy));
  Evaluator evaluator(scratch, policy, db);
  return evaluator.evaluate(packet).action == VerdictAction::Accept;
}

Verdict evaluate_with_policy(const FirewallObj& firewall,
                             const Policy& policy, const Packet& packet,
                             const ObjectDatabase& db) {
  return Evaluator(firewall, policy, db).evaluate(packet);
}

Verdict evaluate(const FirewallObj& firewall, const Packet& packet,
                 const ObjectDatabase& db) {
  return Evaluator(firewall, db).evaluate(packet);
}

Packet parse_packet_literal(const std::string& text) {
  Packet packet;
  bool have_proto = false, have_src = false, have_dst = false,
       have_iface = false, have_dir = false;
  std::optional<int> day;
  std::optional<int> minute;
  std::optional<int64_t> date_minutes;

  std::istringstream in(text);
  std::string token;
  while (in >> token) {
    auto eq = token.find('=');
    if (eq == std::string::npos) {
      throw ParseError(1, "packet literal token '" + token +
                              "' is not key=value");
    }
    std::string key = token.substr(0, eq);
    std::string value = token.substr(eq + 1);
    auto int_value = [&](long lo, long hi) {
      char* end = nullptr;
      long v = std::strtol(value.c_str(), &end, 10);
      if (end != value.c_str() + value.size() || v < lo || v > hi) {
        throw ParseError(1, "bad value for " + key + ": " + value);
      }
      return v;
    };
    if (key == "proto") {
      have_proto = true;
      if (value == "tcp") {
        packet.proto = Proto::Tcp;
      } else if (value == "udp") {
        packet.proto = Proto::Udp;
      } else if (value == "icmp") {
        packet.proto = Proto::Icmp;
      } else {
        packet.proto = Proto::Other;
        packet.proto_number = uint8_t(int_value(0, 255));
      }
    } else if (key == "src" || key == "dst") {
      auto addr = parse_ipv4(value);
      if (!addr) throw ParseError(1, "bad address: " + value);
      (key == "src" ? packet.src_ip : packet.dst_ip) = *addr;
      (key == "src" ? have_src : have_dst) = true;
    } else if (key == "sport") {
      packet.src_port = uint16_t(int_value(0, 65535));
    } else if (key == "dport") {
      packet.dst_port = uint16_t(int_value(0, 65535));
    } else if (key == "icmptype") {
      packet.icmp_type = uint8_t(int_value(0, 255));
    } else if (key == "icmpcode") {
      packet.icmp_code = uint8_t(int_value(0, 255));
    } else if (key == "flags") {
      uint8_t bits = 0;
      for (char c : value) {
        if (c == ',') continue;
        switch (c) {
          case 'F': bits |= kTcpFin; break;
          case 'S': bits |= kTcpSyn; break;
          case 'R': bits |= kTcpRst; break;
          case 'P': bits |= kTcpPsh; break;
          case 'A': bits |= kTcpAck; break;
          case 'U': bits |= kTcpUrg; break;
          default:
            throw ParseError(1, "bad TCP flag letter: " + std::string(1, c));
        }
      }
      packet.tcp_flags = bits;
    } else if (key == "mac") {
      auto mac = parse_mac(value);
      if (!mac) throw ParseError(1, "bad MAC: " + value);
      packet.src_mac = *mac;
    } else if (key == "iface") {
      packet.interface = value;
      have_iface = true;
    } else if (key == "dir") {
      have_dir = true;
      if (value == "in") {
        packet.direction = Direction::Inbound;
      } else if (value == "out") {
        packet.direction = Direction::Outbound;
      } else {
        throw ParseError(1, "dir must be in or out");
      }
    } else if (key == "day") {
      auto days = parse_weekdays(value);
      if (!days || std::popcount(unsigned(*days)) != 1) {
        throw ParseError(1, "day must name one weekday");
      }
      day = std::countr_zero(unsigned(*days));
    } else if (key == "time") {
      auto m = parse_minute_of_day(value);
      if (!m) throw ParseError(1, "bad time: " + value);
      minute = *m;
    } else if (key == "date") {
      auto t = parse_datetime(value + "T00:00");
      if (!t) throw ParseError(1, "bad date: " + value);
      date_minutes = *t;
    } else {
      throw ParseError(1, "unknown packet field: " + key);
    }
  }

  if (!have_proto || !have_src || !have_dst || !have_iface || !have_dir) {
    throw ParseError(1,
                     "packet literal requires proto, src, dst, iface, dir");
  }
  if (day || minute || date_minutes) {
    PacketTime time;
    if (date_minutes) {
      int64_t abs = *date_minutes + (minute ? *minute : 0);
      time.abs_minutes = abs;
      time.weekday = weekday_of(abs);
      time.minute_of_day = int(abs % kMinutesPerDay);
      if (day && *day != time.weekday) {
        throw ParseError(1, "day does not match date");
      }
    } else {
      if (!day) throw ParseError(1, "time requires day= or date=");
      time.weekday = *day;
      time.minute_of_day = minute ? *minute : 0;
    }
    packet.time = time;
  }
  return packet;
}

}  // namespace fwcomp
