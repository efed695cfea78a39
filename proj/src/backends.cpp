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

#include <algorithm>

#include "fwcomp/backends.hpp"

namespace fwcomp {

Capabilities capabilities(Platform target) {
  Capabilities caps;
  switch (target) {
    case Platform::Iptables:
      caps.match_strategy = MatchStrategy::First;
      caps.default_policy = DefaultPolicyKind::Configurable;
      caps.nat_order = NatOrder::SplitDnatSnat;
      caps.supports_single_negation = true;
      caps.supports_group_negation = false;
      caps.supports_address_ranges = true;  // iprange module
      caps.supports_dynamic_iface_address = false;
      caps.supports_time = true;
      caps.supports_mac = true;
      caps.supports_address_lists = false;
      return caps;
    case Platform::Pf:
      caps.match_strategy = MatchStrategy::LastWithQuick;
      caps.default_policy = DefaultPolicyKind::Pass;
      caps.nat_order = NatOrder::NatFirst;
      caps.supports_single_negation = true;
      caps.supports_group_negation = true;  // tables
      caps.supports_address_ranges = false;
      caps.supports_dynamic_iface_address = true;  // (ifname)
      caps.supports_time = false;
      caps.supports_mac = false;
      caps.supports_address_lists = false;
      return caps;
    case Platform::Ipfilter:
      caps.match_strategy = MatchStrategy::LastWithQuick;
      caps.default_policy = DefaultPolicyKind::Pass;
      caps.nat_order = NatOrder::NatFirst;
      caps.supports_single_negation = true;
      caps.supports_group_negation = false;
      caps.supports_address_ranges = false;
      caps.supports_dynamic_iface_address = true;  // 0/32
      caps.supports_time = false;
      caps.supports_mac = false;
      caps.supports_address_lists = false;
      return caps;
  }
  throw UnknownTargetError("unrecognized platform");
}

std::string Script::text() const {
  std::string out;
  for (const std::string& line : lines) {
    out += line;
    out += '\n';
  }
  return out;
}

namespace {

std::string addr_text(const Cidr& c) {
  return c.prefix == 32 ? format_ipv4(c.addr) : format_cidr(c);
}

// "SYN,ACK" style names for --tcp-flags; "NONE" when the set is empty.
std::string iptables_flag_names(uint8_t bits) {
  static const char* const kNames[6] = {"FIN", "SYN", "RST",
                                        "PSH", "ACK", "URG"};
  std::string out;
  for (int i = 0; i < 6; ++i) {
    if (bits & (1 << i)) {
      if (!out.empty()) out += ',';
      out += kNames[i];
    }
  }
  return out.empty() ? "NONE" : out;
}

std::string proto_token(const SvcAtom& srv) {
  switch (srv.kind) {
    case SvcAtom::Kind::Tcp:
      return "tcp";
    case SvcAtom::Kind::Udp:
      return "udp";
    case SvcAtom::Kind::Icmp:
      return "icmp";
    case SvcAtom::Kind::Proto:
      return std::to_string(srv.proto_number);
    case SvcAtom::Kind::Any:
      return "";
  }
  return "";
}

bool full_range(uint16_t lo, uint16_t hi) { return lo == 0 && hi == 65535; }

// --- iptables ------------------------------------------------------------

std::string iptables_port(uint16_t lo, uint16_t hi) {
  if (lo == hi) return std::to_string(lo);
  return std::to_string(lo) + ":" + std::to_string(hi);
}

std::string iptables_time(const TimeAtom& when) {
  std::string out = " -m time";
  if (when.daily_start != 0 || when.daily_end != kMinutesPerDay - 1) {
    out += " --timestart " + format_minute_of_day(when.daily_start);
    out += " --timestop " + format_minute_of_day(when.daily_end);
  }
  if (when.weekdays != kAllWeekdays) {
    out += " --weekdays " + format_weekdays(when.weekdays);
  }
  if (when.abs_start) {
    out += " --datestart " + format_datetime(*when.abs_start);
  }
  if (when.abs_end) out += " --datestop " + format_datetime(*when.abs_end);
  return out;
}

void iptables_addr(std::string* line, const AddrAtom& atom, bool is_src) {
  const char* flag = is_src ? " -s " : " -d ";
  const char* range_flag =
      is_src ? " -m iprange --src-range " : " -m iprange --dst-range ";
  switch (atom.kind) {
    case AddrAtom::Kind::Any:
      return;
    case AddrAtom::Kind::Cidr:
      *line += flag;
      if (atom.negated) *line += "! ";
      *line += addr_text(atom.cidr);
      return;
    case AddrAtom::Kind::Range:
      *line += range_flag + format_ipv4(atom.range_lo) + "-" +
               format_ipv4(atom.range_hi);
      return;
    case AddrAtom::Kind::DynamicIface:
    case AddrAtom::Kind::NegatedTable:
      throw InvariantViolationError(
          "operand not lowered for iptables emission");
  }
}

std::string iptables_matches(const FlatRule& rule) {
  std::string line;
  if (rule.kind == FlatRule::Kind::Filter) {
    const char* dir_flag = rule.dir == Direction::Inbound ? " -i " : " -o ";
    line += dir_flag;
    line += rule.iface.empty() ? "+" : rule.iface;
  }
  if (std::string proto = proto_token(rule.srv); !proto.empty()) {
    line += " -p " + proto;
  }
  iptables_addr(&line, rule.src, true);
  iptables_addr(&line, rule.dst, false);
  if (rule.srv.kind == SvcAtom::Kind::Tcp ||
      rule.srv.kind == SvcAtom::Kind::Udp) {
    if (!full_range(rule.srv.sport_lo, rule.srv.sport_hi)) {
      line += " --sport " + iptables_port(rule.srv.sport_lo,
                                          rule.srv.sport_hi);
    }
    if (!full_range(rule.srv.dport_lo, rule.srv.dport_hi)) {
      line += " --dport " + iptables_port(rule.srv.dport_lo,
                                          rule.srv.dport_hi);
    }
  }
  if (rule.srv.kind == SvcAtom::Kind::Icmp && rule.srv.icmp_type) {
    line += " --icmp-type " + std::to_string(*rule.srv.icmp_type);
    if (rule.srv.icmp_code) {
      line += "/" + std::to_string(*rule.srv.icmp_code);
    }
  }
  if (rule.srv.kind == SvcAtom::Kind::Tcp && rule.srv.flags_mask != 0) {
    line += " --tcp-flags " + iptables_flag_names(rule.srv.flags_mask) +
            " " +
            iptables_flag_names(
                uint8_t(rule.srv.flags_set & rule.srv.flags_mask));
  }
  if (rule.src_mac) {
    line += " -m mac --mac-source " + format_mac(*rule.src_mac);
  }
  if (!rule.when.unconstrained()) line += iptables_time(rule.when);
  return line;
}

Script emit_iptables(const std::vector<FlatRule>& filter_ir,
                     const std::vector<FlatRule>& nat_ir) {
  Script script;
  script.target = Platform::Iptables;
  script.lines = {"iptables -P INPUT DROP", "iptables -P FORWARD DROP",
                  "iptables -P OUTPUT DROP"};

  for (const FlatRule& rule : nat_ir) {
    if (rule.kind != FlatRule::Kind::Dnat) continue;
    std::string line = "iptables -t nat -A PREROUTING";
    line += iptables_matches(rule);
    line += " -j DNAT --to-destination " + format_ipv4(*rule.to_dst);
    if (rule.to_dport) line += ":" + std::to_string(*rule.to_dport);
    script.lines.push_back(std::move(line));
  }

  for (const FlatRule& rule : filter_ir) {
    std::string line = "iptables -A FORWARD";
    line += iptables_matches(rule);
    switch (rule.action) {
      case RuleAction::Accept:
        line += " -j ACCEPT";
        break;
      case RuleAction::Deny:
        line += " -j DROP";
        break;
      case RuleAction::Reject:
        line += " -j REJECT";
        break;
      case RuleAction::Accounting:
        break;  // counter-only rule: no jump
    }
    script.lines.push_back(std::move(line));
  }

  for (const FlatRule& rule : nat_ir) {
    if (rule.kind != FlatRule::Kind::Snat) continue;
    std::string line = "iptables -t nat -A POSTROUTING";
    line += iptables_matches(rule);
    line += " -j SNAT --to-source " + format_ipv4(*rule.to_src);
    script.lines.push_back(std::move(line));
  }
  return script;
}

// --- pf / ipfilter ---------------------------------------------------------

std::string pf_port(uint16_t lo, uint16_t hi) {
  if (lo == hi) return " port " + std::to_string(lo);
  return " port " + std::to_string(lo) + ":" + std::to_string(hi);
}

// ipfilter port operators are exclusive.
std::string ipf_port(uint16_t lo, uint16_t hi) {
  if (lo == hi) return " port = " + std::to_string(lo);
  if (lo == 0) return " port < " + std::to_string(hi + 1);
  if (hi == 65535) return " port > " + std::to_string(lo - 1);
  return " port " + std::to_string(lo - 1) + " >< " + std::to_string(hi + 1);
}

std::string flags_suffix(const SvcAtom& srv) {
  if (srv.kind != SvcAtom::Kind::Tcp || srv.flags_mask == 0) return "";
  return " flags " + flag_letters(uint8_t(srv.flags_set & srv.flags_mask)) +
         "/" + flag_letters(srv.flags_mask);
}

class TableNames {
 public:
  std::string name_for(const std::vector<Cidr>& blocks, Script* script) {
    for (const auto& [name, existing] : script->tables) {
      if (existing == blocks) return name;
    }
    std::string name = "neg" + std::to_string(script->tables.size());
    script->tables.push_back({name, blocks});
    return name;
  }
};

std::string pf_addr(const AddrAtom& atom, TableNames& tables,
                    Script* script) {
  switch (atom.kind) {
    case AddrAtom::Kind::Any:
      return "any";
    case AddrAtom::Kind::Cidr: {
      std::string text = addr_text(atom.cidr);
      return atom.negated ? "! " + text : text;
    }
    case AddrAtom::Kind::DynamicIface:
      return "(" + atom.ifname + ")";
    case AddrAtom::Kind::NegatedTable:
      return "! <" + tables.name_for(atom.table, script) + ">";
    case AddrAtom::Kind::Range:
      throw InvariantViolationError("address range not lowered for pf");
  }
  return "any";
}

std::string ipf_addr(const AddrAtom& atom, const FlatRule& rule) {
  switch (atom.kind) {
    case AddrAtom::Kind::Any:
      return "any";
    case AddrAtom::Kind::Cidr: {
      std::string text = addr_text(atom.cidr);
      return atom.negated ? "! " + text : text;
    }
    case AddrAtom::Kind::DynamicIface:
      if (rule.iface != atom.ifname) {
        throw InvariantViolationError(
            "0/32 operand without its interface binding");
      }
      return "0/32";
    case AddrAtom::Kind::NegatedTable:
    case AddrAtom::Kind::Range:
      throw InvariantViolationError("operand not lowered for ipfilter");
  }
  return "any";
}

std::string pf_body(const FlatRule& rule, TableNames& tables, Script* script,
                    bool is_pf) {
  std::string line;
  if (!rule.iface.empty()) line += " on " + rule.iface;
  if (std::string proto = proto_token(rule.srv); !proto.empty()) {
    line += " proto " + proto;
  }
  std::string src = is_pf ? pf_addr(rule.src, tables, script)
                          : ipf_addr(rule.src, rule);
  std::string dst = is_pf ? pf_addr(rule.dst, tables, script)
                          : ipf_addr(rule.dst, rule);
  line += " from " + src;
  if ((rule.srv.kind == SvcAtom::Kind::Tcp ||
       rule.srv.kind == SvcAtom::Kind::Udp) &&
      !full_range(rule.srv.sport_lo, rule.srv.sport_hi)) {
    line += is_pf ? pf_port(rule.srv.sport_lo, rule.srv.sport_hi)
                  : ipf_port(rule.srv.sport_lo, rule.srv.sport_hi);
  }
  line += " to " + dst;
  if ((rule.srv.kind == SvcAtom::Kind::Tcp ||
       rule.srv.kind == SvcAtom::Kind::Udp) &&
      !full_range(rule.srv.dport_lo, rule.srv.dport_hi)) {
    line += is_pf ? pf_port(rule.srv.dport_lo, rule.srv.dport_hi)
                  : ipf_port(rule.srv.dport_lo, rule.srv.dport_hi);
  }
  if (rule.srv.kind == SvcAtom::Kind::Icmp && rule.srv.icmp_type) {
    line += " icmp-type " + std::to_string(*rule.srv.icmp_type);
    if (rule.srv.icmp_code) {
      line += " code " + std::to_string(*rule.srv.icmp_code);
    }
  }
  line += flags_suffix(rule.srv);
  return line;
}

Script emit_pf_like(Platform target, const std::vector<FlatRule>& filter_ir,
                    const std::vector<FlatRule>& nat_ir) {
  const bool is_pf = target == Platform::Pf;
  Script script;
  script.target = target;
  TableNames tables;

  std::vector<std::string> body;

  // Translation first, in abstract rule order.
  for (const FlatRule& rule : nat_ir) {
    std::string line;
    if (rule.kind == FlatRule::Kind::Snat) {
      line = is_pf ? "nat" : "map " + rule.iface;
    } else {
      line = is_pf ? "rdr" : "rdr " + rule.iface;
    }
    line += pf_body(rule, tables, &script, is_pf);
    line += " -> ";
    if (rule.kind == FlatRule::Kind::Snat) {
      line += format_ipv4(*rule.to_src);
    } else {
      line += format_ipv4(*rule.to_dst);
      if (rule.to_dport) line += " port " + std::to_string(*rule.to_dport);
    }
    body.push_back(std::move(line));
  }

  for (const FlatRule& rule : filter_ir) {
    std::string dir = rule.dir == Direction::Inbound ? "in" : "out";
    std::string line;
    switch (rule.action) {
      case RuleAction::Accept:
        line = "pass " + dir + " quick";
        break;
      case RuleAction::Deny:
        line = "block " + dir + " quick";
        break;
      case RuleAction::Reject:
        line = (is_pf ? "block return " : "block return-icmp ") + dir +
               " quick";
        break;
      case RuleAction::Accounting:
        line = (is_pf ? "match " : "count ") + dir;
        break;
    }
    line += pf_body(rule, tables, &script, is_pf);
    if (is_pf && rule.action == RuleAction::Accounting) {
      line += " label acct" + std::to_string(rule.origin);
    }
    body.push_back(std::move(line));
  }

  // The abstract default drop.
  if (is_pf) {
    body.push_back("block quick all");
  } else {
    body.push_back("block in quick all");
    body.push_back("block out quick all");
  }

  for (const auto& [name, blocks] : script.tables) {
    std::string line = "table <" + name + "> {";
    for (size_t i = 0; i < blocks.size(); ++i) {
      line += i == 0 ? " " : ", ";
      line += addr_text(blocks[i]);
    }
    line += " }";
    script.lines.push_back(std::move(line));
  }
  script.lines.insert(script.lines.end(), body.begin(), body.end());
  return script;
}

}  // namespace

Script emit(Platform target, const std::vector<FlatRule>& filter_ir,
            const std::vector<FlatRule>& nat_ir) {
  for (const FlatRule& rule : filter_ir) {
    if (rule.kind == FlatRule::Kind::Filter && rule.dir == Direction::Both) {
      throw InvariantViolationError("Both direction survived lowering");
    }
  }
  switch (target) {
    case Platform::Iptables:
      return emit_iptables(filter_ir, nat_ir);
    case Platform::Pf:
    case Platform::Ipfilter:
      return emit_pf_like(target, filter_ir, nat_ir);
  }
  throw UnknownTargetError("unrecognized platform");
}

}  // namespace fwcomp
