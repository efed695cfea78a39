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

#include "fwcomp/analysis.hpp"

#include <algorithm>

namespace fwcomp {

// --- ItfSet -------------------------------------------------------------

ItfSet::ItfSet(bool complemented, std::vector<std::string> names)
    : complemented_(complemented), names_(std::move(names)) {
  std::sort(names_.begin(), names_.end());
  names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
}

bool ItfSet::matches(const std::string& name) const {
  bool in_set = std::binary_search(names_.begin(), names_.end(), name);
  return complemented_ ? !in_set : in_set;
}

bool ItfSet::subset_of(const ItfSet& other) const {
  if (!complemented_ && !other.complemented_) {
    return std::includes(other.names_.begin(), other.names_.end(),
                         names_.begin(), names_.end());
  }
  if (!complemented_ && other.complemented_) {
    for (const std::string& n : names_) {
      if (std::binary_search(other.names_.begin(), other.names_.end(), n)) {
        return false;
      }
    }
    return true;
  }
  if (complemented_ && !other.complemented_) {
    // the complement of a finite name set is infinite
    return false;
  }
  return std::includes(names_.begin(), names_.end(), other.names_.begin(),
                       other.names_.end());
}

// --- regions ------------------------------------------------------------

bool RuleRegion::empty() const {
  return src_ip.empty() || src_mac.empty() || dst_ip.empty() || srv.empty() ||
         itf.empty() || dirs == 0 || when.empty();
}

RuleRegion rule_region(const PolicyRule& rule, const ObjectDatabase& db) {
  RuleRegion region;

  // Source: IP and MAC are separate dimensions. Without negation a
  // mixed element matches on either layer, which is not a product.
  ElementLayers src = element_layers(rule.src, db);
  if (!rule.src.negated) {
    if (src.has_ip_refs && src.has_mac_refs) {
      throw SchemaError("non-product: source mixes IP and MAC layers");
    }
    if (src.has_mac_refs) {
      region.src_ip = AddressSet::universe();
      region.src_mac = MacSet::of(src.macs);
    } else {
      region.src_ip = src.ips;
      region.src_mac = MacSet::universe();
    }
  } else {
    // The complement of a union is a product of complements.
    region.src_ip = src.ips.complement();
    region.src_mac = src.has_mac_refs ? MacSet::of(src.macs).complement()
                                      : MacSet::universe();
  }

  // Destination: packets carry no destination MAC, so MAC refs match
  // nothing on their layer.
  ElementLayers dst = element_layers(rule.dst, db);
  region.dst_ip = rule.dst.negated ? dst.ips.complement() : dst.ips;

  ServiceSet srv = element_services(rule.srv, db);
  region.srv = rule.srv.negated ? srv.complement() : srv;

  auto names = element_interfaces(rule.itf, db);
  ItfSet itf = names ? ItfSet::of(*names) : ItfSet::universe();
  region.itf = rule.itf.negated ? itf.complement() : itf;

  switch (rule.direction) {
    case Direction::Inbound:
      region.dirs = kDirInbound;
      break;
    case Direction::Outbound:
      region.dirs = kDirOutbound;
      break;
    case Direction::Both:
      region.dirs = kDirInbound | kDirOutbound;
      break;
  }

  TimeSet when = element_interval(rule.when, db);
  region.when = rule.when.negated ? when.complement() : when;
  return region;
}

bool region_subset(const RuleRegion& a, const RuleRegion& b) {
  if (a.empty()) return true;
  return a.src_ip.subset_of(b.src_ip) && a.src_mac.subset_of(b.src_mac) &&
         a.dst_ip.subset_of(b.dst_ip) && a.srv.subset_of(b.srv) &&
         a.itf.subset_of(b.itf) && (a.dirs & ~b.dirs) == 0 &&
         a.when.subset_of(b.when);
}

// --- shadowing ----------------------------------------------------------

std::string AnomalyReport::render() const {
  return "warning: rule " + std::to_string(shadowing_position) +
         " shadows rule " + std::to_string(shadowed_position) + ": " +
         explanation;
}

namespace {

bool is_terminal(const PolicyRule& rule) {
  return rule.action != RuleAction::Accounting;
}

}  // namespace

std::vector<AnomalyReport> detect_shadowing(
    const Policy& policy, const ObjectDatabase& db,
    std::vector<std::string>* skipped) {
  std::vector<AnomalyReport> reports;

  struct Entry {
    const PolicyRule* rule;
    RuleRegion region;
  };
  std::vector<Entry> entries;
  for (const PolicyRule& rule : policy.rules) {
    if (rule.disabled || !is_terminal(rule)) continue;
    try {
      entries.push_back({&rule, rule_region(rule, db)});
    } catch (const Error& e) {
      if (skipped) {
        skipped->push_back("rule " + std::to_string(rule.position) +
                           " skipped: " + e.what());
      }
    }
  }

  for (size_t i = 0; i < entries.size(); ++i) {
    for (size_t j = i + 1; j < entries.size(); ++j) {
      if (region_subset(entries[j].region, entries[i].region)) {
        AnomalyReport report;
        report.shadowing_position = entries[i].rule->position;
        report.shadowed_position = entries[j].rule->position;
        report.explanation =
            "every packet matching rule " +
            std::to_string(entries[j].rule->position) +
            " is already decided by rule " +
            std::to_string(entries[i].rule->position);
        reports.push_back(std::move(report));
      }
    }
  }
  return reports;
}

// --- optimization -------------------------------------------------------

namespace {

// Element equality up to reference order.
bool same_element(const MatchElement& a, const MatchElement& b) {
  if (a.negated != b.negated) return false;
  std::vector<std::string> ra = a.refs, rb = b.refs;
  std::sort(ra.begin(), ra.end());
  std::sort(rb.begin(), rb.end());
  ra.erase(std::unique(ra.begin(), ra.end()), ra.end());
  rb.erase(std::unique(rb.begin(), rb.end()), rb.end());
  return ra == rb;
}

MatchElement union_elements(const MatchElement& a, const MatchElement& b) {
  MatchElement out = a;
  out.refs.insert(out.refs.end(), b.refs.begin(), b.refs.end());
  std::sort(out.refs.begin(), out.refs.end());
  out.refs.erase(std::unique(out.refs.begin(), out.refs.end()),
                 out.refs.end());
  return out;
}

// Merges two adjacent rules identical in all fields but one; the
// differing field must be non-negated on both sides (the union of two
// complements is not a reference list). Direction merges to Both.
std::optional<PolicyRule> try_merge(const PolicyRule& a,
                                    const PolicyRule& b) {
  if (a.disabled || b.disabled) return std::nullopt;
  if (a.action != b.action) return std::nullopt;

  bool same_dir = a.direction == b.direction;
  bool src = same_element(a.src, b.src);
  bool dst = same_element(a.dst, b.dst);
  bool srv = same_element(a.srv, b.srv);
  bool itf = same_element(a.itf, b.itf);
  bool when = same_element(a.when, b.when);

  int diffs = !same_dir + !src + !dst + !srv + !itf + !when;
  if (diffs != 1) return std::nullopt;

  PolicyRule merged = a;
  if (!same_dir) {
    merged.direction = Direction::Both;
    return merged;
  }
  auto merge_field = [&](const MatchElement& x, const MatchElement& y,
                         MatchElement* out) {
    if (x.negated || y.negated) return false;
    *out = union_elements(x, y);
    return true;
  };
  if (!src) {
    if (!merge_field(a.src, b.src, &merged.src)) return std::nullopt;
  } else if (!dst) {
    if (!merge_field(a.dst, b.dst, &merged.dst)) return std::nullopt;
  } else if (!srv) {
    if (!merge_field(a.srv, b.srv, &merged.srv)) return std::nullopt;
  } else if (!itf) {
    if (!merge_field(a.itf, b.itf, &merged.itf)) return std::nullopt;
  } else {
    if (!merge_field(a.when, b.when, &merged.when)) return std::nullopt;
  }
  return merged;
}

}  // namespace

Policy optimize(const Policy& policy, const ObjectDatabase& db) {
  Policy out = policy;

  for (bool changed = true; changed;) {
    changed = false;

    // Drop shadowed terminal rules. Chains are safe to remove at once:
    // shadowing is transitive, so every removed rule stays covered by a
    // surviving earlier rule.
    auto reports = detect_shadowing(out, db, nullptr);
    if (!reports.empty()) {
      std::set<int> doomed;
      for (const AnomalyReport& r : reports) {
        doomed.insert(r.shadowed_position);
      }
      std::erase_if(out.rules, [&](const PolicyRule& r) {
        return doomed.count(r.position) != 0;
      });
      changed = true;
    }

    for (size_t i = 0; i + 1 < out.rules.size(); ++i) {
      if (auto merged = try_merge(out.rules[i], out.rules[i + 1])) {
        out.rules[i] = *merged;
        out.rules.erase(out.rules.begin() + i + 1);
        changed = true;
        break;
      }
    }
  }

  for (size_t i = 0; i < out.rules.size(); ++i) {
    out.rules[i].position = int(i);
  }
  return out;
}

// --- equivalence --------------------------------------------------------

std::vector<uint32_t> Universe::window(const Cidr& cidr, uint32_t stride) {
  std::vector<uint32_t> out;
  uint64_t first = cidr.first(), last = cidr.last();
  for (uint64_t a = first; a <= last; a += stride) {
    out.push_back(uint32_t(a));
  }
  if (out.back() != uint32_t(last)) out.push_back(uint32_t(last));
  return out;
}

uint64_t Universe::size() const {
  uint64_t per_proto = 0;
  for (Proto p : protos) {
    switch (p) {
      case Proto::Tcp:
        per_proto += uint64_t{sports.size()} * dports.size() *
                     std::max<size_t>(1, tcp_flag_states.size());
        break;
      case Proto::Udp:
        per_proto += uint64_t{sports.size()} * dports.size();
        break;
      case Proto::Icmp:
        per_proto += icmp_types.size();
        break;
      case Proto::Other:
        per_proto += other_protos.size();
        break;
    }
  }
  return uint64_t{srcs.size()} * dsts.size() * per_proto * ifaces.size() *
         dirs.size() * times.size();
}

void Universe::enumerate(const std::function<void(const Packet&)>& fn) const {
  Packet packet;
  for (uint32_t src : srcs) {
    packet.src_ip = src;
    for (uint32_t dst : dsts) {
      packet.dst_ip = dst;
      for (const std::string& iface : ifaces) {
        packet.interface = iface;
        for (Direction dir : dirs) {
          packet.direction = dir;
          for (const auto& time : times) {
            packet.time = time;
            for (Proto proto : protos) {
              packet.proto = proto;
              packet.proto_number = 0;
              packet.src_port = 0;
              packet.dst_port = 0;
              packet.tcp_flags = 0;
              packet.icmp_type = 0;
              packet.icmp_code = 0;
              switch (proto) {
                case Proto::Tcp:
                  for (uint16_t sport : sports) {
                    for (uint16_t dport : dports) {
                      for (uint8_t flags : tcp_flag_states) {
                        packet.src_port = sport;
                        packet.dst_port = dport;
                        packet.tcp_flags = flags;
                        fn(packet);
                      }
                    }
                  }
                  break;
                case Proto::Udp:
                  packet.tcp_flags = 0;
                  for (uint16_t sport : sports) {
                    for (uint16_t dport : dports) {
                      packet.src_port = sport;
                      packet.dst_port = dport;
                      fn(packet);
                    }
                  }
                  break;
                case Proto::Icmp:
                  for (const auto& [type, code] : icmp_types) {
                    packet.icmp_type = type;
                    packet.icmp_code = code;
                    fn(packet);
                  }
                  break;
                case Proto::Other:
                  for (uint8_t number : other_protos) {
                    packet.proto_number = number;
                    fn(packet);
                  }
                  break;
              }
            }
          }
        }
      }
    }
  }
}

bool equivalent(const FirewallObj& firewall, const Policy& p1,
                const Policy& p2, const Universe& universe,
                const ObjectDatabase& db, uint64_t bound) {
  if (universe.size() > bound) {
    throw UniverseTooLargeError(universe.size(), bound);
  }
  Evaluator e1(firewall, p1, db);
  Evaluator e2(firewall, p2, db);
  bool equal = true;
  universe.enumerate([&](const Packet& packet) {
    if (!equal) return;
    Verdict v1 = e1.evaluate(packet);
    Verdict v2 = e2.evaluate(packet);
    // DefaultDrop and Drop are observably the same action.
    auto canon = [](VerdictAction a) {
      return a == VerdictAction::DefaultDrop ? VerdictAction::Drop : a;
    };
    if (canon(v1.action) != canon(v2.action)) {
      equal = false;
      return;
    }
    if (v1.action == VerdictAction::Accept && !(v1.egress == v2.egress)) {
      equal = false;
    }
  });
  return equal;
}

}  // namespace fwcomp
