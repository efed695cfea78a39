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

#include "fwcomp/transform.hpp"

#include <algorithm>
#include <unordered_set>

#include "fwcomp/backends.hpp"

namespace fwcomp {

bool AddrAtom::matches(uint32_t addr) const {
  switch (kind) {
    case Kind::Any:
      return true;
    case Kind::Cidr: {
      bool in = addr >= cidr.first() && addr <= cidr.last();
      return negated ? !in : in;
    }
    case Kind::Range:
      return addr >= range_lo && addr <= range_hi;
    case Kind::DynamicIface:
      return false;  // unresolvable without a binding
    case Kind::NegatedTable:
      for (const Cidr& c : table) {
        if (addr >= c.first() && addr <= c.last()) return false;
      }
      return true;
  }
  return false;
}

bool SvcAtom::matches(const ServicePoint& p) const {
  switch (kind) {
    case Kind::Any:
      return true;
    case Kind::Tcp:
      return p.proto == Proto::Tcp && p.src_port >= sport_lo &&
             p.src_port <= sport_hi && p.dst_port >= dport_lo &&
             p.dst_port <= dport_hi &&
             (p.tcp_flags & flags_mask) == (flags_set & flags_mask);
    case Kind::Udp:
      return p.proto == Proto::Udp && p.src_port >= sport_lo &&
             p.src_port <= sport_hi && p.dst_port >= dport_lo &&
             p.dst_port <= dport_hi;
    case Kind::Icmp:
      return p.proto == Proto::Icmp &&
             (!icmp_type || p.icmp_type == *icmp_type) &&
             (!icmp_code || p.icmp_code == *icmp_code);
    case Kind::Proto:
      return p.proto == Proto::Other && p.proto_number == proto_number;
  }
  return false;
}

namespace {

// --- address atomization ------------------------------------------------

void push_set_as_cidrs(const AddressSet& set, std::vector<AddrAtom>* out) {
  for (const Cidr& c : set.to_cidrs()) {
    out->push_back(AddrAtom::of_cidr(c));
  }
}

void atomize_address_object(const FwObject& obj, const Capabilities& caps,
                            const ObjectDatabase& db,
                            std::vector<AddrAtom>* atoms,
                            std::vector<uint64_t>* macs,
                            std::unordered_set<std::string>& in_progress) {
  switch (obj.kind()) {
    case ObjectKind::AnyAddress:
      atoms->push_back(AddrAtom::any());
      return;
    case ObjectKind::Network: {
      const auto& net = static_cast<const NetworkObj&>(obj);
      uint32_t base = net.address & net.netmask;
      auto prefix = mask_to_prefix(net.netmask);
      atoms->push_back(AddrAtom::of_cidr({base, prefix.value_or(32)}));
      return;
    }
    case ObjectKind::Ipv4:
      atoms->push_back(AddrAtom::of_cidr(
          {static_cast<const Ipv4Obj&>(obj).address, 32}));
      return;
    case ObjectKind::AddressRange: {
      const auto& range = static_cast<const AddressRangeObj&>(obj);
      if (caps.supports_address_ranges) {
        AddrAtom atom;
        atom.kind = AddrAtom::Kind::Range;
        atom.range_lo = range.first;
        atom.range_hi = range.last;
        atoms->push_back(atom);
      } else {
        for (const Cidr& c : range_to_cidrs(range.first, range.last)) {
          atoms->push_back(AddrAtom::of_cidr(c));
        }
      }
      return;
    }
    case ObjectKind::AddressTable:
      push_set_as_cidrs(address_set_of(obj, db), atoms);
      return;
    case ObjectKind::PhysAddress:
      if (macs == nullptr) {
        throw SchemaError("MAC address '" + obj.name +
                          "' is not usable in this element");
      }
      macs->push_back(static_cast<const PhysAddressObj&>(obj).mac);
      return;
    case ObjectKind::Interface: {
      const auto& iface = static_cast<const InterfaceObj&>(obj);
      if (iface.dynamic) {
        AddrAtom atom;
        atom.kind = AddrAtom::Kind::DynamicIface;
        atom.ifname = iface.name;
        atoms->push_back(atom);
        return;
      }
      push_set_as_cidrs(address_set_of(obj, db), atoms);
      return;
    }
    case ObjectKind::Host:
    case ObjectKind::Firewall:
      push_set_as_cidrs(address_set_of(obj, db), atoms);
      return;
    case ObjectKind::Group: {
      if (!in_progress.insert(obj.id).second) throw CyclicGroupError(obj.id);
      for (const std::string& ref :
           static_cast<const GroupObj&>(obj).member_refs) {
        atomize_address_object(db.resolve(ref), caps, db, atoms, macs,
                               in_progress);
      }
      in_progress.erase(obj.id);
      return;
    }
    default:
      throw SchemaError("object '" + obj.name +
                        "' is not usable as an address");
  }
}

// Positive path: per-object atoms preserving ranges and dynamic
// interfaces per capabilities.
void atomize_address_element(const MatchElement& element,
                             const Capabilities& caps,
                             const ObjectDatabase& db,
                             std::vector<AddrAtom>* atoms,
                             std::vector<uint64_t>* macs) {
  std::unordered_set<std::string> in_progress;
  for (const std::string& ref : element.refs) {
    atomize_address_object(db.resolve(ref), caps, db, atoms, macs,
                           in_progress);
  }
  if (macs) {
    std::sort(macs->begin(), macs->end());
    macs->erase(std::unique(macs->begin(), macs->end()), macs->end());
  }
}

// --- service atomization --------------------------------------------------

void atomize_service_object(const FwObject& obj, const ObjectDatabase& db,
                            std::vector<SvcAtom>* atoms,
                            std::unordered_set<std::string>& in_progress) {
  switch (obj.kind()) {
    case ObjectKind::AnyService:
      atoms->push_back(SvcAtom::any());
      return;
    case ObjectKind::TcpService: {
      const auto& svc = static_cast<const TcpServiceObj&>(obj);
      SvcAtom atom;
      atom.kind = SvcAtom::Kind::Tcp;
      atom.sport_lo = svc.src_lo;
      atom.sport_hi = svc.src_hi;
      atom.dport_lo = svc.dst_lo;
      atom.dport_hi = svc.dst_hi;
      atom.flags_mask = svc.flags_mask;
      atom.flags_set = svc.flags_set;
      atoms->push_back(atom);
      return;
    }
    case ObjectKind::UdpService: {
      const auto& svc = static_cast<const UdpServiceObj&>(obj);
      SvcAtom atom;
      atom.kind = SvcAtom::Kind::Udp;
      atom.sport_lo = svc.src_lo;
      atom.sport_hi = svc.src_hi;
      atom.dport_lo = svc.dst_lo;
      atom.dport_hi = svc.dst_hi;
      atoms->push_back(atom);
      return;
    }
    case ObjectKind::IcmpService: {
      const auto& svc = static_cast<const IcmpServiceObj&>(obj);
      SvcAtom atom;
      atom.kind = SvcAtom::Kind::Icmp;
      atom.icmp_type = svc.icmp_type;
      atom.icmp_code = svc.icmp_code;
      atoms->push_back(atom);
      return;
    }
    case ObjectKind::IpService: {
      const auto& svc = static_cast<const IpServiceObj&>(obj);
      SvcAtom atom;
      atom.kind = SvcAtom::Kind::Proto;
      atom.proto_number = svc.protocol;
      atoms->push_back(atom);
      return;
    }
    case ObjectKind::Group: {
      if (!in_progress.insert(obj.id).second) throw CyclicGroupError(obj.id);
      for (const std::string& ref :
           static_cast<const GroupObj&>(obj).member_refs) {
        atomize_service_object(db.resolve(ref), db, atoms, in_progress);
      }
      in_progress.erase(obj.id);
      return;
    }
    default:
      throw SchemaError("object '" + obj.name +
                        "' is not usable as a service");
  }
}

std::vector<SvcAtom> atomize_service_element(const MatchElement& element,
                                             const ObjectDatabase& db,
                                             std::vector<Diagnostic>* warnings,
                                             const std::string& where) {
  if (element.negated) {
    ServiceSet set = element_services(element, db);
    if (set.is_universe()) {
      if (warnings) {
        warnings->push_back({Severity::Warning, "empty-match", where,
                             "negated wildcard service matches nothing; "
                             "rule dropped"});
      }
      return {};
    }
    throw UnsupportedFeatureError(
        "srv-negation", "negated service elements cannot be compiled");
  }
  std::vector<SvcAtom> atoms;
  std::unordered_set<std::string> in_progress;
  for (const std::string& ref : element.refs) {
    atomize_service_object(db.resolve(ref), db, &atoms, in_progress);
  }
  return atoms;
}

// --- time atoms -----------------------------------------------------------

void atomize_interval_object(const FwObject& obj, const ObjectDatabase& db,
                             std::vector<TimeAtom>* atoms,
                             std::unordered_set<std::string>& in_progress) {
  switch (obj.kind()) {
    case ObjectKind::AnyInterval:
      atoms->push_back(TimeAtom{});
      return;
    case ObjectKind::TimeInterval:
      atoms->push_back(static_cast<const TimeIntervalObj&>(obj).atom());
      return;
    case ObjectKind::Group: {
      if (!in_progress.insert(obj.id).second) throw CyclicGroupError(obj.id);
      for (const std::string& ref :
           static_cast<const GroupObj&>(obj).member_refs) {
        atomize_interval_object(db.resolve(ref), db, atoms, in_progress);
      }
      in_progress.erase(obj.id);
      return;
    }
    default:
      throw SchemaError("object '" + obj.name +
                        "' is not usable as a time interval");
  }
}

std::vector<TimeAtom> atomize_when_element(const MatchElement& element,
                                           const ObjectDatabase& db,
                                           std::vector<Diagnostic>* warnings,
                                           const std::string& where) {
  if (element.negated) {
    TimeSet complement = element_interval(element, db).complement();
    if (complement.empty()) {
      if (warnings) {
        warnings->push_back({Severity::Warning, "empty-match", where,
                             "negated wildcard interval matches nothing; "
                             "rule dropped"});
      }
      return {};
    }
    return complement.to_atoms();
  }
  std::vector<TimeAtom> atoms;
  std::unordered_set<std::string> in_progress;
  for (const std::string& ref : element.refs) {
    atomize_interval_object(db.resolve(ref), db, &atoms, in_progress);
  }
  // A wildcard absorbs the others.
  for (const TimeAtom& a : atoms) {
    if (a.unconstrained()) return {TimeAtom{}};
  }
  return atoms;
}

// --- interface atoms --------------------------------------------------------

// Returns interface names the rule binds to; {""} means any interface.
std::vector<std::string> atomize_itf_element(const MatchElement& element,
                                             const ObjectDatabase& db,
                                             const FirewallObj* firewall,
                                             std::vector<Diagnostic>* warnings,
                                             const std::string& where) {
  auto names = element_interfaces(element, db);
  if (!element.negated) {
    if (!names) return {""};
    return *names;
  }
  // Negated: complement over the firewall's interface inventory.
  if (!names) {
    if (warnings) {
      warnings->push_back({Severity::Warning, "empty-match", where,
                           "negated wildcard interface matches nothing; "
                           "rule dropped"});
    }
    return {};
  }
  if (firewall == nullptr) {
    throw SchemaError(
        "negated interface element needs a firewall context");
  }
  std::vector<std::string> out;
  for (const auto& iface : firewall->interfaces) {
    if (!std::binary_search(names->begin(), names->end(), iface->name)) {
      out.push_back(iface->name);
    }
  }
  if (out.empty() && warnings) {
    warnings->push_back({Severity::Warning, "empty-match", where,
                         "negated interface set covers every interface; "
                         "rule dropped"});
  }
  return out;
}

AddressSet element_ip_set(const MatchElement& element,
                          const ObjectDatabase& db) {
  ElementLayers layers = element_layers(element, db);
  return element.negated ? layers.ips.complement() : layers.ips;
}

}  // namespace

// --- expand_negation --------------------------------------------------------

std::vector<AddrAtom> expand_negation(const MatchElement& element,
                                      const Capabilities& caps,
                                      const ObjectDatabase& db,
                                      std::vector<Diagnostic>* warnings) {
  ElementLayers layers = element_layers(element, db);
  if (layers.has_mac_refs) {
    throw UnsupportedFeatureError(
        "mac-negation", "negated elements with MAC addresses cannot be "
                        "compiled");
  }

  // Native single negation: the whole element is one CIDR block.
  if (auto single = layers.ips.as_single_cidr();
      single && caps.supports_single_negation) {
    if (layers.ips.is_universe()) {
      if (warnings) {
        warnings->push_back({Severity::Warning, "empty-match", "",
                             "negated wildcard address matches nothing; "
                             "rule dropped"});
      }
      return {};
    }
    return {AddrAtom::of_cidr(*single, true)};
  }

  if (layers.ips.is_universe()) {
    if (warnings) {
      warnings->push_back({Severity::Warning, "empty-match", "",
                           "negated wildcard address matches nothing; "
                           "rule dropped"});
    }
    return {};
  }

  // Group negation via a table when the target has one.
  if (caps.supports_group_negation) {
    AddrAtom atom;
    atom.kind = AddrAtom::Kind::NegatedTable;
    atom.table = layers.ips.to_cidrs();
    return {atom};
  }

  // Positive complement rendered as CIDR blocks.
  std::vector<AddrAtom> atoms;
  push_set_as_cidrs(layers.ips.complement(), &atoms);
  return atoms;
}

// --- expand_rule_elements ----------------------------------------------------

std::vector<FlatRule> expand_rule_elements(const PolicyRule& rule,
                                           const Capabilities& caps,
                                           const ObjectDatabase& db,
                                           const FirewallObj* firewall,
                                           std::vector<Diagnostic>* warnings) {
  const std::string where = "rule " + std::to_string(rule.position);

  // Source: atoms on the IP layer plus optional per-MAC rules.
  std::vector<AddrAtom> src_atoms;
  std::vector<uint64_t> src_macs;
  if (rule.src.negated) {
    src_atoms = expand_negation(rule.src, caps, db, warnings);
  } else {
    atomize_address_element(rule.src, caps, db, &src_atoms, &src_macs);
  }

  std::vector<AddrAtom> dst_atoms;
  if (rule.dst.negated) {
    dst_atoms = expand_negation(rule.dst, caps, db, warnings);
  } else {
    // MAC refs in Dst match nothing (packets carry no destination MAC);
    // they contribute no atoms.
    std::vector<uint64_t> ignored;
    atomize_address_element(rule.dst, caps, db, &dst_atoms, &ignored);
    if (dst_atoms.empty() && !ignored.empty() && warnings) {
      warnings->push_back({Severity::Warning, "empty-match", where,
                           "destination holds only MAC addresses; rule "
                           "dropped"});
    }
  }

  std::vector<SvcAtom> srv_atoms =
      atomize_service_element(rule.srv, db, warnings, where);
  std::vector<std::string> ifaces =
      atomize_itf_element(rule.itf, db, firewall, warnings, where);
  std::vector<TimeAtom> when_atoms =
      atomize_when_element(rule.when, db, warnings, where);

  std::vector<Direction> dirs;
  if (rule.direction == Direction::Both) {
    dirs = {Direction::Inbound, Direction::Outbound};
  } else {
    dirs = {rule.direction};
  }

  std::vector<FlatRule> out;
  auto emit = [&](Direction dir, const AddrAtom& src,
                  std::optional<uint64_t> mac) {
    for (const AddrAtom& dst : dst_atoms) {
      for (const SvcAtom& srv : srv_atoms) {
        for (const std::string& iface : ifaces) {
          for (const TimeAtom& when : when_atoms) {
            FlatRule flat;
            flat.origin = rule.position;
            flat.kind = FlatRule::Kind::Filter;
            flat.action = rule.action;
            flat.dir = dir;
            flat.iface = iface;
            flat.src = src;
            flat.src_mac = mac;
            flat.dst = dst;
            flat.srv = srv;
            flat.when = when;
            out.push_back(std::move(flat));
          }
        }
      }
    }
  };

  for (Direction dir : dirs) {
    for (const AddrAtom& src : src_atoms) {
      emit(dir, src, std::nullopt);
    }
    for (uint64_t mac : src_macs) {
      emit(dir, AddrAtom::any(), mac);
    }
  }
  return out;
}

// --- NAT lowering ------------------------------------------------------------

namespace {

struct NatSets {
  AddressSet osrc, odst;
  ServiceSet osrv;
  TimeSet when;
  bool has_tsrc = false, has_tdst = false;
};

NatSets nat_rule_sets(const NatRule& rule, const ObjectDatabase& db) {
  NatSets sets;
  sets.osrc = element_ip_set(rule.osrc, db);
  sets.odst = element_ip_set(rule.odst, db);
  ServiceSet osrv = element_services(rule.osrv, db);
  sets.osrv = rule.osrv.negated ? osrv.complement() : osrv;
  TimeSet when = element_interval(rule.when, db);
  sets.when = rule.when.negated ? when.complement() : when;
  sets.has_tsrc = rule.tsrc.has_value();
  sets.has_tdst = rule.tdst.has_value();
  return sets;
}

uint32_t translation_address(const std::string& ref,
                             const ObjectDatabase& db) {
  AddressSet set = address_set_of(db.resolve(ref), db);
  if (set.size() != 1) {
    throw SchemaError("NAT translation must resolve to one address");
  }
  return set.intervals()[0].lo;
}

// Port rewrites from a translated service object: a singleton range
// sets the port, a full range preserves it, anything else is not
// compilable.
struct PortRewrite {
  std::optional<uint16_t> sport, dport;
};

PortRewrite translation_ports(const std::string& ref,
                              const ObjectDatabase& db) {
  const FwObject& obj = db.resolve(ref);
  uint16_t src_lo, src_hi, dst_lo, dst_hi;
  if (const auto* tcp = dynamic_cast<const TcpServiceObj*>(&obj)) {
    src_lo = tcp->src_lo;
    src_hi = tcp->src_hi;
    dst_lo = tcp->dst_lo;
    dst_hi = tcp->dst_hi;
  } else if (const auto* udp = dynamic_cast<const UdpServiceObj*>(&obj)) {
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
  if ((src_lo != src_hi && (src_lo != 0 || src_hi != 65535)) ||
      (dst_lo != dst_hi && (dst_lo != 0 || dst_hi != 65535))) {
    throw UnsupportedFeatureError(
        "nat-translation-service",
        "translated ports must be a single port or the full range");
  }
  return out;
}

std::vector<FlatRule> lower_nat_rule(const NatRule& rule,
                                     const Capabilities& caps,
                                     const ObjectDatabase& db,
                                     std::vector<Diagnostic>* warnings) {
  const std::string where = "NAT rule " + std::to_string(rule.position);

  if (rule.tsrc && rule.tdst) {
    throw UnsupportedFeatureError(
        "nat-dual-translation",
        "rules translating both source and destination cannot be compiled");
  }

  PortRewrite ports;
  if (rule.tsrv) ports = translation_ports(*rule.tsrv, db);

  FlatRule::Kind kind;
  if (rule.tsrc) {
    kind = FlatRule::Kind::Snat;
  } else if (rule.tdst) {
    kind = FlatRule::Kind::Dnat;
  } else if (rule.tsrv) {
    if (ports.sport && ports.dport) {
      throw UnsupportedFeatureError(
          "nat-translation-service",
          "cannot rewrite both ports in one rule");
    }
    kind = ports.sport ? FlatRule::Kind::Snat : FlatRule::Kind::Dnat;
  } else {
    throw UnsupportedFeatureError(
        "nat-noop", "NAT rule with no translation cannot be compiled "
                    "(it would still consume the first match)");
  }
  if (ports.sport) {
    throw UnsupportedFeatureError(
        "snat-service", "source port rewriting cannot be compiled");
  }

  std::vector<AddrAtom> osrc_atoms, odst_atoms;
  if (rule.osrc.negated) {
    // NAT lines stay positive: always expand to the complement.
    Capabilities no_native = caps;
    no_native.supports_single_negation = false;
    no_native.supports_group_negation = false;
    osrc_atoms = expand_negation(rule.osrc, no_native, db, warnings);
  } else {
    atomize_address_element(rule.osrc, caps, db, &osrc_atoms, nullptr);
  }
  if (rule.odst.negated) {
    Capabilities no_native = caps;
    no_native.supports_single_negation = false;
    no_native.supports_group_negation = false;
    odst_atoms = expand_negation(rule.odst, no_native, db, warnings);
  } else {
    atomize_address_element(rule.odst, caps, db, &odst_atoms, nullptr);
  }
  std::vector<SvcAtom> osrv_atoms =
      atomize_service_element(rule.osrv, db, warnings, where);
  std::vector<TimeAtom> when_atoms =
      atomize_when_element(rule.when, db, warnings, where);

  std::vector<FlatRule> out;
  for (const AddrAtom& src : osrc_atoms) {
    for (const AddrAtom& dst : odst_atoms) {
      for (const SvcAtom& srv : osrv_atoms) {
        for (const TimeAtom& when : when_atoms) {
          FlatRule flat;
          flat.origin = rule.position;
          flat.kind = kind;
          flat.action = RuleAction::Accept;
          flat.src = src;
          flat.dst = dst;
          flat.srv = srv;
          flat.when = when;
          if (rule.tsrc) flat.to_src = translation_address(*rule.tsrc, db);
          if (rule.tdst) flat.to_dst = translation_address(*rule.tdst, db);
          flat.to_sport = ports.sport;
          flat.to_dport = ports.dport;
          out.push_back(std::move(flat));
        }
      }
    }
  }
  return out;
}

// first-match interference between NAT rules of different kinds: the
// abstract model applies at most one rewrite, iptables would apply one
// per chain.
void check_iptables_nat_overlap(const std::vector<NatRule>& nat_rules,
                                const ObjectDatabase& db) {
  std::vector<NatSets> sets;
  sets.reserve(nat_rules.size());
  for (const NatRule& rule : nat_rules) {
    sets.push_back(nat_rule_sets(rule, db));
  }
  for (size_t i = 0; i < sets.size(); ++i) {
    for (size_t j = i + 1; j < sets.size(); ++j) {
      bool kinds_differ = sets[i].has_tsrc != sets[j].has_tsrc ||
                          sets[i].has_tdst != sets[j].has_tdst;
      if (!kinds_differ) continue;
      bool joint = sets[i].osrc.intersects(sets[j].osrc) &&
                   sets[i].odst.intersects(sets[j].odst) &&
                   sets[i].osrv.intersects(sets[j].osrv) &&
                   !sets[i].when.intersect(sets[j].when).empty();
      if (joint) {
        throw UnsupportedFeatureError(
            "nat-overlap",
            "NAT rules " + std::to_string(nat_rules[i].position) + " and " +
                std::to_string(nat_rules[j].position) +
                " of different kinds can match the same packet; iptables "
                "would apply both rewrites");
      }
    }
  }
}

void check_iptables_snat_guards(const std::vector<NatRule>& nat_rules,
                                const ObjectDatabase& db) {
  std::vector<AddressSet> originals;
  for (const NatRule& rule : nat_rules) {
    if (!rule.tsrc) continue;
    NatSets sets = nat_rule_sets(rule, db);
    if (!sets.odst.is_universe() || !sets.osrv.is_universe() ||
        !sets.when.is_universe()) {
      throw UnsupportedFeatureError(
          "snat-conditional",
          "SNAT rule " + std::to_string(rule.position) +
              " constrains more than the source; the iptables filter "
              "rewrite cannot honor those conditions");
    }
    for (const AddressSet& other : originals) {
      if (sets.osrc.intersects(other)) {
        throw UnsupportedFeatureError(
            "snat-overlap",
            "SNAT original-source sets overlap; first-match order cannot "
            "be preserved across the filter rewrite");
      }
    }
    originals.push_back(sets.osrc);
  }
}

AddressSet atom_effective_set(const AddrAtom& atom) {
  switch (atom.kind) {
    case AddrAtom::Kind::Any:
      return AddressSet::universe();
    case AddrAtom::Kind::Cidr: {
      AddressSet set = AddressSet::cidr(atom.cidr);
      return atom.negated ? set.complement() : set;
    }
    case AddrAtom::Kind::Range:
      return AddressSet::range(atom.range_lo, atom.range_hi);
    case AddrAtom::Kind::NegatedTable: {
      std::vector<Interval> ivs;
      for (const Cidr& c : atom.table) ivs.push_back({c.first(), c.last()});
      return AddressSet::from_intervals(std::move(ivs)).complement();
    }
    case AddrAtom::Kind::DynamicIface:
      throw OpaqueSetError("dynamic interface address in NAT adjustment");
  }
  return AddressSet::empty_set();
}

}  // namespace

// --- adjust_for_iptables_nat_order -------------------------------------------

std::vector<FlatRule> adjust_for_iptables_nat_order(
    std::vector<FlatRule> filter_rules, const std::vector<NatRule>& nat_rules,
    const ObjectDatabase& db) {
  struct Snat {
    AddressSet originals;
    uint32_t translated;
  };
  std::vector<Snat> snats;
  AddressSet all_originals;
  for (const NatRule& rule : nat_rules) {
    if (!rule.tsrc) continue;
    AddressSet originals = element_ip_set(rule.osrc, db);
    snats.push_back({originals, translation_address(*rule.tsrc, db)});
    all_originals = all_originals.unite(originals);
  }
  if (snats.empty()) return filter_rules;

  std::vector<FlatRule> out;
  for (FlatRule& rule : filter_rules) {
    if (rule.kind != FlatRule::Kind::Filter ||
        rule.src.kind == AddrAtom::Kind::DynamicIface) {
      out.push_back(std::move(rule));
      continue;
    }
    AddressSet s = atom_effective_set(rule.src);
    AddressSet rewritten = s.subtract(all_originals);
    for (const Snat& snat : snats) {
      if (s.contains(snat.translated)) {
        rewritten = rewritten.unite(snat.originals);
      }
    }
    if (rewritten == s) {
      out.push_back(std::move(rule));
      continue;
    }
    for (const Cidr& c : rewritten.to_cidrs()) {
      FlatRule copy = rule;
      copy.src = AddrAtom::of_cidr(c);
      out.push_back(std::move(copy));
    }
  }
  return out;
}

// --- run_pipeline -------------------------------------------------------------

PipelineResult run_pipeline(const FirewallObj& firewall, Platform target,
                            const ObjectDatabase& db) {
  const Capabilities caps = capabilities(target);
  PipelineResult result;

  for (const PolicyRule& rule : firewall.policy.rules) {
    if (rule.disabled) continue;
    auto flats =
        expand_rule_elements(rule, caps, db, &firewall, &result.warnings);
    result.filter.insert(result.filter.end(), flats.begin(), flats.end());
  }

  for (const NatRule& rule : firewall.nat) {
    auto flats = lower_nat_rule(rule, caps, db, &result.warnings);
    result.nat.insert(result.nat.end(), flats.begin(), flats.end());
  }

  if (caps.nat_order == NatOrder::SplitDnatSnat && !firewall.nat.empty()) {
    check_iptables_nat_overlap(firewall.nat, db);
    check_iptables_snat_guards(firewall.nat, db);
    result.filter = adjust_for_iptables_nat_order(std::move(result.filter),
                                                  firewall.nat, db);
  }

  // ipfilter map/rdr lines are interface-bound; adjacent per-interface
  // copies of one rule keep first-match order intact.
  if (target == Platform::Ipfilter && !result.nat.empty()) {
    std::vector<FlatRule> expanded;
    for (const FlatRule& rule : result.nat) {
      for (const auto& iface : firewall.interfaces) {
        FlatRule copy = rule;
        copy.iface = iface->name;
        expanded.push_back(std::move(copy));
      }
    }
    result.nat = std::move(expanded);
  }

  // Dynamic-address operands: pf matches them by interface name
  // anywhere; ipfilter's 0/32 form is relative to the rule's own
  // interface, so the rule must be bound to it.
  for (FlatRule& rule : result.filter) {
    for (AddrAtom* atom : {&rule.src, &rule.dst}) {
      if (atom->kind != AddrAtom::Kind::DynamicIface) continue;
      if (!caps.supports_dynamic_iface_address) {
        throw UnsupportedFeatureError(
            "dynamic-interface-address",
            "the target cannot refer to a dynamically assigned interface "
            "address");
      }
      if (target == Platform::Ipfilter) {
        if (rule.iface.empty()) {
          rule.iface = atom->ifname;
        } else if (rule.iface != atom->ifname) {
          throw UnsupportedFeatureError(
              "dynamic-iface-binding",
              "ipfilter can only name the address of the rule's own "
              "interface");
        }
      }
    }
  }

  // Feature check: anything the target cannot express is a hard error.
  auto check_rules = [&](const std::vector<FlatRule>& rules) {
    for (const FlatRule& rule : rules) {
      if (!rule.when.unconstrained() && !caps.supports_time) {
        throw UnsupportedFeatureError(
            "time", "time-interval rules are not supported by this target");
      }
      if (rule.src_mac && !caps.supports_mac) {
        throw UnsupportedFeatureError(
            "mac", "MAC matching is not supported by this target");
      }
      if ((rule.src.kind == AddrAtom::Kind::Range ||
           rule.dst.kind == AddrAtom::Kind::Range) &&
          !caps.supports_address_ranges) {
        throw InvariantViolationError(
            "range atom survived lowering for a target without ranges");
      }
      if ((rule.src.kind == AddrAtom::Kind::NegatedTable ||
           rule.dst.kind == AddrAtom::Kind::NegatedTable) &&
          !caps.supports_group_negation) {
        throw InvariantViolationError(
            "negated table survived lowering for a target without group "
            "negation");
      }
      if ((rule.src.kind == AddrAtom::Kind::DynamicIface ||
           rule.dst.kind == AddrAtom::Kind::DynamicIface) &&
          !caps.supports_dynamic_iface_address) {
        throw UnsupportedFeatureError(
            "dynamic-interface-address",
            "the target cannot refer to a dynamically assigned interface "
            "address");
      }
    }
  };
  check_rules(result.filter);
  check_rules(result.nat);

  result.default_drop = true;
  return result;
}

}  // namespace fwcomp
