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

#include "fwcomp/model.hpp"

#include <algorithm>
#include <unordered_set>

namespace fwcomp {

const char* object_kind_name(ObjectKind kind) {
  switch (kind) {
    case ObjectKind::AnyAddress:
      return "AnyAddress";
    case ObjectKind::AnyService:
      return "AnyService";
    case ObjectKind::AnyInterval:
      return "AnyInterval";
    case ObjectKind::Network:
      return "Network";
    case ObjectKind::AddressRange:
      return "AddressRange";
    case ObjectKind::AddressTable:
      return "AddressTable";
    case ObjectKind::Ipv4:
      return "IPv4";
    case ObjectKind::PhysAddress:
      return "physAddress";
    case ObjectKind::IpService:
      return "IPService";
    case ObjectKind::TcpService:
      return "TCPService";
    case ObjectKind::UdpService:
      return "UDPService";
    case ObjectKind::IcmpService:
      return "ICMPService";
    case ObjectKind::TimeInterval:
      return "Interval";
    case ObjectKind::Interface:
      return "Interface";
    case ObjectKind::Host:
      return "Host";
    case ObjectKind::Firewall:
      return "Firewall";
    case ObjectKind::Group:
      return "Group";
  }
  return "?";
}

const char* rule_action_name(RuleAction a) {
  switch (a) {
    case RuleAction::Accept:
      return "Accept";
    case RuleAction::Deny:
      return "Deny";
    case RuleAction::Reject:
      return "Reject";
    case RuleAction::Accounting:
      return "Accounting";
  }
  return "?";
}

const char* direction_name(Direction d) {
  switch (d) {
    case Direction::Inbound:
      return "Inbound";
    case Direction::Outbound:
      return "Outbound";
    case Direction::Both:
      return "Both";
  }
  return "?";
}

std::optional<Platform> parse_platform(std::string_view name) {
  if (name == "iptables") return Platform::Iptables;
  if (name == "pf") return Platform::Pf;
  if (name == "ipfilter") return Platform::Ipfilter;
  return std::nullopt;
}

const char* platform_name(Platform p) {
  switch (p) {
    case Platform::Iptables:
      return "iptables";
    case Platform::Pf:
      return "pf";
    case Platform::Ipfilter:
      return "ipfilter";
  }
  return "?";
}

// --- ObjectDatabase -----------------------------------------------------

void ObjectDatabase::index_object(const ObjectPtr& obj) {
  if (obj->id.empty()) throw SchemaError("object with empty id");
  auto [it, inserted] = index_.emplace(obj->id, obj);
  if (!inserted) throw DuplicateIdError(obj->id);
  if (auto host = std::dynamic_pointer_cast<HostObj>(obj)) {
    for (const auto& iface : host->interfaces) index_object(iface);
  } else if (auto iface = std::dynamic_pointer_cast<InterfaceObj>(obj)) {
    for (const auto& addr : iface->addresses) index_object(addr);
    if (iface->phys) index_object(iface->phys);
  }
}

void ObjectDatabase::add_library(Library lib) {
  for (const auto& obj : lib.objects) index_object(obj);
  libraries_.push_back(std::move(lib));
}

void ObjectDatabase::ensure_standard_library() {
  if (index_.count(kAnyAddressId)) return;

  Library lib;
  lib.id = kStandardLibraryId;
  lib.name = "Standard";
  lib.builtin = true;

  auto any_addr = std::make_shared<AnyAddressObj>();
  any_addr->id = kAnyAddressId;
  any_addr->name = "Any";
  auto any_srv = std::make_shared<AnyServiceObj>();
  any_srv->id = kAnyServiceId;
  any_srv->name = "Any";
  auto any_when = std::make_shared<AnyIntervalObj>();
  any_when->id = kAnyIntervalId;
  any_when->name = "Any";
  lib.objects = {any_addr, any_srv, any_when};

  struct Rfc1918 {
    const char* id;
    const char* name;
    uint32_t addr;
    int prefix;
  };
  for (const Rfc1918& n : {Rfc1918{"syslib-net-10", "net-10.0.0.0",
                                   0x0a000000u, 8},
                           Rfc1918{"syslib-net-172", "net-172.16.0.0",
                                   0xac100000u, 12},
                           Rfc1918{"syslib-net-192", "net-192.168.0.0",
                                   0xc0a80000u, 16}}) {
    auto net = std::make_shared<NetworkObj>();
    net->id = n.id;
    net->name = n.name;
    net->address = n.addr;
    net->netmask = prefix_to_mask(n.prefix);
    lib.objects.push_back(std::move(net));
  }
  add_library(std::move(lib));
}

void ObjectDatabase::for_each_object(
    const std::function<void(FwObject&)>& fn) {
  for (auto& [id, obj] : index_) fn(*obj);
}

const FwObject& ObjectDatabase::resolve(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw UnknownIdError(id);
  return *it->second;
}

ConstObjectPtr ObjectDatabase::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : it->second;
}

std::vector<std::shared_ptr<const FirewallObj>> ObjectDatabase::firewalls()
    const {
  std::vector<std::shared_ptr<const FirewallObj>> out;
  for (const Library& lib : libraries_) {
    for (const ObjectPtr& obj : lib.objects) {
      if (auto fw = std::dynamic_pointer_cast<const FirewallObj>(obj)) {
        out.push_back(std::move(fw));
      }
    }
  }
  return out;
}

std::shared_ptr<const FirewallObj> ObjectDatabase::firewall_by_name(
    const std::string& name) const {
  for (const auto& fw : firewalls()) {
    if (fw->name == name) return fw;
  }
  return nullptr;
}

// --- categories ---------------------------------------------------------

namespace {

std::optional<MatchCategory> category_impl(
    const FwObject& obj, const ObjectDatabase& db,
    std::unordered_set<std::string>& in_progress) {
  switch (obj.kind()) {
    case ObjectKind::AnyAddress:
    case ObjectKind::Network:
    case ObjectKind::AddressRange:
    case ObjectKind::AddressTable:
    case ObjectKind::Ipv4:
    case ObjectKind::Host:
    case ObjectKind::Firewall:
      return MatchCategory::Address;
    case ObjectKind::Interface:
      return MatchCategory::Interface;
    case ObjectKind::PhysAddress:
      return MatchCategory::PhysAddress;
    case ObjectKind::AnyService:
    case ObjectKind::IpService:
    case ObjectKind::TcpService:
    case ObjectKind::UdpService:
    case ObjectKind::IcmpService:
      return MatchCategory::Service;
    case ObjectKind::AnyInterval:
    case ObjectKind::TimeInterval:
      return MatchCategory::Interval;
    case ObjectKind::Group: {
      if (!in_progress.insert(obj.id).second) throw CyclicGroupError(obj.id);
      const auto& group = static_cast<const GroupObj&>(obj);
      std::optional<MatchCategory> cat;
      for (const std::string& ref : group.member_refs) {
        auto member_cat = category_impl(db.resolve(ref), db, in_progress);
        if (!member_cat) return std::nullopt;
        // Interfaces are addressable; in a group they mix with addresses.
        if (*member_cat == MatchCategory::Interface) {
          member_cat = MatchCategory::Address;
        }
        if (cat && *cat != *member_cat) {
          in_progress.erase(obj.id);
          return std::nullopt;
        }
        cat = member_cat;
      }
      in_progress.erase(obj.id);
      return cat ? cat : std::optional<MatchCategory>(MatchCategory::Address);
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<MatchCategory> match_category(const FwObject& obj,
                                            const ObjectDatabase& db) {
  std::unordered_set<std::string> in_progress;
  return category_impl(obj, db, in_progress);
}

// --- address sets -------------------------------------------------------

namespace {

AddressSet address_set_impl(const FwObject& obj, const ObjectDatabase& db,
                            std::unordered_set<std::string>& in_progress);

AddressSet host_addresses(const HostObj& host) {
  AddressSet out;
  for (const auto& iface : host.interfaces) {
    if (iface->dynamic || iface->unnumbered) continue;
    for (const auto& addr : iface->addresses) {
      out = out.unite(AddressSet::single(addr->address));
    }
  }
  if (out.empty()) {
    throw OpaqueSetError("host '" + host.name +
                         "' has no static addresses");
  }
  return out;
}

AddressSet address_set_impl(const FwObject& obj, const ObjectDatabase& db,
                            std::unordered_set<std::string>& in_progress) {
  switch (obj.kind()) {
    case ObjectKind::AnyAddress:
      return AddressSet::universe();
    case ObjectKind::Network: {
      const auto& net = static_cast<const NetworkObj&>(obj);
      uint32_t base = net.address & net.netmask;
      return AddressSet::range(base, base | ~net.netmask);
    }
    case ObjectKind::AddressRange: {
      const auto& range = static_cast<const AddressRangeObj&>(obj);
      return AddressSet::range(range.first, range.last);
    }
    case ObjectKind::AddressTable: {
      const auto& table = static_cast<const AddressTableObj&>(obj);
      if (table.load_time == TableLoadTime::Deploy) {
        throw OpaqueSetError("address table '" + table.name +
                             "' is loaded at deploy time");
      }
      if (!table.resolved) {
        throw OpaqueSetError("address table '" + table.name +
                             "' not resolved");
      }
      return *table.resolved;
    }
    case ObjectKind::Ipv4:
      return AddressSet::single(static_cast<const Ipv4Obj&>(obj).address);
    case ObjectKind::Interface: {
      const auto& iface = static_cast<const InterfaceObj&>(obj);
      if (iface.dynamic) {
        throw OpaqueSetError("interface '" + iface.name +
                             "' has a dynamic address");
      }
      AddressSet out;
      for (const auto& addr : iface.addresses) {
        out = out.unite(AddressSet::single(addr->address));
      }
      if (out.empty()) {
        throw OpaqueSetError("interface '" + iface.name +
                             "' has no addresses");
      }
      return out;
    }
    case ObjectKind::Host:
    case ObjectKind::Firewall:
      return host_addresses(static_cast<const HostObj&>(obj));
    case ObjectKind::Group: {
      if (!in_progress.insert(obj.id).second) throw CyclicGroupError(obj.id);
      const auto& group = static_cast<const GroupObj&>(obj);
      AddressSet out;
      for (const std::string& ref : group.member_refs) {
        out = out.unite(address_set_impl(db.resolve(ref), db, in_progress));
      }
      in_progress.erase(obj.id);
      return out;
    }
    default:
      throw SchemaError(std::string("object '") + obj.name + "' (" +
                        object_kind_name(obj.kind()) +
                        ") is not an address object");
  }
}

}  // namespace

AddressSet address_set_of(const FwObject& obj, const ObjectDatabase& db) {
  std::unordered_set<std::string> in_progress;
  return address_set_impl(obj, db, in_progress);
}

// --- service sets -------------------------------------------------------

namespace {

ServiceSet service_set_impl(const FwObject& obj, const ObjectDatabase& db,
                            std::unordered_set<std::string>& in_progress) {
  switch (obj.kind()) {
    case ObjectKind::AnyService:
      return ServiceSet::universe();
    case ObjectKind::IpService:
      return ServiceSet::ip_proto(
          static_cast<const IpServiceObj&>(obj).protocol);
    case ObjectKind::TcpService: {
      const auto& tcp = static_cast<const TcpServiceObj&>(obj);
      return ServiceSet::tcp(tcp.src_lo, tcp.src_hi, tcp.dst_lo, tcp.dst_hi,
                             tcp.flags_mask, tcp.flags_set);
    }
    case ObjectKind::UdpService: {
      const auto& udp = static_cast<const UdpServiceObj&>(obj);
      return ServiceSet::udp(udp.src_lo, udp.src_hi, udp.dst_lo, udp.dst_hi);
    }
    case ObjectKind::IcmpService: {
      const auto& icmp = static_cast<const IcmpServiceObj&>(obj);
      return ServiceSet::icmp(icmp.icmp_type, icmp.icmp_code);
    }
    case ObjectKind::Group: {
      if (!in_progress.insert(obj.id).second) throw CyclicGroupError(obj.id);
      const auto& group = static_cast<const GroupObj&>(obj);
      ServiceSet out;
      for (const std::string& ref : group.member_refs) {
        out = out.unite(service_set_impl(db.resolve(ref), db, in_progress));
      }
      in_progress.erase(obj.id);
      return out;
    }
    default:
      throw SchemaError(std::string("object '") + obj.name + "' (" +
                        object_kind_name(obj.kind()) +
                        ") is not a service object");
  }
}

}  // namespace

ServiceSet service_set_of(const FwObject& obj, const ObjectDatabase& db) {
  std::unordered_set<std::string> in_progress;
  return service_set_impl(obj, db, in_progress);
}

// --- interval sets ------------------------------------------------------

namespace {

TimeSet interval_set_impl(const FwObject& obj, const ObjectDatabase& db,
                          std::unordered_set<std::string>& in_progress) {
  switch (obj.kind()) {
    case ObjectKind::AnyInterval:
      return TimeSet::universe();
    case ObjectKind::TimeInterval:
      return TimeSet::from_atom(
          static_cast<const TimeIntervalObj&>(obj).atom());
    case ObjectKind::Group: {
      if (!in_progress.insert(obj.id).second) throw CyclicGroupError(obj.id);
      const auto& group = static_cast<const GroupObj&>(obj);
      TimeSet out;
      for (const std::string& ref : group.member_refs) {
        out = out.unite(interval_set_impl(db.resolve(ref), db, in_progress));
      }
      in_progress.erase(obj.id);
      return out;
    }
    default:
      throw SchemaError(std::string("object '") + obj.name + "' (" +
                        object_kind_name(obj.kind()) +
                        ") is not a time interval object");
  }
}

}  // namespace

TimeSet interval_set_of(const FwObject& obj, const ObjectDatabase& db) {
  std::unordered_set<std::string> in_progress;
  return interval_set_impl(obj, db, in_progress);
}

// --- MacSet -------------------------------------------------------------

MacSet::MacSet(bool complemented, std::vector<uint64_t> macs)
    : complemented_(complemented), macs_(std::move(macs)) {
  std::sort(macs_.begin(), macs_.end());
  macs_.erase(std::unique(macs_.begin(), macs_.end()), macs_.end());
}

bool MacSet::matches(std::optional<uint64_t> mac) const {
  bool in_set =
      mac && std::binary_search(macs_.begin(), macs_.end(), *mac);
  return complemented_ ? !in_set : in_set;
}

MacSet MacSet::complement() const { return MacSet(!complemented_, macs_); }

bool MacSet::subset_of(const MacSet& other) const {
  if (!complemented_ && !other.complemented_) {
    return std::includes(other.macs_.begin(), other.macs_.end(),
                         macs_.begin(), macs_.end());
  }
  if (!complemented_ && other.complemented_) {
    // subset of a complement: no common member
    for (uint64_t m : macs_) {
      if (std::binary_search(other.macs_.begin(), other.macs_.end(), m)) {
        return false;
      }
    }
    return true;
  }
  if (complemented_ && !other.complemented_) {
    // a complement is infinite (and contains the no-MAC packet)
    return false;
  }
  return std::includes(macs_.begin(), macs_.end(), other.macs_.begin(),
                       other.macs_.end());
}

// --- element helpers ----------------------------------------------------

namespace {

void collect_macs(const FwObject& obj, const ObjectDatabase& db,
                  std::vector<uint64_t>* out,
                  std::unordered_set<std::string>& in_progress) {
  if (obj.kind() == ObjectKind::PhysAddress) {
    out->push_back(static_cast<const PhysAddressObj&>(obj).mac);
    return;
  }
  if (obj.kind() == ObjectKind::Group) {
    if (!in_progress.insert(obj.id).second) throw CyclicGroupError(obj.id);
    for (const std::string& ref :
         static_cast<const GroupObj&>(obj).member_refs) {
      collect_macs(db.resolve(ref), db, out, in_progress);
    }
    in_progress.erase(obj.id);
    return;
  }
  throw SchemaError("object '" + obj.name + "' is not a MAC address");
}

}  // namespace

ElementLayers element_layers(const MatchElement& element,
                             const ObjectDatabase& db) {
  ElementLayers out;
  for (const std::string& ref : element.refs) {
    const FwObject& obj = db.resolve(ref);
    auto cat = match_category(obj, db);
    if (!cat) {
      throw SchemaError("heterogeneous group '" + obj.name +
                        "' in address element");
    }
    switch (*cat) {
      case MatchCategory::Address:
      case MatchCategory::Interface:
        out.ips = out.ips.unite(address_set_of(obj, db));
        out.has_ip_refs = true;
        break;
      case MatchCategory::PhysAddress: {
        std::unordered_set<std::string> in_progress;
        collect_macs(obj, db, &out.macs, in_progress);
        out.has_mac_refs = true;
        break;
      }
      default:
        throw SchemaError("object '" + obj.name +
                          "' is not usable in an address element");
    }
  }
  std::sort(out.macs.begin(), out.macs.end());
  out.macs.erase(std::unique(out.macs.begin(), out.macs.end()),
                 out.macs.end());
  return out;
}

std::optional<std::vector<std::string>> element_interfaces(
    const MatchElement& element, const ObjectDatabase& db) {
  std::vector<std::string> names;
  bool any = false;

  std::function<void(const FwObject&, std::unordered_set<std::string>&)>
      walk = [&](const FwObject& obj,
                 std::unordered_set<std::string>& in_progress) {
        switch (obj.kind()) {
          case ObjectKind::AnyAddress:
            any = true;
            return;
          case ObjectKind::Interface:
            names.push_back(obj.name);
            return;
          case ObjectKind::Group: {
            if (!in_progress.insert(obj.id).second) {
              throw CyclicGroupError(obj.id);
            }
            for (const std::string& ref :
                 static_cast<const GroupObj&>(obj).member_refs) {
              walk(db.resolve(ref), in_progress);
            }
            in_progress.erase(obj.id);
            return;
          }
          default:
            throw SchemaError("object '" + obj.name +
                              "' is not an interface");
        }
      };

  std::unordered_set<std::string> in_progress;
  for (const std::string& ref : element.refs) {
    walk(db.resolve(ref), in_progress);
  }
  if (any) return std::nullopt;
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  return names;
}

ServiceSet element_services(const MatchElement& element,
                            const ObjectDatabase& db) {
  ServiceSet out;
  for (const std::string& ref : element.refs) {
    out = out.unite(service_set_of(db.resolve(ref), db));
  }
  return out;
}

TimeSet element_interval(const MatchElement& element,
                         const ObjectDatabase& db) {
  TimeSet out;
  for (const std::string& ref : element.refs) {
    out = out.unite(interval_set_of(db.resolve(ref), db));
  }
  return out;
}

}  // namespace fwcomp
