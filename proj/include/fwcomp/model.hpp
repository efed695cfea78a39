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

#ifndef FWCOMP_MODEL_HPP_
#define FWCOMP_MODEL_HPP_

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "fwcomp/addrset.hpp"
#include "fwcomp/errors.hpp"
#include "fwcomp/serviceset.hpp"
#include "fwcomp/timeset.hpp"

namespace fwcomp {

// Reserved ids, present in every database.
inline constexpr char kAnyAddressId[] = "sysid0";
inline constexpr char kAnyServiceId[] = "sysid1";
inline constexpr char kAnyIntervalId[] = "sysid2";
inline constexpr char kStandardLibraryId[] = "syslib000";

enum class ObjectKind {
  AnyAddress,
  AnyService,
  AnyInterval,
  Network,
  AddressRange,
  AddressTable,
  Ipv4,
  PhysAddress,
  IpService,
  TcpService,
  UdpService,
  IcmpService,
  TimeInterval,
  Interface,
  Host,
  Firewall,
  Group,
};

const char* object_kind_name(ObjectKind kind);

struct FwObject {
  std::string id;
  std::string name;

  virtual ~FwObject() = default;
  virtual ObjectKind kind() const = 0;
};

using ObjectPtr = std::shared_ptr<FwObject>;
using ConstObjectPtr = std::shared_ptr<const FwObject>;

struct AnyAddressObj : FwObject {
  ObjectKind kind() const override { return ObjectKind::AnyAddress; }
};
struct AnyServiceObj : FwObject {
  ObjectKind kind() const override { return ObjectKind::AnyService; }
};
struct AnyIntervalObj : FwObject {
  ObjectKind kind() const override { return ObjectKind::AnyInterval; }
};

struct NetworkObj : FwObject {
  uint32_t address = 0;  // canonicalized to the network base on load
  uint32_t netmask = 0;
  ObjectKind kind() const override { return ObjectKind::Network; }
};

struct AddressRangeObj : FwObject {
  uint32_t first = 0;
  uint32_t last = 0;
  ObjectKind kind() const override { return ObjectKind::AddressRange; }
};

enum class TableLoadTime { Compile, Deploy };

struct AddressTableObj : FwObject {
  std::string path;
  TableLoadTime load_time = TableLoadTime::Compile;
  // Filled by resolve_address_tables() for compile-time tables.
  std::optional<AddressSet> resolved;
  ObjectKind kind() const override { return ObjectKind::AddressTable; }
};

// A single host address attached to an interface, or a standalone
// address object. The netmask is interface configuration; as a rule
// operand the object matches the one address.
struct Ipv4Obj : FwObject {
  uint32_t address = 0;
  uint32_t netmask = 0xffffffffu;
  ObjectKind kind() const override { return ObjectKind::Ipv4; }
};

struct PhysAddressObj : FwObject {
  uint64_t mac = 0;
  ObjectKind kind() const override { return ObjectKind::PhysAddress; }
};

struct IpServiceObj : FwObject {
  uint8_t protocol = 0;
  bool lsrr = false;
  bool rr = false;
  ObjectKind kind() const override { return ObjectKind::IpService; }
};

struct TcpServiceObj : FwObject {
  uint16_t src_lo = 0, src_hi = 65535;
  uint16_t dst_lo = 0, dst_hi = 65535;
  uint8_t flags_mask = 0, flags_set = 0;
  ObjectKind kind() const override { return ObjectKind::TcpService; }
};

struct UdpServiceObj : FwObject {
  uint16_t src_lo = 0, src_hi = 65535;
  uint16_t dst_lo = 0, dst_hi = 65535;
  ObjectKind kind() const override { return ObjectKind::UdpService; }
};

struct IcmpServiceObj : FwObject {
  std::optional<uint8_t> icmp_type;  // nullopt = wildcard
  std::optional<uint8_t> icmp_code;
  ObjectKind kind() const override { return ObjectKind::IcmpService; }
};

struct TimeIntervalObj : FwObject {
  std::optional<int64_t> abs_start, abs_end;
  uint8_t weekdays = kAllWeekdays;
  std::optional<int> daily_start, daily_end;
  ObjectKind kind() const override { return ObjectKind::TimeInterval; }

  TimeAtom atom() const {
    TimeAtom a;
    a.abs_start = abs_start;
    a.abs_end = abs_end;
    a.weekdays = weekdays == 0 ? uint8_t(kAllWeekdays) : weekdays;
    a.daily_start = daily_start.value_or(0);
    a.daily_end = daily_end.value_or(kMinutesPerDay - 1);
    return a;
  }
};

struct InterfaceObj : FwObject {
  bool dynamic = false;
  bool unnumbered = false;
  std::optional<bool> unprotected;  // parsed and preserved, no semantics
  std::vector<std::shared_ptr<Ipv4Obj>> addresses;
  std::shared_ptr<PhysAddressObj> phys;
  ObjectKind kind() const override { return ObjectKind::Interface; }
};

// One rule field: references joined by union, optionally negated.
struct MatchElement {
  std::vector<std::string> refs;
  bool negated = false;
  bool operator==(const MatchElement&) const = default;
};

enum class RuleAction { Accept, Deny, Reject, Accounting };
enum class Direction { Inbound, Outbound, Both };

const char* rule_action_name(RuleAction a);
const char* direction_name(Direction d);

struct PolicyRule {
  std::string id;
  int position = 0;
  RuleAction action = RuleAction::Deny;
  Direction direction = Direction::Both;
  bool disabled = false;
  std::string comment;
  MatchElement src, dst, srv, itf, when;
};

struct Policy {
  std::string id;
  std::vector<PolicyRule> rules;  // position order
};

struct NatRule {
  std::string id;
  int position = 0;
  MatchElement osrc, odst, osrv;
  MatchElement when;
  // Empty translation preserves the original field.
  std::optional<std::string> tsrc, tdst, tsrv;
};

struct HostObj : FwObject {
  std::vector<std::shared_ptr<InterfaceObj>> interfaces;
  ObjectKind kind() const override { return ObjectKind::Host; }
};

enum class Platform { Iptables, Pf, Ipfilter };

std::optional<Platform> parse_platform(std::string_view name);
const char* platform_name(Platform p);

struct FirewallObj : HostObj {
  // platform_text is kept verbatim for validation and round-trips;
  // platform is the decoded value when the text names a known target.
  std::string platform_text = "iptables";
  Platform platform = Platform::Iptables;
  std::string host_os;
  std::string policy_id;
  std::string nat_id;
  Policy policy;
  std::vector<NatRule> nat;
  ObjectKind kind() const override { return ObjectKind::Firewall; }
};

struct GroupObj : FwObject {
  std::vector<std::string> member_refs;
  ObjectKind kind() const override { return ObjectKind::Group; }
};

struct Library {
  std::string id;
  std::string name;
  bool builtin = false;  // the implicit standard library
  std::vector<ObjectPtr> objects;
};

// Immutable after load; the index covers every object, including ones
// embedded in hosts and interfaces.
class ObjectDatabase {
 public:
  ObjectDatabase() = default;

  // Appends a library and indexes its objects; throws DuplicateIdError.
  void add_library(Library lib);

  // Installs sysid0/sysid1/sysid2 and the RFC 1918 networks.
  void ensure_standard_library();

  const FwObject& resolve(const std::string& id) const;
  ConstObjectPtr find(const std::string& id) const;

  const std::vector<Library>& libraries() const { return libraries_; }

  // Load-phase mutation hook (table resolution, canonicalization). The
  // database is immutable once loading completes.
  void for_each_object(const std::function<void(FwObject&)>& fn);

  // All firewalls across libraries, in document order.
  std::vector<std::shared_ptr<const FirewallObj>> firewalls() const;
  std::shared_ptr<const FirewallObj> firewall_by_name(
      const std::string& name) const;

 private:
  void index_object(const ObjectPtr& obj);

  std::vector<Library> libraries_;
  std::unordered_map<std::string, ObjectPtr> index_;
};

// Match category of an object when used as a rule operand.
enum class MatchCategory { Address, PhysAddress, Service, Interval, Interface };

std::optional<MatchCategory> match_category(const FwObject& obj,
                                            const ObjectDatabase& db);

// --- canonical set derivation ------------------------------------------

// Address set of an address-like object. Throws OpaqueSetError for
// deploy-time tables, dynamic interfaces and hosts without static
// addresses; CyclicGroupError for group cycles.
AddressSet address_set_of(const FwObject& obj, const ObjectDatabase& db);

// Service set of a service-like object or group.
ServiceSet service_set_of(const FwObject& obj, const ObjectDatabase& db);

// Time set of an interval-like object or group.
TimeSet interval_set_of(const FwObject& obj, const ObjectDatabase& db);

// Set of source MAC addresses, or their complement. The complement of a
// plain set also matches packets that carry no MAC at all.
class MacSet {
 public:
  static MacSet universe() { return MacSet(true, {}); }
  static MacSet of(std::vector<uint64_t> macs) {
    return MacSet(false, std::move(macs));
  }

  bool matches(std::optional<uint64_t> mac) const;
  MacSet complement() const;
  bool subset_of(const MacSet& other) const;
  bool is_universe() const { return complemented_ && macs_.empty(); }
  bool empty() const { return !complemented_ && macs_.empty(); }
  bool complemented() const { return complemented_; }
  const std::vector<uint64_t>& macs() const { return macs_; }

  bool operator==(const MacSet&) const = default;

 private:
  MacSet(bool complemented, std::vector<uint64_t> macs);

  bool complemented_ = false;
  std::vector<uint64_t> macs_;  // sorted, unique
};

// The two layers of one Src/Dst element, before negation. `disjunctive`
// marks elements referencing both layers (matches when either layer
// matches); such regions are not products.
struct ElementLayers {
  AddressSet ips;
  std::vector<uint64_t> macs;
  bool has_ip_refs = false;
  bool has_mac_refs = false;
};

// Resolves one Src/Dst element into its layers. Group refs are expanded.
ElementLayers element_layers(const MatchElement& element,
                             const ObjectDatabase& db);

// Interface names referenced by an Itf element; nullopt when it is Any.
std::optional<std::vector<std::string>> element_interfaces(
    const MatchElement& element, const ObjectDatabase& db);

// Service set of a Srv element (union over refs, before negation).
ServiceSet element_services(const MatchElement& element,
                            const ObjectDatabase& db);

// Time set of a When element (union over refs, before negation).
TimeSet element_interval(const MatchElement& element,
                         const ObjectDatabase& db);

}  // namespace fwcomp

#endif  // FWCOMP_MODEL_HPP_
