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
#include <sstream>

#include "fwcomp/fwbxml.hpp"
#include "xml_reader.hpp"

namespace fwcomp {

namespace {

using AttrList = std::vector<std::pair<std::string, std::string>>;

class Writer {
 public:
  void open(const std::string& name, AttrList attrs, bool self_close) {
    std::sort(attrs.begin(), attrs.end());
    indent();
    out_ << '<' << name;
    for (const auto& [k, v] : attrs) {
      out_ << ' ' << k << "=\"" << xml::escape_attribute(v) << '"';
    }
    if (self_close) {
      out_ << "/>\n";
    } else {
      out_ << ">\n";
      stack_.push_back(name);
    }
  }

  void close() {
    std::string name = stack_.back();
    stack_.pop_back();
    indent();
    out_ << "</" << name << ">\n";
  }

  std::string str() const { return out_.str(); }

 private:
  void indent() {
    for (size_t i = 0; i < stack_.size(); ++i) out_ << "  ";
  }

  std::ostringstream out_;
  std::vector<std::string> stack_;
};

std::string bool_text(bool b) { return b ? "True" : "False"; }

void write_match_element(Writer& w, const std::string& element_name,
                         const std::string& ref_name,
                         const MatchElement& element) {
  w.open(element_name, {{"neg", bool_text(element.negated)}}, false);
  for (const std::string& ref : element.refs) {
    w.open(ref_name, {{"ref", ref}}, true);
  }
  w.close();
}

void write_translation(Writer& w, const std::string& element_name,
                       const std::string& ref_name,
                       const std::optional<std::string>& ref) {
  if (!ref) return;
  w.open(element_name, {}, false);
  w.open(ref_name, {{"ref", *ref}}, true);
  w.close();
}

void write_interface(Writer& w, const InterfaceObj& iface) {
  AttrList attrs = {{"id", iface.id},
                    {"name", iface.name},
                    {"dyn", bool_text(iface.dynamic)},
                    {"unnum", bool_text(iface.unnumbered)}};
  if (iface.unprotected) {
    attrs.push_back({"unprotected", bool_text(*iface.unprotected)});
  }
  bool empty = iface.addresses.empty() && !iface.phys;
  w.open("Interface", std::move(attrs), empty);
  if (empty) return;
  for (const auto& addr : iface.addresses) {
    w.open("IPv4",
           {{"id", addr->id},
            {"name", addr->name},
            {"address", format_ipv4(addr->address)},
            {"netmask", format_ipv4(addr->netmask)}},
           true);
  }
  if (iface.phys) {
    w.open("physAddress",
           {{"id", iface.phys->id},
            {"name", iface.phys->name},
            {"address", format_mac(iface.phys->mac)}},
           true);
  }
  w.close();
}

void write_policy_rule(Writer& w, const PolicyRule& rule) {
  w.open("PolicyRule",
         {{"id", rule.id},
          {"position", std::to_string(rule.position)},
          {"action", rule_action_name(rule.action)},
          {"direction", direction_name(rule.direction)},
          {"disabled", bool_text(rule.disabled)},
          {"comment", rule.comment}},
         false);
  write_match_element(w, "Src", "ObjectRef", rule.src);
  write_match_element(w, "Dst", "ObjectRef", rule.dst);
  write_match_element(w, "Srv", "ServiceRef", rule.srv);
  write_match_element(w, "Itf", "ObjectRef", rule.itf);
  write_match_element(w, "When", "IntervalRef", rule.when);
  w.close();
}

void write_nat_rule(Writer& w, const NatRule& rule) {
  w.open("NATRule",
         {{"id", rule.id}, {"position", std::to_string(rule.position)}},
         false);
  write_match_element(w, "OSrc", "ObjectRef", rule.osrc);
  write_match_element(w, "ODst", "ObjectRef", rule.odst);
  write_match_element(w, "OSrv", "ServiceRef", rule.osrv);
  write_translation(w, "TSrc", "ObjectRef", rule.tsrc);
  write_translation(w, "TDst", "ObjectRef", rule.tdst);
  write_translation(w, "TSrv", "ServiceRef", rule.tsrv);
  write_match_element(w, "When", "IntervalRef", rule.when);
  w.close();
}

void write_firewall(Writer& w, const FirewallObj& fw) {
  w.open("Firewall",
         {{"id", fw.id},
          {"name", fw.name},
          {"platform", fw.platform_text},
          {"host_OS", fw.host_os}},
         false);
  for (const auto& iface : fw.interfaces) write_interface(w, *iface);

  w.open("Policy", {{"id", fw.policy_id.empty() ? fw.id + "-policy"
                                                : fw.policy_id}},
         fw.policy.rules.empty());
  if (!fw.policy.rules.empty()) {
    std::vector<const PolicyRule*> rules;
    for (const PolicyRule& r : fw.policy.rules) rules.push_back(&r);
    std::stable_sort(rules.begin(), rules.end(),
                     [](const PolicyRule* a, const PolicyRule* b) {
                       return a->position < b->position;
                     });
    for (const PolicyRule* r : rules) write_policy_rule(w, *r);
    w.close();
  }

  if (!fw.nat.empty() || !fw.nat_id.empty()) {
    w.open("NAT",
           {{"id", fw.nat_id.empty() ? fw.id + "-nat" : fw.nat_id}},
           fw.nat.empty());
    if (!fw.nat.empty()) {
      std::vector<const NatRule*> rules;
      for (const NatRule& r : fw.nat) rules.push_back(&r);
      std::stable_sort(rules.begin(), rules.end(),
                       [](const NatRule* a, const NatRule* b) {
                         return a->position < b->position;
                       });
      for (const NatRule* r : rules) write_nat_rule(w, *r);
      w.close();
    }
  }
  w.close();
}

void write_object(Writer& w, const FwObject& obj) {
  switch (obj.kind()) {
    case ObjectKind::Network: {
      const auto& net = static_cast<const NetworkObj&>(obj);
      w.open("Network",
             {{"id", net.id},
              {"name", net.name},
              {"address", format_ipv4(net.address)},
              {"netmask", format_ipv4(net.netmask)}},
             true);
      return;
    }
    case ObjectKind::Ipv4: {
      const auto& addr = static_cast<const Ipv4Obj&>(obj);
      w.open("IPv4",
             {{"id", addr.id},
              {"name", addr.name},
              {"address", format_ipv4(addr.address)},
              {"netmask", format_ipv4(addr.netmask)}},
             true);
      return;
    }
    case ObjectKind::PhysAddress: {
      const auto& phys = static_cast<const PhysAddressObj&>(obj);
      w.open("physAddress",
             {{"id", phys.id},
              {"name", phys.name},
              {"address", format_mac(phys.mac)}},
             true);
      return;
    }
    case ObjectKind::AddressRange: {
      const auto& range = static_cast<const AddressRangeObj&>(obj);
      w.open("AddressRange",
             {{"id", range.id},
              {"name", range.name},
              {"start", format_ipv4(range.first)},
              {"end", format_ipv4(range.last)}},
             true);
      return;
    }
    case ObjectKind::AddressTable: {
      const auto& table = static_cast<const AddressTableObj&>(obj);
      w.open("AddressTable",
             {{"id", table.id},
              {"name", table.name},
              {"path", table.path},
              {"load", table.load_time == TableLoadTime::Compile
                           ? "compile"
                           : "deploy"}},
             true);
      return;
    }
    case ObjectKind::IpService: {
      const auto& svc = static_cast<const IpServiceObj&>(obj);
      AttrList attrs = {{"id", svc.id},
                        {"name", svc.name},
                        {"protocol", std::to_string(svc.protocol)}};
      if (svc.lsrr) attrs.push_back({"lsrr", "True"});
      if (svc.rr) attrs.push_back({"rr", "True"});
      w.open("IPService", std::move(attrs), true);
      return;
    }
    case ObjectKind::TcpService: {
      const auto& svc = static_cast<const TcpServiceObj&>(obj);
      AttrList attrs = {{"id", svc.id},
                        {"name", svc.name},
                        {"src_range_start", std::to_string(svc.src_lo)},
                        {"src_range_end", std::to_string(svc.src_hi)},
                        {"dst_range_start", std::to_string(svc.dst_lo)},
                        {"dst_range_end", std::to_string(svc.dst_hi)}};
      if (svc.flags_mask != 0) {
        attrs.push_back(
            {"flags", format_flags(svc.flags_mask, svc.flags_set)});
      }
      w.open("TCPService", std::move(attrs), true);
      return;
    }
    case ObjectKind::UdpService: {
      const auto& svc = static_cast<const UdpServiceObj&>(obj);
      w.open("UDPService",
             {{"id", svc.id},
              {"name", svc.name},
              {"src_range_start", std::to_string(svc.src_lo)},
              {"src_range_end", std::to_string(svc.src_hi)},
              {"dst_range_start", std::to_string(svc.dst_lo)},
              {"dst_range_end", std::to_string(svc.dst_hi)}},
             true);
      return;
    }
    case ObjectKind::IcmpService: {
      const auto& svc = static_cast<const IcmpServiceObj&>(obj);
      AttrList attrs = {{"id", svc.id}, {"name", svc.name}};
      if (svc.icmp_type) {
        attrs.push_back({"type", std::to_string(*svc.icmp_type)});
      }
      if (svc.icmp_code) {
        attrs.push_back({"code", std::to_string(*svc.icmp_code)});
      }
      w.open("ICMPService", std::move(attrs), true);
      return;
    }
    case ObjectKind::TimeInterval: {
      const auto& ti = static_cast<const TimeIntervalObj&>(obj);
      AttrList attrs = {{"id", ti.id}, {"name", ti.name}};
      if (ti.abs_start) {
        attrs.push_back({"start", format_datetime(*ti.abs_start)});
      }
      if (ti.abs_end) attrs.push_back({"end", format_datetime(*ti.abs_end)});
      if (ti.weekdays != kAllWeekdays && ti.weekdays != 0) {
        attrs.push_back({"days", format_weekdays(ti.weekdays)});
      }
      if (ti.daily_start) {
        attrs.push_back({"daily_start", format_minute_of_day(*ti.daily_start)});
      }
      if (ti.daily_end) {
        attrs.push_back({"daily_end", format_minute_of_day(*ti.daily_end)});
      }
      w.open("Interval", std::move(attrs), true);
      return;
    }
    case ObjectKind::Group: {
      const auto& group = static_cast<const GroupObj&>(obj);
      w.open("Group", {{"id", group.id}, {"name", group.name}},
             group.member_refs.empty());
      if (group.member_refs.empty()) return;
      for (const std::string& ref : group.member_refs) {
        w.open("ObjectRef", {{"ref", ref}}, true);
      }
      w.close();
      return;
    }
    case ObjectKind::Interface:
      write_interface(w, static_cast<const InterfaceObj&>(obj));
      return;
    case ObjectKind::Firewall:
      write_firewall(w, static_cast<const FirewallObj&>(obj));
      return;
    case ObjectKind::Host: {
      const auto& host = static_cast<const HostObj&>(obj);
      w.open("Host", {{"id", host.id}, {"name", host.name}},
             host.interfaces.empty());
      if (host.interfaces.empty()) return;
      for (const auto& iface : host.interfaces) write_interface(w, *iface);
      w.close();
      return;
    }
    case ObjectKind::AnyAddress:
    case ObjectKind::AnyService:
    case ObjectKind::AnyInterval:
      // Built-in objects are implicit.
      return;
  }
}

}  // namespace

std::string serialize(const ObjectDatabase& db) {
  Writer w;
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  w.open("FWObjectDatabase", {}, false);
  for (const Library& lib : db.libraries()) {
    // The standard library's grammarless objects (the Any wildcards) are
    // implicit; its Network objects are written out like any others.
    w.open("Library", {{"id", lib.id}, {"name", lib.name}},
           lib.objects.empty());
    if (!lib.objects.empty()) {
      for (const ObjectPtr& obj : lib.objects) write_object(w, *obj);
      w.close();
    }
  }
  w.close();
  return out + w.str();
}

bool structurally_equal(const ObjectDatabase& a, const ObjectDatabase& b) {
  return serialize(a) == serialize(b);
}

}  // namespace fwcomp
