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

#include "fwcomp/fwbxml.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "xml_reader.hpp"

namespace fwcomp {

std::string Diagnostic::render() const {
  std::string out =
      severity == Severity::Error ? "error: " : "warning: ";
  out += code;
  out += ": ";
  out += message;
  if (!location.empty()) {
    out += " (at ";
    out += location;
    out += ")";
  }
  return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) {
                       return d.severity == Severity::Error;
                     });
}

namespace {

[[noreturn]] void schema_fail(const xml::Element& el, const std::string& msg) {
  throw SchemaError("line " + std::to_string(el.line) + ", <" + el.name +
                    ">: " + msg);
}

// Tracks which attributes were consumed so leftovers can be reported.
class Attrs {
 public:
  Attrs(const xml::Element& el, std::vector<Diagnostic>* warnings)
      : el_(el), warnings_(warnings) {}

  ~Attrs() {
    if (!warnings_) return;
    for (const auto& [key, value] : el_.attributes) {
      if (!consumed_.count(key)) {
        warnings_->push_back({Severity::Warning, "unknown-attribute",
                              el_.name,
                              "attribute '" + key + "' is not recognized"});
      }
    }
  }

  std::optional<std::string> get(const std::string& key) {
    consumed_.insert(key);
    const std::string* v = el_.attribute(key);
    if (!v) return std::nullopt;
    return *v;
  }

  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v) schema_fail(el_, "missing required attribute '" + key + "'");
    return *v;
  }

  bool get_bool(const std::string& key, bool fallback) {
    auto v = get(key);
    if (!v) return fallback;
    if (*v == "True") return true;
    if (*v == "False") return false;
    schema_fail(el_, "attribute '" + key + "' must be True or False");
  }

  bool require_bool(const std::string& key) {
    auto v = require(key);
    if (v == "True") return true;
    if (v == "False") return false;
    schema_fail(el_, "attribute '" + key + "' must be True or False");
  }

  long require_int(const std::string& key, long lo, long hi) {
    std::string v = require(key);
    long out = 0;
    auto [next, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || next != v.data() + v.size() || out < lo ||
        out > hi) {
      schema_fail(el_, "attribute '" + key + "' must be an integer in [" +
                           std::to_string(lo) + ", " + std::to_string(hi) +
                           "]");
    }
    return out;
  }

  uint32_t require_addr(const std::string& key) {
    std::string v = require(key);
    auto addr = parse_ipv4(v);
    if (!addr) schema_fail(el_, "bad IPv4 address in '" + key + "': " + v);
    return *addr;
  }

 private:
  const xml::Element& el_;
  std::vector<Diagnostic>* warnings_;
  std::set<std::string> consumed_;
};

struct ParseContext {
  std::vector<Diagnostic>* warnings = nullptr;
};

void expect_no_children(const xml::Element& el) {
  if (!el.children.empty()) {
    schema_fail(el, "unexpected child element <" + el.children[0]->name + ">");
  }
}

MatchElement parse_match_element(const xml::Element& el,
                                 const std::string& ref_element,
                                 ParseContext& ctx) {
  Attrs attrs(el, ctx.warnings);
  MatchElement out;
  out.negated = attrs.get_bool("neg", false);
  for (const auto& child : el.children) {
    if (child->name != ref_element) {
      schema_fail(*child, "expected <" + ref_element + "> inside <" +
                              el.name + ">");
    }
    Attrs ref_attrs(*child, ctx.warnings);
    out.refs.push_back(ref_attrs.require("ref"));
    expect_no_children(*child);
  }
  if (out.refs.empty()) {
    schema_fail(el, "element must contain at least one reference");
  }
  return out;
}

// A translation field holds exactly one reference; absent means
// "preserve the original".
std::optional<std::string> parse_translation(const xml::Element& el,
                                             const std::string& ref_element,
                                             ParseContext& ctx) {
  Attrs attrs(el, ctx.warnings);
  if (el.children.empty()) return std::nullopt;
  if (el.children.size() > 1) {
    schema_fail(el, "translation takes a single reference");
  }
  const xml::Element& child = *el.children[0];
  if (child.name != ref_element) {
    schema_fail(child,
                "expected <" + ref_element + "> inside <" + el.name + ">");
  }
  Attrs ref_attrs(child, ctx.warnings);
  expect_no_children(child);
  return ref_attrs.require("ref");
}

uint32_t parse_netmask(const xml::Element& el, Attrs& attrs) {
  uint32_t mask = attrs.require_addr("netmask");
  if (!mask_to_prefix(mask)) {
    schema_fail(el, "non-contiguous netmask " + format_ipv4(mask));
  }
  return mask;
}

std::shared_ptr<Ipv4Obj> parse_ipv4_obj(const xml::Element& el,
                                        ParseContext& ctx) {
  auto obj = std::make_shared<Ipv4Obj>();
  Attrs attrs(el, ctx.warnings);
  obj->id = attrs.require("id");
  obj->name = attrs.require("name");
  obj->address = attrs.require_addr("address");
  obj->netmask = parse_netmask(el, attrs);
  expect_no_children(el);
  return obj;
}

std::shared_ptr<PhysAddressObj> parse_phys(const xml::Element& el,
                                           ParseContext& ctx) {
  auto obj = std::make_shared<PhysAddressObj>();
  Attrs attrs(el, ctx.warnings);
  obj->id = attrs.require("id");
  obj->name = attrs.require("name");
  std::string text = attrs.require("address");
  auto mac = parse_mac(text);
  if (!mac) schema_fail(el, "bad MAC address: " + text);
  obj->mac = *mac;
  expect_no_children(el);
  return obj;
}

std::shared_ptr<InterfaceObj> parse_interface(const xml::Element& el,
                                              ParseContext& ctx) {
  auto obj = std::make_shared<InterfaceObj>();
  Attrs attrs(el, ctx.warnings);
  obj->id = attrs.require("id");
  obj->name = attrs.require("name");
  obj->dynamic = attrs.require_bool("dyn");
  obj->unnumbered = attrs.require_bool("unnum");
  if (el.attribute("unprotected")) {
    obj->unprotected = attrs.get_bool("unprotected", false);
  }
  for (const auto& child : el.children) {
    if (child->name == "IPv4") {
      obj->addresses.push_back(parse_ipv4_obj(*child, ctx));
    } else if (child->name == "physAddress") {
      if (obj->phys) schema_fail(*child, "interface has two MAC addresses");
      obj->phys = parse_phys(*child, ctx);
    } else {
      schema_fail(*child, "unexpected element inside <Interface>");
    }
  }
  if (obj->dynamic && !obj->addresses.empty()) {
    schema_fail(el, "dynamic interface '" + obj->name +
                        "' must not carry static addresses");
  }
  return obj;
}

PolicyRule parse_policy_rule(const xml::Element& el, ParseContext& ctx) {
  PolicyRule rule;
  Attrs attrs(el, ctx.warnings);
  rule.id = attrs.require("id");
  rule.position = int(attrs.require_int("position", 0, 1 << 20));
  std::string action = attrs.require("action");
  if (action == "Accept") {
    rule.action = RuleAction::Accept;
  } else if (action == "Deny") {
    rule.action = RuleAction::Deny;
  } else if (action == "Reject") {
    rule.action = RuleAction::Reject;
  } else if (action == "Accounting") {
    rule.action = RuleAction::Accounting;
  } else {
    schema_fail(el, "unknown action '" + action + "'");
  }
  std::string direction = attrs.require("direction");
  if (direction == "Inbound") {
    rule.direction = Direction::Inbound;
  } else if (direction == "Outbound") {
    rule.direction = Direction::Outbound;
  } else if (direction == "Both") {
    rule.direction = Direction::Both;
  } else {
    schema_fail(el, "unknown direction '" + direction + "'");
  }
  rule.disabled = attrs.require_bool("disabled");
  rule.comment = attrs.get("comment").value_or("");

  bool have_src = false, have_dst = false, have_srv = false, have_itf = false,
       have_when = false;
  for (const auto& child : el.children) {
    if (child->name == "Src") {
      rule.src = parse_match_element(*child, "ObjectRef", ctx);
      have_src = true;
    } else if (child->name == "Dst") {
      rule.dst = parse_match_element(*child, "ObjectRef", ctx);
      have_dst = true;
    } else if (child->name == "Srv") {
      rule.srv = parse_match_element(*child, "ServiceRef", ctx);
      have_srv = true;
    } else if (child->name == "Itf") {
      rule.itf = parse_match_element(*child, "ObjectRef", ctx);
      have_itf = true;
    } else if (child->name == "When") {
      rule.when = parse_match_element(*child, "IntervalRef", ctx);
      have_when = true;
    } else {
      schema_fail(*child, "unexpected element inside <PolicyRule>");
    }
  }
  if (!have_src || !have_dst || !have_srv || !have_itf || !have_when) {
    schema_fail(el, "rule requires Src, Dst, Srv, Itf and When elements");
  }
  return rule;
}

NatRule parse_nat_rule(const xml::Element& el, ParseContext& ctx) {
  NatRule rule;
  Attrs attrs(el, ctx.warnings);
  rule.id = attrs.require("id");
  rule.position = int(attrs.require_int("position", 0, 1 << 20));
  // When defaults to Any.
  rule.when.refs = {kAnyIntervalId};

  bool have_osrc = false, have_odst = false, have_osrv = false;
  for (const auto& child : el.children) {
    if (child->name == "OSrc") {
      rule.osrc = parse_match_element(*child, "ObjectRef", ctx);
      have_osrc = true;
    } else if (child->name == "ODst") {
      rule.odst = parse_match_element(*child, "ObjectRef", ctx);
      have_odst = true;
    } else if (child->name == "OSrv") {
      rule.osrv = parse_match_element(*child, "ServiceRef", ctx);
      have_osrv = true;
    } else if (child->name == "TSrc") {
      rule.tsrc = parse_translation(*child, "ObjectRef", ctx);
    } else if (child->name == "TDst") {
      rule.tdst = parse_translation(*child, "ObjectRef", ctx);
    } else if (child->name == "TSrv") {
      rule.tsrv = parse_translation(*child, "ServiceRef", ctx);
    } else if (child->name == "When") {
      rule.when = parse_match_element(*child, "IntervalRef", ctx);
    } else {
      schema_fail(*child, "unexpected element inside <NATRule>");
    }
  }
  if (!have_osrc || !have_odst || !have_osrv) {
    schema_fail(el, "NAT rule requires OSrc, ODst and OSrv elements");
  }
  return rule;
}

std::shared_ptr<FirewallObj> parse_firewall(const xml::Element& el,
                                            ParseContext& ctx) {
  auto obj = std::make_shared<FirewallObj>();
  Attrs attrs(el, ctx.warnings);
  obj->id = attrs.require("id");
  obj->name = attrs.require("name");
  obj->platform_text = attrs.require("platform");
  if (auto p = parse_platform(obj->platform_text)) obj->platform = *p;
  obj->host_os = attrs.get("host_OS").value_or("");

  bool have_policy = false, have_nat = false;
  for (const auto& child : el.children) {
    if (child->name == "Interface") {
      obj->interfaces.push_back(parse_interface(*child, ctx));
    } else if (child->name == "Policy") {
      if (have_policy) schema_fail(*child, "firewall has two policies");
      have_policy = true;
      Attrs pol_attrs(*child, ctx.warnings);
      obj->policy_id = pol_attrs.require("id");
      obj->policy.id = obj->policy_id;
      for (const auto& rule_el : child->children) {
        if (rule_el->name != "PolicyRule") {
          schema_fail(*rule_el, "unexpected element inside <Policy>");
        }
        obj->policy.rules.push_back(parse_policy_rule(*rule_el, ctx));
      }
      std::stable_sort(obj->policy.rules.begin(), obj->policy.rules.end(),
                       [](const PolicyRule& a, const PolicyRule& b) {
                         return a.position < b.position;
                       });
    } else if (child->name == "NAT") {
      if (have_nat) schema_fail(*child, "firewall has two NAT sections");
      have_nat = true;
      Attrs nat_attrs(*child, ctx.warnings);
      obj->nat_id = nat_attrs.require("id");
      for (const auto& rule_el : child->children) {
        if (rule_el->name != "NATRule") {
          schema_fail(*rule_el, "unexpected element inside <NAT>");
        }
        obj->nat.push_back(parse_nat_rule(*rule_el, ctx));
      }
      std::stable_sort(obj->nat.begin(), obj->nat.end(),
                       [](const NatRule& a, const NatRule& b) {
                         return a.position < b.position;
                       });
    } else {
      schema_fail(*child, "unexpected element inside <Firewall>");
    }
  }
  return obj;
}

ObjectPtr parse_object(const xml::Element& el, ParseContext& ctx);

std::shared_ptr<HostObj> parse_host(const xml::Element& el,
                                    ParseContext& ctx) {
  auto obj = std::make_shared<HostObj>();
  Attrs attrs(el, ctx.warnings);
  obj->id = attrs.require("id");
  obj->name = attrs.require("name");
  for (const auto& child : el.children) {
    if (child->name != "Interface") {
      schema_fail(*child, "unexpected element inside <Host>");
    }
    obj->interfaces.push_back(parse_interface(*child, ctx));
  }
  return obj;
}

ObjectPtr parse_object(const xml::Element& el, ParseContext& ctx) {
  if (el.name == "Network") {
    auto obj = std::make_shared<NetworkObj>();
    Attrs attrs(el, ctx.warnings);
    obj->id = attrs.require("id");
    obj->name = attrs.require("name");
    obj->address = attrs.require_addr("address");
    obj->netmask = parse_netmask(el, attrs);
    obj->address &= obj->netmask;  // canonicalize to the network base
    expect_no_children(el);
    return obj;
  }
  if (el.name == "IPv4") return parse_ipv4_obj(el, ctx);
  if (el.name == "physAddress") return parse_phys(el, ctx);
  if (el.name == "AddressRange") {
    auto obj = std::make_shared<AddressRangeObj>();
    Attrs attrs(el, ctx.warnings);
    obj->id = attrs.require("id");
    obj->name = attrs.require("name");
    obj->first = attrs.require_addr("start");
    obj->last = attrs.require_addr("end");
    if (obj->first > obj->last) {
      schema_fail(el, "range start is above its end");
    }
    expect_no_children(el);
    return obj;
  }
  if (el.name == "AddressTable") {
    auto obj = std::make_shared<AddressTableObj>();
    Attrs attrs(el, ctx.warnings);
    obj->id = attrs.require("id");
    obj->name = attrs.require("name");
    obj->path = attrs.require("path");
    std::string load = attrs.require("load");
    if (load == "compile") {
      obj->load_time = TableLoadTime::Compile;
    } else if (load == "deploy") {
      obj->load_time = TableLoadTime::Deploy;
    } else {
      schema_fail(el, "load must be 'compile' or 'deploy'");
    }
    expect_no_children(el);
    return obj;
  }
  if (el.name == "IPService") {
    auto obj = std::make_shared<IpServiceObj>();
    Attrs attrs(el, ctx.warnings);
    obj->id = attrs.require("id");
    obj->name = attrs.require("name");
    obj->protocol = uint8_t(attrs.require_int("protocol", 0, 255));
    obj->lsrr = attrs.get_bool("lsrr", false);
    obj->rr = attrs.get_bool("rr", false);
    expect_no_children(el);
    return obj;
  }
  if (el.name == "TCPService" || el.name == "UDPService") {
    Attrs attrs(el, ctx.warnings);
    std::string id = attrs.require("id");
    std::string name = attrs.require("name");
    uint16_t src_lo = uint16_t(attrs.require_int("src_range_start", 0, 65535));
    uint16_t src_hi = uint16_t(attrs.require_int("src_range_end", 0, 65535));
    uint16_t dst_lo = uint16_t(attrs.require_int("dst_range_start", 0, 65535));
    uint16_t dst_hi = uint16_t(attrs.require_int("dst_range_end", 0, 65535));
    if (src_lo > src_hi || dst_lo > dst_hi) {
      schema_fail(el, "port range start is above its end");
    }
    expect_no_children(el);
    if (el.name == "UDPService") {
      auto obj = std::make_shared<UdpServiceObj>();
      obj->id = id;
      obj->name = name;
      obj->src_lo = src_lo;
      obj->src_hi = src_hi;
      obj->dst_lo = dst_lo;
      obj->dst_hi = dst_hi;
      return obj;
    }
    auto obj = std::make_shared<TcpServiceObj>();
    obj->id = id;
    obj->name = name;
    obj->src_lo = src_lo;
    obj->src_hi = src_hi;
    obj->dst_lo = dst_lo;
    obj->dst_hi = dst_hi;
    if (auto flags = attrs.get("flags")) {
      auto parsed = parse_flags(*flags);
      if (!parsed) schema_fail(el, "bad flags value '" + *flags + "'");
      obj->flags_mask = parsed->first;
      obj->flags_set = parsed->second;
    }
    return obj;
  }
  if (el.name == "ICMPService") {
    auto obj = std::make_shared<IcmpServiceObj>();
    Attrs attrs(el, ctx.warnings);
    obj->id = attrs.require("id");
    obj->name = attrs.require("name");
    if (el.attribute("type")) {
      obj->icmp_type = uint8_t(attrs.require_int("type", 0, 255));
    }
    if (el.attribute("code")) {
      obj->icmp_code = uint8_t(attrs.require_int("code", 0, 255));
    }
    expect_no_children(el);
    return obj;
  }
  if (el.name == "Interval") {
    auto obj = std::make_shared<TimeIntervalObj>();
    Attrs attrs(el, ctx.warnings);
    obj->id = attrs.require("id");
    obj->name = attrs.require("name");
    if (auto v = attrs.get("start")) {
      auto t = parse_datetime(*v);
      if (!t) schema_fail(el, "bad start datetime '" + *v + "'");
      obj->abs_start = *t;
    }
    if (auto v = attrs.get("end")) {
      auto t = parse_datetime(*v);
      if (!t) schema_fail(el, "bad end datetime '" + *v + "'");
      obj->abs_end = *t;
    }
    if (auto v = attrs.get("days")) {
      auto days = parse_weekdays(*v);
      if (!days) schema_fail(el, "bad days value '" + *v + "'");
      obj->weekdays = *days;
    }
    if (auto v = attrs.get("daily_start")) {
      auto m = parse_minute_of_day(*v);
      if (!m) schema_fail(el, "bad daily_start '" + *v + "'");
      obj->daily_start = *m;
    }
    if (auto v = attrs.get("daily_end")) {
      auto m = parse_minute_of_day(*v);
      if (!m) schema_fail(el, "bad daily_end '" + *v + "'");
      obj->daily_end = *m;
    }
    if (obj->abs_start && obj->abs_end && *obj->abs_start > *obj->abs_end) {
      schema_fail(el, "interval start is after its end");
    }
    expect_no_children(el);
    return obj;
  }
  if (el.name == "Group") {
    auto obj = std::make_shared<GroupObj>();
    Attrs attrs(el, ctx.warnings);
    obj->id = attrs.require("id");
    obj->name = attrs.require("name");
    for (const auto& child : el.children) {
      if (child->name != "ObjectRef") {
        schema_fail(*child, "expected <ObjectRef> inside <Group>");
      }
      Attrs ref_attrs(*child, ctx.warnings);
      obj->member_refs.push_back(ref_attrs.require("ref"));
      expect_no_children(*child);
    }
    return obj;
  }
  if (el.name == "Host") return parse_host(el, ctx);
  if (el.name == "Firewall") return parse_firewall(el, ctx);
  schema_fail(el, "unknown element");
}

void collect_refs(const FirewallObj& fw,
                  std::vector<std::string>* refs) {
  auto add_element = [&](const MatchElement& e) {
    refs->insert(refs->end(), e.refs.begin(), e.refs.end());
  };
  for (const PolicyRule& rule : fw.policy.rules) {
    add_element(rule.src);
    add_element(rule.dst);
    add_element(rule.srv);
    add_element(rule.itf);
    add_element(rule.when);
  }
  for (const NatRule& rule : fw.nat) {
    add_element(rule.osrc);
    add_element(rule.odst);
    add_element(rule.osrv);
    add_element(rule.when);
    for (const auto& t : {rule.tsrc, rule.tdst, rule.tsrv}) {
      if (t) refs->push_back(*t);
    }
  }
}

std::vector<std::string> all_refs(const ObjectDatabase& db) {
  std::vector<std::string> refs;
  for (const Library& lib : db.libraries()) {
    for (const ObjectPtr& obj : lib.objects) {
      if (auto* group = dynamic_cast<const GroupObj*>(obj.get())) {
        refs.insert(refs.end(), group->member_refs.begin(),
                    group->member_refs.end());
      } else if (auto* fw = dynamic_cast<const FirewallObj*>(obj.get())) {
        collect_refs(*fw, &refs);
      }
    }
  }
  return refs;
}

}  // namespace

ObjectDatabase parse(std::string_view text,
                     std::vector<Diagnostic>* warnings) {
  auto root = xml::parse_document(text);
  if (root->name != "FWObjectDatabase") {
    schema_fail(*root, "root element must be <FWObjectDatabase>");
  }

  ParseContext ctx{warnings};
  ObjectDatabase db;
  db.ensure_standard_library();

  {
    Attrs root_attrs(*root, warnings);
  }
  for (const auto& lib_el : root->children) {
    if (lib_el->name != "Library") {
      schema_fail(*lib_el, "expected <Library> under the root");
    }
    Library lib;
    Attrs attrs(*lib_el, warnings);
    lib.id = attrs.require("id");
    lib.name = attrs.require("name");
    if (lib.id == kStandardLibraryId) {
      // The standard library's content is defined by the tool, not the
      // document; what a serialized file carries for it is dropped.
      continue;
    }
    for (const auto& obj_el : lib_el->children) {
      lib.objects.push_back(parse_object(*obj_el, ctx));
    }
    db.add_library(std::move(lib));
  }

  for (const std::string& ref : all_refs(db)) {
    if (!db.find(ref)) throw DanglingRefError(ref);
  }
  return db;
}

// --- validation ---------------------------------------------------------

namespace {

void check_positions(const std::string& where, std::vector<int> positions,
                     std::vector<Diagnostic>* out) {
  std::sort(positions.begin(), positions.end());
  for (size_t i = 0; i < positions.size(); ++i) {
    if (i > 0 && positions[i] == positions[i - 1]) {
      out->push_back({Severity::Error, "duplicate-position", where,
                      "two rules share position " +
                          std::to_string(positions[i])});
    } else if (positions[i] != int(i)) {
      out->push_back({Severity::Error, "position-gap", where,
                      "positions must be gapless from 0; found " +
                          std::to_string(positions[i]) + " at index " +
                          std::to_string(i)});
      break;
    }
  }
}

void check_element(const ObjectDatabase& db, const std::string& where,
                   const MatchElement& element,
                   std::initializer_list<MatchCategory> allowed,
                   std::vector<Diagnostic>* out) {
  for (const std::string& ref : element.refs) {
    ConstObjectPtr obj = db.find(ref);
    if (!obj) {
      out->push_back({Severity::Error, "dangling-ref", where,
                      "reference '" + ref + "' does not resolve"});
      continue;
    }
    std::optional<MatchCategory> cat;
    try {
      cat = match_category(*obj, db);
    } catch (const CyclicGroupError&) {
      out->push_back({Severity::Error, "group-cycle", where,
                      "group cycle through '" + obj->name + "'"});
      continue;
    } catch (const UnknownIdError& e) {
      out->push_back({Severity::Error, "dangling-ref", where, e.what()});
      continue;
    }
    if (!cat) {
      out->push_back({Severity::Error, "group-heterogeneous", where,
                      "group '" + obj->name +
                          "' mixes objects of different types"});
      continue;
    }
    if (std::find(allowed.begin(), allowed.end(), *cat) == allowed.end()) {
      out->push_back({Severity::Error, "element-type", where,
                      "object '" + obj->name + "' (" +
                          object_kind_name(obj->kind()) +
                          ") cannot be used here"});
    }
  }
}

// Translation target must name exactly one address.
void check_translation_addr(const ObjectDatabase& db, const std::string& where,
                            const std::optional<std::string>& ref,
                            std::vector<Diagnostic>* out) {
  if (!ref) return;
  ConstObjectPtr obj = db.find(*ref);
  if (!obj) {
    out->push_back({Severity::Error, "dangling-ref", where,
                    "reference '" + *ref + "' does not resolve"});
    return;
  }
  try {
    AddressSet set = address_set_of(*obj, db);
    if (set.size() != 1) {
      out->push_back({Severity::Error, "nat-translation-not-single", where,
                      "translation '" + obj->name + "' must be a single "
                      "address, covers " +
                          std::to_string(set.size())});
    }
  } catch (const Error& e) {
    out->push_back(
        {Severity::Error, "nat-translation-not-single", where, e.what()});
  }
}

}  // namespace

std::vector<Diagnostic> validate_schema(const ObjectDatabase& db) {
  std::vector<Diagnostic> out;

  for (const Library& lib : db.libraries()) {
    for (const ObjectPtr& obj : lib.objects) {
      if (auto* group = dynamic_cast<const GroupObj*>(obj.get())) {
        for (const std::string& ref : group->member_refs) {
          if (!db.find(ref)) {
            out.push_back({Severity::Error, "dangling-ref",
                           "Group " + group->id,
                           "reference '" + ref + "' does not resolve"});
          }
        }
        try {
          if (!match_category(*group, db)) {
            out.push_back({Severity::Error, "group-heterogeneous",
                           "Group " + group->id,
                           "group '" + group->name +
                               "' mixes objects of different types"});
          }
        } catch (const CyclicGroupError&) {
          out.push_back({Severity::Error, "group-cycle",
                         "Group " + group->id,
                         "group cycle through '" + group->name + "'"});
        } catch (const UnknownIdError&) {
          // dangling refs already reported
        }
      }
      if (auto* svc = dynamic_cast<const IpServiceObj*>(obj.get())) {
        if (ServiceSet::reserved_protocol(svc->protocol)) {
          out.push_back({Severity::Error, "ip-service-protocol",
                         "IPService " + svc->id,
                         "protocol " + std::to_string(svc->protocol) +
                             " must use the dedicated service type"});
        }
      }
      auto* fw = dynamic_cast<const FirewallObj*>(obj.get());
      if (!fw) continue;

      const std::string fw_where = "Firewall " + fw->name;
      if (fw->interfaces.empty()) {
        out.push_back({Severity::Error, "firewall-no-interfaces", fw_where,
                       "firewall must have at least one interface"});
      }
      if (!parse_platform(fw->platform_text)) {
        out.push_back({Severity::Error, "platform-unsupported", fw_where,
                       "platform '" + fw->platform_text +
                           "' is not a supported target"});
      }

      std::vector<int> positions;
      for (const PolicyRule& rule : fw->policy.rules) {
        positions.push_back(rule.position);
        const std::string where =
            fw_where + ", rule " + std::to_string(rule.position);
        check_element(db, where, rule.src,
                      {MatchCategory::Address, MatchCategory::PhysAddress,
                       MatchCategory::Interface},
                      &out);
        check_element(db, where, rule.dst,
                      {MatchCategory::Address, MatchCategory::PhysAddress,
                       MatchCategory::Interface},
                      &out);
        check_element(db, where, rule.srv, {MatchCategory::Service}, &out);
        check_element(db, where, rule.when, {MatchCategory::Interval}, &out);
        try {
          element_interfaces(rule.itf, db);
        } catch (const SchemaError& e) {
          out.push_back({Severity::Error, "element-type", where, e.what()});
        } catch (const CyclicGroupError& e) {
          out.push_back({Severity::Error, "group-cycle", where, e.what()});
        } catch (const UnknownIdError& e) {
          out.push_back({Severity::Error, "dangling-ref", where, e.what()});
        }

        // Packets carry no destination MAC; a MAC in Dst never matches.
        for (const std::string& ref : rule.dst.refs) {
          ConstObjectPtr o = db.find(ref);
          if (!o) continue;
          try {
            if (match_category(*o, db) == MatchCategory::PhysAddress) {
              out.push_back({Severity::Warning, "phys-in-dst", where,
                             "MAC address '" + o->name +
                                 "' in Dst matches no packet"});
            }
          } catch (const Error&) {
            // reported by check_element already
          }
        }
      }
      check_positions(fw_where + " policy", positions, &out);

      positions.clear();
      for (const NatRule& rule : fw->nat) {
        positions.push_back(rule.position);
        const std::string where =
            fw_where + ", NAT rule " + std::to_string(rule.position);
        check_element(db, where, rule.osrc, {MatchCategory::Address,
                       MatchCategory::Interface}, &out);
        check_element(db, where, rule.odst, {MatchCategory::Address,
                       MatchCategory::Interface}, &out);
        check_element(db, where, rule.osrv, {MatchCategory::Service}, &out);
        check_element(db, where, rule.when, {MatchCategory::Interval}, &out);
        check_translation_addr(db, where, rule.tsrc, &out);
        check_translation_addr(db, where, rule.tdst, &out);
        if (rule.tsrv) {
          ConstObjectPtr obj = db.find(*rule.tsrv);
          if (!obj) {
            out.push_back({Severity::Error, "dangling-ref", where,
                           "reference '" + *rule.tsrv +
                               "' does not resolve"});
          } else if (obj->kind() != ObjectKind::TcpService &&
                     obj->kind() != ObjectKind::UdpService) {
            out.push_back({Severity::Error, "nat-translation-service", where,
                           "service translation must be a single TCP or "
                           "UDP service"});
          }
        }
      }
      check_positions(fw_where + " NAT", positions, &out);
    }
  }
  return out;
}

// --- address tables -----------------------------------------------------

AddressSet load_address_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open address table file: " + path);

  std::vector<Interval> intervals;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos) continue;
    size_t end = line.find_last_not_of(" \t\r");
    std::string token = line.substr(start, end - start + 1);
    auto cidr = parse_cidr(token);
    if (!cidr) {
      throw ParseError(line_no, "bad address or CIDR '" + token + "' in " +
                                    path);
    }
    intervals.push_back({cidr->first(), cidr->last()});
  }
  return AddressSet::from_intervals(std::move(intervals));
}

void resolve_address_tables(ObjectDatabase& db, const std::string& base_dir) {
  const char* env_dir = std::getenv("FWCOMP_TABLE_DIR");
  db.for_each_object([&](FwObject& obj) {
    auto* table = dynamic_cast<AddressTableObj*>(&obj);
    if (!table || table->load_time != TableLoadTime::Compile) return;
    std::filesystem::path path(table->path);
    if (path.is_relative()) {
      path = std::filesystem::path(env_dir ? env_dir : base_dir) / path;
    }
    table->resolved = load_address_table(path.string());
  });
}

}  // namespace fwcomp
