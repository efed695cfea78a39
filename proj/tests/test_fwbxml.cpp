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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "fwcomp/fwbxml.hpp"
#include "support.hpp"

using namespace fwcomp;

namespace {

std::string wrap(const std::string& objects) {
  return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<FWObjectDatabase>\n<Library id=\"lib-t\" name=\"T\">\n" +
         objects + "\n</Library>\n</FWObjectDatabase>\n";
}

}  // namespace

TEST_CASE("parsing the paper listings") {
  ObjectDatabase db = fwtest::load_corpus("listings.fwb");

  const auto& net =
      dynamic_cast<const NetworkObj&>(db.resolve("id47505CE816470"));
  CHECK(net.name == "officeLAN");
  CHECK(net.address == 0x0a565100u);
  CHECK(net.netmask == 0xffffff00u);

  const auto& svc =
      dynamic_cast<const UdpServiceObj&>(db.resolve("id47505D0216470"));
  CHECK(svc.name == "MyServie");
  CHECK(svc.src_lo == 30);
  CHECK(svc.src_hi == 70);
  CHECK(svc.dst_lo == 90);
  CHECK(svc.dst_hi == 92);

  auto fw = db.firewall_by_name("MyFirewall");
  REQUIRE(fw);
  CHECK(fw->platform == Platform::Iptables);
  CHECK(fw->platform_text == "iptables");
  CHECK(fw->host_os == "linux24");
  REQUIRE(fw->interfaces.size() == 3);
  CHECK(fw->interfaces[0]->name == "if0");
  CHECK(!fw->interfaces[0]->dynamic);
  REQUIRE(fw->interfaces[0]->addresses.size() == 1);
  CHECK(fw->interfaces[0]->addresses[0]->address == 0xc0a80101u);
  REQUIRE(fw->interfaces[0]->phys);
  CHECK(fw->interfaces[0]->phys->mac == 0x0017f2eaee35u);
  CHECK(fw->interfaces[1]->dynamic);
  CHECK(fw->interfaces[2]->name == "l0");
  CHECK(fw->interfaces[2]->unprotected == false);

  REQUIRE(fw->policy.rules.size() == 1);
  const PolicyRule& rule = fw->policy.rules[0];
  CHECK(rule.position == 0);
  CHECK(rule.action == RuleAction::Deny);
  CHECK(rule.direction == Direction::Both);
  CHECK(!rule.disabled);
  CHECK(rule.src.refs == std::vector<std::string>{"sysid0"});
  CHECK(rule.dst.refs == std::vector<std::string>{"id47505CE816470"});
  CHECK(rule.srv.refs == std::vector<std::string>{"id47505D0216470"});
  CHECK(rule.itf.refs == std::vector<std::string>{"sysid0"});
  CHECK(rule.when.refs == std::vector<std::string>{"sysid2"});

  CHECK(validate_schema(db).empty());
}

TEST_CASE("round-trip is structurally identical") {
  for (const char* name :
       {"listings.fwb", "corpus_filter.fwb", "corpus_nat.fwb",
        "corpus_time.fwb", "corpus_dynamic.fwb", "corpus_shadow.fwb"}) {
    CAPTURE(name);
    ObjectDatabase db = fwtest::load_corpus(name);
    std::string text = serialize(db);
    ObjectDatabase again = parse(text);
    CHECK(structurally_equal(db, again));
    CHECK(serialize(again) == text);
  }
}

TEST_CASE("serialized form carries canonical attributes") {
  ObjectDatabase db = fwtest::load_corpus("listings.fwb");
  std::string text = serialize(db);
  CHECK(text.find("address=\"10.86.81.0\"") != std::string::npos);
  CHECK(text.find("netmask=\"255.255.255.0\"") != std::string::npos);
  CHECK(text.find("<FWObjectDatabase>") != std::string::npos);
  // standard library appears as a Library element
  CHECK(text.find("<Library id=\"syslib000\" name=\"Standard\">") !=
        std::string::npos);
}

TEST_CASE("empty database serializes to the standard library alone") {
  ObjectDatabase db;
  db.ensure_standard_library();
  std::string text = serialize(db);
  // one Library element wrapping the built-in networks
  size_t first = text.find("<Library");
  REQUIRE(first != std::string::npos);
  CHECK(text.find("<Library", first + 1) == std::string::npos);
  ObjectDatabase again = parse(text);
  CHECK(structurally_equal(db, again));
}

TEST_CASE("rule order comes from position attributes") {
  std::string doc = wrap(R"(
    <Network id="n1" name="n1" address="10.0.0.0" netmask="255.255.255.0"/>
    <Firewall host_OS="linux24" id="fw" name="FW" platform="iptables">
      <Interface dyn="False" id="fw-e0" name="e0" unnum="False">
        <IPv4 address="10.0.0.1" id="fw-e0-ip" name="ip" netmask="255.255.255.0"/>
      </Interface>
      <Policy id="fw-pol">
        <PolicyRule action="Accept" direction="Both" disabled="False" id="r1" position="1">
          <Src neg="False"><ObjectRef ref="n1"/></Src>
          <Dst neg="False"><ObjectRef ref="sysid0"/></Dst>
          <Srv neg="False"><ServiceRef ref="sysid1"/></Srv>
          <Itf neg="False"><ObjectRef ref="sysid0"/></Itf>
          <When neg="False"><IntervalRef ref="sysid2"/></When>
        </PolicyRule>
        <PolicyRule action="Deny" direction="Both" disabled="False" id="r0" position="0">
          <Src neg="False"><ObjectRef ref="sysid0"/></Src>
          <Dst neg="False"><ObjectRef ref="n1"/></Dst>
          <Srv neg="False"><ServiceRef ref="sysid1"/></Srv>
          <Itf neg="False"><ObjectRef ref="sysid0"/></Itf>
          <When neg="False"><IntervalRef ref="sysid2"/></When>
        </PolicyRule>
      </Policy>
    </Firewall>)");

  ObjectDatabase db = parse(doc);
  auto fw = db.firewall_by_name("FW");
  REQUIRE(fw);
  REQUIRE(fw->policy.rules.size() == 2);
  CHECK(fw->policy.rules[0].position == 0);
  CHECK(fw->policy.rules[0].action == RuleAction::Deny);
  CHECK(fw->policy.rules[1].position == 1);

  // permuting rule elements yields an identical database
  std::string swapped = doc;
  // (already permuted above: position 1 appears first in the document)
  ObjectDatabase db2 = parse(swapped);
  CHECK(structurally_equal(db, db2));
}

TEST_CASE("negation listings differ only in the neg flag") {
  auto make = [&](const std::string& neg) {
    return wrap(R"(
    <Network id="A" name="A" address="10.1.0.0" netmask="255.255.255.0"/>
    <Network id="B" name="B" address="10.2.0.0" netmask="255.255.255.0"/>
    <Firewall host_OS="linux24" id="fw" name="FW" platform="iptables">
      <Interface dyn="False" id="fw-e0" name="e0" unnum="False">
        <IPv4 address="10.0.0.1" id="fw-e0-ip" name="ip" netmask="255.255.255.0"/>
      </Interface>
      <Policy id="fw-pol">
        <PolicyRule action="Deny" direction="Both" disabled="False" id="r0" position="0">
          <Src neg="False"><ObjectRef ref="sysid0"/></Src>
          <Dst neg=")" + neg + R"("><ObjectRef ref="A"/><ObjectRef ref="B"/></Dst>
          <Srv neg="False"><ServiceRef ref="sysid1"/></Srv>
          <Itf neg="False"><ObjectRef ref="sysid0"/></Itf>
          <When neg="False"><IntervalRef ref="sysid2"/></When>
        </PolicyRule>
      </Policy>
    </Firewall>)");
  };

  ObjectDatabase plain = parse(make("False"));
  ObjectDatabase negated = parse(make("True"));
  const PolicyRule& p = plain.firewall_by_name("FW")->policy.rules[0];
  const PolicyRule& n = negated.firewall_by_name("FW")->policy.rules[0];
  CHECK(p.dst.refs == n.dst.refs);
  CHECK(!p.dst.negated);
  CHECK(n.dst.negated);
  PolicyRule flipped = n;
  flipped.dst.negated = false;
  CHECK(flipped.dst == p.dst);
}

TEST_CASE("parse errors") {
  // malformed XML
  CHECK_THROWS_AS(parse("<FWObjectDatabase><Library"), XmlError);
  // unknown element
  CHECK_THROWS_AS(parse(wrap("<Banana id=\"b\" name=\"b\"/>")), SchemaError);
  // missing required attribute
  CHECK_THROWS_AS(
      parse(wrap("<Network id=\"n\" name=\"n\" address=\"10.0.0.0\"/>")),
      SchemaError);
  // duplicate id
  CHECK_THROWS_AS(
      parse(wrap(
          "<Network id=\"n\" name=\"a\" address=\"10.0.0.0\" "
          "netmask=\"255.0.0.0\"/>"
          "<Network id=\"n\" name=\"b\" address=\"10.0.0.0\" "
          "netmask=\"255.0.0.0\"/>")),
      DuplicateIdError);
  // non-contiguous netmask is rejected at load
  CHECK_THROWS_AS(
      parse(wrap("<Network id=\"n\" name=\"n\" address=\"10.0.0.0\" "
                 "netmask=\"255.0.255.0\"/>")),
      SchemaError);
  // dangling reference
  CHECK_THROWS_AS(
      parse(wrap("<Group id=\"g\" name=\"g\"><ObjectRef ref=\"ghost\"/>"
                 "</Group>")),
      DanglingRefError);
  // bad boolean
  CHECK_THROWS_AS(
      parse(wrap("<Group id=\"g\" name=\"g\"/>"
                 "<Firewall host_OS=\"\" id=\"f\" name=\"f\" "
                 "platform=\"iptables\">"
                 "<Interface dyn=\"Maybe\" id=\"i\" name=\"e0\" "
                 "unnum=\"False\"/></Firewall>")),
      SchemaError);
  // redefining a reserved id
  CHECK_THROWS_AS(
      parse(wrap("<Network id=\"sysid0\" name=\"x\" address=\"0.0.0.0\" "
                 "netmask=\"0.0.0.0\"/>")),
      DuplicateIdError);
}

TEST_CASE("unknown attributes warn, unknown elements fail") {
  std::vector<Diagnostic> warnings;
  parse(wrap("<Network id=\"n\" name=\"n\" address=\"10.0.0.0\" "
             "netmask=\"255.0.0.0\" sparkle=\"yes\"/>"),
        &warnings);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].severity == Severity::Warning);
  CHECK(warnings[0].code == "unknown-attribute");
}

TEST_CASE("validate_schema diagnostics") {
  // heterogeneous group
  {
    ObjectDatabase db = parse(wrap(
        "<Network id=\"n\" name=\"n\" address=\"10.0.0.0\" "
        "netmask=\"255.0.0.0\"/>"
        "<UDPService id=\"u\" name=\"u\" src_range_start=\"0\" "
        "src_range_end=\"65535\" dst_range_start=\"53\" "
        "dst_range_end=\"53\"/>"
        "<Group id=\"g\" name=\"g\"><ObjectRef ref=\"n\"/>"
        "<ObjectRef ref=\"u\"/></Group>"));
    auto diagnostics = validate_schema(db);
    REQUIRE(diagnostics.size() == 1);
    CHECK(diagnostics[0].code == "group-heterogeneous");
    CHECK(diagnostics[0].severity == Severity::Error);
  }

  // duplicate positions
  {
    std::string doc = wrap(R"(
    <Firewall host_OS="linux24" id="fw" name="FW" platform="iptables">
      <Interface dyn="False" id="fw-e0" name="e0" unnum="False">
        <IPv4 address="10.0.0.1" id="fw-e0-ip" name="ip" netmask="255.255.255.0"/>
      </Interface>
      <Policy id="fw-pol">
        <PolicyRule action="Accept" direction="Both" disabled="False" id="r0" position="0">
          <Src neg="False"><ObjectRef ref="sysid0"/></Src>
          <Dst neg="False"><ObjectRef ref="sysid0"/></Dst>
          <Srv neg="False"><ServiceRef ref="sysid1"/></Srv>
          <Itf neg="False"><ObjectRef ref="sysid0"/></Itf>
          <When neg="False"><IntervalRef ref="sysid2"/></When>
        </PolicyRule>
        <PolicyRule action="Deny" direction="Both" disabled="False" id="r1" position="0">
          <Src neg="False"><ObjectRef ref="sysid0"/></Src>
          <Dst neg="False"><ObjectRef ref="sysid0"/></Dst>
          <Srv neg="False"><ServiceRef ref="sysid1"/></Srv>
          <Itf neg="False"><ObjectRef ref="sysid0"/></Itf>
          <When neg="False"><IntervalRef ref="sysid2"/></When>
        </PolicyRule>
      </Policy>
    </Firewall>)");
    ObjectDatabase db = parse(doc);
    auto diagnostics = validate_schema(db);
    bool found = false;
    for (const auto& d : diagnostics) found |= d.code == "duplicate-position";
    CHECK(found);
  }

  // unsupported platform
  {
    std::string doc = wrap(R"(
    <Firewall host_OS="ios" id="fw" name="FW" platform="pix">
      <Interface dyn="False" id="fw-e0" name="e0" unnum="False">
        <IPv4 address="10.0.0.1" id="fw-e0-ip" name="ip" netmask="255.255.255.0"/>
      </Interface>
      <Policy id="fw-pol"/>
    </Firewall>)");
    ObjectDatabase db = parse(doc);
    auto diagnostics = validate_schema(db);
    REQUIRE(diagnostics.size() == 1);
    CHECK(diagnostics[0].code == "platform-unsupported");
  }

  // corpus files are clean
  for (const char* name :
       {"listings.fwb", "corpus_filter.fwb", "corpus_nat.fwb",
        "corpus_time.fwb", "corpus_dynamic.fwb", "corpus_shadow.fwb"}) {
    CAPTURE(name);
    ObjectDatabase db = fwtest::load_corpus(name);
    CHECK(!has_errors(validate_schema(db)));
  }
}

TEST_CASE("address table files") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "fwcomp-table-test";
  fs::create_directories(dir);

  auto write = [&](const char* name, const char* content) {
    std::ofstream out(dir / name);
    out << content;
    return (dir / name).string();
  };

  std::string good = write("good.txt", "1.2.3.4\n10.0.0.0/30\n");
  AddressSet set = load_address_table(good);
  CHECK(set.contains(0x01020304u));
  CHECK(set.contains(0x0a000000u));
  CHECK(set.contains(0x0a000003u));
  CHECK(set.size() == 5);

  std::string comments = write("comments.txt", "# comment only\n\n");
  CHECK(load_address_table(comments).empty());

  std::string bad = write("bad.txt", "1.2.3.999\n");
  CHECK_THROWS_AS(load_address_table(bad), ParseError);
  CHECK_THROWS_AS(load_address_table((dir / "missing.txt").string()),
                  IoError);

  // resolve_address_tables honors FWCOMP_TABLE_DIR
  fwtest::DbBuilder builder;
  auto table = std::make_shared<AddressTableObj>();
  table->id = "tbl";
  table->name = "tbl";
  table->path = "good.txt";
  builder.add(table);
  ObjectDatabase db = builder.build();
  setenv("FWCOMP_TABLE_DIR", dir.string().c_str(), 1);
  resolve_address_tables(db, "/nonexistent");
  unsetenv("FWCOMP_TABLE_DIR");
  CHECK(address_set_of(db.resolve("tbl"), db).size() == 5);
}
