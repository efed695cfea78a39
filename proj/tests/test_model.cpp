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

#include "fwcomp/model.hpp"
#include "support.hpp"

using namespace fwcomp;

TEST_CASE("resolve finds objects and reserved ids") {
  ObjectDatabase db = fwtest::load_corpus("listings.fwb");

  const FwObject& net = db.resolve("id47505CE816470");
  CHECK(net.kind() == ObjectKind::Network);
  CHECK(net.name == "officeLAN");

  CHECK(db.resolve(kAnyAddressId).kind() == ObjectKind::AnyAddress);
  CHECK_THROWS_AS(db.resolve("nosuch"), UnknownIdError);

  // reserved ids resolve in an empty database too
  ObjectDatabase empty;
  empty.ensure_standard_library();
  CHECK(empty.resolve("sysid0").kind() == ObjectKind::AnyAddress);
  CHECK(empty.resolve("sysid1").kind() == ObjectKind::AnyService);
  CHECK(empty.resolve("sysid2").kind() == ObjectKind::AnyInterval);
  // the standard library carries the RFC 1918 networks
  AddressSet net10 = address_set_of(empty.resolve("syslib-net-10"), empty);
  CHECK(net10.contains(0x0a000001u));
  CHECK(!net10.contains(0x0b000000u));
}

TEST_CASE("address sets of the basic object kinds") {
  ObjectDatabase db = fwtest::load_corpus("listings.fwb");

  AddressSet lan = address_set_of(db.resolve("id47505CE816470"), db);
  CHECK(lan.intervals() ==
        std::vector<Interval>{{0x0a565100u, 0x0a5651ffu}});

  CHECK(address_set_of(db.resolve("sysid0"), db).is_universe());

  // firewall address = union of static interface addresses
  AddressSet fw_addrs = address_set_of(db.resolve("id47505D0516470"), db);
  CHECK(fw_addrs.contains(0xc0a80101u));  // 192.168.1.1
  CHECK(fw_addrs.contains(0x7f000001u));  // 127.0.0.1
  CHECK(fw_addrs.size() == 2);

  // interface address objects match the single host address
  AddressSet if0_ip = address_set_of(db.resolve("id47505D0C16470"), db);
  CHECK(if0_ip.size() == 1);
  CHECK(if0_ip.contains(0xc0a80101u));

  // dynamic interfaces are opaque
  CHECK_THROWS_AS(address_set_of(db.resolve("id47505D0D16470"), db),
                  OpaqueSetError);
}

TEST_CASE("netmask canonicalization") {
  fwtest::DbBuilder builder;
  builder.network("net-offbase", 0x01020304u, 16);  // 1.2.3.4/16
  ObjectDatabase db = builder.build();
  AddressSet set = address_set_of(db.resolve("net-offbase"), db);
  CHECK(set.intervals() ==
        std::vector<Interval>{{0x01020000u, 0x0102ffffu}});
}

TEST_CASE("groups union their members and coalesce") {
  fwtest::DbBuilder builder;
  builder.network("net-a", 0x0a000000u, 31);  // 10.0.0.0/31
  builder.network("net-b", 0x0a000002u, 31);  // 10.0.0.2/31
  builder.group("grp", {"net-a", "net-b"});
  ObjectDatabase db = builder.build();

  AddressSet set = address_set_of(db.resolve("grp"), db);
  CHECK(set.intervals() ==
        std::vector<Interval>{{0x0a000000u, 0x0a000003u}});

  // monotone: the group equals the union of its members
  AddressSet a = address_set_of(db.resolve("net-a"), db);
  AddressSet b = address_set_of(db.resolve("net-b"), db);
  CHECK(set == a.unite(b));
}

TEST_CASE("group cycles are rejected") {
  fwtest::DbBuilder builder;
  builder.group("grp-x", {"grp-y"});
  builder.group("grp-y", {"grp-x"});
  ObjectDatabase db = builder.build();
  CHECK_THROWS_AS(address_set_of(db.resolve("grp-x"), db),
                  CyclicGroupError);
}

TEST_CASE("hosts without static addresses are opaque") {
  auto host = std::make_shared<HostObj>();
  host->id = "host-dyn";
  host->name = "host-dyn";
  auto iface = std::make_shared<InterfaceObj>();
  iface->id = "host-dyn-e0";
  iface->name = "e0";
  iface->dynamic = true;
  host->interfaces.push_back(std::move(iface));

  fwtest::DbBuilder builder;
  builder.add(std::move(host));
  ObjectDatabase db = builder.build();
  CHECK_THROWS_AS(address_set_of(db.resolve("host-dyn"), db),
                  OpaqueSetError);
}

TEST_CASE("service sets of service objects") {
  ObjectDatabase db = fwtest::load_corpus("listings.fwb");

  // Listing 2: UDP src 30-70, dst 90-92
  ServiceSet svc = service_set_of(db.resolve("id47505D0216470"), db);
  CHECK(svc == ServiceSet::udp(30, 70, 90, 92));
  CHECK(svc.contains({Proto::Udp, 0, 50, 91, 0, 0, 0}));
  CHECK(!svc.contains({Proto::Udp, 0, 50, 89, 0, 0, 0}));

  CHECK(service_set_of(db.resolve("sysid1"), db).is_universe());
}

TEST_CASE("service groups coalesce duplicates") {
  fwtest::DbBuilder builder;
  builder.tcp("tcp-80a", 80);
  builder.tcp("tcp-80b", 80);
  builder.group("grp-svc", {"tcp-80a", "tcp-80b"});
  ObjectDatabase db = builder.build();

  ServiceSet set = service_set_of(db.resolve("grp-svc"), db);
  CHECK(set == ServiceSet::tcp(0, 65535, 80, 80));
}

TEST_CASE("heterogeneous groups have no category") {
  fwtest::DbBuilder builder;
  builder.network("net-x", 0x0a000000u, 24);
  builder.udp("udp-53", 53);
  builder.group("grp-mixed", {"net-x", "udp-53"});
  ObjectDatabase db = builder.build();
  CHECK(!match_category(db.resolve("grp-mixed"), db).has_value());
  CHECK(match_category(db.resolve("net-x"), db) == MatchCategory::Address);
}

TEST_CASE("address table objects") {
  ObjectDatabase db = fwtest::load_corpus("corpus_filter.fwb");
  AddressSet black = address_set_of(db.resolve("table-black"), db);
  CHECK(black.contains(0xc6120001u));  // 198.18.0.1
  CHECK(black.contains(0xc6120003u));  // within 198.18.0.0/30
  CHECK(black.contains(0xcb007107u));  // 203.0.113.7
  CHECK(!black.contains(0xc6120004u));

  // deploy-time tables stay opaque
  auto table = std::make_shared<AddressTableObj>();
  table->id = "tbl-deploy";
  table->name = "tbl-deploy";
  table->path = "unused.txt";
  table->load_time = TableLoadTime::Deploy;
  fwtest::DbBuilder builder;
  builder.add(std::move(table));
  ObjectDatabase db2 = builder.build();
  CHECK_THROWS_AS(address_set_of(db2.resolve("tbl-deploy"), db2),
                  OpaqueSetError);
}

TEST_CASE("mac sets") {
  MacSet set = MacSet::of({1, 5, 9});
  CHECK(set.matches(uint64_t{5}));
  CHECK(!set.matches(uint64_t{6}));
  CHECK(!set.matches(std::nullopt));

  MacSet inv = set.complement();
  CHECK(!inv.matches(uint64_t{5}));
  CHECK(inv.matches(uint64_t{6}));
  CHECK(inv.matches(std::nullopt));  // no MAC is "not in the set"

  CHECK(MacSet::of({1}).subset_of(set));
  CHECK(!set.subset_of(MacSet::of({1})));
  CHECK(set.subset_of(MacSet::universe()));
  CHECK(MacSet::of({2}).subset_of(set.complement()));
  CHECK(!MacSet::of({5}).subset_of(set.complement()));
  CHECK(set.complement().subset_of(MacSet::of({1}).complement()));
  CHECK(!set.complement().subset_of(set));
}

TEST_CASE("element layers split IP and MAC references") {
  ObjectDatabase db = fwtest::load_corpus("listings.fwb");

  MatchElement mixed;
  mixed.refs = {"id47505CE816470", "id47505D3816470"};  // net + mac
  ElementLayers layers = element_layers(mixed, db);
  CHECK(layers.has_ip_refs);
  CHECK(layers.has_mac_refs);
  CHECK(layers.ips.contains(0x0a565101u));
  REQUIRE(layers.macs.size() == 1);
  CHECK(layers.macs[0] == 0x0017f2eaee35u);

  auto names = element_interfaces({{"id47505D0B16470"}, false}, db);
  REQUIRE(names.has_value());
  CHECK(*names == std::vector<std::string>{"if0"});
  CHECK(!element_interfaces({{"sysid0"}, false}, db).has_value());
}
