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
//
// Shared helpers for the test suites: corpus loading, in-memory
// database builders, a seeded random-policy generator and sampled
// packet universes aligned with the generator's address grid.

#ifndef FWCOMP_TESTS_SUPPORT_HPP_
#define FWCOMP_TESTS_SUPPORT_HPP_

#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "fwcomp/analysis.hpp"
#include "fwcomp/fwbxml.hpp"
#include "fwcomp/semantics.hpp"

namespace fwtest {

inline std::string corpus_path(const std::string& name) {
  return std::string(FWCOMP_CORPUS_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

inline fwcomp::ObjectDatabase load_corpus(const std::string& name) {
  fwcomp::ObjectDatabase db = fwcomp::parse(read_file(corpus_path(name)));
  fwcomp::resolve_address_tables(db, FWCOMP_CORPUS_DIR);
  return db;
}

// --- in-memory database builder -------------------------------------------

class DbBuilder {
 public:
  DbBuilder() {
    db_.ensure_standard_library();
    lib_.id = "lib-test";
    lib_.name = "Test";
  }

  std::string network(const std::string& id, uint32_t addr, int prefix) {
    auto obj = std::make_shared<fwcomp::NetworkObj>();
    obj->id = id;
    obj->name = id;
    obj->netmask = fwcomp::prefix_to_mask(prefix);
    obj->address = addr & obj->netmask;
    lib_.objects.push_back(std::move(obj));
    return id;
  }

  std::string range(const std::string& id, uint32_t first, uint32_t last) {
    auto obj = std::make_shared<fwcomp::AddressRangeObj>();
    obj->id = id;
    obj->name = id;
    obj->first = first;
    obj->last = last;
    lib_.objects.push_back(std::move(obj));
    return id;
  }

  std::string tcp(const std::string& id, uint16_t dport) {
    auto obj = std::make_shared<fwcomp::TcpServiceObj>();
    obj->id = id;
    obj->name = id;
    obj->dst_lo = obj->dst_hi = dport;
    lib_.objects.push_back(std::move(obj));
    return id;
  }

  std::string udp(const std::string& id, uint16_t dport) {
    auto obj = std::make_shared<fwcomp::UdpServiceObj>();
    obj->id = id;
    obj->name = id;
    obj->dst_lo = obj->dst_hi = dport;
    lib_.objects.push_back(std::move(obj));
    return id;
  }

  std::string group(const std::string& id,
                    std::vector<std::string> members) {
    auto obj = std::make_shared<fwcomp::GroupObj>();
    obj->id = id;
    obj->name = id;
    obj->member_refs = std::move(members);
    lib_.objects.push_back(std::move(obj));
    return id;
  }

  void add(fwcomp::ObjectPtr obj) { lib_.objects.push_back(std::move(obj)); }

  // Two-interface firewall wrapping the policy under test.
  std::shared_ptr<fwcomp::FirewallObj> firewall(fwcomp::Policy policy,
                                                std::vector<fwcomp::NatRule>
                                                    nat = {}) {
    auto fw = std::make_shared<fwcomp::FirewallObj>();
    fw->id = "fw-test";
    fw->name = "TestFW";
    fw->platform_text = "iptables";
    fw->platform = fwcomp::Platform::Iptables;
    fw->host_os = "linux24";
    fw->policy_id = "fw-test-policy";
    fw->policy = std::move(policy);
    fw->nat = std::move(nat);
    int n = 0;
    for (const char* name : {"if0", "if1"}) {
      auto iface = std::make_shared<fwcomp::InterfaceObj>();
      iface->id = std::string("fw-test-") + name;
      iface->name = name;
      auto ip = std::make_shared<fwcomp::Ipv4Obj>();
      ip->id = iface->id + "-ip";
      ip->name = iface->id + ":ip";
      ip->address = 0x0a080000u + uint32_t(n == 0 ? 0x3fe : 0x3ff);
      iface->addresses.push_back(std::move(ip));
      fw->interfaces.push_back(std::move(iface));
      ++n;
    }
    firewall_ = fw;
    lib_.objects.push_back(fw);
    return fw;
  }

  fwcomp::ObjectDatabase build() {
    db_.add_library(std::move(lib_));
    return std::move(db_);
  }

 private:
  fwcomp::ObjectDatabase db_;
  fwcomp::Library lib_;
  std::shared_ptr<fwcomp::FirewallObj> firewall_;
};

inline fwcomp::MatchElement any_addr() { return {{"sysid0"}, false}; }
inline fwcomp::MatchElement any_srv() { return {{"sysid1"}, false}; }
inline fwcomp::MatchElement any_when() { return {{"sysid2"}, false}; }

inline fwcomp::PolicyRule rule(int position, fwcomp::RuleAction action,
                               fwcomp::Direction dir,
                               fwcomp::MatchElement src,
                               fwcomp::MatchElement dst,
                               fwcomp::MatchElement srv) {
  fwcomp::PolicyRule r;
  r.id = "r" + std::to_string(position);
  r.position = position;
  r.action = action;
  r.direction = dir;
  r.src = std::move(src);
  r.dst = std::move(dst);
  r.srv = std::move(srv);
  r.itf = any_addr();
  r.when = any_when();
  return r;
}

inline fwcomp::Packet packet(uint32_t src, uint32_t dst, fwcomp::Proto proto,
                             uint16_t sport, uint16_t dport,
                             const std::string& iface = "if0",
                             fwcomp::Direction dir =
                                 fwcomp::Direction::Inbound) {
  fwcomp::Packet p;
  p.src_ip = src;
  p.dst_ip = dst;
  p.proto = proto;
  p.src_port = sport;
  p.dst_port = dport;
  if (proto == fwcomp::Proto::Tcp) p.tcp_flags = fwcomp::kTcpSyn;
  p.interface = iface;
  p.direction = dir;
  return p;
}

// --- random policies --------------------------------------------------------

// Networks aligned to /26 within 10.8.0.0/22 plus single ports from a
// fixed pool, so a one-address-per-/26 sample is exhaustive over the
// generator's distinguishable regions.
struct RandomPolicyContext {
  fwcomp::ObjectDatabase db;
  std::shared_ptr<fwcomp::FirewallObj> firewall;
  std::vector<std::string> network_ids;
  std::vector<std::string> group_ids;
  std::vector<std::string> service_ids;

  static constexpr uint32_t kBase = 0x0a080000u;  // 10.8.0.0/22
  static constexpr uint16_t kPorts[8] = {25,  53,  80,  110,
                                         143, 443, 8080, 9999};
};

inline RandomPolicyContext make_random_policy_context() {
  RandomPolicyContext ctx;
  DbBuilder builder;
  // /24, /25 and /26 blocks across the /22
  for (int prefix : {24, 25, 26}) {
    uint32_t step = 1u << (32 - prefix);
    for (uint32_t base = 0; base < (1u << 10); base += step) {
      std::string id = "net-" + std::to_string(prefix) + "-" +
                       std::to_string(base >> 6);
      ctx.network_ids.push_back(
          builder.network(id, RandomPolicyContext::kBase + base, prefix));
    }
  }
  ctx.group_ids.push_back(
      builder.group("grp-a", {ctx.network_ids[0], ctx.network_ids[2]}));
  ctx.group_ids.push_back(
      builder.group("grp-b", {ctx.network_ids[5], ctx.network_ids[1]}));
  for (uint16_t port : RandomPolicyContext::kPorts) {
    ctx.service_ids.push_back(
        builder.tcp("tcp-" + std::to_string(port), port));
    ctx.service_ids.push_back(
        builder.udp("udp-" + std::to_string(port), port));
  }
  ctx.firewall = builder.firewall(fwcomp::Policy{});
  ctx.db = builder.build();
  return ctx;
}

inline fwcomp::Policy random_policy(const RandomPolicyContext& ctx,
                                    std::mt19937& rng, int min_rules = 5,
                                    int max_rules = 10) {
  std::uniform_int_distribution<int> n_rules(min_rules, max_rules);
  std::uniform_int_distribution<int> percent(0, 99);
  auto pick = [&](const std::vector<std::string>& pool) {
    std::uniform_int_distribution<size_t> d(0, pool.size() - 1);
    return pool[d(rng)];
  };

  fwcomp::Policy policy;
  int count = n_rules(rng);
  for (int i = 0; i < count; ++i) {
    fwcomp::PolicyRule r;
    r.id = "rand-" + std::to_string(i);
    r.position = i;
    int a = percent(rng);
    r.action = a < 40   ? fwcomp::RuleAction::Accept
               : a < 75 ? fwcomp::RuleAction::Deny
               : a < 90 ? fwcomp::RuleAction::Reject
                        : fwcomp::RuleAction::Accounting;
    int d = percent(rng);
    r.direction = d < 40   ? fwcomp::Direction::Inbound
                  : d < 70 ? fwcomp::Direction::Outbound
                           : fwcomp::Direction::Both;
    r.disabled = percent(rng) < 5;

    auto addr_element = [&]() {
      fwcomp::MatchElement e;
      int c = percent(rng);
      if (c < 30) {
        e.refs = {"sysid0"};
      } else if (c < 65) {
        e.refs = {pick(ctx.network_ids)};
      } else if (c < 80) {
        e.refs = {pick(ctx.group_ids)};
      } else if (c < 92) {
        e.refs = {pick(ctx.network_ids)};
        e.negated = true;
      } else {
        e.refs = {pick(ctx.network_ids), pick(ctx.network_ids)};
      }
      return e;
    };
    r.src = addr_element();
    r.dst = addr_element();

    int s = percent(rng);
    if (s < 30) {
      r.srv = any_srv();
    } else {
      r.srv.refs = {pick(ctx.service_ids)};
      if (s >= 90) r.srv.refs.push_back(pick(ctx.service_ids));
    }
    int itf = percent(rng);
    if (itf < 60) {
      r.itf = any_addr();
    } else {
      r.itf.refs = {itf < 80 ? "fw-test-if0" : "fw-test-if1"};
    }
    r.when = any_when();
    policy.rules.push_back(std::move(r));
  }
  return policy;
}

// One sample per /26 plus an outside address; ports from the pool plus
// an unused one. Exhaustive over the generator's equivalence classes.
inline fwcomp::Universe random_policy_universe() {
  fwcomp::Universe u;
  for (uint32_t i = 0; i < 16; ++i) {
    u.srcs.push_back(RandomPolicyContext::kBase + i * 64 + 1);
  }
  u.srcs.push_back(0xac100009u);  // outside the /22
  u.dsts = u.srcs;
  u.sports = {1024};
  u.dports.assign(std::begin(RandomPolicyContext::kPorts),
                  std::end(RandomPolicyContext::kPorts));
  u.dports.push_back(12345);
  u.protos = {fwcomp::Proto::Tcp, fwcomp::Proto::Udp};
  u.ifaces = {"if0", "if1"};
  return u;
}

}  // namespace fwtest

#endif  // FWCOMP_TESTS_SUPPORT_HPP_
