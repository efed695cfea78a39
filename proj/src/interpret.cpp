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
#include <charconv>
#include <map>
#include <sstream>

#include "fwcomp/backends.hpp"

namespace fwcomp {

namespace {

struct AddrSpec {
  enum class Kind { Any, Cidr, Range, DynByName, DynOwnIface, Table };
  Kind kind = Kind::Any;
  bool negated = false;  // Cidr and Table
  Cidr cidr;
  uint32_t range_lo = 0, range_hi = 0;
  std::string dyn_iface;
  std::string table;
};

struct PortSpec {
  uint16_t lo = 0, hi = 65535;
  bool constrained() const { return lo != 0 || hi != 65535; }
};

struct LineRule {
  enum class Op { Pass, Block, Reject, Count, Snat, Dnat };
  Op op = Op::Block;
  bool quick = false;
  std::optional<Direction> dir;
  std::string iface;  // empty or "+" = any
  std::optional<Proto> proto;
  uint8_t proto_number = 0;
  AddrSpec src, dst;
  PortSpec sport, dport;
  std::optional<uint8_t> icmp_type, icmp_code;
  uint8_t flags_mask = 0, flags_set = 0;
  std::optional<uint64_t> mac;
  std::optional<TimeSet> when;
  std::optional<uint32_t> to_addr;
  std::optional<uint16_t> to_port;
  int line_no = 0;
};

}  // namespace

struct CompiledScript::Impl {
  Platform target = Platform::Iptables;
  std::map<std::string, std::vector<Cidr>> tables;
  std::vector<LineRule> nat;     // pf/ipfilter: one ordered list
  std::vector<LineRule> dnat;    // iptables PREROUTING
  std::vector<LineRule> filter;  // FORWARD or pf/ipf body
  std::vector<LineRule> snat;    // iptables POSTROUTING
  VerdictAction forward_policy = VerdictAction::DefaultDrop;
};

namespace {

[[noreturn]] void fail(int line_no, const std::string& msg) {
  throw UnparseableScriptError(line_no, msg);
}

class Tokens {
 public:
  Tokens(const std::string& line, int line_no) : line_no_(line_no) {
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) tokens_.push_back(tok);
  }

  bool done() const { return pos_ >= tokens_.size(); }
  const std::string& peek() const {
    if (done()) fail(line_no_, "unexpected end of line");
    return tokens_[pos_];
  }
  std::string take() {
    std::string t = peek();
    ++pos_;
    return t;
  }
  bool take_if(const std::string& expected) {
    if (!done() && peek() == expected) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(const std::string& expected) {
    if (take() != expected) {
      fail(line_no_, "expected '" + expected + "'");
    }
  }
  int line_no() const { return line_no_; }

 private:
  std::vector<std::string> tokens_;
  size_t pos_ = 0;
  int line_no_;
};

uint16_t parse_port_token(Tokens& toks, const std::string& text) {
  unsigned value = 0;
  auto [next, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || next != text.data() + text.size() ||
      value > 65535) {
    fail(toks.line_no(), "bad port '" + text + "'");
  }
  return uint16_t(value);
}

std::optional<Proto> parse_proto_token(Tokens& toks, const std::string& text,
                                       uint8_t* number) {
  if (text == "tcp") return Proto::Tcp;
  if (text == "udp") return Proto::Udp;
  if (text == "icmp") return Proto::Icmp;
  unsigned value = 0;
  auto [next, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || next != text.data() + text.size() || value > 255) {
    fail(toks.line_no(), "bad protocol '" + text + "'");
  }
  *number = uint8_t(value);
  if (value == 6) return Proto::Tcp;
  if (value == 17) return Proto::Udp;
  if (value == 1) return Proto::Icmp;
  return Proto::Other;
}

Cidr parse_cidr_token(Tokens& toks, const std::string& text) {
  auto cidr = parse_cidr(text);
  if (!cidr) fail(toks.line_no(), "bad address '" + text + "'");
  return *cidr;
}

uint8_t parse_flag_letters(Tokens& toks, const std::string& text) {
  uint8_t bits = 0;
  for (char c : text) {
    switch (c) {
      case 'F': bits |= kTcpFin; break;
      case 'S': bits |= kTcpSyn; break;
      case 'R': bits |= kTcpRst; break;
      case 'P': bits |= kTcpPsh; break;
      case 'A': bits |= kTcpAck; break;
      case 'U': bits |= kTcpUrg; break;
      default:
        fail(toks.line_no(), "bad flag letter in '" + text + "'");
    }
  }
  return bits;
}

// --- iptables parsing -----------------------------------------------------

uint8_t parse_iptables_flag_names(Tokens& toks, const std::string& text) {
  if (text == "NONE") return 0;
  uint8_t bits = 0;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    std::string_view name = std::string_view(text).substr(pos, comma - pos);
    if (name == "FIN") {
      bits |= kTcpFin;
    } else if (name == "SYN") {
      bits |= kTcpSyn;
    } else if (name == "RST") {
      bits |= kTcpRst;
    } else if (name == "PSH") {
      bits |= kTcpPsh;
    } else if (name == "ACK") {
      bits |= kTcpAck;
    } else if (name == "URG") {
      bits |= kTcpUrg;
    } else {
      fail(toks.line_no(), "bad flag name '" + std::string(name) + "'");
    }
    pos = comma + 1;
  }
  return bits;
}

void parse_iptables_port_range(Tokens& toks, PortSpec* spec) {
  std::string text = toks.take();
  auto colon = text.find(':');
  if (colon == std::string::npos) {
    spec->lo = spec->hi = parse_port_token(toks, text);
  } else {
    spec->lo = parse_port_token(toks, text.substr(0, colon));
    spec->hi = parse_port_token(toks, text.substr(colon + 1));
  }
}

void parse_iptables_addr(Tokens& toks, AddrSpec* spec) {
  spec->kind = AddrSpec::Kind::Cidr;
  std::string text = toks.take();
  if (text == "!") {
    spec->negated = true;
    text = toks.take();
  }
  spec->cidr = parse_cidr_token(toks, text);
}

void parse_iptables_time(Tokens& toks, LineRule* rule) {
  TimeAtom atom;
  for (;;) {
    if (toks.take_if("--timestart")) {
      auto m = parse_minute_of_day(toks.peek());
      if (!m) fail(toks.line_no(), "bad --timestart");
      atom.daily_start = *m;
      toks.take();
    } else if (toks.take_if("--timestop")) {
      auto m = parse_minute_of_day(toks.peek());
      if (!m) fail(toks.line_no(), "bad --timestop");
      atom.daily_end = *m;
      toks.take();
    } else if (toks.take_if("--weekdays")) {
      auto days = parse_weekdays(toks.peek());
      if (!days) fail(toks.line_no(), "bad --weekdays");
      atom.weekdays = *days;
      toks.take();
    } else if (toks.take_if("--datestart")) {
      auto t = parse_datetime(toks.peek());
      if (!t) fail(toks.line_no(), "bad --datestart");
      atom.abs_start = *t;
      toks.take();
    } else if (toks.take_if("--datestop")) {
      auto t = parse_datetime(toks.peek());
      if (!t) fail(toks.line_no(), "bad --datestop");
      atom.abs_end = *t;
      toks.take();
    } else {
      break;
    }
  }
  rule->when = TimeSet::from_atom(atom);
}

// One "iptables ..." line appended to a chain.
void parse_iptables_line(Tokens& toks, CompiledScript::Impl* impl) {
  toks.expect("iptables");

  if (toks.take_if("-P")) {
    std::string chain = toks.take();
    std::string target = toks.take();
    if (!toks.done()) fail(toks.line_no(), "trailing tokens after -P");
    if (chain == "FORWARD") {
      impl->forward_policy = target == "ACCEPT" ? VerdictAction::Accept
                                                : VerdictAction::DefaultDrop;
    }
    return;
  }

  bool nat_table = false;
  if (toks.take_if("-t")) {
    toks.expect("nat");
    nat_table = true;
  }
  toks.expect("-A");
  std::string chain = toks.take();

  LineRule rule;
  rule.line_no = toks.line_no();
  rule.op = LineRule::Op::Count;  // no -j

  while (!toks.done()) {
    std::string flag = toks.take();
    if (flag == "-i" || flag == "-o") {
      rule.dir = flag == "-i" ? Direction::Inbound : Direction::Outbound;
      rule.iface = toks.take();
      if (rule.iface == "+") rule.iface.clear();
    } else if (flag == "-p") {
      rule.proto = parse_proto_token(toks, toks.take(), &rule.proto_number);
    } else if (flag == "-s") {
      parse_iptables_addr(toks, &rule.src);
    } else if (flag == "-d") {
      parse_iptables_addr(toks, &rule.dst);
    } else if (flag == "-m") {
      std::string module = toks.take();
      if (module == "iprange") {
        std::string which = toks.take();
        std::string text = toks.take();
        auto dash = text.find('-');
        if (dash == std::string::npos) {
          fail(toks.line_no(), "bad iprange '" + text + "'");
        }
        auto lo = parse_ipv4(text.substr(0, dash));
        auto hi = parse_ipv4(text.substr(dash + 1));
        if (!lo || !hi) fail(toks.line_no(), "bad iprange '" + text + "'");
        AddrSpec* spec = nullptr;
        if (which == "--src-range") {
          spec = &rule.src;
        } else if (which == "--dst-range") {
          spec = &rule.dst;
        } else {
          fail(toks.line_no(), "unknown iprange option " + which);
        }
        spec->kind = AddrSpec::Kind::Range;
        spec->range_lo = *lo;
        spec->range_hi = *hi;
      } else if (module == "mac") {
        toks.expect("--mac-source");
        auto mac = parse_mac(toks.take());
        if (!mac) fail(toks.line_no(), "bad MAC");
        rule.mac = *mac;
      } else if (module == "time") {
        parse_iptables_time(toks, &rule);
      } else {
        fail(toks.line_no(), "unknown match module " + module);
      }
    } else if (flag == "--sport") {
      parse_iptables_port_range(toks, &rule.sport);
    } else if (flag == "--dport") {
      parse_iptables_port_range(toks, &rule.dport);
    } else if (flag == "--icmp-type") {
      std::string text = toks.take();
      auto slash = text.find('/');
      std::string type_text = text.substr(0, slash);
      rule.icmp_type = uint8_t(parse_port_token(toks, type_text));
      if (slash != std::string::npos) {
        rule.icmp_code = uint8_t(parse_port_token(toks, text.substr(slash + 1)));
      }
    } else if (flag == "--tcp-flags") {
      rule.flags_mask = parse_iptables_flag_names(toks, toks.take());
      rule.flags_set = parse_iptables_flag_names(toks, toks.take());
    } else if (flag == "-j") {
      std::string target = toks.take();
      if (target == "ACCEPT") {
        rule.op = LineRule::Op::Pass;
      } else if (target == "DROP") {
        rule.op = LineRule::Op::Block;
      } else if (target == "REJECT") {
        rule.op = LineRule::Op::Reject;
      } else if (target == "DNAT") {
        toks.expect("--to-destination");
        std::string text = toks.take();
        auto colon = text.find(':');
        auto addr = parse_ipv4(text.substr(0, colon));
        if (!addr) fail(toks.line_no(), "bad DNAT target");
        rule.op = LineRule::Op::Dnat;
        rule.to_addr = *addr;
        if (colon != std::string::npos) {
          rule.to_port = parse_port_token(toks, text.substr(colon + 1));
        }
      } else if (target == "SNAT") {
        toks.expect("--to-source");
        auto addr = parse_ipv4(toks.take());
        if (!addr) fail(toks.line_no(), "bad SNAT target");
        rule.op = LineRule::Op::Snat;
        rule.to_addr = *addr;
      } else {
        fail(toks.line_no(), "unknown jump target " + target);
      }
    } else {
      fail(toks.line_no(), "unknown option " + flag);
    }
  }

  if (nat_table && chain == "PREROUTING") {
    if (rule.op != LineRule::Op::Dnat) {
      fail(toks.line_no(), "PREROUTING line must DNAT");
    }
    impl->dnat.push_back(std::move(rule));
  } else if (nat_table && chain == "POSTROUTING") {
    if (rule.op != LineRule::Op::Snat) {
      fail(toks.line_no(), "POSTROUTING line must SNAT");
    }
    impl->snat.push_back(std::move(rule));
  } else if (!nat_table && chain == "FORWARD") {
    impl->filter.push_back(std::move(rule));
  } else {
    fail(toks.line_no(), "unknown chain " + chain);
  }
}

// --- pf / ipfilter parsing --------------------------------------------------

void parse_pf_addr(Tokens& toks, AddrSpec* spec, bool is_pf) {
  std::string text = toks.take();
  if (text == "!") {
    spec->negated = true;
    text = toks.take();
  }
  if (text == "any") {
    spec->kind = AddrSpec::Kind::Any;
    return;
  }
  if (text.front() == '<' && text.back() == '>') {
    spec->kind = AddrSpec::Kind::Table;
    spec->table = text.substr(1, text.size() - 2);
    return;
  }
  if (is_pf && text.front() == '(' && text.back() == ')') {
    spec->kind = AddrSpec::Kind::DynByName;
    spec->dyn_iface = text.substr(1, text.size() - 2);
    return;
  }
  if (!is_pf && text == "0/32") {
    spec->kind = AddrSpec::Kind::DynOwnIface;
    return;
  }
  spec->kind = AddrSpec::Kind::Cidr;
  spec->cidr = parse_cidr_token(toks, text);
}

// pf "port a[:b]"; ipfilter "port = n | < n | > n | a >< b".
void parse_pf_port(Tokens& toks, PortSpec* spec, bool is_pf) {
  if (is_pf) {
    std::string text = toks.take();
    auto colon = text.find(':');
    if (colon == std::string::npos) {
      spec->lo = spec->hi = parse_port_token(toks, text);
    } else {
      spec->lo = parse_port_token(toks, text.substr(0, colon));
      spec->hi = parse_port_token(toks, text.substr(colon + 1));
    }
    return;
  }
  std::string first = toks.take();
  if (first == "=") {
    spec->lo = spec->hi = parse_port_token(toks, toks.take());
  } else if (first == "<") {
    spec->lo = 0;
    spec->hi = uint16_t(parse_port_token(toks, toks.take()) - 1);
  } else if (first == ">") {
    spec->lo = uint16_t(parse_port_token(toks, toks.take()) + 1);
    spec->hi = 65535;
  } else {
    uint16_t a = parse_port_token(toks, first);
    toks.expect("><");
    uint16_t b = parse_port_token(toks, toks.take());
    spec->lo = uint16_t(a + 1);
    spec->hi = uint16_t(b - 1);
  }
}

void parse_pf_body(Tokens& toks, LineRule* rule, bool is_pf) {
  if (toks.take_if("on")) rule->iface = toks.take();
  if (toks.take_if("proto")) {
    rule->proto = parse_proto_token(toks, toks.take(), &rule->proto_number);
  }
  toks.expect("from");
  parse_pf_addr(toks, &rule->src, is_pf);
  if (toks.take_if("port")) parse_pf_port(toks, &rule->sport, is_pf);
  toks.expect("to");
  parse_pf_addr(toks, &rule->dst, is_pf);
  if (toks.take_if("port")) parse_pf_port(toks, &rule->dport, is_pf);
  if (toks.take_if("icmp-type")) {
    rule->icmp_type = uint8_t(parse_port_token(toks, toks.take()));
    if (toks.take_if("code")) {
      rule->icmp_code = uint8_t(parse_port_token(toks, toks.take()));
    }
  }
  if (toks.take_if("flags")) {
    std::string text = toks.take();
    auto slash = text.find('/');
    if (slash == std::string::npos) fail(toks.line_no(), "bad flags");
    rule->flags_set = parse_flag_letters(toks, text.substr(0, slash));
    rule->flags_mask = parse_flag_letters(toks, text.substr(slash + 1));
  }
}

void parse_pf_line(Tokens& toks, CompiledScript::Impl* impl, bool is_pf) {
  std::string head = toks.take();
  LineRule rule;
  rule.line_no = toks.line_no();

  if (head == "table") {
    std::string name = toks.take();
    if (name.front() != '<' || name.back() != '>') {
      fail(toks.line_no(), "bad table name " + name);
    }
    toks.expect("{");
    std::vector<Cidr> blocks;
    for (;;) {
      std::string tok = toks.take();
      if (tok == "}") break;
      if (!tok.empty() && tok.back() == ',') tok.pop_back();
      blocks.push_back(parse_cidr_token(toks, tok));
    }
    if (!toks.done()) fail(toks.line_no(), "trailing tokens after table");
    impl->tables[name.substr(1, name.size() - 2)] = std::move(blocks);
    return;
  }

  if (head == "nat" || (is_pf && head == "rdr")) {
    rule.op = head == "nat" ? LineRule::Op::Snat : LineRule::Op::Dnat;
    parse_pf_body(toks, &rule, is_pf);
    toks.expect("->");
    auto addr = parse_ipv4(toks.take());
    if (!addr) fail(toks.line_no(), "bad translation address");
    rule.to_addr = *addr;
    if (toks.take_if("port")) {
      rule.to_port = parse_port_token(toks, toks.take());
    }
    impl->nat.push_back(std::move(rule));
    return;
  }
  if (!is_pf && (head == "map" || head == "rdr")) {
    rule.op = head == "map" ? LineRule::Op::Snat : LineRule::Op::Dnat;
    rule.iface = toks.take();  // map/rdr lines bind to an interface
    parse_pf_body(toks, &rule, is_pf);
    toks.expect("->");
    auto addr = parse_ipv4(toks.take());
    if (!addr) fail(toks.line_no(), "bad translation address");
    rule.to_addr = *addr;
    if (toks.take_if("port")) {
      rule.to_port = parse_port_token(toks, toks.take());
    }
    impl->nat.push_back(std::move(rule));
    return;
  }

  if (head == "pass" || head == "block") {
    rule.op = head == "pass" ? LineRule::Op::Pass : LineRule::Op::Block;
    if (head == "block") {
      if (is_pf && toks.take_if("return")) rule.op = LineRule::Op::Reject;
      if (!is_pf && toks.take_if("return-icmp")) {
        rule.op = LineRule::Op::Reject;
      }
    }
    if (toks.take_if("in")) {
      rule.dir = Direction::Inbound;
    } else if (toks.take_if("out")) {
      rule.dir = Direction::Outbound;
    }
    rule.quick = toks.take_if("quick");
    if (toks.take_if("all")) {
      if (!toks.done()) fail(toks.line_no(), "trailing tokens after all");
      impl->filter.push_back(std::move(rule));
      return;
    }
    parse_pf_body(toks, &rule, is_pf);
    if (!toks.done()) fail(toks.line_no(), "trailing tokens");
    impl->filter.push_back(std::move(rule));
    return;
  }

  if ((is_pf && head == "match") || (!is_pf && head == "count")) {
    rule.op = LineRule::Op::Count;
    if (toks.take_if("in")) {
      rule.dir = Direction::Inbound;
    } else if (toks.take_if("out")) {
      rule.dir = Direction::Outbound;
    }
    parse_pf_body(toks, &rule, is_pf);
    if (is_pf) {
      toks.expect("label");
      toks.take();  // label text
    }
    if (!toks.done()) fail(toks.line_no(), "trailing tokens");
    impl->filter.push_back(std::move(rule));
    return;
  }

  fail(toks.line_no(), "unknown directive '" + head + "'");
}

// --- matching ---------------------------------------------------------------

bool addr_matches(const AddrSpec& spec, uint32_t addr, const LineRule& rule,
                  const CompiledScript::Impl& impl,
                  const std::map<std::string, uint32_t>& iface_addrs) {
  bool in = false;
  switch (spec.kind) {
    case AddrSpec::Kind::Any:
      return true;
    case AddrSpec::Kind::Cidr:
      in = addr >= spec.cidr.first() && addr <= spec.cidr.last();
      break;
    case AddrSpec::Kind::Range:
      in = addr >= spec.range_lo && addr <= spec.range_hi;
      break;
    case AddrSpec::Kind::DynByName: {
      auto it = iface_addrs.find(spec.dyn_iface);
      in = it != iface_addrs.end() && it->second == addr;
      break;
    }
    case AddrSpec::Kind::DynOwnIface: {
      auto it = iface_addrs.find(rule.iface);
      in = it != iface_addrs.end() && it->second == addr;
      break;
    }
    case AddrSpec::Kind::Table: {
      auto it = impl.tables.find(spec.table);
      if (it == impl.tables.end()) return false;
      for (const Cidr& c : it->second) {
        if (addr >= c.first() && addr <= c.last()) {
          in = true;
          break;
        }
      }
      break;
    }
  }
  return spec.negated ? !in : in;
}

bool time_matches(const TimeSet& set, const std::optional<PacketTime>& time) {
  if (!time) return set.is_universe();
  if (time->abs_minutes) return set.contains(*time->abs_minutes);
  return set.contains_phase_only(time->phase());
}

bool line_matches(const LineRule& rule, const Packet& packet,
                  const CompiledScript::Impl& impl,
                  const std::map<std::string, uint32_t>& iface_addrs) {
  if (rule.dir && *rule.dir != packet.direction) return false;
  if (!rule.iface.empty() && rule.iface != packet.interface) return false;
  if (rule.proto) {
    if (*rule.proto != packet.proto) return false;
    if (*rule.proto == Proto::Other &&
        rule.proto_number != packet.proto_number) {
      return false;
    }
  }
  if (!addr_matches(rule.src, packet.src_ip, rule, impl, iface_addrs)) {
    return false;
  }
  if (!addr_matches(rule.dst, packet.dst_ip, rule, impl, iface_addrs)) {
    return false;
  }
  if (rule.proto == Proto::Tcp || rule.proto == Proto::Udp) {
    if (packet.src_port < rule.sport.lo || packet.src_port > rule.sport.hi) {
      return false;
    }
    if (packet.dst_port < rule.dport.lo || packet.dst_port > rule.dport.hi) {
      return false;
    }
  }
  if (rule.proto == Proto::Tcp &&
      (packet.tcp_flags & rule.flags_mask) !=
          (rule.flags_set & rule.flags_mask)) {
    return false;
  }
  if (rule.proto == Proto::Icmp) {
    if (rule.icmp_type && packet.icmp_type != *rule.icmp_type) return false;
    if (rule.icmp_code && packet.icmp_code != *rule.icmp_code) return false;
  }
  if (rule.mac && (!packet.src_mac || *packet.src_mac != *rule.mac)) {
    return false;
  }
  if (rule.when && !time_matches(*rule.when, packet.time)) return false;
  return true;
}

void apply_rewrite(const LineRule& rule, Packet* packet) {
  if (rule.op == LineRule::Op::Snat) {
    packet->src_ip = *rule.to_addr;
    if (rule.to_port) packet->src_port = *rule.to_port;
  } else {
    packet->dst_ip = *rule.to_addr;
    if (rule.to_port) packet->dst_port = *rule.to_port;
  }
}

Verdict run_iptables(const CompiledScript::Impl& impl, const Packet& packet,
                     const std::map<std::string, uint32_t>& iface_addrs) {
  Verdict verdict;
  verdict.egress = packet;

  for (const LineRule& rule : impl.dnat) {
    if (line_matches(rule, verdict.egress, impl, iface_addrs)) {
      apply_rewrite(rule, &verdict.egress);
      break;
    }
  }

  bool decided = false;
  for (const LineRule& rule : impl.filter) {
    if (!line_matches(rule, verdict.egress, impl, iface_addrs)) continue;
    if (rule.op == LineRule::Op::Count) {
      verdict.counters_hit.push_back(rule.line_no);
      continue;
    }
    decided = true;
    verdict.matched_rule = rule.line_no;
    switch (rule.op) {
      case LineRule::Op::Pass:
        verdict.action = VerdictAction::Accept;
        break;
      case LineRule::Op::Block:
        verdict.action = VerdictAction::Drop;
        break;
      case LineRule::Op::Reject:
        verdict.action = VerdictAction::Reject;
        break;
      default:
        break;
    }
    break;
  }
  if (!decided) verdict.action = impl.forward_policy;

  if (verdict.action == VerdictAction::Accept) {
    for (const LineRule& rule : impl.snat) {
      if (line_matches(rule, verdict.egress, impl, iface_addrs)) {
        apply_rewrite(rule, &verdict.egress);
        break;
      }
    }
  }
  return verdict;
}

Verdict run_pf_like(const CompiledScript::Impl& impl, const Packet& packet,
                    const std::map<std::string, uint32_t>& iface_addrs) {
  Verdict verdict;
  verdict.egress = packet;

  // Address translation first; the ordered nat/rdr list mirrors the
  // abstract model: one rewrite at most.
  for (const LineRule& rule : impl.nat) {
    if (line_matches(rule, verdict.egress, impl, iface_addrs)) {
      apply_rewrite(rule, &verdict.egress);
      break;
    }
  }

  const LineRule* last_match = nullptr;
  for (const LineRule& rule : impl.filter) {
    if (!line_matches(rule, verdict.egress, impl, iface_addrs)) continue;
    if (rule.op == LineRule::Op::Count) {
      verdict.counters_hit.push_back(rule.line_no);
      continue;
    }
    last_match = &rule;
    if (rule.quick) break;
  }

  if (last_match == nullptr) {
    // pf and ipfilter pass by default
    verdict.action = VerdictAction::Accept;
    return verdict;
  }
  verdict.matched_rule = last_match->line_no;
  switch (last_match->op) {
    case LineRule::Op::Pass:
      verdict.action = VerdictAction::Accept;
      break;
    case LineRule::Op::Block:
      verdict.action = VerdictAction::Drop;
      break;
    case LineRule::Op::Reject:
      verdict.action = VerdictAction::Reject;
      break;
    default:
      break;
  }
  return verdict;
}

}  // namespace

CompiledScript parse_script(Platform target, const std::string& text) {
  auto impl = std::make_shared<CompiledScript::Impl>();
  impl->target = target;

  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Tokens toks(line, line_no);
    if (target == Platform::Iptables) {
      parse_iptables_line(toks, impl.get());
    } else {
      parse_pf_line(toks, impl.get(), target == Platform::Pf);
    }
  }
  return CompiledScript(std::move(impl));
}

Verdict interpret(const CompiledScript& script, const Packet& packet,
                  const std::map<std::string, uint32_t>& iface_addrs) {
  const CompiledScript::Impl& impl = script.impl();
  if (impl.target == Platform::Iptables) {
    return run_iptables(impl, packet, iface_addrs);
  }
  return run_pf_like(impl, packet, iface_addrs);
}

Verdict interpret(Platform target, const Script& script, const Packet& packet,
                  const std::map<std::string, uint32_t>& iface_addrs) {
  return interpret(parse_script(target, script.text()), packet, iface_addrs);
}

}  // namespace fwcomp
