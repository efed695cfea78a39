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

#include "fwcomp/ipv4.hpp"

#include <bit>
#include <charconv>
#include <cstdio>

namespace fwcomp {

std::optional<uint32_t> parse_ipv4(std::string_view text) {
  uint32_t out = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int octet = 0; octet < 4; ++octet) {
    if (octet > 0) {
      if (p == end || *p != '.') return std::nullopt;
      ++p;
    }
    if (p == end || *p < '0' || *p > '9') return std::nullopt;
    unsigned value = 0;
    auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc() || value > 255) return std::nullopt;
    out = (out << 8) | value;
    p = next;
  }
  if (p != end) return std::nullopt;
  return out;
}

std::string format_ipv4(uint32_t addr) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%u.%u.%u.%u", (addr >> 24) & 0xff,
                (addr >> 16) & 0xff, (addr >> 8) & 0xff, addr & 0xff);
  return buf;
}

std::optional<int> mask_to_prefix(uint32_t mask) {
  if (mask == 0) return 0;
  int prefix = 32 - std::countr_zero(mask);
  if (prefix_to_mask(prefix) != mask) return std::nullopt;
  return prefix;
}

uint32_t prefix_to_mask(int prefix) {
  if (prefix <= 0) return 0;
  if (prefix >= 32) return 0xffffffffu;
  return ~((uint32_t{1} << (32 - prefix)) - 1);
}

std::optional<Cidr> parse_cidr(std::string_view text) {
  auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    auto addr = parse_ipv4(text);
    if (!addr) return std::nullopt;
    return Cidr{*addr, 32};
  }
  auto addr = parse_ipv4(text.substr(0, slash));
  if (!addr) return std::nullopt;
  auto tail = text.substr(slash + 1);
  int prefix = -1;
  auto [next, ec] =
      std::from_chars(tail.data(), tail.data() + tail.size(), prefix);
  if (ec != std::errc() || next != tail.data() + tail.size()) {
    return std::nullopt;
  }
  if (prefix < 0 || prefix > 32) return std::nullopt;
  return Cidr{*addr & prefix_to_mask(prefix), prefix};
}

std::string format_cidr(const Cidr& c) {
  if (c.prefix == 32) return format_ipv4(c.addr);
  return format_ipv4(c.addr) + "/" + std::to_string(c.prefix);
}

std::optional<uint64_t> parse_mac(std::string_view text) {
  uint64_t out = 0;
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int byte = 0; byte < 6; ++byte) {
    if (byte > 0) {
      if (p == end || *p != ':') return std::nullopt;
      ++p;
    }
    if (end - p < 2) return std::nullopt;
    unsigned value = 0;
    auto [next, ec] = std::from_chars(p, p + 2, value, 16);
    if (ec != std::errc() || next != p + 2) return std::nullopt;
    out = (out << 8) | value;
    p = next;
  }
  if (p != end) return std::nullopt;
  return out;
}

std::string format_mac(uint64_t mac) {
  char buf[18];
  std::snprintf(buf, sizeof buf, "%02x:%02x:%02x:%02x:%02x:%02x",
                unsigned(mac >> 40) & 0xff, unsigned(mac >> 32) & 0xff,
                unsigned(mac >> 24) & 0xff, unsigned(mac >> 16) & 0xff,
                unsigned(mac >> 8) & 0xff, unsigned(mac) & 0xff);
  return buf;
}

}  // namespace fwcomp
