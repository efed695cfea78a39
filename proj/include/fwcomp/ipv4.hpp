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

#ifndef FWCOMP_IPV4_HPP_
#define FWCOMP_IPV4_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace fwcomp {

// Addresses are kept in host byte order throughout.

std::optional<uint32_t> parse_ipv4(std::string_view text);
std::string format_ipv4(uint32_t addr);

// Accepts contiguous netmasks only ("255.255.255.0"). Returns the prefix
// length, or nullopt for a non-contiguous mask.
std::optional<int> mask_to_prefix(uint32_t mask);
uint32_t prefix_to_mask(int prefix);

struct Cidr {
  uint32_t addr = 0;  // network base, low bits clear
  int prefix = 32;

  uint32_t first() const { return addr; }
  uint32_t last() const {
    return prefix == 0 ? 0xffffffffu : addr | (~prefix_to_mask(prefix));
  }
  bool operator==(const Cidr&) const = default;
};

// "10.0.0.0/30" or a bare address (treated as /32).
std::optional<Cidr> parse_cidr(std::string_view text);
std::string format_cidr(const Cidr& c);

// Colon-separated 48-bit MAC, "00:17:f2:ea:ee:35".
std::optional<uint64_t> parse_mac(std::string_view text);
std::string format_mac(uint64_t mac);

}  // namespace fwcomp

#endif  // FWCOMP_IPV4_HPP_
