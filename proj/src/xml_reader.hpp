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
// Minimal XML reader for the .fwb subset: elements, attributes,
// self-closing tags, comments, an XML declaration and the five
// predefined entities. No text content, CDATA, PIs or DTDs.

#ifndef FWCOMP_SRC_XML_READER_HPP_
#define FWCOMP_SRC_XML_READER_HPP_

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace fwcomp::xml {

struct Element {
  std::string name;
  // Document order; the .fwb grammar has no duplicate attributes.
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<std::unique_ptr<Element>> children;
  int line = 0;

  const std::string* attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
      if (k == key) return &v;
    }
    return nullptr;
  }
};

// Parses a whole document; throws XmlError.
std::unique_ptr<Element> parse_document(std::string_view text);

// Escapes &, <, >, ", ' for attribute values.
std::string escape_attribute(std::string_view raw);

}  // namespace fwcomp::xml

#endif  // FWCOMP_SRC_XML_READER_HPP_
