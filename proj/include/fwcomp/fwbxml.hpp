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

#ifndef FWCOMP_FWBXML_HPP_
#define FWCOMP_FWBXML_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "fwcomp/model.hpp"

namespace fwcomp {

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;      // stable token, e.g. "group-heterogeneous"
  std::string location;  // element path and object id where known
  std::string message;

  std::string render() const;
};

bool has_errors(const std::vector<Diagnostic>& diagnostics);

// Parses a .fwb document. The standard library is injected when absent.
// Non-fatal findings (unknown attributes) are appended to `warnings`
// when given. Throws XmlError, SchemaError, DuplicateIdError,
// DanglingRefError.
ObjectDatabase parse(std::string_view text,
                     std::vector<Diagnostic>* warnings = nullptr);

// Canonical serialization: attributes alphabetized, rules in position
// order, 2-space indentation. The built-in standard library is implicit
// and not emitted. parse(serialize(db)) is structurally equal to db.
std::string serialize(const ObjectDatabase& db);

// Semantic validation beyond the grammar: reference resolution, group
// homogeneity, position uniqueness and gaplessness, NAT translation
// arity, supported platforms.
std::vector<Diagnostic> validate_schema(const ObjectDatabase& db);

// Address table files: one dotted-quad or CIDR per line, '#' comments
// and blank lines ignored. Throws IoError, ParseError.
AddressSet load_address_table(const std::string& path);

// Resolves every compile-time AddressTable against the filesystem.
// Relative paths resolve against `base_dir`, or $FWCOMP_TABLE_DIR when
// set. Must run before validation/compilation; part of the load phase.
void resolve_address_tables(ObjectDatabase& db, const std::string& base_dir);

// Structural database equality (library/object tree, rule by rule).
bool structurally_equal(const ObjectDatabase& a, const ObjectDatabase& b);

}  // namespace fwcomp

#endif  // FWCOMP_FWBXML_HPP_
