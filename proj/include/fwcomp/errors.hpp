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

#ifndef FWCOMP_ERRORS_HPP_
#define FWCOMP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace fwcomp {

// Base class for all fwcomp errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed XML input.
class XmlError : public Error {
 public:
  XmlError(int line, const std::string& msg)
      : Error("xml error, line " + std::to_string(line) + ": " + msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Structurally valid XML that violates the .fwb grammar.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class DuplicateIdError : public Error {
 public:
  explicit DuplicateIdError(const std::string& id)
      : Error("duplicate object id: " + id), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class DanglingRefError : public Error {
 public:
  explicit DanglingRefError(const std::string& ref)
      : Error("dangling reference: " + ref), ref_(ref) {}
  const std::string& ref() const { return ref_; }

 private:
  std::string ref_;
};

class UnknownIdError : public Error {
 public:
  explicit UnknownIdError(const std::string& id)
      : Error("unknown object id: " + id), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

// A set that cannot be evaluated at compile time (deploy-time address
// table, dynamic interface, host without static addresses).
class OpaqueSetError : public Error {
 public:
  using Error::Error;
};

class CyclicGroupError : public Error {
 public:
  explicit CyclicGroupError(const std::string& id)
      : Error("group reference cycle through: " + id) {}
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& msg)
      : Error("parse error, line " + std::to_string(line) + ": " + msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// A construct the selected target platform cannot express.
class UnsupportedFeatureError : public Error {
 public:
  UnsupportedFeatureError(const std::string& code, const std::string& msg)
      : Error("unsupported feature [" + code + "]: " + msg), code_(code) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

class UnknownTargetError : public Error {
 public:
  explicit UnknownTargetError(const std::string& name)
      : Error("unknown target platform: " + name) {}
};

// IR handed to a backend that the pipeline did not fully lower.
class InvariantViolationError : public Error {
 public:
  using Error::Error;
};

class UnparseableScriptError : public Error {
 public:
  UnparseableScriptError(int line, const std::string& msg)
      : Error("unparseable script line " + std::to_string(line) + ": " + msg) {
  }
};

class UniverseTooLargeError : public Error {
 public:
  UniverseTooLargeError(uint64_t size, uint64_t bound)
      : Error("packet universe of " + std::to_string(size) +
              " exceeds bound " + std::to_string(bound)) {}
};

}  // namespace fwcomp

#endif  // FWCOMP_ERRORS_HPP_
