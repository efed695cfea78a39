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

#include "xml_reader.hpp"

#include <cctype>

#include "fwcomp/errors.hpp"

namespace fwcomp::xml {

namespace {

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  bool eof() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  bool starts_with(std::string_view prefix) const {
    return text_.substr(pos_).starts_with(prefix);
  }
  int line() const { return line_; }

  char take() {
    char c = text_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  void skip(size_t n) {
    for (size_t i = 0; i < n && !eof(); ++i) take();
  }

  void skip_whitespace() {
    while (!eof() && std::isspace(static_cast<unsigned char>(peek()))) take();
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw XmlError(line_, msg);
  }

 private:
  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
};

bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':';
}

bool is_name_char(char c) {
  return is_name_start(c) || std::isdigit(static_cast<unsigned char>(c)) ||
         c == '-' || c == '.';
}

std::string read_name(Cursor& cur) {
  if (cur.eof() || !is_name_start(cur.peek())) cur.fail("expected a name");
  std::string name;
  while (!cur.eof() && is_name_char(cur.peek())) name += cur.take();
  return name;
}

std::string decode_entities(Cursor& cur, const std::string& raw) {
  std::string out;
  for (size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != '&') {
      out += raw[i];
      continue;
    }
    size_t semi = raw.find(';', i);
    if (semi == std::string::npos) cur.fail("unterminated entity");
    std::string_view entity = std::string_view(raw).substr(i + 1, semi - i - 1);
    if (entity == "amp") {
      out += '&';
    } else if (entity == "lt") {
      out += '<';
    } else if (entity == "gt") {
      out += '>';
    } else if (entity == "quot") {
      out += '"';
    } else if (entity == "apos") {
      out += '\'';
    } else {
      cur.fail("unknown entity &" + std::string(entity) + ";");
    }
    i = semi;
  }
  return out;
}

void skip_misc(Cursor& cur) {
  for (;;) {
    cur.skip_whitespace();
    if (cur.starts_with("<!--")) {
      cur.skip(4);
      while (!cur.eof() && !cur.starts_with("-->")) cur.take();
      if (cur.eof()) cur.fail("unterminated comment");
      cur.skip(3);
      continue;
    }
    if (cur.starts_with("<?")) {
      cur.skip(2);
      while (!cur.eof() && !cur.starts_with("?>")) cur.take();
      if (cur.eof()) cur.fail("unterminated processing instruction");
      cur.skip(2);
      continue;
    }
    return;
  }
}

std::unique_ptr<Element> parse_element(Cursor& cur) {
  if (cur.eof() || cur.peek() != '<') cur.fail("expected an element");
  int line = cur.line();
  cur.take();  // '<'
  auto element = std::make_unique<Element>();
  element->line = line;
  element->name = read_name(cur);

  for (;;) {
    cur.skip_whitespace();
    if (cur.eof()) cur.fail("unterminated start tag");
    if (cur.peek() == '>') {
      cur.take();
      break;
    }
    if (cur.starts_with("/>")) {
      cur.skip(2);
      return element;
    }
    std::string key = read_name(cur);
    cur.skip_whitespace();
    if (cur.eof() || cur.take() != '=') cur.fail("expected '='");
    cur.skip_whitespace();
    if (cur.eof()) cur.fail("expected attribute value");
    char quote = cur.take();
    if (quote != '"' && quote != '\'') cur.fail("expected a quoted value");
    std::string raw;
    while (!cur.eof() && cur.peek() != quote) {
      if (cur.peek() == '<') cur.fail("'<' in attribute value");
      raw += cur.take();
    }
    if (cur.eof()) cur.fail("unterminated attribute value");
    cur.take();  // closing quote
    for (const auto& [k, v] : element->attributes) {
      if (k == key) cur.fail("duplicate attribute " + key);
    }
    element->attributes.emplace_back(std::move(key),
                                     decode_entities(cur, raw));
  }

  // Children until the matching end tag.
  for (;;) {
    skip_misc(cur);
    if (cur.eof()) cur.fail("missing </" + element->name + ">");
    if (cur.starts_with("</")) {
      cur.skip(2);
      std::string closing = read_name(cur);
      if (closing != element->name) {
        cur.fail("mismatched </" + closing + ">, expected </" +
                 element->name + ">");
      }
      cur.skip_whitespace();
      if (cur.eof() || cur.take() != '>') cur.fail("malformed end tag");
      return element;
    }
    if (cur.peek() != '<') {
      cur.fail("text content is not allowed inside <" + element->name + ">");
    }
    element->children.push_back(parse_element(cur));
  }
}

}  // namespace

std::unique_ptr<Element> parse_document(std::string_view text) {
  Cursor cur(text);
  skip_misc(cur);
  if (cur.eof()) cur.fail("empty document");
  auto root = parse_element(cur);
  skip_misc(cur);
  if (!cur.eof()) cur.fail("content after the root element");
  return root;
}

std::string escape_attribute(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      case '\'':
        out += "&apos;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace fwcomp::xml
