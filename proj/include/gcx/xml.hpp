#pragma once

// Element-only XML reader. Text, attributes, comments, processing
// instructions, CDATA and DOCTYPE declarations are skipped unless `strict`
// is set, in which case anything other than the XML declaration, element
// tags and whitespace is rejected.

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "gcx/error.hpp"
#include "gcx/tree.hpp"

namespace gcx {

struct XmlOptions {
  bool strict = false;
};

namespace detail {

class XmlReader {
 public:
  XmlReader(std::string_view text, XmlOptions opts) : text_(text), opts_(opts) {}

  UnrankedTree parse() {
    UnrankedTree tree;
    std::vector<UnrankedTree::NodeId> open;  // stack of open elements
    bool root_closed = false;
    while (pos_ < text_.size()) {
      if (text_[pos_] != '<') {
        skip_text(!open.empty());
        continue;
      }
      if (starts_with("<?")) {
        skip_processing_instruction();
      } else if (starts_with("<!--")) {
        reject_in_strict("comment");
        skip_until("-->", "unterminated comment");
      } else if (starts_with("<![CDATA[")) {
        reject_in_strict("CDATA section");
        if (open.empty()) fail("CDATA section outside the root element");
        skip_until("]]>", "unterminated CDATA section");
      } else if (starts_with("<!")) {
        reject_in_strict("DOCTYPE declaration");
        if (!tree.empty()) fail("declaration after the root element");
        skip_doctype();
      } else if (starts_with("</")) {
        const std::size_t at = pos_;
        pos_ += 2;
        const std::string name = read_name();
        skip_space();
        expect('>');
        if (open.empty()) fail_at(at, "unexpected end tag </" + name + ">");
        const std::string& expected = tree.label(open.back());
        if (name != expected)
          fail_at(at, "end tag </" + name + "> does not match <" + expected + ">");
        open.pop_back();
        if (open.empty()) root_closed = true;
      } else {
        const std::size_t at = pos_;
        ++pos_;
        std::string name = read_name();
        if (root_closed || (!tree.empty() && open.empty()))
          fail_at(at, "second root element <" + name + ">");
        const bool self_closing = read_attributes();
        const auto id = open.empty() ? tree.add_root(std::move(name))
                                     : tree.add_child(open.back(), std::move(name));
        if (self_closing) {
          if (open.empty()) root_closed = true;
        } else {
          open.push_back(id);
        }
      }
    }
    if (!open.empty()) fail("unclosed element <" + tree.label(open.back()) + ">");
    if (tree.empty()) fail("empty document: no root element");
    return tree;
  }

 private:
  bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }

  [[noreturn]] void fail(const std::string& msg) const { fail_at(pos_, msg); }

  [[noreturn]] void fail_at(std::size_t at, const std::string& msg) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < at && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError("XML: " + msg, line, col);
  }

  void reject_in_strict(const char* what) const {
    if (opts_.strict) fail(std::string(what) + " not allowed in strict mode");
  }

  static bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

  void skip_space() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }

  void skip_text(bool inside_root) {
    while (pos_ < text_.size() && text_[pos_] != '<') {
      if (!is_space(text_[pos_])) {
        if (!inside_root) fail_at(pos_, "text outside the root element");
        if (opts_.strict) fail_at(pos_, "text content not allowed in strict mode");
      }
      ++pos_;
    }
  }

  void skip_until(std::string_view terminator, const char* error) {
    const auto end = text_.find(terminator, pos_);
    if (end == std::string_view::npos) fail(error);
    pos_ = end + terminator.size();
  }

  void skip_processing_instruction() {
    const bool declaration = starts_with("<?xml") && pos_ + 5 < text_.size() &&
                             (is_space(text_[pos_ + 5]) || text_[pos_ + 5] == '?');
    if (!declaration) reject_in_strict("processing instruction");
    skip_until("?>", "unterminated processing instruction");
  }

  void skip_doctype() {
    int depth = 0;
    for (; pos_ < text_.size(); ++pos_) {
      const char c = text_[pos_];
      if (c == '[') ++depth;
      else if (c == ']') --depth;
      else if (c == '>' && depth == 0) {
        ++pos_;
        return;
      }
    }
    fail("unterminated declaration");
  }

  void expect(char c) {
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string read_name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (is_space(c) || c == '>' || c == '/' || c == '=' || c == '<') break;
      ++pos_;
    }
    std::string name(text_.substr(start, pos_ - start));
    if (name.empty()) fail_at(start, "expected an element name");
    if (!is_valid_label(name)) fail_at(start, "invalid element name '" + name + "'");
    return name;
  }

  // Skips attributes up to the end of a start tag; returns true for `/>`.
  bool read_attributes() {
    for (;;) {
      skip_space();
      if (pos_ >= text_.size()) fail("unterminated start tag");
      if (starts_with("/>")) {
        pos_ += 2;
        return true;
      }
      if (text_[pos_] == '>') {
        ++pos_;
        return false;
      }
      const std::size_t at = pos_;
      while (pos_ < text_.size() && !is_space(text_[pos_]) && text_[pos_] != '=' &&
             text_[pos_] != '>' && text_[pos_] != '/')
        ++pos_;
      if (pos_ == at) fail("malformed attribute");
      if (opts_.strict) fail_at(at, "attributes not allowed in strict mode");
      skip_space();
      expect('=');
      skip_space();
      if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\''))
        fail("expected a quoted attribute value");
      const char quote = text_[pos_++];
      const auto end = text_.find(quote, pos_);
      if (end == std::string_view::npos) fail("unterminated attribute value");
      pos_ = end + 1;
    }
  }

  std::string_view text_;
  XmlOptions opts_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a document into its element tree.
inline UnrankedTree parse_xml(std::string_view text, XmlOptions opts = {}) {
  return detail::XmlReader(text, opts).parse();
}

/// Serializes a whole unranked tree with paired tags.
inline std::string write_xml(const UnrankedTree& t) {
  return t.empty() ? std::string() : serialize_subtree(fcns_encode(t), 0);
}

}  // namespace gcx
