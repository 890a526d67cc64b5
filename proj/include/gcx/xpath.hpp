#pragma once

// The downward/sibling XPath fragment: absolute location paths built from
// `/`, `//`, `*`, element names and the child, descendant and
// following-sibling axes.

#include <cctype>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "gcx/error.hpp"
#include "gcx/tree.hpp"

namespace gcx {

enum class Axis : std::uint8_t { Child, Descendant, FollowingSibling };

struct Step {
  Axis axis = Axis::Child;
  std::string name;  // empty for the wildcard `*`

  bool wildcard() const noexcept { return name.empty(); }
  bool matches(std::string_view label) const noexcept { return name.empty() || name == label; }
  bool operator==(const Step&) const = default;
};

struct XPathQuery {
  std::vector<Step> steps;
  bool operator==(const XPathQuery&) const = default;
};

inline const char* axis_name(Axis a) {
  switch (a) {
    case Axis::Child: return "child";
    case Axis::Descendant: return "descendant";
    case Axis::FollowingSibling: return "following-sibling";
  }
  return "?";
}

/// Canonical text: `/name`, `//name`, `/following-sibling::name`.
inline std::string to_string(const XPathQuery& q) {
  std::string out;
  for (const auto& s : q.steps) {
    if (s.axis == Axis::Descendant) out += "//";
    else if (s.axis == Axis::FollowingSibling) out += "/following-sibling::";
    else out += "/";
    out += s.wildcard() ? "*" : s.name;
  }
  return out;
}

inline std::ostream& operator<<(std::ostream& os, const XPathQuery& q) { return os << to_string(q); }

namespace detail {

class XPathParser {
 public:
  explicit XPathParser(std::string_view text) : text_(text) {}

  XPathQuery parse() {
    XPathQuery q;
    skip_space();
    if (at_end()) fail("empty query");
    while (!at_end()) {
      if (peek() != '/') {
        if (q.steps.empty()) unsupported("relative location path");
        fail("expected '/'");
      }
      ++pos_;
      Axis axis = Axis::Child;
      if (!at_end() && peek() == '/') {
        ++pos_;
        axis = Axis::Descendant;
      }
      skip_space();
      q.steps.push_back(parse_step(axis));
      skip_space();
    }
    if (q.steps.front().axis == Axis::FollowingSibling)
      fail("a query cannot start with the following-sibling axis");
    return q;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("XPath: " + msg, 1, pos_ + 1);
  }
  [[noreturn]] void unsupported(const std::string& what) const {
    throw UnsupportedFeature("XPath: unsupported " + what + " at column " +
                             std::to_string(pos_ + 1));
  }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(peek()))) ++pos_;
  }

  static bool name_char(char c) {
    return !(c == '/' || c == '[' || c == ']' || c == '(' || c == ')' || c == '*' || c == '@' ||
             c == ':' || c == '|' || c == ',' || c == '=' || c == '<' || c == '>' ||
             std::isspace(static_cast<unsigned char>(c)));
  }

  std::string_view read_name() {
    const auto start = pos_;
    while (!at_end() && name_char(peek())) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  Step parse_step(Axis axis) {
    if (at_end()) fail("expected a step");
    if (peek() == '@') unsupported("attribute axis");
    if (peek() == '.') unsupported("abbreviated step '" + std::string(1, peek()) + "'");
    Step step;
    step.axis = axis;
    if (peek() == '*') {
      ++pos_;
    } else {
      const auto name = read_name();
      if (name.empty()) fail("expected a name or '*'");
      if (text_.substr(pos_, 2) == "::") {
        pos_ += 2;
        if (name == "child") {
          // same as the abbreviated form
        } else if (name == "descendant") {
          if (axis == Axis::Descendant) unsupported("descendant axis after '//'");
          step.axis = Axis::Descendant;
        } else if (name == "following-sibling") {
          if (axis == Axis::Descendant) unsupported("following-sibling axis after '//'");
          step.axis = Axis::FollowingSibling;
        } else {
          unsupported("axis '" + std::string(name) + "'");
        }
        if (!at_end() && peek() == '*') {
          ++pos_;
        } else {
          const auto test = read_name();
          if (test.empty()) fail("expected a name or '*' after '::'");
          step.name = check_test(test);
        }
      } else {
        step.name = check_test(name);
      }
    }
    skip_space();
    if (!at_end()) {
      if (peek() == '[') unsupported("filter '[...]'");
      if (peek() == '(') unsupported("function call");
      if (peek() == '|') unsupported("union '|'");
      if (peek() != '/') fail(std::string("unexpected '") + peek() + "'");
    }
    return step;
  }

  std::string check_test(std::string_view name) {
    if (!at_end() && peek() == '(') unsupported("node test or function '" + std::string(name) + "()'");
    if (!is_valid_label(name)) fail("invalid name '" + std::string(name) + "'");
    return std::string(name);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses a query of the fragment; anything outside it raises
/// UnsupportedFeature naming the construct.
inline XPathQuery parse_xpath(std::string_view text) { return detail::XPathParser(text).parse(); }

}  // namespace gcx
