// Copyright 2026 The bctx Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "bctx/xml.h"

#include <cctype>
#include <charconv>
#include <cstdint>
#include <map>

#include "bctx/error.h"

namespace bctx {
namespace {

class XmlParser {
 public:
  explicit XmlParser(std::string_view text) : s_(text) {}

  XmlElement Parse() {
    SkipMisc();
    if (AtEnd() || Peek() != '<') Fail("expected root element");
    XmlElement root = ParseElement({});
    SkipMisc();
    if (!AtEnd()) Fail("content after root element");
    return root;
  }

 private:
  using Scope = std::map<std::string, std::string, std::less<>>;

  [[noreturn]] void Fail(const std::string& what) const {
    std::size_t line = 1;
    for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i) line += s_[i] == '\n';
    throw Error(ErrorCode::kWellFormednessError, what + " (line " + std::to_string(line) + ")");
  }

  bool AtEnd() const { return pos_ >= s_.size(); }
  char Peek() const { return s_[pos_]; }
  bool StartsWith(std::string_view p) const { return s_.substr(pos_).starts_with(p); }
  static bool IsSpace(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }
  static bool IsNameChar(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
           c == ':' || static_cast<unsigned char>(c) >= 0x80;
  }

  void SkipSpace() {
    while (!AtEnd() && IsSpace(Peek())) ++pos_;
  }

  void SkipUntil(std::string_view terminator, const char* what) {
    const auto end = s_.find(terminator, pos_);
    if (end == std::string_view::npos) Fail(std::string("unterminated ") + what);
    pos_ = end + terminator.size();
  }

  // Whitespace, comments and processing instructions outside the root.
  void SkipMisc() {
    if (StartsWith("\xEF\xBB\xBF")) pos_ += 3;
    for (;;) {
      SkipSpace();
      if (StartsWith("<?")) {
        SkipUntil("?>", "processing instruction");
      } else if (StartsWith("<!--")) {
        SkipUntil("-->", "comment");
      } else if (StartsWith("<!DOCTYPE") || StartsWith("<!ENTITY")) {
        Fail("document type declarations are not supported");
      } else {
        return;
      }
    }
  }

  std::string ParseName() {
    const std::size_t start = pos_;
    while (!AtEnd() && IsNameChar(Peek())) ++pos_;
    if (pos_ == start) Fail("expected a name");
    return std::string(s_.substr(start, pos_ - start));
  }

  void AppendCodePoint(std::string& out, unsigned long cp) {
    if (cp == 0 || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) Fail("invalid character reference");
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xc0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xe0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    } else {
      out.push_back(static_cast<char>(0xf0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3f)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3f)));
    }
  }

  std::uint32_t ParseCharRef(std::string_view digits, int base) {
    std::uint32_t cp = 0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, base);
    if (ec != std::errc() || end != digits.data() + digits.size() || cp > 0x10FFFF) {
      Fail("bad character reference");
    }
    return cp;
  }

  // Consumes an entity starting at '&'.
  void ParseReference(std::string& out) {
    const auto semi = s_.find(';', pos_);
    if (semi == std::string_view::npos || semi - pos_ > 12) Fail("unterminated entity reference");
    const std::string_view ref = s_.substr(pos_ + 1, semi - pos_ - 1);
    pos_ = semi + 1;
    if (ref == "lt") out.push_back('<');
    else if (ref == "gt") out.push_back('>');
    else if (ref == "amp") out.push_back('&');
    else if (ref == "quot") out.push_back('"');
    else if (ref == "apos") out.push_back('\'');
    else if (ref.starts_with("#x") && ref.size() > 2) AppendCodePoint(out, ParseCharRef(ref.substr(2), 16));
    else if (ref.starts_with("#") && ref.size() > 1) AppendCodePoint(out, ParseCharRef(ref.substr(1), 10));
    else Fail("unknown entity &" + std::string(ref) + ";");
  }

  std::string ParseAttributeValue() {
    if (AtEnd() || (Peek() != '"' && Peek() != '\'')) Fail("expected quoted attribute value");
    const char quote = s_[pos_++];
    std::string value;
    while (!AtEnd() && Peek() != quote) {
      if (Peek() == '<') Fail("'<' in attribute value");
      if (Peek() == '&') {
        ParseReference(value);
      } else {
        value.push_back(s_[pos_++]);
      }
    }
    if (AtEnd()) Fail("unterminated attribute value");
    ++pos_;
    return value;
  }

  static std::pair<std::string_view, std::string_view> SplitQName(std::string_view qname) {
    const auto colon = qname.find(':');
    if (colon == std::string_view::npos) return {{}, qname};
    return {qname.substr(0, colon), qname.substr(colon + 1)};
  }

  XmlElement ParseElement(const Scope& outer) {
    ++pos_;  // '<'
    const std::string qname = ParseName();
    std::vector<std::pair<std::string, std::string>> raw_attrs;
    XmlElement element;
    Scope scope = outer;

    for (;;) {
      const bool had_space = !AtEnd() && IsSpace(Peek());
      SkipSpace();
      if (AtEnd()) Fail("unterminated start tag <" + qname + ">");
      if (Peek() == '/' || Peek() == '>') break;
      if (!had_space) Fail("attributes must be separated by whitespace");
      std::string attr = ParseName();
      SkipSpace();
      if (AtEnd() || Peek() != '=') Fail("expected '=' after attribute " + attr);
      ++pos_;
      SkipSpace();
      std::string value = ParseAttributeValue();
      for (const auto& [n, v] : raw_attrs) {
        if (n == attr) Fail("duplicate attribute " + attr);
      }
      if (attr == "xmlns") {
        scope[""] = value;
        element.namespaces.emplace_back("", value);
      } else if (attr.starts_with("xmlns:")) {
        scope[attr.substr(6)] = value;
        element.namespaces.emplace_back(attr.substr(6), value);
      }
      raw_attrs.emplace_back(std::move(attr), std::move(value));
    }

    auto resolve = [&](std::string_view prefix, bool is_attribute) -> std::string {
      if (prefix.empty()) {
        if (is_attribute) return {};
        auto it = scope.find("");
        return it == scope.end() ? std::string() : it->second;
      }
      auto it = scope.find(prefix);
      if (it == scope.end()) Fail("unbound namespace prefix " + std::string(prefix));
      return it->second;
    };

    auto [prefix, local] = SplitQName(qname);
    element.ns = resolve(prefix, false);
    element.name = std::string(local);
    for (auto& [name, value] : raw_attrs) {
      if (name == "xmlns" || name.starts_with("xmlns:")) continue;
      auto [aprefix, alocal] = SplitQName(name);
      element.attributes.push_back(XmlAttribute{resolve(aprefix, true), std::string(alocal), value});
    }

    if (Peek() == '/') {
      ++pos_;
      if (AtEnd() || Peek() != '>') Fail("expected '>' after '/'");
      ++pos_;
      return element;
    }
    ++pos_;  // '>'

    for (;;) {
      if (AtEnd()) Fail("missing end tag for <" + qname + ">");
      if (StartsWith("</")) {
        pos_ += 2;
        const std::string end_name = ParseName();
        if (end_name != qname) Fail("mismatched end tag </" + end_name + "> for <" + qname + ">");
        SkipSpace();
        if (AtEnd() || Peek() != '>') Fail("expected '>' in end tag");
        ++pos_;
        return element;
      }
      if (StartsWith("<!--")) {
        SkipUntil("-->", "comment");
      } else if (StartsWith("<![CDATA[")) {
        const std::size_t start = pos_ + 9;
        SkipUntil("]]>", "CDATA section");
        element.text.append(s_.substr(start, pos_ - 3 - start));
      } else if (StartsWith("<?")) {
        SkipUntil("?>", "processing instruction");
      } else if (StartsWith("<!")) {
        Fail("declarations are not allowed in content");
      } else if (Peek() == '<') {
        element.children.push_back(ParseElement(scope));
      } else if (Peek() == '&') {
        ParseReference(element.text);
      } else {
        element.text.push_back(s_[pos_++]);
      }
    }
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::string Escape(std::string_view in, bool attribute) {
  std::string out;
  for (char c : in) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"':
        if (attribute) {
          out += "&quot;";
          break;
        }
        [[fallthrough]];
      default: out.push_back(c);
    }
  }
  return out;
}

void Write(const XmlElement& e, std::vector<std::pair<std::string, std::string>>& scope,
           std::string& out) {
  const std::size_t mark = scope.size();
  scope.insert(scope.end(), e.namespaces.begin(), e.namespaces.end());
  auto prefix_for = [&](const std::string& uri, bool attribute) -> std::string {
    if (uri.empty()) return {};
    for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
      if (it->second == uri && !(attribute && it->first.empty())) {
        return it->first.empty() ? std::string() : it->first + ":";
      }
    }
    throw Error(ErrorCode::kWellFormednessError, "no prefix declared for namespace " + uri);
  };

  // No layout whitespace is added, so character data survives a round trip unchanged.
  const std::string tag = prefix_for(e.ns, false) + e.name;
  out += "<" + tag;
  for (const auto& [p, uri] : e.namespaces) {
    out += p.empty() ? " xmlns=\"" : " xmlns:" + p + "=\"";
    out += Escape(uri, true) + "\"";
  }
  for (const auto& a : e.attributes) {
    out += " " + prefix_for(a.ns, true) + a.name + "=\"" + Escape(a.value, true) + "\"";
  }
  if (e.children.empty() && e.text.empty()) {
    out += "/>";
  } else {
    out += ">" + Escape(e.text, false);
    for (const auto& c : e.children) Write(c, scope, out);
    out += "</" + tag + ">";
  }
  scope.resize(mark);
}

}  // namespace

const XmlAttribute* XmlElement::FindAttribute(std::string_view ns_uri, std::string_view local) const {
  for (const auto& a : attributes) {
    if (a.ns == ns_uri && a.name == local) return &a;
  }
  return nullptr;
}

XmlElement ParsePlainXml(std::string_view text) { return XmlParser(text).Parse(); }

std::string WritePlainXml(const XmlElement& root) {
  std::string out = "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
  std::vector<std::pair<std::string, std::string>> scope;
  Write(root, scope, out);
  out += "\n";
  return out;
}

}  // namespace bctx
