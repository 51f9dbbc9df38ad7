// Copyright 2026 The docreward Authors.
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

#include "docreward/html.hpp"

#include <cctype>
#include <charconv>

#include "docreward/unicode.hpp"
#include "text_util.hpp"

namespace docreward::html {

namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == ':';
}

std::size_t find_ci(std::string_view hay, std::string_view needle, std::size_t from) {
  const std::string lower = ascii_lower(hay);
  return lower.find(needle, from);
}

// Parses attributes and the closing '>' of a start tag. `pos` points just
// past the tag name; returns the position after '>'.
std::size_t parse_attributes(std::string_view s, std::size_t pos, Token& tok) {
  while (pos < s.size()) {
    while (pos < s.size() && is_ascii_space(s[pos])) ++pos;
    if (pos >= s.size()) break;
    if (s[pos] == '>') return pos + 1;
    if (s[pos] == '/' && pos + 1 < s.size() && s[pos + 1] == '>') {
      tok.self_closing = true;
      return pos + 2;
    }
    const std::size_t name_start = pos;
    while (pos < s.size() && !is_ascii_space(s[pos]) && s[pos] != '=' && s[pos] != '>' &&
           !(s[pos] == '/' && pos + 1 < s.size() && s[pos + 1] == '>')) {
      ++pos;
    }
    std::string key = ascii_lower(s.substr(name_start, pos - name_start));
    if (key.empty()) {
      ++pos;
      continue;
    }
    while (pos < s.size() && is_ascii_space(s[pos])) ++pos;
    std::string value;
    if (pos < s.size() && s[pos] == '=') {
      ++pos;
      while (pos < s.size() && is_ascii_space(s[pos])) ++pos;
      if (pos < s.size() && (s[pos] == '"' || s[pos] == '\'')) {
        const char quote = s[pos++];
        const std::size_t end = s.find(quote, pos);
        const std::size_t stop = end == std::string_view::npos ? s.size() : end;
        value = decode_entities(s.substr(pos, stop - pos));
        pos = stop == s.size() ? stop : stop + 1;
      } else {
        const std::size_t start = pos;
        while (pos < s.size() && !is_ascii_space(s[pos]) && s[pos] != '>') ++pos;
        value = decode_entities(s.substr(start, pos - start));
      }
    }
    tok.attributes.emplace_back(std::move(key), std::move(value));
  }
  return s.size();
}

}  // namespace

std::optional<std::string> Token::attribute(std::string_view key) const {
  for (const auto& [k, v] : attributes) {
    if (k == key) return v;
  }
  return std::nullopt;
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t pos = 0;
  std::string pending_text;
  std::size_t text_begin = 0;
  auto flush_text = [&] {
    if (pending_text.empty()) return;
    Token t;
    t.type = Token::Type::Text;
    t.text = std::move(pending_text);
    t.begin = text_begin;
    t.end = pos;
    pending_text.clear();
    out.push_back(std::move(t));
  };

  while (pos < s.size()) {
    const std::size_t lt = s.find('<', pos);
    if (pending_text.empty()) text_begin = pos;
    if (lt == std::string_view::npos) {
      pending_text.append(s.substr(pos));
      pos = s.size();
      break;
    }
    pending_text.append(s.substr(pos, lt - pos));
    pos = lt;

    if (s.substr(pos, 4) == "<!--") {
      flush_text();
      const std::size_t end = s.find("-->", pos + 4);
      Token t;
      t.type = Token::Type::Comment;
      t.text = std::string(s.substr(pos + 4, (end == std::string_view::npos ? s.size() : end) - pos - 4));
      t.begin = pos;
      pos = end == std::string_view::npos ? s.size() : end + 3;
      t.end = pos;
      out.push_back(std::move(t));
      continue;
    }
    if (s.substr(pos, 2) == "<!" || s.substr(pos, 2) == "<?") {
      flush_text();
      const std::size_t end = s.find('>', pos);
      Token t;
      t.type = Token::Type::Doctype;
      t.text = std::string(s.substr(pos, (end == std::string_view::npos ? s.size() : end) - pos));
      t.begin = pos;
      pos = end == std::string_view::npos ? s.size() : end + 1;
      t.end = pos;
      out.push_back(std::move(t));
      continue;
    }
    const bool closing = pos + 1 < s.size() && s[pos + 1] == '/';
    std::size_t name_start = pos + (closing ? 2 : 1);
    if (name_start >= s.size() || !std::isalpha(static_cast<unsigned char>(s[name_start]))) {
      pending_text.push_back('<');
      ++pos;
      continue;
    }
    std::size_t name_end = name_start;
    while (name_end < s.size() && is_name_char(s[name_end])) ++name_end;

    flush_text();
    Token t;
    t.type = closing ? Token::Type::EndTag : Token::Type::StartTag;
    t.name = ascii_lower(s.substr(name_start, name_end - name_start));
    t.begin = pos;
    if (closing) {
      const std::size_t end = s.find('>', name_end);
      pos = end == std::string_view::npos ? s.size() : end + 1;
      t.end = pos;
      out.push_back(std::move(t));
      continue;
    }
    pos = parse_attributes(s, name_end, t);
    t.end = pos;
    const std::string name = t.name;
    const bool self_closing = t.self_closing;
    out.push_back(std::move(t));
    if ((name == "script" || name == "style") && !self_closing) {
      const std::size_t end = find_ci(s, "</" + name, pos);
      pos = end == std::string::npos ? s.size() : end;
    }
  }
  flush_text();
  return out;
}

std::string decode_entities(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char c = text[pos];
    if (c != '&') {
      out.push_back(c);
      ++pos;
      continue;
    }
    const std::size_t semi = text.find(';', pos);
    if (semi == std::string_view::npos || semi - pos > 10) {
      out.push_back(c);
      ++pos;
      continue;
    }
    const std::string_view name = text.substr(pos + 1, semi - pos - 1);
    std::optional<char32_t> cp;
    if (name == "amp") cp = U'&';
    else if (name == "lt") cp = U'<';
    else if (name == "gt") cp = U'>';
    else if (name == "quot") cp = U'"';
    else if (name == "apos") cp = U'\'';
    else if (name == "nbsp") cp = char32_t{0xA0};
    else if (name.size() > 1 && name[0] == '#') {
      unsigned long value = 0;
      const bool hex = name[1] == 'x' || name[1] == 'X';
      const std::string_view digits = name.substr(hex ? 2 : 1);
      const auto [ptr, ec] =
          std::from_chars(digits.data(), digits.data() + digits.size(), value, hex ? 16 : 10);
      if (ec == std::errc{} && ptr == digits.data() + digits.size() && !digits.empty() &&
          value <= 0x10FFFF && !(value >= 0xD800 && value <= 0xDFFF) && value != 0) {
        cp = static_cast<char32_t>(value);
      }
    }
    if (!cp) {
      out.push_back(c);
      ++pos;
      continue;
    }
    unicode::append_utf8(out, *cp);
    pos = semi + 1;
  }
  return out;
}

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
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
      default:
        out.push_back(c);
    }
  }
  return out;
}

}  // namespace docreward::html
