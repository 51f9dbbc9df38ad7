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

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace docreward::html {

struct Token {
  enum class Type { StartTag, EndTag, Text, Comment, Doctype };

  Type type = Type::Text;
  std::string name;  // lower-cased tag name
  std::vector<std::pair<std::string, std::string>> attributes;
  std::string text;  // raw text for Text/Comment tokens
  bool self_closing = false;
  std::size_t begin = 0;  // byte span of the token in the source
  std::size_t end = 0;

  std::optional<std::string> attribute(std::string_view key) const;
};

// Lenient tokenizer: never throws, treats a lone '<' as text, and skips the
// bodies of <script> and <style>.
std::vector<Token> tokenize(std::string_view source);

std::string decode_entities(std::string_view text);

// Escapes &, <, > and ".
std::string escape(std::string_view text);

}  // namespace docreward::html
