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

#include <string>
#include <string_view>

namespace docreward::unicode {

// Decodes UTF-8 into code points. Ill-formed sequences decode to U+FFFD, one
// replacement per offending byte, so every input has a well-defined length.
std::u32string decode_utf8(std::string_view text);

std::string encode_utf8(std::u32string_view text);

void append_utf8(std::string& out, char32_t cp);

// Number of code points, using the same rules as decode_utf8.
std::size_t length(std::string_view text);

std::string nfc(std::string_view text);

std::string to_lower(std::string_view text);

bool is_white_space(char32_t cp);

}  // namespace docreward::unicode
