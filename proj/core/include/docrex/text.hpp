// Copyright 2026 The docrex Authors.
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
#include <vector>

// Small string helpers shared by the parsers, the matcher and the renderers.
namespace docrex::text {

std::string_view trim(std::string_view s);

// Unicode NFC normalization. Invalid UTF-8 is passed through unchanged.
std::string nfc(std::string_view s);

// Canonical form used for alias comparison: NFC, then surrounding
// whitespace removed. Case is preserved.
std::string normalize_alias(std::string_view s);

std::string ascii_lower(std::string_view s);
bool iequals(std::string_view a, std::string_view b);

// Splits on '\n', dropping a trailing '\r' from each line. A trailing
// newline does not produce an extra empty line.
std::vector<std::string_view> split_lines(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Tokens joined with single spaces, sentences joined with single spaces.
std::string join_sentences(const std::vector<std::vector<std::string>>& sentences);

}  // namespace docrex::text
