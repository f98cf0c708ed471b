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

#include "docrex/resources.hpp"

#include <string>
#include <utility>
#include <vector>

#include "docrex/error.hpp"

namespace docrex::resources {

// Defined in the generated embedded_resources.cpp.
const std::vector<std::pair<std::string_view, std::string_view>>& embedded_files();

std::string_view get(std::string_view name) {
  for (const auto& [key, content] : embedded_files()) {
    if (key == name) return content;
  }
  throw Error(ErrorCode::kConfig, "no embedded resource named '" + std::string(name) + "'");
}

}  // namespace docrex::resources
