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

#include <string_view>

// Data files compiled into the library (ontology, prompt templates). The
// sources live under core/data/ and are installed alongside the headers.
namespace docrex::resources {

// Returns the embedded file registered under `name`, e.g.
// "templates/head_chat". Throws docrex::Error(kConfig) for unknown names.
std::string_view get(std::string_view name);

}  // namespace docrex::resources
