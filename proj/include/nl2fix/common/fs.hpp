// Copyright 2026 The nl2fix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace nl2fix {

std::string read_file(const std::filesystem::path& path);

// Returns nullopt when the file does not exist.
std::optional<std::string> try_read_file(const std::filesystem::path& path);

// Writes through a uniquely named sibling temp file and renames it over
// `path`, so readers observe either the old or the new content. Parent
// directories are created as needed.
void atomic_write_file(const std::filesystem::path& path,
                       std::string_view content);

// Creates a fresh, uniquely named directory under `parent`.
std::filesystem::path make_unique_dir(const std::filesystem::path& parent,
                                      std::string_view prefix);

// Replaces path separators and other awkward characters so that an
// arbitrary identifier can be used as a single path component.
std::string sanitize_path_component(std::string_view name);

}  // namespace nl2fix
