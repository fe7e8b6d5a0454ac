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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nl2fix {

// Base for every error raised by the harness. `code()` is a stable
// machine-readable tag; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

// Precondition violated on a mathematical or structural operation.
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& message)
      : Error("DomainError", message) {}
};

class EmptyInput : public Error {
 public:
  explicit EmptyInput(const std::string& what)
      : Error("EmptyInput", "empty input: " + what) {}
};

class InsufficientData : public Error {
 public:
  explicit InsufficientData(const std::string& message)
      : Error("InsufficientData", message) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message)
      : Error("ConfigError", message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("IoError", message) {}
};

}  // namespace nl2fix
