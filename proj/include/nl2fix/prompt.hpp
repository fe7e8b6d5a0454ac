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
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nl2fix/common/errors.hpp"
#include "nl2fix/corpus.hpp"

namespace nl2fix::prompt {

enum class Strategy { ZeroShot, TitleOnly, OneShot, ReasoningExtraction };

std::string_view to_string(Strategy s);
// Accepts "zero-shot", "title-only", "one-shot", "reasoning".
Strategy parse_strategy(std::string_view name);

enum class Role { System, User, AssistantPlaceholder };

std::string_view to_string(Role r);

struct Turn {
  Role role = Role::User;
  std::string text;

  bool operator==(const Turn&) const = default;
};

struct ExampleParts {
  std::string bug_id;
  std::string title;
  std::string description;
  std::string buggy_function;
  std::string fixed_function;

  bool operator==(const ExampleParts&) const = default;
};

// The pieces a prompt is rendered from. Kept alongside the rendered turns
// so budget fitting can shorten individual pieces and re-render.
struct PromptParts {
  std::string title;
  std::string description;
  std::string buggy_function;
  std::optional<ExampleParts> example;

  bool operator==(const PromptParts&) const = default;
};

struct PromptSpec {
  std::string bug_id;
  Strategy strategy = Strategy::ZeroShot;
  std::vector<Turn> turns;
  // Method signature appended for completion-mode providers.
  std::optional<std::string> completion_suffix;
  std::int64_t token_estimate = 0;
  PromptParts parts;
  bool truncated = false;

  bool operator==(const PromptSpec&) const = default;
};

class NoExampleAvailable : public Error {
 public:
  explicit NoExampleAvailable(const std::string& bug_id)
      : Error("NoExampleAvailable",
              "no other record available as an example for " + bug_id) {}
};

class TargetTooLarge : public Error {
 public:
  TargetTooLarge(const std::string& bug_id, std::int64_t needed,
                 std::int64_t available)
      : Error("TargetTooLarge",
              "prompt for " + bug_id + " needs " + std::to_string(needed) +
                  " tokens even after truncation; budget allows " +
                  std::to_string(available)) {}
};

// Frozen template assets (assets/templates/*.txt, embedded at build time).
struct Templates {
  std::string_view zero_shot;
  std::string_view example;
  std::string_view reasoning_localize;
  std::string_view reasoning_explain;
  std::string_view reasoning_fix;
};

const Templates& templates();

// Substitutes {name} placeholders. The template is split into paragraphs
// on blank lines; a paragraph whose placeholders all expand to empty
// strings is omitted. Unknown placeholders are left verbatim.
std::string render_template(
    std::string_view tpl,
    const std::vector<std::pair<std::string_view, std::string_view>>& values);

// Levenshtein distance over bytes with unit costs.
std::size_t edit_distance(std::string_view a, std::string_view b);

// Provider-independent token estimate: words (runs of letters, digits,
// '_' and non-ASCII bytes) plus one per punctuation byte, times 1.3,
// rounded up.
std::int64_t estimate_tokens(std::string_view text);

std::int64_t estimate_tokens(const PromptSpec& prompt);

// Text of the fixed method's declaration up to and including its opening
// brace, used as the completion suffix.
std::string method_signature(std::string_view function_text);

PromptSpec build_zero_shot(const corpus::BugRecord& record);
PromptSpec build_title_only(const corpus::BugRecord& record);

// The nearest record by edit distance over buggy functions, excluding the
// target itself; ties go to the smallest bug_id.
const corpus::BugRecord& select_example(const corpus::BugRecord& record,
                                        const corpus::Corpus& corpus);

PromptSpec build_one_shot(const corpus::BugRecord& record,
                          const corpus::Corpus& corpus);

// Three user turns: localize, explain, fix.
PromptSpec build_reasoning_turns(const corpus::BugRecord& record);

// Renders the user turns of a strategy from its parts.
std::vector<Turn> render_turns(Strategy strategy, const PromptParts& parts);

// Dispatches on strategy; `corpus` is only consulted for OneShot.
PromptSpec build_prompt(Strategy strategy, const corpus::BugRecord& record,
                        const corpus::Corpus& corpus);

/// Shrinks a prompt until its estimate fits context_budget - reserve.
///
/// Pieces are shortened from the tail in this order, each only as far as
/// needed: example fix, example buggy code, example issue description,
/// example issue title, target issue description, target issue title.
/// The target buggy function and the instructions are never touched;
/// TargetTooLarge is thrown when they alone overflow the budget.
PromptSpec fit_to_budget(const PromptSpec& prompt, std::int64_t context_budget,
                         std::int64_t reserve);

}  // namespace nl2fix::prompt
