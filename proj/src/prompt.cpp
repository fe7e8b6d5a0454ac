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

#include "nl2fix/prompt.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <tuple>

#include "nl2fix/generated/assets.hpp"

namespace nl2fix::prompt {

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::ZeroShot: return "zero-shot";
    case Strategy::TitleOnly: return "title-only";
    case Strategy::OneShot: return "one-shot";
    case Strategy::ReasoningExtraction: return "reasoning";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "zero-shot") return Strategy::ZeroShot;
  if (name == "title-only") return Strategy::TitleOnly;
  if (name == "one-shot") return Strategy::OneShot;
  if (name == "reasoning") return Strategy::ReasoningExtraction;
  throw ConfigError("unknown prompt strategy: " + std::string(name));
}

std::string_view to_string(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::AssistantPlaceholder: return "assistant";
  }
  return "unknown";
}

const Templates& templates() {
  static const Templates kTemplates{
      assets::kZeroShotTemplate, assets::kExampleTemplate,
      assets::kReasoningLocalizeTemplate, assets::kReasoningExplainTemplate,
      assets::kReasoningFixTemplate};
  return kTemplates;
}

namespace {

using Values = std::vector<std::pair<std::string_view, std::string_view>>;

const std::string_view* lookup(const Values& values, std::string_view key) {
  for (const auto& [k, v] : values) {
    if (k == key) return &v;
  }
  return nullptr;
}

// Expands one paragraph. Returns false when the paragraph references known
// placeholders and every one of them is empty.
bool expand_paragraph(std::string_view para, const Values& values,
                      std::string& out) {
  bool saw_placeholder = false;
  bool saw_nonempty = false;
  std::size_t i = 0;
  while (i < para.size()) {
    if (para[i] == '{') {
      const auto close = para.find('}', i + 1);
      if (close != std::string_view::npos) {
        const auto key = para.substr(i + 1, close - i - 1);
        if (const auto* value = lookup(values, key)) {
          saw_placeholder = true;
          saw_nonempty = saw_nonempty || !value->empty();
          out.append(*value);
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(para[i]);
    ++i;
  }
  return !saw_placeholder || saw_nonempty;
}

}  // namespace

std::string render_template(std::string_view tpl, const Values& values) {
  std::size_t trailing = 0;
  while (trailing < tpl.size() && tpl[tpl.size() - 1 - trailing] == '\n') {
    ++trailing;
  }
  const std::string_view body = tpl.substr(0, tpl.size() - trailing);
  std::string out;
  bool first = true;
  std::size_t pos = 0;
  while (pos <= body.size()) {
    auto end = body.find("\n\n", pos);
    if (end == std::string_view::npos) end = body.size();
    std::string para;
    if (expand_paragraph(body.substr(pos, end - pos), values, para)) {
      if (!first) out += "\n\n";
      out += para;
      first = false;
    }
    pos = end + 2;
  }
  out.append(trailing, '\n');
  return out;
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
  if (a.size() < b.size()) std::swap(a, b);
  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t cost = a[i - 1] == b[j - 1] ? 0 : 1;
      row[j] = std::min({up + 1, row[j - 1] + 1, diag + cost});
      diag = up;
    }
  }
  return row[b.size()];
}

std::int64_t estimate_tokens(std::string_view text) {
  std::int64_t words = 0;
  bool in_word = false;
  for (unsigned char ch : text) {
    const bool word_byte = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                           (ch >= '0' && ch <= '9') || ch == '_' || ch >= 0x80;
    const bool space = ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' ||
                       ch == '\f' || ch == '\v';
    if (word_byte) {
      if (!in_word) ++words;
      in_word = true;
    } else {
      in_word = false;
      if (!space) ++words;
    }
  }
  return (words * 13 + 9) / 10;
}

std::int64_t estimate_tokens(const PromptSpec& prompt) {
  std::int64_t total = 0;
  for (const auto& turn : prompt.turns) total += estimate_tokens(turn.text);
  if (prompt.completion_suffix) total += estimate_tokens(*prompt.completion_suffix);
  return total;
}

std::string method_signature(std::string_view function_text) {
  const auto first = function_text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  function_text.remove_prefix(first);
  const auto brace = function_text.find('{');
  if (brace != std::string_view::npos) {
    return std::string(function_text.substr(0, brace + 1));
  }
  return std::string(function_text.substr(0, function_text.find('\n')));
}

namespace {

std::string render_issue_block(std::string_view tpl, const PromptParts& parts) {
  return render_template(tpl, {{"title", parts.title},
                               {"description", parts.description},
                               {"buggy_function", parts.buggy_function}});
}

}  // namespace

std::vector<Turn> render_turns(Strategy strategy, const PromptParts& parts) {
  const auto& t = templates();
  switch (strategy) {
    case Strategy::ZeroShot:
    case Strategy::TitleOnly:
      return {{Role::User, render_issue_block(t.zero_shot, parts)}};
    case Strategy::OneShot: {
      std::string text = "Example:\n";
      if (parts.example) {
        const auto& ex = *parts.example;
        text += render_template(t.example, {{"title", ex.title},
                                            {"description", ex.description},
                                            {"buggy_function", ex.buggy_function},
                                            {"fixed_function", ex.fixed_function}});
      }
      text += "\n";
      text += render_issue_block(t.zero_shot, parts);
      return {{Role::User, std::move(text)}};
    }
    case Strategy::ReasoningExtraction:
      return {{Role::User, render_issue_block(t.reasoning_localize, parts)},
              {Role::User, render_template(t.reasoning_explain, {})},
              {Role::User, render_template(t.reasoning_fix, {})}};
  }
  return {};
}

namespace {

PromptSpec make_prompt(const corpus::BugRecord& record, Strategy strategy,
                       PromptParts parts) {
  PromptSpec spec;
  spec.bug_id = record.bug_id;
  spec.strategy = strategy;
  spec.parts = std::move(parts);
  spec.turns = render_turns(strategy, spec.parts);
  spec.completion_suffix = method_signature(record.fixed_function);
  spec.token_estimate = estimate_tokens(spec);
  return spec;
}

PromptParts target_parts(const corpus::BugRecord& record) {
  return {record.issue_title, record.issue_description, record.buggy_function,
          std::nullopt};
}

}  // namespace

PromptSpec build_zero_shot(const corpus::BugRecord& record) {
  return make_prompt(record, Strategy::ZeroShot, target_parts(record));
}

PromptSpec build_title_only(const corpus::BugRecord& record) {
  auto parts = target_parts(record);
  parts.description.clear();
  return make_prompt(record, Strategy::TitleOnly, std::move(parts));
}

const corpus::BugRecord& select_example(const corpus::BugRecord& record,
                                        const corpus::Corpus& corpus) {
  const corpus::BugRecord* best = nullptr;
  std::size_t best_distance = 0;
  for (const auto& candidate : corpus.records) {
    if (candidate.bug_id == record.bug_id) continue;
    const auto d = edit_distance(candidate.buggy_function, record.buggy_function);
    if (!best || std::tie(d, candidate.bug_id) < std::tie(best_distance, best->bug_id)) {
      best = &candidate;
      best_distance = d;
    }
  }
  if (!best) throw NoExampleAvailable(record.bug_id);
  return *best;
}

PromptSpec build_one_shot(const corpus::BugRecord& record,
                          const corpus::Corpus& corpus) {
  const auto& ex = select_example(record, corpus);
  auto parts = target_parts(record);
  parts.example = ExampleParts{ex.bug_id, ex.issue_title, ex.issue_description,
                               ex.buggy_function, ex.fixed_function};
  return make_prompt(record, Strategy::OneShot, std::move(parts));
}

PromptSpec build_reasoning_turns(const corpus::BugRecord& record) {
  return make_prompt(record, Strategy::ReasoningExtraction, target_parts(record));
}

PromptSpec build_prompt(Strategy strategy, const corpus::BugRecord& record,
                        const corpus::Corpus& corpus) {
  switch (strategy) {
    case Strategy::ZeroShot: return build_zero_shot(record);
    case Strategy::TitleOnly: return build_title_only(record);
    case Strategy::OneShot: return build_one_shot(record, corpus);
    case Strategy::ReasoningExtraction: return build_reasoning_turns(record);
  }
  throw DomainError("unknown strategy");
}

namespace {

std::size_t utf8_floor(const std::string& s, std::size_t len) {
  while (len > 0 && len < s.size() &&
         (static_cast<unsigned char>(s[len]) & 0xC0) == 0x80) {
    --len;
  }
  return len;
}

}  // namespace

PromptSpec fit_to_budget(const PromptSpec& prompt, std::int64_t context_budget,
                         std::int64_t reserve) {
  if (reserve < 0 || reserve >= context_budget) {
    throw DomainError("fit_to_budget requires 0 <= reserve < context_budget");
  }
  const std::int64_t available = context_budget - reserve;
  PromptSpec out = prompt;
  out.token_estimate = estimate_tokens(out);
  if (out.token_estimate <= available) return out;

  using Field = std::function<std::string*(PromptParts&)>;
  std::vector<Field> order;
  if (out.parts.example) {
    order.emplace_back([](PromptParts& p) { return &p.example->fixed_function; });
    order.emplace_back([](PromptParts& p) { return &p.example->buggy_function; });
    order.emplace_back([](PromptParts& p) { return &p.example->description; });
    order.emplace_back([](PromptParts& p) { return &p.example->title; });
  }
  order.emplace_back([](PromptParts& p) { return &p.description; });
  order.emplace_back([](PromptParts& p) { return &p.title; });

  auto estimate_with = [&](const Field& field, const std::string& full,
                           std::size_t len) {
    PromptSpec trial = out;
    *field(trial.parts) = full.substr(0, len);
    trial.turns = render_turns(trial.strategy, trial.parts);
    return estimate_tokens(trial);
  };

  for (const auto& field : order) {
    if (out.token_estimate <= available) break;
    const std::string full = *field(out.parts);
    if (full.empty()) continue;
    // Longest prefix that fits; the estimate is monotone in prefix length.
    std::size_t lo = 0;
    std::size_t hi = full.size();
    if (estimate_with(field, full, 0) > available) {
      hi = 0;
    } else {
      while (lo < hi) {
        const std::size_t mid = lo + (hi - lo + 1) / 2;
        if (estimate_with(field, full, mid) <= available) {
          lo = mid;
        } else {
          hi = mid - 1;
        }
      }
    }
    *field(out.parts) = full.substr(0, utf8_floor(full, lo));
    out.turns = render_turns(out.strategy, out.parts);
    out.token_estimate = estimate_tokens(out);
    out.truncated = true;
  }
  if (out.token_estimate > available) {
    throw TargetTooLarge(out.bug_id, out.token_estimate, available);
  }
  return out;
}

}  // namespace nl2fix::prompt
