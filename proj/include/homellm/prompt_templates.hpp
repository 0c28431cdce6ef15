#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The homellm Authors

/**
 * @file prompt_templates.hpp
 * @brief Prompt text assets and placeholder substitution.
 *
 * Templates are plain text with `{{name}}` placeholders, where name is one
 * of: context, candidates, preferences, problems, answers. Any other
 * `{{...}}` is rejected when the template is loaded. The built-in set is
 * compiled from assets/prompts/ (see prompt_assets.hpp, generated by CMake).
 */

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "homellm/errors.hpp"
#include "homellm/prompt_assets.hpp"

namespace homellm {

inline constexpr std::array<std::string_view, 5> kPlaceholderNames = {"context", "candidates", "preferences",
                                                                       "problems", "answers"};

/// Placeholder names in order of appearance. Throws LoadError on malformed or unknown ones.
inline std::vector<std::string> placeholders(std::string_view tmpl) {
  std::vector<std::string> out;
  for (auto pos = tmpl.find("{{"); pos != std::string_view::npos; pos = tmpl.find("{{", pos)) {
    auto end = tmpl.find("}}", pos + 2);
    if (end == std::string_view::npos) throw LoadError("unterminated '{{' in prompt template");
    std::string name(tmpl.substr(pos + 2, end - pos - 2));
    if (std::find(kPlaceholderNames.begin(), kPlaceholderNames.end(), name) == kPlaceholderNames.end()) {
      throw LoadError(fmt::format("unknown placeholder '{{{{{}}}}}' in prompt template", name));
    }
    out.push_back(std::move(name));
    pos = end + 2;
  }
  return out;
}

/// Substitutes every placeholder; each one used must have a value.
inline std::string fill_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t pos = 0;
  while (true) {
    auto open = tmpl.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(tmpl.substr(pos));
      break;
    }
    auto close = tmpl.find("}}", open + 2);
    if (close == std::string_view::npos) throw PreconditionError("unterminated '{{' in prompt template");
    std::string name(tmpl.substr(open + 2, close - open - 2));
    auto it = values.find(name);
    if (it == values.end()) throw PreconditionError(fmt::format("no value for placeholder '{}'", name));
    out.append(tmpl.substr(pos, open - pos));
    out.append(it->second);
    pos = close + 2;
  }
  return out;
}

struct PromptTemplates {
  std::string system;              // direct, open/three question
  std::string system_preferences;  // directPref: system prompt carrying every preference
  std::string problems;            // "list of 3 main problems"
  std::string decision;            // formatted answer, no retrieval
  std::string decision_rag;        // formatted answer with problems + retrieved entries
  std::string final_answer;        // final answer over two earlier answers

  static PromptTemplates defaults() {
    return {std::string(assets::kSystem),   std::string(assets::kSystemPreferences),
            std::string(assets::kProblems), std::string(assets::kDecision),
            std::string(assets::kDecisionRag), std::string(assets::kFinal)};
  }

  /// Reads `<dir>/{system,system_preferences,problems,decision,decision_rag,final}.txt`.
  static PromptTemplates load_dir(const std::filesystem::path& dir) {
    auto read = [&](const char* name) {
      auto path = dir / (std::string(name) + ".txt");
      std::ifstream in(path, std::ios::binary);
      if (!in) throw LoadError(fmt::format("{}: cannot open prompt template", path.string()));
      std::stringstream buf;
      buf << in.rdbuf();
      auto text = buf.str();
      try {
        placeholders(text);
      } catch (const LoadError& e) {
        throw LoadError(fmt::format("{}: {}", path.string(), e.what()));
      }
      return text;
    };
    return {read("system"),   read("system_preferences"), read("problems"),
            read("decision"), read("decision_rag"),       read("final")};
  }

  bool operator==(const PromptTemplates&) const = default;
};

}  // namespace homellm
