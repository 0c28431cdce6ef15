#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The homellm Authors

/**
 * @file decision_engine.hpp
 * @brief The four prompting styles, run as chains of model calls.
 *
 *   Direct         1 call: system + context + actions.
 *   DirectPref     1 call: as Direct, every preference in the system prompt.
 *   OpenQuestion   2 calls: list of 3 problems, top-3 retrieval per problem,
 *                  then the formatted answer.
 *   ThreeQuestion  4 calls: problems, retrieval, two identical answer
 *                  requests, then a final answer given both.
 *
 * A transport failure stops the chain and yields the failure outcome; the
 * trace keeps the calls that completed.
 */

#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>

#include "homellm/action_builder.hpp"
#include "homellm/context_renderer.hpp"
#include "homellm/home_model.hpp"
#include "homellm/llm_gateway.hpp"
#include "homellm/preference_store.hpp"
#include "homellm/prompt_templates.hpp"

namespace homellm {

enum class PromptStyle { Direct, DirectPref, OpenQuestion, ThreeQuestion };

inline constexpr std::array<PromptStyle, 4> kAllStyles = {PromptStyle::Direct, PromptStyle::DirectPref,
                                                          PromptStyle::OpenQuestion, PromptStyle::ThreeQuestion};

inline std::string_view to_string(PromptStyle s) {
  switch (s) {
    case PromptStyle::Direct: return "direct";
    case PromptStyle::DirectPref: return "directPref";
    case PromptStyle::OpenQuestion: return "OpenQuestion";
    case PromptStyle::ThreeQuestion: return "ThreeQuestion";
  }
  return "?";
}

inline std::optional<PromptStyle> parse_style(std::string_view s) {
  for (auto style : kAllStyles) {
    if (to_string(style) == s) return style;
  }
  return std::nullopt;
}

/// Number of model calls each style always makes.
inline int expected_llm_calls(PromptStyle s) {
  switch (s) {
    case PromptStyle::Direct:
    case PromptStyle::DirectPref: return 1;
    case PromptStyle::OpenQuestion: return 2;
    case PromptStyle::ThreeQuestion: return 4;
  }
  return 0;
}

/**
 * Up to three items from a numbered ("1." / "1)") or bulleted ("-", "*", "•")
 * list. A reply with no list items is taken whole as a single problem.
 */
inline std::vector<std::string> parse_problems(std::string_view raw) {
  static const std::regex item(R"(^\s*(?:\d+\s*[.):]|[-*]|•)\s*(.*\S)\s*$)");
  std::vector<std::string> out;
  std::string line;
  std::size_t pos = 0;
  while (pos < raw.size() && out.size() < 3) {
    auto end = raw.find('\n', pos);
    if (end == std::string_view::npos) end = raw.size();
    line.assign(raw.substr(pos, end - pos));
    pos = end + 1;
    std::smatch m;
    if (std::regex_match(line, m, item) && m[1].length() > 0) out.push_back(m[1].str());
  }
  if (out.empty()) {
    auto whole = detail::trim(raw);
    if (!whole.empty()) out.emplace_back(whole);
  }
  return out;
}

struct DecideOptions {
  GenerationParams params;
  PromptTemplates templates = PromptTemplates::defaults();
  std::size_t top_k = 3;
  ClockFn now = steady_seconds;
};

struct Decision {
  DecisionOutcome outcome;
  ChainTrace trace;
};

namespace detail {

inline std::string candidate_list(const std::vector<ActionCandidate>& candidates) {
  std::string out;
  for (const auto& c : candidates) out += fmt::format("- {}\n", c.label);
  return out;
}

inline std::string preferences_block(const std::vector<PreferenceEntry>& entries) {
  auto text = format_for_prompt(entries);
  return text.empty() ? std::string("(none)\n") : text;
}

inline std::string numbered(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += fmt::format("{}. {}\n", i + 1, items[i]);
  return items.empty() ? std::string("(none)\n") : out;
}

class Chain {
 public:
  Chain(Backend& backend, const Embedder& embedder, const VectorIndex& prefs, const DecideOptions& opts,
        ChainTrace& trace)
      : backend_(backend), embedder_(embedder), prefs_(prefs), opts_(opts), trace_(trace) {}

  std::string ask(std::string system, std::string user) {
    std::vector<ChatMessage> messages{{Role::System, std::move(system)}, {Role::User, std::move(user)}};
    return complete(backend_, messages, opts_.params, &trace_, opts_.now);
  }

  /// Retrieves the closest entries for every problem; one query per problem.
  std::vector<PreferenceEntry> retrieve(const std::vector<std::string>& problems) {
    std::vector<PreferenceEntry> merged;
    if (prefs_.empty()) return merged;
    for (const auto& p : problems) {
      if (detail::trim(p).empty()) continue;
      auto hits = query_top_k(prefs_, p, opts_.top_k, embedder_);
      merged.insert(merged.end(), hits.begin(), hits.end());
      trace_.retrieval_queries.push_back({p, std::move(hits)});
    }
    return merged;
  }

 private:
  Backend& backend_;
  const Embedder& embedder_;
  const VectorIndex& prefs_;
  const DecideOptions& opts_;
  ChainTrace& trace_;
};

}  // namespace detail

/**
 * Runs one decision for `user_id`. Processing time in the trace covers
 * rendering, action building, every model call, retrieval and parsing.
 */
inline Decision decide(PromptStyle style, const HouseState& state, int user_id, Representation rep,
                       const VectorIndex& prefs, Backend& backend, const Embedder& embedder,
                       const DecideOptions& opts = {}) {
  Decision result;
  auto& trace = result.trace;
  const double start = opts.now();

  const auto context = render(state, rep);
  const auto candidates = build_actions(user_id, state);
  const auto& t = opts.templates;

  std::map<std::string, std::string> values{{"context", context}, {"candidates", detail::candidate_list(candidates)}};
  detail::Chain chain(backend, embedder, prefs, opts, trace);

  try {
    std::string final_reply;
    switch (style) {
      case PromptStyle::Direct:
        final_reply = chain.ask(t.system, fill_template(t.decision, values));
        break;
      case PromptStyle::DirectPref: {
        auto system = fill_template(t.system_preferences, {{"preferences", detail::preferences_block(prefs.entries())}});
        final_reply = chain.ask(std::move(system), fill_template(t.decision, values));
        break;
      }
      case PromptStyle::OpenQuestion:
      case PromptStyle::ThreeQuestion: {
        auto problems = parse_problems(chain.ask(t.system, fill_template(t.problems, values)));
        auto retrieved = chain.retrieve(problems);
        values["problems"] = detail::numbered(problems);
        values["preferences"] = detail::preferences_block(retrieved);
        auto request = fill_template(t.decision_rag, values);
        if (style == PromptStyle::OpenQuestion) {
          final_reply = chain.ask(t.system, request);
        } else {
          auto first = chain.ask(t.system, request);
          auto second = chain.ask(t.system, request);
          values["answers"] = fmt::format("Answer 1:\n{}\n\nAnswer 2:\n{}\n", first, second);
          final_reply = chain.ask(t.system, fill_template(t.final_answer, values));
        }
        break;
      }
    }
    result.outcome = parse_outcome(final_reply, candidates);
    for (const auto& w : result.outcome.warnings) trace.warnings.push_back(w);
  } catch (const GatewayError& e) {
    trace.transport_error = e.what();
    trace.backend_unreachable = e.kind() == GatewayError::Kind::Unreachable;
    result.outcome = DecisionOutcome::failure();
  } catch (const RetrievalError& e) {
    trace.transport_error = e.what();
    result.outcome = DecisionOutcome::failure();
  }

  trace.total_seconds = opts.now() - start;
  return result;
}

}  // namespace homellm
