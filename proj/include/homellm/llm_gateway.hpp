#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The homellm Authors

/**
 * @file llm_gateway.hpp
 * @brief Chat backend contract, call timing, and the structured-reply parser.
 *
 * parse_outcome() never throws: any reply it cannot resolve to one of the
 * offered actions becomes DecisionOutcome::failure().
 */

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "homellm/errors.hpp"
#include "homellm/outcome.hpp"
#include "homellm/preference_store.hpp"

namespace homellm {

enum class Role { System, User, Assistant };

inline std::string_view to_string(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "?";
}

struct ChatMessage {
  Role role = Role::User;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

/// Sampling parameters; the defaults keep replies close to deterministic.
struct GenerationParams {
  int max_tokens = 300;
  double min_p = 0.05;
  double temperature = 0.2;
  std::optional<std::uint64_t> seed;

  void validate() const {
    if (max_tokens < 1) throw PreconditionError("max_tokens must be >= 1");
    if (!(min_p >= 0.0 && min_p <= 1.0)) throw PreconditionError("min_p must be within [0, 1]");
    if (!(temperature >= 0.0)) throw PreconditionError("temperature must be >= 0");
  }
};

class GatewayError : public Error {
 public:
  enum class Kind {
    Unreachable,  // connection refused, DNS failure, ...
    Timeout,
    Protocol,     // bad status, malformed body, exhausted script
  };

  GatewayError(Kind kind, const std::string& what, double elapsed_seconds)
      : Error(what), kind_(kind), elapsed_(elapsed_seconds) {}

  Kind kind() const noexcept { return kind_; }
  double elapsed_seconds() const noexcept { return elapsed_; }

 private:
  Kind kind_;
  double elapsed_;
};

/// Chat-completion capability. Implementations must tolerate concurrent calls.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string complete(const std::vector<ChatMessage>& messages, const GenerationParams& params) = 0;
};

/// Replays canned replies in order and records every prompt it receives.
class ScriptedBackend final : public Backend {
 public:
  ScriptedBackend() = default;
  explicit ScriptedBackend(std::vector<std::string> replies) : replies_(replies.begin(), replies.end()) {}

  void push(std::string reply) {
    std::lock_guard lock(mutex_);
    replies_.push_back(std::move(reply));
  }

  std::string complete(const std::vector<ChatMessage>& messages, const GenerationParams&) override {
    std::lock_guard lock(mutex_);
    received_.push_back(messages);
    if (replies_.empty()) throw GatewayError(GatewayError::Kind::Protocol, "scripted backend has no reply left", 0.0);
    auto reply = std::move(replies_.front());
    replies_.pop_front();
    return reply;
  }

  std::vector<std::vector<ChatMessage>> received() const {
    std::lock_guard lock(mutex_);
    return received_;
  }

  std::size_t remaining() const {
    std::lock_guard lock(mutex_);
    return replies_.size();
  }

 private:
  mutable std::mutex mutex_;
  std::deque<std::string> replies_;
  std::vector<std::vector<ChatMessage>> received_;
};

/// Seconds on a monotonic clock. Replaceable so timings can be made reproducible.
using ClockFn = std::function<double()>;

inline double steady_seconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

struct LlmCall {
  std::vector<ChatMessage> messages;
  std::string reply;
  double seconds = 0.0;
};

struct RetrievalQuery {
  std::string query;
  std::vector<PreferenceEntry> results;
};

/// Everything one decision did, in order.
struct ChainTrace {
  std::vector<LlmCall> llm_calls;
  std::vector<RetrievalQuery> retrieval_queries;
  double total_seconds = 0.0;
  std::vector<std::string> warnings;
  /// Set when a backend or embedder call failed and the chain stopped early.
  std::optional<std::string> transport_error;
  bool backend_unreachable = false;
};

/**
 * Sends one chat request and returns the raw assistant text. The call and
 * its duration are appended to `trace` when one is given.
 */
inline std::string complete(Backend& backend, const std::vector<ChatMessage>& messages,
                            const GenerationParams& params, ChainTrace* trace = nullptr,
                            const ClockFn& now = steady_seconds) {
  if (messages.empty()) throw PreconditionError("chat request needs at least one message");
  if (messages.front().role != Role::System) throw PreconditionError("first chat message must be the system prompt");
  for (const auto& m : messages) {
    if (m.role != Role::Assistant && m.content.empty()) throw PreconditionError("system/user message is empty");
  }
  params.validate();

  const double start = now();
  std::string reply;
  try {
    reply = backend.complete(messages, params);
  } catch (const GatewayError& e) {
    throw GatewayError(e.kind(), e.what(), now() - start);
  } catch (const std::exception& e) {
    throw GatewayError(GatewayError::Kind::Protocol, e.what(), now() - start);
  }
  const double elapsed = now() - start;
  if (trace) trace->llm_calls.push_back({messages, reply, elapsed});
  return reply;
}

// ---------------------------------------------------------------------------
// Reply parsing

/// First balanced top-level `{...}` in `raw`, honoring JSON string quoting.
inline std::optional<std::string_view> extract_first_object(std::string_view raw) {
  auto start = raw.find('{');
  if (start == std::string_view::npos) return std::nullopt;
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < raw.size(); ++i) {
    char c = raw[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{') {
      ++depth;
    } else if (c == '}') {
      if (--depth == 0) return raw.substr(start, i - start + 1);
    }
  }
  return std::nullopt;
}

namespace detail {

inline std::string normalize_text(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (unsigned char c : s) {
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

/// `needle` occurs in `hay` bounded by non-alphanumerics. Both normalized.
inline bool contains_word(std::string_view hay, std::string_view needle) {
  if (needle.empty()) return false;
  auto is_word = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
  for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + 1)) {
    bool left = pos == 0 || !is_word(hay[pos - 1]);
    auto end = pos + needle.size();
    bool right = end == hay.size() || !is_word(hay[end]);
    if (left && right) return true;
  }
  return false;
}

inline std::optional<ActionCandidate> find_code(const std::vector<ActionCandidate>& cands, ActionCode code) {
  for (const auto& c : cands) {
    if (c.code == code) return c;
  }
  return std::nullopt;
}

inline std::optional<ActionCandidate> resolve_action(std::string_view text, const std::vector<ActionCandidate>& cands) {
  for (const auto& c : cands) {
    if (c.label == text) return c;
  }
  const auto norm = normalize_text(text);
  if (norm.empty()) return std::nullopt;
  for (const auto& c : cands) {
    if (normalize_text(c.label) == norm) return c;
  }

  std::optional<ActionCandidate> hit;
  int hits = 0;
  for (const auto& c : cands) {
    if (c.code != ActionCode::DeviceToggle) continue;
    if (contains_word(norm, normalize_text(c.subject))) {
      hit = c;
      ++hits;
    }
  }
  if (hits == 1) return hit;
  if (hits > 1) return std::nullopt;

  if (contains_word(norm, "no action") || contains_word(norm, "nothing")) {
    return find_code(cands, ActionCode::NoAction);
  }
  if (contains_word(norm, "interact") || contains_word(norm, "inform") || contains_word(norm, "tell the user")) {
    return find_code(cands, ActionCode::InteractWithUser);
  }
  return std::nullopt;
}

inline std::optional<int> integer_value(const nlohmann::json& v) {
  if (v.is_number_integer()) {
    auto x = v.get<long long>();
    if (x < -1000000 || x > 1000000) return std::nullopt;
    return static_cast<int>(x);
  }
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (std::isfinite(d) && std::floor(d) == d && std::fabs(d) <= 1e6) return static_cast<int>(d);
  }
  return std::nullopt;
}

}  // namespace detail

/**
 * Parses a model reply against the offered candidates.
 *
 * The reply must contain a JSON object with string keys "reasoning" and
 * "action". The action resolves by exact label, then case and whitespace
 * insensitive label, then a unique device-name mention, then meta-action
 * keywords. Optional "temperature", "luminosity" and "explanation" keys are
 * copied; out-of-range values are dropped with a warning.
 */
inline DecisionOutcome parse_outcome(std::string_view raw, const std::vector<ActionCandidate>& candidates) noexcept {
  try {
    auto object_text = extract_first_object(raw);
    if (!object_text) return DecisionOutcome::failure();
    auto j = nlohmann::json::parse(*object_text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return DecisionOutcome::failure();

    auto reasoning = j.find("reasoning");
    auto action = j.find("action");
    if (reasoning == j.end() || action == j.end() || !action->is_string()) return DecisionOutcome::failure();

    auto resolved = detail::resolve_action(action->get_ref<const std::string&>(), candidates);
    if (!resolved) return DecisionOutcome::failure();

    DecisionOutcome out;
    out.reasoning = reasoning->is_string() ? reasoning->get<std::string>() : reasoning->dump();
    out.action = std::move(*resolved);

    if (auto it = j.find("luminosity"); it != j.end() && !it->is_null()) {
      auto lum = detail::integer_value(*it);
      if (lum && *lum >= 0 && *lum <= 100) {
        out.luminosity = *lum;
      } else {
        out.warnings.push_back(fmt::format("ignored luminosity {}", it->dump()));
      }
    }
    if (auto it = j.find("temperature"); it != j.end() && !it->is_null()) {
      auto t = detail::integer_value(*it);
      if (t) {
        out.temperature_setpoint = *t;
      } else {
        out.warnings.push_back(fmt::format("ignored temperature {}", it->dump()));
      }
    }
    if (auto it = j.find("explanation"); it != j.end() && !it->is_null()) {
      if (it->is_string()) {
        if (!it->get_ref<const std::string&>().empty()) out.explanation = it->get<std::string>();
      } else {
        out.warnings.push_back("ignored non-string explanation");
      }
    }
    return out;
  } catch (...) {
    return DecisionOutcome::failure();
  }
}

}  // namespace homellm
