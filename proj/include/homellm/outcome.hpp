#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The homellm Authors

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace homellm {

/// Numeric tag carried by each selectable action.
enum class ActionCode : int {
  NoAction = 0,
  DeviceToggle = 1,
  InteractWithUser = 2,
};

inline constexpr std::string_view kInteractLabel = "Interact with user";
inline constexpr std::string_view kNoActionLabel = "No action required";
inline constexpr std::string_view kFailureMessage = "I could not decide on an action.";

struct ActionCandidate {
  ActionCode code = ActionCode::NoAction;
  std::string label;
  /// Set iff code == DeviceToggle.
  std::optional<std::string> device_id;
  /// Label without the trailing " is <state>"; used for fuzzy resolution.
  std::string subject;

  bool operator==(const ActionCandidate&) const = default;

  static ActionCandidate interact() {
    return {ActionCode::InteractWithUser, std::string(kInteractLabel), std::nullopt, std::string(kInteractLabel)};
  }
  static ActionCandidate no_action() {
    return {ActionCode::NoAction, std::string(kNoActionLabel), std::nullopt, std::string(kNoActionLabel)};
  }
};

/// A parsed model decision.
struct DecisionOutcome {
  std::string reasoning;
  ActionCandidate action = ActionCandidate::no_action();
  std::optional<int> temperature_setpoint;
  std::optional<int> luminosity;
  std::optional<std::string> explanation;
  bool failed = false;
  /// Non-fatal issues found while parsing (dropped optional keys etc.).
  std::vector<std::string> warnings;

  bool operator==(const DecisionOutcome&) const = default;

  /// Outcome used whenever the model reply is unusable: do nothing and tell the user.
  static DecisionOutcome failure() {
    DecisionOutcome out;
    out.failed = true;
    out.explanation = std::string(kFailureMessage);
    return out;
  }

  /// Outcome that selects `candidate` with no optional fields, as a random policy would.
  static DecisionOutcome choose(ActionCandidate candidate) {
    DecisionOutcome out;
    out.action = std::move(candidate);
    return out;
  }
};

}  // namespace homellm
