#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The homellm Authors

/**
 * @file action_builder.hpp
 * @brief Builds the reduced list of actions offered to the model.
 *
 * An actuator is offered when it sits in the user's room, is global, or is
 * currently in its active position (anything on may be switched off).
 * Sensors are never offered. "Interact with user" and "No action required"
 * always close the list, in that order.
 */

#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "homellm/errors.hpp"
#include "homellm/home_model.hpp"
#include "homellm/outcome.hpp"

namespace homellm {

inline bool is_eligible(const Device& d, const RoomId& user_room) {
  if (d.kind != DeviceKind::Actuator || !d.state.power) return false;
  return d.location == user_room || d.is_global() || is_active(*d.state.power);
}

inline std::vector<ActionCandidate> build_actions(int user_id, const HouseState& state) {
  const UserState* user = state.find_user(user_id);
  if (!user) throw BuildError(fmt::format("unknown user id {}", user_id));

  std::vector<const Device*> eligible;
  std::map<std::string, int> name_uses;
  for (const auto& d : state.devices) {
    if (!is_eligible(d, user->location)) continue;
    eligible.push_back(&d);
    ++name_uses[d.name];
  }

  std::vector<ActionCandidate> out;
  out.reserve(eligible.size() + 2);
  for (const Device* d : eligible) {
    // Qualify with the room when two offered devices share a display name.
    std::string subject = d->name;
    if (name_uses[d->name] > 1) {
      const Room* room = state.find_room(d->location);
      subject = fmt::format("{} in {}", d->name, room ? room->name : std::string("the house"));
    }
    ActionCandidate c;
    c.code = ActionCode::DeviceToggle;
    c.label = fmt::format("{} is {}", subject, to_string(*d->state.power));
    c.device_id = d->id;
    c.subject = std::move(subject);
    out.push_back(std::move(c));
  }
  out.push_back(ActionCandidate::interact());
  out.push_back(ActionCandidate::no_action());
  return out;
}

/// Size of the action list with no filtering: every actuator plus the two meta actions.
inline std::size_t unfiltered_action_count(const HouseState& state) { return state.actuator_count() + 2; }

/// Exact non-negative fraction in lowest terms.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t n, std::int64_t d) {
    if (d == 0) throw PreconditionError("zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    auto g = std::gcd(n, d);
    if (g == 0) g = 1;
    return {n / g, d / g};
  }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool operator==(const Rational&) const = default;
};

struct RubricCounts {
  int n_rated_1 = 0;
  int n_rated_2 = 0;
  int n_total = 0;

  bool operator==(const RubricCounts&) const = default;
};

/// Expected grade of a uniformly random pick from the action list.
inline Rational baseline_grade(const RubricCounts& c) {
  if (c.n_total <= 0) throw PreconditionError("baseline over an empty action list");
  if (c.n_rated_1 < 0 || c.n_rated_2 < 0 || c.n_rated_1 + c.n_rated_2 > c.n_total) {
    throw PreconditionError(
        fmt::format("inconsistent rubric counts {}/{}/{}", c.n_rated_1, c.n_rated_2, c.n_total));
  }
  return Rational::make(c.n_rated_1 + 2 * c.n_rated_2, c.n_total);
}

/// Seeded uniform chooser; each instance owns its engine.
class RandomPolicy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : engine_(seed) {}

  const ActionCandidate& choose(std::span<const ActionCandidate> candidates) {
    if (candidates.empty()) throw PreconditionError("random policy over an empty list");
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    return candidates[pick(engine_)];
  }

 private:
  std::mt19937_64 engine_;
};

/// One uniform draw, reproducible for a given seed.
inline ActionCandidate random_policy(std::uint64_t seed, std::span<const ActionCandidate> candidates) {
  RandomPolicy policy(seed);
  return policy.choose(candidates);
}

}  // namespace homellm
