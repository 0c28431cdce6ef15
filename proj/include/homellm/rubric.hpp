#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The homellm Authors

/**
 * @file rubric.hpp
 * @brief Grading rules for scenario outcomes.
 *
 * A rubric is a list of rules ordered grade 2 before grade 1; the first
 * matching rule gives the grade and anything else scores 0. Matchers are
 * JSON documents:
 *
 *   {"any_of": [m, ...]}          disjunction
 *   {"all_of": [m, ...]}          conjunction
 *   {"action": "device"|"interact"|"noop",
 *    "categories": ["main_light", ...],   device category in set
 *    "names": ["TV", ...],                device display name in set
 *    "room": "livingroom",                device located in room
 *    "to": "On",                          power position after the toggle
 *    "luminosity_max": 50,                luminosity present and <= value
 *    "explanation_required": true}        non-empty explanation
 *
 * All leaf fields are optional; device fields never match a non-device outcome.
 */

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "homellm/errors.hpp"
#include "homellm/home_model.hpp"
#include "homellm/outcome.hpp"

namespace homellm {

struct Matcher {
  enum class Op { Leaf, AnyOf, AllOf };

  Op op = Op::Leaf;
  std::vector<Matcher> children;

  std::optional<ActionCode> action;
  std::vector<Category> categories;
  std::vector<std::string> names;
  std::optional<RoomId> room;
  std::optional<Power> to;
  std::optional<int> luminosity_max;
  bool explanation_required = false;

  bool needs_device() const {
    return !categories.empty() || !names.empty() || room || to || luminosity_max;
  }

  bool matches(const DecisionOutcome& outcome, const HouseState& state) const {
    switch (op) {
      case Op::AnyOf:
        return std::any_of(children.begin(), children.end(),
                           [&](const Matcher& m) { return m.matches(outcome, state); });
      case Op::AllOf:
        return std::all_of(children.begin(), children.end(),
                           [&](const Matcher& m) { return m.matches(outcome, state); });
      case Op::Leaf:
        break;
    }
    if (action && outcome.action.code != *action) return false;
    if (explanation_required && (!outcome.explanation || outcome.explanation->empty())) return false;
    if (luminosity_max && (!outcome.luminosity || *outcome.luminosity > *luminosity_max)) return false;
    if (!needs_device()) return true;

    if (outcome.action.code != ActionCode::DeviceToggle || !outcome.action.device_id) return false;
    const Device* d = state.find_device(*outcome.action.device_id);
    if (!d || !d->state.power) return false;
    if (!categories.empty() && std::find(categories.begin(), categories.end(), d->category) == categories.end()) {
      return false;
    }
    if (!names.empty() && std::find(names.begin(), names.end(), d->name) == names.end()) return false;
    if (room && d->location != *room) return false;
    if (to && toggled(*d->state.power) != *to) return false;
    return true;
  }
};

struct RubricRule {
  int grade = 0;
  Matcher when;
};

using Rubric = std::vector<RubricRule>;

/// Grade in {0, 1, 2}. Pure in its arguments.
inline int grade_outcome(const Rubric& rubric, const DecisionOutcome& outcome, const HouseState& state) {
  for (const auto& rule : rubric) {
    if (rule.when.matches(outcome, state)) return rule.grade;
  }
  return 0;
}

namespace detail {

inline Matcher parse_matcher(const nlohmann::json& j, const std::string& where) {
  auto fail = [&](const std::string& what) -> Matcher { throw LoadError(fmt::format("{}: {}", where, what)); };
  if (!j.is_object()) return fail("matcher must be an object");

  Matcher m;
  for (const char* key : {"any_of", "all_of"}) {
    if (!j.contains(key)) continue;
    if (j.size() != 1) return fail(fmt::format("'{}' cannot be combined with other keys", key));
    const auto& list = j.at(key);
    if (!list.is_array() || list.empty()) return fail(fmt::format("'{}' needs a non-empty array", key));
    m.op = std::string_view(key) == "any_of" ? Matcher::Op::AnyOf : Matcher::Op::AllOf;
    for (std::size_t i = 0; i < list.size(); ++i) {
      m.children.push_back(parse_matcher(list[i], fmt::format("{}.{}[{}]", where, key, i)));
    }
    return m;
  }

  for (const auto& [key, value] : j.items()) {
    if (key == "action") {
      auto s = value.is_string() ? value.get<std::string>() : std::string();
      if (s == "device") m.action = ActionCode::DeviceToggle;
      else if (s == "interact") m.action = ActionCode::InteractWithUser;
      else if (s == "noop") m.action = ActionCode::NoAction;
      else return fail(fmt::format("unknown action kind {}", value.dump()));
    } else if (key == "categories") {
      if (!value.is_array()) return fail("'categories' must be an array");
      for (const auto& c : value) {
        auto cat = c.is_string() ? parse_category(c.get<std::string>()) : std::nullopt;
        if (!cat) return fail(fmt::format("unknown category {}", c.dump()));
        m.categories.push_back(*cat);
      }
    } else if (key == "names") {
      if (!value.is_array()) return fail("'names' must be an array");
      for (const auto& n : value) {
        if (!n.is_string()) return fail("'names' entries must be strings");
        m.names.push_back(n.get<std::string>());
      }
    } else if (key == "room") {
      if (!value.is_string()) return fail("'room' must be a string");
      m.room = value.get<std::string>();
    } else if (key == "to") {
      auto p = value.is_string() ? parse_power(value.get<std::string>()) : std::nullopt;
      if (!p) return fail(fmt::format("unknown power {}", value.dump()));
      m.to = *p;
    } else if (key == "luminosity_max") {
      if (!value.is_number_integer()) return fail("'luminosity_max' must be an integer");
      m.luminosity_max = value.get<int>();
    } else if (key == "explanation_required") {
      if (!value.is_boolean()) return fail("'explanation_required' must be a boolean");
      m.explanation_required = value.get<bool>();
    } else {
      return fail(fmt::format("unknown matcher key '{}'", key));
    }
  }
  if (m.action && *m.action != ActionCode::DeviceToggle && m.needs_device()) {
    return fail("device constraints on a non-device action never match");
  }
  return m;
}

}  // namespace detail

inline Rubric parse_rubric(const nlohmann::json& j, const std::string& where = "rubric") {
  if (!j.is_array()) throw LoadError(fmt::format("{}: expected an array of rules", where));
  Rubric rubric;
  int last_grade = 3;
  for (std::size_t i = 0; i < j.size(); ++i) {
    auto rule_where = fmt::format("{}[{}]", where, i);
    const auto& r = j[i];
    if (!r.is_object() || !r.contains("grade") || !r.contains("when")) {
      throw LoadError(fmt::format("{}: rule needs 'grade' and 'when'", rule_where));
    }
    if (!r.at("grade").is_number_integer()) throw LoadError(fmt::format("{}.grade: expected 1 or 2", rule_where));
    int grade = r.at("grade").get<int>();
    if (grade != 1 && grade != 2) throw LoadError(fmt::format("{}.grade: expected 1 or 2", rule_where));
    if (grade > last_grade) throw LoadError(fmt::format("{}: rules must be ordered grade 2 before grade 1", rule_where));
    last_grade = grade;
    rubric.push_back({grade, detail::parse_matcher(r.at("when"), rule_where + ".when")});
  }
  return rubric;
}

}  // namespace homellm
