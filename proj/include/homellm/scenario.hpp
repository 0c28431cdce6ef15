#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The homellm Authors

// Benchmark scenarios: a house fixture, the user the decision is for, and a
// grading rubric. Scenario files are JSON:
//
//   {"index": 1, "name": "Out of bed at night", "category": "Safety",
//    "house": "../houses/out_of_bed_night.house", "user_id": 1,
//    "noop_grade": 0, "rubric": [...]}
//
// "house" is resolved relative to the scenario file. "noop_grade" is the
// grade the rubric is expected to give "No action required".

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "homellm/action_builder.hpp"
#include "homellm/errors.hpp"
#include "homellm/home_model.hpp"
#include "homellm/rubric.hpp"

namespace homellm {

enum class ScenarioCategory { Safety, Comfort, Preference };

inline constexpr std::array<ScenarioCategory, 3> kAllCategories = {ScenarioCategory::Safety, ScenarioCategory::Comfort,
                                                                   ScenarioCategory::Preference};

inline std::string_view to_string(ScenarioCategory c) {
  switch (c) {
    case ScenarioCategory::Safety: return "Safety";
    case ScenarioCategory::Comfort: return "Comfort";
    case ScenarioCategory::Preference: return "Preference";
  }
  return "?";
}

inline std::optional<ScenarioCategory> parse_scenario_category(std::string_view s) {
  for (auto c : kAllCategories) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

struct ScenarioCatalogEntry {
  std::string_view name;
  ScenarioCategory category;
};

/// The eleven benchmark scenarios, in benchmark order.
inline constexpr std::array<ScenarioCatalogEntry, 11> kScenarioCatalog = {{
    {"Out of bed at night", ScenarioCategory::Safety},
    {"Watching TV: late evening", ScenarioCategory::Comfort},
    {"Out from bed issue with CO2", ScenarioCategory::Safety},
    {"Going back to bed at night", ScenarioCategory::Safety},
    {"Evening sleeping: TV ON", ScenarioCategory::Preference},
    {"At dinner watching TV", ScenarioCategory::Preference},
    {"Forgot to turn off TV: user out", ScenarioCategory::Comfort},
    {"Too low temperature", ScenarioCategory::Preference},
    {"Low luminosity day", ScenarioCategory::Preference},
    {"Failed curtains", ScenarioCategory::Comfort},
    {"Forgot to turn off lights", ScenarioCategory::Preference},
}};

struct ScenarioSpec {
  int index = 0;
  std::string name;
  ScenarioCategory category = ScenarioCategory::Safety;
  std::filesystem::path house_path;
  HouseState house;
  int user_id = 0;
  Rubric rubric;
  int noop_grade = 0;
};

inline ScenarioSpec load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(fmt::format("{}: cannot open scenario file", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  auto j = nlohmann::json::parse(buf.str(), nullptr, false);
  const auto src = path.string();
  auto fail = [&](const std::string& what) -> ScenarioSpec { throw LoadError(fmt::format("{}: {}", src, what)); };
  if (j.is_discarded() || !j.is_object()) return fail("malformed JSON");

  ScenarioSpec s;
  try {
    s.index = j.at("index").get<int>();
    s.name = j.at("name").get<std::string>();
    auto cat = parse_scenario_category(j.at("category").get<std::string>());
    if (!cat) return fail("unknown category");
    s.category = *cat;
    s.user_id = j.at("user_id").get<int>();
    s.noop_grade = j.value("noop_grade", 0);
    s.house_path = path.parent_path() / j.at("house").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    return fail(e.what());
  }

  auto known = std::find_if(kScenarioCatalog.begin(), kScenarioCatalog.end(),
                            [&](const ScenarioCatalogEntry& e) { return e.name == s.name; });
  if (known == kScenarioCatalog.end()) return fail(fmt::format("unknown scenario name '{}'", s.name));
  if (known->category != s.category) return fail(fmt::format("scenario '{}' has the wrong category", s.name));

  s.house = load_house(s.house_path);
  if (!s.house.find_user(s.user_id)) return fail(fmt::format("user {} not in house", s.user_id));
  s.rubric = parse_rubric(j.contains("rubric") ? j.at("rubric") : nlohmann::json(), src + ": rubric");
  return s;
}

/// Every `*.scenario` file in `dir`, sorted by index.
inline std::vector<ScenarioSpec> load_scenarios(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw LoadError(fmt::format("{}: not a directory", dir.string()));
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".scenario") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ScenarioSpec> out;
  for (const auto& f : files) out.push_back(load_scenario(f));
  std::sort(out.begin(), out.end(), [](const ScenarioSpec& a, const ScenarioSpec& b) { return a.index < b.index; });
  return out;
}

/// Grades every offered action, taken bare (no optional keys), with the scenario rubric.
inline RubricCounts rubric_counts(const ScenarioSpec& s) {
  auto candidates = build_actions(s.user_id, s.house);
  RubricCounts c;
  c.n_total = static_cast<int>(candidates.size());
  for (const auto& cand : candidates) {
    int g = grade_outcome(s.rubric, DecisionOutcome::choose(cand), s.house);
    if (g == 1) ++c.n_rated_1;
    if (g == 2) ++c.n_rated_2;
  }
  return c;
}

}  // namespace homellm
