#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The homellm Authors

// Shared helpers for the unit and acceptance suites: fixture paths, a
// random house generator, scripted reply builders, and an independent
// brute-force retrieval oracle.

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "homellm/homellm.hpp"

namespace homellm::testing {

inline std::filesystem::path source_dir() { return HOMELLM_SOURCE_DIR; }
inline std::filesystem::path fixture(const std::string& rel) { return source_dir() / "fixtures" / rel; }
inline std::filesystem::path house_fixture(const std::string& name) { return fixture("houses/" + name + ".house"); }

inline const std::vector<ScenarioSpec>& all_scenarios() {
  static const auto scenarios = load_scenarios(fixture("scenarios"));
  return scenarios;
}

inline const ScenarioSpec& scenario_named(const std::string& name) {
  for (const auto& s : all_scenarios()) {
    if (s.name == name) return s;
  }
  throw std::runtime_error("no scenario " + name);
}

inline const ActionCandidate& candidate_for_device(const std::vector<ActionCandidate>& cands, const std::string& id) {
  for (const auto& c : cands) {
    if (c.device_id && *c.device_id == id) return c;
  }
  throw std::runtime_error("no candidate for device " + id);
}

inline DecisionOutcome device_outcome(const ScenarioSpec& s, const std::string& device_id,
                                      std::optional<int> luminosity = std::nullopt,
                                      std::optional<std::string> explanation = std::nullopt) {
  auto cands = build_actions(s.user_id, s.house);
  auto out = DecisionOutcome::choose(candidate_for_device(cands, device_id));
  out.luminosity = luminosity;
  out.explanation = std::move(explanation);
  return out;
}

/// Deterministic clock advancing 1 ms per reading.
inline ClockFn tick_clock() {
  auto ticks = std::make_shared<std::atomic<long>>(0);
  return [ticks] { return static_cast<double>(ticks->fetch_add(1)) * 1e-3; };
}

// ---------------------------------------------------------------------------
// Random houses

inline HouseState random_house(std::mt19937_64& rng, int max_rooms = 4, int max_devices = 14) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  HouseState s;
  s.clock = Clock(pick(0, 23), pick(0, 59));
  s.inside_temp_c = pick(10, 28);
  s.outside_temp_c = pick(-10, 35);
  if (pick(0, 1)) s.cleaning = {"yesterday", "twice a week"};

  int n_rooms = pick(1, max_rooms);
  for (int r = 0; r < n_rooms; ++r) s.rooms.push_back({fmt::format("room{}", r), fmt::format("Room {}", r), {}});

  static const std::vector<Category> cats = {Category::MainLight,   Category::AuxiliaryLight, Category::Tv,
                                             Category::Curtains,    Category::Hvac,           Category::SmartDoor,
                                             Category::Co2Sensor,   Category::TemperatureSensor,
                                             Category::HumiditySensor, Category::Generic};
  int n_devices = pick(0, max_devices);
  for (int i = 0; i < n_devices; ++i) {
    Device d;
    d.id = fmt::format("dev{}", i);
    d.category = cats[static_cast<std::size_t>(pick(0, static_cast<int>(cats.size()) - 1))];
    d.kind = is_sensor_category(d.category) ? DeviceKind::Sensor : DeviceKind::Actuator;
    if (d.category == Category::Generic && pick(0, 1)) d.kind = DeviceKind::Sensor;
    d.name = fmt::format("{} {}", to_string(d.category), i);
    bool global = d.category == Category::Hvac || d.category == Category::SmartDoor || pick(0, 9) == 0;
    auto& room = s.rooms[static_cast<std::size_t>(pick(0, n_rooms - 1))];
    d.location = global ? std::string(kGlobalLocation) : room.id;
    if (d.kind == DeviceKind::Actuator) {
      auto legal = legal_powers(d.category);
      d.state.power = legal[static_cast<std::size_t>(pick(0, 1))];
      if (is_light(d.category) && pick(0, 1)) d.state.luminosity = pick(0, 100);
      if (d.category == Category::Hvac) d.state.setpoint = pick(16, 26);
    } else {
      d.state.reading = pick(0, 2000);
      d.state.unit = d.category == Category::Generic ? std::string("lux") : std::string(default_unit(d.category));
    }
    if (!global) room.device_ids.push_back(d.id);
    s.devices.push_back(std::move(d));
  }

  int n_users = pick(1, 2);
  for (int u = 1; u <= n_users; ++u) {
    UserState user;
    user.user_id = u;
    user.location = s.rooms[static_cast<std::size_t>(pick(0, n_rooms - 1))].id;
    user.current_activity = "reading";
    if (pick(0, 1)) user.activity_history = {"User was cooking", "User was eating"};
    s.users.push_back(std::move(user));
  }
  if (pick(0, 1)) s.action_history = {"TV is On"};
  return s;
}

// ---------------------------------------------------------------------------
// Scripted replies

inline std::string reply_json(const std::string& action, const std::string& extra = "") {
  return fmt::format(R"({{"reasoning":"scripted","action":"{}"{}}})", action, extra);
}

inline constexpr const char* kProblemsReply = "1. The user needs light\n2. Energy is wasted\n3. Comfort of the user";
inline constexpr const char* kMalformedReply = "I think the best option is to wait and see.";

/// Label of the first candidate the rubric grades 2 when taken bare.
inline std::string grade2_label(const ScenarioSpec& s) {
  for (const auto& c : build_actions(s.user_id, s.house)) {
    if (grade_outcome(s.rubric, DecisionOutcome::choose(c), s.house) == 2) return c.label;
  }
  throw std::runtime_error("no grade-2 candidate in " + s.name);
}

/// Replies consumed by one decision of `style` whose final answer is `final_reply`.
inline std::vector<std::string> script_for(PromptStyle style, const std::string& final_reply) {
  switch (style) {
    case PromptStyle::Direct:
    case PromptStyle::DirectPref: return {final_reply};
    case PromptStyle::OpenQuestion: return {kProblemsReply, final_reply};
    case PromptStyle::ThreeQuestion: return {kProblemsReply, final_reply, final_reply, final_reply};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Retrieval oracle: exact integer cosine comparison on hashed token counts,
// re-derived from the documented embedder definition.

struct SparseCounts {
  std::map<std::size_t, long long> bins;

  long long dot(const SparseCounts& o) const {
    long long d = 0;
    for (const auto& [k, v] : bins) {
      auto it = o.bins.find(k);
      if (it != o.bins.end()) d += v * it->second;
    }
    return d;
  }
  long long norm2() const { return dot(*this); }
};

inline std::uint64_t oracle_fnv(const std::string& s) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ULL;
  return h;
}

inline SparseCounts oracle_counts(const std::string& text) {
  SparseCounts out;
  std::string tok;
  auto flush = [&] {
    if (!tok.empty()) out.bins[oracle_fnv(tok) % 256] += 1;
    tok.clear();
  };
  for (unsigned char c : text) {
    if (std::isalnum(c) || c >= 0x80) {
      tok.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else {
      flush();
    }
  }
  flush();
  if (out.bins.empty()) out.bins[oracle_fnv(text) % 256] = 1;
  return out;
}

/// Indices of the k best entries: higher cosine first, load order on exact ties.
inline std::vector<std::size_t> oracle_top_k(const std::vector<std::string>& store, const std::string& query,
                                             std::size_t k) {
  auto q = oracle_counts(query);
  struct Scored {
    long long dot, norm;
    std::size_t idx;
  };
  std::vector<Scored> all;
  for (std::size_t i = 0; i < store.size(); ++i) {
    auto e = oracle_counts(store[i]);
    all.push_back({e.dot(q), e.norm2(), i});
  }
  // cos_a > cos_b  <=>  dot_a^2 * norm_b > dot_b^2 * norm_a  (dots are >= 0)
  std::stable_sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) {
    return static_cast<__int128>(a.dot) * a.dot * b.norm > static_cast<__int128>(b.dot) * b.dot * a.norm;
  });
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < std::min(k, all.size()); ++i) out.push_back(all[i].idx);
  return out;
}

inline const std::vector<std::string>& oracle_vocabulary() {
  static const std::vector<std::string> words = {
      "light", "lights", "lamp", "turn", "off", "on", "night", "tv", "door", "lock", "heating", "hvac",
      "warm", "cold", "curtains", "open", "close", "sleep", "bed", "dinner", "co2", "air", "window", "user",
      "prefers", "never", "always", "dim", "bright", "morning", "evening", "energy"};
  return words;
}

inline std::string random_sentence(std::mt19937_64& rng) {
  const auto& words = oracle_vocabulary();
  int n = std::uniform_int_distribution<int>(1, 6)(rng);
  std::string s;
  for (int i = 0; i < n; ++i) {
    if (i) s += ' ';
    s += words[std::uniform_int_distribution<std::size_t>(0, words.size() - 1)(rng)];
  }
  return s;
}

// ---------------------------------------------------------------------------
// Rubric fidelity table: hand-labeled outcomes per scenario.

struct LabeledOutcome {
  std::string scenario;
  std::string description;
  std::function<DecisionOutcome(const ScenarioSpec&)> make;
  int expected_grade;
};

inline DecisionOutcome meta_outcome(ActionCandidate c, std::optional<std::string> explanation = std::nullopt) {
  auto out = DecisionOutcome::choose(std::move(c));
  out.explanation = std::move(explanation);
  return out;
}

inline std::vector<LabeledOutcome> rubric_fidelity_table() {
  using S = const ScenarioSpec&;
  auto dev = [](std::string id, std::optional<int> lum = std::nullopt, std::optional<std::string> expl = std::nullopt) {
    return [=](S s) { return device_outcome(s, id, lum, expl); };
  };
  auto interact = [](std::optional<std::string> expl = std::nullopt) {
    return [=](S) { return meta_outcome(ActionCandidate::interact(), expl); };
  };
  auto noop = [](S) { return meta_outcome(ActionCandidate::no_action()); };
  auto failed = [](S) { return DecisionOutcome::failure(); };

  return {
      {"Out of bed at night", "floor lamp on", dev("lr_floor_lamp"), 2},
      {"Out of bed at night", "main light on at 25%", dev("lr_main", 25), 2},
      {"Out of bed at night", "main light on at 80%", dev("lr_main", 80), 1},
      {"Out of bed at night", "main light on", dev("lr_main"), 1},
      {"Out of bed at night", "TV off", dev("lr_tv"), 0},
      {"Out of bed at night", "no action", noop, 0},

      {"Watching TV: late evening", "floor lamp on", dev("lr_floor_lamp"), 2},
      {"Watching TV: late evening", "main light on at 30%", dev("lr_main", 30), 2},
      {"Watching TV: late evening", "main light on", dev("lr_main"), 1},
      {"Watching TV: late evening", "open curtains", dev("lr_curtains"), 1},
      {"Watching TV: late evening", "discuss with the user", interact(), 1},
      {"Watching TV: late evening", "TV off", dev("lr_tv"), 0},
      {"Watching TV: late evening", "no action", noop, 0},

      {"Out from bed issue with CO2", "inform user of risk", interact("CO2 is high, please ventilate"), 2},
      {"Out from bed issue with CO2", "bedside lamp on and inform", dev("br_bedside_lamp", std::nullopt, "CO2 is high"), 1},
      {"Out from bed issue with CO2", "bedside lamp on without informing", dev("br_bedside_lamp"), 0},
      {"Out from bed issue with CO2", "no action", noop, 0},

      {"Going back to bed at night", "bedside lamp on", dev("br_bedside_lamp"), 2},
      {"Going back to bed at night", "main light on at 20%", dev("br_main", 20), 2},
      {"Going back to bed at night", "main light on", dev("br_main"), 1},
      {"Going back to bed at night", "HVAC off", dev("hvac"), 0},
      {"Going back to bed at night", "unlock the door", dev("entrance_door"), 0},

      {"Evening sleeping: TV ON", "turn off TV", dev("lr_tv"), 2},
      {"Evening sleeping: TV ON", "turn off kitchen light", dev("k_main"), 1},
      {"Evening sleeping: TV ON", "turn off HVAC", dev("hvac"), 1},
      {"Evening sleeping: TV ON", "bedside lamp on", dev("br_bedside_lamp"), 0},
      {"Evening sleeping: TV ON", "no action", noop, 0},

      {"At dinner watching TV", "floor lamp on", dev("lr_floor_lamp"), 2},
      {"At dinner watching TV", "open curtains", dev("lr_curtains"), 2},
      {"At dinner watching TV", "turn off main light", dev("lr_main"), 1},
      {"At dinner watching TV", "do nothing", noop, 1},
      {"At dinner watching TV", "failed reply", failed, 1},
      {"At dinner watching TV", "TV off", dev("lr_tv"), 0},

      {"Forgot to turn off TV: user out", "TV off", dev("lr_tv"), 2},
      {"Forgot to turn off TV: user out", "HVAC off", dev("hvac"), 2},
      {"Forgot to turn off TV: user out", "turn off all lights", dev("lr_main"), 1},
      {"Forgot to turn off TV: user out", "unlock door", dev("entrance_door"), 0},
      {"Forgot to turn off TV: user out", "no action", noop, 0},

      {"Too low temperature", "HVAC on", dev("hvac"), 2},
      {"Too low temperature", "HVAC on at 21", [](S s) {
         auto o = device_outcome(s, "hvac");
         o.temperature_setpoint = 21;
         return o;
       }, 2},
      {"Too low temperature", "open curtains", dev("lr_curtains"), 1},
      {"Too low temperature", "main light on", dev("lr_main"), 0},
      {"Too low temperature", "no action", noop, 0},

      {"Low luminosity day", "open curtains", dev("lr_curtains"), 2},
      {"Low luminosity day", "main light on", dev("lr_main"), 1},
      {"Low luminosity day", "floor lamp on", dev("lr_floor_lamp"), 1},
      {"Low luminosity day", "TV on", dev("lr_tv"), 0},
      {"Low luminosity day", "no action", noop, 0},

      {"Failed curtains", "main light on", dev("lr_main"), 2},
      {"Failed curtains", "floor lamp on", dev("lr_floor_lamp"), 2},
      {"Failed curtains", "open curtains", dev("lr_curtains"), 1},
      {"Failed curtains", "HVAC off", dev("hvac"), 0},
      {"Failed curtains", "no action", noop, 0},

      {"Forgot to turn off lights", "living room main off", dev("lr_main"), 2},
      {"Forgot to turn off lights", "bedroom main off", dev("br_main"), 2},
      {"Forgot to turn off lights", "HVAC off", dev("hvac"), 2},
      {"Forgot to turn off lights", "kitchen main on", dev("k_main"), 0},
      {"Forgot to turn off lights", "close curtains", dev("k_curtains"), 0},
      {"Forgot to turn off lights", "no action", noop, 0},
  };
}

/// Hand-counted (rated 1, rated 2, total) per scenario, for the random baseline.
inline const std::map<std::string, RubricCounts>& expected_rubric_counts() {
  static const std::map<std::string, RubricCounts> table = {
      {"Out of bed at night", {1, 1, 8}},
      {"Watching TV: late evening", {3, 1, 8}},
      {"Out from bed issue with CO2", {0, 1, 7}},
      {"Going back to bed at night", {1, 1, 6}},
      {"Evening sleeping: TV ON", {2, 1, 9}},
      {"At dinner watching TV", {2, 2, 8}},
      {"Forgot to turn off TV: user out", {1, 2, 6}},
      {"Too low temperature", {1, 1, 8}},
      {"Low luminosity day", {2, 1, 8}},
      {"Failed curtains", {1, 2, 8}},
      {"Forgot to turn off lights", {0, 4, 9}},
  };
  return table;
}

/// A loopback port with nothing listening on it: bound, read back, closed.
inline int closed_port() {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw std::runtime_error("socket() failed");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  socklen_t len = sizeof addr;
  if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
      ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len) != 0) {
    ::close(fd);
    throw std::runtime_error("bind() failed");
  }
  ::close(fd);
  return ntohs(addr.sin_port);
}

}  // namespace homellm::testing
