#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The homellm Authors

/**
 * @file home_model.hpp
 * @brief Immutable value model of a smart home snapshot.
 *
 * A HouseState is loaded once from a house file (JSON) and never mutated;
 * apply_outcome() returns a new snapshot. Devices keep their declaration
 * order, which drives rendering and action-list order.
 */

#include <algorithm>
#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "homellm/errors.hpp"
#include "homellm/outcome.hpp"

namespace homellm {

using RoomId = std::string;

/// Location value used by devices that belong to the whole house.
inline constexpr std::string_view kGlobalLocation = "global";

enum class DeviceKind { Sensor, Actuator };

enum class Category {
  MainLight,
  AuxiliaryLight,
  Tv,
  Curtains,
  Hvac,
  SmartDoor,
  Co2Sensor,
  TemperatureSensor,
  HumiditySensor,
  Generic,
};

enum class Power { On, Off, Open, Closed, Locked, Unlocked };

namespace detail {

template <typename E, std::size_t N>
struct EnumNames {
  std::array<std::pair<E, std::string_view>, N> items;

  constexpr std::string_view name(E e) const {
    for (const auto& [value, text] : items) {
      if (value == e) return text;
    }
    return "?";
  }
  constexpr std::optional<E> parse(std::string_view text) const {
    for (const auto& [value, name] : items) {
      if (name == text) return value;
    }
    return std::nullopt;
  }
};

inline constexpr EnumNames<DeviceKind, 2> kKindNames{{{
    {DeviceKind::Sensor, "sensor"},
    {DeviceKind::Actuator, "actuator"},
}}};

inline constexpr EnumNames<Category, 10> kCategoryNames{{{
    {Category::MainLight, "main_light"},
    {Category::AuxiliaryLight, "auxiliary_light"},
    {Category::Tv, "tv"},
    {Category::Curtains, "curtains"},
    {Category::Hvac, "hvac"},
    {Category::SmartDoor, "smart_door"},
    {Category::Co2Sensor, "co2_sensor"},
    {Category::TemperatureSensor, "temperature_sensor"},
    {Category::HumiditySensor, "humidity_sensor"},
    {Category::Generic, "generic"},
}}};

inline constexpr EnumNames<Power, 6> kPowerNames{{{
    {Power::On, "On"},
    {Power::Off, "Off"},
    {Power::Open, "Open"},
    {Power::Closed, "Closed"},
    {Power::Locked, "Locked"},
    {Power::Unlocked, "Unlocked"},
}}};

}  // namespace detail

inline std::string_view to_string(DeviceKind k) { return detail::kKindNames.name(k); }
inline std::string_view to_string(Category c) { return detail::kCategoryNames.name(c); }
inline std::string_view to_string(Power p) { return detail::kPowerNames.name(p); }

inline std::optional<DeviceKind> parse_kind(std::string_view s) { return detail::kKindNames.parse(s); }
inline std::optional<Category> parse_category(std::string_view s) { return detail::kCategoryNames.parse(s); }
inline std::optional<Power> parse_power(std::string_view s) { return detail::kPowerNames.parse(s); }

inline bool is_light(Category c) { return c == Category::MainLight || c == Category::AuxiliaryLight; }

inline bool is_sensor_category(Category c) {
  return c == Category::Co2Sensor || c == Category::TemperatureSensor || c == Category::HumiditySensor;
}

/// "Active" is the switched-on position: On, Open or Unlocked.
inline bool is_active(Power p) { return p == Power::On || p == Power::Open || p == Power::Unlocked; }

inline Power toggled(Power p) {
  switch (p) {
    case Power::On: return Power::Off;
    case Power::Off: return Power::On;
    case Power::Open: return Power::Closed;
    case Power::Closed: return Power::Open;
    case Power::Locked: return Power::Unlocked;
    case Power::Unlocked: return Power::Locked;
  }
  return p;
}

/// Power positions a category may take.
inline std::vector<Power> legal_powers(Category c) {
  switch (c) {
    case Category::Curtains: return {Power::Open, Power::Closed};
    case Category::SmartDoor: return {Power::Locked, Power::Unlocked};
    default: return {Power::On, Power::Off};
  }
}

inline std::string_view default_unit(Category c) {
  switch (c) {
    case Category::Co2Sensor: return "ppm";
    case Category::TemperatureSensor: return "°C";
    case Category::HumiditySensor: return "%";
    default: return "";
  }
}

struct DeviceState {
  std::optional<Power> power;
  std::optional<int> luminosity;  // percent, lights only
  std::optional<int> setpoint;    // °C, HVAC only
  std::optional<double> reading;  // sensors only
  std::string unit;               // unit of `reading`

  bool operator==(const DeviceState&) const = default;
};

struct Device {
  std::string id;
  std::string name;
  DeviceKind kind = DeviceKind::Actuator;
  Category category = Category::Generic;
  /// Room id or kGlobalLocation.
  std::string location;
  DeviceState state;

  bool is_global() const { return location == kGlobalLocation; }
  bool operator==(const Device&) const = default;
};

struct Room {
  RoomId id;
  std::string name;
  std::vector<std::string> device_ids;  // declaration order

  bool operator==(const Room&) const = default;
};

struct UserState {
  int user_id = 0;
  RoomId location;
  std::string current_activity;
  std::vector<std::string> activity_history;  // oldest first

  bool operator==(const UserState&) const = default;
};

/// Wall-clock time of day, no timezone.
class Clock {
 public:
  Clock() = default;
  Clock(int hour, int minute) : minutes_(hour * 60 + minute) {
    if (hour < 0 || hour > 23 || minute < 0 || minute > 59) {
      throw PreconditionError(fmt::format("invalid time {}:{}", hour, minute));
    }
  }

  /// Parses 24-hour "HH:MM".
  static std::optional<Clock> parse(std::string_view text) {
    int h = 0, m = 0;
    char colon = 0;
    std::istringstream in{std::string(text)};
    if (!(in >> h >> colon >> m) || colon != ':' || !in.eof()) return std::nullopt;
    if (h < 0 || h > 23 || m < 0 || m > 59) return std::nullopt;
    return Clock(h, m);
  }

  int hour() const { return minutes_ / 60; }
  int minute() const { return minutes_ % 60; }

  std::string to_24h() const { return fmt::format("{:02}:{:02}", hour(), minute()); }

  /// "10:21 PM"
  std::string to_12h() const {
    int h12 = hour() % 12;
    if (h12 == 0) h12 = 12;
    return fmt::format("{}:{:02} {}", h12, minute(), hour() < 12 ? "AM" : "PM");
  }

  bool operator==(const Clock&) const = default;

 private:
  int minutes_ = 0;
};

struct CleaningNote {
  std::string last_cleaned;  // "today"
  std::string cadence;       // "one time a week"

  bool operator==(const CleaningNote&) const = default;
};

struct HouseState {
  std::vector<Room> rooms;
  std::vector<Device> devices;  // declaration order, ids unique
  std::vector<UserState> users;
  std::vector<std::string> action_history;
  Clock clock;
  int inside_temp_c = 0;
  int outside_temp_c = 0;
  CleaningNote cleaning;

  bool operator==(const HouseState&) const = default;

  const Device* find_device(std::string_view id) const {
    auto it = std::find_if(devices.begin(), devices.end(), [&](const Device& d) { return d.id == id; });
    return it == devices.end() ? nullptr : &*it;
  }

  const Room* find_room(std::string_view id) const {
    auto it = std::find_if(rooms.begin(), rooms.end(), [&](const Room& r) { return r.id == id; });
    return it == rooms.end() ? nullptr : &*it;
  }

  const UserState* find_user(int user_id) const {
    auto it = std::find_if(users.begin(), users.end(), [&](const UserState& u) { return u.user_id == user_id; });
    return it == users.end() ? nullptr : &*it;
  }

  std::vector<const Device*> global_devices() const {
    std::vector<const Device*> out;
    for (const auto& d : devices) {
      if (d.is_global()) out.push_back(&d);
    }
    return out;
  }

  std::size_t actuator_count() const {
    return static_cast<std::size_t>(
        std::count_if(devices.begin(), devices.end(), [](const Device& d) { return d.kind == DeviceKind::Actuator; }));
  }
};

// ---------------------------------------------------------------------------
// Serialization

namespace detail {

using nlohmann::json;

class HouseReader {
 public:
  explicit HouseReader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& where, const std::string& what) const {
    throw LoadError(fmt::format("{}: {}: {}", source_, where, what));
  }

  const json& require(const json& obj, const std::string& where, const char* key) const {
    if (!obj.is_object()) fail(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(where, fmt::format("missing field '{}'", key));
    return *it;
  }

  std::string string_field(const json& obj, const std::string& where, const char* key) const {
    const auto& v = require(obj, where, key);
    if (!v.is_string()) fail(where + "." + key, "expected a string");
    return v.get<std::string>();
  }

  int int_field(const json& v, const std::string& where) const {
    if (!v.is_number_integer()) fail(where, "expected an integer");
    return v.get<int>();
  }

  std::vector<std::string> string_list(const json& obj, const std::string& where, const char* key) const {
    std::vector<std::string> out;
    auto it = obj.find(key);
    if (it == obj.end()) return out;
    if (!it->is_array()) fail(where + "." + key, "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_string()) fail(fmt::format("{}.{}[{}]", where, key, i), "expected a string");
      out.push_back((*it)[i].get<std::string>());
    }
    return out;
  }

  Device device(const json& j, const std::string& where) const {
    Device d;
    d.id = string_field(j, where, "id");
    if (d.id.empty()) fail(where + ".id", "must not be empty");
    d.name = string_field(j, where, "name");
    if (d.name.empty()) fail(where + ".name", "must not be empty");

    auto kind_text = string_field(j, where, "kind");
    auto kind = parse_kind(kind_text);
    if (!kind) fail(where + ".kind", fmt::format("unknown kind '{}'", kind_text));
    d.kind = *kind;

    auto cat_text = string_field(j, where, "category");
    auto cat = parse_category(cat_text);
    if (!cat) fail(where + ".category", fmt::format("unknown category '{}'", cat_text));
    d.category = *cat;

    if (is_sensor_category(d.category) && d.kind != DeviceKind::Sensor) {
      fail(where + ".kind", fmt::format("category '{}' requires kind 'sensor'", cat_text));
    }
    if (d.kind == DeviceKind::Sensor && d.category != Category::Generic && !is_sensor_category(d.category)) {
      fail(where + ".kind", fmt::format("category '{}' requires kind 'actuator'", cat_text));
    }

    d.location = string_field(j, where, "location");

    if (d.kind == DeviceKind::Actuator) {
      auto power_text = string_field(j, where, "power");
      auto power = parse_power(power_text);
      auto legal = legal_powers(d.category);
      if (!power || std::find(legal.begin(), legal.end(), *power) == legal.end()) {
        fail(where + ".power", fmt::format("illegal power '{}' for category '{}'", power_text, cat_text));
      }
      d.state.power = *power;
    } else if (j.contains("power")) {
      fail(where + ".power", "sensors have no power state");
    }

    if (auto it = j.find("luminosity"); it != j.end()) {
      if (!is_light(d.category)) fail(where + ".luminosity", "only lights have a luminosity");
      int lum = int_field(*it, where + ".luminosity");
      if (lum < 0 || lum > 100) fail(where + ".luminosity", "must be within 0..100");
      d.state.luminosity = lum;
    }
    if (auto it = j.find("setpoint"); it != j.end()) {
      if (d.category != Category::Hvac) fail(where + ".setpoint", "only HVAC has a setpoint");
      d.state.setpoint = int_field(*it, where + ".setpoint");
    }
    if (auto it = j.find("reading"); it != j.end()) {
      if (d.kind != DeviceKind::Sensor) fail(where + ".reading", "only sensors have a reading");
      if (!it->is_number()) fail(where + ".reading", "expected a number");
      d.state.reading = it->get<double>();
      if (d.category == Category::Co2Sensor && *d.state.reading < 0) fail(where + ".reading", "ppm must be >= 0");
    } else if (d.kind == DeviceKind::Sensor) {
      fail(where, "missing field 'reading'");
    }
    if (auto it = j.find("unit"); it != j.end()) {
      if (!it->is_string()) fail(where + ".unit", "expected a string");
      d.state.unit = it->get<std::string>();
    } else if (d.kind == DeviceKind::Sensor) {
      d.state.unit = std::string(default_unit(d.category));
    }
    return d;
  }

  HouseState house(const json& doc) const {
    if (!doc.is_object()) fail("$", "expected a JSON object");
    HouseState s;

    auto clock_text = string_field(doc, "$", "clock");
    auto clock = Clock::parse(clock_text);
    if (!clock) fail("$.clock", fmt::format("expected HH:MM, got '{}'", clock_text));
    s.clock = *clock;
    s.inside_temp_c = int_field(require(doc, "$", "inside_temp_c"), "$.inside_temp_c");
    s.outside_temp_c = int_field(require(doc, "$", "outside_temp_c"), "$.outside_temp_c");

    if (auto it = doc.find("cleaning"); it != doc.end()) {
      s.cleaning.last_cleaned = string_field(*it, "$.cleaning", "last_cleaned");
      s.cleaning.cadence = string_field(*it, "$.cleaning", "cadence");
    }

    const auto& rooms = require(doc, "$", "rooms");
    if (!rooms.is_array()) fail("$.rooms", "expected an array");
    std::set<std::string> room_ids;
    for (std::size_t i = 0; i < rooms.size(); ++i) {
      auto where = fmt::format("$.rooms[{}]", i);
      Room r;
      r.id = string_field(rooms[i], where, "id");
      r.name = string_field(rooms[i], where, "name");
      if (r.id.empty() || r.id == kGlobalLocation) fail(where + ".id", fmt::format("invalid room id '{}'", r.id));
      if (!room_ids.insert(r.id).second) fail(where + ".id", fmt::format("duplicate room id '{}'", r.id));
      s.rooms.push_back(std::move(r));
    }

    const auto& devices = require(doc, "$", "devices");
    if (!devices.is_array()) fail("$.devices", "expected an array");
    std::set<std::string> device_ids;
    for (std::size_t i = 0; i < devices.size(); ++i) {
      auto where = fmt::format("$.devices[{}]", i);
      Device d = device(devices[i], where);
      if (!device_ids.insert(d.id).second) fail(where + ".id", fmt::format("duplicate device id '{}'", d.id));
      if (!d.is_global()) {
        auto room = std::find_if(s.rooms.begin(), s.rooms.end(), [&](const Room& r) { return r.id == d.location; });
        if (room == s.rooms.end()) fail(where + ".location", fmt::format("unknown room '{}'", d.location));
        room->device_ids.push_back(d.id);
      }
      s.devices.push_back(std::move(d));
    }

    const auto& users = require(doc, "$", "users");
    if (!users.is_array()) fail("$.users", "expected an array");
    std::set<int> user_ids;
    for (std::size_t i = 0; i < users.size(); ++i) {
      auto where = fmt::format("$.users[{}]", i);
      UserState u;
      u.user_id = int_field(require(users[i], where, "user_id"), where + ".user_id");
      if (!user_ids.insert(u.user_id).second) fail(where + ".user_id", "duplicate user id");
      u.location = string_field(users[i], where, "location");
      if (!room_ids.count(u.location)) fail(where + ".location", fmt::format("unknown room '{}'", u.location));
      u.current_activity = string_field(users[i], where, "current_activity");
      u.activity_history = string_list(users[i], where, "activity_history");
      s.users.push_back(std::move(u));
    }

    s.action_history = string_list(doc, "$", "action_history");
    return s;
  }

 private:
  std::string source_;
};

inline nlohmann::ordered_json device_to_json(const Device& d) {
  nlohmann::ordered_json j;
  j["id"] = d.id;
  j["name"] = d.name;
  j["kind"] = to_string(d.kind);
  j["category"] = to_string(d.category);
  j["location"] = d.location;
  if (d.state.power) j["power"] = to_string(*d.state.power);
  if (d.state.luminosity) j["luminosity"] = *d.state.luminosity;
  if (d.state.setpoint) j["setpoint"] = *d.state.setpoint;
  if (d.state.reading) j["reading"] = *d.state.reading;
  if (d.kind == DeviceKind::Sensor) j["unit"] = d.state.unit;
  return j;
}

}  // namespace detail

/// Parses a house document. `source` names the origin in error messages.
inline HouseState parse_house(const nlohmann::json& doc, const std::string& source = "<memory>") {
  return detail::HouseReader(source).house(doc);
}

inline HouseState parse_house_text(std::string_view text, const std::string& source = "<memory>") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError(fmt::format("{}: malformed JSON: {}", source, e.what()));
  }
  return parse_house(doc, source);
}

inline HouseState load_house(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(fmt::format("{}: cannot open house file", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_house_text(buf.str(), path.string());
}

/// House document in the same schema load_house() reads.
inline nlohmann::ordered_json house_to_json(const HouseState& s) {
  nlohmann::ordered_json j;
  j["clock"] = s.clock.to_24h();
  j["inside_temp_c"] = s.inside_temp_c;
  j["outside_temp_c"] = s.outside_temp_c;
  j["cleaning"] = {{"last_cleaned", s.cleaning.last_cleaned}, {"cadence", s.cleaning.cadence}};
  j["rooms"] = nlohmann::ordered_json::array();
  for (const auto& r : s.rooms) j["rooms"].push_back({{"id", r.id}, {"name", r.name}});
  j["devices"] = nlohmann::ordered_json::array();
  for (const auto& d : s.devices) j["devices"].push_back(detail::device_to_json(d));
  j["users"] = nlohmann::ordered_json::array();
  for (const auto& u : s.users) {
    j["users"].push_back({{"user_id", u.user_id},
                          {"location", u.location},
                          {"current_activity", u.current_activity},
                          {"activity_history", u.activity_history}});
  }
  j["action_history"] = s.action_history;
  return j;
}

inline void save_house(const HouseState& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("{}: cannot write house file", path.string()));
  out << house_to_json(s).dump(2) << '\n';
}

/**
 * Returns the snapshot that results from executing `outcome`.
 *
 * Device actions toggle the power position and apply the optional
 * luminosity (lights) or setpoint (HVAC). Every outcome appends its
 * action label to the action history. The input is left untouched.
 */
inline HouseState apply_outcome(const HouseState& state, const DecisionOutcome& outcome) {
  HouseState next = state;
  if (outcome.action.code == ActionCode::DeviceToggle) {
    if (!outcome.action.device_id) throw ApplyError("device action without a device id");
    auto it = std::find_if(next.devices.begin(), next.devices.end(),
                           [&](const Device& d) { return d.id == *outcome.action.device_id; });
    if (it == next.devices.end()) {
      throw ApplyError(fmt::format("unknown device '{}'", *outcome.action.device_id));
    }
    if (it->kind != DeviceKind::Actuator || !it->state.power) {
      throw ApplyError(fmt::format("device '{}' is not an actuator", it->id));
    }
    it->state.power = toggled(*it->state.power);
    if (outcome.luminosity && is_light(it->category)) it->state.luminosity = *outcome.luminosity;
    if (outcome.temperature_setpoint && it->category == Category::Hvac) {
      it->state.setpoint = *outcome.temperature_setpoint;
    }
  }
  next.action_history.push_back(outcome.action.label);
  return next;
}

}  // namespace homellm
