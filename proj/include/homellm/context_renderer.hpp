#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The homellm Authors

// Turns a HouseState into the text given to the model, either as plain
// sentences or as a JSON document. Both variants are deterministic.

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "homellm/home_model.hpp"

namespace homellm {

enum class Representation { Natural, Json };

inline std::string_view to_string(Representation r) { return r == Representation::Natural ? "natural" : "json"; }

inline std::optional<Representation> parse_representation(std::string_view s) {
  if (s == "natural") return Representation::Natural;
  if (s == "json") return Representation::Json;
  return std::nullopt;
}

namespace detail {

/// Order of device groups inside a room block.
inline int render_rank(const Device& d) {
  if (d.kind == DeviceKind::Sensor) return 4;
  if (d.category == Category::Curtains) return 0;
  if (is_light(d.category)) return 1;
  if (d.category == Category::Tv) return 2;
  return 3;
}

inline std::string format_number(double v) { return fmt::format("{}", v); }

inline std::string lowercase_power(Power p) {
  std::string s(to_string(p));
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline std::string light_state(const Device& d) {
  std::string s(to_string(*d.state.power));
  if (d.state.luminosity) s += fmt::format(" at {}%", *d.state.luminosity);
  return s;
}

/// One sentence for a device that is not grouped with others.
inline std::string device_sentence(const Device& d) {
  const auto& st = d.state;
  switch (d.category) {
    case Category::Curtains:
      return fmt::format("{} are {}.", d.name, to_string(*st.power));
    case Category::Tv:
      return fmt::format("There is a {} in the room and its state is {}.", d.name, lowercase_power(*st.power));
    case Category::Hvac:
      if (st.setpoint) {
        return fmt::format("{} is {} with objective to {}°C.", d.name, lowercase_power(*st.power), *st.setpoint);
      }
      return fmt::format("{} is {}.", d.name, lowercase_power(*st.power));
    case Category::SmartDoor:
      return fmt::format("{} is {}.", d.name, lowercase_power(*st.power));
    case Category::Co2Sensor:
      return fmt::format("{} level in room is {}ppm.", d.name, format_number(*st.reading));
    case Category::TemperatureSensor:
    case Category::HumiditySensor:
      return fmt::format("{} in room reads {}{}.", d.name, format_number(*st.reading), st.unit);
    case Category::MainLight:
    case Category::AuxiliaryLight:
      return fmt::format("Lights: {} are {}.", d.name, light_state(d));
    case Category::Generic:
      break;
  }
  if (d.kind == DeviceKind::Sensor) {
    return fmt::format("{} reads {}{}.", d.name, format_number(st.reading.value_or(0.0)), st.unit);
  }
  return fmt::format("{} is {}.", d.name, to_string(*st.power));
}

inline std::vector<const Device*> ordered_room_devices(const Room& room, const HouseState& state) {
  std::vector<const Device*> devs;
  for (const auto& id : room.device_ids) {
    if (const Device* d = state.find_device(id)) devs.push_back(d);
  }
  std::stable_sort(devs.begin(), devs.end(),
                   [](const Device* a, const Device* b) { return render_rank(*a) < render_rank(*b); });
  return devs;
}

inline std::vector<std::string> room_sentences(const Room& room, const HouseState& state) {
  auto devs = ordered_room_devices(room, state);
  std::vector<std::string> out;
  std::vector<const Device*> lights;
  for (const Device* d : devs) {
    if (is_light(d->category)) lights.push_back(d);
  }
  bool lights_done = false;
  for (const Device* d : devs) {
    if (is_light(d->category)) {
      if (lights_done) continue;
      lights_done = true;
      std::string names, states;
      for (std::size_t i = 0; i < lights.size(); ++i) {
        if (i) {
          names += ", ";
          states += ", ";
        }
        names += lights[i]->name;
        states += light_state(*lights[i]);
      }
      if (lights.size() == 1) {
        out.push_back(fmt::format("Lights: {} are {}.", names, states));
      } else {
        out.push_back(fmt::format("Lights: {} are respectively {}.", names, states));
      }
      continue;
    }
    out.push_back(device_sentence(*d));
  }
  return out;
}

inline nlohmann::ordered_json device_json(const Device& d) {
  nlohmann::ordered_json j;
  j["id"] = d.id;
  j["name"] = d.name;
  j["kind"] = to_string(d.kind);
  j["category"] = to_string(d.category);
  if (d.state.power) j["state"] = to_string(*d.state.power);
  if (d.state.luminosity) j["luminosity_percent"] = *d.state.luminosity;
  if (d.state.setpoint) j["setpoint_c"] = *d.state.setpoint;
  if (d.state.reading) {
    j["reading"] = *d.state.reading;
    j["unit"] = d.state.unit;
  }
  return j;
}

inline nlohmann::ordered_json room_json(const Room& room, const HouseState& state) {
  nlohmann::ordered_json j;
  j["name"] = room.name;
  j["devices"] = nlohmann::ordered_json::array();
  for (const Device* d : ordered_room_devices(room, state)) j["devices"].push_back(device_json(*d));
  return j;
}

inline std::string room_display_name(const HouseState& state, const RoomId& id) {
  const Room* r = state.find_room(id);
  return r ? r->name : id;
}

inline std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace detail

/// Text block for a single room. A room without devices renders as its name line only.
inline std::string render_room(const Room& room, const HouseState& state, Representation rep) {
  if (rep == Representation::Json) return detail::room_json(room, state).dump(2);

  auto sentences = detail::room_sentences(room, state);
  std::string out = room.name + ":";
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    out += i == 0 ? " " : "\n";
    out += sentences[i];
  }
  out += "\n";
  return out;
}

inline nlohmann::ordered_json render_json_document(const HouseState& state) {
  nlohmann::ordered_json j;
  j["time"] = state.clock.to_12h();
  j["users"] = nlohmann::ordered_json::array();
  for (const auto& u : state.users) {
    j["users"].push_back({{"user_id", u.user_id},
                          {"location", detail::room_display_name(state, u.location)},
                          {"current_activity", u.current_activity},
                          {"previous_activities", u.activity_history}});
  }
  j["action_history"] = state.action_history;
  j["rooms"] = nlohmann::ordered_json::array();
  for (const auto& r : state.rooms) j["rooms"].push_back(detail::room_json(r, state));
  j["global_devices"] = nlohmann::ordered_json::array();
  for (const Device* d : state.global_devices()) j["global_devices"].push_back(detail::device_json(*d));
  j["cleaning"] = {{"last_cleaned", state.cleaning.last_cleaned}, {"expected", state.cleaning.cadence}};
  j["inside_temperature_c"] = state.inside_temp_c;
  j["outside_temperature_c"] = state.outside_temp_c;
  return j;
}

/// Full house description for prompts.
inline std::string render(const HouseState& state, Representation rep) {
  if (rep == Representation::Json) return render_json_document(state).dump(2) + "\n";

  std::string out = "Current State of the House:\n";
  for (const auto& u : state.users) {
    out += fmt::format("User {} is in the {}.\n", u.user_id, detail::room_display_name(state, u.location));
    if (!u.current_activity.empty()) out += fmt::format("User is {}.\n", u.current_activity);
    if (!u.activity_history.empty()) out += fmt::format("Previously: {}\n", detail::join(u.activity_history, "; "));
  }
  if (!state.action_history.empty()) {
    out += fmt::format("Previous actions: {}.\n", detail::join(state.action_history, "; "));
  }
  out += "\n";
  for (const auto& r : state.rooms) out += render_room(r, state, Representation::Natural);
  out += "\n";
  if (!state.cleaning.last_cleaned.empty()) out += fmt::format("House was cleaned {}.\n", state.cleaning.last_cleaned);
  if (!state.cleaning.cadence.empty()) out += fmt::format("Expected cleaning {}.\n", state.cleaning.cadence);
  for (const Device* d : state.global_devices()) out += detail::device_sentence(*d) + "\n";
  out += fmt::format("Time: {}\n", state.clock.to_12h());
  out += fmt::format("Global house temperature is {}°C,\n", state.inside_temp_c);
  out += fmt::format("outside temperature is {}°C.\n", state.outside_temp_c);
  return out;
}

}  // namespace homellm
