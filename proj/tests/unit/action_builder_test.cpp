// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The homellm Authors

#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "test_support.hpp"

namespace hl = homellm;
using hl::testing::house_fixture;

namespace {

std::vector<std::string> labels(const std::vector<hl::ActionCandidate>& cands) {
  std::vector<std::string> out;
  for (const auto& c : cands) out.push_back(c.label);
  return out;
}

}  // namespace

TEST(BuildActions, ReferenceHouseReducesToSix) {
  auto s = hl::load_house(house_fixture("going_back_to_bed"));
  EXPECT_EQ(s.actuator_count(), 17u);
  EXPECT_EQ(hl::unfiltered_action_count(s), 19u);
  auto cands = hl::build_actions(1, s);
  EXPECT_EQ(labels(cands), (std::vector<std::string>{"main is Off", "bedside lamp is Off",
                                                     "Centralized HVAC system is On", "Entrance smart Door is Locked",
                                                     "Interact with user", "No action required"}));
}

TEST(BuildActions, MetaActionsCloseTheList) {
  auto s = hl::load_house(house_fixture("out_of_bed_night"));
  auto cands = hl::build_actions(1, s);
  ASSERT_GE(cands.size(), 2u);
  EXPECT_EQ(cands[cands.size() - 2].code, hl::ActionCode::InteractWithUser);
  EXPECT_EQ(cands.back().code, hl::ActionCode::NoAction);
  EXPECT_EQ(static_cast<int>(cands.back().code), 0);
  EXPECT_EQ(static_cast<int>(cands[cands.size() - 2].code), 2);
  EXPECT_EQ(static_cast<int>(cands.front().code), 1);
}

TEST(BuildActions, ActiveDevicesElsewhereAreOffered) {
  auto s = hl::load_house(house_fixture("evening_sleeping_tv_on"));
  auto cands = hl::build_actions(1, s);
  std::set<std::string> ids;
  for (const auto& c : cands) {
    if (c.device_id) ids.insert(*c.device_id);
  }
  EXPECT_TRUE(ids.count("lr_tv"));
  EXPECT_TRUE(ids.count("k_main"));
  EXPECT_FALSE(ids.count("lr_main"));  // off, elsewhere
  EXPECT_FALSE(ids.count("br_co2"));   // sensor
}

TEST(BuildActions, DuplicateNamesAreQualifiedWithRoom) {
  auto s = hl::load_house(house_fixture("forgot_lights"));
  auto l = labels(hl::build_actions(1, s));
  EXPECT_NE(std::find(l.begin(), l.end(), "main in Kitchen is Off"), l.end());
  EXPECT_NE(std::find(l.begin(), l.end(), "main in Livingroom is On"), l.end());
  EXPECT_NE(std::find(l.begin(), l.end(), "main in Bedroom is On"), l.end());
  EXPECT_NE(std::find(l.begin(), l.end(), "floor lamp is On"), l.end());
  std::set<std::string> unique(l.begin(), l.end());
  EXPECT_EQ(unique.size(), l.size());
}

TEST(BuildActions, UserInEmptyRoom) {
  auto s = hl::load_house(house_fixture("forgot_tv_user_out"));
  auto l = labels(hl::build_actions(1, s));
  EXPECT_EQ(l, (std::vector<std::string>{"main is On", "TV is On", "Centralized HVAC system is On",
                                         "Entrance smart Door is Locked", "Interact with user", "No action required"}));
}

TEST(BuildActions, UnknownUserThrows) {
  auto s = hl::load_house(house_fixture("out_of_bed_night"));
  EXPECT_THROW(hl::build_actions(42, s), hl::BuildError);
}

TEST(BuildActions, HouseWithoutActuators) {
  hl::HouseState s;
  s.rooms.push_back({"r", "Room", {}});
  s.users.push_back({1, "r", "idle", {}});
  auto cands = hl::build_actions(1, s);
  ASSERT_EQ(cands.size(), 2u);
  EXPECT_EQ(hl::unfiltered_action_count(s), 2u);
}

TEST(BuildActions, PropertyEligibilityAndMonotonicity) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 500; ++i) {
    auto s = hl::testing::random_house(rng);
    auto cands = hl::build_actions(1, s);
    const auto& room = s.find_user(1)->location;
    std::size_t expected = 0;
    for (const auto& d : s.devices) {
      bool eligible = d.kind == hl::DeviceKind::Actuator &&
                      (d.location == room || d.is_global() || hl::is_active(*d.state.power));
      expected += eligible ? 1 : 0;
    }
    ASSERT_EQ(cands.size(), expected + 2);
    ASSERT_LE(cands.size(), hl::unfiltered_action_count(s));

    // Turning any device on never shrinks the list.
    for (std::size_t d = 0; d < s.devices.size(); ++d) {
      if (s.devices[d].kind != hl::DeviceKind::Actuator || hl::is_active(*s.devices[d].state.power)) continue;
      auto more = s;
      more.devices[d].state.power = hl::toggled(*more.devices[d].state.power);
      ASSERT_GE(hl::build_actions(1, more).size(), cands.size());
    }
  }
}

TEST(Baseline, RationalArithmetic) {
  EXPECT_EQ(hl::Rational::make(6, 8), (hl::Rational{3, 4}));
  EXPECT_EQ(hl::baseline_grade({1, 1, 8}), (hl::Rational{3, 8}));
  EXPECT_EQ(hl::baseline_grade({0, 4, 9}), (hl::Rational{8, 9}));
  EXPECT_EQ(hl::baseline_grade({0, 0, 5}), (hl::Rational{0, 1}));
  EXPECT_EQ(hl::baseline_grade({0, 5, 5}), (hl::Rational{2, 1}));
  EXPECT_DOUBLE_EQ(hl::baseline_grade({2, 1, 9}).to_double(), 4.0 / 9.0);
}

TEST(Baseline, RejectsInconsistentCounts) {
  EXPECT_THROW(hl::baseline_grade({0, 0, 0}), hl::PreconditionError);
  EXPECT_THROW(hl::baseline_grade({3, 3, 5}), hl::PreconditionError);
  EXPECT_THROW(hl::baseline_grade({-1, 0, 5}), hl::PreconditionError);
}

TEST(Baseline, MatchesHandCountedRubrics) {
  for (const auto& s : hl::testing::all_scenarios()) {
    auto expected = hl::testing::expected_rubric_counts().at(s.name);
    EXPECT_EQ(hl::rubric_counts(s), expected) << s.name;
  }
}

TEST(RandomPolicy, SeedReproducible) {
  auto cands = hl::build_actions(1, hl::load_house(house_fixture("going_back_to_bed")));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    EXPECT_EQ(hl::random_policy(seed, cands).label, hl::random_policy(seed, cands).label);
  }
  EXPECT_THROW(hl::random_policy(1, std::span<const hl::ActionCandidate>{}), hl::PreconditionError);
}

TEST(RandomPolicy, UniformOverCandidates) {
  auto cands = hl::build_actions(1, hl::load_house(house_fixture("going_back_to_bed")));
  ASSERT_EQ(cands.size(), 6u);
  constexpr int kDraws = 100000;
  std::map<std::string, int> freq;
  hl::RandomPolicy policy(2024);
  for (int i = 0; i < kDraws; ++i) ++freq[policy.choose(cands).label];
  // Binomial(100000, 1/6): sigma ~ 117.9; allow 6 sigma.
  const double mean = kDraws / 6.0;
  const double sigma = std::sqrt(kDraws * (1.0 / 6.0) * (5.0 / 6.0));
  ASSERT_EQ(freq.size(), 6u);
  for (const auto& [label, n] : freq) EXPECT_NEAR(n, mean, 6 * sigma) << label;
}
