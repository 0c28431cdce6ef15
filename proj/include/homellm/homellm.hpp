#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The homellm Authors

#include "homellm/action_builder.hpp"
#include "homellm/bench.hpp"
#include "homellm/context_renderer.hpp"
#include "homellm/decision_engine.hpp"
#include "homellm/home_model.hpp"
#include "homellm/llm_gateway.hpp"
#include "homellm/outcome.hpp"
#include "homellm/preference_store.hpp"
#include "homellm/prompt_templates.hpp"
#include "homellm/report.hpp"
#include "homellm/rubric.hpp"
#include "homellm/scenario.hpp"
