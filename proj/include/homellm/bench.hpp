#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The homellm Authors

/**
 * @file bench.hpp
 * @brief Experiment matrix runner and aggregation.
 *
 * The matrix is models x representations x styles ("cells"). Each cell runs
 * every scenario `reps` times, in order. Cells may run on several threads;
 * the returned records are always in canonical order
 * (cell, scenario, repetition). Failed decisions stay in every average.
 */

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "homellm/action_builder.hpp"
#include "homellm/context_renderer.hpp"
#include "homellm/decision_engine.hpp"
#include "homellm/errors.hpp"
#include "homellm/scenario.hpp"

namespace homellm {

struct RunRecord {
  std::string scenario;
  std::string style;
  std::string representation;
  std::string model_label;
  int repetition = 0;
  int grade = 0;
  double processing_seconds = 0.0;
  bool failed = false;
  /// The backend could not be reached; the benchmark stopped after this record.
  bool aborted = false;

  bool operator==(const RunRecord&) const = default;
};

inline nlohmann::ordered_json to_json(const RunRecord& r) {
  return {{"scenario", r.scenario},
          {"style", r.style},
          {"representation", r.representation},
          {"model_label", r.model_label},
          {"repetition", r.repetition},
          {"grade", r.grade},
          {"processing_seconds", r.processing_seconds},
          {"failed", r.failed},
          {"aborted", r.aborted}};
}

inline RunRecord record_from_json(const nlohmann::json& j) {
  RunRecord r;
  try {
    r.scenario = j.at("scenario").get<std::string>();
    r.style = j.at("style").get<std::string>();
    r.representation = j.at("representation").get<std::string>();
    r.model_label = j.at("model_label").get<std::string>();
    r.repetition = j.at("repetition").get<int>();
    r.grade = j.at("grade").get<int>();
    r.processing_seconds = j.at("processing_seconds").get<double>();
    r.failed = j.at("failed").get<bool>();
    r.aborted = j.value("aborted", false);
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(fmt::format("malformed run record: {}", e.what()));
  }
  return r;
}

/// One JSON object per line.
inline std::string records_to_jsonl(const std::vector<RunRecord>& records) {
  std::string out;
  for (const auto& r : records) out += to_json(r).dump() + "\n";
  return out;
}

inline std::vector<RunRecord> records_from_jsonl(std::string_view text) {
  std::vector<RunRecord> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw LoadError("malformed run record line");
    out.push_back(record_from_json(j));
  }
  return out;
}

struct ModelUnderTest {
  std::string label;
  Backend* backend = nullptr;
};

struct BenchConfig {
  std::vector<ModelUnderTest> models;
  std::vector<Representation> representations{Representation::Natural, Representation::Json};
  std::vector<PromptStyle> styles{kAllStyles.begin(), kAllStyles.end()};
  int reps = 10;
  std::uint64_t seed = 0;
  /// Cells run concurrently up to this many threads.
  int jobs = 1;
  const VectorIndex* preferences = nullptr;
  const Embedder* embedder = nullptr;
  DecideOptions options;
};

struct BenchResult {
  std::vector<RunRecord> records;
  bool aborted = false;
  std::string abort_reason;
};

/**
 * Runs the whole matrix. Each repetition r sends request seed `seed + r`.
 * An unreachable backend stops the run; the records gathered so far are
 * returned, the last one flagged `aborted`.
 */
inline BenchResult run_benchmark(const BenchConfig& config, const std::vector<ScenarioSpec>& scenarios) {
  if (config.reps < 0) throw PreconditionError("reps must be >= 0");
  if (!config.embedder) throw PreconditionError("benchmark needs an embedder");
  static const VectorIndex kEmptyIndex;
  const VectorIndex& prefs = config.preferences ? *config.preferences : kEmptyIndex;

  struct Cell {
    const ModelUnderTest* model;
    Representation rep;
    PromptStyle style;
  };
  std::vector<Cell> cells;
  for (const auto& m : config.models) {
    if (!m.backend) throw PreconditionError(fmt::format("model '{}' has no backend", m.label));
    for (auto rep : config.representations) {
      for (auto style : config.styles) cells.push_back({&m, rep, style});
    }
  }

  std::vector<std::vector<RunRecord>> per_cell(cells.size());
  std::atomic<bool> stop{false};
  std::atomic<std::size_t> next_cell{0};
  std::mutex abort_mutex;
  BenchResult result;

  auto run_cell = [&](std::size_t ci) {
    const auto& cell = cells[ci];
    auto& sink = per_cell[ci];
    for (const auto& sc : scenarios) {
      for (int r = 0; r < config.reps; ++r) {
        if (stop.load()) return;
        DecideOptions opts = config.options;
        opts.params.seed = config.seed + static_cast<std::uint64_t>(r);
        auto d = decide(cell.style, sc.house, sc.user_id, cell.rep, prefs, *cell.model->backend, *config.embedder, opts);
        RunRecord rec;
        rec.scenario = sc.name;
        rec.style = std::string(to_string(cell.style));
        rec.representation = std::string(to_string(cell.rep));
        rec.model_label = cell.model->label;
        rec.repetition = r;
        rec.grade = grade_outcome(sc.rubric, d.outcome, sc.house);
        rec.processing_seconds = d.trace.total_seconds;
        rec.failed = d.outcome.failed;
        if (d.trace.backend_unreachable) {
          rec.aborted = true;
          std::lock_guard lock(abort_mutex);
          if (!result.aborted) {
            result.aborted = true;
            result.abort_reason = d.trace.transport_error.value_or("backend unreachable");
          }
          stop.store(true);
        }
        sink.push_back(std::move(rec));
        if (stop.load()) return;
      }
    }
  };

  const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(config.jobs, static_cast<int>(cells.size()))));
  if (workers <= 1) {
    for (std::size_t ci = 0; ci < cells.size() && !stop.load(); ++ci) run_cell(ci);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (auto ci = next_cell.fetch_add(1); ci < cells.size(); ci = next_cell.fetch_add(1)) run_cell(ci);
      });
    }
    for (auto& t : pool) t.join();
  }

  for (auto& cell_records : per_cell) {
    for (auto& r : cell_records) result.records.push_back(std::move(r));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Aggregation

struct ScenarioStats {
  std::string scenario;
  ScenarioCategory category = ScenarioCategory::Safety;
  int runs = 0;
  double avg_grade = 0.0;
  double avg_processing_s = 0.0;
  double failure_ratio = 0.0;

  bool operator==(const ScenarioStats&) const = default;
};

struct CellReport {
  std::string model_label;
  std::string representation;
  std::string style;
  int runs = 0;
  double avg_grade = 0.0;
  double avg_processing_s = 0.0;
  double failure_ratio = 0.0;
  /// Average grade per scenario category; categories without runs are absent.
  std::map<ScenarioCategory, double> category_avg_grade;
  std::vector<ScenarioStats> per_scenario;

  bool operator==(const CellReport&) const = default;
};

struct BaselineRow {
  std::string scenario;
  ScenarioCategory category = ScenarioCategory::Safety;
  RubricCounts counts;
  Rational grade;

  bool operator==(const BaselineRow&) const = default;
};

struct AggregateReport {
  std::vector<CellReport> cells;
  std::vector<BaselineRow> baselines;

  bool operator==(const AggregateReport&) const = default;
};

inline std::vector<BaselineRow> baseline_table(const std::vector<ScenarioSpec>& scenarios) {
  std::vector<BaselineRow> out;
  for (const auto& s : scenarios) {
    auto counts = rubric_counts(s);
    out.push_back({s.name, s.category, counts, baseline_grade(counts)});
  }
  return out;
}

/**
 * Per-cell means over every record, failures included. Every cell must
 * cover the same scenario set, and every scenario must be in `scenarios`.
 */
inline AggregateReport aggregate(const std::vector<RunRecord>& records, const std::vector<ScenarioSpec>& scenarios) {
  AggregateReport report;
  report.baselines = baseline_table(scenarios);

  std::map<std::string, const ScenarioSpec*> by_name;
  for (const auto& s : scenarios) by_name[s.name] = &s;

  struct Acc {
    int runs = 0;
    long grade_sum = 0;
    double seconds = 0.0;
    int failures = 0;
    void add(const RunRecord& r) {
      ++runs;
      grade_sum += r.grade;
      seconds += r.processing_seconds;
      failures += r.failed ? 1 : 0;
    }
  };
  struct CellAcc {
    CellReport head;
    Acc total;
    std::map<ScenarioCategory, Acc> by_category;
    std::map<std::string, Acc> by_scenario;
  };

  std::vector<CellAcc> cells;
  std::map<std::tuple<std::string, std::string, std::string>, std::size_t> index;
  for (const auto& r : records) {
    auto it = by_name.find(r.scenario);
    if (it == by_name.end()) throw AggregationError(fmt::format("record for unknown scenario '{}'", r.scenario));
    auto key = std::make_tuple(r.model_label, r.representation, r.style);
    auto [pos, inserted] = index.try_emplace(key, cells.size());
    if (inserted) {
      CellAcc c;
      c.head.model_label = r.model_label;
      c.head.representation = r.representation;
      c.head.style = r.style;
      cells.push_back(std::move(c));
    }
    auto& cell = cells[pos->second];
    cell.total.add(r);
    cell.by_category[it->second->category].add(r);
    cell.by_scenario[r.scenario].add(r);
  }

  std::optional<std::set<std::string>> reference;
  for (auto& c : cells) {
    std::set<std::string> names;
    for (const auto& [name, acc] : c.by_scenario) names.insert(name);
    if (!reference) {
      reference = names;
    } else if (names != *reference) {
      throw AggregationError(fmt::format("cell {}/{}/{} covers a different scenario set", c.head.model_label,
                                         c.head.representation, c.head.style));
    }

    auto mean = [](const Acc& a) { return static_cast<double>(a.grade_sum) / a.runs; };
    CellReport cr = c.head;
    cr.runs = c.total.runs;
    cr.avg_grade = mean(c.total);
    cr.avg_processing_s = c.total.seconds / c.total.runs;
    cr.failure_ratio = static_cast<double>(c.total.failures) / c.total.runs;
    for (const auto& [cat, acc] : c.by_category) cr.category_avg_grade[cat] = mean(acc);
    for (const auto& s : scenarios) {
      auto it = c.by_scenario.find(s.name);
      if (it == c.by_scenario.end()) continue;
      const auto& a = it->second;
      cr.per_scenario.push_back({s.name, s.category, a.runs, mean(a), a.seconds / a.runs,
                                 static_cast<double>(a.failures) / a.runs});
    }
    report.cells.push_back(std::move(cr));
  }
  return report;
}

}  // namespace homellm
