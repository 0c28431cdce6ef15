#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The homellm Authors

// CSV and markdown renderings of an AggregateReport.
//
// report.csv              model_label,representation,style,avg_grade,avg_processing_s,failure_ratio
// report_per_scenario.csv model_label,representation,style,scenario,category,runs,avg_grade,
//                         avg_processing_s,failure_ratio,baseline_grade
// report.md               one row per model/representation/style, then category and baseline tables

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "homellm/bench.hpp"
#include "homellm/errors.hpp"

namespace homellm {

enum class ReportFormat { Csv, Markdown };

inline constexpr std::string_view kSummaryCsvHeader =
    "model_label,representation,style,avg_grade,avg_processing_s,failure_ratio";
inline constexpr std::string_view kScenarioCsvHeader =
    "model_label,representation,style,scenario,category,runs,avg_grade,avg_processing_s,failure_ratio,baseline_grade";

namespace detail {

/// RFC 4180 quoting when needed.
inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline std::string render_summary_csv(const AggregateReport& report) {
  std::string out = std::string(kSummaryCsvHeader) + "\n";
  for (const auto& c : report.cells) {
    out += fmt::format("{},{},{},{:.4f},{:.4f},{:.4f}\n", detail::csv_field(c.model_label), c.representation,
                       c.style, c.avg_grade, c.avg_processing_s, c.failure_ratio);
  }
  return out;
}

inline std::string render_scenario_csv(const AggregateReport& report) {
  std::map<std::string, double> baseline;
  for (const auto& b : report.baselines) baseline[b.scenario] = b.grade.to_double();
  std::string out = std::string(kScenarioCsvHeader) + "\n";
  for (const auto& c : report.cells) {
    for (const auto& s : c.per_scenario) {
      auto b = baseline.find(s.scenario);
      out += fmt::format("{},{},{},{},{},{},{:.4f},{:.4f},{:.4f},{}\n", detail::csv_field(c.model_label),
                         c.representation, c.style, detail::csv_field(s.scenario), to_string(s.category), s.runs,
                         s.avg_grade, s.avg_processing_s, s.failure_ratio,
                         b == baseline.end() ? std::string() : fmt::format("{:.4f}", b->second));
    }
  }
  return out;
}

inline std::string render_baseline_markdown(const std::vector<BaselineRow>& rows) {
  std::string out = "| Scenario | Category | Actions | Rated 1 | Rated 2 | Random baseline |\n";
  out += "|---|---|---:|---:|---:|---:|\n";
  for (const auto& b : rows) {
    out += fmt::format("| {} | {} | {} | {} | {} | {:.3f} |\n", b.scenario, to_string(b.category), b.counts.n_total,
                       b.counts.n_rated_1, b.counts.n_rated_2, b.grade.to_double());
  }
  return out;
}

inline std::string render_markdown(const AggregateReport& report) {
  std::string out = "# Benchmark report\n\n";
  out += "| Model | Prompting Style | Average grade | Proces. time (s) | Failure ratio |\n";
  out += "|---|---|---:|---:|---:|\n";
  for (const auto& c : report.cells) {
    auto model = c.representation == "json" ? c.model_label + " JSON" : c.model_label;
    out += fmt::format("| {} | {} | {:.2f} | {:.2f} | {:.2f} |\n", model, c.style, c.avg_grade, c.avg_processing_s,
                       c.failure_ratio);
  }

  out += "\n## Average grade by category\n\n";
  out += "| Model | Prompting Style |";
  for (auto cat : kAllCategories) out += fmt::format(" {} |", to_string(cat));
  out += "\n|---|---|---:|---:|---:|\n";
  for (const auto& c : report.cells) {
    auto model = c.representation == "json" ? c.model_label + " JSON" : c.model_label;
    out += fmt::format("| {} | {} |", model, c.style);
    for (auto cat : kAllCategories) {
      auto it = c.category_avg_grade.find(cat);
      out += it == c.category_avg_grade.end() ? std::string(" - |") : fmt::format(" {:.2f} |", it->second);
    }
    out += "\n";
  }

  if (!report.baselines.empty()) {
    out += "\n## Random-action baseline\n\n";
    out += render_baseline_markdown(report.baselines);
  }
  return out;
}

namespace detail {

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("{}: cannot write file", path.string()));
  out << text;
  if (!out) throw IoError(fmt::format("{}: write failed", path.string()));
}

}  // namespace detail

/// Writes the report into `dir` (created if missing). Returns the written paths.
inline std::vector<std::filesystem::path> emit_report(const AggregateReport& report, ReportFormat format,
                                                      const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(fmt::format("{}: cannot create directory: {}", dir.string(), ec.message()));
  std::vector<std::filesystem::path> written;
  if (format == ReportFormat::Csv) {
    written.push_back(dir / "report.csv");
    detail::write_file(written.back(), render_summary_csv(report));
    written.push_back(dir / "report_per_scenario.csv");
    detail::write_file(written.back(), render_scenario_csv(report));
  } else {
    written.push_back(dir / "report.md");
    detail::write_file(written.back(), render_markdown(report));
  }
  return written;
}

}  // namespace homellm
