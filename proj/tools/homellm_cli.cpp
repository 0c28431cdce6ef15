// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The homellm Authors

// homellm command line: render, decide, query, baseline, bench.
//
// Exit codes: 0 ok, 1 usage, 2 data/load error, 3 transport or endpoint error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "homellm/homellm.hpp"
#include "homellm/http_clients.hpp"

namespace fs = std::filesystem;
using namespace homellm;

namespace {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kTransport = 3 };

/// Thrown for a bad endpoint or backend spec; maps to exit 3.
struct EndpointError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BackendFlags {
  std::string backend;  // "scripted:<file>" or empty for HTTP
  std::string endpoint = "http://127.0.0.1:5000";
  std::string model = "local-model";
  double timeout = 120.0;
};

struct EmbedderFlags {
  std::string embedder = "test-embedder";
  std::size_t dimension = 1024;
};

struct SamplingFlags {
  int max_tokens = 300;
  double min_p = 0.05;
  double temperature = 0.2;
  std::size_t top_k = 3;
  std::string templates;
};

std::optional<std::string> api_key_from_env() {
  if (const char* k = std::getenv("HOMELLM_API_KEY"); k && *k) return std::string(k);
  return std::nullopt;
}

std::vector<std::string> read_script(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(fmt::format("{}: cannot open script", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  auto j = nlohmann::json::parse(buf.str(), nullptr, false);
  if (j.is_discarded() || !j.is_array()) throw LoadError(fmt::format("{}: expected a JSON array of strings", path.string()));
  std::vector<std::string> replies;
  for (const auto& item : j) {
    if (!item.is_string()) throw LoadError(fmt::format("{}: expected a JSON array of strings", path.string()));
    replies.push_back(item.get<std::string>());
  }
  return replies;
}

/// "scripted:<file>" or an http(s) URL.
std::unique_ptr<Backend> make_backend(const std::string& spec, const std::string& model, double timeout) {
  constexpr std::string_view kScripted = "scripted:";
  if (spec.rfind(kScripted, 0) == 0) {
    return std::make_unique<ScriptedBackend>(read_script(spec.substr(kScripted.size())));
  }
  try {
    HttpBackendConfig cfg;
    cfg.endpoint = spec;
    cfg.model = model;
    cfg.api_key = api_key_from_env();
    cfg.timeout_seconds = timeout;
    return std::make_unique<HttpChatBackend>(cfg);
  } catch (const PreconditionError& e) {
    throw EndpointError(e.what());
  }
}

std::unique_ptr<Backend> make_backend(const BackendFlags& f) {
  return make_backend(f.backend.empty() ? f.endpoint : f.backend, f.model, f.timeout);
}

std::unique_ptr<Embedder> make_embedder(const EmbedderFlags& f) {
  if (f.embedder == "test-embedder") return std::make_unique<HashingEmbedder>();
  try {
    HttpEmbedderConfig cfg;
    cfg.endpoint = f.embedder;
    cfg.dimension = f.dimension;
    cfg.api_key = api_key_from_env();
    return std::make_unique<HttpEmbedder>(cfg);
  } catch (const PreconditionError& e) {
    throw EndpointError(e.what());
  }
}

DecideOptions make_options(const SamplingFlags& f) {
  DecideOptions opts;
  opts.params.max_tokens = f.max_tokens;
  opts.params.min_p = f.min_p;
  opts.params.temperature = f.temperature;
  try {
    opts.params.validate();
  } catch (const PreconditionError& e) {
    throw UsageError(e.what());
  }
  if (f.top_k == 0) throw UsageError("--top-k must be >= 1");
  opts.top_k = f.top_k;
  if (!f.templates.empty()) opts.templates = PromptTemplates::load_dir(f.templates);
  return opts;
}

VectorIndex load_index(const std::string& prefs_path, const Embedder& embedder) {
  if (prefs_path.empty()) return VectorIndex::build({}, embedder);
  return VectorIndex::build(load_preferences(prefs_path), embedder);
}

/// Deterministic stand-in for the wall clock: each reading advances 1 ms.
ClockFn tick_clock() {
  auto ticks = std::make_shared<std::atomic<long>>(0);
  return [ticks] { return static_cast<double>(ticks->fetch_add(1)) * 1e-3; };
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& csv, Parse parse, const char* what) {
  std::vector<T> out;
  std::stringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    auto v = parse(item);
    if (!v) throw UsageError(fmt::format("unknown {} '{}'", what, item));
    out.push_back(*v);
  }
  if (out.empty()) throw UsageError(fmt::format("empty {} list", what));
  return out;
}

nlohmann::ordered_json outcome_json(const DecisionOutcome& o) {
  nlohmann::ordered_json j;
  j["action"] = o.action.label;
  j["code"] = static_cast<int>(o.action.code);
  if (o.action.device_id) j["device_id"] = *o.action.device_id;
  j["reasoning"] = o.reasoning;
  if (o.temperature_setpoint) j["temperature"] = *o.temperature_setpoint;
  if (o.luminosity) j["luminosity"] = *o.luminosity;
  if (o.explanation) j["explanation"] = *o.explanation;
  j["failed"] = o.failed;
  if (!o.warnings.empty()) j["warnings"] = o.warnings;
  return j;
}

void add_backend_flags(CLI::App* cmd, BackendFlags& f) {
  cmd->add_option("--backend", f.backend, "Backend spec: scripted:<file> (JSON array of replies) or a URL");
  cmd->add_option("--endpoint", f.endpoint, "Chat-completions server base URL")->capture_default_str();
  cmd->add_option("--model", f.model, "Model name sent to the server")->capture_default_str();
  cmd->add_option("--timeout", f.timeout, "Per-call timeout in seconds")->capture_default_str()->check(CLI::PositiveNumber);
}

void add_embedder_flags(CLI::App* cmd, EmbedderFlags& f) {
  cmd->add_option("--embedder", f.embedder, "Embedding endpoint URL or 'test-embedder'")->capture_default_str();
  cmd->add_option("--embed-dim", f.dimension, "Dimension of the HTTP embedder's vectors")->capture_default_str();
}

void add_sampling_flags(CLI::App* cmd, SamplingFlags& f) {
  cmd->add_option("--max-tokens", f.max_tokens, "Maximum tokens per reply")->capture_default_str();
  cmd->add_option("--min-p", f.min_p, "min_p sampling filter")->capture_default_str();
  cmd->add_option("--temperature", f.temperature, "Sampling temperature")->capture_default_str();
  cmd->add_option("--top-k", f.top_k, "Preferences retrieved per problem")->capture_default_str();
  cmd->add_option("--templates", f.templates, "Directory of prompt templates (default: built in)");
}

int run(int argc, char** argv) {
  CLI::App app{"LLM decision engine for smart-home automation"};
  app.require_subcommand(1);

  // render
  std::string render_house;
  std::string render_rep = "natural";
  auto* render_cmd = app.add_subcommand("render", "Print the prompt rendering of a house file");
  render_cmd->add_option("house", render_house, "House file")->required();
  render_cmd->add_option("--rep", render_rep, "natural or json")->capture_default_str();

  // decide
  std::string decide_house, decide_prefs, decide_style = "direct", decide_rep = "natural";
  int decide_user = 1;
  bool decide_show_prompts = false;
  BackendFlags decide_backend;
  EmbedderFlags decide_embedder;
  SamplingFlags decide_sampling;
  auto* decide_cmd = app.add_subcommand("decide", "Run one decision and print the outcome");
  decide_cmd->add_option("house", decide_house, "House file")->required();
  decide_cmd->add_option("--user", decide_user, "User id")->capture_default_str();
  decide_cmd->add_option("--style", decide_style, "direct, directPref, OpenQuestion or ThreeQuestion")
      ->capture_default_str();
  decide_cmd->add_option("--rep", decide_rep, "natural or json")->capture_default_str();
  decide_cmd->add_option("--prefs", decide_prefs, "Preference file");
  decide_cmd->add_flag("--show-prompts", decide_show_prompts, "Include every prompt and reply in the trace");
  add_backend_flags(decide_cmd, decide_backend);
  add_embedder_flags(decide_cmd, decide_embedder);
  add_sampling_flags(decide_cmd, decide_sampling);

  // query
  std::string query_prefs, query_text;
  std::size_t query_k = 3;
  EmbedderFlags query_embedder;
  auto* query_cmd = app.add_subcommand("query", "Print the preferences closest to a text");
  query_cmd->add_option("prefs", query_prefs, "Preference file")->required();
  query_cmd->add_option("text", query_text, "Query text")->required();
  query_cmd->add_option("-k,--k", query_k, "Number of entries")->capture_default_str()->check(CLI::PositiveNumber);
  add_embedder_flags(query_cmd, query_embedder);

  // baseline
  std::string baseline_dir = "fixtures/scenarios";
  auto* baseline_cmd = app.add_subcommand("baseline", "Print the random-action baseline per scenario");
  baseline_cmd->add_option("--scenarios", baseline_dir, "Scenario directory")->capture_default_str();

  // bench
  std::string bench_scenarios = "fixtures/scenarios", bench_prefs, bench_out = "bench-out";
  std::string bench_styles = "direct,directPref,OpenQuestion,ThreeQuestion", bench_reps_list = "natural,json";
  std::string bench_label;
  std::vector<std::string> bench_targets;
  int bench_reps = 10, bench_jobs = 1;
  std::uint64_t bench_seed = 0;
  bool bench_baseline_only = false, bench_tick_clock = false;
  BackendFlags bench_backend;
  EmbedderFlags bench_embedder;
  SamplingFlags bench_sampling;
  auto* bench_cmd = app.add_subcommand("bench", "Run the scenario benchmark and write reports");
  bench_cmd->add_option("--scenarios", bench_scenarios, "Scenario directory")->capture_default_str();
  bench_cmd->add_option("--prefs", bench_prefs, "Preference file");
  bench_cmd->add_option("--out", bench_out, "Output directory")->capture_default_str();
  bench_cmd->add_option("--styles", bench_styles, "Comma-separated prompting styles")->capture_default_str();
  bench_cmd->add_option("--representations", bench_reps_list, "Comma-separated representations")
      ->capture_default_str();
  bench_cmd->add_option("--reps", bench_reps, "Repetitions per scenario")->capture_default_str()->check(
      CLI::NonNegativeNumber);
  bench_cmd->add_option("--seed", bench_seed, "Base request seed")->capture_default_str();
  bench_cmd->add_option("--jobs", bench_jobs, "Cells run concurrently")->capture_default_str()->check(
      CLI::PositiveNumber);
  bench_cmd->add_option("--label", bench_label, "Model label in reports (default: --model)");
  bench_cmd->add_option("--target", bench_targets, "Extra model as LABEL=SPEC (SPEC: URL or scripted:<file>)");
  bench_cmd->add_flag("--baseline-only", bench_baseline_only, "Only print the random-action baseline");
  bench_cmd->add_flag("--tick-clock", bench_tick_clock, "Deterministic clock (1 ms per reading) for reproducible reports");
  add_backend_flags(bench_cmd, bench_backend);
  add_embedder_flags(bench_cmd, bench_embedder);
  add_sampling_flags(bench_cmd, bench_sampling);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (render_cmd->parsed()) {
    auto rep = parse_representation(render_rep);
    if (!rep) throw UsageError(fmt::format("unknown representation '{}'", render_rep));
    std::cout << render(load_house(render_house), *rep);
    return kOk;
  }

  if (decide_cmd->parsed()) {
    auto style = parse_style(decide_style);
    if (!style) throw UsageError(fmt::format("unknown style '{}'", decide_style));
    auto rep = parse_representation(decide_rep);
    if (!rep) throw UsageError(fmt::format("unknown representation '{}'", decide_rep));
    auto opts = make_options(decide_sampling);
    auto house = load_house(decide_house);
    if (!house.find_user(decide_user)) throw LoadError(fmt::format("user {} not in house", decide_user));
    auto embedder = make_embedder(decide_embedder);
    auto index = load_index(decide_prefs, *embedder);
    auto backend = make_backend(decide_backend);

    auto d = decide(*style, house, decide_user, *rep, index, *backend, *embedder, opts);
    nlohmann::ordered_json out;
    out["outcome"] = outcome_json(d.outcome);
    nlohmann::ordered_json trace;
    trace["llm_calls"] = d.trace.llm_calls.size();
    trace["retrieval_queries"] = nlohmann::ordered_json::array();
    for (const auto& q : d.trace.retrieval_queries) {
      nlohmann::ordered_json item{{"query", q.query}, {"results", nlohmann::ordered_json::array()}};
      for (const auto& e : q.results) item["results"].push_back(fmt::format("[{}] {}", to_string(e.tag), e.text));
      trace["retrieval_queries"].push_back(item);
    }
    trace["total_seconds"] = d.trace.total_seconds;
    if (d.trace.transport_error) trace["transport_error"] = *d.trace.transport_error;
    if (decide_show_prompts) {
      trace["calls"] = nlohmann::ordered_json::array();
      for (const auto& c : d.trace.llm_calls) {
        nlohmann::ordered_json call{{"messages", nlohmann::ordered_json::array()}, {"reply", c.reply},
                                    {"seconds", c.seconds}};
        for (const auto& m : c.messages) call["messages"].push_back({{"role", to_string(m.role)}, {"content", m.content}});
        trace["calls"].push_back(call);
      }
    }
    out["trace"] = trace;
    std::cout << out.dump(2) << "\n";
    if (d.trace.transport_error) {
      std::cerr << "error: " << *d.trace.transport_error << "\n";
      return kTransport;
    }
    return kOk;
  }

  if (query_cmd->parsed()) {
    auto embedder = make_embedder(query_embedder);
    auto index = load_index(query_prefs, *embedder);
    if (index.empty()) throw LoadError(fmt::format("{}: no preference entries", query_prefs));
    if (query_text.empty()) throw UsageError("query text must not be empty");
    std::cout << format_for_prompt(query_top_k(index, query_text, query_k, *embedder));
    return kOk;
  }

  if (baseline_cmd->parsed() || (bench_cmd->parsed() && bench_baseline_only)) {
    auto scenarios = load_scenarios(baseline_cmd->parsed() ? baseline_dir : bench_scenarios);
    std::cout << render_baseline_markdown(baseline_table(scenarios));
    return kOk;
  }

  if (bench_cmd->parsed()) {
    auto styles = parse_list<PromptStyle>(bench_styles, parse_style, "style");
    auto reps = parse_list<Representation>(bench_reps_list, parse_representation, "representation");
    auto opts = make_options(bench_sampling);
    if (bench_tick_clock) opts.now = tick_clock();
    auto scenarios = load_scenarios(bench_scenarios);
    auto embedder = make_embedder(bench_embedder);
    auto index = load_index(bench_prefs, *embedder);

    std::vector<std::unique_ptr<Backend>> backends;
    BenchConfig cfg;
    if (bench_targets.empty()) {
      backends.push_back(make_backend(bench_backend));
      cfg.models.push_back({bench_label.empty() ? bench_backend.model : bench_label, backends.back().get()});
    }
    for (const auto& t : bench_targets) {
      auto eq = t.find('=');
      if (eq == std::string::npos || eq == 0) throw UsageError(fmt::format("--target expects LABEL=SPEC, got '{}'", t));
      auto label = t.substr(0, eq);
      backends.push_back(make_backend(t.substr(eq + 1), label, bench_backend.timeout));
      cfg.models.push_back({label, backends.back().get()});
    }
    cfg.representations = reps;
    cfg.styles = styles;
    cfg.reps = bench_reps;
    cfg.seed = bench_seed;
    cfg.jobs = bench_jobs;
    cfg.preferences = &index;
    cfg.embedder = embedder.get();
    cfg.options = opts;

    auto result = run_benchmark(cfg, scenarios);
    fs::create_directories(bench_out);
    detail::write_file(fs::path(bench_out) / "records.jsonl", records_to_jsonl(result.records));
    if (result.aborted) {
      std::cerr << "error: benchmark aborted: " << result.abort_reason << "\n";
      std::cerr << fmt::format("{} partial records written to {}\n", result.records.size(),
                               (fs::path(bench_out) / "records.jsonl").string());
      return kTransport;
    }
    auto report = aggregate(result.records, scenarios);
    emit_report(report, ReportFormat::Csv, bench_out);
    emit_report(report, ReportFormat::Markdown, bench_out);
    for (const auto& c : report.cells) {
      std::cout << fmt::format("{} {} {}: avg_grade={:.4f} avg_processing_s={:.4f} failure_ratio={:.4f} runs={}\n",
                               c.model_label, c.representation, c.style, c.avg_grade, c.avg_processing_s,
                               c.failure_ratio, c.runs);
    }
    std::cout << fmt::format("{} records, report in {}\n", result.records.size(), bench_out);
    return kOk;
  }
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const EndpointError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kTransport;
  } catch (const GatewayError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kTransport;
  } catch (const RetrievalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kTransport;
  } catch (const homellm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kData;
  }
}
