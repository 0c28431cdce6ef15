#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The homellm Authors

// HTTP implementations of Backend (OpenAI-style chat completions) and
// Embedder (OpenAI-style /v1/embeddings or text-embeddings-inference /embed).
// Plain http:// only unless cpp-httplib is built with OpenSSL support.

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>

#include "homellm/errors.hpp"
#include "homellm/llm_gateway.hpp"
#include "homellm/preference_store.hpp"

namespace homellm {

/// "http://host:port/prefix" split into the client base and the path prefix.
struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;  // "" or "/prefix" without trailing slash

  static Endpoint parse(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos || scheme_end == 0) {
      throw PreconditionError(fmt::format("endpoint '{}' lacks a scheme (http://...)", url));
    }
    auto path_start = url.find('/', scheme_end + 3);
    Endpoint e;
    e.base = url.substr(0, path_start);
    if (e.base.size() <= scheme_end + 3) throw PreconditionError(fmt::format("endpoint '{}' lacks a host", url));
    if (path_start != std::string::npos) e.path = url.substr(path_start);
    while (!e.path.empty() && e.path.back() == '/') e.path.pop_back();
    return e;
  }

  /// `path` itself if it already ends in `suffix`, else path + default_path.
  std::string resolve(const std::string& suffix, const std::string& default_path) const {
    if (path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return path;
    }
    return path + default_path;
  }
};

namespace detail {

inline GatewayError::Kind classify(httplib::Error err, double elapsed, double timeout) {
  switch (err) {
    case httplib::Error::Connection:
    case httplib::Error::ConnectionTimeout:
    case httplib::Error::BindIPAddress:
    case httplib::Error::ProxyConnection:
    case httplib::Error::SSLConnection:
      return GatewayError::Kind::Unreachable;
    case httplib::Error::Read:
      return elapsed >= 0.95 * timeout ? GatewayError::Kind::Timeout : GatewayError::Kind::Protocol;
    default:
      return GatewayError::Kind::Protocol;
  }
}

inline httplib::Result post_json(const Endpoint& ep, const std::string& path, const nlohmann::json& body,
                                 const std::optional<std::string>& api_key, double timeout_seconds) {
  httplib::Client client(ep.base);
  auto secs = static_cast<time_t>(timeout_seconds);
  auto usecs = static_cast<time_t>((timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (api_key && !api_key->empty()) headers.emplace("Authorization", "Bearer " + *api_key);
  return client.Post(path, headers, body.dump(), "application/json");
}

}  // namespace detail

struct HttpBackendConfig {
  std::string endpoint = "http://127.0.0.1:5000";
  std::string model = "local-model";
  std::optional<std::string> api_key;
  double timeout_seconds = 120.0;
};

/// Chat backend for servers exposing POST /v1/chat/completions.
class HttpChatBackend final : public Backend {
 public:
  explicit HttpChatBackend(HttpBackendConfig config)
      : config_(std::move(config)), endpoint_(Endpoint::parse(config_.endpoint)) {}

  static nlohmann::json request_body(const std::string& model, const std::vector<ChatMessage>& messages,
                                     const GenerationParams& params) {
    nlohmann::json body;
    body["model"] = model;
    body["messages"] = nlohmann::json::array();
    for (const auto& m : messages) body["messages"].push_back({{"role", to_string(m.role)}, {"content", m.content}});
    body["max_tokens"] = params.max_tokens;
    body["temperature"] = params.temperature;
    body["min_p"] = params.min_p;
    if (params.seed) body["seed"] = *params.seed;
    body["stream"] = false;
    return body;
  }

  std::string complete(const std::vector<ChatMessage>& messages, const GenerationParams& params) override {
    const auto start = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

    auto path = endpoint_.resolve("/chat/completions", "/v1/chat/completions");
    auto res = detail::post_json(endpoint_, path, request_body(config_.model, messages, params), config_.api_key,
                                 config_.timeout_seconds);
    if (!res) {
      auto e = elapsed();
      throw GatewayError(detail::classify(res.error(), e, config_.timeout_seconds),
                         fmt::format("chat request to {}{} failed: {}", endpoint_.base, path,
                                     httplib::to_string(res.error())),
                         e);
    }
    if (res->status != 200) {
      throw GatewayError(GatewayError::Kind::Protocol,
                         fmt::format("chat endpoint returned HTTP {}: {}", res->status, res->body.substr(0, 200)),
                         elapsed());
    }
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    try {
      if (!j.is_discarded()) return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception&) {
    }
    throw GatewayError(GatewayError::Kind::Protocol, "chat response lacks choices[0].message.content", elapsed());
  }

 private:
  HttpBackendConfig config_;
  Endpoint endpoint_;
};

struct HttpEmbedderConfig {
  std::string endpoint = "http://127.0.0.1:8080";
  std::string model = "BAAI/bge-large-en-v1.5";
  std::size_t dimension = 1024;
  std::optional<std::string> api_key;
  double timeout_seconds = 30.0;
};

/**
 * Embedder over HTTP. If the endpoint path ends in "/embed" the request is
 * `{"inputs": [...]}` and the reply a bare array of vectors; otherwise the
 * OpenAI shape `{"input": [...], "model": ...}` -> `{"data": [{"embedding": [...]}]}`.
 */
class HttpEmbedder final : public Embedder {
 public:
  explicit HttpEmbedder(HttpEmbedderConfig config)
      : config_(std::move(config)), endpoint_(Endpoint::parse(config_.endpoint)) {}

  std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) const override {
    const bool tei = endpoint_.path.size() >= 6 && endpoint_.path.compare(endpoint_.path.size() - 6, 6, "/embed") == 0;
    nlohmann::json body;
    std::string path;
    if (tei) {
      path = endpoint_.path;
      body["inputs"] = texts;
    } else {
      path = endpoint_.resolve("/embeddings", "/v1/embeddings");
      body["input"] = texts;
      body["model"] = config_.model;
    }
    auto res = detail::post_json(endpoint_, path, body, config_.api_key, config_.timeout_seconds);
    if (!res) {
      throw RetrievalError(fmt::format("embedding request failed: {}", httplib::to_string(res.error())));
    }
    if (res->status != 200) throw RetrievalError(fmt::format("embedding endpoint returned HTTP {}", res->status));

    auto j = nlohmann::json::parse(res->body, nullptr, false);
    std::vector<Embedding> out;
    try {
      if (j.is_array()) {
        for (const auto& v : j) out.push_back(v.get<Embedding>());
      } else if (j.is_object() && j.contains("data")) {
        for (const auto& item : j.at("data")) out.push_back(item.at("embedding").get<Embedding>());
      } else {
        throw RetrievalError("unrecognized embedding response");
      }
    } catch (const nlohmann::json::exception& e) {
      throw RetrievalError(fmt::format("malformed embedding response: {}", e.what()));
    }
    if (out.size() != texts.size()) throw RetrievalError("embedding response has the wrong number of vectors");
    return out;
  }

  std::size_t dimension() const override { return config_.dimension; }

 private:
  HttpEmbedderConfig config_;
  Endpoint endpoint_;
};

}  // namespace homellm
