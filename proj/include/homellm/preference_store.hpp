#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The homellm Authors

/**
 * @file preference_store.hpp
 * @brief Tagged preference database and the in-memory similarity index
 *        used for retrieval.
 *
 * Preference file: UTF-8, one entry per line, `sentence<TAB>TAG` with TAG
 * one of RULE, PREFERENCE, GENERALITY. Blank lines and lines starting with
 * `#` are ignored.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "homellm/errors.hpp"

namespace homellm {

/// Importance order: Rule > Preference > Generality.
enum class PreferenceTag { Rule, Preference, Generality };

inline std::string_view to_string(PreferenceTag t) {
  switch (t) {
    case PreferenceTag::Rule: return "RULE";
    case PreferenceTag::Preference: return "PREFERENCE";
    case PreferenceTag::Generality: return "GENERALITY";
  }
  return "?";
}

inline std::optional<PreferenceTag> parse_tag(std::string_view s) {
  if (s == "RULE") return PreferenceTag::Rule;
  if (s == "PREFERENCE") return PreferenceTag::Preference;
  if (s == "GENERALITY") return PreferenceTag::Generality;
  return std::nullopt;
}

using Embedding = std::vector<float>;

struct PreferenceEntry {
  std::string text;
  PreferenceTag tag = PreferenceTag::Generality;
  std::optional<Embedding> embedding;

  bool operator==(const PreferenceEntry&) const = default;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline std::vector<PreferenceEntry> parse_preferences(std::string_view text) {
  std::vector<PreferenceEntry> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    auto trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    auto tab = line.rfind('\t');
    if (tab == std::string_view::npos) throw ParseError("expected '<sentence>\\t<TAG>'", line_no);
    auto sentence = detail::trim(line.substr(0, tab));
    auto tag_text = detail::trim(line.substr(tab + 1));
    if (sentence.empty()) throw ParseError("empty sentence", line_no);
    auto tag = parse_tag(tag_text);
    if (!tag) throw ParseError(fmt::format("unknown tag '{}'", tag_text), line_no);
    out.push_back({std::string(sentence), *tag, std::nullopt});
    if (end == text.size()) break;
  }
  return out;
}

inline std::vector<PreferenceEntry> load_preferences(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError(fmt::format("{}: cannot open preference file", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_preferences(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(fmt::format("{}: {}", path.string(), e.what()), e.line());
  }
}

/**
 * Source of raw (unnormalized) text vectors. Implementations must be safe to
 * call concurrently and must not keep per-call state.
 */
class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) const = 0;
  virtual std::size_t dimension() const = 0;
};

/**
 * Deterministic hashed bag-of-tokens embedder for offline use and tests.
 *
 * Text is lower-cased (ASCII only); tokens are maximal runs of ASCII letters,
 * digits, or bytes >= 0x80. Each token adds 1.0 to bucket
 * FNV-1a-64(token) mod 256. A text with no token hashes as a whole.
 */
class HashingEmbedder final : public Embedder {
 public:
  static constexpr std::size_t kDimension = 256;

  static std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  static std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (unsigned char c : text) {
      bool word = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
      if (word) {
        cur.push_back(static_cast<char>((c >= 'A' && c <= 'Z') ? c - 'A' + 'a' : c));
      } else if (!cur.empty()) {
        tokens.push_back(std::move(cur));
        cur.clear();
      }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
  }

  Embedding embed_one(std::string_view text) const {
    Embedding v(kDimension, 0.0f);
    auto tokens = tokenize(text);
    if (tokens.empty()) {
      v[fnv1a64(text) % kDimension] = 1.0f;
      return v;
    }
    for (const auto& t : tokens) v[fnv1a64(t) % kDimension] += 1.0f;
    return v;
  }

  std::vector<Embedding> embed_batch(const std::vector<std::string>& texts) const override {
    std::vector<Embedding> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_one(t));
    return out;
  }

  std::size_t dimension() const override { return kDimension; }
};

inline void normalize_in_place(Embedding& v) {
  double sq = 0.0;
  for (float x : v) sq += static_cast<double>(x) * x;
  if (!(sq > 0.0) || !std::isfinite(sq)) throw RetrievalError("embedder returned a zero or non-finite vector");
  const double inv = 1.0 / std::sqrt(sq);
  for (float& x : v) x = static_cast<float>(x * inv);
}

/// L2-normalized embedding of one text.
inline Embedding embed(const std::string& text, const Embedder& embedder) {
  if (text.empty()) throw PreconditionError("cannot embed an empty text");
  auto batch = embedder.embed_batch({text});
  if (batch.size() != 1) throw RetrievalError("embedder returned the wrong number of vectors");
  auto v = std::move(batch.front());
  if (v.size() != embedder.dimension()) {
    throw RetrievalError(fmt::format("embedder returned dimension {}, expected {}", v.size(), embedder.dimension()));
  }
  normalize_in_place(v);
  return v;
}

/// Immutable set of embedded preference entries.
class VectorIndex {
 public:
  VectorIndex() = default;

  static VectorIndex build(std::vector<PreferenceEntry> entries, const Embedder& embedder) {
    VectorIndex index;
    index.dimension_ = embedder.dimension();
    if (!entries.empty()) {
      std::vector<std::string> texts;
      texts.reserve(entries.size());
      for (const auto& e : entries) texts.push_back(e.text);
      auto vectors = embedder.embed_batch(texts);
      if (vectors.size() != entries.size()) throw RetrievalError("embedder returned the wrong number of vectors");
      for (std::size_t i = 0; i < entries.size(); ++i) {
        if (vectors[i].size() != index.dimension_) throw RetrievalError("embedding dimension mismatch");
        index.raw_.push_back(vectors[i]);
        normalize_in_place(vectors[i]);
        entries[i].embedding = std::move(vectors[i]);
      }
    }
    index.entries_ = std::move(entries);
    return index;
  }

  const std::vector<PreferenceEntry>& entries() const { return entries_; }
  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  /// Embeddings as the embedder returned them, before normalization.
  const std::vector<Embedding>& raw() const { return raw_; }

 private:
  std::vector<PreferenceEntry> entries_;
  std::vector<Embedding> raw_;
  std::size_t dimension_ = 0;
};

/// Cosine similarity between two unit vectors, accumulated in double.
inline double cosine_unit(const Embedding& a, const Embedding& b) {
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) dot += static_cast<double>(a[i]) * b[i];
  return dot;
}

namespace detail {

/// cos(a, b)^2 with the sign of the dot product; ranks exactly like the cosine.
/// Built from unnormalized vectors so that integer-valued embeddings produce
/// bit-identical scores for mathematically equal similarities.
inline double signed_cos2(const Embedding& a, const Embedding& b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  return dot * std::fabs(dot) / (na * nb);
}

}  // namespace detail

/**
 * The k entries most similar to `query`, best first. Ties keep load order.
 * A k larger than the index returns every entry, ranked.
 */
inline std::vector<PreferenceEntry> query_top_k(const VectorIndex& index, const std::string& query, std::size_t k,
                                                const Embedder& embedder) {
  if (k == 0) throw PreconditionError("k must be >= 1");
  if (index.empty()) throw PreconditionError("query on an empty index");
  if (query.empty()) throw PreconditionError("cannot embed an empty text");
  auto batch = embedder.embed_batch({query});
  if (batch.size() != 1) throw RetrievalError("embedder returned the wrong number of vectors");
  auto q = std::move(batch.front());
  if (q.size() != index.dimension()) throw RetrievalError("query dimension differs from index dimension");
  auto check = q;
  normalize_in_place(check);  // rejects zero and non-finite vectors

  const auto& entries = index.entries();
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) scored.emplace_back(detail::signed_cos2(q, index.raw()[i]), i);
  std::stable_sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<PreferenceEntry> out;
  for (std::size_t i = 0; i < std::min(k, scored.size()); ++i) out.push_back(entries[scored[i].second]);
  return out;
}

/// `[TAG] sentence` lines, deduplicated, Rule block first, then Preference, then Generality.
inline std::string format_for_prompt(const std::vector<PreferenceEntry>& entries) {
  std::string out;
  std::set<std::pair<std::string, PreferenceTag>> seen;
  for (auto tag : {PreferenceTag::Rule, PreferenceTag::Preference, PreferenceTag::Generality}) {
    for (const auto& e : entries) {
      if (e.tag != tag || !seen.emplace(e.text, e.tag).second) continue;
      out += fmt::format("[{}] {}\n", to_string(e.tag), e.text);
    }
  }
  return out;
}

}  // namespace homellm
