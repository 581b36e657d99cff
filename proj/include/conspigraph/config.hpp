#pragma once

#include <map>
#include <optional>
#include <string>

#include "conspigraph/common.hpp"

namespace conspigraph::config {

enum class MetricsSource { fixture, live };

struct PipelineConfig {
  // paths
  fs::path corpus;
  fs::path catalog;
  fs::path platforms;   // empty: bundled
  fs::path shorteners;  // empty: bundled
  fs::path cache;       // empty: <out>/cache/resolutions.jsonl
  fs::path fixtures;    // metrics snapshots; empty: <out>/fixtures
  fs::path out = "out";
  fs::path allowdeny;   // optional
  fs::path rates;       // optional; USD only without it
  fs::path tx_summaries;  // optional

  // parameters
  double resolution = 1.0;
  std::uint64_t seed = 0;
  double flag_threshold = 0.40;
  std::size_t min_size = 10;
  double hits_tolerance = 1e-8;
  std::size_t sample_size = 500;
  std::int64_t politeness_delay_ms = 1000;
  std::int64_t timeout_ms = 10'000;
  int max_redirects = 10;
  std::size_t workers = 4;
  double language_threshold = 0.08;
  std::size_t language_min_chars = 20;
  std::size_t top_k = 5;

  // modes
  bool strict = false;
  bool no_network = false;
  bool binary_edges = false;
  bool scan_messages = true;  // wallet addresses in messages, not only descriptions
  MetricsSource metrics_source = MetricsSource::fixture;

  /// Flat `key = value` listing of every field, in declaration order.
  std::string to_text() const;
};

/// Parses `key = value` lines ('#' comments). Relative paths resolve against
/// `base_dir`. Unknown keys and malformed values throw ValidationError.
PipelineConfig parse(std::string_view text, const fs::path& base_dir, const std::string& source = "<config>");
PipelineConfig load(const fs::path& path);

/// Applies one `key=value` override (CLI flags).
void set(PipelineConfig& c, std::string_view key, std::string_view value, const fs::path& base_dir = {});

/// Range and existence checks; throws ValidationError.
void validate(const PipelineConfig& c);

fs::path cache_path(const PipelineConfig& c);
fs::path fixtures_path(const PipelineConfig& c);

}  // namespace conspigraph::config
