#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "conspigraph/config.hpp"
#include "conspigraph/http.hpp"

namespace conspigraph::pipeline {

enum class StageId { ingest, urls, match, graph, flag, hits, language, monetize, metrics, reports };
inline constexpr std::array<StageId, 10> kStages = {StageId::ingest, StageId::urls,     StageId::match,
                                                    StageId::graph,  StageId::flag,     StageId::hits,
                                                    StageId::language, StageId::monetize, StageId::metrics,
                                                    StageId::reports};

std::string_view to_string(StageId s);
std::optional<StageId> parse_stage(std::string_view s);

/// Where every persisted file lives under the output directory.
struct Layout {
  fs::path root;
  fs::path stages() const { return root / "stages"; }
  fs::path reports() const { return root / "reports"; }
  fs::path manifest() const { return root / "manifest.json"; }

  /// Files a stage writes, relative to `root`.
  static std::vector<std::string> outputs(StageId s);
};

enum class Outcome { completed, cached, failed, skipped };
std::string_view to_string(Outcome o);

struct StageResult {
  StageId stage;
  Outcome outcome = Outcome::skipped;
  std::string error;
  double seconds = 0;
};

struct RunOptions {
  std::optional<StageId> only;        // run a single stage from persisted inputs
  bool force = false;                 // ignore cached results
  http::Client* client = nullptr;     // network client override (tests)
};

struct RunReport {
  std::vector<StageResult> stages;
  bool ok() const;
  /// 0 on success, 3 when a stage failed.
  int exit_code() const { return ok() ? 0 : 3; }
};

/// Runs the stages in order. Each stage is skipped as a cache hit when the
/// manifest holds the same fingerprint (stage version, parameters, input
/// digests) and its outputs are unchanged on disk. A failing stage stops the
/// run; later stages are marked skipped. Throws ValidationError for a bad
/// config before any stage runs.
RunReport run_pipeline(const config::PipelineConfig& config, const RunOptions& options = {});

}  // namespace conspigraph::pipeline
