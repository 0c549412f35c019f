#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"
#include "vorocrust/planar.hpp"
#include "vorocrust/voronoi.hpp"

namespace vorocrust {

enum class RunMode { mesh3d, mesh2d, seeds_only, report_only };

RunMode parse_run_mode(const std::string& s);
const char* to_string(RunMode m);

struct RunConfig {
  RunMode mode = RunMode::mesh3d;
  std::filesystem::path input;
  /// "off", "obj", "stl" or "poly"; empty means from the extension.
  std::string format;
  Parameters params;
  InteriorMode interior;
  bool safe_mode = false;
  int threads = 1;
  std::size_t hausdorff_samples = 100000;
  std::size_t coverage_samples = 100000;
  /// Boundary samples for an extra check_conditions pass (0 skips it).
  std::size_t condition_samples = 0;
  /// Empty means nothing is written.
  std::filesystem::path out;

  /// Throws Error naming the offending setting.
  void validate() const;
};

struct RunResult {
  nlohmann::json report;
  SeedSet seeds;
  std::vector<Ball> balls;
  std::optional<SliverResult> sliver;
  std::optional<QualityReport> quality;
  std::optional<ConditionReport> conditions;
  std::optional<Mesh2dResult> planar;
  std::vector<VoronoiCell> cells;
  SurfaceMesh surface;
};

/// Runs the configured pipeline and writes its artifacts into config.out:
///   mesh3d       seeds.csv surface.off volume.vtk report.json sliver_log.jsonl
///   seeds-only   seeds.csv report.json (no cells)
///   report-only  report.json
///   mesh2d       seeds.csv cells.svg report.json
/// Timing fields live under report["timings"] only.
RunResult run_pipeline(const RunConfig& config);

/// run_pipeline with errors turned into a message and exit code 1; a run
/// with non-convex cells exits with 2.
int run(const RunConfig& config);

}  // namespace vorocrust
