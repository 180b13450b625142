#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "optlim/diagram.hpp"
#include "optlim/identities.hpp"
#include "optlim/potential.hpp"
#include "optlim/solver.hpp"
#include "optlim/triangulation.hpp"

namespace optlim {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr int kReportSchema = 1;

/// Bundled PD codes (Rolfsen-table diagrams): 3_1 (rejection fixture),
/// 4_1, 5_2, 6_1, 6_2, 6_3.
const std::map<std::string, std::string>& bundled_fixtures();

struct ComputeOptions {
  std::string knot;     // fixture name, or
  std::string pd_text;  // raw PD text
  std::optional<int> open_side;
  std::optional<int> unit_region;
  int seeds = 200;
  std::uint64_t rng_seed = 1;
  double tol = kEpsSolve;
  int threads = 1;
  bool with_timings = false;
};

enum class ComputeStatus {
  Ok = 0,
  ParseFailure = 2,
  AssumptionFailure = 3,
  NoEssentialSolution = 4,
  ConsistencyFailure = 5,
};

struct SolutionReport {
  std::vector<Cx> values;
  double residual = 0.0;
  bool essential = false;
  double volume = 0.0;
  bool geometric = false;
  std::optional<Cx> flattened;
};

struct ComputeReport {
  ComputeStatus status = ComputeStatus::Ok;
  std::string error;
  std::string knot;
  int crossings = 0;
  int open_side = 0;
  int unit_region = -1;
  int g = 0, m = 0;
  std::vector<SolutionReport> h1_solutions, h2_solutions;
  int geometric_index = -1;  // into h2_solutions
  Cx w0_flattened;           // W0 at the geometric solution
  double vol = 0.0;
  double cs = 0.0;  // in (-pi^2/2, pi^2/2]
  // cross-checks at the geometric pair
  double edge_residual_A = 0.0, edge_residual_BC = 0.0;
  double cusp_residual = 0.0;
  double flattened_congruence_residual = 0.0;  // V0 vs W0 mod 4pi^2
  double cancellation_residual = 0.0;
  double roundtrip_residual = 0.0;    // z -> w -> z
  std::uint64_t rng_seed = 1;
  int seeds = 0;
  double elapsed_ms = 0.0;
  bool with_timings = false;

  std::string to_json() const;
};

ComputeReport run_compute(const ComputeOptions& opts);

/// Artifacts for --dump-potential / --dump-triangulation.
struct PipelineObjects {
  KnotDiagram diagram;
  TangleGraph tangle;
  VariableAssignment vars;
  PotentialFunction V, W;
  Triangulation yokota, thurston;
};
PipelineObjects build_objects(const ComputeOptions& opts);

struct SuiteOptions {
  int samples = 1000;
  std::uint64_t rng_seed = 1;
  int threads = 1;
};

struct SuiteResult {
  std::string suite;
  bool pass = false;
  long samples = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  std::vector<std::string> lines;  // per-check summaries
  std::string to_json() const;
};

/// suite in {lemma5, lemma31, moves, edges, cancellation, numerics}
SuiteResult run_suite(const std::string& suite, const SuiteOptions& opts);

}  // namespace optlim
