#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gw/diagnostics.hpp"
#include "gw/types.hpp"

namespace gw {

enum class TaskKind { Align, Partition, Match2D };

std::string to_string(TaskKind task);

// Generator knobs; which ones apply depends on the task.
struct GeneratorParams {
  std::string graph_model = "ba";  // ba | gaussian
  int n = 50;
  int m_attach = 2;
  int k = 2;
  double p_in = 0.5;
  double p_out = 0.02;
  double q_percent = 0.0;  // alignment noise level, percent

  // match2d
  std::string shape = "cross";
  int n_source = 30;
  int n_target = 40;
  double theta = 0.5235987755982988;  // 30 degrees
  bool identical_clouds = false;      // reuse the source cloud as the target
};

struct ExperimentSpec {
  TaskKind task = TaskKind::Align;
  GeneratorParams gen;

  // Optional file inputs; generators are used when these are empty.
  std::string source_edges;  // align
  std::string target_edges;  // align (ground truth = identity map)
  std::string edges;         // partition
  std::string labels;        // partition ground truth, one label per line

  int instances = 1;
  std::uint64_t base_seed = 0;
  std::vector<SolverConfig> configs;  // the grid; one summary row per cell
  double init_jitter = 0.01;  // relative jitter on the product-coupling start
  std::string out_dir = "out";
  int jobs = 1;
  bool write_trace = true;
};

// Cartesian grid over the comma-separated solver/rho/step/eps axes.
std::vector<SolverConfig> expand_config_grid(
    const SolverConfig& base, const std::vector<std::string>& solvers,
    const std::vector<double>& rhos, const std::vector<double>& steps,
    const std::vector<double>& epsilons);

// Fixed column set of summary.csv, also used by the golden-file test.
extern const char* const kSummaryHeader;

// Runs the experiment, writing trace.jsonl / summary.csv (and coupling.csv
// for match2d) under spec.out_dir. Returns a process exit code: 0 success,
// 1 configuration or input error, 2 solver numerical instability.
int run_experiment(const ExperimentSpec& spec);

// Diagnostics for a coupling stored on disk; empty marginal paths mean
// uniform. Throws on unreadable input or mismatched dimensions.
DiagnosticsSummary diagnose_files(const std::string& coupling_path,
                                  const std::string& d_x_path,
                                  const std::string& d_y_path,
                                  const std::string& mu_path = "",
                                  const std::string& nu_path = "");

}  // namespace gw
