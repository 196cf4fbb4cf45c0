#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gw/experiment.hpp"
#include "gw/types.hpp"

namespace {

struct CommonFlags {
  std::vector<std::string> solvers{"bapg"};
  std::string geometry = "entropy";
  std::vector<double> rhos{0.1};
  std::vector<double> steps{5.0};
  std::vector<double> epsilons{0.1};
  int inner_iters = 1000;
  double inner_tol = 1e-9;
  double rel_tol = 1e-6;
  int max_iters = 2000;
  double perturbation = 0.0;
  int switch_iters = 200;
  bool log_domain = false;
  bool record_residual = false;
};

void add_common_flags(CLI::App* cmd, gw::ExperimentSpec& spec,
                      CommonFlags& flags) {
  cmd->add_option("--solver", flags.solvers,
                  "Solver grid axis: bapg|bpg|ebpg|hbpg|fw")
      ->delimiter(',');
  cmd->add_option("--geometry", flags.geometry,
                  "BAPG Bregman geometry: entropy|quadratic");
  cmd->add_option("--rho", flags.rhos, "BAPG step size grid axis")
      ->delimiter(',');
  cmd->add_option("--step", flags.steps, "BPG step size grid axis")
      ->delimiter(',');
  cmd->add_option("--eps", flags.epsilons, "eBPG regularization grid axis")
      ->delimiter(',');
  cmd->add_option("--inner-iters", flags.inner_iters,
                  "Inner Sinkhorn cap (1 selects BPG-S)");
  cmd->add_option("--inner-tol", flags.inner_tol, "Inner Sinkhorn tolerance");
  cmd->add_option("--rel-tol", flags.rel_tol, "Outer stopping tolerance");
  cmd->add_option("--max-iters", flags.max_iters, "Outer iteration cap");
  cmd->add_option("--perturbation", flags.perturbation,
                  "Per-iteration uniform mixing weight (BPG)");
  cmd->add_option("--switch-iters", flags.switch_iters, "hBPG phase-1 budget");
  cmd->add_flag("--log-domain", flags.log_domain,
                "Log-domain inner solver for eBPG");
  cmd->add_flag("--record-residual", flags.record_residual,
                "Record the optimality residual in the trace (slow)");

  cmd->add_option("--instances", spec.instances, "Number of seeded instances");
  cmd->add_option("--seed", spec.base_seed, "Base seed");
  cmd->add_option("--jitter", spec.init_jitter,
                  "Relative jitter on the product-coupling start (0 disables)");
  cmd->add_option("--jobs", spec.jobs, "Worker pool size for grid cells");
  cmd->add_option("--out", spec.out_dir, "Output directory")->required();
  cmd->add_option("--trace", spec.write_trace,
                  "Write trace.jsonl (1, default) or skip it (0)");
}

void finish_spec(gw::ExperimentSpec& spec, const CommonFlags& flags) {
  gw::SolverConfig base;
  base.geometry = gw::parse_geometry(flags.geometry);
  base.inner_iters = flags.inner_iters;
  base.inner_tol = flags.inner_tol;
  base.rel_tol = flags.rel_tol;
  base.max_iters = flags.max_iters;
  base.perturbation = flags.perturbation;
  base.switch_iters = flags.switch_iters;
  base.log_domain = flags.log_domain;
  base.record_residual = flags.record_residual;
  base.seed = static_cast<std::int64_t>(spec.base_seed);
  spec.configs = gw::expand_config_grid(base, flags.solvers, flags.rhos,
                                        flags.steps, flags.epsilons);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gromov-Wasserstein toolkit: alignment, partition and 2D "
               "matching experiments over discrete metric-measure spaces"};
  app.require_subcommand(1);
  app.set_config("--config", "", "INI config file (sections per subcommand)");

  gw::ExperimentSpec align_spec;
  align_spec.task = gw::TaskKind::Align;
  CommonFlags align_flags;
  CLI::App* align = app.add_subcommand("align", "Graph alignment experiment");
  add_common_flags(align, align_spec, align_flags);
  align->add_option("--graph-model", align_spec.gen.graph_model,
                    "Source generator: ba|gaussian");
  align->add_option("--n", align_spec.gen.n, "Source node count");
  align->add_option("--m-attach", align_spec.gen.m_attach,
                    "Barabasi-Albert attachment count");
  align->add_option("--k", align_spec.gen.k, "Gaussian partition cluster count");
  align->add_option("--p-in", align_spec.gen.p_in, "Intra-cluster edge prob");
  align->add_option("--p-out", align_spec.gen.p_out, "Inter-cluster edge prob");
  align->add_option("--q", align_spec.gen.q_percent, "Noise level, percent");
  align->add_option("--source-edges", align_spec.source_edges,
                    "Source graph edge-list file");
  align->add_option("--target-edges", align_spec.target_edges,
                    "Target graph edge-list file (ground truth = identity)");

  gw::ExperimentSpec part_spec;
  part_spec.task = gw::TaskKind::Partition;
  part_spec.gen.n = 60;
  part_spec.gen.k = 3;
  CommonFlags part_flags;
  CLI::App* part = app.add_subcommand("partition", "Graph partition experiment");
  add_common_flags(part, part_spec, part_flags);
  part->add_option("--n", part_spec.gen.n, "Node count");
  part->add_option("--k", part_spec.gen.k, "Cluster count");
  part->add_option("--p-in", part_spec.gen.p_in, "Intra-cluster edge prob");
  part->add_option("--p-out", part_spec.gen.p_out, "Inter-cluster edge prob");
  part->add_option("--edges", part_spec.edges, "Graph edge-list file");
  part->add_option("--labels", part_spec.labels,
                   "Ground-truth labels file (one per line)");

  gw::ExperimentSpec match_spec;
  match_spec.task = gw::TaskKind::Match2D;
  CommonFlags match_flags;
  CLI::App* match = app.add_subcommand("match2d", "Toy 2D matching experiment");
  add_common_flags(match, match_spec, match_flags);
  match->add_option("--shape", match_spec.gen.shape, "Shape: cross|ring|blob");
  match->add_option("--n-source", match_spec.gen.n_source, "Source point count");
  match->add_option("--n-target", match_spec.gen.n_target, "Target point count");
  match->add_option("--theta", match_spec.gen.theta, "Target rotation, radians");
  match->add_flag("--identical-clouds", match_spec.gen.identical_clouds,
                  "Reuse the source cloud as the (rotated) target");

  std::string diag_coupling, diag_dx, diag_dy, diag_mu, diag_nu;
  CLI::App* diag =
      app.add_subcommand("diagnose", "Diagnostics for a stored coupling");
  diag->add_option("coupling", diag_coupling, "Coupling CSV (n,m header)")
      ->required();
  diag->add_option("dx", diag_dx, "D_X square CSV")->required();
  diag->add_option("dy", diag_dy, "D_Y square CSV")->required();
  diag->add_option("--mu", diag_mu, "Row marginal file (default uniform)");
  diag->add_option("--nu", diag_nu, "Column marginal file (default uniform)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (align->parsed()) {
      finish_spec(align_spec, align_flags);
      return gw::run_experiment(align_spec);
    }
    if (part->parsed()) {
      finish_spec(part_spec, part_flags);
      return gw::run_experiment(part_spec);
    }
    if (match->parsed()) {
      finish_spec(match_spec, match_flags);
      return gw::run_experiment(match_spec);
    }
    if (diag->parsed()) {
      const gw::DiagnosticsSummary s =
          gw::diagnose_files(diag_coupling, diag_dx, diag_dy, diag_mu, diag_nu);
      nlohmann::json out{{"objective", s.objective},
                         {"marginal_infeasibility", s.marginal_infeasibility},
                         {"split_gap", s.split_gap},
                         {"residual", s.residual},
                         {"entropy", s.entropy}};
      std::cout << out.dump(2) << "\n";
      return 0;
    }
  } catch (const gw::NumericalInstabilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
