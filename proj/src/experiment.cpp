#include "gw/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <thread>

#include <nlohmann/json.hpp>

#include "gw/io.hpp"
#include "gw/rng.hpp"
#include "gw/solvers.hpp"
#include "gw/tasks.hpp"

namespace gw {

namespace {

using json = nlohmann::json;

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Product coupling with a seeded multiplicative jitter, renormalized to unit
// mass. The jitter breaks the symmetric saddles that make the plain product
// coupling a fixed point on highly regular instances (e.g. two equal
// cliques); jitter 0 recovers the exact product coupling.
Matrix jittered_product(const ProbabilityVector& mu, const ProbabilityVector& nu,
                        double jitter, std::uint64_t seed) {
  Matrix p = mu.weights() * nu.weights().transpose();
  if (jitter > 0.0) {
    Rng rng(seed);
    for (Eigen::Index j = 0; j < p.cols(); ++j) {
      for (Eigen::Index i = 0; i < p.rows(); ++i) {
        p(i, j) *= 1.0 + jitter * rng.uniform(-1.0, 1.0);
      }
    }
    p /= p.sum();
  }
  return p;
}

struct ProblemInstance {
  DistanceMatrix d_x;
  DistanceMatrix d_y;
  ProbabilityVector mu;
  ProbabilityVector nu;
  std::vector<int> ground_truth;  // align: node map; partition: labels
};

ProblemInstance build_align_instance(const ExperimentSpec& spec,
                                     std::uint64_t instance_seed) {
  AlignmentInstance inst = [&] {
    if (!spec.source_edges.empty()) {
      const Graph source = read_edge_list_file(spec.source_edges);
      if (spec.target_edges.empty()) {
        return make_alignment_instance(source, spec.gen.q_percent, instance_seed);
      }
      const Graph target = read_edge_list_file(spec.target_edges);
      if (target.num_nodes() < source.num_nodes()) {
        throw ConfigError("target graph has fewer nodes than the source");
      }
      std::vector<int> identity(source.num_nodes());
      for (std::size_t i = 0; i < identity.size(); ++i) {
        identity[i] = static_cast<int>(i);
      }
      return AlignmentInstance{source, target, std::move(identity)};
    }
    Graph source = spec.gen.graph_model == "gaussian"
                       ? gen_gaussian_partition(spec.gen.n, spec.gen.k,
                                                spec.gen.p_in, spec.gen.p_out,
                                                mix_seed(instance_seed, 11))
                             .graph
                       : gen_barabasi_albert(spec.gen.n, spec.gen.m_attach,
                                             mix_seed(instance_seed, 11));
    return make_alignment_instance(source, spec.gen.q_percent, instance_seed);
  }();
  return ProblemInstance{adjacency_distance(inst.source),
                         adjacency_distance(inst.target),
                         ProbabilityVector::uniform(inst.source.num_nodes()),
                         ProbabilityVector::uniform(inst.target.num_nodes()),
                         std::move(inst.ground_truth)};
}

ProblemInstance build_partition_instance(const ExperimentSpec& spec,
                                         std::uint64_t instance_seed) {
  PartitionInstance inst = [&] {
    if (!spec.edges.empty()) {
      if (spec.labels.empty()) {
        throw ConfigError("partition from --edges requires --labels");
      }
      Graph g = read_edge_list_file(spec.edges);
      std::ifstream in(spec.labels);
      if (!in) throw std::runtime_error("cannot open '" + spec.labels + "'");
      std::vector<int> labels;
      int v = 0;
      while (in >> v) labels.push_back(v);
      if (static_cast<Eigen::Index>(labels.size()) != g.num_nodes()) {
        throw ConfigError("label count does not match the node count");
      }
      return PartitionInstance{std::move(g), spec.gen.k, std::move(labels)};
    }
    return gen_gaussian_partition(spec.gen.n, spec.gen.k, spec.gen.p_in,
                                  spec.gen.p_out, mix_seed(instance_seed, 13));
  }();
  auto [d_y, nu] = partition_target(inst.k);
  return ProblemInstance{adjacency_distance(inst.graph), std::move(d_y),
                         ProbabilityVector::uniform(inst.graph.num_nodes()),
                         std::move(nu), std::move(inst.ground_truth_labels)};
}

ProblemInstance build_match2d_instance(const ExperimentSpec& spec,
                                       std::uint64_t instance_seed) {
  const Shape2D shape = parse_shape(spec.gen.shape);
  const PointCloud2D source =
      sample_2d_shape(spec.gen.n_source, shape, mix_seed(instance_seed, 21));
  PointCloud2D target =
      spec.gen.identical_clouds
          ? source
          : sample_2d_shape(spec.gen.n_target, shape, mix_seed(instance_seed, 22));
  target = rotate_2d(target, spec.gen.theta);
  return ProblemInstance{
      euclidean_distance_matrix(source), euclidean_distance_matrix(target),
      ProbabilityVector::uniform(static_cast<Eigen::Index>(source.points.size())),
      ProbabilityVector::uniform(static_cast<Eigen::Index>(target.points.size())),
      {}};
}

struct CellOutput {
  SolveReport report;
  double metric = 0.0;
  double split = 0.0;
  double residual = 0.0;
  double entropy = 0.0;
  double infeasibility = 0.0;
  double objective = 0.0;
  double wall_seconds = 0.0;
};

CellOutput run_cell(const ExperimentSpec& spec, const ProblemInstance& problem,
                    const SolverConfig& config, std::uint64_t jitter_seed) {
  SolveOptions opts;
  opts.initial = jittered_product(problem.mu, problem.nu, spec.init_jitter,
                                  jitter_seed);
  const auto t0 = std::chrono::steady_clock::now();
  CellOutput out{solve(problem.d_x, problem.d_y, problem.mu, problem.nu, config,
                       opts)};
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  const Matrix& plan = out.report.final_coupling.entries();
  out.objective = gw_objective(problem.d_x, problem.d_y, plan);
  out.infeasibility = marginal_infeasibility(plan, problem.mu, problem.nu);
  out.entropy = coupling_entropy(plan);
  if (out.report.pi_half && out.report.w_half) {
    out.split =
        split_gap(out.report.pi_half->entries(), out.report.w_half->entries());
  }
  try {
    out.residual = luo_tseng_residual(problem.d_x, problem.d_y, plan,
                                      problem.mu, problem.nu);
  } catch (const std::runtime_error&) {
    out.residual = std::numeric_limits<double>::quiet_NaN();
  }

  switch (spec.task) {
    case TaskKind::Align:
      out.metric =
          alignment_accuracy(hard_assignment(plan), problem.ground_truth);
      break;
    case TaskKind::Partition:
      out.metric = ami_score(partition_assign(plan), problem.ground_truth);
      break;
    case TaskKind::Match2D:
      out.metric = out.entropy;
      break;
  }
  return out;
}

}  // namespace

std::string to_string(TaskKind task) {
  switch (task) {
    case TaskKind::Align:
      return "align";
    case TaskKind::Partition:
      return "partition";
    case TaskKind::Match2D:
      return "match2d";
  }
  return "?";
}

std::vector<SolverConfig> expand_config_grid(
    const SolverConfig& base, const std::vector<std::string>& solvers,
    const std::vector<double>& rhos, const std::vector<double>& steps,
    const std::vector<double>& epsilons) {
  std::vector<SolverConfig> grid;
  for (const auto& solver : solvers) {
    for (const double rho : rhos) {
      for (const double step : steps) {
        for (const double eps : epsilons) {
          SolverConfig c = base;
          c.algorithm = parse_algorithm(solver);
          c.rho = rho;
          c.step = step;
          c.epsilon_reg = eps;
          grid.push_back(c);
        }
      }
    }
  }
  return grid;
}

const char* const kSummaryHeader =
    "task,instance,seed,solver,geometry,rho,step,eps,inner_iters,inner_tol,"
    "switch_iters,rel_tol,max_iters,jitter,iterations,converged,objective,"
    "metric,marginal_infeasibility,split_gap,residual,entropy,wall_seconds";

int run_experiment(const ExperimentSpec& spec) {
  try {
    if (spec.configs.empty()) throw ConfigError("no solver configurations");
    if (spec.instances < 1) throw ConfigError("instances must be >= 1");
    if (spec.jobs < 1) throw ConfigError("jobs must be >= 1");
    for (const auto& config : spec.configs) validate(config);

    std::filesystem::create_directories(spec.out_dir);

    // Build (deterministically, in order) the per-instance problems.
    std::vector<ProblemInstance> problems;
    problems.reserve(spec.instances);
    for (int inst = 0; inst < spec.instances; ++inst) {
      const std::uint64_t instance_seed = spec.base_seed + inst;
      switch (spec.task) {
        case TaskKind::Align:
          problems.push_back(build_align_instance(spec, instance_seed));
          break;
        case TaskKind::Partition:
          problems.push_back(build_partition_instance(spec, instance_seed));
          break;
        case TaskKind::Match2D:
          problems.push_back(build_match2d_instance(spec, instance_seed));
          break;
      }
    }

    const std::size_t n_configs = spec.configs.size();
    const std::size_t n_cells = problems.size() * n_configs;
    std::vector<std::optional<CellOutput>> outputs(n_cells);

    // Grid cells run on a bounded worker pool; output files are written by
    // this thread afterwards, in cell order.
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
      for (std::size_t cell = next.fetch_add(1); cell < n_cells;
           cell = next.fetch_add(1)) {
        {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (failure) return;
        }
        const std::size_t inst = cell / n_configs;
        const std::size_t cfg = cell % n_configs;
        try {
          outputs[cell] = run_cell(
              spec, problems[inst], spec.configs[cfg],
              mix_seed(spec.base_seed + inst, 1000 + cfg));
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    };
    const std::size_t n_workers =
        std::min<std::size_t>(static_cast<std::size_t>(spec.jobs), n_cells);
    if (n_workers <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (std::size_t t = 0; t < n_workers; ++t) pool.emplace_back(worker);
      for (auto& t : pool) t.join();
    }
    if (failure) std::rethrow_exception(failure);

    const std::filesystem::path out_dir(spec.out_dir);
    std::ofstream summary(out_dir / "summary.csv");
    if (!summary) throw std::runtime_error("cannot write summary.csv");
    summary << kSummaryHeader << "\n";

    std::ofstream trace;
    if (spec.write_trace) {
      trace.open(out_dir / "trace.jsonl");
      if (!trace) throw std::runtime_error("cannot write trace.jsonl");
    }

    for (std::size_t cell = 0; cell < n_cells; ++cell) {
      const std::size_t inst = cell / n_configs;
      const std::size_t cfg = cell % n_configs;
      const SolverConfig& config = spec.configs[cfg];
      const CellOutput& out = *outputs[cell];

      summary << to_string(spec.task) << "," << inst << ","
              << spec.base_seed + inst << "," << to_string(config.algorithm)
              << "," << to_string(config.geometry) << "," << fmt(config.rho)
              << "," << fmt(config.step) << "," << fmt(config.epsilon_reg)
              << "," << config.inner_iters << "," << fmt(config.inner_tol)
              << "," << config.switch_iters << "," << fmt(config.rel_tol)
              << "," << config.max_iters << "," << fmt(spec.init_jitter) << ","
              << out.report.iterations_used << ","
              << (out.report.converged ? 1 : 0) << "," << fmt(out.objective)
              << "," << fmt(out.metric) << "," << fmt(out.infeasibility) << ","
              << fmt(out.split) << "," << fmt(out.residual) << ","
              << fmt(out.entropy) << "," << fmt(out.wall_seconds) << "\n";

      if (spec.write_trace) {
        for (const auto& rec : out.report.trace) {
          json line{{"task", to_string(spec.task)},
                    {"instance", inst},
                    {"config", cfg},
                    {"solver", to_string(config.algorithm)},
                    {"iter", rec.iter},
                    {"objective", rec.objective},
                    {"marginal_infeasibility", rec.marginal_infeasibility},
                    {"split_gap", rec.split_gap},
                    {"rel_change", rec.rel_change},
                    {"elapsed_seconds", rec.elapsed_seconds},
                    {"phase", rec.phase}};
          if (rec.residual) {
            line["residual"] = *rec.residual;
          } else {
            line["residual"] = nullptr;
          }
          trace << line.dump() << "\n";
        }
      }

      if (spec.task == TaskKind::Match2D) {
        const std::string name =
            n_cells == 1 ? "coupling.csv"
                         : "coupling_" + std::to_string(inst) + "_" +
                               std::to_string(cfg) + ".csv";
        write_coupling_csv_file((out_dir / name).string(),
                                out.report.final_coupling.entries());
      }
    }
    return 0;
  } catch (const NumericalInstabilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

DiagnosticsSummary diagnose_files(const std::string& coupling_path,
                                  const std::string& d_x_path,
                                  const std::string& d_y_path,
                                  const std::string& mu_path,
                                  const std::string& nu_path) {
  const Matrix pi = read_coupling_csv_file(coupling_path);
  const DistanceMatrix d_x(read_square_csv_file(d_x_path));
  const DistanceMatrix d_y(read_square_csv_file(d_y_path));
  const ProbabilityVector mu = mu_path.empty()
                                   ? ProbabilityVector::uniform(pi.rows())
                                   : read_weights_file(mu_path);
  const ProbabilityVector nu = nu_path.empty()
                                   ? ProbabilityVector::uniform(pi.cols())
                                   : read_weights_file(nu_path);
  if (pi.rows() != d_x.size() || pi.cols() != d_y.size()) {
    throw DimensionMismatchError("coupling shape does not match D_X/D_Y");
  }
  validate_inputs(d_x, d_y, mu, nu);

  DiagnosticsSummary summary;
  summary.objective = gw_objective(d_x, d_y, pi);
  summary.marginal_infeasibility = marginal_infeasibility(pi, mu, nu);
  summary.split_gap = 0.0;
  summary.residual = luo_tseng_residual(d_x, d_y, pi, mu, nu);
  summary.entropy = coupling_entropy(pi);
  return summary;
}

}  // namespace gw
