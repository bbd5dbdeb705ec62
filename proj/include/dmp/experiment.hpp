#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "dmp/engine.hpp"
#include "dmp/topology.hpp"

namespace dmp {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key-value config with [section] headers. Numeric solver fields have
// no silent defaults: iterations and alpha (value or "auto") are required.
struct ExperimentConfig {
  // [problem]
  std::string problem;  // wb | hardcase | bilinear
  int wb_n = 0;
  int nodes = 0;
  std::string measures_source;  // "gaussian" or a csv path
  std::string cost_source;      // "grid" or a csv path
  double support_lo = -10.0, support_hi = 10.0;
  double mean_lo = -5.0, mean_hi = 5.0;
  double var_lo = 0.8, var_hi = 1.8;
  double cost_max = 1.0;
  double hc_l = 1.0, hc_eps = 0.1, hc_r = 1.0;
  int hc_dim = 8, hc_rho = 1;
  int bl_dim_x = 2, bl_dim_y = 2;
  double bl_scale = 1.0, bl_mu = 0.0;

  // [topology]
  GraphKind topology = GraphKind::Complete;
  double edge_prob = 0.5;

  // [solver]
  std::string solver;  // dmp | dmp_chebyshev | sliding | ibp
  long iterations = 0;
  bool alpha_auto = true;
  double alpha_value = 0.0;
  int chebyshev_k = -1;  // -1 = floor(sqrt(chi))
  double ibp_gamma = 0.0;
  double sliding_epsilon = 1e-3;
  int gap_every = 0;
  int row_every = 1;

  // [run]
  std::uint64_t seed = 0;

  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig parse_file(const std::string& path);
};

struct ExperimentOutcome {
  RunReport report;
  double chi = 1.0;
  bool divergence_event = false;
  int divergence_iteration = -1;
  Vec barycenter;  // wb runs only
  std::string summary;  // key=value lines, deterministic
};

// Runs one experiment and writes report.csv, summary.txt (and
// barycenter.csv / plot.svg when applicable) under out_dir.
ExperimentOutcome run_experiment(const ExperimentConfig& config,
                                 const std::string& out_dir, bool plot = false);

// Runs the same problem and seed over several topologies
// (e.g. {"complete","star","cycle","erdos:0.5"}) and writes one CSV per
// topology plus comparison.csv ordered by the network condition number.
// An empty list is a no-op and returns the warning text.
std::string topology_sweep(const ExperimentConfig& config,
                           const std::vector<std::string>& topologies,
                           const std::string& out_dir);

// Log-scale polyline plot of the gap and consensus columns.
std::string render_convergence_svg(const RunReport& report);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace dmp
