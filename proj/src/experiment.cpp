#include "dmp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "dmp/bilinear.hpp"
#include "dmp/hardcase.hpp"
#include "dmp/sliding.hpp"
#include "dmp/wb.hpp"

namespace dmp {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

using KeyMap = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::map<std::string, KeyMap> parse_sections(const std::string& text) {
  std::map<std::string, KeyMap> sections;
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": expected key = value");
    if (section.empty())
      throw ConfigError("config line " + std::to_string(line_no) +
                        ": key outside any [section]");
    sections[section][trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }
  return sections;
}

const std::string& require(const KeyMap& map, const std::string& section,
                           const std::string& key) {
  auto it = map.find(key);
  if (it == map.end())
    throw ConfigError("missing required field [" + section + "] " + key);
  return it->second;
}

double to_double(const std::string& v, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return out;
  } catch (...) {
    throw ConfigError("field " + what + ": not a number: " + v);
  }
}

long to_long(const std::string& v, const std::string& what) {
  try {
    std::size_t pos = 0;
    const long out = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return out;
  } catch (...) {
    throw ConfigError("field " + what + ": not an integer: " + v);
  }
}

double opt_double(const KeyMap& map, const std::string& key, double fallback) {
  auto it = map.find(key);
  return it == map.end() ? fallback : to_double(it->second, key);
}

long opt_long(const KeyMap& map, const std::string& key, long fallback) {
  auto it = map.find(key);
  return it == map.end() ? fallback : to_long(it->second, key);
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  auto sections = parse_sections(text);
  ExperimentConfig cfg;

  const KeyMap& problem = sections.count("problem")
                              ? sections["problem"]
                              : throw ConfigError("missing [problem] section");
  cfg.problem = require(problem, "problem", "type");
  if (cfg.problem == "wb") {
    cfg.wb_n = static_cast<int>(to_long(require(problem, "problem", "n"), "n"));
    cfg.nodes = static_cast<int>(to_long(require(problem, "problem", "m"), "m"));
    cfg.measures_source = problem.count("measures") ? problem.at("measures") : "gaussian";
    cfg.cost_source = problem.count("cost") ? problem.at("cost") : "grid";
    cfg.support_lo = opt_double(problem, "support_lo", cfg.support_lo);
    cfg.support_hi = opt_double(problem, "support_hi", cfg.support_hi);
    cfg.mean_lo = opt_double(problem, "mean_lo", cfg.mean_lo);
    cfg.mean_hi = opt_double(problem, "mean_hi", cfg.mean_hi);
    cfg.var_lo = opt_double(problem, "var_lo", cfg.var_lo);
    cfg.var_hi = opt_double(problem, "var_hi", cfg.var_hi);
    cfg.cost_max = opt_double(problem, "cost_max", cfg.cost_max);
  } else if (cfg.problem == "hardcase") {
    cfg.nodes = static_cast<int>(to_long(require(problem, "problem", "nodes"), "nodes"));
    cfg.hc_dim = static_cast<int>(opt_long(problem, "dim", cfg.hc_dim));
    cfg.hc_l = opt_double(problem, "smoothness", cfg.hc_l);
    cfg.hc_eps = opt_double(problem, "accuracy", cfg.hc_eps);
    cfg.hc_r = opt_double(problem, "radius", cfg.hc_r);
    cfg.hc_rho = static_cast<int>(opt_long(problem, "rho", cfg.nodes - 1));
  } else if (cfg.problem == "bilinear") {
    cfg.nodes = static_cast<int>(to_long(require(problem, "problem", "nodes"), "nodes"));
    cfg.bl_dim_x = static_cast<int>(opt_long(problem, "dim_x", cfg.bl_dim_x));
    cfg.bl_dim_y = static_cast<int>(opt_long(problem, "dim_y", cfg.bl_dim_y));
    cfg.bl_scale = opt_double(problem, "scale", cfg.bl_scale);
    cfg.bl_mu = opt_double(problem, "mu", cfg.bl_mu);
  } else {
    throw ConfigError("unknown problem type: " + cfg.problem);
  }

  const KeyMap& topo = sections.count("topology")
                           ? sections["topology"]
                           : throw ConfigError("missing [topology] section");
  try {
    cfg.topology = graph_kind_from_string(require(topo, "topology", "kind"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  cfg.edge_prob = opt_double(topo, "p", cfg.edge_prob);

  const KeyMap& solver = sections.count("solver")
                             ? sections["solver"]
                             : throw ConfigError("missing [solver] section");
  cfg.solver = require(solver, "solver", "type");
  cfg.iterations = to_long(require(solver, "solver", "iterations"), "iterations");
  if (cfg.iterations <= 0) throw ConfigError("iterations must be positive");
  const std::string alpha = require(solver, "solver", "alpha");
  if (alpha == "auto") {
    cfg.alpha_auto = true;
  } else {
    cfg.alpha_auto = false;
    cfg.alpha_value = to_double(alpha, "alpha");
    if (!(cfg.alpha_value > 0.0)) throw ConfigError("alpha must be positive");
  }
  cfg.chebyshev_k = static_cast<int>(opt_long(solver, "chebyshev_k", -1));
  if (cfg.solver == "ibp")
    cfg.ibp_gamma = to_double(require(solver, "solver", "gamma"), "gamma");
  if (cfg.solver == "sliding")
    cfg.sliding_epsilon = to_double(require(solver, "solver", "epsilon"), "epsilon");
  cfg.gap_every = static_cast<int>(opt_long(solver, "gap_every", 0));
  cfg.row_every = static_cast<int>(opt_long(solver, "row_every", 1));

  if (sections.count("run")) {
    cfg.seed = static_cast<std::uint64_t>(opt_long(sections["run"], "seed", 0));
  }

  const bool known_solver = cfg.solver == "dmp" || cfg.solver == "dmp_chebyshev" ||
                            cfg.solver == "sliding" || cfg.solver == "ibp";
  if (!known_solver) throw ConfigError("unknown solver type: " + cfg.solver);
  if (cfg.solver == "ibp" && cfg.problem != "wb")
    throw ConfigError("solver ibp only applies to the wb problem");
  if (cfg.solver == "sliding" && cfg.problem != "bilinear")
    throw ConfigError("solver sliding needs the strongly convex bilinear problem");
  if (cfg.solver == "sliding" && !(cfg.bl_mu > 0.0))
    throw ConfigError("solver sliding needs mu > 0 in [problem]");
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  return parse(read_text_file(path));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

namespace {

WbInstance build_wb_instance(const ExperimentConfig& cfg) {
  Mat cost = cfg.cost_source == "grid"
                 ? grid_cost(cfg.wb_n, cfg.support_lo, cfg.support_hi, cfg.cost_max)
                 : parse_cost_csv(read_text_file(cfg.cost_source));
  std::vector<Vec> measures =
      cfg.measures_source == "gaussian"
          ? gaussian_histograms(cfg.nodes, cost.rows, cfg.support_lo,
                                cfg.support_hi, cfg.mean_lo, cfg.mean_hi,
                                cfg.var_lo, cfg.var_hi, cfg.seed)
          : parse_measures_csv(read_text_file(cfg.measures_source));
  return WbInstance::create(std::move(cost), std::move(measures));
}

void append_kv(std::string& out, const std::string& key, const std::string& val) {
  out += key;
  out += '=';
  out += val;
  out += '\n';
}

}  // namespace

std::string render_convergence_svg(const RunReport& report) {
  // two log-scale polylines over iteration count; minimal hand-rolled svg
  const int width = 640, height = 420, margin = 50;
  std::vector<std::pair<double, double>> gap_pts, cons_pts;
  double max_iter = 1.0;
  for (const auto& r : report.rows) {
    max_iter = std::max(max_iter, static_cast<double>(r.iter));
    if (r.has_gap && r.gap > 0.0) gap_pts.push_back({double(r.iter), r.gap});
    if (r.consensus_x > 0.0) cons_pts.push_back({double(r.iter), r.consensus_x});
  }
  double lo = 1e300, hi = -1e300;
  for (auto* pts : {&gap_pts, &cons_pts})
    for (auto& [it, v] : *pts) {
      lo = std::min(lo, std::log10(v));
      hi = std::max(hi, std::log10(v));
    }
  if (gap_pts.empty() && cons_pts.empty()) {
    lo = -1.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-9) hi = lo + 1.0;

  auto sx = [&](double it) {
    return margin + (width - 2 * margin) * it / max_iter;
  };
  auto sy = [&](double v) {
    return height - margin -
           (height - 2 * margin) * (std::log10(v) - lo) / (hi - lo);
  };
  auto polyline = [&](const std::vector<std::pair<double, double>>& pts,
                      const char* color) {
    if (pts.empty()) return std::string();
    std::ostringstream p;
    p << "<polyline fill=\"none\" stroke=\"" << color
      << "\" stroke-width=\"1.5\" points=\"";
    for (auto& [it, v] : pts) p << fmt(sx(it)) << ',' << fmt(sy(v)) << ' ';
    p << "\"/>\n";
    return p.str();
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << "<line x1=\"" << margin << "\" y1=\"" << height - margin << "\" x2=\""
      << width - margin << "\" y2=\"" << height - margin
      << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\"" << margin
      << "\" y2=\"" << height - margin << "\" stroke=\"black\"/>\n"
      << "<text x=\"" << width / 2 << "\" y=\"" << height - 12
      << "\" font-size=\"12\">iteration</text>\n"
      << "<text x=\"8\" y=\"" << margin - 10
      << "\" font-size=\"12\">log10 scale; blue = gap, red = consensus</text>\n"
      << polyline(gap_pts, "blue") << polyline(cons_pts, "red") << "</svg>\n";
  return svg.str();
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg,
                                 const std::string& out_dir, bool plot) {
  std::filesystem::create_directories(out_dir);
  ExperimentOutcome outcome;

  const Graph graph = build_graph(cfg.topology, cfg.nodes, cfg.edge_prob, cfg.seed);
  const GossipMatrix w = laplacian(graph);
  outcome.chi = w.chi;

  std::optional<ChebyshevMixer> mixer;
  if (cfg.solver == "dmp_chebyshev") {
    const int k = cfg.chebyshev_k > 0 ? cfg.chebyshev_k : default_chebyshev_degree(w);
    mixer = chebyshev_mixer(w, k);
  }
  const MixerRef mix = mixer ? MixerRef(*mixer) : MixerRef(w);

  if (cfg.problem == "wb") {
    const WbInstance instance = build_wb_instance(cfg);
    if (instance.m != cfg.nodes)
      throw ConfigError("wb: measure count does not match node count");
    if (cfg.solver == "ibp") {
      IbpResult ibp = ibp_baseline(instance, cfg.ibp_gamma,
                                   static_cast<int>(cfg.iterations));
      outcome.divergence_event = ibp.diverged;
      outcome.divergence_iteration = ibp.divergence_iteration;
      outcome.barycenter = ibp.barycenter;
      RunReport& rep = outcome.report;
      for (std::size_t i = 0; i < ibp.objective_trace.size(); ++i) {
        ReportRow row;
        row.iter = static_cast<long>(i + 1);
        row.has_gap = true;
        row.gap = ibp.objective_trace[i];
        row.oracle_calls = static_cast<long>((i + 1) * instance.m);
        rep.rows.push_back(row);
        rep.final_gap = row.gap;
      }
      rep.total_oracle_calls = static_cast<long>(ibp.objective_trace.size()) * instance.m;
    } else if (cfg.solver == "dmp" || cfg.solver == "dmp_chebyshev") {
      WbSolverConfig wcfg = WbSolverConfig::from_instance(
          instance, mix, static_cast<int>(cfg.iterations));
      if (!cfg.alpha_auto) {
        const double ratio = cfg.alpha_value / wcfg.alpha;
        wcfg.alpha = cfg.alpha_value;
        wcfg.eta *= ratio;
        wcfg.beta *= ratio;
        wcfg.theta *= ratio;
      }
      wcfg.gap_every = cfg.gap_every;
      wcfg.row_every = cfg.row_every;
      WbRunResult run = dmp_wb_run(instance, mix, wcfg);
      outcome.report = std::move(run.report);
      outcome.barycenter = std::move(run.barycenter_av);
    } else {
      throw ConfigError("solver " + cfg.solver + " does not apply to problem wb");
    }
  } else if (cfg.problem == "hardcase") {
    HardInstance inst = hard_instance(cfg.hc_l, cfg.hc_eps, cfg.hc_r, cfg.hc_dim,
                                      graph, {0}, cfg.hc_rho);
    SaddleProblem pb = inst.to_saddle();
    EngineConfig ecfg;
    ecfg.iterations = static_cast<int>(cfg.iterations);
    ecfg.alpha = cfg.alpha_auto ? 0.0 : cfg.alpha_value;
    ecfg.gap_every = cfg.gap_every;
    ecfg.row_every = cfg.row_every;
    if (cfg.solver == "dmp_chebyshev")
      ecfg.chebyshev_degree = cfg.chebyshev_k > 0 ? cfg.chebyshev_k : -1;
    else if (cfg.solver != "dmp")
      throw ConfigError("solver " + cfg.solver + " does not apply to problem hardcase");
    DmpRunResult run = decentralized_mirror_prox(pb, w, w, ecfg);
    outcome.report = std::move(run.report);
  } else {  // bilinear
    BilinearSpec spec = BilinearSpec::random_box(cfg.nodes, cfg.bl_dim_x,
                                                 cfg.bl_dim_y, cfg.bl_scale,
                                                 cfg.bl_mu, cfg.seed + 1);
    SaddleProblem pb = make_bilinear_problem(spec);
    if (cfg.solver == "sliding") {
      RegularizedSplit split = [&] {
        const double m_bound = std::max(pb.grad_bound_x, pb.grad_bound_y);
        const double gamma = sliding_reg_gamma(cfg.sliding_epsilon, cfg.bl_mu,
                                               w.lambda_min_pos, m_bound);
        const double alpha = sliding_reg_alpha(cfg.sliding_epsilon, gamma,
                                               w.lambda_min_pos, m_bound);
        const double lip_f =
            cfg.bl_mu + pb.lipschitz.min_max * std::sqrt(double(cfg.nodes));
        return regularize_saddle(pb, w, gamma, alpha, cfg.bl_mu, lip_f);
      }();
      SlidingConfig scfg = SlidingConfig::derive(
          split.op.lip_a(), split.op.lip_b(), split.op.mu(),
          cfg.sliding_epsilon, static_cast<double>(split.dimension));
      scfg.outer_n = static_cast<int>(cfg.iterations);
      Vec start(split.dimension, 0.0);
      SlidingRunResult run =
          sliding_run(split.op, split.projector, start, scfg);
      ReportRow row;
      row.iter = scfg.outer_n;
      row.comm_rounds = run.calls_b;
      row.oracle_calls = run.calls_a;
      outcome.report.rows.push_back(row);
      outcome.report.total_comm_rounds = run.calls_b;
      outcome.report.total_oracle_calls = run.calls_a;
    } else {
      EngineConfig ecfg;
      ecfg.iterations = static_cast<int>(cfg.iterations);
      ecfg.alpha = cfg.alpha_auto ? 0.0 : cfg.alpha_value;
      ecfg.gap_every = cfg.gap_every;
      ecfg.row_every = cfg.row_every;
      if (cfg.solver == "dmp_chebyshev")
        ecfg.chebyshev_degree = cfg.chebyshev_k > 0 ? cfg.chebyshev_k : -1;
      else if (cfg.solver != "dmp")
        throw ConfigError("solver " + cfg.solver + " does not apply to problem bilinear");
      DmpRunResult run = decentralized_mirror_prox(pb, w, w, ecfg);
      outcome.report = std::move(run.report);
    }
  }

  std::string summary;
  append_kv(summary, "problem", cfg.problem);
  append_kv(summary, "solver", cfg.solver);
  append_kv(summary, "topology", to_string(cfg.topology));
  append_kv(summary, "nodes", std::to_string(cfg.nodes));
  append_kv(summary, "chi", fmt(outcome.chi));
  append_kv(summary, "iterations", std::to_string(cfg.iterations));
  append_kv(summary, "seed", std::to_string(cfg.seed));
  append_kv(summary, "final_gap",
            std::isnan(outcome.report.final_gap) ? "" : fmt(outcome.report.final_gap));
  append_kv(summary, "final_consensus_x", fmt(outcome.report.final_consensus_x));
  append_kv(summary, "final_consensus_y", fmt(outcome.report.final_consensus_y));
  append_kv(summary, "total_comm_rounds",
            std::to_string(outcome.report.total_comm_rounds));
  append_kv(summary, "total_oracle_calls",
            std::to_string(outcome.report.total_oracle_calls));
  append_kv(summary, "divergence_event", outcome.divergence_event ? "1" : "0");
  if (outcome.divergence_event)
    append_kv(summary, "divergence_iteration",
              std::to_string(outcome.divergence_iteration));
  outcome.summary = summary;

  const std::filesystem::path dir(out_dir);
  write_text_file((dir / "report.csv").string(), outcome.report.to_csv());
  write_text_file((dir / "summary.txt").string(), summary);
  if (!outcome.barycenter.empty())
    write_text_file((dir / "barycenter.csv").string(),
                    vec_to_csv_row(outcome.barycenter));
  if (plot)
    write_text_file((dir / "plot.svg").string(),
                    render_convergence_svg(outcome.report));
  return outcome;
}

std::string topology_sweep(const ExperimentConfig& base,
                           const std::vector<std::string>& topologies,
                           const std::string& out_dir) {
  if (topologies.empty()) return "warning: empty topology list, nothing to do\n";
  std::filesystem::create_directories(out_dir);

  struct Entry {
    std::string name;
    double chi;
    double final_gap;
    double final_consensus;
    long comm_rounds;
    long oracle_calls;
  };
  std::vector<Entry> entries;
  for (const std::string& spec : topologies) {
    ExperimentConfig cfg = base;
    std::string name = spec;
    const auto colon = spec.find(':');
    if (colon != std::string::npos) {
      name = spec.substr(0, colon);
      cfg.edge_prob = to_double(spec.substr(colon + 1), "topology probability");
    }
    cfg.topology = graph_kind_from_string(name);
    std::string label = name;
    if (colon != std::string::npos) label += "_" + spec.substr(colon + 1);
    ExperimentOutcome out =
        run_experiment(cfg, (std::filesystem::path(out_dir) / label).string());
    entries.push_back({label, out.chi, out.report.final_gap,
                       out.report.final_consensus_x,
                       out.report.total_comm_rounds,
                       out.report.total_oracle_calls});
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.chi < b.chi; });
  std::ostringstream csv;
  csv << "topology,chi,final_gap,final_consensus_x,comm_rounds,oracle_calls\n";
  for (const Entry& e : entries) {
    csv << e.name << ',' << fmt(e.chi) << ','
        << (std::isnan(e.final_gap) ? "" : fmt(e.final_gap)) << ','
        << fmt(e.final_consensus) << ',' << e.comm_rounds << ','
        << e.oracle_calls << '\n';
  }
  write_text_file((std::filesystem::path(out_dir) / "comparison.csv").string(),
                  csv.str());
  return csv.str();
}

}  // namespace dmp
