#include "dmp/topology.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dmp {

namespace {
constexpr double kZeroEigRelTol = 1e-9;  // eigenvalues below this * lambda_max count as zero
constexpr int kErdosRenyiRetries = 1000;
}  // namespace

void Graph::validate() const {
  if (node_count < 1) throw std::invalid_argument("graph needs at least one node");
  std::set<std::pair<int, int>> seen;
  for (auto [i, j] : edges) {
    if (i == j) throw std::invalid_argument("self-loop in edge list");
    if (i < 0 || j < 0 || i >= node_count || j >= node_count)
      throw std::invalid_argument("edge endpoint out of range");
    auto e = std::minmax(i, j);
    if (!seen.insert(e).second) throw std::invalid_argument("duplicate edge");
  }
}

std::vector<std::vector<int>> Graph::adjacency() const {
  std::vector<std::vector<int>> adj(node_count);
  for (auto [i, j] : edges) {
    adj[i].push_back(j);
    adj[j].push_back(i);
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());
  return adj;
}

std::vector<int> Graph::distances_from(const std::vector<int>& sources) const {
  std::vector<int> dist(node_count, -1);
  std::queue<int> queue;
  for (int s : sources) {
    dist[s] = 0;
    queue.push(s);
  }
  auto adj = adjacency();
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop();
    for (int v : adj[u]) {
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push(v);
      }
    }
  }
  return dist;
}

bool Graph::is_connected() const {
  if (node_count == 0) return false;
  auto dist = distances_from({0});
  return std::all_of(dist.begin(), dist.end(), [](int d) { return d >= 0; });
}

std::string Graph::to_edge_list() const {
  std::ostringstream out;
  out << "m=" << node_count << "\n";
  for (auto [i, j] : edges) out << i << " " << j << "\n";
  return out.str();
}

Graph Graph::from_edge_list(const std::string& text) {
  std::istringstream in(text);
  std::string header;
  if (!std::getline(in, header) || header.rfind("m=", 0) != 0)
    throw std::invalid_argument("edge list must start with header m=<count>");
  Graph g;
  g.node_count = std::stoi(header.substr(2));
  int i = 0, j = 0;
  while (in >> i >> j) g.edges.emplace_back(std::min(i, j), std::max(i, j));
  std::sort(g.edges.begin(), g.edges.end());
  g.validate();
  return g;
}

GraphKind graph_kind_from_string(const std::string& name) {
  if (name == "complete") return GraphKind::Complete;
  if (name == "star") return GraphKind::Star;
  if (name == "cycle") return GraphKind::Cycle;
  if (name == "path") return GraphKind::Path;
  if (name == "erdos" || name == "erdos_renyi") return GraphKind::ErdosRenyi;
  throw std::invalid_argument("unknown graph kind: " + name);
}

std::string to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::Complete: return "complete";
    case GraphKind::Star: return "star";
    case GraphKind::Cycle: return "cycle";
    case GraphKind::Path: return "path";
    case GraphKind::ErdosRenyi: return "erdos_renyi";
  }
  return "?";
}

Graph build_graph(GraphKind kind, int m, double edge_prob, std::uint64_t seed) {
  if (m < 1) throw std::invalid_argument("node count must be positive");
  Graph g;
  g.node_count = m;
  switch (kind) {
    case GraphKind::Complete:
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) g.edges.emplace_back(i, j);
      break;
    case GraphKind::Star:
      for (int j = 1; j < m; ++j) g.edges.emplace_back(0, j);
      break;
    case GraphKind::Cycle:
      for (int i = 0; i + 1 < m; ++i) g.edges.emplace_back(i, i + 1);
      if (m > 2) g.edges.emplace_back(0, m - 1);
      break;
    case GraphKind::Path:
      for (int i = 0; i + 1 < m; ++i) g.edges.emplace_back(i, i + 1);
      break;
    case GraphKind::ErdosRenyi: {
      if (!(edge_prob > 0.0 && edge_prob <= 1.0))
        throw std::invalid_argument("edge probability must lie in (0, 1]");
      for (int attempt = 0; attempt < kErdosRenyiRetries; ++attempt) {
        Rng rng(seed + static_cast<std::uint64_t>(attempt));
        g.edges.clear();
        for (int i = 0; i < m; ++i)
          for (int j = i + 1; j < m; ++j)
            if (rng.uniform() < edge_prob) g.edges.emplace_back(i, j);
        if (g.is_connected()) break;
        g.edges.clear();
      }
      if (g.edges.empty() && m > 1)
        throw GenerationFailure("could not sample a connected Erdos-Renyi graph");
      break;
    }
  }
  std::sort(g.edges.begin(), g.edges.end());
  g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
  g.validate();
  if (!g.is_connected()) throw GenerationFailure("generated graph is disconnected");
  return g;
}

GossipMatrix GossipMatrix::build(Graph graph, Mat entries) {
  graph.validate();
  const int m = graph.node_count;
  if (entries.rows != m || entries.cols != m)
    throw std::invalid_argument("mixing matrix size does not match graph");

  GossipMatrix out;
  out.graph = std::move(graph);
  out.adj_ = out.graph.adjacency();

  // symmetry and network compatibility
  std::vector<std::vector<char>> is_edge(m, std::vector<char>(m, 0));
  for (auto [i, j] : out.graph.edges) is_edge[i][j] = is_edge[j][i] = 1;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (std::fabs(entries(i, j) - entries(j, i)) > 1e-12)
        throw std::invalid_argument("mixing matrix must be symmetric");
      if (i != j && !is_edge[i][j] && entries(i, j) != 0.0)
        throw TopologyViolation("mixing matrix has weight on a non-edge");
    }
  }

  Eigen::MatrixXd w(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) w(i, j) = entries(i, j);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(w);
  if (es.info() != Eigen::Success) throw NumericFailure("eigensolver failed");

  out.w = std::move(entries);
  out.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + m);
  out.lambda_max = out.eigenvalues.back();
  const double zero_tol = kZeroEigRelTol * std::max(out.lambda_max, 1e-300);
  if (out.eigenvalues.front() < -zero_tol)
    throw std::invalid_argument("mixing matrix must be positive semidefinite");

  int zero_count = 0;
  out.lambda_min_pos = 0.0;
  for (double ev : out.eigenvalues) {
    if (ev <= zero_tol) {
      ++zero_count;
    } else if (out.lambda_min_pos == 0.0) {
      out.lambda_min_pos = ev;
    }
  }
  if (m == 1) {
    // single node: W = [0]; mixing is trivial
    out.lambda_max = 0.0;
    out.lambda_min_pos = 0.0;
    out.chi = 1.0;
    return out;
  }
  if (zero_count != 1)
    throw std::invalid_argument(
        "kernel dimension is " + std::to_string(zero_count) +
        ", expected 1 (disconnected graph or degenerate matrix)");
  out.chi = out.lambda_max / out.lambda_min_pos;
  return out;
}

void GossipMatrix::apply(const std::vector<Vec>& in, std::vector<Vec>& out) const {
  const int m = size();
  const std::size_t d = in.empty() ? 0 : in[0].size();
  out.assign(m, Vec(d, 0.0));
  for (int i = 0; i < m; ++i) {
    const double wii = w(i, i);
    for (std::size_t k = 0; k < d; ++k) out[i][k] = wii * in[i][k];
    for (int j : adj_[i]) {
      const double wij = w(i, j);
      if (wij == 0.0) continue;
      for (std::size_t k = 0; k < d; ++k) out[i][k] += wij * in[j][k];
    }
  }
}

Vec GossipMatrix::apply_flat(const Vec& v) const {
  std::vector<Vec> in(size()), out;
  for (int i = 0; i < size(); ++i) in[i] = Vec{v[i]};
  apply(in, out);
  Vec res(size());
  for (int i = 0; i < size(); ++i) res[i] = out[i][0];
  return res;
}

GossipMatrix laplacian(const Graph& g) {
  g.validate();
  if (!g.is_connected())
    throw std::invalid_argument("laplacian: graph must be connected");
  const int m = g.node_count;
  Mat w(m, m);
  for (auto [i, j] : g.edges) {
    w(i, j) = -1.0;
    w(j, i) = -1.0;
    w(i, i) += 1.0;
    w(j, j) += 1.0;
  }
  return GossipMatrix::build(g, std::move(w));
}

ChebyshevMixer chebyshev_mixer(const GossipMatrix& w, int degree) {
  if (degree < 1) throw std::invalid_argument("chebyshev degree must be >= 1");
  ChebyshevMixer mix;
  mix.base = w;
  const double chi = w.chi;
  // c3 rescales W so that its positive spectrum is symmetric around 1,
  // which the c2*(1-beta) substitution maps onto the Chebyshev domain.
  mix.c3 = (w.lambda_max + w.lambda_min_pos) > 0.0
               ? 2.0 / (w.lambda_max + w.lambda_min_pos)
               : 0.0;
  if (chi - 1.0 < 1e-12) {
    // c2 = (chi+1)/(chi-1) blows up; the degree-1 polynomial is exactly the
    // rescaled base matrix and already has effective chi 1.
    mix.degenerate = true;
    mix.degree = 1;
    mix.c1 = 0.0;
    mix.c2 = 0.0;
    mix.delta = 0.0;
  } else {
    mix.degree = degree;
    mix.c1 = (std::sqrt(chi) - 1.0) / (std::sqrt(chi) + 1.0);
    mix.c2 = (chi + 1.0) / (chi - 1.0);
    const double c1k = std::pow(mix.c1, degree);
    mix.delta = 2.0 * c1k / (1.0 + c1k * c1k);
  }

  double lo = 0.0, hi = 0.0;
  const double zero_tol = kZeroEigRelTol * std::max(w.lambda_max, 1e-300);
  for (double ev : w.eigenvalues) {
    if (ev <= zero_tol) continue;
    const double mapped = mix.eigenvalue_map(ev);
    if (lo == 0.0 || mapped < lo) lo = mapped;
    if (mapped > hi) hi = mapped;
  }
  mix.effective_lambda_min_pos = lo;
  mix.effective_lambda_max = hi;
  mix.effective_chi = (lo > 0.0) ? hi / lo : 1.0;
  return mix;
}

int default_chebyshev_degree(const GossipMatrix& w) {
  return std::max(1, static_cast<int>(std::floor(std::sqrt(w.chi))));
}

double ChebyshevMixer::eigenvalue_map(double lambda) const {
  const double beta = c3 * lambda;
  if (degree == 1 || degenerate) return beta;  // P_1(beta) = beta
  // P_K(beta) = 1 - T_K(c2 (1 - beta)) / T_K(c2) via the three-term recurrence
  const double arg = c2 * (1.0 - beta);
  double t_prev = 1.0, t_cur_num = arg;
  double s_prev = 1.0, s_cur_den = c2;
  for (int k = 1; k < degree; ++k) {
    const double t_next = 2.0 * arg * t_cur_num - t_prev;
    t_prev = t_cur_num;
    t_cur_num = t_next;
    const double s_next = 2.0 * c2 * s_cur_den - s_prev;
    s_prev = s_cur_den;
    s_cur_den = s_next;
  }
  return 1.0 - t_cur_num / s_cur_den;
}

void ChebyshevMixer::apply(const std::vector<Vec>& in, std::vector<Vec>& out) const {
  const int m = size();
  const std::size_t d = in.empty() ? 0 : in[0].size();
  if (degree == 1 || degenerate) {
    base.apply(in, out);
    for (auto& blk : out)
      for (auto& v : blk) v *= c3;
    return;
  }
  // T_k recurrence on the operator M = c2 (I - c3 W); each M-application is
  // one gossip exchange, so the total cost is `degree` rounds.
  auto apply_m = [&](const std::vector<Vec>& v, std::vector<Vec>& res) {
    base.apply(v, res);
    for (int i = 0; i < m; ++i)
      for (std::size_t k = 0; k < d; ++k)
        res[i][k] = c2 * (v[i][k] - c3 * res[i][k]);
  };
  std::vector<Vec> t_prev = in, t_cur, scratch;
  apply_m(in, t_cur);
  for (int k = 1; k < degree; ++k) {
    apply_m(t_cur, scratch);
    for (int i = 0; i < m; ++i)
      for (std::size_t j = 0; j < d; ++j)
        scratch[i][j] = 2.0 * scratch[i][j] - t_prev[i][j];
    t_prev.swap(t_cur);
    t_cur.swap(scratch);
  }
  double t_den_prev = 1.0, t_den = c2;
  for (int k = 1; k < degree; ++k) {
    const double next = 2.0 * c2 * t_den - t_den_prev;
    t_den_prev = t_den;
    t_den = next;
  }
  out.assign(m, Vec(d, 0.0));
  for (int i = 0; i < m; ++i)
    for (std::size_t j = 0; j < d; ++j)
      out[i][j] = in[i][j] - t_cur[i][j] / t_den;
}

Mat ChebyshevMixer::dense() const {
  const int m = size();
  Mat out(m, m);
  std::vector<Vec> basis(m, Vec(1, 0.0)), col;
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < m; ++i) basis[i][0] = (i == j) ? 1.0 : 0.0;
    apply(basis, col);
    for (int i = 0; i < m; ++i) out(i, j) = col[i][0];
  }
  return out;
}

}  // namespace dmp
