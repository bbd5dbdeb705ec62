#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include "dmp/common.hpp"

namespace dmp {

// Undirected communication graph. Edges are stored as (i, j) with i < j,
// sorted and de-duplicated.
struct Graph {
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;

  void validate() const;  // throws std::invalid_argument on malformed input
  bool is_connected() const;
  std::vector<std::vector<int>> adjacency() const;
  // Hop distance from a node set; unreachable nodes get -1.
  std::vector<int> distances_from(const std::vector<int>& sources) const;

  // Edge-list text format: header "m=<count>", then one "i j" pair per line.
  std::string to_edge_list() const;
  static Graph from_edge_list(const std::string& text);
};

enum class GraphKind { Complete, Star, Cycle, Path, ErdosRenyi };

GraphKind graph_kind_from_string(const std::string& name);
std::string to_string(GraphKind kind);

// Builds a connected graph of m nodes. Erdos-Renyi draws are rejected and
// resampled (sub-seed incremented) until connected, up to 1000 attempts.
Graph build_graph(GraphKind kind, int m, double edge_prob = 0.5,
                  std::uint64_t seed = 0);

// Symmetric PSD mixing matrix compatible with a graph, with its spectral
// summary. Immutable after construction.
struct GossipMatrix {
  Graph graph;
  Mat w;                 // node_count x node_count
  Vec eigenvalues;       // ascending
  double lambda_max = 0.0;
  double lambda_min_pos = 0.0;
  double chi = 1.0;

  int size() const { return graph.node_count; }

  // Applies W (x) I to per-node blocks: out[i] = sum_j w_ij * in[j].
  // Only diagonal and neighbor entries are read, so the access pattern is a
  // faithful simulation of one synchronous gossip exchange.
  void apply(const std::vector<Vec>& in, std::vector<Vec>& out) const;
  Vec apply_flat(const Vec& per_node_scalars) const;

  // Validates symmetry, network compatibility and the kernel property
  // (exactly one eigenvalue at zero for a connected graph), then caches the
  // spectral summary. Dense eigensolve; intended for desk-scale m.
  static GossipMatrix build(Graph graph, Mat entries);

 private:
  std::vector<std::vector<int>> adj_;
};

GossipMatrix laplacian(const Graph& g);

// Degree-K Chebyshev polynomial of the rescaled gossip matrix. Application
// costs exactly `degree` base-matrix multiplications (= communication
// rounds) and preserves the kernel. Reduces the effective condition number
// to (1+delta)/(1-delta) with delta = 2 c1^K / (1 + c1^{2K}).
struct ChebyshevMixer {
  GossipMatrix base;
  int degree = 1;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double delta = 0.0;
  double effective_chi = 1.0;
  double effective_lambda_max = 0.0;
  double effective_lambda_min_pos = 0.0;
  bool degenerate = false;  // chi(base) == 1; operator falls back to c3*W, K = 1

  int size() const { return base.size(); }
  void apply(const std::vector<Vec>& in, std::vector<Vec>& out) const;
  // Polynomial value at a base eigenvalue; the mixer's spectrum is the image
  // of the base spectrum under this map.
  double eigenvalue_map(double base_eigenvalue) const;
  Mat dense() const;  // explicitly assembled polynomial matrix (for tests)
};

ChebyshevMixer chebyshev_mixer(const GossipMatrix& w, int degree);

// Suggested degree floor(sqrt(chi)), never below 1.
int default_chebyshev_degree(const GossipMatrix& w);

// Non-owning view over either mixing operator so solvers can treat them
// uniformly. rounds() is the communication cost of one application.
class MixerRef {
 public:
  MixerRef(const GossipMatrix& w)  // NOLINT: implicit by design
      : w_(&w), cheb_(nullptr) {}
  MixerRef(const ChebyshevMixer& m)  // NOLINT
      : w_(nullptr), cheb_(&m) {}

  int size() const { return w_ ? w_->size() : cheb_->size(); }
  int rounds() const { return w_ ? 1 : cheb_->degree; }
  double lambda_max() const {
    return w_ ? w_->lambda_max : cheb_->effective_lambda_max;
  }
  double lambda_min_pos() const {
    return w_ ? w_->lambda_min_pos : cheb_->effective_lambda_min_pos;
  }
  double chi() const { return w_ ? w_->chi : cheb_->effective_chi; }
  const Graph& graph() const { return w_ ? w_->graph : cheb_->base.graph; }
  void apply(const std::vector<Vec>& in, std::vector<Vec>& out) const {
    if (w_)
      w_->apply(in, out);
    else
      cheb_->apply(in, out);
  }

 private:
  const GossipMatrix* w_;
  const ChebyshevMixer* cheb_;
};

}  // namespace dmp
