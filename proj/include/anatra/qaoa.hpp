#ifndef ANATRA_QAOA_HPP
#define ANATRA_QAOA_HPP

// Statevector simulation of depth-p QAOA MaxCut circuits with shot sampling.

#include "anatra/core.hpp"
#include "anatra/oracles.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace anatra {

/// Undirected, unit-weight graph.
class Graph {
 public:
  static constexpr int kMaxVertices = 20;

  Graph(int n, std::vector<std::pair<int, int>> edges) : n_(n), edges_(std::move(edges)) {
    if (n < 1 || n > kMaxVertices) throw std::invalid_argument("graph must have 1..20 vertices");
    std::set<std::pair<int, int>> seen;
    for (auto& [u, v] : edges_) {
      if (u < 0 || v < 0 || u >= n || v >= n) throw std::invalid_argument("edge endpoint out of range");
      if (u == v) throw std::invalid_argument("self-loops are not allowed");
      if (!seen.insert(std::minmax(u, v)).second) throw std::invalid_argument("duplicate edge");
    }
  }

  int vertices() const { return n_; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  /// Number of edges cut by the bitstring z (bit j = side of vertex j).
  int cut(std::uint32_t z) const {
    int c = 0;
    for (const auto& [u, v] : edges_) c += ((z >> u) ^ (z >> v)) & 1u;
    return c;
  }

 private:
  int n_;
  std::vector<std::pair<int, int>> edges_;
};

inline Graph cycle_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph(n, std::move(e));
}

/// 6-cycle; bipartite, so every edge can be cut.
inline Graph c6_graph() { return cycle_graph(6); }

inline Graph chvatal_graph() {
  return Graph(12, {{0, 1}, {0, 4}, {0, 6},  {0, 9},  {1, 2},  {1, 5},  {1, 7},  {2, 3},
                    {2, 6}, {2, 8}, {3, 4},  {3, 7},  {3, 9},  {4, 5},  {4, 8},  {5, 10},
                    {5, 11}, {6, 10}, {6, 11}, {7, 8}, {7, 11}, {8, 10}, {9, 10}, {9, 11}});
}

/// Plain text: "n m" followed by m lines "u v", 0-indexed.
inline Graph read_graph(std::istream& is) {
  int n = 0, m = 0;
  if (!(is >> n >> m) || m < 0) throw std::invalid_argument("graph file: bad header");
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < m; ++i) {
    int u = 0, v = 0;
    if (!(is >> u >> v)) throw std::invalid_argument("graph file: truncated edge list");
    edges.emplace_back(u, v);
  }
  return Graph(n, std::move(edges));
}

/// "c6", "chvatal", or a path to a graph file.
inline Graph load_graph(const std::string& name) {
  if (name == "c6") return c6_graph();
  if (name == "chvatal") return chvatal_graph();
  std::ifstream in(name);
  if (!in) throw std::invalid_argument("cannot open graph file " + name);
  return read_graph(in);
}

/// Exhaustive maximum cut.
inline int brute_force_maxcut(const Graph& g) {
  int best = 0;
  const std::uint32_t count = 1u << g.vertices();
  for (std::uint32_t z = 0; z < count; ++z) best = std::max(best, g.cut(z));
  return best;
}

using Statevector = std::vector<std::complex<double>>;

/// Depth-p circuit; parameters are laid out (gamma_1, beta_1, ..., gamma_p, beta_p).
class QaoaCircuit {
 public:
  QaoaCircuit(Graph graph, int depth) : graph_(std::move(graph)), depth_(depth) {
    if (depth < 1) throw std::invalid_argument("QAOA depth must be >= 1");
    const std::uint32_t count = 1u << graph_.vertices();
    cuts_.resize(count);
    for (std::uint32_t z = 0; z < count; ++z) cuts_[z] = graph_.cut(z);
  }

  const Graph& graph() const { return graph_; }
  int depth() const { return depth_; }
  int parameter_count() const { return 2 * depth_; }
  const std::vector<int>& cut_table() const { return cuts_; }

  Statevector uniform_state() const {
    const std::size_t count = cuts_.size();
    return Statevector(count, std::complex<double>(1.0 / std::sqrt(static_cast<double>(count)), 0.0));
  }

  /// exp(-i gamma C), C diagonal with entries cut(z).
  void apply_cost(Statevector& psi, double gamma) const {
    // cut values are small integers, so one phase per distinct value
    std::vector<std::complex<double>> phase(graph_.edges().size() + 1);
    for (std::size_t c = 0; c < phase.size(); ++c) phase[c] = std::polar(1.0, -gamma * static_cast<double>(c));
    for (std::size_t z = 0; z < psi.size(); ++z) psi[z] *= phase[cuts_[z]];
  }

  /// exp(-i beta X_j) on every qubit.
  void apply_mixer(Statevector& psi, double beta) const {
    const double c = std::cos(beta);
    const std::complex<double> ms(0.0, -std::sin(beta));
    for (int j = 0; j < graph_.vertices(); ++j) {
      const std::size_t stride = std::size_t{1} << j;
      for (std::size_t base = 0; base < psi.size(); base += 2 * stride) {
        for (std::size_t a = base; a < base + stride; ++a) {
          const auto x0 = psi[a];
          const auto x1 = psi[a + stride];
          psi[a] = c * x0 + ms * x1;
          psi[a + stride] = c * x1 + ms * x0;
        }
      }
    }
  }

  Statevector state(const Vector& theta) const {
    if (theta.size() != parameter_count()) throw std::invalid_argument("QAOA parameter count mismatch");
    Statevector psi = uniform_state();
    for (int l = 0; l < depth_; ++l) {
      apply_cost(psi, theta(2 * l));
      apply_mixer(psi, theta(2 * l + 1));
    }
    return psi;
  }

  /// Sum_z |<z|psi>|^2 cut(z).
  double exact_expectation(const Vector& theta) const {
    const Statevector psi = state(theta);
    double e = 0.0;
    for (std::size_t z = 0; z < psi.size(); ++z) e += std::norm(psi[z]) * cuts_[z];
    return e;
  }

 private:
  Graph graph_;
  int depth_;
  std::vector<int> cuts_;
};

/// Shot-sampled MaxCut oracle. The noisy value is minus the sample-mean cut and
/// std_error is the sample standard deviation over sqrt(shots).
class QaoaShotOracle : public ZerothOrderOracle {
 public:
  QaoaShotOracle(QaoaCircuit circuit, int shots, std::uint64_t seed)
      : circuit_(std::move(circuit)), shots_(shots), rng_(seed) {
    if (shots < 2) throw InvalidShots("shot count must be at least 2");
  }

  int dimension() const override { return circuit_.parameter_count(); }

  NoisyEvaluation evaluate(const Vector& theta) override {
    const Statevector psi = circuit_.state(theta);
    std::vector<double> probs(psi.size());
    for (std::size_t z = 0; z < psi.size(); ++z) probs[z] = std::norm(psi[z]);
    std::discrete_distribution<std::size_t> sampler(probs.begin(), probs.end());

    const auto& cuts = circuit_.cut_table();
    double sum = 0.0, sum_sq = 0.0;
    for (int s = 0; s < shots_; ++s) {
      const double c = cuts[sampler(rng_)];
      sum += c;
      sum_sq += c * c;
    }
    const double n = shots_;
    const double mean = sum / n;
    const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
    return {-mean, std::sqrt(var / n)};
  }

  std::optional<double> true_value(const Vector& theta) const override {
    return -circuit_.exact_expectation(theta);
  }

  const QaoaCircuit& circuit() const { return circuit_; }
  int shots() const { return shots_; }

 private:
  QaoaCircuit circuit_;
  int shots_;
  std::mt19937_64 rng_;
};

}  // namespace anatra

#endif  // ANATRA_QAOA_HPP
