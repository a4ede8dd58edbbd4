#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace netpass {

/// Oriented edge: incidence column has +1 at head, -1 at tail.
struct Edge {
  int head = 0;
  int tail = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// A vertex subset together with the edges whose both endpoints lie in it.
struct Component {
  std::vector<int> vertices;  // ascending
  std::vector<int> edges;     // indices into the parent edge list, ascending
};

/// Undirected graph with a fixed (caller-chosen) edge orientation.
/// Immutable after construction.
class NetworkGraph {
 public:
  /// Throws Error{kIndexOutOfRange | kSelfLoop | kDuplicateEdge}.
  NetworkGraph(int n_vertices, std::vector<Edge> edges);

  int n_vertices() const { return n_; }
  int n_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }

  /// n x m incidence matrix E.
  const Eigen::MatrixXd& incidence() const { return incidence_; }

  /// E E^T.
  Eigen::MatrixXd laplacian() const;

  /// Blocks in order of their smallest vertex.
  std::vector<Component> connected_components() const;
  bool is_connected() const;

  /// Induced subgraph on one component, vertices relabelled 0..k-1 in
  /// ascending order and edges kept in parent order.
  NetworkGraph subgraph(const Component& c) const;

  /// Same graph with edge k reversed.
  NetworkGraph with_flipped_edge(int k) const;

 private:
  int n_;
  std::vector<Edge> edges_;
  Eigen::MatrixXd incidence_;
};

NetworkGraph build_graph(int n_vertices, std::vector<Edge> edges);
NetworkGraph complete_graph(int n);
NetworkGraph path_graph(int n);
/// Star with `leaves` leaves; vertex 0 is the hub.
NetworkGraph star_graph(int leaves);

Eigen::MatrixXd laplacian(const NetworkGraph& g);

/// Algebraic connectivity. Throws Error{kGraphDisconnected}.
double lambda2(const NetworkGraph& g);

std::vector<Component> connected_components(const NetworkGraph& g);

/// Ascending eigenvalues of the symmetric part of `m`.
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m);

}  // namespace netpass
