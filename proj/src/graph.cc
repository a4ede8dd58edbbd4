#include "netpass/graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "netpass/errors.hpp"

namespace netpass {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

  int find(int v) {
    while (parent_[v] != v) {
      parent_[v] = parent_[parent_[v]];
      v = parent_[v];
    }
    return v;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

}  // namespace

NetworkGraph::NetworkGraph(int n_vertices, std::vector<Edge> edges)
    : n_(n_vertices), edges_(std::move(edges)) {
  if (n_ <= 0) throw Error(ErrorCode::kInvalidArgument, "graph needs at least one vertex");

  std::set<std::pair<int, int>> seen;
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const auto [h, t] = edges_[k];
    if (h < 0 || h >= n_ || t < 0 || t >= n_) {
      throw Error(ErrorCode::kIndexOutOfRange,
                  "edge " + std::to_string(k) + " references a vertex outside [0, " +
                      std::to_string(n_) + ")");
    }
    if (h == t) throw Error(ErrorCode::kSelfLoop, "edge " + std::to_string(k));
    if (!seen.emplace(std::min(h, t), std::max(h, t)).second) {
      throw Error(ErrorCode::kDuplicateEdge,
                  "{" + std::to_string(h) + "," + std::to_string(t) + "}");
    }
  }

  incidence_ = Eigen::MatrixXd::Zero(n_, n_edges());
  for (int k = 0; k < n_edges(); ++k) {
    incidence_(edges_[k].head, k) = 1.0;
    incidence_(edges_[k].tail, k) = -1.0;
  }
}

Eigen::MatrixXd NetworkGraph::laplacian() const {
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n_, n_);
  for (const auto& [h, t] : edges_) {
    l(h, h) += 1.0;
    l(t, t) += 1.0;
    l(h, t) -= 1.0;
    l(t, h) -= 1.0;
  }
  return l;
}

std::vector<Component> NetworkGraph::connected_components() const {
  DisjointSets sets(n_);
  for (const auto& [h, t] : edges_) sets.unite(h, t);

  std::vector<int> block_of_root(n_, -1);
  std::vector<Component> blocks;
  for (int v = 0; v < n_; ++v) {
    const int root = sets.find(v);
    if (block_of_root[root] < 0) {
      block_of_root[root] = static_cast<int>(blocks.size());
      blocks.emplace_back();
    }
    blocks[block_of_root[root]].vertices.push_back(v);
  }
  for (int k = 0; k < n_edges(); ++k) {
    blocks[block_of_root[sets.find(edges_[k].head)]].edges.push_back(k);
  }
  return blocks;
}

bool NetworkGraph::is_connected() const { return connected_components().size() == 1; }

NetworkGraph NetworkGraph::subgraph(const Component& c) const {
  std::vector<int> local(n_, -1);
  for (std::size_t i = 0; i < c.vertices.size(); ++i) local[c.vertices[i]] = static_cast<int>(i);
  std::vector<Edge> sub;
  sub.reserve(c.edges.size());
  for (int k : c.edges) {
    const Edge& e = edges_.at(k);
    if (local[e.head] < 0 || local[e.tail] < 0) {
      throw Error(ErrorCode::kInvalidArgument, "component edge leaves the vertex set");
    }
    sub.push_back({local[e.head], local[e.tail]});
  }
  return NetworkGraph(static_cast<int>(c.vertices.size()), std::move(sub));
}

NetworkGraph NetworkGraph::with_flipped_edge(int k) const {
  auto flipped = edges_;
  std::swap(flipped.at(k).head, flipped.at(k).tail);
  return NetworkGraph(n_, std::move(flipped));
}

NetworkGraph build_graph(int n_vertices, std::vector<Edge> edges) {
  return NetworkGraph(n_vertices, std::move(edges));
}

NetworkGraph complete_graph(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
  return NetworkGraph(n, std::move(edges));
}

NetworkGraph path_graph(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i + 1 < n; ++i) edges.push_back({i, i + 1});
  return NetworkGraph(n, std::move(edges));
}

NetworkGraph star_graph(int leaves) {
  std::vector<Edge> edges;
  for (int i = 1; i <= leaves; ++i) edges.push_back({0, i});
  return NetworkGraph(leaves + 1, std::move(edges));
}

Eigen::MatrixXd laplacian(const NetworkGraph& g) { return g.laplacian(); }

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return Eigen::VectorXd();
  const Eigen::MatrixXd sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

double lambda2(const NetworkGraph& g) {
  if (!g.is_connected()) throw Error(ErrorCode::kGraphDisconnected, "lambda2 needs a connected graph");
  if (g.n_vertices() < 2) throw Error(ErrorCode::kInvalidArgument, "lambda2 needs at least two vertices");
  return symmetric_eigenvalues(g.laplacian())(1);
}

std::vector<Component> connected_components(const NetworkGraph& g) {
  return g.connected_components();
}

}  // namespace netpass
