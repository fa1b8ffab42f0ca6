#pragma once

#include <nom/rational.hpp>

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

namespace nom {

enum class EdgeKind { Labelling, IncentiveCompatibility, Source, Ir, Npt, Wbb };

inline const char* edge_kind_name(EdgeKind k) {
  switch (k) {
    case EdgeKind::Labelling: return "labelling";
    case EdgeKind::IncentiveCompatibility: return "ic";
    case EdgeKind::Source: return "source";
    case EdgeKind::Ir: return "ir";
    case EdgeKind::Npt: return "npt";
    default: return "wbb";
  }
}

// An edge (src, dst; t) encodes the difference constraint
// p(dst) <= p(src) + weight. The annotation is the type index used to compute
// a labelling/IC weight; side-constraint edges carry no annotation.
struct ConstraintEdge {
  int src = 0;
  int dst = 0;
  std::optional<int> annotation;
  Rat weight;
  std::vector<EdgeKind> provenance;
};

// A closed walk of negative total weight, certifying infeasibility.
struct CycleCertificate {
  std::vector<ConstraintEdge> edges;
  Rat total_weight;

  // Re-checks the chaining invariant and re-sums the weight from scratch.
  bool reverify() const {
    if (edges.empty()) return false;
    Rat sum = 0;
    for (size_t i = 0; i < edges.size(); ++i) {
      if (edges[i].dst != edges[(i + 1) % edges.size()].src) return false;
      sum += edges[i].weight;
    }
    return sum == total_weight && sum < 0;
  }
};

struct InfeasibleError : std::runtime_error {
  CycleCertificate certificate;
  explicit InfeasibleError(CycleCertificate c)
      : std::runtime_error("constraint system infeasible: negative cycle of weight " +
                           rat_str(c.total_weight)),
        certificate(std::move(c)) {}
};

// Weighted directed multigraph over payment variables plus the artificial
// source node. Parallel edges with equal (src, dst, weight) are merged, with
// provenance accumulated.
class ConstraintGraph {
 public:
  int num_vars = 0;
  std::vector<ConstraintEdge> edges;
  std::vector<std::string> node_names;  // optional, for dumps

  explicit ConstraintGraph(int vars = 0) : num_vars(vars) {}

  int source() const { return num_vars; }
  int num_nodes() const { return num_vars + 1; }

  void add_edge(ConstraintEdge e) {
    auto key = std::make_tuple(e.src, e.dst, e.weight);
    auto it = dedup_.find(key);
    if (it != dedup_.end()) {
      auto& prov = edges[it->second].provenance;
      prov.insert(prov.end(), e.provenance.begin(), e.provenance.end());
      return;
    }
    dedup_[key] = edges.size();
    edges.push_back(std::move(e));
  }

  void add_edge(int src, int dst, Rat w, EdgeKind kind, std::optional<int> annot = {}) {
    add_edge(ConstraintEdge{src, dst, annot, std::move(w), {kind}});
  }

  std::string name_of(int node) const {
    if (node == source()) return "gamma";
    if (node < static_cast<int>(node_names.size())) return node_names[node];
    return "n" + std::to_string(node);
  }

 private:
  std::map<std::tuple<int, int, Rat>, size_t> dedup_;
};

namespace detail {

// Walks the predecessor chain from `start`; when the walk revisits a node the
// chain contains a cycle, which is cut out and returned if negative.
inline std::optional<CycleCertificate> try_extract_cycle(const ConstraintGraph& g,
                                                         const std::vector<int>& pred,
                                                         int start) {
  std::vector<char> on_walk(g.num_nodes(), 0);
  int v = start;
  while (v != -1 && !on_walk[v]) {
    on_walk[v] = 1;
    v = pred[v] == -1 ? -1 : g.edges[pred[v]].src;
  }
  if (v == -1) return std::nullopt;
  CycleCertificate cert;
  cert.total_weight = 0;
  int u = v;
  do {
    const ConstraintEdge& e = g.edges[pred[u]];
    cert.edges.push_back(e);
    cert.total_weight += e.weight;
    u = e.src;
  } while (u != v);
  if (cert.total_weight >= 0) return std::nullopt;
  std::reverse(cert.edges.begin(), cert.edges.end());
  return cert;
}

}  // namespace detail

// Bellman-Ford over every node (all distances start at zero, which is
// equivalent to a virtual zero-weight source into every node); detects any
// negative cycle in the graph. Deterministic edge order makes certificates
// reproducible.
inline std::optional<CycleCertificate> find_negative_cycle(const ConstraintGraph& g) {
  int n = g.num_nodes();
  std::vector<Rat> dist(n, Rat(0));
  std::vector<int> pred(n, -1);
  int max_rounds = 4 * n + 16;
  for (int round = 0; round < max_rounds; ++round) {
    std::vector<int> relaxed;
    for (size_t ei = 0; ei < g.edges.size(); ++ei) {
      const ConstraintEdge& e = g.edges[ei];
      if (dist[e.src] + e.weight < dist[e.dst]) {
        dist[e.dst] = dist[e.src] + e.weight;
        pred[e.dst] = static_cast<int>(ei);
        relaxed.push_back(e.dst);
      }
    }
    if (relaxed.empty()) return std::nullopt;
    if (round >= n - 1) {
      for (int v : relaxed)
        if (auto cert = detail::try_extract_cycle(g, pred, v)) return cert;
    }
  }
  throw std::logic_error("negative cycle present but extraction failed");
}

// Shortest-path distances from the source; this is the pointwise-greatest
// solution of the difference constraint system with p(source) = 0.
// Missing source->x edges are added so every variable is reachable.
// Throws InfeasibleError with a certificate when a negative cycle exists.
inline std::vector<Rat> payments_from_shortest_paths(ConstraintGraph g) {
  for (int v = 0; v < g.num_vars; ++v)
    g.add_edge(g.source(), v, Rat(0), EdgeKind::Source);
  if (auto cert = find_negative_cycle(g)) throw InfeasibleError(*cert);
  int n = g.num_nodes();
  std::vector<Rat> dist(n, Rat(0));
  std::vector<bool> seen(n, false);
  seen[g.source()] = true;
  for (int round = 0; round < n - 1; ++round) {
    bool changed = false;
    for (const ConstraintEdge& e : g.edges) {
      if (!seen[e.src]) continue;
      if (!seen[e.dst] || dist[e.src] + e.weight < dist[e.dst]) {
        dist[e.dst] = dist[e.src] + e.weight;
        seen[e.dst] = true;
        changed = true;
      }
    }
    if (!changed) break;
  }
  dist.resize(g.num_vars);
  return dist;
}

// Checks p(dst) <= p(src) + w for every edge, exactly.
inline bool satisfies_all_edges(const ConstraintGraph& g, const std::vector<Rat>& p) {
  auto value = [&](int node) { return node == g.source() ? Rat(0) : p[node]; };
  for (const ConstraintEdge& e : g.edges)
    if (value(e.dst) > value(e.src) + e.weight) return false;
  return true;
}

// DOT-compatible dump for debugging.
inline std::string to_dot(const ConstraintGraph& g, const std::vector<Rat>* annot_types = nullptr) {
  std::ostringstream os;
  os << "digraph constraints {\n";
  for (const ConstraintEdge& e : g.edges) {
    os << "  \"" << g.name_of(e.src) << "\" -> \"" << g.name_of(e.dst) << "\" [label=\"";
    if (e.annotation && annot_types)
      os << "t=" << rat_str((*annot_types)[*e.annotation]) << ", ";
    os << "w=" << rat_str(e.weight);
    for (EdgeKind k : e.provenance) os << ", " << edge_kind_name(k);
    os << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace nom
