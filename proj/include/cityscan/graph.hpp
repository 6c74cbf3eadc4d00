#pragma once

#include <span>
#include <string>
#include <vector>

#include "cityscan/ingest.hpp"

namespace cityscan::graph {

enum class Mode { bipartite, unipartite };
enum class Side { left, right };

std::string_view to_string(Mode mode) noexcept;

struct Vertex {
  std::string id;
  GeoPoint location;
  std::string kind;  // "facility", "hydrant" or "shelter"
};

/// `u` indexes the left side. `v` indexes the right side in bipartite mode
/// and the left side in unipartite mode, where u != v.
struct Edge {
  std::size_t u;
  std::size_t v;
  double weight_m;
};

/// Threshold proximity graph: an edge joins two vertices whose great-circle
/// distance is at most `threshold_m`, weighted by that distance.
///
/// Left vertices are facilities (bipartite) or objects (unipartite). Edges are
/// kept in canonical order, sorted by the qualified ids of their endpoints.
class ProximityGraph {
 public:
  ProximityGraph(Mode mode, std::vector<Vertex> left, std::vector<Vertex> right,
                 std::vector<Edge> edges, double threshold_m);

  Mode mode() const noexcept { return mode_; }
  double threshold_m() const noexcept { return threshold_m_; }
  const std::vector<Vertex>& left() const noexcept { return left_; }
  const std::vector<Vertex>& right() const noexcept { return right_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t vertex_count() const noexcept { return left_.size() + right_.size(); }

  /// Incident edge counts, one per vertex of the side.
  std::vector<std::size_t> degrees(Side side) const;

  /// Id with its namespace prefix: "f:" for facilities, "o:" for objects.
  std::string qualified_id(Side side, std::size_t index) const;
  /// Side that holds the endpoint `v` of an edge.
  Side far_side() const noexcept { return mode_ == Mode::bipartite ? Side::right : Side::left; }

 private:
  Mode mode_;
  std::vector<Vertex> left_;
  std::vector<Vertex> right_;
  std::vector<Edge> edges_;
  double threshold_m_;
};

/// Facility-object edges for every pair within threshold_m (inclusive).
ProximityGraph build_bipartite_graph(std::span<const Facility> facilities,
                                     std::span<const SafetyObject> objects, double threshold_m);

/// Simple undirected graph over objects; no self-loops, one edge per pair.
ProximityGraph build_unipartite_graph(std::span<const SafetyObject> objects, double threshold_m);

/// Raw (unprefixed) ids of degree-0 vertices on `side`, sorted. Unipartite
/// graphs always report the left side.
std::vector<std::string> isolated_vertices(const ProximityGraph& g, Side side);

struct VertexDegree {
  Side side;
  std::string id;
  std::size_t degree;
  double normalized;
};

/// Left vertices first, then right, each in vertex order. Normalization
/// divides by max(1, opposite side size) or max(1, n - 1) when unipartite.
std::vector<VertexDegree> degree_centrality(const ProximityGraph& g);

/// Components as sorted lists of qualified ids, largest first, ties by
/// smallest contained id.
std::vector<std::vector<std::string>> connected_components(const ProximityGraph& g);

/// Canonical JSON: {mode, threshold_m, nodes: [{id, lat, lon, kind}], edges: [{u, v, weight_m}]}.
std::string graph_to_json(const ProximityGraph& g);

}  // namespace cityscan::graph
