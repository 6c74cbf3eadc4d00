#include "cityscan/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <unordered_set>
#include <utility>

#include <nlohmann/json.hpp>

#include "cityscan/error.hpp"
#include "cityscan/spatial_index.hpp"

namespace cityscan::graph {
namespace {

// Cells below this size only add empty buckets; tiny thresholds still work.
constexpr double kMinGridCellM = 10.0;

void check_threshold(double threshold_m) {
  if (!std::isfinite(threshold_m) || threshold_m < 0.0) {
    throw ArgumentError("threshold must be a finite non-negative number of meters");
  }
}

std::vector<Vertex> object_vertices(std::span<const SafetyObject> objects) {
  std::vector<Vertex> out;
  out.reserve(objects.size());
  for (const auto& o : objects) out.push_back({o.id, o.location, std::string(to_string(o.kind))});
  return out;
}

geo::SpatialIndex index_objects(std::span<const SafetyObject> objects, double threshold_m) {
  std::vector<geo::IndexedPoint> points;
  points.reserve(objects.size());
  for (const auto& o : objects) points.push_back({o.id, o.location});
  return geo::SpatialIndex(std::move(points), std::max(threshold_m, kMinGridCellM));
}

}  // namespace

std::string_view to_string(Mode mode) noexcept {
  return mode == Mode::bipartite ? "bipartite" : "unipartite";
}

ProximityGraph::ProximityGraph(Mode mode, std::vector<Vertex> left, std::vector<Vertex> right,
                               std::vector<Edge> edges, double threshold_m)
    : mode_(mode),
      left_(std::move(left)),
      right_(std::move(right)),
      edges_(std::move(edges)),
      threshold_m_(threshold_m) {
  check_threshold(threshold_m_);
  if (mode_ == Mode::unipartite && !right_.empty()) {
    throw ArgumentError("unipartite graph cannot have right vertices");
  }
  const auto far_size = mode_ == Mode::bipartite ? right_.size() : left_.size();
  for (auto& e : edges_) {
    if (e.u >= left_.size() || e.v >= far_size) throw ArgumentError("edge endpoint out of range");
    if (!(e.weight_m >= 0.0) || e.weight_m > threshold_m_) {
      throw ArgumentError("edge weight outside [0, threshold]");
    }
    if (mode_ == Mode::unipartite) {
      if (e.u == e.v) throw ArgumentError("unipartite graph cannot have self-loops");
      if (left_[e.u].id > left_[e.v].id) std::swap(e.u, e.v);
    }
  }
  const auto& far = mode_ == Mode::bipartite ? right_ : left_;
  std::sort(edges_.begin(), edges_.end(), [&](const Edge& a, const Edge& b) {
    const auto& au = left_[a.u].id;
    const auto& bu = left_[b.u].id;
    if (au != bu) return au < bu;
    return far[a.v].id < far[b.v].id;
  });
  if (mode_ == Mode::unipartite) {
    const auto dup = std::adjacent_find(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
      return a.u == b.u && a.v == b.v;
    });
    if (dup != edges_.end()) throw ArgumentError("unipartite graph has a repeated pair");
  }
}

std::vector<std::size_t> ProximityGraph::degrees(Side side) const {
  std::vector<std::size_t> out(side == Side::left ? left_.size() : right_.size(), 0);
  for (const auto& e : edges_) {
    if (mode_ == Mode::unipartite) {
      ++out[e.u];
      ++out[e.v];
    } else if (side == Side::left) {
      ++out[e.u];
    } else {
      ++out[e.v];
    }
  }
  return out;
}

std::string ProximityGraph::qualified_id(Side side, std::size_t index) const {
  if (side == Side::left && mode_ == Mode::bipartite) return "f:" + left_[index].id;
  return "o:" + (side == Side::left ? left_ : right_)[index].id;
}

ProximityGraph build_bipartite_graph(std::span<const Facility> facilities,
                                     std::span<const SafetyObject> objects, double threshold_m) {
  check_threshold(threshold_m);
  std::unordered_set<std::string_view> seen;
  std::vector<Vertex> left;
  left.reserve(facilities.size());
  for (const auto& f : facilities) {
    if (!seen.insert(f.id).second) throw InputError("duplicate facility id '" + f.id + "'");
    left.push_back({f.id, f.location, "facility"});
  }
  const auto index = index_objects(objects, threshold_m);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < facilities.size(); ++i) {
    for (const auto& hit : index.query_within(facilities[i].location, threshold_m)) {
      edges.push_back({i, hit.slot, hit.distance_m});
    }
  }
  return ProximityGraph(Mode::bipartite, std::move(left), object_vertices(objects),
                        std::move(edges), threshold_m);
}

ProximityGraph build_unipartite_graph(std::span<const SafetyObject> objects, double threshold_m) {
  check_threshold(threshold_m);
  const auto index = index_objects(objects, threshold_m);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    for (const auto& hit : index.query_within(objects[i].location, threshold_m)) {
      if (hit.slot > i) edges.push_back({i, hit.slot, hit.distance_m});
    }
  }
  return ProximityGraph(Mode::unipartite, object_vertices(objects), {}, std::move(edges),
                        threshold_m);
}

std::vector<std::string> isolated_vertices(const ProximityGraph& g, Side side) {
  if (g.mode() == Mode::unipartite) side = Side::left;
  const auto deg = g.degrees(side);
  const auto& verts = side == Side::left ? g.left() : g.right();
  std::vector<std::string> out;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    if (deg[i] == 0) out.push_back(verts[i].id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<VertexDegree> degree_centrality(const ProximityGraph& g) {
  std::vector<VertexDegree> out;
  auto emit = [&](Side side, const std::vector<Vertex>& verts, std::size_t opposite) {
    const auto deg = g.degrees(side);
    const double denom = static_cast<double>(std::max<std::size_t>(1, opposite));
    for (std::size_t i = 0; i < verts.size(); ++i) {
      out.push_back({side, verts[i].id, deg[i], static_cast<double>(deg[i]) / denom});
    }
  };
  if (g.mode() == Mode::unipartite) {
    const auto n = g.left().size();
    emit(Side::left, g.left(), n == 0 ? 0 : n - 1);
  } else {
    emit(Side::left, g.left(), g.right().size());
    emit(Side::right, g.right(), g.left().size());
  }
  return out;
}

std::vector<std::vector<std::string>> connected_components(const ProximityGraph& g) {
  // Unified vertex numbering: left vertices first, then right.
  const auto n_left = g.left().size();
  const auto n = g.vertex_count();
  const auto far_offset = g.mode() == Mode::bipartite ? n_left : 0;
  std::vector<std::vector<std::size_t>> adjacency(n);
  for (const auto& e : g.edges()) {
    adjacency[e.u].push_back(far_offset + e.v);
    adjacency[far_offset + e.v].push_back(e.u);
  }
  auto name_of = [&](std::size_t v) {
    return v < n_left ? g.qualified_id(Side::left, v) : g.qualified_id(Side::right, v - n_left);
  };

  std::vector<bool> visited(n, false);
  std::vector<std::vector<std::string>> components;
  for (std::size_t start = 0; start < n; ++start) {
    if (visited[start]) continue;
    std::vector<std::string> members;
    std::deque<std::size_t> frontier{start};
    visited[start] = true;
    while (!frontier.empty()) {
      const auto v = frontier.front();
      frontier.pop_front();
      members.push_back(name_of(v));
      for (const auto w : adjacency[v]) {
        if (!visited[w]) {
          visited[w] = true;
          frontier.push_back(w);
        }
      }
    }
    std::sort(members.begin(), members.end());
    components.push_back(std::move(members));
  }
  std::sort(components.begin(), components.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.front() < b.front();
  });
  return components;
}

std::string graph_to_json(const ProximityGraph& g) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["mode"] = to_string(g.mode());
  doc["threshold_m"] = g.threshold_m();
  ordered_json nodes = ordered_json::array();
  auto add_nodes = [&](Side side, const std::vector<Vertex>& verts) {
    for (std::size_t i = 0; i < verts.size(); ++i) {
      nodes.push_back({{"id", g.qualified_id(side, i)},
                       {"lat", verts[i].location.lat},
                       {"lon", verts[i].location.lon},
                       {"kind", verts[i].kind}});
    }
  };
  add_nodes(Side::left, g.left());
  add_nodes(Side::right, g.right());
  doc["nodes"] = std::move(nodes);
  ordered_json edges = ordered_json::array();
  for (const auto& e : g.edges()) {
    edges.push_back({{"u", g.qualified_id(Side::left, e.u)},
                     {"v", g.qualified_id(g.far_side(), e.v)},
                     {"weight_m", e.weight_m}});
  }
  doc["edges"] = std::move(edges);
  return doc.dump();
}

}  // namespace cityscan::graph
