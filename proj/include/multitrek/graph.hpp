#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "multitrek/errors.hpp"

namespace multitrek {

using Vertex = int;
using Edge = std::pair<Vertex, Vertex>;
/// Sorted multiset of vertices joined by one hidden common cause.
using Hyperedge = std::vector<Vertex>;

/// Kahn's algorithm with a min-heap, so ties break on the smallest vertex id.
inline std::vector<Vertex> topological_sort(const std::vector<Vertex>& vertices,
                                            const std::vector<Edge>& edges) {
  std::map<Vertex, int> indegree;
  std::map<Vertex, std::vector<Vertex>> out;
  for (Vertex v : vertices) indegree[v] = 0;
  for (const auto& [u, v] : edges) {
    out[u].push_back(v);
    ++indegree[v];
  }
  std::priority_queue<Vertex, std::vector<Vertex>, std::greater<>> ready;
  for (const auto& [v, d] : indegree)
    if (d == 0) ready.push(v);

  std::vector<Vertex> order;
  order.reserve(vertices.size());
  while (!ready.empty()) {
    Vertex u = ready.top();
    ready.pop();
    order.push_back(u);
    for (Vertex v : out[u])
      if (--indegree[v] == 0) ready.push(v);
  }
  if (order.size() == indegree.size()) return order;

  // Every vertex left over has a left-over parent, so walking parents from
  // the smallest one must revisit a vertex.
  std::set<Vertex> remaining;
  for (const auto& [v, d] : indegree)
    if (d > 0) remaining.insert(v);
  std::map<Vertex, Vertex> parent_of;
  for (const auto& [u, v] : edges)
    if (remaining.count(u) && remaining.count(v) && !parent_of.count(v)) parent_of[v] = u;
  for (const auto& [u, v] : edges)
    if (remaining.count(u) && remaining.count(v)) parent_of[v] = std::min(parent_of[v], u);

  std::vector<Vertex> walk{*remaining.begin()};
  std::map<Vertex, std::size_t> seen{{walk.front(), 0}};
  for (;;) {
    Vertex p = parent_of.at(walk.back());
    if (auto it = seen.find(p); it != seen.end()) {
      std::vector<Vertex> cycle(walk.begin() + static_cast<std::ptrdiff_t>(it->second), walk.end());
      std::reverse(cycle.begin(), cycle.end());
      std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
      cycle.push_back(cycle.front());
      throw CycleError(std::move(cycle));
    }
    seen[p] = walk.size();
    walk.push_back(p);
  }
}

/// G = (V, D, H): vertices, directed edges and multidirected hyperedges.
/// Immutable once constructed. The constructor canonicalises (sorts and
/// deduplicates edges, sorts each hyperedge, drops repeated hyperedges) and
/// rejects self-loops, dangling endpoints and directed cycles.
class MixedGraph {
 public:
  MixedGraph() = default;

  MixedGraph(std::vector<Vertex> vertices, std::vector<Edge> directed,
             std::vector<Hyperedge> multidirected = {},
             std::map<Vertex, std::string> labels = {})
      : vertices_(std::move(vertices)),
        directed_(std::move(directed)),
        hyper_(std::move(multidirected)),
        labels_(std::move(labels)) {
    std::sort(vertices_.begin(), vertices_.end());
    if (std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end())
      throw InvalidArgument("duplicate vertex id");
    for (std::size_t i = 0; i < vertices_.size(); ++i) {
      if (vertices_[i] < 0) throw InvalidArgument("vertex ids must be non-negative");
      index_[vertices_[i]] = i;
    }
    for (const auto& [u, v] : directed_) {
      if (!contains(u) || !contains(v))
        throw InvalidArgument("edge " + std::to_string(u) + "->" + std::to_string(v) +
                              " has an unknown endpoint");
      if (u == v) throw InvalidArgument("self-loop at " + std::to_string(u));
    }
    std::sort(directed_.begin(), directed_.end());
    directed_.erase(std::unique(directed_.begin(), directed_.end()), directed_.end());
    for (auto& h : hyper_) {
      if (h.size() < 2) throw InvalidArgument("multidirected edge needs at least two endpoints");
      for (Vertex v : h)
        if (!contains(v)) throw InvalidArgument("hyperedge endpoint " + std::to_string(v) + " unknown");
      std::sort(h.begin(), h.end());
    }
    std::sort(hyper_.begin(), hyper_.end());
    hyper_.erase(std::unique(hyper_.begin(), hyper_.end()), hyper_.end());
    for (const auto& [v, name] : labels_)
      if (!contains(v)) throw InvalidArgument("label for unknown vertex " + std::to_string(v));

    children_.assign(vertices_.size(), {});
    parents_.assign(vertices_.size(), {});
    for (const auto& [u, v] : directed_) {
      children_[index_of(u)].push_back(v);
      parents_[index_of(v)].push_back(u);
    }
    for (auto& p : parents_) std::sort(p.begin(), p.end());
    topo_ = topological_sort(vertices_, directed_);

    // reach_[i][j]: vertices_[j] reachable from vertices_[i] by a directed
    // path (trivial path included).
    const std::size_t p = vertices_.size();
    reach_.assign(p, std::vector<char>(p, 0));
    for (auto it = topo_.rbegin(); it != topo_.rend(); ++it) {
      std::size_t i = index_of(*it);
      reach_[i][i] = 1;
      for (Vertex c : children_[i]) {
        const auto& rc = reach_[index_of(c)];
        for (std::size_t j = 0; j < p; ++j) reach_[i][j] |= rc[j];
      }
    }
  }

  const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
  const std::vector<Edge>& directed_edges() const noexcept { return directed_; }
  const std::vector<Hyperedge>& multidirected_edges() const noexcept { return hyper_; }
  const std::map<Vertex, std::string>& labels() const noexcept { return labels_; }

  std::size_t size() const noexcept { return vertices_.size(); }
  bool is_dag() const noexcept { return hyper_.empty(); }
  bool contains(Vertex v) const { return index_.count(v) != 0; }

  std::size_t index_of(Vertex v) const {
    auto it = index_.find(v);
    if (it == index_.end()) throw InvalidArgument("unknown vertex " + std::to_string(v));
    return it->second;
  }

  bool has_edge(Vertex u, Vertex v) const {
    return std::binary_search(directed_.begin(), directed_.end(), Edge{u, v});
  }

  /// Children in increasing id order.
  const std::vector<Vertex>& children(Vertex v) const { return children_[index_of(v)]; }
  const std::vector<Vertex>& parents(Vertex v) const { return parents_[index_of(v)]; }
  const std::vector<Vertex>& topological_order() const noexcept { return topo_; }

  bool reaches(Vertex from, Vertex to) const { return reach_[index_of(from)][index_of(to)] != 0; }

  /// All a with a directed path a -> ... -> v, including v itself; sorted.
  std::vector<Vertex> ancestors(Vertex v) const {
    std::vector<Vertex> out;
    std::size_t j = index_of(v);
    for (std::size_t i = 0; i < vertices_.size(); ++i)
      if (reach_[i][j]) out.push_back(vertices_[i]);
    return out;
  }

  Vertex max_vertex() const { return vertices_.empty() ? -1 : vertices_.back(); }

  friend bool operator==(const MixedGraph& a, const MixedGraph& b) {
    return a.vertices_ == b.vertices_ && a.directed_ == b.directed_ && a.hyper_ == b.hyper_ &&
           a.labels_ == b.labels_;
  }

 private:
  std::vector<Vertex> vertices_;
  std::vector<Edge> directed_;
  std::vector<Hyperedge> hyper_;
  std::map<Vertex, std::string> labels_;
  std::map<Vertex, std::size_t> index_;
  std::vector<std::vector<Vertex>> children_;
  std::vector<std::vector<Vertex>> parents_;
  std::vector<Vertex> topo_;
  std::vector<std::vector<char>> reach_;
};

/// Topological order of the directed part, smallest id first among ties.
/// Construction of a MixedGraph already rejects cycles, so this only exposes
/// the cached order.
inline std::vector<Vertex> validate_acyclic(const MixedGraph& g) { return g.topological_order(); }

struct CanonicalDagResult {
  MixedGraph dag;
  /// Original hyperedge -> fresh latent source.
  std::map<Hyperedge, Vertex> latent_map;
  std::vector<Vertex> original_vertices;

  bool is_latent(Vertex v) const {
    return !std::binary_search(original_vertices.begin(), original_vertices.end(), v);
  }

  Vertex latent_of(std::size_t hyperedge_index) const {
    return original_vertices.empty() ? static_cast<Vertex>(hyperedge_index)
                                     : original_vertices.back() + 1 + static_cast<Vertex>(hyperedge_index);
  }
};

/// Replaces each hyperedge by a fresh source pointing at its endpoints.
/// Latent ids are max original id + rank of the hyperedge (1-based) in
/// sorted order.
inline CanonicalDagResult canonical_dag(const MixedGraph& g) {
  CanonicalDagResult out;
  out.original_vertices = g.vertices();
  std::vector<Vertex> vertices = g.vertices();
  std::vector<Edge> edges = g.directed_edges();
  Vertex next = g.max_vertex() + 1;
  for (const auto& h : g.multidirected_edges()) {
    Vertex latent = next++;
    vertices.push_back(latent);
    for (Vertex v : h) edges.emplace_back(latent, v);
    out.latent_map.emplace(h, latent);
  }
  out.dag = MixedGraph(std::move(vertices), std::move(edges), {}, g.labels());
  return out;
}

namespace detail {

inline Vertex json_vertex(const nlohmann::json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer vertex id");
  auto v = j.get<std::int64_t>();
  if (v < 0 || v > 1'000'000'000) throw SchemaError(path, "vertex id out of range");
  return static_cast<Vertex>(v);
}

inline const nlohmann::json& json_field(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(std::string("/") + key, "missing field");
  return *it;
}

}  // namespace detail

/// Parses {"vertices":[...], "directed_edges":[[u,v],...],
/// "multidirected_edges":[[...],...], "labels":{...}}.
inline MixedGraph parse_graph(const nlohmann::json& doc) {
  using detail::json_vertex;
  if (!doc.is_object()) throw SchemaError("", "expected a JSON object");

  const auto& jv = detail::json_field(doc, "vertices");
  if (!jv.is_array()) throw SchemaError("/vertices", "expected an array");
  std::vector<Vertex> vertices;
  std::set<Vertex> known;
  for (std::size_t i = 0; i < jv.size(); ++i) {
    std::string path = "/vertices/" + std::to_string(i);
    Vertex v = json_vertex(jv[i], path);
    if (!known.insert(v).second) throw SchemaError(path, "duplicate vertex");
    vertices.push_back(v);
  }
  auto require_known = [&](Vertex v, const std::string& path) {
    if (!known.count(v)) throw SchemaError(path, "unknown vertex " + std::to_string(v));
  };

  const auto& jd = detail::json_field(doc, "directed_edges");
  if (!jd.is_array()) throw SchemaError("/directed_edges", "expected an array");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < jd.size(); ++i) {
    std::string path = "/directed_edges/" + std::to_string(i);
    if (!jd[i].is_array() || jd[i].size() != 2) throw SchemaError(path, "expected [u, v]");
    Vertex u = json_vertex(jd[i][0], path + "/0");
    Vertex v = json_vertex(jd[i][1], path + "/1");
    require_known(u, path + "/0");
    require_known(v, path + "/1");
    if (u == v) throw SchemaError(path, "self-loop");
    edges.emplace_back(u, v);
  }

  const auto& jh = detail::json_field(doc, "multidirected_edges");
  if (!jh.is_array()) throw SchemaError("/multidirected_edges", "expected an array");
  std::vector<Hyperedge> hyper;
  for (std::size_t i = 0; i < jh.size(); ++i) {
    std::string path = "/multidirected_edges/" + std::to_string(i);
    if (!jh[i].is_array() || jh[i].size() < 2) throw SchemaError(path, "expected at least two endpoints");
    Hyperedge h;
    for (std::size_t j = 0; j < jh[i].size(); ++j) {
      Vertex v = json_vertex(jh[i][j], path + "/" + std::to_string(j));
      require_known(v, path + "/" + std::to_string(j));
      h.push_back(v);
    }
    hyper.push_back(std::move(h));
  }

  std::map<Vertex, std::string> labels;
  if (auto it = doc.find("labels"); it != doc.end()) {
    if (!it->is_object()) throw SchemaError("/labels", "expected an object");
    for (const auto& [key, value] : it->items()) {
      std::string path = "/labels/" + key;
      Vertex v = 0;
      try {
        std::size_t used = 0;
        v = std::stoi(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw SchemaError(path, "label key must be a vertex id");
      }
      require_known(v, path);
      if (!value.is_string()) throw SchemaError(path, "label must be a string");
      labels[v] = value.get<std::string>();
    }
  }
  return MixedGraph(std::move(vertices), std::move(edges), std::move(hyper), std::move(labels));
}

inline MixedGraph parse_graph(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_graph(doc);
}

inline nlohmann::json graph_to_json(const MixedGraph& g) {
  nlohmann::json j;
  j["vertices"] = g.vertices();
  j["directed_edges"] = nlohmann::json::array();
  for (const auto& [u, v] : g.directed_edges()) j["directed_edges"].push_back({u, v});
  j["multidirected_edges"] = g.multidirected_edges();
  if (!g.labels().empty()) {
    nlohmann::json labels = nlohmann::json::object();
    for (const auto& [v, name] : g.labels()) labels[std::to_string(v)] = name;
    j["labels"] = labels;
  }
  return j;
}

/// Canonical text: compact, keys sorted.
inline std::string serialize_graph(const MixedGraph& g) { return graph_to_json(g).dump(); }

/// FNV-1a 64 over the canonical serialisation, as 16 hex digits.
inline std::string graph_hash(const MixedGraph& g) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : serialize_graph(g)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace multitrek
