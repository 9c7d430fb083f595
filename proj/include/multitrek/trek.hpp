#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "multitrek/errors.hpp"
#include "multitrek/graph.hpp"

namespace multitrek {

inline constexpr std::size_t kDefaultCap = 1'000'000;

/// Vertex sequence following directed edges; a single vertex is the trivial path.
using Path = std::vector<Vertex>;

/// Where the sources of a trek meet. For a shared source `vertex` is that
/// source. For a hyperedge top `vertex` is the latent id the hyperedge gets in
/// canonical_dag and `hyperedge` holds its endpoints.
struct TrekTop {
  Vertex vertex = -1;
  std::optional<Hyperedge> hyperedge;

  bool is_hyperedge() const noexcept { return hyperedge.has_value(); }
  friend bool operator==(const TrekTop&, const TrekTop&) = default;
};

struct KTrek {
  std::vector<Path> paths;
  TrekTop top;

  std::vector<Vertex> sources() const {
    std::vector<Vertex> s;
    for (const auto& p : paths) s.push_back(p.front());
    return s;
  }
  std::vector<Vertex> sinks() const {
    std::vector<Vertex> s;
    for (const auto& p : paths) s.push_back(p.back());
    return s;
  }
  friend bool operator==(const KTrek&, const KTrek&) = default;
};

/// n treks ordered so that trek j ends at sides[0][j] on side 1.
/// permutations[i-1][j] is the position in sides[i] of trek j's side-i end.
struct TrekSystem {
  std::vector<KTrek> treks;
  std::vector<std::vector<Vertex>> sides;
  std::vector<std::vector<std::size_t>> permutations;
  int sign = 1;
};

struct SidedIntersectionWitness {
  std::size_t trek_a = 0;
  std::size_t trek_b = 0;
  std::size_t side = 0;  // 1-based
  Vertex shared_vertex = -1;
};

struct ObstructionEntry {
  std::vector<Vertex> top;
  std::size_t blocked_side = 0;  // 1-based
  friend bool operator==(const ObstructionEntry&, const ObstructionEntry&) = default;
};

struct TrekSearchResult {
  std::optional<TrekSystem> system;
  std::vector<ObstructionEntry> obstructions;
  bool found() const noexcept { return system.has_value(); }
};

inline int permutation_sign(const std::vector<std::size_t>& perm) {
  int s = 1;
  for (std::size_t i = 0; i < perm.size(); ++i)
    for (std::size_t j = i + 1; j < perm.size(); ++j)
      if (perm[i] > perm[j]) s = -s;
  return s;
}

inline std::size_t binomial_capped(std::size_t n, std::size_t r, std::size_t cap) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  // Exact while below cap; saturates at cap + 1.
  unsigned __int128 c = 1;
  for (std::size_t i = 1; i <= r; ++i) {
    c = c * (n - r + i) / i;
    if (c > cap) return cap + 1;
  }
  return static_cast<std::size_t>(c);
}

/// Calls f(combination) for every r-subset of [0, n) in lexicographic order.
/// f returns false to stop early.
template <class F>
void for_each_combination(std::size_t n, std::size_t r, F&& f) {
  if (r > n) return;
  std::vector<std::size_t> c(r);
  for (std::size_t i = 0; i < r; ++i) c[i] = i;
  for (;;) {
    if (!f(static_cast<const std::vector<std::size_t>&>(c))) return;
    std::size_t i = r;
    while (i > 0 && c[i - 1] == n - r + i - 1) --i;
    if (i == 0) return;
    ++c[i - 1];
    for (std::size_t j = i; j < r; ++j) c[j] = c[j - 1] + 1;
  }
}

// ---------------------------------------------------------------------------
// Paths

inline bool is_path_in(const MixedGraph& g, const Path& p) {
  if (p.empty() || !g.contains(p.front())) return false;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (!g.contains(p[i]) || !g.has_edge(p[i - 1], p[i])) return false;
  return true;
}

/// All directed paths from u to v, lexicographic by vertex sequence.
inline std::vector<Path> enumerate_paths(const MixedGraph& g, Vertex u, Vertex v,
                                         std::size_t cap = kDefaultCap) {
  g.index_of(u);
  g.index_of(v);
  std::vector<Path> out;
  if (!g.reaches(u, v)) return out;
  Path cur{u};
  std::function<void(Vertex)> walk = [&](Vertex x) {
    if (x == v) {
      if (out.size() >= cap) throw BudgetExceeded("path enumeration", cap);
      out.push_back(cur);
      return;
    }
    for (Vertex c : g.children(x)) {
      if (!g.reaches(c, v)) continue;
      cur.push_back(c);
      walk(c);
      cur.pop_back();
    }
  };
  walk(u);
  return out;
}

// ---------------------------------------------------------------------------
// k-treks

namespace detail {

/// Index of the first hyperedge containing every vertex of `tuple`, if any.
inline std::optional<std::size_t> hyperedge_covering(const MixedGraph& g, std::vector<Vertex> tuple) {
  std::sort(tuple.begin(), tuple.end());
  tuple.erase(std::unique(tuple.begin(), tuple.end()), tuple.end());
  const auto& hs = g.multidirected_edges();
  for (std::size_t i = 0; i < hs.size(); ++i)
    if (std::includes(hs[i].begin(), hs[i].end(), tuple.begin(), tuple.end())) return i;
  return std::nullopt;
}

inline Vertex latent_id(const MixedGraph& g, std::size_t hyperedge_index) {
  return g.max_vertex() + 1 + static_cast<Vertex>(hyperedge_index);
}

}  // namespace detail

/// Valid source tuples for treks into `sinks`, in lexicographic order, with
/// their top. A tuple is valid if all entries coincide or if they all lie in
/// one hyperedge, and each entry reaches its sink.
inline std::vector<std::pair<std::vector<Vertex>, TrekTop>> trek_source_tuples(
    const MixedGraph& g, const std::vector<Vertex>& sinks) {
  const std::size_t k = sinks.size();
  std::vector<std::vector<Vertex>> options(k);
  for (std::size_t s = 0; s < k; ++s)
    for (Vertex v : g.vertices())
      if (g.reaches(v, sinks[s])) options[s].push_back(v);

  std::vector<std::pair<std::vector<Vertex>, TrekTop>> out;
  std::vector<Vertex> tuple(k);
  std::function<void(std::size_t)> rec = [&](std::size_t s) {
    if (s == k) {
      if (std::all_of(tuple.begin(), tuple.end(), [&](Vertex v) { return v == tuple.front(); })) {
        out.emplace_back(tuple, TrekTop{tuple.front(), std::nullopt});
        return;
      }
      if (auto h = detail::hyperedge_covering(g, tuple))
        out.emplace_back(tuple, TrekTop{detail::latent_id(g, *h), g.multidirected_edges()[*h]});
      return;
    }
    for (Vertex v : options[s]) {
      tuple[s] = v;
      rec(s + 1);
    }
  };
  if (k > 0) rec(0);
  return out;
}

/// All k-treks into `sinks` (ordered), grouped by source tuple in
/// lexicographic order, then lexicographic in the path tuple.
inline std::vector<KTrek> enumerate_ktreks(const MixedGraph& g, const std::vector<Vertex>& sinks,
                                           std::size_t cap = kDefaultCap) {
  if (sinks.size() < 2) throw InvalidArgument("k-treks need at least two sinks");
  for (Vertex v : sinks) g.index_of(v);
  std::vector<KTrek> out;
  const std::size_t k = sinks.size();
  for (const auto& [tuple, top] : trek_source_tuples(g, sinks)) {
    std::vector<std::vector<Path>> per_side(k);
    std::size_t count = 1;
    for (std::size_t s = 0; s < k; ++s) {
      per_side[s] = enumerate_paths(g, tuple[s], sinks[s], cap);
      count *= per_side[s].size();
      if (count + out.size() > cap) throw BudgetExceeded("k-trek enumeration", cap);
    }
    std::vector<std::size_t> pick(k, 0);
    if (count == 0) continue;
    for (;;) {
      KTrek t;
      t.top = top;
      for (std::size_t s = 0; s < k; ++s) t.paths.push_back(per_side[s][pick[s]]);
      out.push_back(std::move(t));
      std::size_t s = k;
      while (s > 0 && ++pick[s - 1] == per_side[s - 1].size()) pick[--s] = 0;
      if (s == 0) break;
    }
  }
  return out;
}

/// Adds the latent top in front of every path of a hyperedge-topped trek, so
/// the trek reads as a trek of canonical_dag(g).
inline KTrek lift_to_canonical(const KTrek& t) {
  if (!t.top.is_hyperedge()) return t;
  KTrek out = t;
  for (auto& p : out.paths) p.insert(p.begin(), t.top.vertex);
  return out;
}

/// The combinatorial determinant fixes its first index, so for odd k it is
/// symmetric rather than alternating in that index: crossing paths into side 1
/// do not cancel and only a bijection onto S_1 is required there. Sides before
/// the returned index are exempt from the disjointness condition.
inline std::size_t first_disjoint_side(std::size_t k) noexcept { return k % 2; }

/// First pair of treks sharing a vertex on a common side, scanning pairs in
/// order and sides from `from_side` (0-based). Paths are taken as stored.
inline std::optional<SidedIntersectionWitness> find_sided_intersection(const std::vector<KTrek>& treks,
                                                                       std::size_t from_side = 0) {
  for (std::size_t a = 0; a < treks.size(); ++a)
    for (std::size_t b = a + 1; b < treks.size(); ++b) {
      const std::size_t k = std::min(treks[a].paths.size(), treks[b].paths.size());
      for (std::size_t s = from_side; s < k; ++s)
        for (Vertex v : treks[a].paths[s])
          if (std::find(treks[b].paths[s].begin(), treks[b].paths[s].end(), v) != treks[b].paths[s].end())
            return SidedIntersectionWitness{a, b, s + 1, v};
    }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Vertex-disjoint path systems by unit-capacity max-flow

namespace detail {

class FlowNetwork {
 public:
  explicit FlowNetwork(std::size_t nodes) : adj_(nodes) {}

  void add_edge(std::size_t u, std::size_t v) {
    adj_[u].push_back(edges_.size());
    edges_.push_back({v, 1});
    adj_[v].push_back(edges_.size());
    edges_.push_back({u, 0});
  }

  /// Augments along BFS shortest paths until none remain.
  std::size_t max_flow(std::size_t s, std::size_t t) {
    std::size_t flow = 0;
    for (;;) {
      std::vector<std::ptrdiff_t> via(adj_.size(), -1);
      std::vector<char> seen(adj_.size(), 0);
      std::deque<std::size_t> queue{s};
      seen[s] = 1;
      while (!queue.empty() && !seen[t]) {
        std::size_t u = queue.front();
        queue.pop_front();
        for (std::size_t e : adj_[u]) {
          const auto& [to, cap] = edges_[e];
          if (cap > 0 && !seen[to]) {
            seen[to] = 1;
            via[to] = static_cast<std::ptrdiff_t>(e);
            queue.push_back(to);
          }
        }
      }
      if (!seen[t]) return flow;
      for (std::size_t v = t; v != s;) {
        std::size_t e = static_cast<std::size_t>(via[v]);
        edges_[e].cap -= 1;
        edges_[e ^ 1].cap += 1;
        v = edges_[e ^ 1].to;
      }
      ++flow;
    }
  }

  /// Head of the saturated forward edge leaving u, if any.
  std::optional<std::size_t> flow_successor(std::size_t u) const {
    for (std::size_t e : adj_[u])
      if (e % 2 == 0 && edges_[e].cap == 0) return edges_[e].to;
    return std::nullopt;
  }

 private:
  struct Arc {
    std::size_t to;
    int cap;
  };
  std::vector<std::vector<std::size_t>> adj_;
  std::vector<Arc> edges_;
};

}  // namespace detail

/// Vertex-disjoint paths from the vertices of `from` onto the vertices of
/// `to`; result[j] starts at from[j]. Absent if no such system exists.
inline std::optional<std::vector<Path>> exists_disjoint_path_system(const MixedGraph& g,
                                                                    const std::vector<Vertex>& from,
                                                                    const std::vector<Vertex>& to) {
  if (from.size() != to.size()) throw InvalidArgument("source and target sets differ in size");
  const std::size_t p = g.size();
  // node 2i = vertex i in, 2i+1 = vertex i out.
  const std::size_t source = 2 * p, sink = 2 * p + 1;
  detail::FlowNetwork net(2 * p + 2);
  for (std::size_t i = 0; i < p; ++i) net.add_edge(2 * i, 2 * i + 1);
  for (const auto& [u, v] : g.directed_edges()) net.add_edge(2 * g.index_of(u) + 1, 2 * g.index_of(v));
  for (Vertex r : from) net.add_edge(source, 2 * g.index_of(r));
  std::vector<char> is_target(p, 0);
  for (Vertex s : to) {
    net.add_edge(2 * g.index_of(s) + 1, sink);
    is_target[g.index_of(s)] = 1;
  }
  if (net.max_flow(source, sink) != from.size()) return std::nullopt;

  std::vector<Path> paths;
  for (Vertex r : from) {
    Path path{r};
    std::size_t node = 2 * g.index_of(r) + 1;
    for (;;) {
      auto next = net.flow_successor(node);
      if (!next || *next == sink) break;
      std::size_t vi = *next / 2;
      path.push_back(g.vertices()[vi]);
      node = 2 * vi + 1;
    }
    if (!is_target[g.index_of(path.back())])
      throw InternalInconsistency("flow decomposition ended off target");
    paths.push_back(std::move(path));
  }
  return paths;
}

/// Paths from from[j] to distinct vertices of `to`, not necessarily disjoint:
/// a bipartite matching on reachability, each pair joined by a shortest path.
inline std::optional<std::vector<Path>> exists_path_matching(const MixedGraph& g, const std::vector<Vertex>& from,
                                                             const std::vector<Vertex>& to) {
  if (from.size() != to.size()) throw InvalidArgument("source and target sets differ in size");
  const std::size_t n = from.size();
  const std::size_t source = 2 * n, sink = 2 * n + 1;
  detail::FlowNetwork net(2 * n + 2);
  for (std::size_t i = 0; i < n; ++i) {
    net.add_edge(source, i);
    net.add_edge(n + i, sink);
    for (std::size_t j = 0; j < n; ++j)
      if (g.reaches(from[i], to[j])) net.add_edge(i, n + j);
  }
  if (net.max_flow(source, sink) != n) return std::nullopt;

  std::vector<Path> paths;
  for (std::size_t i = 0; i < n; ++i) {
    const Vertex target = to[*net.flow_successor(i) - n];
    std::map<Vertex, Vertex> parent{{from[i], from[i]}};
    std::deque<Vertex> queue{from[i]};
    while (!queue.empty() && !parent.contains(target)) {
      Vertex u = queue.front();
      queue.pop_front();
      for (Vertex c : g.children(u))
        if (parent.emplace(c, u).second) queue.push_back(c);
    }
    Path path{target};
    while (path.back() != from[i]) path.push_back(parent.at(path.back()));
    std::reverse(path.begin(), path.end());
    paths.push_back(std::move(path));
  }
  return paths;
}

// ---------------------------------------------------------------------------
// Trek systems without sided intersection

namespace detail {

inline void validate_sides(const MixedGraph& g, const std::vector<std::vector<Vertex>>& sides) {
  if (sides.size() < 2) throw InvalidArgument("need at least two sides");
  for (std::size_t i = 0; i < sides.size(); ++i) {
    if (sides[i].size() != sides[0].size()) throw InvalidArgument("sides must have equal size");
    auto sorted = sides[i];
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw InvalidArgument("side " + std::to_string(i + 1) + " repeats a vertex");
    for (Vertex v : sides[i])
      if (!g.contains(v)) throw InvalidArgument("unknown vertex " + std::to_string(v));
  }
}

/// Orders treks by their side-1 end and fills permutations and sign.
inline TrekSystem assemble_system(std::vector<KTrek> treks, const std::vector<std::vector<Vertex>>& sides) {
  auto pos = [](const std::vector<Vertex>& side, Vertex v) {
    return static_cast<std::size_t>(std::find(side.begin(), side.end(), v) - side.begin());
  };
  std::sort(treks.begin(), treks.end(), [&](const KTrek& a, const KTrek& b) {
    return pos(sides[0], a.paths[0].back()) < pos(sides[0], b.paths[0].back());
  });
  TrekSystem sys;
  sys.sides = sides;
  for (std::size_t i = 1; i < sides.size(); ++i) {
    std::vector<std::size_t> perm;
    for (const auto& t : treks) perm.push_back(pos(sides[i], t.paths[i].back()));
    sys.sign *= permutation_sign(perm);
    sys.permutations.push_back(std::move(perm));
  }
  sys.treks = std::move(treks);
  return sys;
}

}  // namespace detail

/// Rewrites a canonical-DAG trek over the original graph: a latent top
/// becomes a hyperedge top and is dropped from the paths.
inline KTrek lower_from_canonical(const CanonicalDagResult& cd, const KTrek& t) {
  if (!cd.is_latent(t.top.vertex)) return t;
  KTrek out;
  for (const auto& [h, latent] : cd.latent_map)
    if (latent == t.top.vertex) out.top = TrekTop{latent, h};
  for (const auto& p : t.paths) out.paths.emplace_back(p.begin() + 1, p.end());
  return out;
}

/// Vertices that reach at least one vertex of every side.
inline std::vector<Vertex> candidate_tops(const MixedGraph& g, const std::vector<std::vector<Vertex>>& sides) {
  std::vector<Vertex> out;
  for (Vertex t : g.vertices()) {
    bool ok = true;
    for (const auto& side : sides)
      ok = ok && std::any_of(side.begin(), side.end(), [&](Vertex s) { return g.reaches(t, s); });
    if (ok) out.push_back(t);
  }
  return out;
}

/// Searches for a trek system between the sides with no sided intersection.
/// For every candidate top set R (distinct vertices, lexicographic) it asks
/// for vertex-disjoint path systems R -> S_i on each side (a path matching on
/// side 1 when k is odd); the first R that succeeds on all sides yields the
/// system. Mixed graphs are searched on
/// canonical_dag and the result is written back with hyperedge tops.
inline TrekSearchResult exists_trek_system_no_sided_intersection(
    const MixedGraph& g, const std::vector<std::vector<Vertex>>& sides, std::size_t cap = kDefaultCap) {
  detail::validate_sides(g, sides);
  const std::size_t n = sides[0].size();
  std::optional<CanonicalDagResult> cd;
  if (!g.is_dag()) cd = canonical_dag(g);
  const MixedGraph& work = cd ? cd->dag : g;

  TrekSearchResult result;
  if (n == 0) {
    result.system = detail::assemble_system({}, sides);
    return result;
  }
  const auto cand = candidate_tops(work, sides);
  if (binomial_capped(cand.size(), n, cap) > cap) throw BudgetExceeded("candidate top sets", cap);

  for_each_combination(cand.size(), n, [&](const std::vector<std::size_t>& pick) {
    std::vector<Vertex> tops;
    for (std::size_t i : pick) tops.push_back(cand[i]);
    std::vector<std::vector<Path>> per_side;
    for (std::size_t s = 0; s < sides.size(); ++s) {
      auto sys = s < first_disjoint_side(sides.size()) ? exists_path_matching(work, tops, sides[s])
                                                        : exists_disjoint_path_system(work, tops, sides[s]);
      if (!sys) {
        result.obstructions.push_back({tops, s + 1});
        return true;
      }
      per_side.push_back(std::move(*sys));
    }
    std::vector<KTrek> treks(n);
    for (std::size_t j = 0; j < n; ++j) {
      treks[j].top = TrekTop{tops[j], std::nullopt};
      for (std::size_t s = 0; s < sides.size(); ++s) treks[j].paths.push_back(per_side[s][j]);
    }
    if (auto w = find_sided_intersection(treks, first_disjoint_side(sides.size())))
      throw InternalInconsistency("assembled trek system intersects on side " + std::to_string(w->side));
    if (cd)
      for (auto& t : treks) t = lower_from_canonical(*cd, t);
    result.system = detail::assemble_system(std::move(treks), sides);
    result.obstructions.clear();
    return false;
  });
  return result;
}

// ---------------------------------------------------------------------------
// k-trek separation

/// True iff every k-trek between S_1 x ... x S_k has, for some side j, a path
/// P_j through a vertex of A_j. A trek escapes iff some top reaches every
/// side while avoiding that side's blocking set.
inline bool check_ktrek_separation(const MixedGraph& g, const std::vector<std::vector<Vertex>>& sides,
                                   const std::vector<std::vector<Vertex>>& blockers) {
  if (sides.size() != blockers.size()) throw InvalidArgument("one blocking set per side required");
  for (const auto& set : sides)
    for (Vertex v : set) g.index_of(v);
  for (const auto& set : blockers)
    for (Vertex v : set) g.index_of(v);

  std::optional<CanonicalDagResult> cd;
  if (!g.is_dag()) cd = canonical_dag(g);
  const MixedGraph& work = cd ? cd->dag : g;
  const std::size_t p = work.size();

  // avoid[j][i]: vertex i reaches S_j in the graph without A_j.
  std::vector<std::vector<char>> avoid(sides.size(), std::vector<char>(p, 0));
  for (std::size_t j = 0; j < sides.size(); ++j) {
    std::vector<char> blocked(p, 0);
    for (Vertex a : blockers[j]) blocked[work.index_of(a)] = 1;
    auto& mark = avoid[j];
    for (auto it = work.topological_order().rbegin(); it != work.topological_order().rend(); ++it) {
      const std::size_t i = work.index_of(*it);
      if (blocked[i]) continue;
      if (std::find(sides[j].begin(), sides[j].end(), *it) != sides[j].end()) mark[i] = 1;
      for (Vertex c : work.children(*it))
        if (mark[work.index_of(c)]) mark[i] = 1;
    }
  }
  for (std::size_t i = 0; i < p; ++i) {
    bool escapes = true;
    for (std::size_t j = 0; j < sides.size(); ++j) escapes = escapes && avoid[j][i];
    if (escapes) return false;
  }
  return true;
}

/// Smallest (then lexicographically first) blocking tuple with total size at
/// most `budget`, drawing from the graph's own vertices. For odd k only
/// tuples with an empty first set force the determinant to vanish. Candidate items are
/// (side, vertex) pairs ordered by side, then vertex.
inline std::optional<std::vector<std::vector<Vertex>>> find_ktrek_separating_sets(
    const MixedGraph& g, const std::vector<std::vector<Vertex>>& sides, std::size_t budget,
    std::size_t cap = kDefaultCap) {
  const std::size_t k = sides.size();
  const auto& verts = g.vertices();
  const std::size_t items = k * verts.size();
  std::size_t total = 0;
  for (std::size_t s = 0; s <= std::min(budget, items); ++s) {
    total += binomial_capped(items, s, cap);
    if (total > cap) throw BudgetExceeded("separating set search", cap);
  }
  std::optional<std::vector<std::vector<Vertex>>> found;
  for (std::size_t s = 0; s <= std::min(budget, items) && !found; ++s) {
    for_each_combination(items, s, [&](const std::vector<std::size_t>& pick) {
      std::vector<std::vector<Vertex>> blockers(k);
      for (std::size_t item : pick) blockers[item / verts.size()].push_back(verts[item % verts.size()]);
      if (check_ktrek_separation(g, sides, blockers)) {
        found = std::move(blockers);
        return false;
      }
      return true;
    });
  }
  return found;
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json top_to_json(const TrekTop& top) {
  if (top.is_hyperedge()) return {{"hyperedge", *top.hyperedge}, {"latent", top.vertex}};
  return {{"vertex", top.vertex}};
}

inline TrekTop top_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected a top object");
  if (j.contains("vertex")) return TrekTop{detail::json_vertex(j["vertex"], path + "/vertex"), std::nullopt};
  if (!j.contains("hyperedge") || !j.contains("latent")) throw SchemaError(path, "expected vertex or hyperedge");
  if (!j["hyperedge"].is_array()) throw SchemaError(path + "/hyperedge", "expected an array");
  Hyperedge h;
  for (std::size_t i = 0; i < j["hyperedge"].size(); ++i)
    h.push_back(detail::json_vertex(j["hyperedge"][i], path + "/hyperedge/" + std::to_string(i)));
  return TrekTop{detail::json_vertex(j["latent"], path + "/latent"), h};
}

inline nlohmann::json trek_system_to_json(const TrekSystem& sys) {
  nlohmann::json treks = nlohmann::json::array();
  for (const auto& t : sys.treks) treks.push_back({{"paths", t.paths}, {"top", top_to_json(t.top)}});
  return {{"treks", treks}, {"sides", sys.sides}, {"permutations", sys.permutations}, {"sign", sys.sign}};
}

inline TrekSystem trek_system_from_json(const nlohmann::json& j, const std::string& path = "") {
  if (!j.is_object()) throw SchemaError(path, "expected a trek system object");
  for (const char* key : {"treks", "sides", "permutations", "sign"})
    if (!j.contains(key)) throw SchemaError(path + "/" + key, "missing field");
  TrekSystem sys;
  try {
    sys.sides = j["sides"].get<std::vector<std::vector<Vertex>>>();
    sys.permutations = j["permutations"].get<std::vector<std::vector<std::size_t>>>();
    sys.sign = j["sign"].get<int>();
    for (std::size_t i = 0; i < j["treks"].size(); ++i) {
      const auto& jt = j["treks"][i];
      const std::string tp = path + "/treks/" + std::to_string(i);
      if (!jt.contains("paths") || !jt.contains("top")) throw SchemaError(tp, "expected paths and top");
      KTrek t;
      t.paths = jt["paths"].get<std::vector<Path>>();
      t.top = top_from_json(jt["top"], tp + "/top");
      sys.treks.push_back(std::move(t));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path, e.what());
  }
  return sys;
}

inline nlohmann::json obstructions_to_json(const std::vector<ObstructionEntry>& log) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& e : log) arr.push_back({{"top", e.top}, {"blocked_side", e.blocked_side}});
  return arr;
}

inline std::vector<ObstructionEntry> obstructions_from_json(const nlohmann::json& j, const std::string& path = "") {
  if (!j.is_array()) throw SchemaError(path, "expected an array");
  std::vector<ObstructionEntry> out;
  try {
    for (const auto& e : j) out.push_back({e.at("top").get<std::vector<Vertex>>(), e.at("blocked_side").get<std::size_t>()});
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path, e.what());
  }
  return out;
}

}  // namespace multitrek
