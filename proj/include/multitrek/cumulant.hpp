#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "multitrek/errors.hpp"
#include "multitrek/graph.hpp"
#include "multitrek/polynomial.hpp"
#include "multitrek/scalar.hpp"
#include "multitrek/tensor.hpp"
#include "multitrek/trek.hpp"

namespace multitrek {

inline constexpr int kRangeBound = 997;

/// Noise cumulants of one order. `diag[v]` is the entry at (v,...,v) from v's
/// own noise; `hyper[m]` is the shared contribution at the sorted multiset m.
/// The full entry at an index tuple is diag (if all indices agree) plus hyper.
template <class Scalar>
struct NoiseCumulants {
  std::map<Vertex, Scalar> diag;
  std::map<std::vector<Vertex>, Scalar> hyper;
  friend bool operator==(const NoiseCumulants&, const NoiseCumulants&) = default;
};

template <class Scalar>
struct ModelInstance {
  std::map<Edge, Scalar> lambda;
  std::map<int, NoiseCumulants<Scalar>> noise;

  const NoiseCumulants<Scalar>& order(int k) const {
    auto it = noise.find(k);
    if (it == noise.end()) throw MissingOrder(k);
    return it->second;
  }

  Scalar edge_weight(Vertex u, Vertex v) const {
    auto it = lambda.find({u, v});
    return it == lambda.end() ? Scalar(0) : it->second;
  }

  Scalar noise_entry(std::vector<Vertex> idx) const {
    const auto& nc = order(static_cast<int>(idx.size()));
    std::sort(idx.begin(), idx.end());
    Scalar out(0);
    if (!idx.empty() && idx.front() == idx.back()) {
      auto it = nc.diag.find(idx.front());
      if (it != nc.diag.end()) out += it->second;
    }
    auto it = nc.hyper.find(idx);
    if (it != nc.hyper.end()) out += it->second;
    return out;
  }

  Scalar path_weight(const Path& p) const {
    Scalar w(1);
    for (std::size_t i = 1; i < p.size(); ++i) w *= edge_weight(p[i - 1], p[i]);
    return w;
  }

  friend bool operator==(const ModelInstance&, const ModelInstance&) = default;
};

/// Multisets of size `order` drawn from `members` (sorted), lexicographic.
inline std::vector<std::vector<Vertex>> multisets_of(const std::vector<Vertex>& members, std::size_t order) {
  std::vector<std::vector<Vertex>> out;
  std::vector<Vertex> cur;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    if (cur.size() == order) {
      out.push_back(cur);
      return;
    }
    for (std::size_t i = start; i < members.size(); ++i) {
      cur.push_back(members[i]);
      rec(i);
      cur.pop_back();
    }
  };
  rec(0);
  return out;
}

/// Throws InvalidArgument if the instance puts weight outside the graph.
template <class Scalar>
void validate_instance(const MixedGraph& g, const ModelInstance<Scalar>& inst) {
  for (const auto& [e, w] : inst.lambda)
    if (!g.contains(e.first) || !g.contains(e.second) || !g.has_edge(e.first, e.second))
      throw InvalidArgument("lambda on non-edge " + std::to_string(e.first) + "->" + std::to_string(e.second));
  for (const auto& [k, nc] : inst.noise) {
    if (k < 2) throw InvalidArgument("noise order must be at least 2");
    for (const auto& [v, w] : nc.diag)
      if (!g.contains(v)) throw InvalidArgument("noise for unknown vertex " + std::to_string(v));
    for (const auto& [m, w] : nc.hyper) {
      if (m.size() != static_cast<std::size_t>(k) || !std::is_sorted(m.begin(), m.end()))
        throw InvalidArgument("hyper noise key must be a sorted multiset of size " + std::to_string(k));
      if (!detail::hyperedge_covering(g, m))
        throw InvalidArgument("hyper noise outside every multidirected edge");
    }
  }
}

/// (I - Lambda)^{-1} as path sums: entry (j, i) is the sum over directed paths
/// j -> i of the product of edge weights. Rows and columns follow g.vertices().
template <class Scalar>
Matrix<Scalar> path_matrix(const MixedGraph& g, const ModelInstance<Scalar>& inst) {
  const std::size_t p = g.size();
  Matrix<Scalar> a = Matrix<Scalar>::matrix(p, p);
  const auto& topo = g.topological_order();
  for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
    const std::size_t j = g.index_of(*it);
    a(j, j) = Scalar(1);
    for (Vertex c : g.children(*it)) {
      const Scalar w = inst.edge_weight(*it, c);
      if (is_zero(w)) continue;
      const std::size_t ci = g.index_of(c);
      for (std::size_t i = 0; i < p; ++i)
        if (!is_zero(a(ci, i))) a(j, i) += w * a(ci, i);
    }
  }
  return a;
}

/// Nonzero noise entries of order k as (vertex-index tuple, value), every
/// permutation of a hyper multiset listed.
template <class Scalar>
std::vector<std::pair<std::vector<std::size_t>, Scalar>> noise_support(const MixedGraph& g,
                                                                       const ModelInstance<Scalar>& inst, int k) {
  const auto& nc = inst.order(k);
  std::map<std::vector<std::size_t>, Scalar> acc;
  for (const auto& [v, w] : nc.diag) {
    if (is_zero(w)) continue;
    acc[std::vector<std::size_t>(k, g.index_of(v))] += w;
  }
  for (const auto& [m, w] : nc.hyper) {
    if (is_zero(w)) continue;
    std::vector<std::size_t> idx;
    for (Vertex v : m) idx.push_back(g.index_of(v));
    std::sort(idx.begin(), idx.end());
    do acc[idx] += w;
    while (std::next_permutation(idx.begin(), idx.end()));
  }
  std::vector<std::pair<std::vector<std::size_t>, Scalar>> out;
  for (auto& [idx, w] : acc)
    if (!is_zero(w)) out.emplace_back(idx, std::move(w));
  return out;
}

template <class Scalar>
Tensor<Scalar> noise_tensor(const MixedGraph& g, const ModelInstance<Scalar>& inst, int k) {
  auto t = Tensor<Scalar>::cubical(static_cast<std::size_t>(k), g.size());
  for (const auto& [idx, w] : noise_support(g, inst, k)) t.at(idx) = w;
  return t;
}

/// Order-k cumulant tensor of the observed vector, E . A^k with A the path
/// matrix. Modes follow g.vertices().
template <class Scalar>
Tensor<Scalar> model_cumulant(const MixedGraph& g, const ModelInstance<Scalar>& inst, int k) {
  if (k < 1) throw InvalidArgument("order must be positive");
  return tucker_apply(noise_tensor(g, inst, k), path_matrix(g, inst));
}

/// Entries of the order-k cumulant tensor at sides[0] x ... x sides[k-1] only
/// (given as vertex ids), summing over nonzero noise entries.
template <class Scalar>
Tensor<Scalar> cumulant_subtensor(const MixedGraph& g, const ModelInstance<Scalar>& inst,
                                  const std::vector<std::vector<Vertex>>& sides) {
  const int k = static_cast<int>(sides.size());
  const auto a = path_matrix(g, inst);
  const auto support = noise_support(g, inst, k);
  std::vector<std::size_t> dims;
  std::vector<std::vector<std::size_t>> cols(sides.size());
  for (std::size_t s = 0; s < sides.size(); ++s) {
    dims.push_back(sides[s].size());
    for (Vertex v : sides[s]) {
      if (!g.contains(v)) throw IndexOutOfRange("unknown vertex " + std::to_string(v));
      cols[s].push_back(g.index_of(v));
    }
  }
  Tensor<Scalar> out(dims);
  std::size_t off = 0;
  out.for_each([&](const auto& pos, const Scalar&) {
    Scalar sum(0);
    for (const auto& [idx, w] : support) {
      Scalar term = w;
      for (std::size_t s = 0; s < idx.size() && !is_zero(term); ++s) {
        const Scalar& f = a(idx[s], cols[s][pos[s]]);
        if (is_zero(f))
          term = Scalar(0);
        else
          term *= f;
      }
      if (!is_zero(term)) sum += term;
    }
    out.data()[off++] = std::move(sum);
  });
  return out;
}

/// Cumulant entry as the sum over k-treks of E_{sources} times path weights.
template <class Scalar>
Scalar cumulant_entry_by_trek_rule(const MixedGraph& g, const ModelInstance<Scalar>& inst,
                                   const std::vector<Vertex>& indices, std::size_t cap = kDefaultCap) {
  inst.order(static_cast<int>(indices.size()));
  Scalar sum(0);
  for (const auto& t : enumerate_ktreks(g, indices, cap)) {
    Scalar m = inst.noise_entry(t.sources());
    if (is_zero(m)) continue;
    for (const auto& p : t.paths) m *= inst.path_weight(p);
    sum += m;
  }
  return sum;
}

namespace detail {

/// A trek reduced to what the signed system sum needs: the vertex indices on
/// each side and its monomial.
template <class Scalar>
struct WeightedTrek {
  std::vector<std::vector<std::size_t>> side_vertices;
  Scalar weight;
};

/// Sum of sign(T) * prod weights over trek systems between the sides whose
/// treks are pairwise vertex-disjoint on every side from first_disjoint_side(k). `treks_into(sinks)`
/// returns the weighted treks into one sink tuple.
template <class Scalar, class TreksInto>
Scalar signed_system_sum(const MixedGraph& g, const std::vector<std::vector<Vertex>>& sides,
                         TreksInto&& treks_into) {
  const std::size_t k = sides.size(), n = sides[0].size();
  if (n == 0) return Scalar(1);
  const std::size_t from = first_disjoint_side(k);
  std::vector<std::vector<char>> used(k, std::vector<char>(g.size(), 0));
  std::vector<std::vector<char>> taken(k, std::vector<char>(n, 0));
  std::vector<std::vector<std::size_t>> perm(k, std::vector<std::size_t>(n));
  std::vector<Vertex> sinks(k);
  Scalar sum(0);

  std::function<void(std::size_t, const Scalar&)> place_row;
  // Chooses side-s endpoints for trek `row`, then a trek into those sinks.
  std::function<void(std::size_t, std::size_t, const Scalar&)> choose = [&](std::size_t row, std::size_t s,
                                                                            const Scalar& acc) {
    if (s == k) {
      // deeper rows overwrite sinks, so rebuild this row's tuple
      sinks[0] = sides[0][row];
      for (std::size_t i = 1; i < k; ++i) sinks[i] = sides[i][perm[i][row]];
      for (const auto& t : treks_into(sinks)) {
        bool clash = false;
        for (std::size_t i = from; i < k && !clash; ++i)
          for (std::size_t v : t.side_vertices[i])
            if (used[i][v]) {
              clash = true;
              break;
            }
        if (clash) continue;
        for (std::size_t i = from; i < k; ++i)
          for (std::size_t v : t.side_vertices[i]) used[i][v] = 1;
        place_row(row + 1, acc * t.weight);
        for (std::size_t i = from; i < k; ++i)
          for (std::size_t v : t.side_vertices[i]) used[i][v] = 0;
      }
      return;
    }
    for (std::size_t c = 0; c < n; ++c) {
      if (taken[s][c]) continue;
      taken[s][c] = 1;
      perm[s][row] = c;
      sinks[s] = sides[s][c];
      choose(row, s + 1, acc);
      taken[s][c] = 0;
    }
  };
  place_row = [&](std::size_t row, const Scalar& acc) {
    if (row == n) {
      int sign = 1;
      for (std::size_t s = 1; s < k; ++s) sign *= permutation_sign(perm[s]);
      if (sign > 0)
        sum += acc;
      else
        sum -= acc;
      return;
    }
    sinks[0] = sides[0][row];
    choose(row, 1, acc);
  };
  place_row(0, Scalar(1));
  return sum;
}

/// Memoises weighted treks per sink tuple, capping the total held.
template <class Scalar, class Build>
class TrekCache {
 public:
  TrekCache(Build build, std::size_t cap) : build_(std::move(build)), cap_(cap) {}

  const std::vector<WeightedTrek<Scalar>>& operator()(const std::vector<Vertex>& sinks) {
    auto it = cache_.find(sinks);
    if (it != cache_.end()) return it->second;
    auto list = build_(sinks);
    total_ += list.size();
    if (total_ > cap_) throw BudgetExceeded("trek cache", cap_);
    return cache_.emplace(sinks, std::move(list)).first->second;
  }

 private:
  Build build_;
  std::size_t cap_;
  std::size_t total_ = 0;
  std::map<std::vector<Vertex>, std::vector<WeightedTrek<Scalar>>> cache_;
};

template <class Scalar>
WeightedTrek<Scalar> weigh(const MixedGraph& g, const std::vector<Path>& paths, Scalar weight) {
  WeightedTrek<Scalar> item{{}, std::move(weight)};
  for (const auto& p : paths) {
    std::vector<std::size_t> vs;
    for (Vertex v : p) vs.push_back(g.index_of(v));
    item.side_vertices.push_back(std::move(vs));
  }
  return item;
}

}  // namespace detail

/// Determinant of the cumulant subtensor as the signed sum of trek-system
/// monomials over systems whose treks share no vertex on any side.
template <class Scalar>
Scalar det_by_trek_systems(const MixedGraph& g, const ModelInstance<Scalar>& inst,
                           const std::vector<std::vector<Vertex>>& sides, std::size_t cap = kDefaultCap) {
  detail::validate_sides(g, sides);
  if (sides[0].empty()) return Scalar(1);
  inst.order(static_cast<int>(sides.size()));
  auto build = [&](const std::vector<Vertex>& sinks) {
    std::vector<detail::WeightedTrek<Scalar>> list;
    for (const auto& t : enumerate_ktreks(g, sinks, cap)) {
      Scalar w = inst.noise_entry(t.sources());
      if (is_zero(w)) continue;
      for (const auto& p : t.paths) w *= inst.path_weight(p);
      list.push_back(detail::weigh(g, t.paths, std::move(w)));
    }
    return list;
  };
  detail::TrekCache<Scalar, decltype(build)> cache(build, cap);
  return detail::signed_system_sum<Scalar>(g, sides, cache);
}

// ---------------------------------------------------------------------------
// Instances

namespace detail {

/// Uniform on {-B..-1, 1..B}.
inline Rational draw_nonzero(std::mt19937_64& rng) {
  const auto v = static_cast<long>(rng() % (2 * kRangeBound));
  return Rational(v < kRangeBound ? -(v + 1) : v - kRangeBound + 1);
}

/// Folds the latent sources of canonical_dag(g) back into hyper noise entries:
/// each multiset inside hyperedge h gets kappa_L * prod lambda_{L,v}.
template <class Scalar>
ModelInstance<Scalar> project_canonical(const CanonicalDagResult& cd, const ModelInstance<Scalar>& full) {
  ModelInstance<Scalar> out;
  for (const auto& [e, w] : full.lambda)
    if (!cd.is_latent(e.first)) out.lambda[e] = w;
  for (const auto& [k, nc] : full.noise) {
    auto& dst = out.noise[k];
    for (const auto& [v, w] : nc.diag)
      if (!cd.is_latent(v)) dst.diag[v] = w;
    for (const auto& [h, latent] : cd.latent_map) {
      auto kappa = nc.diag.find(latent);
      if (kappa == nc.diag.end()) continue;
      std::vector<Vertex> members = h;
      members.erase(std::unique(members.begin(), members.end()), members.end());
      for (const auto& m : multisets_of(members, static_cast<std::size_t>(k))) {
        Scalar w = kappa->second;
        for (Vertex v : m) w *= full.edge_weight(latent, v);
        dst.hyper[m] += w;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Random instance with every edge weight and every per-vertex noise cumulant
/// (orders 2..k_max) drawn from {+-1, ..., +-997}. Mixed graphs are drawn on
/// canonical_dag and the latent sources folded into hyper noise. Draw order:
/// edges sorted, then for each order the vertices sorted.
inline ModelInstance<Rational> sample_generic_instance(const MixedGraph& g, int k_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::optional<CanonicalDagResult> cd;
  if (!g.is_dag()) cd = canonical_dag(g);
  const MixedGraph& work = cd ? cd->dag : g;
  ModelInstance<Rational> inst;
  for (const auto& e : work.directed_edges()) inst.lambda[e] = detail::draw_nonzero(rng);
  for (int k = 2; k <= k_max; ++k) {
    auto& nc = inst.noise[k];
    for (Vertex v : work.vertices()) nc.diag[v] = detail::draw_nonzero(rng);
  }
  if (!cd) return inst;
  return detail::project_canonical(*cd, inst);
}

/// Instance whose entries are independent indeterminates. `names[id]` labels
/// variable id: "l(u,v)" for edge weights and "k<order>(v)" for noise.
struct SymbolicInstance {
  ModelInstance<Polynomial> instance;
  std::vector<std::string> names;

  std::string render(const Polynomial& p) const {
    return p.to_string([&](int id) { return names.at(static_cast<std::size_t>(id)); });
  }
};

inline SymbolicInstance symbolic_instance(const MixedGraph& g, int k_max) {
  std::optional<CanonicalDagResult> cd;
  if (!g.is_dag()) cd = canonical_dag(g);
  const MixedGraph& work = cd ? cd->dag : g;
  SymbolicInstance out;
  ModelInstance<Polynomial> full;
  auto fresh = [&](std::string name) {
    out.names.push_back(std::move(name));
    return Polynomial::variable(static_cast<int>(out.names.size() - 1));
  };
  for (int k = 2; k <= k_max; ++k)
    for (Vertex v : work.vertices())
      full.noise[k].diag[v] = fresh("k" + std::to_string(k) + "(" + std::to_string(v) + ")");
  for (const auto& [u, v] : work.directed_edges())
    full.lambda[{u, v}] = fresh("l(" + std::to_string(u) + "," + std::to_string(v) + ")");
  out.instance = cd ? detail::project_canonical(*cd, full) : std::move(full);
  return out;
}

template <class To, class From, class Convert>
ModelInstance<To> convert_instance(const ModelInstance<From>& in, Convert&& conv) {
  ModelInstance<To> out;
  for (const auto& [e, w] : in.lambda) out.lambda[e] = conv(w);
  for (const auto& [k, nc] : in.noise) {
    auto& dst = out.noise[k];
    for (const auto& [v, w] : nc.diag) dst.diag[v] = conv(w);
    for (const auto& [m, w] : nc.hyper) dst.hyper[m] = conv(w);
  }
  return out;
}

inline ModelInstance<double> to_float(const ModelInstance<Rational>& in) {
  return convert_instance<double>(in, [](const Rational& q) { return q.get_d(); });
}

// ---------------------------------------------------------------------------
// JSON

inline std::string edge_key(const Edge& e) { return std::to_string(e.first) + "->" + std::to_string(e.second); }

inline nlohmann::json instance_to_json(const ModelInstance<Rational>& inst) {
  nlohmann::json lambda = nlohmann::json::object();
  for (const auto& [e, w] : inst.lambda) lambda[edge_key(e)] = to_string(w);
  nlohmann::json noise = nlohmann::json::object();
  for (const auto& [k, nc] : inst.noise) {
    nlohmann::json diag = nlohmann::json::object(), hyper = nlohmann::json::object();
    for (const auto& [v, w] : nc.diag) diag[std::to_string(v)] = to_string(w);
    for (const auto& [m, w] : nc.hyper) hyper[nlohmann::json(m).dump()] = to_string(w);
    noise[std::to_string(k)] = {{"diag", diag}, {"hyper", hyper}};
  }
  return {{"lambda", lambda}, {"noise", noise}};
}

inline ModelInstance<Rational> instance_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("", "expected an instance object");
  ModelInstance<Rational> inst;
  auto rational_at = [](const nlohmann::json& v, const std::string& path) {
    if (!v.is_string()) throw SchemaError(path, "expected \"a/b\"");
    try {
      return parse_rational(v.get<std::string>());
    } catch (const InvalidArgument& e) {
      throw SchemaError(path, e.what());
    }
  };
  auto int_key = [](const std::string& s, const std::string& path) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      throw SchemaError(path, "expected an integer key");
    }
    if (used != s.size()) throw SchemaError(path, "expected an integer key");
    return v;
  };
  const auto& lambda = detail::json_field(j, "lambda");
  if (!lambda.is_object()) throw SchemaError("/lambda", "expected an object");
  for (const auto& [key, val] : lambda.items()) {
    const std::string path = "/lambda/" + key;
    auto arrow = key.find("->");
    if (arrow == std::string::npos) throw SchemaError(path, "expected key \"u->v\"");
    Edge e{int_key(key.substr(0, arrow), path), int_key(key.substr(arrow + 2), path)};
    inst.lambda[e] = rational_at(val, path);
  }
  const auto& noise = detail::json_field(j, "noise");
  if (!noise.is_object()) throw SchemaError("/noise", "expected an object");
  for (const auto& [order, body] : noise.items()) {
    const std::string path = "/noise/" + order;
    auto& nc = inst.noise[int_key(order, path)];
    if (!body.is_object()) throw SchemaError(path, "expected an object");
    if (body.contains("diag"))
      for (const auto& [v, w] : body["diag"].items())
        nc.diag[int_key(v, path + "/diag/" + v)] = rational_at(w, path + "/diag/" + v);
    if (body.contains("hyper"))
      for (const auto& [m, w] : body["hyper"].items()) {
        const std::string hp = path + "/hyper/" + m;
        std::vector<Vertex> key;
        try {
          key = nlohmann::json::parse(m).get<std::vector<Vertex>>();
        } catch (const nlohmann::json::exception&) {
          throw SchemaError(hp, "expected key \"[i,j,...]\"");
        }
        std::sort(key.begin(), key.end());
        nc.hyper[key] = rational_at(w, hp);
      }
  }
  return inst;
}

}  // namespace multitrek
