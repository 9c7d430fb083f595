#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "multitrek/cumulant.hpp"
#include "multitrek/decision.hpp"
#include "multitrek/errors.hpp"
#include "multitrek/graph.hpp"
#include "multitrek/tensor.hpp"
#include "multitrek/trek.hpp"

namespace multitrek {

/// Set partitions of {0..m-1} whose blocks all have at least two elements,
/// in restricted-growth order.
inline std::vector<std::vector<std::vector<std::size_t>>> partitions_without_singletons(std::size_t m) {
  std::vector<std::vector<std::vector<std::size_t>>> out;
  std::vector<std::vector<std::size_t>> blocks;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == m) {
      for (const auto& b : blocks)
        if (b.size() < 2) return;
      out.push_back(blocks);
      return;
    }
    for (std::size_t b = 0; b < blocks.size(); ++b) {
      blocks[b].push_back(i);
      rec(i + 1);
      blocks[b].pop_back();
    }
    blocks.push_back({i});
    rec(i + 1);
    blocks.pop_back();
  };
  rec(0);
  return out;
}

/// Moments of a centred vector from its cumulants: the moment at
/// (i_1..i_m) sums, over partitions into blocks of size >= 2, the products of
/// block cumulants. Returns orders 2..max order present.
template <class Scalar>
std::map<int, Tensor<Scalar>> moments_from_cumulants(const std::map<int, Tensor<Scalar>>& cumulants) {
  if (cumulants.empty()) return {};
  const int top = cumulants.rbegin()->first;
  const std::size_t p = cumulants.begin()->second.dim(0);
  for (const auto& [k, t] : cumulants)
    if (t.order() != static_cast<std::size_t>(k) || !t.is_cubical() || t.dim(0) != p)
      throw DimMismatch("cumulant of order " + std::to_string(k) + " has inconsistent shape");

  std::map<int, Tensor<Scalar>> out;
  for (int m = 2; m <= top; ++m) {
    const auto parts = partitions_without_singletons(static_cast<std::size_t>(m));
    for (const auto& part : parts)
      for (const auto& b : part)
        if (!cumulants.count(static_cast<int>(b.size()))) throw MissingOrder(static_cast<int>(b.size()));
    auto mom = Tensor<Scalar>::cubical(static_cast<std::size_t>(m), p);
    std::size_t off = 0;
    std::vector<std::size_t> sub;
    mom.for_each([&](const auto& idx, const Scalar&) {
      Scalar sum(0);
      for (const auto& part : parts) {
        Scalar prod(1);
        for (const auto& b : part) {
          sub.clear();
          for (std::size_t pos : b) sub.push_back(idx[pos]);
          prod *= cumulants.at(static_cast<int>(b.size())).at(sub);
          if (is_zero(prod)) break;
        }
        sum += prod;
      }
      mom.data()[off++] = std::move(sum);
    });
    out.emplace(m, std::move(mom));
  }
  return out;
}

/// Single-variable moments mu_2..mu_k from cumulants kappa_2..kappa_k
/// (mu_1 = kappa_1 = 0).
template <class Scalar>
std::vector<Scalar> moments_of_one(const std::vector<Scalar>& kappa, int k) {
  // kappa[m] for m = 0..k; entries 0 and 1 unused.
  std::vector<Scalar> mu(static_cast<std::size_t>(k) + 1, Scalar(0));
  mu[0] = Scalar(1);
  // mu_m = sum_{j=2}^{m} C(m-1, j-1) kappa_j mu_{m-j}
  for (int m = 2; m <= k; ++m) {
    Scalar s(0);
    long binom = 1;  // C(m-1, j-1), starting at j = 1
    for (int j = 2; j <= m; ++j) {
      binom = binom * (m - j + 1) / (j - 1);
      s += Scalar(static_cast<int>(binom)) * kappa[static_cast<std::size_t>(j)] * mu[static_cast<std::size_t>(m - j)];
    }
    mu[static_cast<std::size_t>(m)] = s;
  }
  return mu;
}

/// Phi^(k): order-k moments of the noise vector. With independent noise an
/// entry is the product over distinct indices of that vertex's moment of the
/// matching multiplicity; with hyperedges the joint duality is applied to the
/// noise cumulant tensors.
template <class Scalar>
Tensor<Scalar> noise_moment_tensor(const MixedGraph& g, const ModelInstance<Scalar>& inst, int k) {
  for (int m = 2; m <= k; ++m) inst.order(m);
  if (!g.is_dag()) {
    std::map<int, Tensor<Scalar>> cums;
    for (int m = 2; m <= k; ++m) cums.emplace(m, noise_tensor(g, inst, m));
    return moments_from_cumulants(cums).at(k);
  }
  std::vector<std::vector<Scalar>> mu;
  for (Vertex v : g.vertices()) {
    std::vector<Scalar> kappa(static_cast<std::size_t>(k) + 1, Scalar(0));
    for (int m = 2; m <= k; ++m) {
      auto it = inst.order(m).diag.find(v);
      if (it != inst.order(m).diag.end()) kappa[static_cast<std::size_t>(m)] = it->second;
    }
    mu.push_back(moments_of_one(kappa, k));
  }
  auto phi = Tensor<Scalar>::cubical(static_cast<std::size_t>(k), g.size());
  std::size_t off = 0;
  std::vector<std::size_t> mult(g.size(), 0);
  phi.for_each([&](const auto& idx, const Scalar&) {
    for (std::size_t i : idx) ++mult[i];
    Scalar prod(1);
    for (std::size_t i : idx) {
      if (mult[i] == 0) continue;
      prod *= mu[i][mult[i]];
      mult[i] = 0;
    }
    phi.data()[off++] = std::move(prod);
  });
  return phi;
}

/// N^(k) = Phi^(k) . A^k.
template <class Scalar>
Tensor<Scalar> model_moment(const MixedGraph& g, const ModelInstance<Scalar>& inst, int k) {
  return tucker_apply(noise_moment_tensor(g, inst, k), path_matrix(g, inst));
}

/// Entries of N^(k) at sides[0] x ... x sides[k-1] only.
template <class Scalar>
Tensor<Scalar> moment_subtensor(const MixedGraph& g, const ModelInstance<Scalar>& inst,
                                const std::vector<std::vector<Vertex>>& sides) {
  const int k = static_cast<int>(sides.size());
  const auto a = path_matrix(g, inst);
  const auto phi = noise_moment_tensor(g, inst, k);
  std::vector<std::pair<std::vector<std::size_t>, Scalar>> support;
  phi.for_each([&](const auto& idx, const Scalar& v) {
    if (!is_zero(v)) support.emplace_back(idx, v);
  });
  std::vector<std::vector<std::size_t>> cols(sides.size());
  std::vector<std::size_t> dims;
  for (std::size_t s = 0; s < sides.size(); ++s) {
    dims.push_back(sides[s].size());
    for (Vertex v : sides[s]) cols[s].push_back(g.index_of(v));
  }
  Tensor<Scalar> out(dims);
  std::size_t off = 0;
  out.for_each([&](const auto& pos, const Scalar&) {
    Scalar sum(0);
    for (const auto& [idx, w] : support) {
      Scalar term = w;
      for (std::size_t s = 0; s < idx.size(); ++s) {
        const Scalar& f = a(idx[s], cols[s][pos[s]]);
        if (is_zero(f)) {
          term = Scalar(0);
          break;
        }
        term *= f;
      }
      if (!is_zero(term)) sum += term;
    }
    out.data()[off++] = std::move(sum);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Split-treks

/// k paths whose sources form groups; every group shares one source and has
/// at least two paths. groups[g] lists path positions, ordered by first
/// position; paths with the same source always share a group.
struct SplitTrek {
  std::vector<Path> paths;
  std::vector<std::vector<std::size_t>> groups;

  std::vector<Vertex> sources() const {
    std::vector<Vertex> s;
    for (const auto& p : paths) s.push_back(p.front());
    return s;
  }
  friend bool operator==(const SplitTrek&, const SplitTrek&) = default;
};

namespace detail {

inline std::optional<std::vector<std::vector<std::size_t>>> split_groups(const std::vector<Vertex>& sources) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<char> seen(sources.size(), 0);
  for (std::size_t i = 0; i < sources.size(); ++i) {
    if (seen[i]) continue;
    std::vector<std::size_t> grp;
    for (std::size_t j = i; j < sources.size(); ++j)
      if (sources[j] == sources[i]) {
        grp.push_back(j);
        seen[j] = 1;
      }
    if (grp.size() < 2) return std::nullopt;
    groups.push_back(std::move(grp));
  }
  return groups;
}

inline void require_dag(const MixedGraph& g) {
  if (!g.is_dag()) throw InvalidArgument("split-treks are defined on graphs without multidirected edges");
}

}  // namespace detail

/// All k-split-treks into `sinks`, by source tuple (lexicographic) then path
/// tuple.
inline std::vector<SplitTrek> enumerate_split_treks(const MixedGraph& g, const std::vector<Vertex>& sinks,
                                                    std::size_t cap = kDefaultCap) {
  detail::require_dag(g);
  if (sinks.size() < 2) throw InvalidArgument("split-treks need at least two sinks");
  const std::size_t k = sinks.size();
  std::vector<std::vector<Vertex>> options(k);
  for (std::size_t s = 0; s < k; ++s)
    for (Vertex v : g.vertices())
      if (g.reaches(v, sinks[s])) options[s].push_back(v);

  std::vector<SplitTrek> out;
  std::vector<Vertex> tuple(k);
  std::function<void(std::size_t)> rec = [&](std::size_t s) {
    if (s < k) {
      for (Vertex v : options[s]) {
        tuple[s] = v;
        rec(s + 1);
      }
      return;
    }
    auto groups = detail::split_groups(tuple);
    if (!groups) return;
    std::vector<std::vector<Path>> per_side(k);
    std::size_t count = 1;
    for (std::size_t i = 0; i < k; ++i) {
      per_side[i] = enumerate_paths(g, tuple[i], sinks[i], cap);
      count *= per_side[i].size();
      if (count + out.size() > cap) throw BudgetExceeded("split-trek enumeration", cap);
    }
    std::vector<std::size_t> pick(k, 0);
    for (;;) {
      SplitTrek t;
      t.groups = *groups;
      for (std::size_t i = 0; i < k; ++i) t.paths.push_back(per_side[i][pick[i]]);
      out.push_back(std::move(t));
      std::size_t i = k;
      while (i > 0 && ++pick[i - 1] == per_side[i - 1].size()) pick[--i] = 0;
      if (i == 0) break;
    }
  };
  rec(0);
  return out;
}

/// Moment entry as the sum over split-treks of Phi_{sources} times path weights.
template <class Scalar>
Scalar moment_entry_by_split_treks(const MixedGraph& g, const ModelInstance<Scalar>& inst,
                                   const std::vector<Vertex>& indices, std::size_t cap = kDefaultCap) {
  const auto phi = noise_moment_tensor(g, inst, static_cast<int>(indices.size()));
  Scalar sum(0);
  for (const auto& t : enumerate_split_treks(g, indices, cap)) {
    std::vector<std::size_t> idx;
    for (Vertex v : t.sources()) idx.push_back(g.index_of(v));
    Scalar m = phi.at(idx);
    for (const auto& p : t.paths) m *= inst.path_weight(p);
    sum += m;
  }
  return sum;
}

/// det N^(k) on the sides as the signed sum over split-trek systems without
/// sided intersection.
template <class Scalar>
Scalar det_by_split_trek_systems(const MixedGraph& g, const ModelInstance<Scalar>& inst,
                                 const std::vector<std::vector<Vertex>>& sides, std::size_t cap = kDefaultCap) {
  detail::require_dag(g);
  detail::validate_sides(g, sides);
  if (sides[0].empty()) return Scalar(1);
  const auto phi = noise_moment_tensor(g, inst, static_cast<int>(sides.size()));
  auto build = [&](const std::vector<Vertex>& sinks) {
    std::vector<detail::WeightedTrek<Scalar>> list;
    for (const auto& t : enumerate_split_treks(g, sinks, cap)) {
      std::vector<std::size_t> idx;
      for (Vertex v : t.sources()) idx.push_back(g.index_of(v));
      Scalar w = phi.at(idx);
      if (is_zero(w)) continue;
      for (const auto& p : t.paths) w *= inst.path_weight(p);
      list.push_back(detail::weigh(g, t.paths, std::move(w)));
    }
    return list;
  };
  detail::TrekCache<Scalar, decltype(build)> cache(build, cap);
  return detail::signed_system_sum<Scalar>(g, sides, cache);
}

struct SplitTrekSystem {
  std::vector<SplitTrek> treks;
  std::vector<std::vector<Vertex>> sides;
  std::vector<std::vector<std::size_t>> permutations;
  int sign = 1;
};

/// Backtracking search for a split-trek system without sided intersection.
/// Rows follow sides[0]; the first system in search order is returned.
inline std::optional<SplitTrekSystem> exists_split_trek_system_no_sided_intersection(
    const MixedGraph& g, const std::vector<std::vector<Vertex>>& sides, std::size_t cap = kDefaultCap) {
  detail::require_dag(g);
  detail::validate_sides(g, sides);
  const std::size_t k = sides.size(), n = sides[0].size();
  const std::size_t from = first_disjoint_side(k);
  SplitTrekSystem sys;
  sys.sides = sides;
  if (n == 0) {
    sys.permutations.assign(k - 1, {});
    return sys;
  }
  std::map<std::vector<Vertex>, std::vector<SplitTrek>> cache;
  auto treks_into = [&](const std::vector<Vertex>& sinks) -> const std::vector<SplitTrek>& {
    auto it = cache.find(sinks);
    if (it == cache.end()) it = cache.emplace(sinks, enumerate_split_treks(g, sinks, cap)).first;
    return it->second;
  };

  std::vector<std::vector<char>> used(k, std::vector<char>(g.size(), 0));
  std::vector<std::vector<char>> taken(k, std::vector<char>(n, 0));
  std::vector<std::vector<std::size_t>> perm(k, std::vector<std::size_t>(n));
  std::vector<Vertex> sinks(k);
  std::vector<SplitTrek> chosen;
  std::size_t steps = 0;

  std::function<bool(std::size_t)> place_row;
  std::function<bool(std::size_t, std::size_t)> choose = [&](std::size_t row, std::size_t s) -> bool {
    if (s == k) {
      // deeper rows overwrite sinks, so rebuild this row's tuple
      sinks[0] = sides[0][row];
      for (std::size_t i = 1; i < k; ++i) sinks[i] = sides[i][perm[i][row]];
      for (const auto& t : treks_into(sinks)) {
        if (++steps > cap) throw BudgetExceeded("split-trek system search", cap);
        bool clash = false;
        for (std::size_t i = from; i < k && !clash; ++i)
          for (Vertex v : t.paths[i])
            if (used[i][g.index_of(v)]) {
              clash = true;
              break;
            }
        if (clash) continue;
        for (std::size_t i = from; i < k; ++i)
          for (Vertex v : t.paths[i]) used[i][g.index_of(v)] = 1;
        chosen.push_back(t);
        if (place_row(row + 1)) return true;
        chosen.pop_back();
        for (std::size_t i = from; i < k; ++i)
          for (Vertex v : t.paths[i]) used[i][g.index_of(v)] = 0;
      }
      return false;
    }
    for (std::size_t c = 0; c < n; ++c) {
      if (taken[s][c]) continue;
      taken[s][c] = 1;
      perm[s][row] = c;
      sinks[s] = sides[s][c];
      if (choose(row, s + 1)) return true;
      taken[s][c] = 0;
    }
    return false;
  };
  place_row = [&](std::size_t row) -> bool {
    if (row == n) return true;
    sinks[0] = sides[0][row];
    return choose(row, 1);
  };
  if (!place_row(0)) return std::nullopt;
  sys.treks = std::move(chosen);
  for (std::size_t s = 1; s < k; ++s) {
    sys.sign *= permutation_sign(perm[s]);
    sys.permutations.push_back(perm[s]);
  }
  return sys;
}

/// Third-order moments: det N^(3) on the sides is nonzero at `inst` exactly
/// when a split-trek system without sided intersection exists. Returns whether
/// the two sides of that equivalence agree.
template <class Scalar>
bool check_moment_theorem_k3(const MixedGraph& g, const ModelInstance<Scalar>& inst,
                             const std::vector<std::vector<Vertex>>& sides, std::size_t cap = kDefaultCap) {
  if (sides.size() != 3) throw InvalidArgument("third-order check needs three sets");
  const bool found = exists_split_trek_system_no_sided_intersection(g, sides, cap).has_value();
  const bool nonzero = !is_zero(hyperdeterminant(moment_subtensor(g, inst, sides)));
  return found == nonzero;
}

// ---------------------------------------------------------------------------
// Scanning the k >= 4 equivalence

struct EnsembleSpec {
  std::size_t max_vertices = 6;
  Rational edge_prob{1, 2};
  std::size_t cases = 100;
  int k = 4;
  std::size_t set_size = 1;
};

struct ScanCase {
  std::size_t index = 0;
  MixedGraph graph;
  std::vector<std::vector<Vertex>> sides;
  Verdict combinatorial = Verdict::Vanishes;
  Verdict algebraic = Verdict::Vanishes;
  std::vector<std::uint64_t> seeds;
  bool rechecked = false;
};

struct LowerOrderViolation {
  std::size_t case_index = 0;
  std::vector<std::size_t> part;  // 0-based side positions of the h-subset
};

struct ConjectureReport {
  int k = 0;
  std::size_t cases_scanned = 0;
  std::size_t agreements = 0;
  std::vector<ScanCase> disagreements;
  std::size_t if_direction_violations = 0;
  std::size_t lower_order_checked = 0;
  std::vector<LowerOrderViolation> lower_order_violations;
};

namespace detail {

inline MixedGraph random_dag(std::mt19937_64& rng, std::size_t vertices, const Rational& edge_prob) {
  std::vector<Vertex> order(vertices);
  for (std::size_t i = 0; i < vertices; ++i) order[i] = static_cast<Vertex>(i + 1);
  std::shuffle(order.begin(), order.end(), rng);
  const auto num = edge_prob.get_num().get_ui(), den = edge_prob.get_den().get_ui();
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < vertices; ++i)
    for (std::size_t j = i + 1; j < vertices; ++j)
      if (rng() % den < num) edges.emplace_back(order[i], order[j]);
  std::vector<Vertex> vs(vertices);
  for (std::size_t i = 0; i < vertices; ++i) vs[i] = static_cast<Vertex>(i + 1);
  return MixedGraph(vs, edges);
}

inline std::vector<Vertex> random_subset(std::mt19937_64& rng, std::size_t vertices, std::size_t size) {
  std::vector<Vertex> all(vertices);
  for (std::size_t i = 0; i < vertices; ++i) all[i] = static_cast<Vertex>(i + 1);
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(size);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace detail

/// Random DAG on 1..p with p uniform in [max(2, set_size), max_vertices] and
/// each forward pair of a random vertex order joined with probability
/// edge_prob, plus k random sides of `set_size` distinct vertices each.
inline std::pair<MixedGraph, std::vector<std::vector<Vertex>>> sample_ensemble_case(const EnsembleSpec& spec,
                                                                                    std::uint64_t case_seed) {
  std::mt19937_64 rng(case_seed);
  const std::size_t lo = std::max<std::size_t>(2, spec.set_size);
  if (spec.max_vertices < lo) throw InvalidArgument("max_vertices below set size");
  const std::size_t p = lo + rng() % (spec.max_vertices - lo + 1);
  auto g = detail::random_dag(rng, p, spec.edge_prob);
  std::vector<std::vector<Vertex>> sides;
  for (int s = 0; s < spec.k; ++s) sides.push_back(detail::random_subset(rng, p, spec.set_size));
  return {std::move(g), std::move(sides)};
}

/// Compares det N^(k) (exact, randomized instances, certain-mode recheck on
/// disagreement) with the split-trek criterion on sampled cases, and checks
/// the lower-order split property whenever the determinant vanishes.
inline ConjectureReport scan_conjecture(const EnsembleSpec& spec, std::uint64_t seed, std::size_t trials = 5,
                                        std::size_t cap = kDefaultCap) {
  if (spec.k < 4) throw InvalidArgument("scan needs k >= 4");
  ConjectureReport rep;
  rep.k = spec.k;
  for (std::size_t c = 0; c < spec.cases; ++c) {
    const std::uint64_t case_seed = derive_seed(seed, c);
    auto [g, sides] = sample_ensemble_case(spec, case_seed);
    ScanCase sc;
    sc.index = c;
    sc.sides = sides;
    sc.combinatorial = exists_split_trek_system_no_sided_intersection(g, sides, cap) ? Verdict::NotVanishes
                                                                                    : Verdict::Vanishes;
    std::vector<ModelInstance<Rational>> insts;
    bool nonzero = false;
    for (std::size_t t = 0; t < trials; ++t) {
      const std::uint64_t s = derive_seed(case_seed, t);
      sc.seeds.push_back(s);
      insts.push_back(sample_generic_instance(g, spec.k, s));
      nonzero = nonzero || !is_zero(hyperdeterminant(moment_subtensor(g, insts.back(), sides)));
    }
    sc.algebraic = nonzero ? Verdict::NotVanishes : Verdict::Vanishes;
    if (sc.algebraic != sc.combinatorial) {
      auto sym = symbolic_instance(g, spec.k);
      sc.rechecked = true;
      sc.algebraic = hyperdeterminant(moment_subtensor(g, sym.instance, sides)).is_zero() ? Verdict::Vanishes
                                                                                          : Verdict::NotVanishes;
    }
    ++rep.cases_scanned;
    if (sc.algebraic == sc.combinatorial) {
      ++rep.agreements;
    } else {
      if (sc.combinatorial == Verdict::Vanishes) ++rep.if_direction_violations;
      sc.graph = g;
      rep.disagreements.push_back(sc);
    }

    if (sc.algebraic == Verdict::Vanishes) {
      ++rep.lower_order_checked;
      const std::size_t k = sides.size();
      auto vanishes = [&](const std::vector<std::size_t>& part) {
        std::vector<std::vector<Vertex>> sub;
        for (std::size_t i : part) sub.push_back(sides[i]);
        for (const auto& inst : insts)
          if (!is_zero(hyperdeterminant(moment_subtensor(g, inst, sub)))) return false;
        return true;
      };
      for (std::size_t h = 2; h + 2 <= k; ++h)
        for_each_combination(k, h, [&](const std::vector<std::size_t>& part) {
          std::vector<std::size_t> rest;
          for (std::size_t i = 0; i < k; ++i)
            if (!std::binary_search(part.begin(), part.end(), i)) rest.push_back(i);
          if (!vanishes(part) && !vanishes(rest)) rep.lower_order_violations.push_back({c, part});
          return true;
        });
    }
  }
  return rep;
}

inline nlohmann::json conjecture_report_to_json(const ConjectureReport& r) {
  nlohmann::json dis = nlohmann::json::array();
  for (const auto& c : r.disagreements) {
    dis.push_back({{"case", c.index},
                   {"graph", graph_to_json(c.graph)},
                   {"sets", c.sides},
                   {"combinatorial", to_string(c.combinatorial)},
                   {"algebraic", to_string(c.algebraic)},
                   {"instance_seeds", c.seeds},
                   {"certain_recheck", c.rechecked}});
  }
  nlohmann::json low = nlohmann::json::array();
  for (const auto& v : r.lower_order_violations) low.push_back({{"case", v.case_index}, {"part", v.part}});
  return {{"k", r.k},
          {"cases_scanned", r.cases_scanned},
          {"agreements", r.agreements},
          {"disagreements", dis},
          {"if_direction_violations", r.if_direction_violations},
          {"lower_order_checked", r.lower_order_checked},
          {"lower_order_violations", low}};
}

inline EnsembleSpec ensemble_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("", "expected an ensemble object");
  EnsembleSpec e;
  try {
    e.max_vertices = j.value("max_vertices", e.max_vertices);
    e.cases = j.value("cases", e.cases);
    e.k = j.value("k", e.k);
    e.set_size = j.value("set_size", e.set_size);
    if (j.contains("edge_prob")) {
      if (!j["edge_prob"].is_string()) throw SchemaError("/edge_prob", "expected \"a/b\"");
      e.edge_prob = parse_rational(j["edge_prob"].get<std::string>());
    }
  } catch (const nlohmann::json::exception& ex) {
    throw SchemaError("", ex.what());
  } catch (const InvalidArgument& ex) {
    throw SchemaError("/edge_prob", ex.what());
  }
  if (e.edge_prob < 0 || e.edge_prob > 1) throw SchemaError("/edge_prob", "must lie in [0, 1]");
  return e;
}

}  // namespace multitrek
