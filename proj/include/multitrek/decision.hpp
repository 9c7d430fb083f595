#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "multitrek/cumulant.hpp"
#include "multitrek/errors.hpp"
#include "multitrek/graph.hpp"
#include "multitrek/tensor.hpp"
#include "multitrek/trek.hpp"

namespace multitrek {

enum class Verdict { Vanishes, NotVanishes };
enum class Mode { Certain, Randomized };

inline const char* to_string(Verdict v) { return v == Verdict::Vanishes ? "Vanishes" : "NotVanishes"; }
inline const char* to_string(Mode m) { return m == Mode::Certain ? "certain" : "randomized"; }

inline Mode parse_mode(const std::string& s) {
  if (s == "certain") return Mode::Certain;
  if (s == "randomized") return Mode::Randomized;
  throw InvalidArgument("mode must be certain or randomized, got '" + s + "'");
}

inline Verdict parse_verdict(const std::string& s) {
  if (s == "Vanishes") return Verdict::Vanishes;
  if (s == "NotVanishes") return Verdict::NotVanishes;
  throw InvalidArgument("unknown verdict '" + s + "'");
}

struct DecisionOptions {
  Mode mode = Mode::Randomized;
  std::uint64_t seed = 0;
  std::size_t trials = 5;
  std::size_t budget = kDefaultCap;
};

/// One algebraic evaluation. Randomized mode: the instance seed and the exact
/// determinant. Certain mode: no seed and the determinant as a polynomial.
struct AlgebraicRecord {
  std::optional<std::uint64_t> seed;
  std::string value;
  bool zero = true;
};

struct Decision {
  Verdict verdict = Verdict::Vanishes;
  Mode mode = Mode::Randomized;
  int order = 0;
  std::vector<std::vector<Vertex>> sides;
  std::optional<TrekSystem> system;
  std::vector<ObstructionEntry> obstructions;
  std::vector<AlgebraicRecord> records;
  std::uint64_t seed = 0;
  std::size_t trials = 0;
  std::string graph_hash;
};

namespace detail {

inline std::vector<AlgebraicRecord> evaluate_determinants(const MixedGraph& g,
                                                          const std::vector<std::vector<Vertex>>& sides,
                                                          const DecisionOptions& opt) {
  const int k = static_cast<int>(sides.size());
  std::vector<AlgebraicRecord> out;
  if (opt.mode == Mode::Certain) {
    auto sym = symbolic_instance(g, k);
    Polynomial det = hyperdeterminant(cumulant_subtensor(g, sym.instance, sides));
    out.push_back({std::nullopt, sym.render(det), det.is_zero()});
    return out;
  }
  for (std::size_t t = 0; t < opt.trials; ++t) {
    const std::uint64_t s = derive_seed(opt.seed, t);
    auto inst = sample_generic_instance(g, k, s);
    Rational det = hyperdeterminant(cumulant_subtensor(g, inst, sides));
    out.push_back({s, to_string(det), is_zero(det)});
  }
  return out;
}

}  // namespace detail

/// Decides whether det C^(k) restricted to the sides vanishes on the whole
/// model. Runs the trek-system search and the exact algebraic evaluation and
/// throws InternalInconsistency if they disagree.
inline Decision decide_vanishing(const MixedGraph& g, const std::vector<std::vector<Vertex>>& sides, int k,
                                 const DecisionOptions& opt = {}) {
  if (k != static_cast<int>(sides.size()))
    throw InvalidArgument("order " + std::to_string(k) + " does not match " + std::to_string(sides.size()) +
                          " sets");
  if (opt.mode == Mode::Randomized && opt.trials == 0) throw InvalidArgument("trials must be positive");
  auto search = exists_trek_system_no_sided_intersection(g, sides, opt.budget);

  Decision d;
  d.mode = opt.mode;
  d.order = k;
  d.sides = sides;
  d.seed = opt.seed;
  d.trials = opt.mode == Mode::Randomized ? opt.trials : 0;
  d.graph_hash = graph_hash(g);
  d.records = detail::evaluate_determinants(g, sides, opt);

  const bool algebraic_nonzero =
      std::any_of(d.records.begin(), d.records.end(), [](const AlgebraicRecord& r) { return !r.zero; });
  if (algebraic_nonzero != search.found())
    throw InternalInconsistency(std::string("trek search ") + (search.found() ? "found" : "found no") +
                                " system but the determinant is " + (algebraic_nonzero ? "nonzero" : "zero"));
  d.verdict = search.found() ? Verdict::NotVanishes : Verdict::Vanishes;
  d.system = std::move(search.system);
  d.obstructions = std::move(search.obstructions);
  return d;
}

/// Singleton sides {i_1}, ..., {i_k}: does the joint cumulant of these
/// variables vanish on the whole model?
inline Decision detect_common_cause(const MixedGraph& g, const std::vector<Vertex>& tuple,
                                    const DecisionOptions& opt = {}) {
  std::vector<std::vector<Vertex>> sides;
  for (Vertex v : tuple) sides.push_back({v});
  return decide_vanishing(g, sides, static_cast<int>(tuple.size()), opt);
}

/// Tensor input: the verdict is read off the given cumulant entry itself.
struct EntryCheck {
  Verdict verdict;
  Rational value;
};

inline EntryCheck detect_common_cause(const Tensor<Rational>& cumulant, const std::vector<std::size_t>& position) {
  const Rational& v = cumulant.at(position);
  return {is_zero(v) ? Verdict::Vanishes : Verdict::NotVanishes, v};
}

// ---------------------------------------------------------------------------
// JSON

inline nlohmann::json decision_to_json(const Decision& d) {
  nlohmann::json j;
  j["verdict"] = to_string(d.verdict);
  j["mode"] = to_string(d.mode);
  j["order"] = d.order;
  j["sets"] = d.sides;
  if (d.system)
    j["certificate"] = {{"kind", "trek_system"}, {"trek_system", trek_system_to_json(*d.system)}};
  else
    j["certificate"] = {{"kind", "obstruction_log"}, {"obstruction_log", obstructions_to_json(d.obstructions)}};
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : d.records) {
    nlohmann::json e;
    e["seed"] = r.seed ? nlohmann::json(*r.seed) : nlohmann::json(nullptr);
    e["value"] = r.value;
    records.push_back(std::move(e));
  }
  j["algebraic_record"] = std::move(records);
  j["seed"] = d.seed;
  j["trials"] = d.trials;
  j["range_bound"] = kRangeBound;
  j["graph_hash"] = d.graph_hash;
  return j;
}

inline Decision decision_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("", "expected a decision object");
  for (const char* key : {"verdict", "mode", "order", "sets", "certificate", "algebraic_record", "graph_hash"})
    if (!j.contains(key)) throw SchemaError(std::string("/") + key, "missing field");
  Decision d;
  try {
    d.verdict = parse_verdict(j["verdict"].get<std::string>());
    d.mode = parse_mode(j["mode"].get<std::string>());
    d.order = j["order"].get<int>();
    d.sides = j["sets"].get<std::vector<std::vector<Vertex>>>();
    d.graph_hash = j["graph_hash"].get<std::string>();
    d.seed = j.value("seed", std::uint64_t{0});
    d.trials = j.value("trials", std::size_t{0});
    const auto& cert = j["certificate"];
    const std::string kind = cert.at("kind").get<std::string>();
    if (kind == "trek_system")
      d.system = trek_system_from_json(cert.at("trek_system"), "/certificate/trek_system");
    else if (kind == "obstruction_log")
      d.obstructions = obstructions_from_json(cert.at("obstruction_log"), "/certificate/obstruction_log");
    else
      throw SchemaError("/certificate/kind", "unknown certificate kind");
    for (const auto& r : j["algebraic_record"]) {
      AlgebraicRecord rec;
      if (!r.at("seed").is_null()) rec.seed = r.at("seed").get<std::uint64_t>();
      rec.value = r.at("value").get<std::string>();
      rec.zero = rec.value == "0" || rec.value == "0/1";
      d.records.push_back(std::move(rec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("", e.what());
  } catch (const InvalidArgument& e) {
    throw SchemaError("", e.what());
  }
  return d;
}

// ---------------------------------------------------------------------------
// Certificate checking

struct CertifyResult {
  bool valid = true;
  std::vector<std::string> problems;

  void fail(std::string why) {
    valid = false;
    problems.push_back(std::move(why));
  }
};

namespace detail {

inline void check_trek_system(const MixedGraph& g, const TrekSystem& sys, const std::vector<std::vector<Vertex>>& sides,
                              CertifyResult& res) {
  const std::size_t k = sides.size(), n = sides[0].size();
  if (sys.sides != sides) res.fail("certificate sides differ from the query");
  if (sys.treks.size() != n) return res.fail("certificate has the wrong number of treks");
  if (sys.permutations.size() + 1 != k) return res.fail("certificate needs one permutation per side after the first");

  const auto cd = canonical_dag(g);
  std::vector<KTrek> lifted;
  for (std::size_t j = 0; j < n; ++j) {
    const KTrek& t = sys.treks[j];
    const std::string where = "trek " + std::to_string(j);
    if (t.paths.size() != k) return res.fail(where + " has the wrong number of paths");
    if (t.top.is_hyperedge()) {
      auto it = cd.latent_map.find(*t.top.hyperedge);
      if (it == cd.latent_map.end()) return res.fail(where + " tops at a hyperedge not in the graph");
      if (it->second != t.top.vertex) return res.fail(where + " names the wrong latent");
    } else if (!g.contains(t.top.vertex)) {
      return res.fail(where + " tops at an unknown vertex");
    }
    KTrek l = lift_to_canonical(t);
    for (std::size_t s = 0; s < k; ++s) {
      const Path& p = l.paths[s];
      if (!is_path_in(cd.dag, p)) return res.fail(where + " side " + std::to_string(s + 1) + " is not a path");
      if (p.front() != t.top.vertex) return res.fail(where + " side " + std::to_string(s + 1) + " leaves the top");
    }
    if (l.paths[0].back() != sides[0][j]) res.fail(where + " does not end at its side-1 vertex");
    lifted.push_back(std::move(l));
  }
  int sign = 1;
  for (std::size_t s = 1; s < k; ++s) {
    const auto& perm = sys.permutations[s - 1];
    std::vector<std::size_t> sorted = perm;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i)
      if (sorted[i] != i) return res.fail("permutation " + std::to_string(s) + " is not a permutation");
    if (perm.size() != n) return res.fail("permutation " + std::to_string(s) + " has the wrong length");
    for (std::size_t j = 0; j < n; ++j)
      if (lifted[j].paths[s].back() != sides[s][perm[j]])
        res.fail("trek " + std::to_string(j) + " side " + std::to_string(s + 1) + " end disagrees with permutation");
    sign *= permutation_sign(perm);
  }
  if (sign != sys.sign) res.fail("stored sign does not match the permutations");
  if (auto w = find_sided_intersection(lifted, first_disjoint_side(k)))
    res.fail("treks " + std::to_string(w->trek_a) + " and " + std::to_string(w->trek_b) + " meet at vertex " +
             std::to_string(w->shared_vertex) + " on side " + std::to_string(w->side));
}

inline void check_obstructions(const MixedGraph& g, const std::vector<ObstructionEntry>& log,
                               const std::vector<std::vector<Vertex>>& sides, std::size_t budget,
                               CertifyResult& res) {
  const std::size_t n = sides[0].size();
  if (n == 0) return res.fail("an empty query cannot vanish");
  std::optional<CanonicalDagResult> cd;
  if (!g.is_dag()) cd = canonical_dag(g);
  const MixedGraph& work = cd ? cd->dag : g;
  const auto cand = candidate_tops(work, sides);
  if (binomial_capped(cand.size(), n, budget) > budget) throw BudgetExceeded("candidate top sets", budget);
  std::size_t at = 0;
  for_each_combination(cand.size(), n, [&](const std::vector<std::size_t>& pick) {
    std::vector<Vertex> tops;
    for (std::size_t i : pick) tops.push_back(cand[i]);
    if (at >= log.size() || log[at].top != tops) {
      res.fail("obstruction log misses top set starting at " + std::to_string(tops.front()));
      return false;
    }
    const std::size_t side = log[at].blocked_side;
    if (side == 0 || side > sides.size())
      res.fail("obstruction entry " + std::to_string(at) + " names no side");
    else if (side - 1 < first_disjoint_side(sides.size()) ? exists_path_matching(work, tops, sides[side - 1])
                                                          : exists_disjoint_path_system(work, tops, sides[side - 1]))
      res.fail("obstruction entry " + std::to_string(at) + " is not blocked on side " + std::to_string(side));
    ++at;
    return true;
  });
  if (res.valid && at != log.size()) res.fail("obstruction log has extra entries");
}

}  // namespace detail

/// Re-verifies a decision against the graph: hash, certificate and every
/// algebraic record.
inline CertifyResult certify(const Decision& d, const MixedGraph& g, std::size_t budget = kDefaultCap) {
  CertifyResult res;
  if (d.graph_hash != graph_hash(g)) res.fail("graph hash differs from the decision");
  try {
    detail::validate_sides(g, d.sides);
  } catch (const InvalidArgument& e) {
    res.fail(std::string("sets invalid: ") + e.what());
    return res;
  }
  if (d.order != static_cast<int>(d.sides.size())) res.fail("order does not match the number of sets");

  if (d.verdict == Verdict::NotVanishes) {
    if (!d.system) res.fail("NotVanishes needs a trek system");
    else detail::check_trek_system(g, *d.system, d.sides, res);
  } else {
    if (d.system) res.fail("Vanishes must not carry a trek system");
    detail::check_obstructions(g, d.obstructions, d.sides, budget, res);
  }

  if (d.records.empty()) res.fail("no algebraic record");
  if (d.mode == Mode::Randomized && d.records.size() != d.trials) res.fail("record count differs from trials");
  DecisionOptions opt{d.mode, d.seed, d.trials, budget};
  auto expected = detail::evaluate_determinants(g, d.sides, opt);
  if (expected.size() != d.records.size()) {
    res.fail("algebraic record has the wrong length");
  } else {
    for (std::size_t i = 0; i < expected.size(); ++i)
      if (expected[i].seed != d.records[i].seed || expected[i].value != d.records[i].value)
        res.fail("algebraic record " + std::to_string(i) + " does not reproduce");
  }
  const bool any_nonzero =
      std::any_of(d.records.begin(), d.records.end(), [](const AlgebraicRecord& r) { return !r.zero; });
  if (any_nonzero != (d.verdict == Verdict::NotVanishes)) res.fail("verdict contradicts the algebraic record");
  return res;
}

}  // namespace multitrek
