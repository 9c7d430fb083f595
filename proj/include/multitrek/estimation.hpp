#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "multitrek/cumulant.hpp"
#include "multitrek/errors.hpp"
#include "multitrek/graph.hpp"
#include "multitrek/tensor.hpp"

namespace multitrek {

/// A centred noise law. `scale` is the half-width (uniform), the scale
/// (exponential, laplace) or the scale theta (gamma, with shape `shape`).
/// scale == 0 gives the constant 0.
struct NoiseLaw {
  enum class Kind { Uniform, Exponential, Laplace, Gamma };
  Kind kind = Kind::Exponential;
  double scale = 1.0;
  double shape = 1.0;
};

inline const char* to_string(NoiseLaw::Kind k) {
  switch (k) {
    case NoiseLaw::Kind::Uniform: return "uniform";
    case NoiseLaw::Kind::Exponential: return "exponential";
    case NoiseLaw::Kind::Laplace: return "laplace";
    case NoiseLaw::Kind::Gamma: return "gamma";
  }
  return "?";
}

/// Exact cumulant of order k (k >= 2) of a centred law.
inline double noise_cumulant(const NoiseLaw& law, int k) {
  if (k < 2) return 0.0;
  const double s = law.scale;
  double fact = 1.0;  // (k-1)!
  for (int i = 2; i < k; ++i) fact *= i;
  switch (law.kind) {
    case NoiseLaw::Kind::Uniform: {
      if (k % 2) return 0.0;
      // kappa_{2m} = B_{2m} (2a)^{2m} / (2m) with Bernoulli numbers.
      static const double bernoulli[] = {1.0, 1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30};
      const int m = k / 2;
      if (m >= 5) throw OrderUnsupported(k);
      return bernoulli[m] * std::pow(2 * s, k) / k;
    }
    case NoiseLaw::Kind::Exponential: return fact * std::pow(s, k);
    case NoiseLaw::Kind::Laplace: return k % 2 ? 0.0 : 2.0 * fact * std::pow(s, k);
    case NoiseLaw::Kind::Gamma: return law.shape * fact * std::pow(s, k);
  }
  return 0.0;
}

inline double draw(const NoiseLaw& law, std::mt19937_64& rng) {
  if (law.scale == 0.0) return 0.0;
  switch (law.kind) {
    case NoiseLaw::Kind::Uniform: return std::uniform_real_distribution<double>(-law.scale, law.scale)(rng);
    case NoiseLaw::Kind::Exponential:
      return std::exponential_distribution<double>(1.0 / law.scale)(rng) - law.scale;
    case NoiseLaw::Kind::Laplace: {
      std::exponential_distribution<double> e(1.0 / law.scale);
      const double a = e(rng);
      return a - e(rng);
    }
    case NoiseLaw::Kind::Gamma:
      return std::gamma_distribution<double>(law.shape, law.scale)(rng) - law.shape * law.scale;
  }
  return 0.0;
}

/// Per-vertex noise; vertices without an entry use `fallback`.
struct NoiseSpec {
  std::map<Vertex, NoiseLaw> laws;
  NoiseLaw fallback;

  const NoiseLaw& of(Vertex v) const {
    auto it = laws.find(v);
    return it == laws.end() ? fallback : it->second;
  }
};

/// n x p samples, row-major; column j belongs to vertices[j].
struct SampleMatrix {
  std::size_t rows = 0;
  std::vector<Vertex> vertices;
  std::vector<double> values;

  std::size_t cols() const noexcept { return vertices.size(); }
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
  double& operator()(std::size_t r, std::size_t c) { return values[r * cols() + c]; }

  std::size_t column_of(Vertex v) const {
    auto it = std::find(vertices.begin(), vertices.end(), v);
    if (it == vertices.end()) throw InvalidArgument("no column for vertex " + std::to_string(v));
    return static_cast<std::size_t>(it - vertices.begin());
  }
};

/// Draws X = (I - Lambda)^{-T} eps row by row. Mixed graphs are simulated on
/// canonical_dag with latent columns dropped; latent edges missing from
/// `lambda` get weight 1. Per row, noise is drawn for the vertices in
/// ascending id order from one stream seeded by `seed`.
inline SampleMatrix simulate_lsem(const MixedGraph& g, const std::map<Edge, double>& lambda, const NoiseSpec& noise,
                                  std::size_t n, std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("need at least one sample");
  std::optional<CanonicalDagResult> cd;
  if (!g.is_dag()) cd = canonical_dag(g);
  const MixedGraph& work = cd ? cd->dag : g;
  for (const auto& [e, w] : lambda)
    if (!g.contains(e.first) || !g.contains(e.second) || !g.has_edge(e.first, e.second))
      throw InvalidArgument("lambda on non-edge " + edge_key(e));

  const std::size_t p = work.size();
  std::vector<std::vector<std::pair<std::size_t, double>>> in(p);
  for (const auto& [u, v] : work.directed_edges()) {
    double w = cd && cd->is_latent(u) ? 1.0 : 0.0;
    if (auto it = lambda.find({u, v}); it != lambda.end()) w = it->second;
    in[work.index_of(v)].emplace_back(work.index_of(u), w);
  }
  std::vector<std::size_t> topo;
  for (Vertex v : work.topological_order()) topo.push_back(work.index_of(v));

  SampleMatrix out;
  out.rows = n;
  out.vertices = g.vertices();
  out.values.resize(n * g.size());
  std::vector<std::size_t> keep;
  for (Vertex v : g.vertices()) keep.push_back(work.index_of(v));

  std::mt19937_64 rng(seed);
  std::vector<double> x(p);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t i = 0; i < p; ++i) x[i] = draw(noise.of(work.vertices()[i]), rng);
    for (std::size_t i : topo)
      for (const auto& [u, w] : in[i]) x[i] += w * x[u];
    for (std::size_t j = 0; j < keep.size(); ++j) out(r, j) = x[keep[j]];
  }
  return out;
}

/// Population instance matching a simulation: edge weights as given and
/// per-vertex cumulants of the noise laws for orders 2..k_max. Latent sources
/// of mixed graphs are folded into hyper noise as in the simulation.
inline ModelInstance<double> population_instance(const MixedGraph& g, const std::map<Edge, double>& lambda,
                                                 const NoiseSpec& noise, int k_max) {
  std::optional<CanonicalDagResult> cd;
  if (!g.is_dag()) cd = canonical_dag(g);
  const MixedGraph& work = cd ? cd->dag : g;
  ModelInstance<double> full;
  for (const auto& e : work.directed_edges()) {
    double w = cd && cd->is_latent(e.first) ? 1.0 : 0.0;
    if (auto it = lambda.find(e); it != lambda.end()) w = it->second;
    full.lambda[e] = w;
  }
  for (int k = 2; k <= k_max; ++k)
    for (Vertex v : work.vertices()) full.noise[k].diag[v] = noise_cumulant(noise.of(v), k);
  return cd ? detail::project_canonical(*cd, full) : full;
}

namespace detail {

/// Plug-in cumulant (denominator n) at column tuple `cols` over the rows in
/// `rows` (all rows if empty), after centring by the mean of those rows.
class CumulantEstimator {
 public:
  CumulantEstimator(const SampleMatrix& data, const std::vector<std::size_t>& rows) : data_(data), rows_(rows) {
    const std::size_t n = count();
    means_.assign(data.cols(), 0.0);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < data.cols(); ++c) means_[c] += data(row(r), c);
    for (double& m : means_) m /= static_cast<double>(n);
  }

  double moment(std::vector<std::size_t> cols) {
    std::sort(cols.begin(), cols.end());
    auto it = cache_.find(cols);
    if (it != cache_.end()) return it->second;
    const std::size_t n = count();
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
      double prod = 1.0;
      for (std::size_t c : cols) prod *= data_(row(r), c) - means_[c];
      sum += prod;
    }
    return cache_[cols] = sum / static_cast<double>(n);
  }

  double cumulant(const std::vector<std::size_t>& c) {
    switch (c.size()) {
      case 2: return moment(c);
      case 3: return moment(c);
      case 4:
        return moment(c) - moment({c[0], c[1]}) * moment({c[2], c[3]}) - moment({c[0], c[2]}) * moment({c[1], c[3]}) -
               moment({c[0], c[3]}) * moment({c[1], c[2]});
      default: throw OrderUnsupported(static_cast<int>(c.size()));
    }
  }

 private:
  std::size_t count() const { return rows_.empty() ? data_.rows : rows_.size(); }
  std::size_t row(std::size_t r) const { return rows_.empty() ? r : rows_[r]; }

  const SampleMatrix& data_;
  const std::vector<std::size_t>& rows_;
  std::vector<double> means_;
  std::map<std::vector<std::size_t>, double> cache_;
};

inline void require_supported_order(int k) {
  if (k < 2 || k > 4) throw OrderUnsupported(k);
}

}  // namespace detail

/// Order-k sample cumulant tensor (k in 2..4), modes following data.vertices.
/// Each sorted multi-index is estimated once and copied to its permutations,
/// so the result is exactly symmetric.
inline Tensor<double> sample_cumulant(const SampleMatrix& data, int k) {
  detail::require_supported_order(k);
  if (data.rows == 0) throw InvalidArgument("no samples");
  const std::vector<std::size_t> all_rows;
  detail::CumulantEstimator est(data, all_rows);
  auto t = Tensor<double>::cubical(static_cast<std::size_t>(k), data.cols());
  std::vector<std::size_t> cols(data.cols());
  for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = i;
  std::vector<Vertex> ids(cols.begin(), cols.end());
  for (const auto& m : multisets_of(ids, static_cast<std::size_t>(k))) {
    std::vector<std::size_t> idx(m.begin(), m.end());
    const double v = est.cumulant(idx);
    do t.at(idx) = v;
    while (std::next_permutation(idx.begin(), idx.end()));
  }
  return t;
}

struct ZeroTestResult {
  double statistic = 0.0;
  double bootstrap_sd = 0.0;
  bool flag = false;  // |statistic| <= 2 * bootstrap_sd
};

namespace detail {

inline double determinant_statistic(const SampleMatrix& data, const std::vector<std::vector<std::size_t>>& cols,
                                    const std::vector<std::size_t>& rows) {
  CumulantEstimator est(data, rows);
  std::vector<std::size_t> dims;
  for (const auto& c : cols) dims.push_back(c.size());
  Tensor<double> sub(dims);
  std::size_t off = 0;
  std::vector<std::size_t> idx(cols.size());
  sub.for_each([&](const auto& pos, const double&) {
    for (std::size_t s = 0; s < cols.size(); ++s) idx[s] = cols[s][pos[s]];
    sub.data()[off++] = est.cumulant(idx);
  });
  return hyperdeterminant(sub);
}

}  // namespace detail

/// Heuristic check of det C^(k)_{S_1..S_k} = 0 from data: the plug-in
/// determinant and its nonparametric bootstrap standard deviation. The flag
/// |stat| <= 2 sd carries no coverage guarantee. Replicate r resamples rows
/// with a stream seeded by derive_seed(seed, r).
inline ZeroTestResult test_determinant_zero(const SampleMatrix& data, const std::vector<std::vector<Vertex>>& sides,
                                            int k, std::size_t n_boot, std::uint64_t seed) {
  detail::require_supported_order(k);
  if (static_cast<int>(sides.size()) != k) throw InvalidArgument("order does not match the number of sets");
  if (n_boot == 0) throw InvalidBootstrapCount();
  if (data.rows == 0) throw InvalidArgument("no samples");
  std::vector<std::vector<std::size_t>> cols;
  for (const auto& side : sides) {
    if (side.size() != sides[0].size()) throw InvalidArgument("sides must have equal size");
    std::vector<std::size_t> c;
    for (Vertex v : side) c.push_back(data.column_of(v));
    cols.push_back(std::move(c));
  }
  ZeroTestResult res;
  res.statistic = detail::determinant_statistic(data, cols, {});

  std::vector<double> reps;
  std::vector<std::size_t> rows(data.rows);
  for (std::size_t b = 0; b < n_boot; ++b) {
    std::mt19937_64 rng(derive_seed(seed, b));
    std::uniform_int_distribution<std::size_t> pick(0, data.rows - 1);
    for (auto& r : rows) r = pick(rng);
    reps.push_back(detail::determinant_statistic(data, cols, rows));
  }
  double mean = 0.0;
  for (double r : reps) mean += r;
  mean /= static_cast<double>(reps.size());
  double ss = 0.0;
  for (double r : reps) ss += (r - mean) * (r - mean);
  res.bootstrap_sd = reps.size() > 1 ? std::sqrt(ss / static_cast<double>(reps.size() - 1)) : 0.0;
  res.flag = std::abs(res.statistic) <= 2.0 * res.bootstrap_sd;
  return res;
}

// ---------------------------------------------------------------------------
// I/O

inline void write_csv(const SampleMatrix& m, std::ostream& out) {
  for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? "," : "") << m.vertices[c];
  out << "\n";
  std::ostringstream cell;
  cell.precision(17);
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      cell.str("");
      cell << m(r, c);
      out << (c ? "," : "") << cell.str();
    }
    out << "\n";
  }
}

inline SampleMatrix read_csv(std::istream& in) {
  SampleMatrix m;
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("", "empty CSV");
  std::stringstream header(line);
  std::string cell;
  while (std::getline(header, cell, ',')) {
    try {
      std::size_t used = 0;
      m.vertices.push_back(std::stoi(cell, &used));
      if (used != cell.size() && cell.substr(used) != "\r") throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw SchemaError("/header", "column name '" + cell + "' is not a vertex id");
    }
  }
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream row(line);
    std::size_t c = 0;
    while (std::getline(row, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || !std::isfinite(v))
        throw SchemaError("/row/" + std::to_string(m.rows), "bad number '" + cell + "'");
      m.values.push_back(v);
      ++c;
    }
    if (c != m.cols()) throw SchemaError("/row/" + std::to_string(m.rows), "wrong number of columns");
    ++m.rows;
  }
  return m;
}

/// Binary layout: "MTRK", u32 rows, u32 cols, 4 zero bytes, then rows*cols
/// little-endian float64 values, row-major. The column order is implied to be
/// ascending vertex ids 0..cols-1 unless the caller supplies ids.
inline void write_binary(const SampleMatrix& m, std::ostream& out) {
  auto put32 = [&](std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
  };
  out.write("MTRK", 4);
  put32(static_cast<std::uint32_t>(m.rows));
  put32(static_cast<std::uint32_t>(m.cols()));
  put32(0);
  for (double v : m.values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
  }
}

inline SampleMatrix read_binary(std::istream& in, std::vector<Vertex> vertices = {}) {
  unsigned char head[16];
  if (!in.read(reinterpret_cast<char*>(head), 16) || std::memcmp(head, "MTRK", 4) != 0)
    throw SchemaError("", "not an MTRK file");
  auto get32 = [&](int at) {
    return static_cast<std::uint32_t>(head[at]) | static_cast<std::uint32_t>(head[at + 1]) << 8 |
           static_cast<std::uint32_t>(head[at + 2]) << 16 | static_cast<std::uint32_t>(head[at + 3]) << 24;
  };
  SampleMatrix m;
  m.rows = get32(4);
  const std::size_t cols = get32(8);
  if (vertices.empty())
    for (std::size_t c = 0; c < cols; ++c) vertices.push_back(static_cast<Vertex>(c));
  if (vertices.size() != cols) throw SchemaError("", "column ids do not match the column count");
  m.vertices = std::move(vertices);
  m.values.resize(m.rows * cols);
  for (double& v : m.values) {
    unsigned char b[8];
    if (!in.read(reinterpret_cast<char*>(b), 8)) throw SchemaError("", "truncated MTRK payload");
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    std::memcpy(&v, &bits, 8);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Simulation spec JSON:
// {"lambda":{"1->2":0.8}, "noise":{"default":{"law":"exponential","scale":1},
//  "2":{"law":"laplace","scale":0.5}}, "samples":100000}

inline NoiseLaw noise_law_from_json(const nlohmann::json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("law")) throw SchemaError(path, "expected {\"law\":...}");
  NoiseLaw law;
  const std::string name = j["law"].get<std::string>();
  if (name == "uniform") law.kind = NoiseLaw::Kind::Uniform;
  else if (name == "exponential") law.kind = NoiseLaw::Kind::Exponential;
  else if (name == "laplace") law.kind = NoiseLaw::Kind::Laplace;
  else if (name == "gamma") law.kind = NoiseLaw::Kind::Gamma;
  else throw SchemaError(path + "/law", "unknown law '" + name + "'");
  law.scale = j.value("scale", 1.0);
  law.shape = j.value("shape", 1.0);
  if (law.scale < 0 || law.shape <= 0) throw SchemaError(path, "scale must be >= 0 and shape > 0");
  return law;
}

struct SimulationSpec {
  std::map<Edge, double> lambda;
  NoiseSpec noise;
  std::size_t samples = 1000;
};

inline SimulationSpec simulation_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw SchemaError("", "expected a simulation spec object");
  SimulationSpec s;
  try {
    if (j.contains("lambda"))
      for (const auto& [key, val] : j["lambda"].items()) {
        auto arrow = key.find("->");
        if (arrow == std::string::npos) throw SchemaError("/lambda/" + key, "expected key \"u->v\"");
        s.lambda[{std::stoi(key.substr(0, arrow)), std::stoi(key.substr(arrow + 2))}] = val.get<double>();
      }
    if (j.contains("noise"))
      for (const auto& [key, val] : j["noise"].items()) {
        if (key == "default")
          s.noise.fallback = noise_law_from_json(val, "/noise/default");
        else
          s.noise.laws[std::stoi(key)] = noise_law_from_json(val, "/noise/" + key);
      }
    s.samples = j.value("samples", s.samples);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("", e.what());
  } catch (const std::invalid_argument&) {
    throw SchemaError("", "bad vertex id in simulation spec");
  }
  return s;
}

}  // namespace multitrek
