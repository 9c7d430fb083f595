#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "multitrek/cumulant.hpp"
#include "multitrek/decision.hpp"
#include "multitrek/estimation.hpp"
#include "multitrek/graph.hpp"
#include "multitrek/moments.hpp"

namespace multitrek::cli {

inline constexpr int kExitNotVanishes = 0;
inline constexpr int kExitVanishes = 10;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitError = 2;

/// stderr logger; MULTITREK_LOG=info or debug turns it on.
class Log {
 public:
  explicit Log(std::ostream& err) : err_(err) {
    if (const char* env = std::getenv("MULTITREK_LOG")) {
      const std::string v = env;
      if (v == "debug") level_ = 2;
      else if (v == "info") level_ = 1;
    }
  }
  void info(const std::string& msg) const {
    if (level_ >= 1) err_ << "[info] " << msg << "\n";
  }
  void debug(const std::string& msg) const {
    if (level_ >= 2) err_ << "[debug] " << msg << "\n";
  }
  void error(const std::string& msg) const { err_ << "[error] " << msg << "\n"; }

 private:
  std::ostream& err_;
  int level_ = 0;
};

/// "4,6;5,8;7,8" -> {{4,6},{5,8},{7,8}}.
inline std::vector<std::vector<Vertex>> parse_sets(const std::string& text) {
  std::vector<std::vector<Vertex>> sides;
  std::stringstream all(text);
  std::string side;
  while (std::getline(all, side, ';')) {
    std::vector<Vertex> vs;
    std::stringstream one(side);
    std::string item;
    while (std::getline(one, item, ',')) {
      item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
      if (item.empty()) continue;
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != item.size()) throw InvalidArgument("bad vertex '" + item + "' in --sets");
      vs.push_back(v);
    }
    sides.push_back(std::move(vs));
  }
  if (!text.empty() && text.back() == ';') sides.emplace_back();
  if (sides.empty()) throw InvalidArgument("--sets is empty");
  return sides;
}

inline std::vector<Vertex> parse_tuple(const std::string& text) {
  auto sides = parse_sets(text);
  if (sides.size() != 1) throw InvalidArgument("--tuple takes comma-separated vertices");
  return sides[0];
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline nlohmann::json read_json_file(const std::string& path) {
  try {
    return nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError("", "invalid JSON in '" + path + "': " + e.what());
  }
}

inline MixedGraph load_graph(const std::string& path) { return parse_graph(read_file(path)); }

struct Emit {
  std::ostream& out;
  std::string file;

  void operator()(const nlohmann::json& j) const {
    const std::string text = j.dump();
    out << text << "\n";
    if (!file.empty()) {
      std::ofstream f(file, std::ios::binary);
      if (!f) throw InvalidArgument("cannot write '" + file + "'");
      f << text << "\n";
    }
  }
};

/// Runs one command. args excludes the program name. JSON goes to `out`,
/// logs to `err`. Returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Log log(err);
  CLI::App app{"Multi-trek criteria for vanishing cumulant and moment determinants", "multitrek"};
  app.require_subcommand(1);

  std::string graph_path, sets_text, mode_text = "randomized", out_path, tuple_text, tensor_path;
  std::string instance_path, kind = "cumulant", spec_path, data_path, ensemble_path, decision_path;
  std::optional<int> order;
  std::optional<std::uint64_t> seed;
  std::size_t trials = 5, budget = kDefaultCap, boot = 200;
  std::optional<std::size_t> samples;

  auto add_decision_flags = [&](CLI::App* sub) {
    sub->add_option("--mode", mode_text, "certain or randomized")->check(CLI::IsMember({"certain", "randomized"}));
    sub->add_option("--seed", seed, "master seed (required in randomized mode)");
    sub->add_option("--trials", trials, "random instances in randomized mode");
    sub->add_option("--budget", budget, "enumeration cap");
    sub->add_option("--out", out_path, "also write the JSON here");
  };

  auto* check = app.add_subcommand("check", "decide whether a determinant vanishes on the model");
  check->add_option("--graph", graph_path)->required();
  check->add_option("--sets", sets_text, "sides, e.g. \"4,6;5,8;7,8\"")->required();
  check->add_option("--order", order);
  add_decision_flags(check);

  auto* common = app.add_subcommand("common-cause", "does the joint cumulant of a vertex tuple vanish");
  common->add_option("--graph", graph_path);
  common->add_option("--tensor", tensor_path, "rational cumulant tensor instead of a graph");
  common->add_option("--tuple", tuple_text, "vertices (graph) or 0-based positions (tensor)")->required();
  add_decision_flags(common);

  auto* param = app.add_subcommand("parametrize", "emit a cumulant or moment tensor of the model");
  param->add_option("--graph", graph_path)->required();
  param->add_option("--order", order)->required();
  param->add_option("--instance", instance_path, "instance JSON; otherwise one is sampled");
  param->add_option("--seed", seed);
  param->add_option("--kind", kind)->check(CLI::IsMember({"cumulant", "moment"}));
  param->add_option("--out", out_path);

  auto* sim = app.add_subcommand("simulate", "draw samples from the structural equations");
  sim->add_option("--graph", graph_path)->required();
  sim->add_option("--spec", spec_path, "simulation spec JSON");
  sim->add_option("--samples", samples);
  sim->add_option("--seed", seed)->required();
  sim->add_option("--out", out_path, "CSV, or binary when ending in .bin")->required();

  auto* est = app.add_subcommand("estimate", "bootstrap check of a determinant from data");
  est->add_option("--data", data_path)->required();
  est->add_option("--graph", graph_path, "names the columns of a binary file");
  est->add_option("--sets", sets_text)->required();
  est->add_option("--order", order);
  est->add_option("--boot", boot);
  est->add_option("--seed", seed)->required();
  est->add_option("--out", out_path);

  auto* scan = app.add_subcommand("scan-conjecture", "compare moment determinants with split-trek systems");
  scan->add_option("--ensemble", ensemble_path);
  scan->add_option("--seed", seed)->required();
  scan->add_option("--trials", trials);
  scan->add_option("--budget", budget);
  scan->add_option("--out", out_path);

  auto* cert = app.add_subcommand("certify", "re-verify a decision");
  cert->add_option("--decision", decision_path)->required();
  cert->add_option("--graph", graph_path)->required();
  cert->add_option("--budget", budget);

  auto fail = [&](const std::string& msg) {
    log.error(msg);
    out << nlohmann::json{{"error", msg}}.dump() << "\n";
    return kExitError;
  };

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    return fail(e.what());
  }

  const Emit emit{out, out_path};
  auto decision_options = [&]() {
    DecisionOptions opt;
    opt.mode = parse_mode(mode_text);
    opt.trials = trials;
    opt.budget = budget;
    if (opt.mode == Mode::Randomized) {
      if (!seed) throw InvalidArgument("--seed is required in randomized mode");
      opt.seed = *seed;
    }
    return opt;
  };
  auto exit_for = [](Verdict v) { return v == Verdict::Vanishes ? kExitVanishes : kExitNotVanishes; };

  try {
    if (check->parsed()) {
      auto g = load_graph(graph_path);
      auto sides = parse_sets(sets_text);
      const int k = order.value_or(static_cast<int>(sides.size()));
      auto opt = decision_options();
      log.info("check: " + std::to_string(sides.size()) + " sets of size " + std::to_string(sides[0].size()) +
               ", mode " + mode_text);
      auto d = decide_vanishing(g, sides, k, opt);
      for (const auto& e : d.obstructions)
        log.debug("top set blocked on side " + std::to_string(e.blocked_side));
      for (const auto& r : d.records)
        log.debug("instance " + (r.seed ? std::to_string(*r.seed) : std::string("symbolic")) + ": " +
                  (r.zero ? "zero" : "nonzero"));
      log.info(std::string("verdict ") + to_string(d.verdict));
      emit(decision_to_json(d));
      return exit_for(d.verdict);
    }

    if (common->parsed()) {
      if (graph_path.empty() == tensor_path.empty()) throw InvalidArgument("give exactly one of --graph, --tensor");
      auto tuple = parse_tuple(tuple_text);
      if (!tensor_path.empty()) {
        auto t = tensor_from_json<Rational>(read_json_file(tensor_path));
        std::vector<std::size_t> pos;
        for (Vertex v : tuple) {
          if (v < 0) throw InvalidArgument("tensor positions are non-negative");
          pos.push_back(static_cast<std::size_t>(v));
        }
        auto r = detect_common_cause(t, pos);
        emit({{"verdict", to_string(r.verdict)}, {"position", pos}, {"value", to_string(r.value)}});
        return exit_for(r.verdict);
      }
      auto g = load_graph(graph_path);
      auto d = detect_common_cause(g, tuple, decision_options());
      log.info(std::string("verdict ") + to_string(d.verdict));
      emit(decision_to_json(d));
      return exit_for(d.verdict);
    }

    if (param->parsed()) {
      auto g = load_graph(graph_path);
      if (*order < 2) throw InvalidArgument("--order must be at least 2");
      ModelInstance<Rational> inst;
      if (!instance_path.empty()) {
        inst = instance_from_json(read_json_file(instance_path));
        validate_instance(g, inst);
      } else {
        if (!seed) throw InvalidArgument("--seed is required when no --instance is given");
        inst = sample_generic_instance(g, *order, *seed);
      }
      auto t = kind == "moment" ? model_moment(g, inst, *order) : model_cumulant(g, inst, *order);
      emit({{"kind", kind},
            {"order", *order},
            {"vertices", g.vertices()},
            {"instance", instance_to_json(inst)},
            {"tensor", tensor_to_json(t)}});
      return 0;
    }

    if (sim->parsed()) {
      auto g = load_graph(graph_path);
      SimulationSpec spec;
      if (!spec_path.empty()) spec = simulation_spec_from_json(read_json_file(spec_path));
      if (samples) spec.samples = *samples;
      log.info("simulating " + std::to_string(spec.samples) + " rows");
      auto data = simulate_lsem(g, spec.lambda, spec.noise, spec.samples, *seed);
      const bool binary = out_path.size() >= 4 && out_path.compare(out_path.size() - 4, 4, ".bin") == 0;
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw InvalidArgument("cannot write '" + out_path + "'");
      if (binary)
        write_binary(data, f);
      else
        write_csv(data, f);
      out << nlohmann::json{{"rows", data.rows},
                            {"cols", data.cols()},
                            {"vertices", data.vertices},
                            {"format", binary ? "binary" : "csv"},
                            {"out", out_path}}
                 .dump()
          << "\n";
      return 0;
    }

    if (est->parsed()) {
      SampleMatrix data;
      const bool binary = data_path.size() >= 4 && data_path.compare(data_path.size() - 4, 4, ".bin") == 0;
      std::ifstream f(data_path, std::ios::binary);
      if (!f) throw InvalidArgument("cannot open '" + data_path + "'");
      if (binary)
        data = read_binary(f, graph_path.empty() ? std::vector<Vertex>{} : load_graph(graph_path).vertices());
      else
        data = read_csv(f);
      auto sides = parse_sets(sets_text);
      const int k = order.value_or(static_cast<int>(sides.size()));
      auto r = test_determinant_zero(data, sides, k, boot, *seed);
      emit({{"statistic", r.statistic},
            {"bootstrap_sd", r.bootstrap_sd},
            {"flag", r.flag},
            {"rule", "|statistic| <= 2*bootstrap_sd"},
            {"n_samples", data.rows},
            {"n_boot", boot},
            {"sets", sides}});
      return 0;
    }

    if (scan->parsed()) {
      EnsembleSpec spec;
      if (!ensemble_path.empty()) spec = ensemble_from_json(read_json_file(ensemble_path));
      auto rep = scan_conjecture(spec, *seed, trials, budget);
      log.info("scanned " + std::to_string(rep.cases_scanned) + " cases, " +
               std::to_string(rep.disagreements.size()) + " disagreements");
      emit(conjecture_report_to_json(rep));
      return 0;
    }

    if (cert->parsed()) {
      auto g = load_graph(graph_path);
      auto d = decision_from_json(read_json_file(decision_path));
      auto res = certify(d, g, budget);
      for (const auto& p : res.problems) log.info(p);
      out << nlohmann::json{{"valid", res.valid}, {"problems", res.problems}}.dump() << "\n";
      return res.valid ? 0 : kExitInvalid;
    }
  } catch (const SchemaError& e) {
    log.error(e.what());
    out << nlohmann::json{{"error", e.what()}, {"path", e.path()}}.dump() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    return fail(e.what());
  }
  return fail("no command");
}

}  // namespace multitrek::cli
