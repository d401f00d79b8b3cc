#include "mothergraph/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

#include "mothergraph/errors.hpp"
#include "mothergraph/germ_walk.hpp"
#include "mothergraph/product_flow.hpp"
#include "mothergraph/tokens.hpp"

#ifndef MOTHERGRAPH_VERSION
#define MOTHERGRAPH_VERSION "unknown"
#endif

namespace mg {

using nlohmann::json;

std::string sha256_hex(std::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

std::string format_number(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.12g}", x);
}

namespace {

// Doubles go into JSON already rounded to 12 significant digits.
json num(double x) {
  if (!std::isfinite(x)) return format_number(x);
  return std::stod(fmt::format("{:.12g}", x));
}

std::string flag(bool b) { return b ? "true" : "false"; }

class OutputSet {
 public:
  OutputSet(std::string dir, std::string subcommand) : dir_(std::move(dir)), subcommand_(std::move(subcommand)) {
    std::filesystem::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& content, const std::string& schema) {
    const std::filesystem::path path = std::filesystem::path(dir_) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(fmt::format("cannot write {}", path.string()));
    f << content;
    if (!f) throw Error(fmt::format("cannot write {}", path.string()));
    outputs_.push_back({{"file", name}, {"sha256", sha256_hex(content)}, {"schema", schema}, {"bytes", content.size()}});
  }

  // The manifest has no timestamps: identical runs give identical bytes.
  void finish(const json& parameters, std::ostream& out, const json& extra = json::object()) {
    json m = {{"schema", "mothergraph.manifest/1"},
              {"tool", "mothergraph"},
              {"version", MOTHERGRAPH_VERSION},
              {"subcommand", subcommand_},
              {"parameters", parameters},
              {"outputs", outputs_}};
    for (const auto& [k, v] : extra.items()) m[k] = v;
    const std::string text = m.dump(2) + "\n";
    const std::filesystem::path path = std::filesystem::path(dir_) / "manifest.json";
    std::ofstream(path, std::ios::binary) << text;
    for (const json& o : outputs_) {
      out << fmt::format("wrote {} sha256={}\n", o["file"].get<std::string>(), o["sha256"].get<std::string>());
    }
    out << fmt::format("wrote manifest.json sha256={}\n", sha256_hex(text));
  }

 private:
  std::string dir_;
  std::string subcommand_;
  json outputs_ = json::array();
};

std::pair<int, int> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  try {
    std::size_t used = 0;
    if (colon == std::string::npos) {
      const int n = std::stoi(text, &used);
      if (used != text.size()) throw InvalidArgument("");
      return {n, n};
    }
    const std::string a = text.substr(0, colon), b = text.substr(colon + 1);
    const int lo = std::stoi(a, &used);
    if (used != a.size()) throw InvalidArgument("");
    const int hi = std::stoi(b, &used);
    if (used != b.size()) throw InvalidArgument("");
    if (lo > hi) throw InvalidArgument("");
    return {lo, hi};
  } catch (const std::exception&) {
    throw InvalidArgument(fmt::format("invalid n range '{}' (expected N or A:B with A <= B)", text));
  }
}

std::int32_t parse_vertex(const std::string& text, int n, int m) {
  if (text == "root") return root(n);
  if (text == "antiroot") return antiroot(n, 1, m);
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used == text.size() && v >= 0) return static_cast<std::int32_t>(v);
  } catch (const std::exception&) {
  }
  throw InvalidArgument(fmt::format("invalid vertex '{}'", text));
}

std::vector<double> parse_weights(const std::string& text) {
  std::vector<double> w;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      w.push_back(std::stod(item, &used));
      if (used != item.size()) throw InvalidArgument("");
    } catch (const std::exception&) {
      throw InvalidArgument(fmt::format("invalid weight '{}'", item));
    }
  }
  return w;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument(fmt::format("cannot read '{}'", path));
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

struct Common {
  ModelParams p;
  std::string out = ".";
};

void add_model(CLI::App* app, Common& c) {
  app->add_option("--d", c.p.d, "activity degree bound d (0..15)")->required();
  app->add_option("--m", c.p.m, "alphabet size m (2..8)")->required();
  app->add_option("--out", c.out, "output directory")->capture_default_str();
}

void cmd_graph(const Common& c, int n, const std::string& format, std::ostream& out) {
  c.p.validate();
  if (n < 0) throw InvalidArgument("n must be nonnegative");
  const SchreierGraph g = build_graph(c.p, n);
  OutputSet files(c.out, "graph");
  if (n == 0) {
    files.write("loops.csv", loops_csv(g), "loops/1");
  } else if (format == "edges") {
    files.write("edges.csv", edges_csv(g), "edges/1");
    files.write("loops.csv", loops_csv(g), "loops/1");
  } else if (format == "loops") {
    files.write("loops.csv", loops_csv(g), "loops/1");
  } else {
    files.write(fmt::format("G_d{}_m{}_n{}.dot", c.p.d, c.p.m, n), to_dot(g), "dot/1");
  }
  out << fmt::format("vertices={} edges={} degree={}\n", g.vertices(), g.net.edge_count(),
                     g.vertices() > 0 ? g.generator_degree(0) : 0);
  files.finish({{"d", c.p.d}, {"m", c.p.m}, {"n", n}, {"format", format}}, out);
}

void cmd_resistance(const Common& c, const std::string& pair, const std::string& range, double tol, bool plot,
                    std::ostream& out) {
  c.p.validate();
  const PairFamily family = parse_pair_family(pair);
  const auto [lo, hi] = parse_range(range);
  if (lo < 1) throw InvalidArgument("n range must start at 1 or later");
  SolverOptions opts;
  opts.tol = tol;
  const Profile prof = resistance_profile(c.p, family, lo, hi, opts);
  OutputSet files(c.out, "resistance");
  files.write("profile.csv", profile_csv(prof), "profile/1");
  std::vector<double> values;
  for (const ProfilePoint& pt : prof) {
    values.push_back(pt.report.value);
    out << fmt::format("n={} value={} residual={} iters={}\n", pt.n, format_number(pt.report.value),
                       format_number(pt.report.residual), pt.report.iterations);
  }
  if (plot) {
    // Whitespace columns for gnuplot and friends.
    std::string dat = "# n value value/log(n)^2 log(value)\n";
    for (const ProfilePoint& pt : prof) {
      const double l = std::log(static_cast<double>(pt.n));
      dat += fmt::format("{} {} {} {}\n", pt.n, format_number(pt.report.value),
                         pt.n > 1 ? format_number(pt.report.value / (l * l)) : "nan",
                         format_number(std::log(pt.report.value)));
    }
    files.write("profile.dat", dat, "plot-data/1");
  }
  out << fmt::format("transience={}\n", to_string(transience_verdict(values)));
  files.finish({{"d", c.p.d}, {"m", c.p.m}, {"pair", to_string(family)}, {"n", range}, {"tol", num(tol)}}, out);
}

void cmd_flow(const Common& c, int dprime, int n, const std::string& gamma, const std::string& profile_path,
              const std::string& terminals, double tol, std::ostream& out) {
  c.p.validate();
  GammaMode mode = GammaMode::Auto;
  double constant = 1.0;
  Profile prof;
  if (gamma == "auto") {
    if (profile_path.empty()) {
      throw InvalidArgument("gamma=auto needs --profile (a profile.csv written by the resistance subcommand)");
    }
    prof = parse_profile_csv(read_file(profile_path));
  } else if (gamma.rfind("const:", 0) == 0) {
    mode = GammaMode::Constant;
    try {
      constant = std::stod(gamma.substr(6));
    } catch (const std::exception&) {
      throw InvalidArgument(fmt::format("invalid gamma '{}'", gamma));
    }
  } else {
    throw InvalidArgument(fmt::format("invalid gamma '{}' (auto or const:<v>)", gamma));
  }
  const FlowSchedule sched = gamma_schedule(c.p, n, dprime, mode, prof, constant);
  const auto comma = terminals.find(',');
  if (comma == std::string::npos) throw InvalidArgument("terminals must be 'a,b'");
  const std::int32_t a = parse_vertex(terminals.substr(0, comma), n, c.p.m);
  const std::int32_t b = parse_vertex(terminals.substr(comma + 1), n, c.p.m);
  SolverOptions opts;
  opts.tol = tol;
  const SchreierGraph g = build_graph(c.p, n);
  ProductFlow pf = build_product_flow(g, a, b, sched, opts);

  int k_low = 1;
  for (int s = 1; s <= n; ++s) k_low = std::max(k_low, sched.floor_gamma(s) + 2);
  k_low = std::min(k_low, n);
  const std::vector<double> rbar_low = max_resistance_table({dprime, c.p.m}, k_low, opts);
  const std::vector<double> rbar_high = max_resistance_table(c.p, n - 1, opts);
  const EnergyBoundReport r = validate_energy_bound(pf, rbar_low, rbar_high, opts);

  std::string stages = "kind,stage,reversed,energy,bound,overlap,sources,targets\n";
  for (const StageFlow& st : pf.stages) {
    stages += fmt::format("{},{},{},{},{},{},{},{}\n", to_string(st.kind), st.stage, st.reversed ? 1 : 0,
                          format_number(st.energy), format_number(st.bound), st.overlap, st.source_size,
                          st.target_size);
  }
  std::string gam = "s,gamma\n";
  for (int s = 0; s <= n; ++s) gam += fmt::format("{},{}\n", s, format_number(sched.gamma[s]));
  const json report = {{"energy", num(r.energy)},
                       {"rhs", num(r.rhs)},
                       {"ratio", num(r.ratio)},
                       {"resistance", num(r.resistance)},
                       {"overlap_bound", num(r.overlap_bound)},
                       {"max_divergence_error", num(r.max_divergence_error)},
                       {"max_transport_error", num(r.max_transport_error)},
                       {"divergence_ok", r.divergence_ok},
                       {"transport_ok", r.transport_ok},
                       {"disjoint_ok", r.disjoint_ok},
                       {"overlap_ok", r.overlap_ok},
                       {"thompson_ok", r.thompson_ok},
                       {"stage_bounds_ok", r.stage_bounds_ok},
                       {"convexity_ok", r.convexity_ok},
                       {"stage_max", sched.stage_max}};
  OutputSet files(c.out, "flow");
  files.write("stages.csv", stages, "stages/1");
  files.write("gamma.csv", gam, "gamma/1");
  files.write("flow.csv", flow_csv(pf.total), "flow/1");
  files.write("report.json", report.dump(2) + "\n", "flow-report/1");
  out << fmt::format("energy={}\nresistance={}\nrhs={}\nratio={}\nstage_max={}\n", format_number(r.energy),
                     format_number(r.resistance), format_number(r.rhs), format_number(r.ratio), sched.stage_max);
  out << fmt::format("divergence_ok={}\ntransport_ok={}\nthompson_ok={}\ndisjoint_ok={}\noverlap_ok={}\n",
                     flag(r.divergence_ok), flag(r.transport_ok), flag(r.thompson_ok), flag(r.disjoint_ok),
                     flag(r.overlap_ok));
  out << fmt::format("stage_bounds_ok={}\nconvexity_ok={}\n", flag(r.stage_bounds_ok), flag(r.convexity_ok));
  json params = {{"d", c.p.d},   {"dprime", dprime},       {"m", c.p.m}, {"n", n},
                 {"gamma", gamma}, {"terminals", {a, b}}, {"tol", num(tol)}};
  if (!profile_path.empty()) params["profile_sha256"] = sha256_hex(read_file(profile_path));
  files.finish(params, out);
}

json trace_json(const GroupTrial& t) {
  json trace = json::array();
  for (const auto& [step, v] : t.changes) trace.push_back({step, to_string(v)});
  return trace;
}

void cmd_walk(const Common& c, const std::string& mode, WalkConfig cfg, const std::string& weights,
              std::ostream& out, std::ostream& err) {
  c.p.validate();
  if (!weights.empty()) {
    cfg.weights = parse_weights(weights);
  } else {
    cfg.weights = WalkConfig::uniform(c.p).weights;
  }
  if (!cfg.normalize(c.p)) err << "warning: step weights did not sum to 1 and were normalized\n";
  cfg.validate(c.p);
  json weights_json = json::array();
  for (double w : cfg.weights) weights_json.push_back(num(w));
  const json params = {{"d", c.p.d},         {"m", c.p.m},           {"mode", mode},
                       {"steps", cfg.steps}, {"trials", cfg.trials}, {"seed", cfg.seed},
                       {"weights", weights_json}, {"step_mode", to_string(cfg.mode)}, {"window", cfg.window}};
  const std::string config_hash = sha256_hex(params.dump());

  std::string lines;
  json summary = {{"config_hash", config_hash}, {"seed", cfg.seed}, {"trials", cfg.trials}, {"steps", cfg.steps}};
  if (mode == "schreier") {
    const SchreierWalkResult r = walk_schreier(c.p, BoundaryPoint::zero_ray(), cfg);
    for (const SchreierTrial& t : r.trials) {
      lines += json({{"trial", t.trial},
                     {"steps", cfg.steps},
                     {"returns", t.visits - 1},
                     {"lastReturn", t.last_return},
                     {"support", t.final_support},
                     {"supportGrowth", t.support_growth}})
                   .dump() +
               "\n";
    }
    summary["mean_visits"] = num(r.mean_visits);
    summary["mean_last_return"] = num(r.mean_last_return);
    summary["return_fraction"] = num(r.return_fraction);
    out << fmt::format("mean_visits={} mean_last_return={} return_fraction={}\n", format_number(r.mean_visits),
                       format_number(r.mean_last_return), format_number(r.return_fraction));
  } else if (mode == "group") {
    const GroupWalkResult r = walk_group(c.p, cfg);
    for (const GroupTrial& t : r.trials) {
      lines += json({{"trial", t.trial},
                     {"steps", cfg.steps},
                     {"verdictTrace", trace_json(t)},
                     {"stabilizationTime", t.stabilization_time},
                     {"returns", t.zero_ray_visits}})
                   .dump() +
               "\n";
    }
    summary["trivial"] = r.trivial;
    summary["nontrivial"] = r.nontrivial;
    summary["unknown"] = r.unknown;
    summary["stabilized_fraction"] = num(r.stabilized_fraction);
    out << fmt::format("trivial={} nontrivial={} unknown={} stabilized_fraction={}\n", r.trivial, r.nontrivial,
                       r.unknown, format_number(r.stabilized_fraction));
  } else if (mode == "harmonic") {
    const std::vector<GroupWord> starts = designated_starts(c.p);
    const std::vector<HarmonicEstimate> est = estimate_harmonic(c.p, starts, cfg);
    json arr = json::array();
    for (std::size_t i = 0; i < est.size(); ++i) {
      for (const GroupTrial& t : est[i].walks.trials) {
        lines += json({{"start", i},
                       {"trial", t.trial},
                       {"steps", cfg.steps},
                       {"verdictTrace", trace_json(t)},
                       {"stabilizationTime", t.stabilization_time},
                       {"returns", t.zero_ray_visits}})
                     .dump() +
                 "\n";
      }
      arr.push_back({{"start", format_word(est[i].start)},
                     {"trivial", est[i].trivial},
                     {"nontrivial", est[i].nontrivial},
                     {"unknown", est[i].unknown},
                     {"p_trivial", num(est[i].p_trivial)},
                     {"std_error", num(est[i].std_error)},
                     {"stabilized_fraction", num(est[i].stabilized_fraction)}});
      out << fmt::format("start={} p_trivial={} std_error={} unknown={} stabilized_fraction={}\n",
                         format_word(est[i].start).empty() ? "id" : format_word(est[i].start),
                         format_number(est[i].p_trivial), format_number(est[i].std_error), est[i].unknown,
                         format_number(est[i].stabilized_fraction));
    }
    summary["estimates"] = arr;
    if (cfg.trials > 0) {
      const double sep = separation(est[0], est[1]);
      summary["separation"] = num(sep);
      out << fmt::format("separation={}\n", format_number(sep));
    }
  } else {
    throw InvalidArgument(fmt::format("unknown walk mode '{}'", mode));
  }
  OutputSet files(c.out, "walk");
  files.write("trials.jsonl", lines, "walk-trial/1");
  files.write("summary.json", summary.dump(2) + "\n", "walk-summary/1");
  files.finish(params, out, {{"seed", cfg.seed}, {"config_hash", config_hash}});
}

void cmd_degree(const std::string& token, int m, int depth, std::ostream& out) {
  if (m < 2 || m > kMaxAlphabet) throw InvalidArgument("alphabet size outside 2..8");
  if (depth < 0 || depth > 40) throw InvalidArgument("depth must lie in 0..40");
  const GroupWord w = parse_word(token, m);
  const MooreDiagram dg = build_moore_diagram(w);
  const ActivityDegree deg = activity_degree(dg);
  const std::size_t active = static_cast<std::size_t>(std::count(dg.active.begin(), dg.active.end(), true));
  out << fmt::format("word={}\nstates={}\nactive_states={}\n", format_word(w.reduced()), dg.size(), active);
  if (deg.kind == ActivityDegree::Kind::None) {
    out << "degree=none (no active states)\n";
    return;
  }
  out << fmt::format("degree={}\n", deg.to_string());
  const std::vector<std::uint64_t> counts = activity_counts(dg, depth);
  std::string cs;
  for (std::size_t i = 0; i < counts.size(); ++i) cs += (i ? "," : "") + std::to_string(counts[i]);
  const ActivityDegree fit = empirical_activity_degree(counts);
  out << fmt::format("counts={}\nempirical={}\nagree={}\n", cs, fit.to_string(), flag(fit == deg));
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Schreier graphs, resistances, flows and walks of the mother groups M(d,m)"};
  app.name(args.empty() ? "mothergraph" : args[0]);
  app.set_version_flag("--version", MOTHERGRAPH_VERSION);
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP worker count (0 = runtime default)");

  Common c;
  int n = 0;
  std::string format = "edges";
  auto* graph = app.add_subcommand("graph", "write G(d,m,n)");
  add_model(graph, c);
  graph->add_option("--n", n, "level n")->required();
  graph->add_option("--format", format, "dot | edges | loops")
      ->check(CLI::IsMember({"dot", "edges", "loops"}))
      ->capture_default_str();

  std::string pair = "root-antiroot", range;
  double tol = 1e-10;
  bool plot = false;
  auto* res = app.add_subcommand("resistance", "resistance profile along n");
  add_model(res, c);
  res->add_option("--pair", pair, "root-antiroot | set-antiroots")->capture_default_str();
  res->add_option("--n", range, "N or A:B")->required();
  res->add_option("--tol", tol, "relative residual tolerance")->capture_default_str();
  res->add_flag("--plot-data", plot, "also write profile.dat");

  int dprime = 0;
  std::string gamma = "auto", profile, terminals = "root,antiroot";
  auto* flow = app.add_subcommand("flow", "product flow and its energy bound");
  add_model(flow, c);
  flow->add_option("--dprime", dprime, "d' in 0..d-1")->capture_default_str();
  flow->add_option("--n", n, "level n >= d+2")->required();
  flow->add_option("--gamma", gamma, "auto | const:<v>")->capture_default_str();
  flow->add_option("--profile", profile, "profile.csv for gamma=auto");
  flow->add_option("--terminals", terminals, "a,b (vertex ids, root, antiroot)")->capture_default_str();
  flow->add_option("--tol", tol, "solver tolerance")->capture_default_str();

  WalkConfig cfg;
  std::string mode = "group", weights, step_mode = "subgroup-uniform";
  auto* walk = app.add_subcommand("walk", "random walks and the harmonic witness");
  add_model(walk, c);
  walk->add_option("--mode", mode, "schreier | group | harmonic")
      ->check(CLI::IsMember({"schreier", "group", "harmonic"}))
      ->capture_default_str();
  walk->add_option("--steps", cfg.steps, "steps per trial")->required();
  walk->add_option("--trials", cfg.trials, "number of trials")->required();
  walk->add_option("--seed", cfg.seed, "RNG seed")->required();
  walk->add_option("--weights", weights, "p_{-1},...,p_d (normalized if needed)");
  walk->add_option("--step-mode", step_mode, "subgroup-uniform | multiset-uniform (the latter ignores --weights)")->capture_default_str();
  walk->add_option("--window", cfg.window, "stabilization window")->capture_default_str();

  std::string token;
  int m = 2, depth = 12;
  auto* degree = app.add_subcommand("degree", "activity degree of a group word");
  degree->add_option("--gen", token, "generator or word tokens, ';'-separated")->required();
  degree->add_option("--m", m, "alphabet size")->capture_default_str();
  degree->add_option("--depth", depth, "levels for the empirical count")->capture_default_str();

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << MOTHERGRAPH_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (threads < 0) throw InvalidArgument("--threads must be nonnegative");
    if (threads > 0) set_threads(threads);
    if (*graph) cmd_graph(c, n, format, out);
    if (*res) cmd_resistance(c, pair, range, tol, plot, out);
    if (*flow) cmd_flow(c, dprime, n, gamma, profile, terminals, tol, out);
    if (*walk) {
      cfg.mode = parse_step_mode(step_mode);
      cmd_walk(c, mode, cfg, weights, out, err);
    }
    if (*degree) cmd_degree(token, m, depth, out);
  } catch (const ParseError& e) {
    err << fmt::format("parse error at position {}: {}\n", e.position(), e.detail());
    return kExitUsage;
  } catch (const InvalidArgument& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CapExceeded& e) {
    err << "resource cap: " << e.what() << "\n";
    return kExitCap;
  } catch (const SolverError& e) {
    err << "solver: " << e.what() << "\n";
    return kExitSolver;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}

}  // namespace mg
