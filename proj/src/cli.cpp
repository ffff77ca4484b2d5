#include "tangraph/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "json_io.hpp"
#include "tangraph/errors.hpp"
#include "tangraph/zoo.hpp"

namespace tangraph {

namespace {

using json = nlohmann::json;

// Flags that set immersion parameters. For `counterexample`, eps and delta
// are the command's own inputs instead.
const std::vector<std::string> kParamFlags = {"R", "R_maj", "r_min", "h",      "T",
                                              "m", "k",     "extent", "a",     "b",
                                              "window", "eps", "delta", "margin"};

const std::set<std::string> kConfigKeys = {
    "command", "target", "immersion", "kind",  "lambda",  "r",    "rho",   "q",
    "chart",   "tol",    "samples",   "seed",  "grid",    "cell_size", "threads",
    "out",     "csv",    "eps",       "delta", "angles",  "pairs", "json"};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Collected command-line values; only options the user actually set are
// copied into the configuration.
struct Flags {
  std::string config;
  std::string immersion;
  std::string kind;
  std::string out;
  std::string csv;
  std::vector<double> q;
  double lambda = 0.0, r = 0.0, rho = 0.0, tol = 0.0, cell_size = 0.0;
  int chart = 0, grid = 0, threads = 0, angles = 0, pairs = 0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  bool json = false;
  std::map<std::string, double> params;
};

struct Leaf {
  std::string command;
  std::string target;
  CLI::App* app = nullptr;
  std::map<std::string, CLI::Option*> options;
};

void add_options(Leaf& leaf, Flags& f) {
  CLI::App* app = leaf.app;
  auto& o = leaf.options;
  o["config"] = app->add_option("--config", f.config, "JSON run configuration file");
  o["out"] = app->add_option("--out", f.out, "Output file (default: standard output)");
  o["threads"] = app->add_option("--threads", f.threads, "Worker thread cap")->check(CLI::PositiveNumber);
  if (leaf.command == "zoo") {
    o["json"] = app->add_flag("--json", f.json, "List entries as JSON");
    return;
  }
  if (leaf.command == "counterexample") {
    o["eps"] = app->add_option("--eps", f.params["eps"], "Wiggle amplitude");
    o["delta"] = app->add_option("--delta", f.params["delta"], "Wiggle period");
    o["r"] = app->add_option("--r", f.r, "Radius");
    o["angles"] = app->add_option("--angles", f.angles, "Number of line angles");
    return;
  }
  o["immersion"] = app->add_option("--immersion", f.immersion, "Zoo entry name");
  for (const auto& name : kParamFlags)
    o["param:" + name] = app->add_option("--" + name, f.params[name], "Immersion parameter " + name);
  o["seed"] = app->add_option("--seed", f.seed, "Sampler seed");
  o["samples"] = app->add_option("--samples", f.samples, "Number of sampled base points (0 = all)");
  o["grid"] = app->add_option("--grid", f.grid, "Extractor grid resolution N");
  o["cell_size"] = app->add_option("--cell-size", f.cell_size, "Parameter cell size h (0 = default)");
  o["lambda"] = app->add_option("--lambda", f.lambda, "Slope or C0 constant lambda");
  o["r"] = app->add_option("--r", f.r, "Radius");
  o["q"] = app->add_option("--q", f.q, "Base point coordinates in its chart")->delimiter(',');
  o["chart"] = app->add_option("--chart", f.chart, "Chart index of the base point");
  if (leaf.command == "radii") {
    o["kind"] = app->add_option("--kind", f.kind, "c0 or c1");
  }
  if (leaf.command == "radii" || leaf.target == "theorem")
    o["tol"] = app->add_option("--tol", f.tol, "Relative bisection tolerance");
  if (leaf.target == "distance") o["rho"] = app->add_option("--rho", f.rho, "Inner radius");
  if (leaf.target == "inclusion") o["pairs"] = app->add_option("--pairs", f.pairs, "Points p per q");
  if (leaf.target == "du-cert") o["csv"] = app->add_option("--csv", f.csv, "Per-node CSV output");
}

void overlay(const Leaf& leaf, const Flags& f, json& cfg) {
  auto set = [&](const char* key) { return leaf.options.contains(key) && leaf.options.at(key)->count() > 0; };
  if (set("out")) cfg["out"] = f.out;
  if (set("threads")) cfg["threads"] = f.threads;
  if (set("json")) cfg["json"] = f.json;
  if (set("immersion")) cfg["immersion"]["name"] = f.immersion;
  for (const auto& name : kParamFlags) {
    if (set(("param:" + name).c_str())) cfg["immersion"]["params"][name] = f.params.at(name);
  }
  if (set("eps")) cfg["eps"] = f.params.at("eps");
  if (set("delta")) cfg["delta"] = f.params.at("delta");
  if (set("angles")) cfg["angles"] = f.angles;
  if (set("seed")) cfg["seed"] = f.seed;
  if (set("samples")) cfg["samples"] = f.samples;
  if (set("grid")) cfg["grid"] = f.grid;
  if (set("cell_size")) cfg["cell_size"] = f.cell_size;
  if (set("lambda")) cfg["lambda"] = f.lambda;
  if (set("r")) cfg["r"] = f.r;
  if (set("q")) cfg["q"] = f.q;
  if (set("chart")) cfg["chart"] = f.chart;
  if (set("kind")) cfg["kind"] = f.kind;
  if (set("tol")) cfg["tol"] = f.tol;
  if (set("rho")) cfg["rho"] = f.rho;
  if (set("pairs")) cfg["pairs"] = f.pairs;
  if (set("csv")) cfg["csv"] = f.csv;
}

// Reads a field, recording the default in the configuration when absent so
// reports carry every setting that was used.
double get_number(json& cfg, const char* key, std::optional<double> fallback) {
  if (!cfg.contains(key)) {
    if (!fallback) throw ConfigError(std::string("missing required setting '") + key + "'");
    cfg[key] = *fallback;
  }
  if (!cfg[key].is_number()) throw ConfigError(std::string("setting '") + key + "' must be a number");
  const double v = cfg[key].get<double>();
  if (!std::isfinite(v)) throw ConfigError(std::string("setting '") + key + "' must be finite");
  return v;
}

long long get_integer(json& cfg, const char* key, long long fallback, long long lo, long long hi) {
  if (!cfg.contains(key)) cfg[key] = fallback;
  if (!cfg[key].is_number_integer())
    throw ConfigError(std::string("setting '") + key + "' must be an integer");
  const auto v = cfg[key].get<long long>();
  if (v < lo || v > hi)
    throw ConfigError(std::string("setting '") + key + "' must lie in [" + std::to_string(lo) +
                      ", " + std::to_string(hi) + "]");
  return v;
}

std::string get_string(json& cfg, const char* key, std::optional<std::string> fallback) {
  if (!cfg.contains(key)) {
    if (!fallback) throw ConfigError(std::string("missing required setting '") + key + "'");
    cfg[key] = *fallback;
  }
  if (!cfg[key].is_string()) throw ConfigError(std::string("setting '") + key + "' must be a string");
  return cfg[key].get<std::string>();
}

ParamImmersion build_immersion(json& cfg) {
  if (!cfg.contains("immersion") || !cfg["immersion"].is_object())
    throw ConfigError("missing required setting 'immersion'");
  json& spec = cfg["immersion"];
  for (const auto& [key, v] : spec.items()) {
    if (key != "name" && key != "params") throw ConfigError("unknown immersion field '" + key + "'");
  }
  const std::string name = get_string(spec, "name", std::nullopt);
  if (!spec.contains("params")) spec["params"] = json::object();
  if (!spec["params"].is_object()) throw ConfigError("immersion params must be an object");
  Params params;
  for (const auto& [key, v] : spec["params"].items()) {
    if (!v.is_number()) throw ConfigError("immersion parameter '" + key + "' must be a number");
    params[key] = v.get<double>();
  }
  ParamImmersion f = zoo_build(name, params);
  spec["params"] = json_io::params(f.params());
  return f;
}

ParamPoint base_point(json& cfg, const ParamImmersion& f) {
  ParamPoint p;
  p.chart = static_cast<int>(
      get_integer(cfg, "chart", 0, 0, static_cast<long long>(f.charts().size()) - 1));
  const Box& domain = f.chart(p.chart).domain;
  if (!cfg.contains("q")) cfg["q"] = json_io::vec(0.5 * (domain.lo + domain.hi));
  if (!cfg["q"].is_array()) throw ConfigError("setting 'q' must be an array of numbers");
  if (static_cast<int>(cfg["q"].size()) != f.m())
    throw ConfigError("setting 'q' needs " + std::to_string(f.m()) + " coordinates");
  p.coords.resize(f.m());
  for (int d = 0; d < f.m(); ++d) {
    const json& v = cfg["q"][static_cast<std::size_t>(d)];
    if (!v.is_number()) throw ConfigError("setting 'q' must be an array of numbers");
    p.coords(d) = v.get<double>();
  }
  return p;
}

CheckOptions check_options(json& cfg, int default_grid) {
  CheckOptions o;
  o.grid = static_cast<int>(get_integer(cfg, "grid", default_grid, 8, 4096));
  o.cell_size = get_number(cfg, "cell_size", 0.0);
  if (o.cell_size < 0.0) throw ConfigError("setting 'cell_size' must be >= 0");
  o.threads = static_cast<int>(get_integer(cfg, "threads", 1, 1, 1024));
  return o;
}

SampleSpec sample_spec(json& cfg) {
  SampleSpec s;
  s.count = static_cast<std::size_t>(get_integer(cfg, "samples", 16, 0, 1'000'000));
  if (!cfg.contains("seed")) cfg["seed"] = std::uint64_t{0};
  if (!cfg["seed"].is_number_unsigned()) throw ConfigError("setting 'seed' must be a non-negative integer");
  s.seed = cfg["seed"].get<std::uint64_t>();
  return s;
}

double positive(json& cfg, const char* key, std::optional<double> fallback) {
  const double v = get_number(cfg, key, fallback);
  if (!(v > 0.0)) throw ConfigError(std::string("setting '") + key + "' must be positive");
  return v;
}

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Outcome {
  json result;
  int code = kExitOk;
};

Outcome run_command(const std::string& command, const std::string& target, json& cfg,
                    std::ostream& out) {
  Outcome o;
  if (command == "extract") {
    const ParamImmersion f = build_immersion(cfg);
    const ParamPoint q = base_point(cfg, f);
    const double r = positive(cfg, "r", std::nullopt);
    const CheckOptions c = check_options(cfg, 256);
    ExtractOptions eo;
    eo.threads = c.threads;
    const GraphSample sample = extract(FrameContext::canonical(f, q, r), c.grid, c.cell_size, eo);
    const std::string path = get_string(cfg, "out", "");
    if (path.empty()) {
      write_csv(out, sample);
    } else {
      std::ofstream file(path);
      if (!file) throw ConfigError("cannot open '" + path + "' for writing");
      write_csv(file, sample);
    }
    o.result = json_io::value(sample);
    o.code = sample.is_graph() ? kExitOk : kExitFails;
    return o;
  }
  if (command == "radii") {
    const ParamImmersion f = build_immersion(cfg);
    const std::string kind = get_string(cfg, "kind", std::nullopt);
    if (kind != "c0" && kind != "c1") throw ConfigError("setting 'kind' must be c0 or c1");
    const double lambda = positive(cfg, "lambda", std::nullopt);
    const double tol = positive(cfg, "tol", 1e-3);
    const SampleSpec s = sample_spec(cfg);
    const CheckOptions c = check_options(cfg, 128);
    const RadiusReport report =
        max_radius(f, lambda, kind == "c0" ? RadiusKind::c0 : RadiusKind::c1, s, tol, c);
    o.result = json_io::value(report);
    o.code = report.inconclusive ? kExitInconclusive : kExitOk;
    return o;
  }
  if (command == "counterexample") {
    const double eps = get_number(cfg, "eps", 1e-6);
    const double delta = get_number(cfg, "delta", 1e-7);
    const double r = get_number(cfg, "r", 0.2);
    const int angles = static_cast<int>(get_integer(cfg, "angles", 4096, 2, 1 << 22));
    const int threads = static_cast<int>(get_integer(cfg, "threads", 1, 1, 1024));
    const CounterexampleReport report = analyze_counterexample(eps, delta, r, angles, threads);
    o.result = json_io::value(report);
    o.code = report.verdict ? kExitOk : kExitFails;
    return o;
  }
  // verify
  auto verdict_code = [](bool holds, bool inconclusive) {
    if (holds) return kExitOk;
    return inconclusive ? kExitInconclusive : kExitFails;
  };
  if (target == "constants") {
    const IterationConstants c = iteration_constants();
    o.result = json_io::value(c);
    o.code = c.holds ? kExitOk : kExitFails;
    return o;
  }
  const ParamImmersion f = build_immersion(cfg);
  if (target == "theorem") {
    const double lambda = positive(cfg, "lambda", lambda_cap(f.m()));
    const double tol = positive(cfg, "tol", 1e-3);
    const SampleSpec s = sample_spec(cfg);
    const CheckOptions c = check_options(cfg, 128);
    const TheoremVerdict v = verify_main_theorem(f, lambda, s, tol, c);
    o.result = json_io::value(v);
    o.code = verdict_code(v.holds, v.inconclusive);
  } else if (target == "enlargement") {
    const double r = positive(cfg, "r", std::nullopt);
    const double lambda = positive(cfg, "lambda", std::nullopt);
    const auto q = sample_points(f, sample_spec(cfg));
    const EnlargementResult e = check_enlargement(f, r, lambda, q, check_options(cfg, 128));
    o.result = json_io::value(e);
    o.code = verdict_code(e.holds, e.conclusion.inconclusive);
  } else if (target == "distance") {
    const ParamPoint q = base_point(cfg, f);
    const double r = positive(cfg, "r", std::nullopt);
    const double rho = positive(cfg, "rho", r);
    const double lambda = positive(cfg, "lambda", std::nullopt);
    const DistanceResult d = check_distance_bound(f, q, rho, r, lambda, check_options(cfg, 128));
    o.result = json_io::value(d);
    o.code = verdict_code(d.holds, false);
  } else if (target == "inclusion") {
    const double r = positive(cfg, "r", std::nullopt);
    const double lambda = positive(cfg, "lambda", std::nullopt);
    const int pairs = static_cast<int>(get_integer(cfg, "pairs", 8, 1, 1 << 20));
    const auto q = sample_points(f, sample_spec(cfg));
    const InclusionResult inc = check_inclusion(f, q, r, lambda, check_options(cfg, 128), pairs);
    o.result = json_io::value(inc);
    o.code = verdict_code(inc.holds, false);
  } else if (target == "du-cert") {
    const ParamPoint q = base_point(cfg, f);
    const double r = positive(cfg, "r", std::nullopt);
    const double lambda = positive(cfg, "lambda", std::nullopt);
    const CheckOptions c = check_options(cfg, 64);
    const CertifiedDuBound b = certify_du_bound(f, q, r, lambda, c.grid, c);
    const std::string csv = get_string(cfg, "csv", "");
    if (!csv.empty()) {
      std::ofstream file(csv);
      if (!file) throw ConfigError("cannot open '" + csv + "' for writing");
      write_csv(file, b);
    }
    o.result = json_io::value(b);
    o.code = verdict_code(b.failures.empty() && b.sound, false);
  } else {
    throw ConfigError("unknown verify target '" + target + "'");
  }
  return o;
}

int zoo_list(json& cfg, std::ostream& out) {
  const bool as_json = cfg.contains("json") && cfg["json"].is_boolean() && cfg["json"].get<bool>();
  if (!as_json) {
    for (const auto& e : zoo_entries()) out << e.name << "  " << e.summary << '\n';
    return kExitOk;
  }
  json entries = json::array();
  for (const auto& e : zoo_entries())
    entries.push_back({{"name", e.name}, {"summary", e.summary}, {"defaults", json_io::params(e.defaults)}});
  out << json{{"schema_version", kSchemaVersion}, {"entries", entries}}.dump(2) << '\n';
  return kExitOk;
}

int dispatch(const std::string& command, const std::string& target, json cfg, std::ostream& out,
             std::ostream& err) {
  for (const auto& [key, v] : cfg.items()) {
    if (!kConfigKeys.contains(key)) throw ConfigError("unknown configuration field '" + key + "'");
  }
  if (cfg.contains("command") && cfg["command"] != command)
    throw ConfigError("configuration is for command '" + cfg["command"].dump() + "'");
  if (cfg.contains("target") && !target.empty() && cfg["target"] != target)
    throw ConfigError("configuration is for target '" + cfg["target"].dump() + "'");
  cfg["command"] = command;
  if (!target.empty()) cfg["target"] = target;
  if (command == "zoo") return zoo_list(cfg, out);

  json resolved = cfg;
  std::ostringstream csv_sink;
  const bool csv_to_stdout = command == "extract" && !cfg.contains("out");
  Outcome o = run_command(command, target, resolved, csv_to_stdout ? out : csv_sink);
  if (command == "extract") {
    err << o.result.dump() << '\n';
    return o.code;
  }
  json doc = {{"schema_version", kSchemaVersion},
              {"tool", "tangraph"},
              {"version", version()},
              {"generated_at", timestamp()},
              {"command", command},
              {"config", resolved},
              {"result", o.result},
              {"exit_code", o.code}};
  if (!target.empty()) doc["target"] = target;
  const std::string text = doc.dump(2) + "\n";
  const std::string path = resolved.value("out", std::string());
  if (path.empty()) {
    out << text;
  } else {
    std::ofstream file(path);
    if (!file) throw ConfigError("cannot open '" + path + "' for writing");
    file << text;
  }
  return o.code;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Local graph representations of immersions: extraction, radii and checks",
               "tangraph"};
  // --h is the helix pitch, so help is long-form only.
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version()));

  Flags flags;
  std::vector<Leaf> leaves;
  leaves.reserve(12);
  auto leaf = [&](CLI::App* parent, const std::string& name, const std::string& help,
                  const std::string& command, const std::string& target) {
    leaves.push_back(Leaf{command, target, parent->add_subcommand(name, help), {}});
    add_options(leaves.back(), flags);
  };
  CLI::App* zoo = app.add_subcommand("zoo", "Built-in immersions");
  zoo->require_subcommand(1);
  leaf(zoo, "list", "List the built-in immersions", "zoo", "list");
  leaf(&app, "extract", "Graph function over B_r as CSV", "extract", "");
  leaf(&app, "radii", "Maximal radius estimate as JSON", "radii", "");
  CLI::App* verify = app.add_subcommand("verify", "Theorem and lemma checks");
  verify->require_subcommand(1);
  for (const char* t : {"theorem", "enlargement", "distance", "inclusion", "du-cert", "constants"})
    leaf(verify, t, std::string("Check: ") + t, "verify", t);
  leaf(&app, "counterexample", "Wiggle-curve counterexample analysis", "counterexample", "");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  const Leaf* chosen = nullptr;
  for (const auto& l : leaves) {
    if (l.app->parsed()) chosen = &l;
  }
  if (chosen == nullptr) {
    err << "no command given\n";
    return kExitInvalid;
  }

  try {
    json cfg = json::object();
    if (!flags.config.empty()) {
      std::ifstream file(flags.config);
      if (!file) throw ConfigError("cannot read configuration '" + flags.config + "'");
      cfg = json::parse(file);
      if (!cfg.is_object()) throw ConfigError("configuration must be a JSON object");
    }
    overlay(*chosen, flags, cfg);
    const std::string target = chosen->command == "verify" ? chosen->target : "";
    return dispatch(chosen->command, target, std::move(cfg), out, err);
  } catch (const BoundaryEscape& e) {
    err << "inconclusive: " << e.what() << '\n';
    return kExitInconclusive;
  } catch (const MonotonicityViolated& e) {
    err << "inconclusive: " << e.what() << '\n';
    return kExitInconclusive;
  } catch (const NotAGraph& e) {
    err << "fails: " << e.what() << '\n';
    return kExitFails;
  } catch (const Error& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const json::exception& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvalid;
  }
}

}  // namespace tangraph
