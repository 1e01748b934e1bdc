#include "grabforest/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "grabforest/errors.hpp"
#include "grabforest/exact_oracle.hpp"
#include "grabforest/experiments.hpp"
#include "grabforest/gw_sampler.hpp"
#include "grabforest/report.hpp"

namespace grabforest::cli {

namespace {

using Json = nlohmann::ordered_json;

struct RunConfig {
  std::string command;
  std::string law_text;
  std::string mode = "float";
  std::optional<std::uint64_t> seed;
  std::size_t reps = 1000;
  std::vector<std::size_t> n;
  std::string out;
  std::string format = "jsonl";
  int threads = 0;
  std::string tree = "(0)";
  std::string tree1 = "(0)";
  std::string tree2 = "(0)";
  std::string arms;
  std::size_t k = 0;
  std::size_t n_max = 0;
  std::size_t ell = 5;
  std::optional<double> target;
  double c = 0.5;
  std::size_t cap = 10'000;
  std::vector<std::size_t> grid = kDefaultTreeCountGrid;
  std::string plot_dir;
  bool dynamics = false;
  bool shape_only = false;
  bool timing = false;

  Json to_json() const {
    Json j;
    j["command"] = command;
    j["law"] = law_text;
    j["mode"] = mode;
    j["seed"] = seed ? Json(*seed) : Json(nullptr);
    j["reps"] = reps;
    j["n"] = n;
    j["format"] = format;
    j["threads"] = threads;
    j["tree"] = tree;
    j["tree1"] = tree1;
    j["tree2"] = tree2;
    j["arms"] = arms;
    j["k"] = k;
    j["n_max"] = n_max;
    j["ell"] = ell;
    j["target"] = target ? Json(*target) : Json(nullptr);
    j["c"] = c;
    j["cap"] = cap;
    j["grid"] = grid;
    j["dynamics"] = dynamics;
    j["shape_only"] = shape_only;
    return j;
  }
};

// Raised for configurations that parse but make no sense for the command.
struct UsageError : Error {
  using Error::Error;
};

class Session {
 public:
  Session(const RunConfig& config, std::ostream& out, std::ostream& err)
      : cfg_(config), out_(out), err_(err) {}

  int dispatch();

 private:
  using Handler = int (Session::*)();

  int simulate();
  int verify_uniform_cmd();
  int verify_shape_law_cmd();
  int tree_frequency_cmd();
  int pairfact();
  int kemperman();
  int dwass();
  int ratio();
  int tilt();
  int sizebias();
  int configcmp();
  int supercrit();
  int treecount();

  std::uint64_t seed() const {
    if (!cfg_.seed) throw UsageError("--seed is required for " + cfg_.command);
    return *cfg_.seed;
  }
  RunOptions options() const { return {seed(), cfg_.threads}; }

  const std::string& law_text() const {
    if (cfg_.law_text.empty()) throw UsageError("--mu is required for " + cfg_.command);
    return cfg_.law_text;
  }
  FloatLaw float_law() const { return parse_float_law(law_text()); }
  RationalLaw rational_law() const { return parse_rational_law(law_text()); }

  const std::vector<std::size_t>& n_values() const {
    if (cfg_.n.empty()) throw UsageError("--n is required for " + cfg_.command);
    return cfg_.n;
  }
  std::vector<std::size_t> n_values_or(std::vector<std::size_t> fallback) const {
    return cfg_.n.empty() ? fallback : cfg_.n;
  }

  Json metadata() const {
    Json meta;
    meta["config"] = cfg_.to_json();
    if (cfg_.seed) {
      meta["rng"] = {{"generator", Rng::kGenerator},
                     {"stream_derivation", Rng::kStreamDerivation},
                     {"seed", *cfg_.seed}};
    }
    return meta;
  }

  std::ostream& summary() { return cfg_.out.empty() ? err_ : out_; }
  void write_artifact(const std::string& text);
  int emit(const ExperimentReport& report);

  const RunConfig& cfg_;
  std::ostream& out_;
  std::ostream& err_;
};

void Session::write_artifact(const std::string& text) {
  if (cfg_.out.empty()) {
    out_ << text;
    return;
  }
  std::ofstream file(cfg_.out, std::ios::binary);
  if (!file) throw UsageError("cannot open output file " + cfg_.out);
  file << text;
  if (!file) throw UsageError("failed writing " + cfg_.out);
}

int Session::emit(const ExperimentReport& report) {
  const Json meta = metadata();
  if (cfg_.format == "csv") {
    write_artifact(to_csv(report, meta));
  } else {
    write_artifact(to_json(report, meta).dump() + "\n");
  }
  if (!cfg_.plot_dir.empty()) {
    std::filesystem::create_directories(cfg_.plot_dir);
    for (const auto& [curve, csv] : plot_csvs(report)) {
      std::ofstream file(std::filesystem::path(cfg_.plot_dir) /
                             (report.experiment + "_" + curve + ".csv"),
                         std::ios::binary);
      file << csv;
    }
  }
  auto& s = summary();
  for (const auto& w : report.warnings) s << "warning: " << w << '\n';
  for (const auto& c : report.checks) {
    s << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) s << ": " << c.detail;
    s << '\n';
  }
  return report.passed() ? kExitOk : kExitCriterionFailed;
}

int Session::dispatch() {
  static const std::map<std::string, Handler> handlers = {
      {"simulate", &Session::simulate},
      {"verify-lemma1", &Session::verify_uniform_cmd},
      {"verify-theorem1", &Session::verify_shape_law_cmd},
      {"theorem2", &Session::tree_frequency_cmd},
      {"pairfact", &Session::pairfact},
      {"kemperman", &Session::kemperman},
      {"dwass", &Session::dwass},
      {"ratio", &Session::ratio},
      {"tilt", &Session::tilt},
      {"sizebias", &Session::sizebias},
      {"configcmp", &Session::configcmp},
      {"supercrit", &Session::supercrit},
      {"treecount", &Session::treecount},
  };
  const auto start = std::chrono::steady_clock::now();
  const int code = (this->*handlers.at(cfg_.command))();
  if (cfg_.timing) {
    const auto elapsed = std::chrono::steady_clock::now() - start;
    err_ << "elapsed_ns: "
         << std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed).count() << '\n';
  }
  return code;
}

std::string join_labels(const std::vector<std::uint32_t>& labels, char sep) {
  std::string s;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) s += sep;
    s += std::to_string(labels[i]);
  }
  return s;
}

int Session::simulate() {
  const std::uint64_t base_seed = seed();
  std::optional<ArmVector> fixed;
  std::optional<FloatLaw> law;
  std::size_t n = 0;
  if (!cfg_.arms.empty()) {
    fixed = parse_arms(cfg_.arms);
    n = fixed->n();
  } else {
    law = float_law();
    if (n_values().size() != 1) throw UsageError("simulate takes a single --n");
    n = cfg_.n.front();
  }
  const std::size_t reps = cfg_.reps;

  struct Record {
    std::string arms_digest;
    std::size_t k = 0;
    std::string shape;
    std::vector<std::uint32_t> vertex_labels, edge_labels;
  };
  auto records = run_replicas(reps, options(), 0, [&](Rng& rng, std::size_t) {
    const ArmVector arms = fixed ? *fixed : sample_conditioned_arms(*law, n, rng);
    Record rec;
    rec.arms_digest = arms.digest();
    rec.k = arms.k();
    if (cfg_.shape_only) {
      rec.shape = simulate_shape(arms, rng).to_string();
    } else {
      LabeledForest t = simulate_terminal(arms, rng);
      rec.shape = t.shape.to_string();
      rec.vertex_labels = std::move(t.vertex_labels);
      rec.edge_labels = std::move(t.edge_labels);
    }
    return rec;
  });

  std::string text;
  const Json meta = metadata();
  if (cfg_.format == "csv") {
    text += "# metadata: " + meta.dump() + "\n";
    text += "seed,stream,n,k,arms_digest,shape";
    text += cfg_.shape_only ? "\n" : ",vertex_labels,edge_labels\n";
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& rec = records[r];
      text += std::to_string(base_seed) + ',' + std::to_string(r) + ',' + std::to_string(n) +
              ',' + std::to_string(rec.k) + ',' + rec.arms_digest + ",\"" + rec.shape + '"';
      if (!cfg_.shape_only) {
        text += ',' + join_labels(rec.vertex_labels, ';') + ',' +
                join_labels(rec.edge_labels, ';');
      }
      text += '\n';
    }
  } else {
    text += Json{{"metadata", meta}}.dump() + "\n";
    for (std::size_t r = 0; r < reps; ++r) {
      const auto& rec = records[r];
      Json line;
      line["seed"] = base_seed;
      line["stream"] = r;
      line["n"] = n;
      line["k"] = rec.k;
      line["arms_digest"] = rec.arms_digest;
      line["shape"] = rec.shape;
      if (!cfg_.shape_only) {
        line["vertex_labels"] = rec.vertex_labels;
        line["edge_labels"] = rec.edge_labels;
      }
      text += line.dump() + "\n";
    }
  }
  write_artifact(text);
  summary() << "simulated " << reps << " terminal state(s) with n=" << n << '\n';
  return kExitOk;
}

int Session::verify_uniform_cmd() {
  if (!cfg_.arms.empty()) return emit(verify_uniform_terminal_law(parse_arms(cfg_.arms)));
  const std::size_t max_n = cfg_.n_max ? cfg_.n_max : 5;
  return emit(verify_uniform_terminal_law_exhaustive(max_n, 4));
}

int Session::verify_shape_law_cmd() {
  const RationalLaw law = rational_law();
  if (cfg_.seed) {
    if (cfg_.k == 0 || n_values().size() != 1) {
      throw UsageError("the Monte Carlo check needs --k and a single --n");
    }
    return emit(conditioned_shape_monte_carlo(law, cfg_.k, cfg_.n.front(), cfg_.reps, options()));
  }
  const std::size_t max_n = cfg_.n_max ? cfg_.n_max : 6;
  return emit(verify_conditioned_shape_law(law, max_n, cfg_.dynamics));
}

int Session::tree_frequency_cmd() {
  return emit(theorem2_experiment(float_law(), parse_tree_text(cfg_.tree),
                                  n_values_or({50, 200, 800}), cfg_.reps, options()));
}

int Session::pairfact() {
  return emit(pair_factorization_experiment(float_law(), parse_tree_text(cfg_.tree1),
                                            parse_tree_text(cfg_.tree2), n_values_or({800}),
                                            cfg_.reps, options()));
}

int Session::kemperman() {
  const std::size_t n_max = cfg_.n_max ? cfg_.n_max : 40;
  if (cfg_.mode == "rational") return emit(kemperman_check(rational_law(), n_max));

  // Float mode: the two evaluation routes agree up to rounding.
  const FloatLaw law = float_law();
  ExperimentReport report;
  report.experiment = "kemperman";
  report.parameters["law"] = law.to_string();
  report.parameters["n_max"] = n_max;
  double worst = 0.0;
  for (std::size_t n = 2; n <= n_max; ++n) {
    for (std::size_t k = 1; k < n; ++k) {
      worst = std::max(worst, std::abs(first_passage_pmf(law, k, n) -
                                       first_passage_pmf_direct(law, k, n)));
    }
  }
  report.add("max_abs_deviation_direct", static_cast<double>(n_max), worst);
  report.check("routes_agree_within_1e-12", worst <= 1e-12,
               "max deviation " + format_number(worst));
  return emit(report);
}

int Session::dwass() {
  const std::size_t k = cfg_.k ? cfg_.k : 3;
  return emit(dwass_experiment(float_law(), k, cfg_.reps, cfg_.cap, options()));
}

int Session::ratio() {
  return emit(ratio_limit_check(float_law(), n_values_or({500, 2000, 8000}), cfg_.ell));
}

int Session::tilt() {
  if (!cfg_.target) throw UsageError("--target is required for tilt");
  const FloatLaw law = float_law();
  const TiltResult result = exponential_tilt(law, *cfg_.target);
  ExperimentReport report;
  report.experiment = "tilt";
  report.parameters["law"] = law.to_string();
  report.parameters["target_mean"] = *cfg_.target;
  report.parameters["tilted_law"] = result.law.to_string();
  report.parameters["scale"] = result.scale;
  for (const auto& e : result.law.entries()) report.add("tilted_pmf", e.value, e.prob);
  report.add("tilted_mean", *cfg_.target, result.law.mean());
  summary() << "tilted law " << result.law.to_string() << " (scale "
            << format_number(result.scale) << ")\n";
  return emit(report);
}

int Session::sizebias() {
  ExperimentReport report;
  report.experiment = "sizebias";
  if (cfg_.mode == "rational") {
    const RationalLaw law = rational_law();
    const RationalLaw biased = size_biased(law);
    const Rational criterion = molloy_reed_criterion(law);
    report.parameters["law"] = law.to_string();
    report.parameters["size_biased_law"] = biased.to_string();
    report.parameters["molloy_reed"] = to_string(criterion);
    for (const auto& e : biased.entries()) report.add("size_biased_pmf", e.value, to_double(e.prob));
    summary() << "size-biased law " << biased.to_string() << ", molloy_reed "
              << to_string(criterion) << '\n';
  } else {
    const FloatLaw law = float_law();
    const FloatLaw biased = size_biased(law);
    const double criterion = molloy_reed_criterion(law);
    report.parameters["law"] = law.to_string();
    report.parameters["size_biased_law"] = biased.to_string();
    report.parameters["molloy_reed"] = criterion;
    for (const auto& e : biased.entries()) report.add("size_biased_pmf", e.value, e.prob);
    summary() << "size-biased law " << biased.to_string() << ", molloy_reed "
              << format_number(criterion) << '\n';
  }
  return emit(report);
}

int Session::configcmp() {
  const auto n = n_values_or({2000});
  if (n.size() != 1) throw UsageError("configcmp takes a single --n");
  return emit(config_model_cluster_experiment(float_law(), n.front(), cfg_.reps, options()));
}

int Session::supercrit() {
  return emit(supercritical_k_experiment(float_law(), n_values_or({100, 200, 400}), cfg_.reps,
                                         cfg_.c, options()));
}

int Session::treecount() {
  return emit(tree_count_experiment(float_law(), n_values_or({100, 400, 1600}), cfg_.reps,
                                    options(), cfg_.grid));
}

struct Subcommand {
  const char* name;
  const char* description;
};

constexpr Subcommand kSubcommands[] = {
    {"simulate", "run the grabbing dynamics and write terminal states"},
    {"verify-lemma1", "exact check: terminal law is uniform on the labeled forests"},
    {"verify-theorem1", "exact (or --seed: Monte Carlo) check of the conditioned GW shape law"},
    {"theorem2", "L2 convergence of the empirical tree measure"},
    {"pairfact", "joint law of the two leftmost trees"},
    {"kemperman", "first passage identity across evaluation routes"},
    {"dwass", "tree sizes of a free GW forest"},
    {"ratio", "exact ratio limit of walk tail probabilities"},
    {"tilt", "exponential tilt to a target mean"},
    {"sizebias", "size-biased law and the Molloy-Reed criterion"},
    {"configcmp", "configuration model cluster of a uniform arm vs joined GW trees"},
    {"supercrit", "law of the tree count for supercritical laws"},
    {"treecount", "growth of the tree count"},
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Grabbing particle system and Galton-Watson forest toolkit", "grabforest"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value configuration file")->envname("GF_CONFIG");
  app.allow_config_extras(false);

  auto env = [](CLI::Option* opt, const char* name) { return opt->envname(name); };
  env(app.add_option("--mu", cfg.law_text, "reproduction law, \"v:p,v:p,...\""), "GF_MU");
  env(app.add_option("--mode", cfg.mode, "arithmetic for law-based commands")
          ->check(CLI::IsMember({"float", "rational"})),
      "GF_MODE");
  env(app.add_option("--seed", cfg.seed, "64-bit seed (required for randomized commands)"),
      "GF_SEED");
  env(app.add_option("--reps", cfg.reps, "replicas per configuration"), "GF_REPS");
  env(app.add_option("--n", cfg.n, "particle counts, comma separated")->delimiter(','), "GF_N");
  env(app.add_option("--out", cfg.out, "artifact path (default: standard output)"), "GF_OUT");
  env(app.add_option("--format", cfg.format, "artifact format")
          ->check(CLI::IsMember({"jsonl", "csv"})),
      "GF_FORMAT");
  env(app.add_option("--threads", cfg.threads, "worker threads (0: all, 1: serial)")
          ->check(CLI::NonNegativeNumber),
      "GF_THREADS");
  env(app.add_option("--tree", cfg.tree, "tree shape, e.g. \"(2,0,0)\""), "GF_TREE");
  env(app.add_option("--tree1", cfg.tree1, "first tree shape"), "GF_TREE1");
  env(app.add_option("--tree2", cfg.tree2, "second tree shape"), "GF_TREE2");
  env(app.add_option("--arms", cfg.arms, "arm counts, e.g. 2,0,0"), "GF_ARMS");
  env(app.add_option("--k", cfg.k, "number of trees"), "GF_K");
  env(app.add_option("--n-max", cfg.n_max, "largest n for exact checks"), "GF_N_MAX");
  env(app.add_option("--ell", cfg.ell, "shift in the ratio limit"), "GF_ELL");
  env(app.add_option("--target", cfg.target, "target mean for tilt"), "GF_TARGET");
  env(app.add_option("--c", cfg.c, "target tree fraction for the tilted check"), "GF_C");
  env(app.add_option("--cap", cfg.cap, "vertex cap for free GW trees"), "GF_CAP");
  env(app.add_option("--grid", cfg.grid, "K values for P(k(n) >= K)")->delimiter(','),
      "GF_GRID");
  env(app.add_option("--plot-dir", cfg.plot_dir, "directory for per-curve CSV files"),
      "GF_PLOT_DIR");
  env(app.add_flag("--dynamics", cfg.dynamics, "also expand the dynamics (verify-theorem1)"),
      "GF_DYNAMICS");
  env(app.add_flag("--shape-only", cfg.shape_only, "simulate without label bookkeeping"),
      "GF_SHAPE_ONLY");
  app.add_flag("--timing", cfg.timing, "report elapsed time on standard error");

  for (const auto& sub : kSubcommands) {
    app.add_subcommand(sub.name, sub.description)->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    std::ostringstream help;
    app.exit(e, help, err);
    out << help.str();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::ostringstream ignored;
    app.exit(e, ignored, err);
    return kExitUsage;
  }
  cfg.command = app.get_subcommands().front()->get_name();

  try {
    Session session(cfg, out, err);
    return session.dispatch();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"grabforest"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace grabforest::cli
