#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cmplab/environment_io.hpp"
#include "cmplab/errors.hpp"
#include "cmplab/experiments.hpp"
#include "cmplab/optimality.hpp"
#include "cmplab/report_io.hpp"

namespace cmplab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// A CLI-level usage problem; maps to exit code 2 like every input error.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_value(double x, int digits) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

/// Reads a vector stored either as a bare JSON array or under `key`.
std::vector<double> load_vector(const fs::path& path, const char* key) {
  json doc;
  try {
    doc = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + " is not valid JSON: " + e.what());
  }
  if (doc.is_object() && doc.contains(key)) doc = doc.at(key);
  if (!doc.is_array()) {
    throw FormatError(path.string() + ": expected an array or an object with \"" + key + "\"");
  }
  try {
    return doc.get<std::vector<double>>();
  } catch (const json::exception&) {
    throw FormatError(path.string() + ": \"" + key + "\" must contain numbers");
  }
}

struct RegimeFlags {
  CLI::Option* discounted_opt = nullptr;
  CLI::Option* finite_opt = nullptr;
  CLI::Option* gamma_opt = nullptr;
  CLI::Option* averaged_opt = nullptr;
  double discount = 0.0;
  std::size_t horizon = 0;
  double gamma = 1.0;
  bool averaged = false;
  std::string v0_file;

  void attach(CLI::App* cmd) {
    discounted_opt = cmd->add_option("--discounted", discount, "Discounted regime with rate gamma in (0,1)");
    finite_opt = cmd->add_option("--finite", horizon, "Finite-horizon regime with T steps");
    gamma_opt = cmd->add_option("--gamma", gamma, "Discount for --finite, in (0,1] (default 1)");
    averaged_opt = cmd->add_flag("--averaged", averaged, "Time-averaged regime");
    cmd->add_option("--v0", v0_file, "Initial distribution file (JSON array or {\"v0\": [...]})")
        ->check(CLI::ExistingFile);
    discounted_opt->excludes(finite_opt)->excludes(averaged_opt);
    finite_opt->excludes(averaged_opt);
    gamma_opt->needs(finite_opt);
  }

  ValueSpec spec() const {
    std::optional<StateDistribution> v0;
    if (!v0_file.empty()) v0 = StateDistribution(load_vector(v0_file, "v0"));
    if (discounted_opt->count()) return ValueSpec(Discounted{discount}, std::move(v0));
    if (finite_opt->count()) return ValueSpec(FiniteHorizon{horizon, gamma}, std::move(v0));
    if (averaged) return ValueSpec(TimeAveraged{}, std::move(v0));
    throw UsageError("choose a regime: --discounted GAMMA | --finite T [--gamma GAMMA] | --averaged");
  }
};

std::string join_indices(const std::vector<PolicyIndex>& indices) {
  std::string out;
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(indices[k].value);
  }
  return out;
}

// --- commands -------------------------------------------------------------

int cmd_sample(std::size_t n, std::size_t m, std::size_t count, std::uint64_t seed,
               const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw std::runtime_error("cannot create output directory " + out_dir.string());
  }
  for (std::size_t k = 0; k < count; ++k) {
    auto rng = make_stream(seed, StreamTag::cli_sample, k);
    const auto env = sample_uniform_environment(n, m, rng);
    char name[32];
    std::snprintf(name, sizeof name, "env-%06zu.json", k);
    const auto path = out_dir / name;
    save_environment(env, path);
    std::cout << "wrote=" << path.string() << "\n";
  }
  return kOk;
}

int cmd_eval(const fs::path& env_file, std::uint64_t policy_index, const RegimeFlags& regime,
             const fs::path& reward_file) {
  const auto env = load_environment(env_file);
  const RewardFunction r(load_vector(reward_file, "reward"));
  const auto spec = regime.spec();
  const auto policy = policy_from_index({policy_index}, env.states(), env.actions());
  const double value = policy_value(env, policy, spec, r);
  std::cout << "policy=" << policy_index << " actions=" << to_string(policy) << "\n";
  std::cout << "value=" << format_value(value, 15) << "\n";
  return kOk;
}

int cmd_best(const fs::path& env_file, const RegimeFlags& regime, const fs::path& reward_file,
             double tie_tol) {
  const auto env = load_environment(env_file);
  const RewardFunction r(load_vector(reward_file, "reward"));
  const auto spec = regime.spec();
  const auto result = best_policy_exhaustive(env, spec, r, {tie_tol, kDefaultEnumerationCap});
  std::cout << "best=" << result.best.value << "\n";
  std::cout << "actions="
            << to_string(policy_from_index(result.best, env.states(), env.actions())) << "\n";
  std::cout << "value=" << format_value(result.best_value, 15) << "\n";
  std::cout << "runner_up_margin=" << format_value(result.runner_up_margin, 15) << "\n";
  std::cout << "tie_count=" << result.tie_set.size() << "\n";
  std::cout << "tie_set=" << join_indices(result.tie_set) << "\n";
  return kOk;
}

int cmd_construct(std::size_t n, std::size_t m, std::uint64_t pi_i, std::uint64_t pi_j,
                  const fs::path& reward_file, double epsilon, const fs::path& out_file) {
  const RewardFunction r(load_vector(reward_file, "reward"));
  const auto policy_i = policy_from_index({pi_i}, n, m);
  const auto policy_j = policy_from_index({pi_j}, n, m);
  const auto env = construct_separating_environment(n, m, policy_i, policy_j, r, epsilon);
  if (out_file.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(out_file.parent_path(), ec);
  }
  save_environment(env, out_file);
  std::cout << "wrote=" << out_file.string() << "\n";
  std::cout << "min_entry=" << format_value(min_entry(env), 17) << "\n";
  return kOk;
}

void write_manifest(const fs::path& path, const RunManifest& manifest) {
  write_text_file_atomic(path, manifest_to_json(manifest));
}

int cmd_experiment(const fs::path& config_file, const fs::path& out_dir,
                   std::optional<std::size_t> workers, std::optional<std::uint64_t> seed,
                   std::optional<double> tie_tol, const std::vector<std::string>& argv_echo) {
  auto config = config_from_json(read_text_file(config_file));
  if (workers) config.workers = *workers;
  if (seed) config.master_seed = *seed;
  if (tie_tol) config.tie_tolerance = *tie_tol;
  config.validate();

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) {
    throw std::runtime_error("cannot create output directory " + out_dir.string());
  }

  RunManifest manifest;
  manifest.command_line = argv_echo;
  manifest.config_hash = config_hash(config);
  manifest.master_seed = config.master_seed;
  manifest.version = CMPLAB_VERSION;
  manifest.workers = config.workers;
  manifest.outputs = {"report.json",    "frequencies.json", "frequencies.csv",
                      "entropy.json",   "ties.json",        "ties.csv",
                      "transport.json", "transport.csv"};
  manifest.status = "running";
  const auto manifest_path = out_dir / "manifest.json";
  write_manifest(manifest_path, manifest);

  const auto report = run_full_report(config);
  const std::string comment = "manifest=manifest.json config_hash=" + manifest.config_hash;

  write_text_file_atomic(out_dir / "report.json", report_to_json(report));
  write_text_file_atomic(out_dir / "frequencies.json", frequency_to_json(report.frequency));
  write_text_file_atomic(out_dir / "frequencies.csv", frequency_to_csv(report.frequency, comment));
  write_text_file_atomic(out_dir / "entropy.json", entropy_to_json(report.entropy));
  write_text_file_atomic(out_dir / "ties.json", ties_to_json(report.ties));
  write_text_file_atomic(out_dir / "ties.csv", ties_to_csv(report.ties, comment));
  write_text_file_atomic(out_dir / "transport.json", transport_to_json(report.transport));
  write_text_file_atomic(out_dir / "transport.csv", transport_to_csv(report.transport, comment));

  manifest.status = report.passed() ? "passed" : "failed";
  manifest.wall_clock_seconds = report.wall_clock_seconds;
  manifest.seed_derivation = report.seed_derivation;
  write_manifest(manifest_path, manifest);

  const auto& e = report.entropy;
  char entropy_line[96];
  std::snprintf(entropy_line, sizeof entropy_line, "%.3f ± %.3f", e.miller_madow_entropy_bits,
                e.standard_error);
  std::cout << "config_hash=" << manifest.config_hash << "\n";
  std::cout << "samples=" << report.frequency.samples << "\n";
  std::cout << "chi_square=" << format_value(report.frequency.chi_square, 6)
            << " df=" << report.frequency.degrees_of_freedom << "\n";
  std::cout << "entropy_bits=" << entropy_line << "\n";
  std::cout << "plug_in_entropy_bits=" << format_value(e.plug_in_entropy_bits, 10) << "\n";
  std::cout << "target_bits=" << format_value(e.target_bits, 10) << "\n";
  std::cout << "ties=" << report.ties.flagged_samples.size() << "\n";
  std::cout << "transport_violations=" << report.transport.total_violations() << "\n";
  for (const auto& check : report.acceptance) {
    std::cout << "check." << check.name << "=" << (check.passed ? "pass" : "fail") << "\n";
  }
  std::cout << "passed=" << (report.passed() ? "true" : "false") << "\n";
  return report.passed() ? kOk : kAcceptanceFailure;
}

}  // namespace

std::string manifest_to_json(const RunManifest& m) {
  nlohmann::ordered_json doc;
  doc["command_line"] = m.command_line;
  doc["config_hash"] = m.config_hash;
  doc["master_seed"] = m.master_seed;
  doc["version"] = m.version;
  doc["workers"] = m.workers;
  doc["outputs"] = m.outputs;
  doc["status"] = m.status;
  doc["wall_clock_seconds"] = m.wall_clock_seconds;
  doc["seed_derivation"] = m.seed_derivation;
  return doc.dump(2) + "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"cmplab: optimal deterministic policies in controlled Markov processes"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  std::size_t workers = 1;
  std::string out;
  double tie_tol = kDefaultTieTolerance;

  auto* sample = app.add_subcommand("sample", "Sample environments uniformly from the environment space");
  std::size_t n = 2;
  std::size_t m = 2;
  std::size_t count = 1;
  sample->add_option("--n", n, "Number of states")->required();
  sample->add_option("--m", m, "Number of actions")->required();
  sample->add_option("--count", count, "Number of environments")->capture_default_str();
  sample->add_option("--seed", seed, "Random seed")->capture_default_str();
  sample->add_option("--out", out, "Output directory")->required();

  auto* eval = app.add_subcommand("eval", "Value of one policy in one environment");
  std::string env_file;
  std::string reward_file;
  std::uint64_t policy_index = 0;
  RegimeFlags eval_regime;
  eval->add_option("--env", env_file, "Environment file")->required()->check(CLI::ExistingFile);
  eval->add_option("--policy", policy_index, "Policy index in [0, m^n)")->required();
  eval->add_option("--reward", reward_file, "Reward file (JSON array or {\"reward\": [...]})")
      ->required();
  eval_regime.attach(eval);

  auto* best = app.add_subcommand("best", "Exhaustive optimal policy with ties and margin");
  RegimeFlags best_regime;
  best->add_option("--env", env_file, "Environment file")->required()->check(CLI::ExistingFile);
  best->add_option("--reward", reward_file, "Reward file")->required();
  best->add_option("--tie-tol", tie_tol, "Relative tie tolerance")->capture_default_str();
  best_regime.attach(best);

  auto* construct = app.add_subcommand("construct", "Environment where pi_i strictly beats pi_j");
  std::uint64_t pi_i = 0;
  std::uint64_t pi_j = 0;
  double epsilon = 0.01;
  construct->add_option("--n", n, "Number of states")->required();
  construct->add_option("--m", m, "Number of actions")->required();
  construct->add_option("--pi-i", pi_i, "Index of the policy to favour")->required();
  construct->add_option("--pi-j", pi_j, "Index of the policy to beat")->required();
  construct->add_option("--reward", reward_file, "Reward file")->required();
  construct->add_option("--epsilon", epsilon, "Leak probability, 0 gives a boundary environment")
      ->capture_default_str();
  construct->add_option("--out", out, "Output environment file")->required();

  auto* experiment = app.add_subcommand("experiment", "Run an experiment suite from a config file");
  std::string config_file;
  experiment->add_option("--config", config_file, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  experiment->add_option("--out", out, "Output directory")->required();
  auto* workers_opt = experiment->add_option("--workers", workers, "Worker threads");
  auto* seed_opt = experiment->add_option("--seed", seed, "Override the master seed");
  auto* tie_opt = experiment->add_option("--tie-tol", tie_tol, "Override the tie tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (*sample) return cmd_sample(n, m, count, seed, out);
    if (*eval) return cmd_eval(env_file, policy_index, eval_regime, reward_file);
    if (*best) return cmd_best(env_file, best_regime, reward_file, tie_tol);
    if (*construct) return cmd_construct(n, m, pi_i, pi_j, reward_file, epsilon, out);
    if (*experiment) {
      std::vector<std::string> echo(argv, argv + argc);
      return cmd_experiment(
          config_file, out,
          workers_opt->count() ? std::optional<std::size_t>(workers) : std::nullopt,
          seed_opt->count() ? std::optional<std::uint64_t>(seed) : std::nullopt,
          tie_opt->count() ? std::optional<double>(tie_tol) : std::nullopt, echo);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace cmplab::cli
