// Experiment driver for the random circular billiard laboratory.
//
// billiards <subcommand> [flags]; every subcommand prints a one-line JSON
// summary to stdout and, when --out is given, writes its data files plus the
// effective config (config.txt) into that directory.  Exit codes: 0 success,
// 1 validation error, 2 internal invariant failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "billiards/billiard.hpp"
#include "billiards/chain.hpp"
#include "billiards/diagnostics.hpp"
#include "billiards/errors.hpp"
#include "billiards/io.hpp"
#include "billiards/measure.hpp"
#include "billiards/numerics.hpp"
#include "billiards/verify.hpp"

namespace {

using nlohmann::json;

struct ExperimentConfig {
  std::string surface = "flat";
  double r0 = 1.0;
  std::string alpha = "1/8";
  double theta0 = billiards::pi / 16;
  double s0 = 0.0;
  std::size_t n_steps = 200;
  std::size_t ensemble = 100000;
  std::size_t bins = 500;
  std::uint64_t seed = 20260814;
  std::string out;
  unsigned threads = 0;
  std::size_t max_states = 4096;
  std::string start = "uniform";
  std::string indicator = "quarter";
  double epsilon = 0.02;
  std::vector<std::size_t> lags = {1, 10, 50};
  std::string direction = "0,1";
  std::size_t pairs = 10000;
  bool quick = false;
  std::string config_path;
};

// Effective key=value config of the parsed subcommand, serialized by the
// same formatter that reads --config files, so feeding it back reproduces
// the run exactly.
std::string effective_config_text;

billiards::SurfaceKind parse_surface(const std::string& name) {
  const auto kind = billiards::surface_from_string(name);
  billiards::require(kind.has_value(), billiards::errc::invalid_argument,
                     "unknown surface '" + name + "'");
  return *kind;
}

// Decimal alpha, or "m/n" meaning m*pi/n exactly.
billiards::FeresParams parse_alpha(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      const long num = std::stol(text.substr(0, slash));
      const long den = std::stol(text.substr(slash + 1));
      return billiards::make_params(num, den);
    }
    return billiards::make_params(std::stod(text));
  } catch (const std::invalid_argument&) {
    billiards::throw_validation(billiards::errc::invalid_argument,
                                "cannot parse alpha '" + text + "'");
  } catch (const std::out_of_range&) {
    billiards::throw_validation(billiards::errc::invalid_argument,
                                "alpha '" + text + "' out of range");
  }
}

std::array<double, 2> parse_direction(const std::string& text) {
  const auto comma = text.find(',');
  billiards::require(comma != std::string::npos, billiards::errc::invalid_argument,
                     "direction must be 'a,b'");
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    billiards::throw_validation(billiards::errc::invalid_argument,
                                "cannot parse direction '" + text + "'");
  }
}

billiards::InitialAngleLaw parse_law(const std::string& name) {
  if (name == "invariant") return billiards::InitialAngleLaw::invariant;
  if (name == "lower-half") return billiards::InitialAngleLaw::lower_half;
  if (name == "uniform") return billiards::InitialAngleLaw::uniform_theta;
  billiards::throw_validation(billiards::errc::invalid_argument,
                              "unknown start law '" + name + "'");
}

class OutputDir {
 public:
  explicit OutputDir(const ExperimentConfig& config) {
    if (config.out.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(config.out, ec);
    billiards::require(!ec, billiards::errc::invalid_path,
                       "cannot create output directory '" + config.out + "'");
    path_ = config.out;
    write_text("config.txt", effective_config_text);
  }

  bool enabled() const { return path_.has_value(); }

  void write_text(const std::string& name, const std::string& body) {
    if (!path_) return;
    const auto file = *path_ / name;
    std::ofstream out(file, std::ios::binary);
    billiards::require(out.good(), billiards::errc::invalid_path,
                       "cannot open '" + file.string() + "' for writing");
    out << body;
    billiards::require(out.good(), billiards::errc::invalid_path,
                       "failed writing '" + file.string() + "'");
    names_.push_back(name);
  }

  json manifest() const {
    json files = json::array();
    for (const auto& name : names_) files.push_back(name);
    return files;
  }

 private:
  std::optional<std::filesystem::path> path_;
  std::vector<std::string> names_;
};

void print_summary(const json& summary) { std::cout << summary.dump() << "\n"; }

int cmd_table(const ExperimentConfig& config) {
  const auto table = billiards::make_table(parse_surface(config.surface), config.r0);
  OutputDir out(config);
  json summary{{"command", "table"},
               {"surface", billiards::to_string(table.kind)},
               {"r0", table.r0},
               {"h", table.h},
               {"L", table.L},
               {"c", table.c},
               {"max_gamma_prime", billiards::max_central_angle_derivative(table)}};
  if (out.enabled()) {
    out.write_text("table.json", summary.dump(2) + "\n");
    summary["outputs"] = out.manifest();
  }
  print_summary(summary);
  return 0;
}

int cmd_chain(const ExperimentConfig& config) {
  const auto params = parse_alpha(config.alpha);
  const auto states = billiards::enumerate_states(params, config.theta0, config.max_states);
  const auto matrix = billiards::build_matrix(states, params);
  const bool irreducible = billiards::is_irreducible(matrix);
  int period = 0;
  billiards::StationaryDist dist{std::vector<double>(matrix.n, 0.0)};
  if (irreducible) {
    period = billiards::chain_period(matrix);
    dist = billiards::stationary(matrix);
  }
  OutputDir out(config);
  if (out.enabled()) {
    std::ostringstream csv;
    billiards::write_chain_csv(csv, matrix);
    out.write_text("chain.csv", csv.str());
    out.write_text("chain.json",
                   billiards::chain_json(states, matrix, irreducible, period, dist) + "\n");
  }
  json summary{{"command", "chain"},
               {"alpha", params.alpha},
               {"theta0", config.theta0},
               {"states", states.size()},
               {"irreducible", irreducible},
               {"period", period}};
  if (params.rational) {
    summary["alpha_fraction"] = std::to_string(params.rational->num) + "/" +
                                std::to_string(params.rational->den);
  }
  if (out.enabled()) summary["outputs"] = out.manifest();
  print_summary(summary);
  return 0;
}

int cmd_simulate(const ExperimentConfig& config) {
  const auto table = billiards::make_table(parse_surface(config.surface), config.r0);
  const auto params = parse_alpha(config.alpha);
  const auto record = billiards::simulate(table, params, {config.s0, config.theta0},
                                          config.n_steps, config.seed);
  OutputDir out(config);
  if (out.enabled()) {
    std::ostringstream csv, jsonl;
    billiards::write_trajectory_csv(csv, record);
    billiards::write_trajectory_jsonl(jsonl, record);
    out.write_text("trajectory.csv", csv.str());
    out.write_text("trajectory.jsonl", jsonl.str());
  }
  json summary{{"command", "simulate"},
               {"steps", record.steps.size()},
               {"seed", config.seed},
               {"final_s", record.steps.empty() ? config.s0 : record.steps.back().s},
               {"final_theta",
                record.steps.empty() ? config.theta0 : record.steps.back().theta}};
  if (out.enabled()) summary["outputs"] = out.manifest();
  print_summary(summary);
  return 0;
}

billiards::AngleHistogram initial_histogram(const ExperimentConfig& config,
                                            const billiards::FeresParams& params) {
  (void)params;
  if (config.start == "uniform") {
    return billiards::histogram_from_density(
        [](double theta) { return 2.0 / (billiards::pi * std::sin(theta)); },
        config.bins);
  }
  if (config.start == "invariant") return billiards::liouville_histogram(config.bins);
  if (config.start == "lower-half") {
    return billiards::histogram_from_density(
        [](double theta) { return theta < billiards::pi / 2 ? 2.0 : 0.0; },
        config.bins);
  }
  if (config.start == "point") {
    return billiards::point_mass_histogram(config.theta0, config.bins);
  }
  billiards::throw_validation(billiards::errc::invalid_argument,
                              "unknown start '" + config.start + "'");
}

int cmd_evolve(const ExperimentConfig& config) {
  const auto params = parse_alpha(config.alpha);
  const auto initial = initial_histogram(config, params);
  const auto trace = billiards::knudsen_run(params, initial, config.n_steps);
  OutputDir out(config);
  if (out.enabled()) {
    std::vector<billiards::TraceColumn> columns(2);
    columns[0].name = "step";
    columns[1].name = "tv";
    for (std::size_t k = 0; k < trace.size(); ++k) {
      columns[0].values.push_back(static_cast<double>(k));
      columns[1].values.push_back(trace[k]);
    }
    std::ostringstream csv;
    billiards::write_columns_csv(csv, columns);
    out.write_text("evolve_trace.csv", csv.str());

    billiards::AngleHistogram final_hist = initial;
    for (std::size_t k = 0; k < config.n_steps; ++k) {
      final_hist = billiards::evolve_kernel(params, final_hist);
    }
    std::ostringstream hist_csv;
    billiards::write_histogram_csv(hist_csv, final_hist);
    out.write_text("final_histogram.csv", hist_csv.str());
  }
  json summary{{"command", "evolve"},     {"alpha", params.alpha},
               {"start", config.start},   {"bins", config.bins},
               {"steps", config.n_steps}, {"tv_initial", trace.front()},
               {"tv_final", trace.back()}};
  if (out.enabled()) summary["outputs"] = out.manifest();
  print_summary(summary);
  return 0;
}

int cmd_phase_evolve(const ExperimentConfig& config) {
  const auto table = billiards::make_table(parse_surface(config.surface), config.r0);
  const auto params = parse_alpha(config.alpha);
  const auto law = parse_law(config.start == "uniform" ? "lower-half" : config.start);
  const auto result = billiards::phase_knudsen(table, params, law, config.ensemble,
                                               config.n_steps, config.bins, config.bins,
                                               config.seed, config.threads);
  OutputDir out(config);
  double max_chi = 0.0;
  for (double chi : result.s_chi_square) max_chi = std::max(max_chi, chi);
  if (out.enabled()) {
    std::vector<billiards::TraceColumn> columns(2);
    columns[0].name = "step";
    columns[1].name = "tv";
    for (std::size_t k = 0; k < result.tv.size(); ++k) {
      columns[0].values.push_back(static_cast<double>(k));
      columns[1].values.push_back(result.tv[k]);
    }
    std::ostringstream csv;
    billiards::write_columns_csv(csv, columns);
    out.write_text("phase_trace.csv", csv.str());

    std::vector<billiards::TraceColumn> chi_columns(2);
    chi_columns[0].name = "step";
    chi_columns[1].name = "s_chi_square";
    for (std::size_t k = 0; k < result.s_chi_square.size(); ++k) {
      chi_columns[0].values.push_back(static_cast<double>(k));
      chi_columns[1].values.push_back(result.s_chi_square[k]);
    }
    std::ostringstream chi_csv;
    billiards::write_columns_csv(chi_csv, chi_columns);
    out.write_text("s_marginal.csv", chi_csv.str());
  }
  json summary{{"command", "phase-evolve"},
               {"law", billiards::to_string(law)},
               {"ensemble", config.ensemble},
               {"grid", config.bins},
               {"steps", config.n_steps},
               {"tv_initial", result.tv.front()},
               {"tv_final", result.tv.back()},
               {"max_s_chi_square", max_chi}};
  if (out.enabled()) summary["outputs"] = out.manifest();
  print_summary(summary);
  return 0;
}

int cmd_lyapunov(const ExperimentConfig& config) {
  const auto table = billiards::make_table(parse_surface(config.surface), config.r0);
  const auto params = parse_alpha(config.alpha);
  const auto v = parse_direction(config.direction);
  const auto trace = billiards::lyapunov(table, params, {config.s0, config.theta0}, v,
                                         config.n_steps, config.seed);
  OutputDir out(config);
  if (out.enabled()) {
    std::vector<billiards::TraceColumn> columns(2);
    columns[0].name = "n";
    columns[1].name = "lambda_n";
    for (std::size_t k = 0; k < trace.steps.size(); ++k) {
      columns[0].values.push_back(static_cast<double>(trace.steps[k]));
      columns[1].values.push_back(trace.exponent[k]);
    }
    std::ostringstream csv;
    billiards::write_columns_csv(csv, columns);
    out.write_text("lyapunov.csv", csv.str());
  }
  json summary{{"command", "lyapunov"},
               {"n", config.n_steps},
               {"seed", config.seed},
               {"direction", {v[0], v[1]}},
               {"lambda_final", trace.exponent.back()}};
  if (out.enabled()) summary["outputs"] = out.manifest();
  print_summary(summary);
  return 0;
}

int cmd_mixing(const ExperimentConfig& config) {
  const auto table = billiards::make_table(parse_surface(config.surface), config.r0);
  const auto params = parse_alpha(config.alpha);

  billiards::PhaseIndicator f, g;
  if (config.indicator == "quarter") {
    const billiards::Rectangle quarter{0.0, table.L / 4, 0.0, billiards::pi / 2};
    f = billiards::rectangle_indicator(quarter);
    g = f;
  } else if (config.indicator == "lattice") {
    const auto states =
        billiards::enumerate_states(params, config.theta0, config.max_states);
    f = billiards::angle_neighborhood_indicator(states.angles, config.epsilon);
    g = f;
  } else {
    billiards::throw_validation(billiards::errc::invalid_argument,
                                "unknown indicator '" + config.indicator + "'");
  }

  const auto trace = billiards::mixing_correlation(table, params, f, g, config.lags,
                                                   config.ensemble, config.seed,
                                                   config.threads);
  OutputDir out(config);
  if (out.enabled()) {
    std::vector<billiards::TraceColumn> columns(3);
    columns[0].name = "lag";
    columns[1].name = "estimate";
    columns[2].name = "std_error";
    for (const auto& point : trace.points) {
      columns[0].values.push_back(static_cast<double>(point.lag));
      columns[1].values.push_back(point.estimate);
      columns[2].values.push_back(point.std_error);
    }
    std::ostringstream csv;
    billiards::write_columns_csv(csv, columns);
    out.write_text("mixing.csv", csv.str());
  }
  json lags = json::array(), estimates = json::array(), errors = json::array();
  for (const auto& point : trace.points) {
    lags.push_back(point.lag);
    estimates.push_back(point.estimate);
    errors.push_back(point.std_error);
  }
  json summary{{"command", "mixing"},       {"indicator", config.indicator},
               {"ensemble", config.ensemble}, {"lags", lags},
               {"estimates", estimates},    {"std_errors", errors}};
  if (out.enabled()) summary["outputs"] = out.manifest();
  print_summary(summary);
  return 0;
}

int cmd_dense(const ExperimentConfig& config) {
  const auto table = billiards::make_table(parse_surface(config.surface), config.r0);
  const auto params = parse_alpha(config.alpha);
  const auto trace = billiards::dense_orbit_test(table, params,
                                                 {config.s0, config.theta0}, config.pairs);
  OutputDir out(config);
  if (out.enabled()) {
    std::vector<billiards::TraceColumn> columns(2);
    columns[0].name = "n";
    columns[1].name = "gap";
    for (std::size_t k = 0; k < trace.pairs.size(); ++k) {
      columns[0].values.push_back(static_cast<double>(trace.pairs[k]));
      columns[1].values.push_back(trace.gap[k]);
    }
    std::ostringstream csv;
    billiards::write_columns_csv(csv, columns);
    out.write_text("dense.csv", csv.str());
  }
  json summary{{"command", "dense"},
               {"pairs", config.pairs},
               {"L", table.L},
               {"final_gap", trace.gap.back()}};
  if (out.enabled()) summary["outputs"] = out.manifest();
  print_summary(summary);
  return 0;
}

int cmd_verify(const ExperimentConfig& config) {
  billiards::VerifyOptions options;
  options.seed = config.seed;
  options.threads = config.threads;
  options.quick = config.quick;
  const auto results = billiards::run_verification(options);
  OutputDir out(config);
  std::ostringstream report;
  std::size_t failed = 0;
  for (const auto& result : results) {
    if (!result.pass) ++failed;
    report << (result.pass ? "[pass] " : "[FAIL] ") << result.name << " — "
           << result.detail << "\n";
  }
  std::cout << report.str();
  if (out.enabled()) out.write_text("verify.txt", report.str());
  json summary{{"command", "verify"},
               {"checks", results.size()},
               {"failed", failed},
               {"quick", config.quick}};
  if (out.enabled()) summary["outputs"] = out.manifest();
  print_summary(summary);
  return failed == 0 ? 0 : 2;
}

std::string lags_default(const std::vector<std::size_t>& lags) {
  std::string text = "[";
  for (std::size_t k = 0; k < lags.size(); ++k) {
    if (k > 0) text += ", ";
    text += std::to_string(lags[k]);
  }
  return text + "]";
}

// Every option carries a serializable default so config.txt always lists the
// full effective run.  --config and --out stay out of the file: the first is
// the file itself, the second is per-run scratch.
void add_common_options(CLI::App* cmd, ExperimentConfig& config) {
  cmd->add_option("--config", config.config_path, "key=value config file")
      ->configurable(false);
  cmd->add_option("--surface", config.surface, "flat | hyperbolic | spherical")
      ->capture_default_str();
  cmd->add_option("--r0", config.r0, "table radius")
      ->default_str(billiards::format_double(config.r0));
  cmd->add_option("--alpha", config.alpha, "mirror angle: decimal, or m/n of pi")
      ->capture_default_str();
  cmd->add_option("--theta0", config.theta0, "initial angle in (0, pi)")
      ->default_str(billiards::format_double(config.theta0));
  cmd->add_option("--s0", config.s0, "initial arc position in [0, L)")
      ->default_str(billiards::format_double(config.s0));
  cmd->add_option("--n-steps", config.n_steps, "number of steps")
      ->capture_default_str();
  cmd->add_option("--ensemble", config.ensemble, "Monte Carlo ensemble size")
      ->capture_default_str();
  cmd->add_option("--bins", config.bins, "histogram bins (per axis for phase grids)")
      ->capture_default_str();
  cmd->add_option("--seed", config.seed, "64-bit RNG seed")
      ->envname("BILLIARDS_SEED")
      ->capture_default_str();
  cmd->add_option("--out", config.out, "output directory")->configurable(false);
  cmd->add_option("--threads", config.threads, "worker threads (0 = hardware)")
      ->capture_default_str();
  cmd->add_option("--max-states", config.max_states, "angle chain state cap")
      ->capture_default_str();
  cmd->add_option("--start", config.start,
                  "initial law: uniform | invariant | lower-half | point")
      ->capture_default_str();
  cmd->add_option("--indicator", config.indicator, "mixing observable: quarter | lattice")
      ->capture_default_str();
  cmd->add_option("--epsilon", config.epsilon, "lattice indicator half-width")
      ->default_str(billiards::format_double(config.epsilon));
  cmd->add_option("--lags", config.lags, "correlation lags")
      ->default_str(lags_default(config.lags));
  cmd->add_option("--direction", config.direction, "cocycle direction 'a,b'")
      ->capture_default_str();
  cmd->add_option("--pairs", config.pairs, "number of (1,3) pairs")
      ->capture_default_str();
  cmd->add_flag("--quick", config.quick, "smaller verification sizes");
}

std::string strip_blank(const std::string& text) {
  const auto begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

std::string unquote(const std::string& text) {
  if (text.size() >= 2 && ((text.front() == '"' && text.back() == '"') ||
                           (text.front() == '\'' && text.back() == '\''))) {
    return text.substr(1, text.size() - 2);
  }
  return text;
}

// Applies key=value lines to every option the command line and environment
// left unset, so precedence is CLI flag > BILLIARDS_SEED > config > default.
void apply_config_file(CLI::App* cmd, const std::string& path) {
  std::ifstream in(path);
  billiards::require(in.good(), billiards::errc::invalid_path,
                     "cannot open config file '" + path + "'");
  std::string line;
  while (std::getline(in, line)) {
    const std::string entry = strip_blank(line);
    if (entry.empty() || entry.front() == '#' || entry.front() == ';') continue;
    const auto split = entry.find('=');
    billiards::require(split != std::string::npos, billiards::errc::invalid_argument,
                       "config line is not key=value: '" + entry + "'");
    const std::string key = strip_blank(entry.substr(0, split));
    const std::string value = strip_blank(entry.substr(split + 1));
    CLI::Option* option = cmd->get_option_no_throw("--" + key);
    billiards::require(option != nullptr, billiards::errc::invalid_argument,
                       "unknown config key '" + key + "'");
    if (!option->get_configurable() || option->count() > 0) continue;
    std::size_t added = 0;
    if (value.size() >= 2 && value.front() == '[' && value.back() == ']') {
      std::istringstream items(value.substr(1, value.size() - 2));
      std::string item;
      while (std::getline(items, item, ',')) {
        option->add_result(unquote(strip_blank(item)));
        ++added;
      }
    } else {
      option->add_result(unquote(value));
      ++added;
    }
    if (added > 0) option->run_callback();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"random circular billiards laboratory"};
  app.require_subcommand(1);

  ExperimentConfig config;
  struct Command {
    const char* name;
    const char* help;
    int (*run)(const ExperimentConfig&);
  };
  const Command commands[] = {
      {"table", "print geometry constants", cmd_table},
      {"chain", "enumerate and analyze the angle chain", cmd_chain},
      {"simulate", "run one random trajectory", cmd_simulate},
      {"evolve", "iterate the transition kernel on a histogram", cmd_evolve},
      {"phase-evolve", "Monte Carlo phase-space convergence", cmd_phase_evolve},
      {"lyapunov", "cocycle growth along one orbit", cmd_lyapunov},
      {"mixing", "correlation decay of indicator observables", cmd_mixing},
      {"dense", "even-time orbit closure of the word (1,3)", cmd_dense},
      {"verify", "run the full invariant suite", cmd_verify},
  };

  int (*selected)(const ExperimentConfig&) = nullptr;
  CLI::App* selected_sub = nullptr;
  for (const auto& command : commands) {
    CLI::App* sub = app.add_subcommand(command.name, command.help);
    add_common_options(sub, config);
    sub->callback([&selected, &selected_sub, sub, run = command.run] {
      selected = run;
      selected_sub = sub;
    });
  }

  try {
    app.parse(argc, argv);
    if (selected_sub != nullptr && !config.config_path.empty()) {
      apply_config_file(selected_sub, config.config_path);
    }
    if (selected_sub != nullptr) {
      effective_config_text = selected_sub->config_to_str(true, false);
    }
  } catch (const CLI::CallForHelp& help) {
    return app.exit(help);
  } catch (const CLI::CallForAllHelp& help) {
    return app.exit(help);
  } catch (const CLI::ParseError& error) {
    app.exit(error);
    return 1;
  } catch (const billiards::ValidationError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }

  try {
    return selected(config);
  } catch (const billiards::ValidationError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  } catch (const billiards::InternalError& error) {
    std::cerr << "internal error: " << error.what() << "\n";
    return 2;
  } catch (const std::exception& error) {
    std::cerr << "internal error: " << error.what() << "\n";
    return 2;
  }
}
