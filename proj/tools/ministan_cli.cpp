// Command-line front end for MiniStan causal programs.
//
//   ministan simulate <program.ms> [--n N] [--seed S]
//   ministan intervene <program.ms> --spec '<intervention json>'
//   ministan score <program.ms> --trace '<json or file>'
//   ministan replicate [--config plan.json] [--out DIR] [--seed S] [--observe s]
//   ministan oracle --data data.json [--n N] [--seed S]
//
// Exit codes: 0 success, 1 domain error, 2 usage error. Errors are reported
// as a single JSON object on stderr.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ministan/error.hpp"
#include "ministan/harness.hpp"

namespace {

using ministan::Error;
using ministan::ErrorKind;
using ministan::Json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, path, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_json_arg(const std::string& text, const char* what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw UsageError(std::string("malformed JSON in ") + what + ": " + e.what());
  }
}

// Inline JSON, or a path to a JSON file.
Json json_or_file(const std::string& arg, const char* what) {
  auto first = arg.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (arg[first] == '{' || arg[first] == '[')) {
    return parse_json_arg(arg, what);
  }
  return parse_json_arg(read_file(arg), what);
}

int report(const std::string& kind, const std::string& subject,
           const std::string& message, int code) {
  Json err = {{"error", kind}, {"subject", subject}, {"message", message}};
  std::cerr << err.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MiniStan causal program toolkit"};
  app.require_subcommand(1);

  std::string program_file;
  std::size_t n = 1;
  std::uint64_t seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Simulate traces as JSON lines");
  simulate->add_option("program", program_file, "MiniStan program file")->required();
  simulate->add_option("--n", n, "Number of traces")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "RNG seed");

  std::string spec;
  auto* intervene = app.add_subcommand("intervene", "Print an intervened program");
  intervene->add_option("program", program_file, "MiniStan program file")->required();
  intervene->add_option("--spec", spec, "Intervention JSON descriptor")->required();
  bool lenient = false;
  intervene->add_flag("--lenient", lenient,
                      "Leave the program unchanged if the variable is undefined");

  std::string trace_arg;
  auto* score = app.add_subcommand("score", "Print the log density of a trace");
  score->add_option("program", program_file, "MiniStan program file")->required();
  score->add_option("--trace", trace_arg, "Trace JSON (inline or file)")->required();

  std::string config_file, out_dir = "results";
  std::vector<std::string> observe_extra;
  std::size_t particles = 0;
  auto* replicate = app.add_subcommand("replicate", "Run the experiment ladder");
  replicate->add_option("--config", config_file, "Plan JSON file");
  replicate->add_option("--out", out_dir, "Output directory");
  auto* replicate_seed = replicate->add_option("--seed", seed, "Master seed");
  replicate->add_option("--observe", observe_extra,
                        "Additional observed variable (e.g. s)");
  replicate->add_option("--particles", particles, "Override particle count")
      ->check(CLI::PositiveNumber);

  std::string data_file;
  std::size_t oracle_samples = 100000;
  auto* oracle = app.add_subcommand("oracle", "Prior importance-sampling posterior");
  oracle->add_option("--data", data_file, "Dataset JSON file")->required();
  oracle->add_option("--n", oracle_samples, "Number of samples")->check(CLI::PositiveNumber);
  oracle->add_option("--seed", seed, "RNG seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report("UsageError", "", e.what(), 2);
  }

  try {
    if (*simulate) {
      auto p = ministan::parse_program(read_file(program_file));
      for (std::size_t i = 0; i < n; ++i) {
        auto rng = ministan::make_rng(seed, {i});
        std::cout << ministan::trace_to_json(ministan::simulate(p, rng)).dump() << '\n';
      }
    } else if (*intervene) {
      auto p = ministan::parse_program(read_file(program_file),
                                       {.allow_free_variables = true});
      auto i = ministan::intervention_from_json(parse_json_arg(spec, "--spec"));
      std::cout << ministan::print_program(
                       ministan::apply_intervention(p, i, {.lenient = lenient}))
                << '\n';
    } else if (*score) {
      auto p = ministan::parse_program(read_file(program_file));
      auto full = ministan::env_from_json(json_or_file(trace_arg, "--trace"));
      std::cout << ministan::format_number(ministan::log_density(p, full)) << '\n';
    } else if (*replicate) {
      ministan::ExperimentPlan plan =
          config_file.empty()
              ? ministan::default_plan()
              : ministan::plan_from_json(parse_json_arg(read_file(config_file), "--config"));
      for (const auto& v : observe_extra) {
        if (std::find(plan.observed_vars.begin(), plan.observed_vars.end(), v) ==
            plan.observed_vars.end()) {
          plan.observed_vars.push_back(v);
        }
      }
      if (particles) plan.smc.n_particles = particles;
      std::uint64_t master = replicate_seed->count() ? seed : plan.smc.seed;
      auto report_out = ministan::replicate(plan, master, out_dir);
      std::cout << ministan::ladder_report_to_json(report_out).dump(2) << '\n';
    } else if (*oracle) {
      auto data = ministan::dataset_from_json(
          parse_json_arg(read_file(data_file), "--data"));
      auto s = ministan::is_oracle(data, oracle_samples, seed);
      std::cout << ministan::oracle_summary_to_json(s).dump(2) << '\n';
    }
  } catch (const UsageError& e) {
    return report("UsageError", "", e.what(), 2);
  } catch (const Error& e) {
    return report(std::string(ministan::to_string(e.kind())), e.subject(), e.what(), 1);
  } catch (const std::filesystem::filesystem_error& e) {
    return report("IoError", e.path1().string(), e.what(), 1);
  }
  return 0;
}
