// Experiment runner: one subcommand per experiment kind.
//
//   sgdlab <kind> [--config FILE] [--out FILE] [--seed U64] [--runs N] [--threads N]

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "sgdlab/errors.hpp"
#include "sgdlab/experiment.hpp"
#include "sgdlab/problem.hpp"

namespace {

void warn_truncation(const nlohmann::json& doc) {
  auto check = [](const nlohmann::json& instance) {
    if (!instance.is_object() || !instance.contains("spectrum")) return;
    const auto& spec = instance["spectrum"];
    if (!spec.is_object() || !spec.contains("kind") || !spec.contains("d")) return;
    try {
      const auto kind = sgdlab::spectrum_kind_from_string(spec["kind"].get<std::string>());
      if (kind == sgdlab::SpectrumKind::Explicit) return;
      const auto d = spec["d"].get<std::size_t>();
      const double param = spec.value("param", 0.0);
      if (sgdlab::truncation_warning(kind, d, param)) {
        std::cerr << "warning: truncating the " << sgdlab::to_string(kind) << " spectrum at d=" << d
                  << " drops more than 1e-6 of its trace\n";
      }
    } catch (const std::exception&) {
      // Config validation reports malformed spectra.
    }
  };
  if (doc.contains("instance")) check(doc["instance"]);
  if (doc.contains("instances") && doc["instances"].is_array()) {
    for (const auto& item : doc["instances"]) check(item);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Last-iterate SGD laboratory: schedules, exact risk, Monte Carlo and bounds"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<unsigned> threads;

  const char* kinds[] = {"schedule_trace", "exact_curve", "mc_sweep", "bounds_table",
                         "fig2",           "rates",       "compare"};
  for (const char* name : kinds) {
    auto* sub = app.add_subcommand(name, std::string("Run the ") + name + " experiment");
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "Output path (overrides config output_path)");
    sub->add_option("--seed", seed, "Master seed for Monte Carlo streams");
    sub->add_option("--runs", runs, "Monte Carlo runs per cell")->check(CLI::PositiveNumber);
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  }
  CLI11_PARSE(app, argc, argv);

  const std::string kind_name = app.get_subcommands().front()->get_name();
  try {
    const auto kind = sgdlab::experiment_kind_from_string(kind_name);
    sgdlab::ExperimentConfig config = sgdlab::default_config(kind);
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        std::cerr << "error: config: " << e.what() << '\n';
        return 2;
      }
      warn_truncation(doc);
      config = sgdlab::config_from_json(doc, kind);
    }
    if (!out_path.empty()) config.output_path = out_path;
    if (seed) config.sim.master_seed = *seed;
    if (runs) config.sim.runs = *runs;
    if (threads) config.sim.threads = *threads;

    std::ofstream out(config.output_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot open output file " << config.output_path << '\n';
      return 3;
    }
    std::optional<std::ofstream> fit_out;
    if (kind == sgdlab::ExperimentKind::Rates) {
      fit_out.emplace(config.output_path + ".fit.json", std::ios::binary);
      if (!*fit_out) {
        std::cerr << "error: cannot open " << config.output_path << ".fit.json\n";
        return 3;
      }
    }
    sgdlab::run_experiment(config, out, fit_out ? &*fit_out : nullptr);
    out.flush();
    if (!out) {
      std::cerr << "error: write to " << config.output_path << " failed\n";
      return 3;
    }
    std::cout << "wrote " << config.output_path << '\n';
  } catch (const sgdlab::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
