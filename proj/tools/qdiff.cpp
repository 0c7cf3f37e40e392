// qdiff: command-line front end for the quality-differentiation model.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "qdiff/errors.hpp"
#include "qdiff/experiments.hpp"

namespace {

int default_threads() {
  if (const char* env = std::getenv("QDIFF_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
    std::cerr << "qdiff: ignoring invalid QDIFF_THREADS='" << env << "'\n";
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct Options {
  std::string config;
  std::string out;
  std::string format;
  std::uint64_t seed = 1;
  int threads = 1;
  std::int64_t buyers = 1000000;
  std::string figure;
};

void emit(qdiff::Table& table, const Options& opt, const std::optional<qdiff::ScenarioConfig>& cfg) {
  std::string path = opt.out;
  std::string format = opt.format;
  if (cfg && cfg->output) {
    if (path.empty()) path = cfg->output->path;
    if (format.empty()) format = cfg->output->format;
  }
  if (format.empty()) format = "csv";
  if (!table.meta.contains("seed")) table.meta["seed"] = opt.seed;
  if (cfg && !cfg->source.is_null()) table.meta["config"] = cfg->source;

  auto write = [&](std::ostream& os) {
    if (format == "json") {
      qdiff::write_json(os, table);
    } else {
      qdiff::write_csv(os, table);
    }
  };
  if (path.empty() || path == "-") {
    write(std::cout);
    std::cout.flush();
    if (!std::cout) throw std::runtime_error("failed writing to standard output");
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file '" + path + "'");
  write(file);
  file.close();
  if (!file) throw std::runtime_error("failed writing output file '" + path + "'");
}

qdiff::ScenarioConfig require_config(const Options& opt) {
  if (opt.config.empty()) throw qdiff::ConfigError("--config is required for this command");
  return qdiff::load_config(opt.config);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quality differentiation under imperfect buyer perception"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qdiff::kVersion));

  Options opt;
  opt.threads = default_threads();
  app.add_option("--config", opt.config, "Scenario file (JSON, // comments allowed)");
  app.add_option("--out", opt.out, "Output file (default: standard output)");
  app.add_option("--format", opt.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--seed", opt.seed, "Random seed for validate");
  app.add_option("--threads", opt.threads, "Worker threads (default: $QDIFF_THREADS or all cores)")
      ->check(CLI::PositiveNumber);

  struct Command {
    const char* name;
    const char* help;
  };
  const Command reports[] = {
      {"eval", "Expected profit of the configured product line"},
      {"optimize", "Optimal qualities for product.variants"},
      {"phase", "Compare the best one- and two-variant displays"},
      {"price", "Joint quality/price optimum (homogeneous population)"},
      {"spam", "Optimal quality and number of offers for spam"},
  };
  std::vector<std::pair<std::string, CLI::App*>> report_cmds;
  for (const auto& c : reports) report_cmds.emplace_back(c.name, app.add_subcommand(c.name, c.help));
  auto* variants = app.add_subcommand("variants", "Optimum for M = 1..product.max_variants");
  auto* figure = app.add_subcommand("figure", "Reproduce the data behind a figure");
  figure->add_option("id", opt.figure, "Figure id")
      ->required()
      ->check(CLI::IsMember(qdiff::figure_ids()));
  auto* sweep = app.add_subcommand("sweep", "Grid over one or two parameters");
  auto* validate = app.add_subcommand("validate", "Analytic profit against Monte Carlo");
  validate->add_option("--buyers", opt.buyers, "Simulated buyers")->check(CLI::Range(2LL, 1LL << 40));

  // Options are accepted after the subcommand as well.
  for (auto* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
    sub->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    for (const auto& [name, cmd] : report_cmds) {
      if (!cmd->parsed()) continue;
      const auto cfg = require_config(opt);
      auto table = qdiff::run_report(name, cfg);
      emit(table, opt, cfg);
      return 0;
    }
    if (variants->parsed()) {
      const auto cfg = require_config(opt);
      auto table = qdiff::run_variant_table(cfg);
      emit(table, opt, cfg);
    } else if (figure->parsed()) {
      auto table = qdiff::run_figure(opt.figure, opt.threads);
      emit(table, opt, std::nullopt);
    } else if (sweep->parsed()) {
      const auto cfg = require_config(opt);
      auto table = qdiff::run_sweep(cfg, opt.threads);
      emit(table, opt, cfg);
    } else if (validate->parsed()) {
      const auto cfg = require_config(opt);
      auto outcome = qdiff::run_validate(cfg, opt.buyers, opt.seed, opt.threads);
      emit(outcome.table, opt, cfg);
      if (!outcome.passed) {
        std::cerr << "qdiff: validation failed (sampled profit outside 4 standard errors)\n";
        return 3;
      }
    }
  } catch (const qdiff::ConfigError& e) {
    std::cerr << "qdiff: config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "qdiff: error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
