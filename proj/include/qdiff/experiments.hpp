#pragma once

// Figure presets, parameter sweeps and analytic-vs-sampled validation on top
// of the model, optimizer, spam and Monte Carlo modules. Every entry point
// returns a Table whose row order does not depend on the thread count.

#include <cstdint>
#include <string>
#include <vector>

#include "qdiff/config.hpp"
#include "qdiff/table.hpp"

namespace qdiff {

/// f2 f3 f4 f6 f7a f7b f8a f8b f10 f11 f13
const std::vector<std::string>& figure_ids();

/// Reproduces the data behind one figure with its caption parameters.
Table run_figure(const std::string& id, int threads = 1);

/// Report kinds usable as a sweep report or as a one-shot command:
/// eval single optimize phase variants price spam
const std::vector<std::string>& report_kinds();

std::vector<std::string> report_columns(const std::string& report, const ScenarioConfig& cfg);
std::vector<Cell> report_row(const std::string& report, const ScenarioConfig& cfg);

/// Sets one sweep variable (c2, z, r2, alpha<i>, sigma<i>, price; alpha and
/// z address the spam section for the spam report).
void apply_axis(ScenarioConfig& cfg, const std::string& variable, double value,
                const std::string& report);

/// One report evaluated at the configuration as given.
Table run_report(const std::string& report, const ScenarioConfig& cfg);

/// Per-M optimum table for M = 1..product.max_variants.
Table run_variant_table(const ScenarioConfig& cfg);

/// 1-D or 2-D grid over cfg.sweep; rows in lexicographic axis order.
Table run_sweep(const ScenarioConfig& cfg, int threads = 1);

struct ValidationOutcome {
  Table table;
  bool passed = false;
};

/// Analytic expectation and Monte Carlo estimate side by side; passes when
/// they differ by less than 4 standard errors. Uses the spam section when
/// present, otherwise population/product/cost.
ValidationOutcome run_validate(const ScenarioConfig& cfg, std::int64_t n_buyers,
                               std::uint64_t seed, int threads = 1);

}  // namespace qdiff
