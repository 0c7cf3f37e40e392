#include "qdiff/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "qdiff/errors.hpp"

namespace qdiff {
namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

double number(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + ": missing '" + key + "'");
  if (!it->is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
  return it->get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

std::int64_t integer(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(where + ": missing '" + key + "'");
  if (!it->is_number_integer()) throw ConfigError(where + ": '" + key + "' must be an integer");
  return it->get<std::int64_t>();
}

std::vector<double> numbers(const json& obj, const char* key, const std::string& where) {
  std::vector<double> out;
  if (!obj.contains(key)) return out;
  const json& arr = obj.at(key);
  if (!arr.is_array()) throw ConfigError(where + ": '" + key + "' must be an array");
  for (const auto& v : arr) {
    if (!v.is_number()) throw ConfigError(where + ": '" + key + "' must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

PopulationSpec parse_population(const json& j) {
  const std::string where = "population";
  check_keys(j, {"groups", "n_buyers"}, where);
  PopulationSpec spec;
  if (!j.contains("groups") || !j.at("groups").is_array() || j.at("groups").empty()) {
    throw ConfigError(where + ": 'groups' must be a non-empty array");
  }
  for (const auto& g : j.at("groups")) {
    const std::string gw = where + ".groups[]";
    check_keys(g, {"alpha", "sigma", "proportion"}, gw);
    spec.groups.push_back({number(g, "alpha", gw), number_or(g, "sigma", 0.0, gw),
                           number_or(g, "proportion", 1.0, gw)});
  }
  if (j.contains("n_buyers")) spec.n_buyers = integer(j, "n_buyers", where);
  return spec;
}

ProductSpec parse_product(const json& j) {
  const std::string where = "product";
  check_keys(j, {"variants", "qualities", "weights", "price", "beta", "gamma", "max_variants"},
             where);
  ProductSpec spec;
  spec.qualities = numbers(j, "qualities", where);
  spec.weights = numbers(j, "weights", where);
  spec.variants = j.contains("variants") ? static_cast<int>(integer(j, "variants", where))
                  : !spec.qualities.empty() ? static_cast<int>(spec.qualities.size())
                  : !spec.weights.empty()   ? static_cast<int>(spec.weights.size())
                                            : 1;
  spec.price = number_or(j, "price", 1.0, where);
  spec.beta = number_or(j, "beta", 1.0, where);
  spec.gamma = number_or(j, "gamma", 1.0, where);
  if (j.contains("max_variants")) {
    spec.max_variants = static_cast<int>(integer(j, "max_variants", where));
  }
  if (spec.variants < 1) throw ConfigError(where + ": 'variants' must be >= 1");
  if (!spec.qualities.empty() && static_cast<int>(spec.qualities.size()) != spec.variants) {
    throw ConfigError(where + ": 'qualities' does not match 'variants'");
  }
  if (!spec.weights.empty() && static_cast<int>(spec.weights.size()) != spec.variants) {
    throw ConfigError(where + ": 'weights' does not match 'variants'");
  }
  return spec;
}

CostSpec parse_cost(const json& j) {
  const std::string where = "cost";
  check_keys(j, {"z", "mode"}, where);
  CostSpec spec;
  spec.z = number_or(j, "z", 0.0, where);
  if (j.contains("mode")) {
    const json& m = j.at("mode");
    if (m == "independent") {
      spec.mode = ProductionMode::independent;
    } else if (m == "damaged-goods") {
      spec.mode = ProductionMode::damaged_goods;
    } else {
      throw ConfigError(where + ": 'mode' must be \"independent\" or \"damaged-goods\"");
    }
  }
  return spec;
}

SpamSpec parse_spam(const json& j) {
  const std::string where = "spam";
  check_keys(j, {"alpha", "z", "perception_cap", "quality", "count"}, where);
  SpamSpec spec;
  spec.alpha = number(j, "alpha", where);
  spec.z = number(j, "z", where);
  if (j.contains("perception_cap")) spec.perception_cap = integer(j, "perception_cap", where);
  if (j.contains("quality")) spec.quality = number(j, "quality", where);
  if (j.contains("count")) spec.count = integer(j, "count", where);
  return spec;
}

SweepSpec parse_sweep(const json& j) {
  const std::string where = "sweep";
  check_keys(j, {"axes", "report"}, where);
  SweepSpec spec;
  if (!j.contains("axes") || !j.at("axes").is_array()) {
    throw ConfigError(where + ": 'axes' must be an array");
  }
  for (const auto& a : j.at("axes")) {
    const std::string aw = where + ".axes[]";
    check_keys(a, {"variable", "from", "to", "step"}, aw);
    if (!a.contains("variable") || !a.at("variable").is_string()) {
      throw ConfigError(aw + ": 'variable' must be a string");
    }
    spec.axes.push_back({a.at("variable").get<std::string>(), number(a, "from", aw),
                         number(a, "to", aw), number(a, "step", aw)});
  }
  if (spec.axes.empty() || spec.axes.size() > 2) {
    throw ConfigError(where + ": one or two axes required");
  }
  if (j.contains("report")) {
    if (!j.at("report").is_string()) throw ConfigError(where + ": 'report' must be a string");
    spec.report = j.at("report").get<std::string>();
  }
  return spec;
}

OutputSpec parse_output(const json& j) {
  const std::string where = "output";
  check_keys(j, {"path", "format"}, where);
  OutputSpec spec;
  if (j.contains("path")) spec.path = j.at("path").get<std::string>();
  if (j.contains("format")) spec.format = j.at("format").get<std::string>();
  if (spec.format != "csv" && spec.format != "json") {
    throw ConfigError(where + ": 'format' must be csv or json");
  }
  return spec;
}

}  // namespace

Population PopulationSpec::build() const {
  std::vector<BuyerGroup> gs;
  for (const auto& g : groups) gs.emplace_back(g.alpha, g.sigma, g.proportion);
  return Population(std::move(gs), n_buyers);
}

VectorXd ProductSpec::weight_vector() const {
  if (weights.empty()) return VectorXd();
  return Eigen::Map<const VectorXd>(weights.data(), static_cast<Index>(weights.size()));
}

ProductLine ProductSpec::build_line() const {
  if (qualities.empty()) throw ConfigError("product: 'qualities' required");
  return ProductLine(
      Eigen::Map<const VectorXd>(qualities.data(), static_cast<Index>(qualities.size())),
      weight_vector(), shape());
}

std::vector<double> SweepAxis::points() const {
  if (!(step > 0) || !(to >= from) || !std::isfinite(from) || !std::isfinite(to)) {
    throw ConfigError("sweep axis '" + variable + "': empty or invalid range");
  }
  const auto n = static_cast<std::int64_t>(std::floor((to - from) / step + 1e-9)) + 1;
  if (n > 10'000'000) throw ConfigError("sweep axis '" + variable + "': too many points");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) out.push_back(std::min(to, from + i * step));
  return out;
}

ScenarioConfig parse_config(const nlohmann::json& doc) {
  check_keys(doc, {"population", "product", "cost", "spam", "sweep", "output"}, "config");
  ScenarioConfig cfg;
  cfg.source = doc;
  try {
    if (doc.contains("population")) cfg.population = parse_population(doc.at("population"));
    if (doc.contains("product")) cfg.product = parse_product(doc.at("product"));
    if (doc.contains("cost")) cfg.cost = parse_cost(doc.at("cost"));
    if (doc.contains("spam")) cfg.spam = parse_spam(doc.at("spam"));
    if (doc.contains("sweep")) cfg.sweep = parse_sweep(doc.at("sweep"));
    if (doc.contains("output")) cfg.output = parse_output(doc.at("output"));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

ScenarioConfig parse_config_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: parse error: ") + e.what());
  }
  return parse_config(doc);
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace qdiff
