#include "fblf/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <optional>
#include <set>

namespace fblf {

namespace pt = boost::property_tree;

ConfigError::ConfigError(std::string field, const std::string& message)
    : std::runtime_error(field.empty() ? message : fmt::format("{}: {}", field, message)),
      field_(std::move(field)) {}

namespace {

const std::set<std::string> kKnownKeys = {
    "model", "T",     "theorem", "mode", "eps", "b_V", "b_e", "gamma", "theta_bar",
    "K",     "N",     "dir",     "out",  "svg", "allow_mode_mismatch"};

// A '#' or ';' preceded by whitespace starts a trailing comment outside quotes.
std::string strip_inline_comment(const std::string& s) {
  char quote = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote != 0) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if ((c == '#' || c == ';') && i > 0 && (s[i - 1] == ' ' || s[i - 1] == '\t')) {
      const auto end = s.find_last_not_of(" \t", i - 1);
      return end == std::string::npos ? std::string() : s.substr(0, end + 1);
    }
  }
  return s;
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

// Flattens one level of sections; a key may appear only once overall.
std::map<std::string, std::string> flatten(const pt::ptree& tree) {
  std::map<std::string, std::string> out;
  const auto add = [&](const std::string& key, const std::string& value) {
    if (!kKnownKeys.contains(key)) throw ConfigError(key, "unknown key");
    if (!out.emplace(key, unquote(strip_inline_comment(value))).second) throw ConfigError(key, "given more than once");
  };
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      add(key, node.data());
    } else {
      for (const auto& [sub_key, sub] : node) add(sub_key, sub.data());
    }
  }
  return out;
}

class Fields {
 public:
  explicit Fields(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  std::optional<std::string> text(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<double> number(const std::string& key) const {
    const auto raw = text(key);
    if (!raw) return std::nullopt;
    double value = 0.0;
    const char* end = raw->data() + raw->size();
    const auto [ptr, ec] = std::from_chars(raw->data(), end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
      throw ConfigError(key, fmt::format("'{}' is not a finite number", *raw));
    }
    return value;
  }

  std::optional<double> positive(const std::string& key) const {
    const auto value = number(key);
    if (value && !(*value > 0.0)) throw ConfigError(key, "must be positive");
    return value;
  }

  std::optional<std::size_t> count(const std::string& key) const {
    const auto value = positive(key);
    if (!value) return std::nullopt;
    if (std::floor(*value) != *value) throw ConfigError(key, "must be a whole number");
    return static_cast<std::size_t>(*value);
  }

  std::optional<bool> flag(const std::string& key) const {
    const auto raw = text(key);
    if (!raw) return std::nullopt;
    if (*raw == "true" || *raw == "1" || *raw == "yes") return true;
    if (*raw == "false" || *raw == "0" || *raw == "no") return false;
    throw ConfigError(key, fmt::format("'{}' is not a boolean", *raw));
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace

RunConfig parse_run_config(std::istream& is) {
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", fmt::format("malformed config: {}", e.message()));
  }
  const Fields fields(flatten(tree));

  RunConfig cfg;
  if (auto model = fields.text("model")) cfg.model = *model;
  if (cfg.model != "scalar-I" && cfg.model != "scalar-II") {
    throw ConfigError("model", fmt::format("unknown model '{}'", cfg.model));
  }
  const bool model_two = cfg.model == "scalar-II";

  auto& ctl = cfg.controller;
  if (auto theorem = fields.text("theorem")) {
    if (*theorem == "1") {
      ctl.theorem = Theorem::One;
    } else if (*theorem == "2") {
      ctl.theorem = Theorem::Two;
    } else {
      throw ConfigError("theorem", "must be 1 or 2");
    }
  }
  const auto mode = fields.text("mode");
  if (mode) {
    if (*mode == "disc") {
      ctl.mode = RobustMode::Discontinuous;
    } else if (*mode == "cont") {
      ctl.mode = RobustMode::Continuous;
    } else {
      throw ConfigError("mode", "must be disc or cont");
    }
  } else {
    ctl.mode = ctl.theorem == Theorem::Two ? RobustMode::Continuous : RobustMode::Discontinuous;
  }

  const auto eps = fields.positive("eps");
  if (ctl.mode == RobustMode::Continuous) {
    if (!eps) throw ConfigError("eps", "required when mode = cont");
    ctl.eps = *eps;
  } else if (eps) {
    ctl.eps = *eps;
  }
  if (ctl.theorem == Theorem::Two && ctl.mode != RobustMode::Continuous &&
      !fields.flag("allow_mode_mismatch").value_or(false)) {
    throw ConfigError("mode", "theorem 2 uses mode = cont (set allow_mode_mismatch to override)");
  }
  if (ctl.theorem == Theorem::Two && !eps) throw ConfigError("eps", "required for theorem 2");

  const char* bound_key = model_two ? "b_e" : "b_V";
  const char* other_key = model_two ? "b_V" : "b_e";
  if (fields.text(other_key)) {
    throw ConfigError(other_key, fmt::format("not used by {}; set {}", cfg.model, bound_key));
  }
  ctl.bound = fields.positive(bound_key).value_or(model_two ? 1.0 : 0.5);
  ctl.gamma = fields.positive("gamma").value_or(2.0);
  ctl.theta_bar = fields.positive("theta_bar").value_or(1.0);

  cfg.iterations = fields.count("K").value_or(cfg.iterations);
  cfg.steps = fields.count("N").value_or(cfg.steps);
  if (cfg.steps < 2) throw ConfigError("N", "must be at least 2");
  cfg.horizon = fields.positive("T").value_or(0.0);

  if (fields.text("dir") && fields.text("out")) throw ConfigError("out", "duplicates dir");
  cfg.output_dir = fields.text("dir").value_or(fields.text("out").value_or(cfg.output_dir));
  cfg.emit_svg = fields.flag("svg").value_or(false);
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", fmt::format("cannot open config '{}'", path));
  return parse_run_config(in);
}

ErrorModel make_model(const RunConfig& config) {
  ErrorModel model = builtin_model(config.model);
  if (config.horizon > 0.0) {
    std::visit([&](auto& m) { m.T = config.horizon; }, model);
  }
  return model;
}

}  // namespace fblf
