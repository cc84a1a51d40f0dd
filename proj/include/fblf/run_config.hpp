#ifndef FBLF_RUN_CONFIG_HPP
#define FBLF_RUN_CONFIG_HPP

#include "fblf/controller.hpp"
#include "fblf/plant.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>

namespace fblf {

/// Raised for a missing, malformed or out-of-range configuration value.
/// `field()` names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message);
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// One simulation experiment. See README for the file schema.
struct RunConfig {
  std::string model = "scalar-I";
  ControllerConfig controller;
  std::size_t iterations = 30;
  std::size_t steps = 2000;
  /// Horizon override; zero keeps the model's own T.
  double horizon = 0.0;
  std::string output_dir = ".";
  bool emit_svg = false;
};

/// Parses `key = value` lines with optional [section] headers; keys may
/// appear at top level or inside any section. '#' and ';' start comments.
RunConfig parse_run_config(std::istream& is);
RunConfig load_run_config(const std::string& path);

/// The configured model with the horizon override applied.
ErrorModel make_model(const RunConfig& config);

}  // namespace fblf

#endif  // FBLF_RUN_CONFIG_HPP
