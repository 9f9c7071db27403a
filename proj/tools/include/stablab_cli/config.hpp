#pragma once

// Experiment configuration: an INI-style file (or JSON with the same
// sections) parsed into typed blocks with field-level validation.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "stablab/lepage.hpp"
#include "stablab/moment_index.hpp"
#include "stablab/nets.hpp"
#include "stablab/sampler.hpp"

namespace stablab::cli {

/// Validation failure; the message starts with the offending field path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  KernelFamily family = KernelFamily::hfsm;
  double alpha = 1.5;
  /// One value for hfsm, one per axis for hfss; unused for riesz_bessel.
  std::vector<double> hurst{0.5};
  double gamma = 0.0;
  double eta = 0.0;
  std::size_t dim = 1;
  /// Density constant. hfsm default: the normalization with ||X(e_1)|| = 1.
  std::optional<double> c;
  double normalization = 1.0;
  std::optional<double> phi_beta;
  double phi_eta = 0.1;

  FieldModel build() const;
};

struct BudgetConfig {
  std::size_t terms = 1000;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
};

struct AnalysisConfig {
  double gamma = 0.5;
  double epsilon = 0.5;
  int n_lo = 4;
  int n_hi = 10;
  /// Finest level simulated by the modulus command.
  int max_level = 12;
  /// Moment-index grid {2^k_lo, ..., 2^k_hi}.
  int k_lo = 4;
  int k_hi = 16;
  SequenceSpec source;
  MaxMethod method = MaxMethod::direct;
  std::size_t resamples = 1000;
};

struct NetConfig {
  NetKind kind = NetKind::dyadic;
  std::optional<std::size_t> dim;
  int level = 8;
  std::vector<double> hurst;
};

struct OutputConfig {
  std::optional<std::string> directory;
  bool csv = true;
  bool binary = false;
};

struct ExperimentConfig {
  std::optional<ModelConfig> model;
  BudgetConfig budget;
  AnalysisConfig analysis;
  NetConfig net;
  OutputConfig output;

  const ModelConfig& require_model() const;
};

/// Section -> key -> raw value, the common form of both file formats.
using RawConfig = std::map<std::string, std::map<std::string, std::string>>;

RawConfig parse_ini(const std::string& text);
RawConfig parse_json(const std::string& text);
/// JSON when the first non-blank character is '{', INI otherwise.
RawConfig parse_text(const std::string& text);

ExperimentConfig from_raw(const RawConfig& raw);
ExperimentConfig load_config(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const ExperimentConfig& config);
/// Hex FNV-1a of the compact JSON form.
std::string config_hash(const ExperimentConfig& config);

}  // namespace stablab::cli
