#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "stablab_cli/config.hpp"

namespace stablab::cli {

/// manifest.json: written before any other output, rewritten on completion.
class Manifest {
 public:
  Manifest(std::filesystem::path dir, std::string command, const ExperimentConfig& config);

  void set_seed(const std::string& stage, std::uint64_t seed) { seeds_[stage] = seed; }
  void begin();
  bool begun() const noexcept { return begun_; }
  void record(const std::string& file) { outputs_.push_back(file); }
  void finish(std::string_view status);

 private:
  void write() const;

  std::filesystem::path dir_;
  std::string command_;
  std::string config_hash_;
  std::string started_;
  std::string finished_;
  std::string status_ = "running";
  bool begun_ = false;
  std::map<std::string, std::uint64_t> seeds_;
  std::vector<std::string> outputs_;
};

struct Context {
  ExperimentConfig config;
  std::filesystem::path dir;
  std::size_t workers = 1;
  int verbosity = 0;
  std::ostream& out;
  std::ostream& log;
  Manifest& manifest;

  void info(std::string_view msg) const;
  /// Creates the output directory, writes the manifest and config.json.
  void start(const std::map<std::string, std::uint64_t>& seeds) const;
  /// Writes dir/name and lists it in the manifest.
  void write_file(const std::string& name, std::string_view content) const;
};

void cmd_simulate(const Context& ctx);
void cmd_constants(const Context& ctx);
void cmd_moment_index(const Context& ctx);
void cmd_modulus(const Context& ctx);
void cmd_net_info(const Context& ctx);

}  // namespace stablab::cli
