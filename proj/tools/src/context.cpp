#include "context.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <ostream>

#include "stablab/error.hpp"

#ifndef STABLAB_VERSION
#define STABLAB_VERSION "unknown"
#endif

namespace stablab::cli {

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_bytes(const std::filesystem::path& path, std::string_view content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw RuntimeError("cannot open '" + path.string() + "' for writing");
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) throw RuntimeError("write to '" + path.string() + "' failed");
}

}  // namespace

Manifest::Manifest(std::filesystem::path dir, std::string command, const ExperimentConfig& config)
    : dir_(std::move(dir)), command_(std::move(command)), config_hash_(config_hash(config)) {}

void Manifest::begin() {
  started_ = utc_now();
  begun_ = true;
  write();
}

void Manifest::finish(std::string_view status) {
  if (!begun_) return;
  status_ = status;
  finished_ = utc_now();
  write();
}

void Manifest::write() const {
  nlohmann::ordered_json j;
  j["tool"] = "stablab";
  j["version"] = STABLAB_VERSION;
  j["command"] = command_;
  j["config_hash"] = config_hash_;
  j["status"] = status_;
  j["started_at"] = started_;
  if (!finished_.empty()) j["finished_at"] = finished_;
  j["seeds"] = seeds_;
  j["outputs"] = outputs_;
  write_bytes(dir_ / "manifest.json", j.dump(2) + "\n");
}

void Context::info(std::string_view msg) const {
  if (verbosity > 0) log << "[stablab] " << msg << '\n';
}

void Context::start(const std::map<std::string, std::uint64_t>& seeds) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw RuntimeError("cannot create output directory '" + dir.string() + "': " + ec.message());
  for (const auto& [stage, seed] : seeds) manifest.set_seed(stage, seed);
  manifest.begin();
  write_file("config.json", to_json(config).dump(2) + "\n");
  info("output directory " + dir.string());
}

void Context::write_file(const std::string& name, std::string_view content) const {
  write_bytes(dir / name, content);
  manifest.record(name);
  if (verbosity > 1) log << "[stablab] wrote " << name << '\n';
}

}  // namespace stablab::cli
