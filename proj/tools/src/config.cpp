#include "stablab_cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "stablab/csv.hpp"
#include "stablab/error.hpp"

namespace stablab::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) out.push_back(trim(item));
  if (!s.empty() && s.back() == ',') out.emplace_back();
  return out;
}

std::string interval(double lo, double hi, bool lo_open, bool hi_open) {
  return std::string(lo_open ? "(" : "[") + csv::to_string(lo) + ", " + csv::to_string(hi) + (hi_open ? ")" : "]");
}

// Typed access to one section; every key read is marked, leftovers are errors.
class Section {
 public:
  Section(std::string name, const std::map<std::string, std::string>* entries)
      : name_(std::move(name)), entries_(entries) {}

  bool present() const { return entries_ != nullptr; }

  std::optional<std::string> raw(const std::string& key) {
    if (!entries_) return std::nullopt;
    const auto it = entries_->find(key);
    if (it == entries_->end()) return std::nullopt;
    used_.insert(key);
    return trim(it->second);
  }

  std::optional<double> number(const std::string& key) {
    const auto v = raw(key);
    if (!v) return std::nullopt;
    return to_double(key, *v);
  }

  double number(const std::string& key, double fallback) { return number(key).value_or(fallback); }

  std::optional<std::uint64_t> unsigned_int(const std::string& key) {
    const auto v = raw(key);
    if (!v) return std::nullopt;
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size() || v->empty())
      fail(key, "expected a non-negative integer, got '" + *v + "'");
    return out;
  }

  std::optional<int> integer(const std::string& key) {
    const auto v = raw(key);
    if (!v) return std::nullopt;
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || ptr != v->data() + v->size() || v->empty())
      fail(key, "expected an integer, got '" + *v + "'");
    return out;
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    const auto v = raw(key);
    if (!v) return std::nullopt;
    std::vector<double> out;
    for (const auto& item : split_list(*v)) out.push_back(to_double(key, item));
    if (out.empty()) fail(key, "expected at least one value");
    return out;
  }

  void check_interval(const std::string& key, double v, double lo, double hi, bool lo_open, bool hi_open) const {
    const bool ok = (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
    if (!ok)
      throw ConfigError(path(key) + " = " + csv::to_string(v) + " is outside the admissible interval " +
                        interval(lo, hi, lo_open, hi_open));
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(path(key) + ": " + what);
  }

  std::string path(const std::string& key) const { return name_ + "." + key; }

  void finish() const {
    if (!entries_) return;
    for (const auto& [key, value] : *entries_)
      if (!used_.contains(key)) throw ConfigError(path(key) + ": unknown key");
  }

 private:
  double to_double(const std::string& key, const std::string& text) const {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
      fail(key, "expected a number, got '" + text + "'");
    if (!std::isfinite(out)) fail(key, "expected a finite number, got '" + text + "'");
    return out;
  }

  std::string name_;
  const std::map<std::string, std::string>* entries_;
  std::set<std::string> used_;
};

template <class E>
E parse_enum(Section& s, const std::string& key, E fallback, std::initializer_list<std::pair<const char*, E>> options) {
  const auto v = s.raw(key);
  if (!v) return fallback;
  std::string names;
  for (const auto& [name, value] : options) {
    if (*v == name) return value;
    names += names.empty() ? name : std::string(", ") + name;
  }
  s.fail(key, "expected one of " + names + ", got '" + *v + "'");
}

ModelConfig read_model(Section& s) {
  ModelConfig m;
  m.family = parse_enum(s, "family", KernelFamily::hfsm,
                        {{"hfsm", KernelFamily::hfsm},
                         {"riesz_bessel", KernelFamily::riesz_bessel},
                         {"hfss", KernelFamily::hfss}});
  m.alpha = s.number("alpha", m.alpha);
  s.check_interval("alpha", m.alpha, 0.0, 2.0, true, true);

  const auto hurst = s.numbers("hurst");
  const auto dim = s.unsigned_int("dim");
  if (dim && *dim < 1) s.fail("dim", "must be >= 1");
  switch (m.family) {
    case KernelFamily::hfsm:
      if (hurst && hurst->size() != 1) s.fail("hurst", "hfsm takes a single value");
      m.hurst = hurst.value_or(m.hurst);
      s.check_interval("hurst", m.hurst[0], 0.0, 1.0, true, true);
      m.dim = dim.value_or(1);
      break;
    case KernelFamily::riesz_bessel: {
      if (hurst) s.fail("hurst", "not used by riesz_bessel (set gamma and eta)");
      m.hurst.clear();
      const auto gamma = s.number("gamma");
      const auto eta = s.number("eta");
      if (!gamma) s.fail("gamma", "required for riesz_bessel");
      if (!eta) s.fail("eta", "required for riesz_bessel");
      m.gamma = *gamma;
      m.eta = *eta;
      m.dim = dim.value_or(1);
      break;
    }
    case KernelFamily::hfss:
      if (!hurst) s.fail("hurst", "hfss requires one value per axis");
      m.hurst = *hurst;
      for (std::size_t j = 0; j < m.hurst.size(); ++j)
        s.check_interval("hurst[" + std::to_string(j) + "]", m.hurst[j], 0.0, 1.0, true, true);
      if (dim && *dim != m.hurst.size())
        s.fail("dim", "must equal the number of hurst values (" + std::to_string(m.hurst.size()) + ")");
      m.dim = m.hurst.size();
      break;
  }
  if (m.family != KernelFamily::riesz_bessel) {
    if (s.raw("gamma")) s.fail("gamma", "only used by riesz_bessel");
    if (s.raw("eta")) s.fail("eta", "only used by riesz_bessel");
  }
  m.c = s.number("c");
  if (m.c && !(*m.c > 0.0)) s.fail("c", "must be > 0");
  if (m.c && m.family == KernelFamily::hfss) s.fail("c", "not used by hfss");
  m.normalization = s.number("normalization", m.normalization);
  if (!(m.normalization >= 0.0)) s.fail("normalization", "must be >= 0");
  m.phi_beta = s.number("phi_beta");
  m.phi_eta = s.number("phi_eta", m.phi_eta);
  if (!(m.phi_eta > 0.0)) s.fail("phi_eta", "must be > 0");
  s.finish();
  try {
    (void)m.build();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  return m;
}

BudgetConfig read_budget(Section& s) {
  BudgetConfig b;
  b.terms = s.unsigned_int("terms").value_or(b.terms);
  if (b.terms < 1) s.fail("terms", "must be >= 1");
  b.replicates = s.unsigned_int("replicates").value_or(b.replicates);
  if (b.replicates < 1) s.fail("replicates", "must be >= 1");
  b.seed = s.unsigned_int("seed").value_or(b.seed);
  s.finish();
  return b;
}

AnalysisConfig read_analysis(Section& s) {
  AnalysisConfig a;
  a.gamma = s.number("gamma", a.gamma);
  if (!(a.gamma > 0.0)) s.fail("gamma", "must be > 0");
  a.epsilon = s.number("epsilon", a.epsilon);
  if (!(a.epsilon > 0.0)) s.fail("epsilon", "must be > 0");
  a.n_lo = s.integer("n_lo").value_or(a.n_lo);
  a.n_hi = s.integer("n_hi").value_or(a.n_hi);
  if (a.n_lo < 1) s.fail("n_lo", "must be >= 1");
  if (a.n_hi < a.n_lo) s.fail("n_hi", "must be >= n_lo");
  a.max_level = s.integer("max_level").value_or(a.max_level);
  if (a.max_level <= a.n_hi) s.fail("max_level", "must exceed n_hi");
  a.k_lo = s.integer("k_lo").value_or(a.k_lo);
  a.k_hi = s.integer("k_hi").value_or(a.k_hi);
  if (a.k_lo < 0) s.fail("k_lo", "must be >= 0");
  if (a.k_hi < a.k_lo + 1 || a.k_hi > 40) s.fail("k_hi", "must lie in [k_lo + 1, 40]");
  a.source.kind = parse_enum(s, "source", a.source.kind,
                             {{"iid_pareto", SequenceKind::iid_pareto},
                              {"constant", SequenceKind::constant},
                              {"iid_gaussian", SequenceKind::iid_gaussian},
                              {"gaussian_correlated", SequenceKind::gaussian_correlated}});
  a.source.alpha = s.number("source_alpha", a.source.alpha);
  a.source.delta = s.number("source_delta", a.source.delta);
  try {
    validate(a.source);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("analysis: ") + e.what());
  }
  a.method = parse_enum(s, "method", a.method, {{"direct", MaxMethod::direct}, {"block", MaxMethod::block}});
  a.resamples = s.unsigned_int("resamples").value_or(a.resamples);
  if (a.resamples < 1) s.fail("resamples", "must be >= 1");
  s.finish();
  return a;
}

NetConfig read_net(Section& s) {
  NetConfig n;
  n.kind = parse_enum(s, "kind", n.kind, {{"dyadic", NetKind::dyadic}, {"anisotropic", NetKind::anisotropic}});
  if (const auto d = s.unsigned_int("dim")) {
    if (*d < 1) s.fail("dim", "must be >= 1");
    n.dim = *d;
  }
  n.level = s.integer("level").value_or(n.level);
  if (n.level < 1) s.fail("level", "must be >= 1");
  n.hurst = s.numbers("hurst").value_or(std::vector<double>{});
  for (std::size_t j = 0; j < n.hurst.size(); ++j)
    s.check_interval("hurst[" + std::to_string(j) + "]", n.hurst[j], 0.0, 1.0, true, false);
  if (n.kind == NetKind::anisotropic && n.dim && !n.hurst.empty() && *n.dim != n.hurst.size())
    s.fail("dim", "must equal the number of hurst values");
  s.finish();
  return n;
}

OutputConfig read_output(Section& s) {
  OutputConfig o;
  if (auto d = s.raw("directory")) {
    if (d->empty()) s.fail("directory", "must not be empty");
    o.directory = *d;
  }
  if (const auto f = s.raw("formats")) {
    o.csv = o.binary = false;
    for (const auto& item : split_list(*f)) {
      if (item == "csv")
        o.csv = true;
      else if (item == "binary")
        o.binary = true;
      else
        s.fail("formats", "expected a list of csv, binary, got '" + item + "'");
    }
    if (!o.csv && !o.binary) s.fail("formats", "at least one format is required");
  }
  s.finish();
  return o;
}

const std::set<std::string> kSections = {"model", "budget", "analysis", "net", "output", "results"};

}  // namespace

FieldModel ModelConfig::build() const {
  PhiChoice phi{phi_beta, phi_eta};
  FieldModel m = [&] {
    switch (family) {
      case KernelFamily::hfsm: return FieldModel::hfsm(alpha, hurst.at(0), dim, c, phi);
      case KernelFamily::riesz_bessel: return FieldModel::riesz_bessel(alpha, gamma, eta, dim, c.value_or(1.0), phi);
      case KernelFamily::hfss: break;
    }
    return FieldModel::hfss(alpha, hurst, phi);
  }();
  return normalization == 1.0 ? m : m.with_normalization(normalization);
}

const ModelConfig& ExperimentConfig::require_model() const {
  if (!model) throw ConfigError("model: section is required by this command");
  return *model;
}

RawConfig parse_ini(const std::string& text) {
  // '#' comments are accepted alongside the parser's native ';'.
  std::string cleaned;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    const std::string t = trim(line);
    cleaned += (!t.empty() && t.front() == '#') ? std::string() : line;
    cleaned += '\n';
  }
  boost::property_tree::ptree tree;
  std::istringstream is(cleaned);
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config: " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  RawConfig raw;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config: key '" + section + "' appears outside a section");
    auto& entries = raw[section];
    for (const auto& [key, value] : body) entries[key] = value.get_value<std::string>();
  }
  return raw;
}

RawConfig parse_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be an object of sections");
  auto scalar = [](const std::string& where, const nlohmann::json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number() || v.is_boolean()) return v.dump();
    throw ConfigError(where + ": expected a number, string or list");
  };
  RawConfig raw;
  for (const auto& [section, body] : doc.items()) {
    if (!body.is_object()) throw ConfigError(section + ": section must be an object");
    auto& entries = raw[section];
    if (section == "results") continue;
    for (const auto& [key, value] : body.items()) {
      const std::string where = section + "." + key;
      if (value.is_array()) {
        std::string joined;
        for (const auto& item : value) joined += (joined.empty() ? "" : ",") + scalar(where, item);
        entries[key] = joined;
      } else {
        entries[key] = scalar(where, value);
      }
    }
  }
  return raw;
}

RawConfig parse_text(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') return parse_json(text);
  return parse_ini(text);
}

ExperimentConfig from_raw(const RawConfig& raw) {
  for (const auto& [name, body] : raw)
    if (!kSections.contains(name)) throw ConfigError(name + ": unknown section");
  auto find = [&](const char* name) -> const std::map<std::string, std::string>* {
    const auto it = raw.find(name);
    return it == raw.end() ? nullptr : &it->second;
  };
  ExperimentConfig config;
  Section model("model", find("model"));
  if (model.present()) config.model = read_model(model);
  Section budget("budget", find("budget"));
  config.budget = read_budget(budget);
  Section analysis("analysis", find("analysis"));
  config.analysis = read_analysis(analysis);
  Section net("net", find("net"));
  config.net = read_net(net);
  Section output("output", find("output"));
  config.output = read_output(output);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  return from_raw(path.extension() == ".json" ? parse_json(text) : parse_text(text));
}

nlohmann::ordered_json to_json(const ExperimentConfig& config) {
  nlohmann::ordered_json j;
  if (config.model) {
    const auto& m = *config.model;
    auto& o = j["model"];
    o["family"] = to_string(m.family);
    o["alpha"] = m.alpha;
    if (m.family == KernelFamily::hfsm) o["hurst"] = m.hurst.at(0);
    if (m.family == KernelFamily::hfss) o["hurst"] = m.hurst;
    if (m.family == KernelFamily::riesz_bessel) {
      o["gamma"] = m.gamma;
      o["eta"] = m.eta;
    }
    o["dim"] = m.dim;
    if (m.c) o["c"] = *m.c;
    o["normalization"] = m.normalization;
    if (m.phi_beta) o["phi_beta"] = *m.phi_beta;
    o["phi_eta"] = m.phi_eta;
  }
  j["budget"] = {{"terms", config.budget.terms}, {"replicates", config.budget.replicates},
                 {"seed", config.budget.seed}};
  const auto& a = config.analysis;
  j["analysis"] = {{"gamma", a.gamma},
                   {"epsilon", a.epsilon},
                   {"n_lo", a.n_lo},
                   {"n_hi", a.n_hi},
                   {"max_level", a.max_level},
                   {"k_lo", a.k_lo},
                   {"k_hi", a.k_hi},
                   {"source", to_string(a.source.kind)},
                   {"source_alpha", a.source.alpha},
                   {"source_delta", a.source.delta},
                   {"method", a.method == MaxMethod::direct ? "direct" : "block"},
                   {"resamples", a.resamples}};
  auto& n = j["net"];
  n["kind"] = to_string(config.net.kind);
  if (config.net.dim) n["dim"] = *config.net.dim;
  n["level"] = config.net.level;
  if (!config.net.hurst.empty()) n["hurst"] = config.net.hurst;
  auto& out = j["output"];
  if (config.output.directory) out["directory"] = *config.output.directory;
  auto formats = nlohmann::ordered_json::array();
  if (config.output.csv) formats.push_back("csv");
  if (config.output.binary) formats.push_back("binary");
  out["formats"] = formats;
  return j;
}

std::string config_hash(const ExperimentConfig& config) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(to_json(config).dump())));
  return buf;
}

}  // namespace stablab::cli
