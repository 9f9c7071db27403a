#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

#include "context.hpp"
#include "stablab/csv.hpp"
#include "stablab/error.hpp"
#include "stablab/modulus.hpp"
#include "stablab/parallel.hpp"
#include "stablab/spectral.hpp"

namespace stablab::cli {

namespace {

std::string replicate_name(const char* stem, std::size_t r, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%04zu.%s", stem, r, ext);
  return buf;
}

std::vector<double> net_exponents(const ExperimentConfig& cfg, std::size_t dim) {
  if (cfg.net.kind == NetKind::dyadic) return {};
  if (!cfg.net.hurst.empty()) {
    if (cfg.net.hurst.size() != dim) throw ConfigError("net.hurst: expected " + std::to_string(dim) + " values");
    return cfg.net.hurst;
  }
  if (cfg.model && cfg.model->family == KernelFamily::hfss) return cfg.model->hurst;
  throw ConfigError("net.hurst: required for anisotropic nets unless the model is hfss");
}

std::size_t net_dim(const ExperimentConfig& cfg, std::size_t model_dim) {
  if (cfg.net.dim && *cfg.net.dim != model_dim)
    throw ConfigError("net.dim: must equal the model dimension (" + std::to_string(model_dim) + ")");
  return model_dim;
}

void append_row(std::string& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    csv::append(out, v);
    first = false;
  }
  out += '\n';
}

std::string dump(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

void cmd_simulate(const Context& ctx) {
  const auto& cfg = ctx.config;
  const FieldModel model = cfg.require_model().build();
  const std::size_t dim = net_dim(cfg, model.dim());
  const Net net = build_net(cfg.net.kind, dim, cfg.net.level, net_exponents(cfg, dim));
  ctx.start({{"series", cfg.budget.seed}});
  ctx.info("simulating " + std::to_string(cfg.budget.replicates) + " path(s) on " + std::to_string(net.size()) +
           " points");

  const std::size_t replicates = cfg.budget.replicates;
  std::vector<std::vector<double>> values(replicates);
  SeriesBudget budget;
  budget.terms = cfg.budget.terms;
  budget.seed = cfg.budget.seed;
  parallel_for(replicates, ctx.workers, [&](std::size_t r) {
    SeriesBudget b = budget;
    b.stream_id = r;
    values[r] = simulate_net(model, net, b).values;
  });

  // Y(0) = 0 leads every path.
  PointSet grid(dim);
  grid.reserve(net.size() + 1);
  grid.push_back(std::vector<double>(dim, 0.0));
  const PointSet net_points = net.points();
  for (std::size_t i = 0; i < net_points.size(); ++i) grid.push_back(net_points[i]);

  for (std::size_t r = 0; r < replicates; ++r) {
    PathSample path;
    path.model_hash = model.hash();
    path.budget = budget;
    path.budget.stream_id = r;
    path.grid = grid;
    path.values.reserve(grid.size());
    path.values.push_back(0.0);
    path.values.insert(path.values.end(), values[r].begin(), values[r].end());
    if (cfg.output.csv) {
      std::ostringstream os;
      write_path_csv(os, path);
      ctx.write_file(replicate_name("path", r, "csv"), os.str());
    }
    if (cfg.output.binary) {
      std::ostringstream os;
      write_path_binary(os, path);
      ctx.write_file(replicate_name("path", r, "bin"), os.str());
    }
  }
}

void cmd_constants(const Context& ctx) {
  const auto& cfg = ctx.config;
  const ModelConfig& mc = cfg.require_model();
  const FieldModel model = mc.build();
  ctx.start({});

  const CAlphaParts parts = c_alpha_parts(model.alpha());
  nlohmann::ordered_json results;
  results["c_alpha"] = parts.c;
  results["c_alpha_quadrature"] = parts.c_quadrature;
  results["a"] = parts.a;
  results["b"] = parts.b;
  results["series_constant"] = series_constant(model.alpha());
  switch (model.family()) {
    case KernelFamily::hfsm:
    case KernelFamily::riesz_bessel: {
      const SpectralDensity sd = model.spectral();
      results["density_c"] = model.density_c();
      double target = model.hurst();
      if (model.family() == KernelFamily::riesz_bessel) {
        results["pitman_exponent"] = pitman_exponent(sd);
        results["pitman_normalization"] =
            pitman_normalization(model.alpha(), model.gamma(), model.eta(), model.dim());
      }
      const EnvelopeFit fit = envelope_check(sd, target);
      results["envelope"] = {{"hurst_target", target},
                             {"k11", fit.k11},
                             {"k12", fit.k12},
                             {"tail_slope", fit.tail_slope},
                             {"violated", fit.violated}};
      const std::vector<double> e1 = [&] {
        std::vector<double> t(model.dim(), 0.0);
        t[0] = 1.0;
        return t;
      }();
      results["scale_e1"] = model.normalization() * scale_param(sd, e1);
      break;
    }
    case KernelFamily::hfss: {
      const std::vector<double> ones(model.dim(), 1.0);
      results["scale_ones"] = model.normalization() * hfss_scale_param(model.alpha(), model.hurst_vector(), ones);
      break;
    }
  }
  nlohmann::ordered_json doc = to_json(cfg);
  doc["results"] = results;
  const std::string text = dump(doc);
  ctx.write_file("constants.json", text);
  ctx.out << text;
}

void cmd_moment_index(const Context& ctx) {
  const auto& cfg = ctx.config;
  const AnalysisConfig& a = cfg.analysis;
  const auto grid = geometric_grid(a.k_lo, a.k_hi);
  ctx.start({{"sequence", cfg.budget.seed}, {"bootstrap", cfg.budget.seed}});

  MomentOptions opts;
  opts.replicates = cfg.budget.replicates;
  opts.seed = cfg.budget.seed;
  opts.workers = ctx.workers;
  opts.method = a.method;
  ctx.info("moment curve over " + std::to_string(grid.size()) + " grid points");
  const MomentCurve curve = moment_curve(a.source, a.gamma, grid, opts);
  const ThetaEstimate theta = theta_estimate(curve, a.resamples, cfg.budget.seed);

  if (cfg.output.csv) {
    std::string text = "n,m,stderr\n";
    for (std::size_t i = 0; i < curve.n_grid.size(); ++i)
      append_row(text, {static_cast<double>(curve.n_grid[i]), curve.m_values[i], curve.stderr_values[i]});
    ctx.write_file("moment_curve.csv", text);
  }

  nlohmann::ordered_json summary;
  summary["source"] = to_string(a.source.kind);
  summary["gamma"] = a.gamma;
  summary["replicates"] = curve.replicates;
  summary["theta_hat"] = theta.theta_hat;
  summary["ci_lo"] = theta.ci_lo;
  summary["ci_hi"] = theta.ci_hi;
  summary["window_lo"] = theta.window_lo;
  summary["window_hi"] = theta.window_hi;
  summary["r_squared"] = theta.r_squared;
  if (a.source.kind == SequenceKind::iid_pareto) {
    const SandwichReport s = heavy_tail_bound_check(a.source, a.gamma, a.source.alpha, a.epsilon, grid, opts);
    summary["sandwich"] = {{"k9", s.k9}, {"k7", s.k7}, {"slope", s.slope}, {"ok", s.ok}};
  }
  if (a.source.kind == SequenceKind::iid_gaussian || a.source.kind == SequenceKind::gaussian_correlated) {
    if (grid.front() >= 2) {
      const GaussianMaxReport g = gaussian_max_check(a.source, grid, opts);
      summary["gaussian_ratio"] = {{"min", g.min_ratio}, {"max", g.max_ratio}};
    }
  }
  const std::string text = dump(summary);
  ctx.write_file("summary.json", text);
  ctx.out << text;
}

void cmd_modulus(const Context& ctx) {
  const auto& cfg = ctx.config;
  const AnalysisConfig& a = cfg.analysis;
  const FieldModel model = cfg.require_model().build();
  const std::size_t dim = net_dim(cfg, model.dim());
  const NetFamily family(cfg.net.kind, dim, a.max_level, net_exponents(cfg, dim));
  const int min_level = a.n_lo;
  const NeighborCache cache(family, min_level);

  ModulusSpec spec;
  spec.n_lo = a.n_lo;
  spec.n_hi = a.n_hi;
  if (model.family() == KernelFamily::hfss) {
    spec.mode = ModulusMode::anisotropic;
    spec.hurst.assign(model.hurst_vector().begin(), model.hurst_vector().end());
    spec.denominator = ModulusDenominator::sheet(model.alpha(), a.epsilon);
  } else {
    spec.denominator = ModulusDenominator::harmonizable(model.hurst(), model.alpha(), a.epsilon);
  }
  ctx.start({{"series", cfg.budget.seed}});

  SeriesBudget budget;
  budget.terms = cfg.budget.terms;
  budget.seed = cfg.budget.seed;
  ctx.info("simulating " + std::to_string(cfg.budget.replicates) + " path(s) to level " +
           std::to_string(a.max_level));
  const auto paths = simulate_paths(model, family, min_level, budget, cfg.budget.replicates, ctx.workers);
  const ModulusReport report = modulus_ratio(cache, paths, spec);

  if (cfg.output.csv) {
    std::string inc = "p,mean_stat\n";
    for (int p = min_level + 1; p <= a.max_level; ++p) {
      double sum = 0.0;
      for (const auto& path : paths) sum += increment_max_stat(cache, path, p, a.gamma);
      append_row(inc, {static_cast<double>(p), sum / static_cast<double>(paths.size())});
    }
    ctx.write_file("increments.csv", inc);

    std::string mod = "n,h,median_ratio,q25_ratio,q75_ratio\n";
    for (std::size_t i = 0; i < report.n.size(); ++i)
      append_row(mod, {static_cast<double>(report.n[i]), report.h[i], report.median_ratio[i], report.q25_ratio[i],
                       report.q75_ratio[i]});
    ctx.write_file("modulus.csv", mod);

    std::string per = "replicate,n,sup_increment,ratio\n";
    for (std::size_t r = 0; r < report.ratios.size(); ++r)
      for (std::size_t i = 0; i < report.n.size(); ++i)
        append_row(per, {static_cast<double>(r), static_cast<double>(report.n[i]), report.sup_increments[r][i],
                         report.ratios[r][i]});
    ctx.write_file("ratios.csv", per);
  }

  nlohmann::ordered_json summary;
  summary["mode"] = spec.mode == ModulusMode::isotropic ? "isotropic" : "anisotropic";
  summary["n"] = report.n;
  summary["median_ratio"] = report.median_ratio;
  summary["nonincreasing"] = report.nonincreasing;
  summary["final_below_initial"] = report.final_below_initial;
  const std::string text = dump(summary);
  ctx.write_file("summary.json", text);
  ctx.out << text;
}

void cmd_net_info(const Context& ctx) {
  const auto& cfg = ctx.config;
  const std::size_t dim = cfg.net.dim.value_or(cfg.model ? cfg.model->dim : 1);
  if (cfg.model && cfg.model->dim != dim)
    throw ConfigError("net.dim: must equal the model dimension (" + std::to_string(cfg.model->dim) + ")");
  const NetFamily family(cfg.net.kind, dim, cfg.net.level, net_exponents(cfg, dim));
  const Net& net = family.level(cfg.net.level);
  ctx.start({});

  nlohmann::ordered_json info;
  info["kind"] = to_string(net.kind());
  info["dim"] = dim;
  info["level"] = net.level();
  info["size"] = net.size();
  info["axis_counts"] = std::vector<std::uint32_t>(net.axis_counts().begin(), net.axis_counts().end());
  info["radius"] = net.radius();
  info["nested"] = family.nested();
  if (net.level() >= 2)
    info["max_neighbor_count"] = max_neighbor_count(family, net.level());
  else
    info["max_neighbor_count"] = nullptr;
  if (net.kind() == NetKind::dyadic) info["neighbor_bound"] = static_cast<std::size_t>(std::pow(3.0, dim)) - 1;

  constexpr std::size_t kMaxCsvPoints = std::size_t{1} << 20;
  if (cfg.output.csv) {
    if (net.size() <= kMaxCsvPoints) {
      std::ostringstream os;
      write_net_csv(os, net);
      ctx.write_file("net.csv", os.str());
    } else {
      ctx.info("net.csv skipped: more than 2^20 points");
    }
  }
  const std::string text = dump(info);
  ctx.write_file("net_info.json", text);
  ctx.out << text;
}

}  // namespace stablab::cli
