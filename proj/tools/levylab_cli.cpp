// Command-line surface: config-driven experiments with machine-readable
// artifacts named by the canonical config hash.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "levylab/assumptions.hpp"
#include "levylab/config.hpp"
#include "levylab/estimators.hpp"
#include "levylab/frozen.hpp"
#include "levylab/generator.hpp"
#include "levylab/io.hpp"
#include "levylab/paths.hpp"

namespace {

using namespace levylab;

struct Overrides {
  std::string config_path;
  std::string out_dir;
  std::string seed;
  std::string threads;
  std::string dim;
  bool skip_validate = false;
};

IniConfig load_config(const Overrides& ov) {
  IniConfig cfg = IniConfig::parse_file(ov.config_path);
  if (!ov.seed.empty()) cfg.set("run", "seed", ov.seed);
  if (!ov.threads.empty()) cfg.set("run", "threads", ov.threads);
  if (!ov.out_dir.empty()) cfg.set("output", "dir", ov.out_dir);
  if (!ov.dim.empty()) cfg.set("kernel", "dim", ov.dim);
  return cfg;
}

std::string artifact_path(const IniConfig& cfg, const std::string& name,
                          const std::string& ext) {
  const std::string dir = cfg.get("output", "dir", "out");
  std::filesystem::create_directories(dir);
  return dir + "/" + name + "-" + cfg.hash_hex() + "." + ext;
}

TestFunction config_test_function(const IniConfig& cfg, int dim,
                                  const std::string& key,
                                  const std::string& fallback) {
  const std::string family = cfg.get("estimator", key, fallback);
  TestFunctionParams p;
  p.amp = cfg.get_double("estimator", key + "_amp", 1.0);
  p.width = cfg.get_double("estimator", key + "_width", 1.0);
  p.radius = cfg.get_double("estimator", key + "_radius", 1.0);
  p.sharpness = cfg.get_double("estimator", key + "_sharpness", 0.25);
  if (family == "cosine") {
    p.freq = zero_point(dim);
    p.freq[0] = cfg.get_double("estimator", key + "_freq", 1.0);
  }
  return make_test_function(family, dim, p);
}

struct DataFunction {
  std::function<double(const Point&)> fn;
  double sup = 1.0;
  bool smooth = true;
  TestFunction tf;  // valid only when smooth
};

DataFunction config_data_function(const IniConfig& cfg, int dim) {
  const std::string family = cfg.get("estimator", "g", "gaussian-bump");
  DataFunction out;
  if (family == "halfspace") {
    const double edge = cfg.get_double("estimator", "g_edge", 0.0);
    out.fn = [edge](const Point& x) { return x[0] >= edge ? 1.0 : 0.0; };
    out.sup = 1.0;
    out.smooth = false;
    return out;
  }
  out.tf = config_test_function(cfg, dim, "g", family);
  out.fn = out.tf.f;
  out.sup = out.tf.sup_norm;
  return out;
}

std::vector<std::pair<double, double>> parse_pairs(const std::string& text) {
  std::vector<std::pair<double, double>> pairs;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto comma = text.find(',', pos);
    const std::string item = text.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      throw config_error("field [estimator] pairs: expected 's:t' items");
    }
    pairs.emplace_back(std::stod(item.substr(0, colon)),
                       std::stod(item.substr(colon + 1)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (pairs.empty()) throw config_error("field [estimator] pairs is empty");
  return pairs;
}

int cmd_validate(const Overrides& ov) {
  const IniConfig cfg = load_config(ov);
  const StateKernel kernel = build_kernel(cfg);
  const AssumptionReport report = validate_assumptions(kernel);
  write_json_file(artifact_path(cfg, "validate", "json"), to_json(report));
  for (const auto& c : report.clauses) {
    std::printf("clause %-7s %s\n", c.clause.c_str(), to_string(c.verdict));
  }
  return report.all_pass ? 0 : 1;
}

int run_generator_eval(const IniConfig& cfg, const StateKernel& kernel) {
  const int dim = kernel.dim();
  const TestFunction f = config_test_function(cfg, dim, "f", "gaussian-bump");
  const double lo = cfg.get_double("estimator", "x_min", -4.0);
  const double hi = cfg.get_double("estimator", "x_max", 4.0);
  const int count = cfg.get_int("estimator", "x_count", 33);
  std::vector<std::string> header;
  header.push_back("x");
  if (dim == 2) header.push_back("y");
  for (const char* c : {"value", "error", "inner", "middle", "outer"}) {
    header.push_back(c);
  }
  CsvWriter csv(artifact_path(cfg, "generator-eval", "csv"), header);
  GeneratorWorkspace ws;
  for (int i = 0; i < count; ++i) {
    Point x = zero_point(dim);
    x[0] = lo + (hi - lo) * i / (count - 1);
    const GeneratorEval e = apply_generator(kernel, f, x, {}, &ws);
    std::vector<double> row;
    row.push_back(x[0]);
    if (dim == 2) row.push_back(x[1]);
    row.insert(row.end(),
               {e.value, e.abs_error, e.inner, e.middle, e.outer_bound});
    csv.row(row);
  }
  return 0;
}

int run_symbol(const IniConfig& cfg, const StateKernel& kernel,
               const PathConfig& pc) {
  const FrozenKernel fk(kernel, pc.x0);
  const double lo = cfg.get_double("estimator", "xi_min", 0.25);
  const double hi = cfg.get_double("estimator", "xi_max", 64.0);
  const int count = cfg.get_int("estimator", "xi_count", 33);
  CsvWriter csv(artifact_path(cfg, "symbol", "csv"), {"xi", "phi"});
  for (int i = 0; i < count; ++i) {
    const double xi = lo * std::pow(hi / lo, double(i) / (count - 1));
    csv.row({xi, fk.symbol_radial(xi)});
  }
  return 0;
}

ResolventOptions config_resolvent_options(const IniConfig& cfg, int dim) {
  ResolventOptions ro;
  ro.box_halfwidth = cfg.get_double("estimator", "fft_box", dim == 1 ? 64.0 : 16.0);
  ro.n_per_axis = cfg.get_int("estimator", "fft_n", dim == 1 ? 4096 : 256);
  ro.residual_probes = cfg.get_int("estimator", "fft_residual_probes", 32);
  return ro;
}

int run_resolvent_fft(const IniConfig& cfg, const StateKernel& kernel,
                      const PathConfig& pc) {
  const int dim = kernel.dim();
  const DataFunction g = config_data_function(cfg, dim);
  const double lambda = cfg.get_double("estimator", "lambda", 1.0);
  const FrozenKernel fk(kernel, pc.x0);
  const ResolventOptions ro = config_resolvent_options(cfg, dim);
  const ResolventField field = resolvent_fft(fk, g.fn, lambda, ro);

  Json header;
  header["schema_version"] = kSchemaVersion;
  header["lambda"] = lambda;
  header["N"] = field.n_per_axis;
  header["R"] = field.box_halfwidth;
  header["residual_sup"] = field.residual_sup;
  header["residual_flagged"] = field.residual_flagged;
  write_json_file(artifact_path(cfg, "resolvent-fft", "json"), header);

  std::vector<std::string> cols = dim == 1
                                      ? std::vector<std::string>{"x", "u"}
                                      : std::vector<std::string>{"x", "y", "u"};
  CsvWriter csv(artifact_path(cfg, "resolvent-fft", "csv"), cols);
  if (dim == 1) {
    for (int i = 0; i < field.n_per_axis; ++i) {
      csv.row({field.grid_coord(i), field.values[i]});
    }
  } else {
    for (int i = 0; i < field.n_per_axis; ++i) {
      for (int j = 0; j < field.n_per_axis; ++j) {
        csv.row({field.grid_coord(i), field.grid_coord(j),
                 field.values[i * field.n_per_axis + j]});
      }
    }
  }
  return field.residual_flagged ? 1 : 0;
}

int run_simulate(const IniConfig& cfg, const StateKernel& kernel,
                 const PathConfig& pc) {
  const int thin = cfg.get_int("paths", "thin",
                               std::max(1, int(pc.steps() / 1024)));
  const auto paths = simulate_paths(kernel, pc);
  std::vector<std::string> cols{"path_id", "t", "x"};
  if (kernel.dim() == 2) cols.push_back("y");
  CsvWriter csv(artifact_path(cfg, "simulate", "csv"), cols);
  for (const auto& path : paths) {
    for (std::size_t k = 0; k < path.states.size(); k += thin) {
      std::vector<double> row{double(path.path_index),
                              double(k) * std::ldexp(1.0, -path.n),
                              path.states[k][0]};
      if (kernel.dim() == 2) row.push_back(path.states[k][1]);
      csv.row(row);
    }
  }
  return 0;
}

int run_martingale(const IniConfig& cfg, const StateKernel& kernel,
                   const PathConfig& pc) {
  const int dim = kernel.dim();
  std::vector<TestFunction> fs;
  fs.push_back(config_test_function(cfg, dim, "f", "gaussian-bump"));
  const auto pairs =
      parse_pairs(cfg.get("estimator", "pairs", "0.25:0.5,0.5:0.75,0.25:1"));
  const MartingaleReport report = martingale_test(kernel, pc, fs, pairs);
  write_json_file(artifact_path(cfg, "martingale-test", "json"),
                  to_json(report));
  return report.all_pass ? 0 : 1;
}

int run_exit_time(const IniConfig& cfg, const StateKernel& kernel,
                  const PathConfig& pc) {
  const int k_min = cfg.get_int("estimator", "exit_k_min", 2);
  const int k_max = cfg.get_int("estimator", "exit_k_max", 8);
  std::vector<double> radii;
  for (int k = k_min; k <= k_max; ++k) radii.push_back(std::ldexp(1.0, -k));
  const ExitTimeReport report = exit_times(kernel, pc, pc.x0, radii);
  write_json_file(artifact_path(cfg, "exit-time", "json"), to_json(report));
  CsvWriter csv(artifact_path(cfg, "exit-time", "csv"),
                {"r", "E_tau", "stderr", "L_r", "product"});
  for (const auto& row : report.rows) {
    csv.row({row.radius, row.mean_exit, row.stderr_, row.big_l, row.product});
  }
  return 0;
}

int run_tau_chain(const IniConfig& cfg, const StateKernel& kernel,
                  const PathConfig& pc) {
  const double eta = cfg.get_double("estimator", "eta", 0.25);
  const int depth = cfg.get_int("estimator", "depth", 6);
  const TauChainStats stats = tau_chain(kernel, pc, eta, depth);
  write_json_file(artifact_path(cfg, "tau-chain", "json"), to_json(stats));
  CsvWriter csv(artifact_path(cfg, "tau-chain", "csv"), {"t", "p", "stderr"});
  for (std::size_t i = 0; i < stats.tau1_cdf_t.size(); ++i) {
    csv.row({stats.tau1_cdf_t[i], stats.tau1_cdf_p[i],
             stats.tau1_cdf_stderr[i]});
  }
  return 0;
}

int run_perturbation_gap(const IniConfig& cfg, const StateKernel& kernel,
                         const PathConfig& pc) {
  const int dim = kernel.dim();
  const DataFunction g = config_data_function(cfg, dim);
  double xi = kernel.A.xi_declared ? *kernel.A.xi_declared
                                   : estimate_xi(kernel);
  const double mult = cfg.get_double("estimator", "lambda_mult", 1.0);
  double lambda = cfg.get_double("estimator", "lambda", 0.0);
  if (lambda <= 0.0) {
    lambda = mult * 8.0 * xi * kernel.j_script;
    if (lambda <= 0.0) lambda = cfg.get_double("estimator", "lambda", 1.0);
  }
  std::vector<Point> probes;
  const int count = cfg.get_int("estimator", "probe_count", 17);
  const double spread = cfg.get_double("estimator", "probe_spread", 2.0);
  for (int i = 0; i < count; ++i) {
    Point x = pc.x0;
    x[0] += -spread + 2.0 * spread * i / (count - 1);
    probes.push_back(x);
  }
  const PerturbationGapReport report = perturbation_gap(
      kernel, pc.x0, lambda, g.fn, probes, config_resolvent_options(cfg, dim));
  write_json_file(artifact_path(cfg, "perturbation-gap", "json"),
                  to_json(report));
  const bool ok = report.within_bound && report.contraction_ok;
  return ok ? 0 : 1;
}

int run_resolvent_continuity(const IniConfig& cfg, const StateKernel& kernel,
                             const PathConfig& pc) {
  IniConfig local = cfg;
  if (!cfg.has("estimator", "g")) local.set("estimator", "g", "halfspace");
  const DataFunction g = config_data_function(local, kernel.dim());
  const double lambda = cfg.get_double("estimator", "lambda", 1.0);
  const int offset_count = cfg.get_int("estimator", "offset_count", 5);
  std::vector<double> offsets;
  for (int k = 1; k <= offset_count; ++k) offsets.push_back(std::ldexp(1.0, -k));
  const ResolventContinuityReport report =
      resolvent_continuity_probe(kernel, pc, g.fn, lambda, pc.x0, offsets);
  write_json_file(artifact_path(cfg, "resolvent-continuity", "json"),
                  to_json(report));
  CsvWriter csv(artifact_path(cfg, "resolvent-continuity", "csv"),
                {"offset", "modulus", "stderr"});
  for (const auto& row : report.rows) {
    csv.row({row.offset, row.modulus, row.stderr_});
  }
  return report.decaying ? 0 : 1;
}

int cmd_run(const Overrides& ov, const std::string& probe) {
  const IniConfig cfg = load_config(ov);
  const StateKernel kernel = build_kernel(cfg);
  const PathConfig pc = build_path_config(cfg);

  if (!ov.skip_validate) {
    const AssumptionReport report = validate_assumptions(kernel);
    if (!report.all_pass) {
      std::fprintf(stderr,
                   "kernel failed assumption validation; rerun with "
                   "--skip-validate to force\n");
      write_json_file(artifact_path(cfg, "validate", "json"), to_json(report));
      return 1;
    }
  }

  if (probe == "generator-eval") return run_generator_eval(cfg, kernel);
  if (probe == "symbol") return run_symbol(cfg, kernel, pc);
  if (probe == "resolvent-fft") return run_resolvent_fft(cfg, kernel, pc);
  if (probe == "simulate") return run_simulate(cfg, kernel, pc);
  if (probe == "martingale-test") return run_martingale(cfg, kernel, pc);
  if (probe == "exit-time") return run_exit_time(cfg, kernel, pc);
  if (probe == "tau-chain") return run_tau_chain(cfg, kernel, pc);
  if (probe == "perturbation-gap") return run_perturbation_gap(cfg, kernel, pc);
  if (probe == "resolvent-continuity") {
    return run_resolvent_continuity(cfg, kernel, pc);
  }
  std::fprintf(stderr, "unknown probe '%s'\n", probe.c_str());
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for state-dependent jump kernels"};
  app.require_subcommand(1);

  Overrides ov;
  std::string probe;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", ov.config_path, "experiment config file")
        ->required();
    sub->add_option("--seed", ov.seed, "override [run] seed");
    sub->add_option("--threads", ov.threads, "override [run] threads");
    sub->add_option("--out-dir", ov.out_dir, "override [output] dir");
    sub->add_option("--dim", ov.dim, "override [kernel] dim (1 or 2)");
  };

  CLI::App* validate = app.add_subcommand(
      "validate", "check every assumption clause and write the report");
  add_common(validate);

  CLI::App* run = app.add_subcommand("run", "run one estimator probe");
  add_common(run);
  run->add_option("probe", probe,
                  "one of: generator-eval, symbol, resolvent-fft, simulate, "
                  "martingale-test, exit-time, tau-chain, perturbation-gap, "
                  "resolvent-continuity")
      ->required();
  run->add_flag("--skip-validate", ov.skip_validate,
                "skip the assumption pre-check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return cmd_validate(ov);
    return cmd_run(ov, probe);
  } catch (const config_error& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
