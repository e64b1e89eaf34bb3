#include "levylab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "levylab/assumptions.hpp"

namespace levylab {

namespace {

double clip1(double v) { return std::clamp(v, -1.0, 1.0); }

// Fixed battery of bounded F_s-measurable weight functionals; arguments are
// the states at s/2 and s.
double weight_value(int which, const Point& x_half, const Point& x_s) {
  switch (which) {
    case 0: return 1.0;
    case 1: return clip1(x_s[0]);
    case 2: return clip1(x_half[0]) * clip1(x_s[0]);
    case 3: return x_s.norm() < 1.0 ? 1.0 : 0.0;
    case 4: return std::cos(x_s[0]);
    case 5: return clip1(x_s[0]) * clip1(x_s[0]);
    case 6: return std::sin(x_half[0]);
    default: return 1.0 / (1.0 + x_s.squaredNorm());
  }
}

const char* weight_tag(int which) {
  switch (which) {
    case 0: return "one";
    case 1: return "clip(X_s)";
    case 2: return "clip(X_{s/2}) clip(X_s)";
    case 3: return "ball indicator";
    case 4: return "cos(X_s)";
    case 5: return "clip(X_s)^2";
    case 6: return "sin(X_{s/2})";
    default: return "1/(1+|X_s|^2)";
  }
}

struct MartingaleSlots {
  // per path: snapshots at (s/2, s, t) per pair and Lf sums per (f, pair)
  struct Slot {
    std::vector<Point> snaps;
    std::vector<double> lf_sum;
  };
  std::vector<Slot> slots;
};

}  // namespace

MartingaleReport martingale_test(
    const StateKernel& kernel, const PathConfig& cfg,
    const std::vector<TestFunction>& fs,
    const std::vector<std::pair<double, double>>& pairs,
    const MartingaleOptions& opts) {
  if (fs.empty() || fs.size() > 8) {
    throw std::domain_error("martingale_test: supports 1..8 test functions");
  }
  const double dt = cfg.dt();
  const std::size_t steps = cfg.steps();
  struct PairIdx {
    std::size_t k_half, k_s, k_t;
  };
  std::vector<PairIdx> pidx;
  for (const auto& [s, t] : pairs) {
    const auto to_k = [&](double u) {
      const double k = u / dt;
      const auto rounded = static_cast<std::size_t>(std::llround(k));
      if (std::abs(k - double(rounded)) > 1e-9 || rounded > steps) {
        throw std::domain_error("martingale_test: (s,t) must be dyadic grid "
                                "times within the horizon");
      }
      return rounded;
    };
    if (!(s < t)) throw std::domain_error("martingale_test: need s < t");
    pidx.push_back({to_k(s / 2.0), to_k(s), to_k(t)});
  }

  // Lf evaluators: dense tables in d=1, direct quadrature otherwise.
  std::vector<GeneratorTable> tables;
  GeneratorWorkspace ws;
  const bool tabulated = kernel.dim() == 1;
  if (tabulated) {
    const auto points = static_cast<std::size_t>(
        2.0 * opts.table_halfwidth / opts.table_dx) + 1;
    for (const auto& f : fs) {
      tables.push_back(build_generator_table(kernel, f, -opts.table_halfwidth,
                                             opts.table_halfwidth, points,
                                             cfg.threads, opts.generator));
    }
  }
  const auto lf_at = [&](std::size_t fi, const Point& x) {
    if (tabulated) return tables[fi](x[0]);
    return apply_generator(kernel, fs[fi], x, opts.generator, &ws).value;
  };

  // unique snapshot indices
  std::vector<std::size_t> snap_idx;
  for (const auto& p : pidx) {
    snap_idx.push_back(p.k_half);
    snap_idx.push_back(p.k_s);
    snap_idx.push_back(p.k_t);
  }
  std::sort(snap_idx.begin(), snap_idx.end());
  snap_idx.erase(std::unique(snap_idx.begin(), snap_idx.end()), snap_idx.end());
  const auto snap_slot = [&](std::size_t k) {
    return static_cast<std::size_t>(
        std::lower_bound(snap_idx.begin(), snap_idx.end(), k) -
        snap_idx.begin());
  };

  MartingaleSlots data;
  data.slots.resize(cfg.path_count);
  const std::size_t n_f = fs.size(), n_p = pidx.size();

  struct Visitor {
    const std::vector<std::size_t>* snap_idx;
    const std::vector<PairIdx>* pidx;
    MartingaleSlots* data;
    std::size_t n_f, n_p;
    const std::function<double(std::size_t, const Point&)>* lf;

    bool state(std::size_t p, std::size_t k, double, const Point& x) {
      auto& slot = data->slots[p];
      if (k == 0) {
        slot.snaps.assign(snap_idx->size(), x);
        slot.lf_sum.assign(n_f * n_p, 0.0);
      }
      const auto it =
          std::lower_bound(snap_idx->begin(), snap_idx->end(), k);
      if (it != snap_idx->end() && *it == k) {
        slot.snaps[static_cast<std::size_t>(it - snap_idx->begin())] = x;
      }
      // left-endpoint sums: state at t_k weights the step [t_k, t_{k+1})
      double lf_cache[8];
      bool have[8] = {false};
      for (std::size_t pi = 0; pi < n_p; ++pi) {
        const auto& pr = (*pidx)[pi];
        if (k >= pr.k_s && k < pr.k_t) {
          for (std::size_t fi = 0; fi < n_f; ++fi) {
            if (!have[fi]) {
              lf_cache[fi] = (*lf)(fi, x);
              have[fi] = true;
            }
            slot.lf_sum[fi * n_p + pi] += lf_cache[fi];
          }
        }
      }
      return k < snap_idx->back();
    }
    void jump(std::size_t, double, const Point&) {}
  };

  const std::function<double(std::size_t, const Point&)> lf_fn = lf_at;
  Visitor visitor{&snap_idx, &pidx, &data, n_f, n_p, &lf_fn};
  simulate_ensemble(kernel, cfg, visitor);

  MartingaleReport report;
  report.all_pass = true;
  std::vector<double> buffer(cfg.path_count);
  for (std::size_t fi = 0; fi < n_f; ++fi) {
    const double scale =
        generator_sup_bound(kernel, fs[fi]);
    for (std::size_t pi = 0; pi < n_p; ++pi) {
      const auto& pr = pidx[pi];
      const double span = dt * double(pr.k_t - pr.k_s);
      for (int w = 0; w < opts.weight_count; ++w) {
        for (std::size_t p = 0; p < cfg.path_count; ++p) {
          const auto& slot = data.slots[p];
          const Point& x_half = slot.snaps[snap_slot(pr.k_half)];
          const Point& x_s = slot.snaps[snap_slot(pr.k_s)];
          const Point& x_t = slot.snaps[snap_slot(pr.k_t)];
          const double dm = fs[fi].f(x_t) - fs[fi].f(x_s) -
                            slot.lf_sum[fi * n_p + pi] * dt;
          buffer[p] = dm * weight_value(w, x_half, x_s);
        }
        const MeanStderr ms = mean_stderr(buffer);
        MartingaleCell cell;
        cell.f_tag = fs[fi].family_tag;
        cell.s = dt * double(pr.k_s);
        cell.t = dt * double(pr.k_t);
        cell.weight_tag = weight_tag(w);
        cell.residual = ms.mean;
        cell.stderr_ = ms.stderr_;
        cell.inconclusive = ms.stderr_ > 0.1 * scale * span;
        cell.pass = std::abs(ms.mean) <= 4.0 * ms.stderr_;
        report.worst_sigmas = std::max(
            report.worst_sigmas,
            ms.stderr_ > 0 ? std::abs(ms.mean) / ms.stderr_ : 0.0);
        if (!cell.pass) report.all_pass = false;
        report.cells.push_back(cell);
      }
    }
  }
  return report;
}

double resolvent_mc_bias_bound(double lambda, double dt, double sup_g,
                               double generator_bound, double horizon) {
  const double left_sum =
      dt * (lambda * sup_g + generator_bound) / (2.0 * lambda) *
      (1.0 + lambda * dt);
  const double truncation = sup_g * std::exp(-lambda * horizon) / lambda;
  return left_sum + truncation;
}

std::vector<ResolventMcResult> resolvent_mc(
    const StateKernel& kernel, const PathConfig& cfg,
    const std::function<double(const Point&)>& g, double sup_g, double lambda,
    const std::vector<Point>& x_list, double bias_tol) {
  if (!(lambda > 0.0)) {
    throw std::domain_error("resolvent_mc: lambda must be > 0");
  }
  const double truncation = sup_g * std::exp(-lambda * cfg.horizon) / lambda;
  if (truncation > bias_tol) {
    throw std::runtime_error(
        "resolvent_mc: horizon truncation bias exceeds the requested "
        "tolerance; extend the horizon");
  }

  // Left-endpoint rule: sum over grid states k = 0..K-1.
  struct Visitor {
    const std::function<double(const Point&)>* g;
    double lambda, dt;
    std::size_t last_k;
    std::vector<double>* sums;
    bool state(std::size_t p, std::size_t k, double t, const Point& x) {
      if (k < last_k) (*sums)[p] += std::exp(-lambda * t) * (*g)(x)*dt;
      return k < last_k;
    }
    void jump(std::size_t, double, const Point&) {}
  };

  std::vector<ResolventMcResult> results;
  for (const auto& x : x_list) {
    PathConfig run = cfg;
    run.x0 = x;
    std::vector<double> sums(run.path_count, 0.0);
    Visitor visitor{&g, lambda, run.dt(), run.steps(), &sums};
    simulate_ensemble(kernel, run, visitor);
    ResolventMcResult res;
    res.x = x;
    res.truncation_bias_bound = truncation;
    const MeanStderr ms = mean_stderr(sums);
    res.estimate = ms.mean;
    res.stderr_ = ms.stderr_;
    results.push_back(res);
  }
  return results;
}

ResolventContinuityReport resolvent_continuity_probe(
    const StateKernel& kernel, const PathConfig& cfg,
    const std::function<double(const Point&)>& g, double lambda,
    const Point& x0, const std::vector<double>& offsets) {
  struct Visitor {
    const std::function<double(const Point&)>* g;
    double lambda, dt;
    std::size_t last_k;
    std::vector<double>* sums;
    bool state(std::size_t p, std::size_t k, double t, const Point& x) {
      if (k < last_k) (*sums)[p] += std::exp(-lambda * t) * (*g)(x)*dt;
      return k < last_k;
    }
    void jump(std::size_t, double, const Point&) {}
  };

  const auto run_from = [&](const Point& start, std::vector<double>& sums) {
    PathConfig run = cfg;
    run.x0 = start;
    sums.assign(run.path_count, 0.0);
    Visitor visitor{&g, lambda, run.dt(), run.steps(), &sums};
    simulate_ensemble(kernel, run, visitor);
  };

  std::vector<double> base;
  run_from(x0, base);

  ResolventContinuityReport report;
  std::vector<double> shifted(cfg.path_count), diff(cfg.path_count);
  std::vector<double> log_mod, log_invl;
  for (double delta : offsets) {
    Point start = x0;
    start[0] += delta;
    run_from(start, shifted);
    for (std::size_t p = 0; p < cfg.path_count; ++p) {
      diff[p] = shifted[p] - base[p];
    }
    const MeanStderr ms = mean_stderr(diff);
    ContinuityProbeRow row;
    row.offset = delta;
    row.modulus = std::abs(ms.mean);
    row.stderr_ = ms.stderr_;
    row.inconclusive = row.modulus < 2.0 * ms.stderr_;
    report.rows.push_back(row);
    if (delta > 0.0 && row.modulus > 0.0 && !row.inconclusive) {
      log_mod.push_back(std::log(row.modulus));
      log_invl.push_back(-std::log(big_l(kernel.J.profile,
                                         std::min(delta, 0.999))));
    }
  }
  if (log_mod.size() >= 2) {
    report.gamma_fit = fit_line(log_invl, log_mod).slope;
  }
  // monotone decrease within noise: each row must not exceed the previous
  // one by more than the combined 4-sigma band
  report.decaying = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const auto& prev = report.rows[i - 1];
    const auto& cur = report.rows[i];
    if (cur.modulus > prev.modulus + 4.0 * (cur.stderr_ + prev.stderr_)) {
      report.decaying = false;
    }
  }
  return report;
}

PerturbationGapReport perturbation_gap(const StateKernel& kernel,
                                       const Point& x0, double lambda,
                                       const std::function<double(const Point&)>& g,
                                       const std::vector<Point>& probes,
                                       const ResolventOptions& ropts) {
  if (!(lambda > 0.0)) {
    throw std::domain_error("perturbation_gap: lambda must be > 0");
  }
  if (!kernel.j_script_finite) {
    throw std::domain_error(
        "perturbation_gap: kernel fails Assumption 1(e)(iii), J-script "
        "diverges");
  }
  PerturbationGapReport report;
  report.lambda = lambda;
  report.j_script = kernel.j_script;
  report.xi = kernel.A.xi_declared ? *kernel.A.xi_declared
                                   : estimate_xi(kernel);

  const FrozenKernel fk(kernel, x0);
  const ResolventField field = resolvent_fft(fk, g, lambda, ropts);
  report.fft_residual = field.residual_sup;
  report.max_g = field.grid_max_abs_g;
  report.bound = 4.0 * report.xi * report.j_script / lambda * report.max_g;

  BoundedFn u_fn;
  u_fn.f = [&field](const Point& x) { return field.value_at(x); };
  u_fn.sup_norm = field.dim == 1 ? field.sup_bound() : field.max_abs() * 1.5;
  u_fn.hessian_bound = field.dim == 1
                           ? field.hessian_bound()
                           : field.max_abs() * (lambda + 1.0);

  const StateKernel frozen = freeze_at(kernel, x0);
  GeneratorWorkspace ws_full, ws_frozen;
  double sup = 0.0, err = 0.0;
  for (const auto& x : probes) {
    const GeneratorEval full =
        apply_generator(kernel, u_fn, x, ropts.generator, &ws_full);
    const GeneratorEval froz =
        apply_generator(frozen, u_fn, x, ropts.generator, &ws_frozen);
    sup = std::max(sup, std::abs(full.value - froz.value));
    err = std::max(err, full.abs_error + froz.abs_error);
  }
  report.measured_sup = sup;
  report.numeric_error = err;
  report.within_bound = sup <= report.bound + err + 1e-12;
  report.contraction_applicable =
      lambda >= 8.0 * report.xi * report.j_script - 1e-9;
  report.contraction_ok =
      !report.contraction_applicable || sup <= 0.5 * report.max_g + err;
  return report;
}

}  // namespace levylab
