#include "levylab/paths.hpp"

#include <algorithm>
#include <cmath>

#include "levylab/quadrature.hpp"

namespace levylab {

namespace detail {

double Sigma2Memo::compute(const Point& z) const {
  const int d = kernel_->dim();
  const auto section = [&](double r) {
    Point h = d == 1 ? point1(r) : point2(r, 0.0);
    if (d == 2 && !kernel_->A.radial_in_h) {
      double sum = 0.0;
      const int m = 128;
      for (int a = 0; a < m; ++a) {
        sum += kernel_->A.A(z, r * unit_direction(2, 2.0 * M_PI * a / m));
      }
      return sum / m * kernel_->J.radial(r);
    }
    return kernel_->A.A(z, h) * kernel_->J.radial(r);
  };
  const auto integrand = [&](double r) {
    return std::pow(r, d + 1) * section(r);
  };
  QuadOptions o;
  o.rel_tol = 1e-9;
  o.abs_tol = 1e-60;
  return sphere_surface(d) * integrate_to_zero(integrand, eps_, o).value / d;
}

double Sigma2Memo::at(const Point& z) {
  if (kernel_->A.constant_in_x) {
    if (!have_constant_) {
      constant_value_ = compute(z);
      have_constant_ = true;
    }
    return constant_value_;
  }
  constexpr double kQuantum = 0x1p-12;
  const auto quantize = [](double v) {
    return static_cast<std::int64_t>(std::llround(v / kQuantum));
  };
  Point zq = z;
  std::uint64_t key = static_cast<std::uint32_t>(quantize(z[0]));
  zq[0] = static_cast<double>(quantize(z[0])) * kQuantum;
  if (z.size() > 1) {
    key |= static_cast<std::uint64_t>(static_cast<std::uint32_t>(quantize(z[1])))
           << 32;
    zq[1] = static_cast<double>(quantize(z[1])) * kQuantum;
  }
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  const double value = compute(zq);
  cache_.emplace(key, value);
  return value;
}

}  // namespace detail

namespace {

struct MaterializeVisitor {
  std::vector<SamplePath>* out;
  bool state(std::size_t p, std::size_t k, double, const Point& x) {
    (void)k;
    (*out)[p].states.push_back(x);
    return true;
  }
  void jump(std::size_t p, double t, const Point& h) {
    (*out)[p].jump_log.emplace_back(t, h);
  }
};

}  // namespace

std::vector<SamplePath> simulate_paths(const StateKernel& kernel,
                                       const PathConfig& cfg) {
  std::vector<SamplePath> paths(cfg.path_count);
  for (std::size_t p = 0; p < cfg.path_count; ++p) {
    paths[p].n = cfg.n;
    paths[p].seed = cfg.seed;
    paths[p].path_index = p;
    paths[p].states.reserve(cfg.steps() + 1);
  }
  MaterializeVisitor visitor{&paths};
  simulate_ensemble(kernel, cfg, visitor);
  return paths;
}

namespace {

struct TauVisitor {
  double eta = 0.0;
  int depth = 0;
  double horizon = 0.0;
  // per-path scratch owned by slots to stay thread-safe
  struct Slot {
    Point anchor;
    int reached = 0;
    std::vector<double> tau;
  };
  std::vector<Slot>* slots;

  bool state(std::size_t p, std::size_t k, double t, const Point& x) {
    Slot& s = (*slots)[p];
    if (k == 0) {
      s.anchor = x;
      s.reached = 0;
      s.tau.assign(depth, horizon);  // censored until hit
      return true;
    }
    while (s.reached < depth && (x - s.anchor).norm() >= eta) {
      s.tau[s.reached] = t;
      s.anchor = x;
      ++s.reached;
    }
    return s.reached < depth;
  }
  void jump(std::size_t, double, const Point&) {}
};

}  // namespace

TauChainStats tau_chain(const StateKernel& kernel, const PathConfig& cfg,
                        double eta, int depth) {
  if (!(eta > 0.0) || depth < 1) {
    throw std::domain_error("tau_chain: eta must be > 0 and depth >= 1");
  }
  TauChainStats stats;
  stats.eta = eta;
  stats.depth = depth;

  std::vector<TauVisitor::Slot> slots(cfg.path_count);
  TauVisitor visitor{eta, depth, cfg.horizon, &slots};
  simulate_ensemble(kernel, cfg, visitor);

  stats.tau.resize(cfg.path_count);
  for (std::size_t p = 0; p < cfg.path_count; ++p) stats.tau[p] = slots[p].tau;

  std::vector<double> buffer(cfg.path_count);
  for (int i = 0; i < depth; ++i) {
    std::size_t censored = 0;
    for (std::size_t p = 0; p < cfg.path_count; ++p) {
      const double t = stats.tau[p][i];
      if (t >= cfg.horizon) ++censored;
      buffer[p] = std::exp(-t);  // censored samples enter as e^{-horizon}
    }
    stats.exp_moment.push_back(mean_stderr(buffer));
    stats.censor_rate.push_back(double(censored) / double(cfg.path_count));
  }
  stats.extend_horizon_warning = stats.censor_rate.back() > 0.5;

  std::vector<double> idx, logs;
  for (int i = 0; i < depth; ++i) {
    idx.push_back(double(i + 1));
    logs.push_back(std::log(std::max(stats.exp_moment[i].mean, 1e-300)));
  }
  const LinearFit fit = fit_line(idx, logs);
  stats.gamma_fit = std::exp(fit.slope);
  stats.gamma_r_squared = fit.r_squared;

  // P(tau_1 <= t) on a short probe grid near the origin
  const int grid = 16;
  const double t_max = std::min(0.1, cfg.horizon);
  for (int j = 1; j <= grid; ++j) {
    const double t = t_max * j / grid;
    std::size_t hits = 0;
    for (std::size_t p = 0; p < cfg.path_count; ++p) {
      if (stats.tau[p][0] <= t) ++hits;
    }
    const double ph = double(hits) / double(cfg.path_count);
    stats.tau1_cdf_t.push_back(t);
    stats.tau1_cdf_p.push_back(ph);
    stats.tau1_cdf_stderr.push_back(
        std::sqrt(ph * (1.0 - ph) / double(cfg.path_count)));
  }
  return stats;
}

namespace {

struct ExitVisitor {
  Point center;
  std::vector<double> radii;  // ascending
  double horizon = 0.0;
  struct Slot {
    std::vector<double> exit_time;
    std::size_t next = 0;
  };
  std::vector<Slot>* slots;

  bool state(std::size_t p, std::size_t k, double t, const Point& x) {
    Slot& s = (*slots)[p];
    if (k == 0) {
      s.exit_time.assign(radii.size(), horizon);
      s.next = 0;
    }
    const double dist = (x - center).norm();
    while (s.next < radii.size() && dist >= radii[s.next]) {
      s.exit_time[s.next] = t;
      ++s.next;
    }
    return s.next < radii.size();
  }
  void jump(std::size_t, double, const Point&) {}
};

}  // namespace

ExitTimeReport exit_times(const StateKernel& kernel, const PathConfig& cfg,
                          const Point& center,
                          const std::vector<double>& radii) {
  for (double r : radii) {
    if (!(r > 0.0) || !(r < 1.0)) {
      throw std::domain_error("exit_times: radii must lie in (0,1)");
    }
  }
  std::vector<double> sorted = radii;
  std::sort(sorted.begin(), sorted.end());

  PathConfig run = cfg;
  run.x0 = center;
  std::vector<ExitVisitor::Slot> slots(run.path_count);
  ExitVisitor visitor{center, sorted, run.horizon, &slots};
  simulate_ensemble(kernel, run, visitor);

  ExitTimeReport report;
  report.dt = run.dt();
  std::vector<double> buffer(run.path_count);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    std::size_t censored = 0;
    for (std::size_t p = 0; p < run.path_count; ++p) {
      buffer[p] = slots[p].exit_time[i];
      if (buffer[p] >= run.horizon) ++censored;
    }
    const MeanStderr ms = mean_stderr(buffer);
    ExitTimeRow row;
    row.radius = sorted[i];
    row.mean_exit = ms.mean;
    row.stderr_ = ms.stderr_;
    row.censor_rate = double(censored) / double(run.path_count);
    row.big_l = big_l(kernel.J.profile, sorted[i]);
    row.product = row.mean_exit * row.big_l;
    if (row.censor_rate > 0.2) report.refine_warning = true;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace levylab
