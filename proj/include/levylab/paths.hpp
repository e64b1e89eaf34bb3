#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <thread>
#include <unordered_map>
#include <vector>

#include "levylab/frozen.hpp"
#include "levylab/kernel.hpp"
#include "levylab/rng.hpp"
#include "levylab/stats.hpp"

namespace levylab {

struct PathConfig {
  Point x0;
  int n = 12;               // time step 2^{-n}
  double horizon = 8.0;     // a multiple of 2^{-n}
  double eps_cut = 0x1p-10;
  bool gaussian_correction = true;
  std::uint64_t seed = 1;
  std::size_t path_count = 10000;
  unsigned threads = 1;
  double drift_corruption = 0.0;           // negative-control knob
  std::optional<double> sigma_override;    // degenerate diffusion fixture

  double dt() const { return std::ldexp(1.0, -n); }
  std::size_t steps() const {
    return static_cast<std::size_t>(std::llround(horizon / dt()));
  }
};

struct SamplePath {
  int n = 0;
  std::vector<Point> states;               // states at k 2^{-n}, k = 0..K
  std::vector<std::pair<double, Point>> jump_log;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
};

namespace detail {

// Memoized per-state Gaussian variance rate sigma^2(z) =
// d^{-1} \int_{||h||<eps} ||h||^2 K(z,h) dh, quantized at 2^{-12} in each
// coordinate (well below every other numeric tolerance in play).
class Sigma2Memo {
 public:
  Sigma2Memo(const StateKernel& kernel, double eps)
      : kernel_(&kernel), eps_(eps) {}

  double at(const Point& z);

 private:
  double compute(const Point& z) const;

  const StateKernel* kernel_;
  double eps_;
  std::unordered_map<std::uint64_t, double> cache_;
  bool have_constant_ = false;
  double constant_value_ = 0.0;
};

struct PathEngine {
  const StateKernel* kernel = nullptr;
  std::shared_ptr<const JumpSampler> sampler;
  double dt = 0.0;
  double candidate_rate = 0.0;  // c2 * \int_{>=eps} J
  double c2 = 1.0;
  int dim = 1;
  bool gaussian = true;
  std::optional<double> sigma_override;
  double drift = 0.0;

  PathEngine(const StateKernel& k, const PathConfig& cfg)
      : kernel(&k),
        sampler(build_jump_sampler(k.J, cfg.eps_cut)),
        dt(cfg.dt()),
        candidate_rate(k.A.c2 * sampler->total_mass),
        c2(k.A.c2),
        dim(k.dim()),
        gaussian(cfg.gaussian_correction),
        sigma_override(cfg.sigma_override),
        drift(cfg.drift_corruption) {}

  // One frozen-coefficient step; returns the accepted jumps through the
  // optional recorder.
  template <class JumpRecorder>
  void step(Point& x, double t, RngStream& rng, Sigma2Memo& sigma_memo,
            JumpRecorder&& record_jump) const {
    const Point frozen_state = x;
    Point incr = zero_point(dim);
    const std::uint64_t candidates = rng.poisson(dt * candidate_rate);
    for (std::uint64_t c = 0; c < candidates; ++c) {
      const double r = sampler->sample_radius(rng.uniform());
      Point h;
      if (dim == 1) {
        h = point1(rng.uniform() < 0.5 ? -r : r);
      } else {
        const double th = 2.0 * M_PI * rng.uniform();
        h = point2(r * std::cos(th), r * std::sin(th));
      }
      const double a = kernel->A.A(frozen_state, h);
      if (a > c2 * (1.0 + 1e-9)) {
        throw std::runtime_error("path step: A(x,h) exceeds the c2 envelope");
      }
      if (rng.uniform() * c2 < a) {
        incr += h;
        record_jump(t + dt * rng.uniform(), h);
      }
    }
    if (gaussian) {
      const double s2 = sigma_override ? *sigma_override
                                       : sigma_memo.at(frozen_state);
      if (s2 > 0.0) {
        const double sigma = std::sqrt(dt * s2);
        for (int i = 0; i < dim; ++i) incr[i] += sigma * rng.normal();
      }
    }
    x = frozen_state + incr;
    x[0] += drift * dt;
    if (!x.allFinite()) {
      throw std::runtime_error("path step produced a non-finite state");
    }
  }
};

}  // namespace detail

// Streaming driver. The visitor sees every grid state:
//   bool state(path_index, step_index k, t, x)   (return false to stop)
//   void jump(path_index, t, h)                  (accepted jumps)
// Results must be deposited into per-path slots; path RNG streams derive
// from (seed, path index), so the ensemble law is thread-count independent.
template <class Visitor>
void simulate_ensemble(const StateKernel& kernel, const PathConfig& cfg,
                       Visitor&& visit) {
  const detail::PathEngine engine(kernel, cfg);
  const std::size_t steps = cfg.steps();
  const unsigned workers =
      std::max(1u, std::min<unsigned>(cfg.threads,
                                      static_cast<unsigned>(cfg.path_count)));
  const auto run_block = [&](unsigned worker) {
    detail::Sigma2Memo sigma_memo(kernel, cfg.eps_cut);
    for (std::size_t p = worker; p < cfg.path_count; p += workers) {
      RngStream rng(cfg.seed, p);
      Point x = cfg.x0;
      if (!visit.state(p, 0, 0.0, x)) continue;
      for (std::size_t k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * engine.dt;
        engine.step(x, t, rng, sigma_memo,
                    [&](double jt, const Point& h) { visit.jump(p, jt, h); });
        if (!visit.state(p, k + 1, t + engine.dt, x)) break;
      }
    }
  };
  if (workers == 1) {
    run_block(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&run_block, w] { run_block(w); });
    }
    for (auto& th : pool) th.join();
  }
}

// Materialized trajectories (small runs and CSV export).
std::vector<SamplePath> simulate_paths(const StateKernel& kernel,
                                       const PathConfig& cfg);

struct TauChainStats {
  double eta = 0.0;
  int depth = 0;
  std::vector<std::vector<double>> tau;  // [path][i], censored at horizon
  std::vector<double> censor_rate;       // per chain index
  std::vector<MeanStderr> exp_moment;    // E e^{-tau_i}
  double gamma_fit = 1.0;
  double gamma_r_squared = 0.0;
  std::vector<double> tau1_cdf_t;        // P(tau_1 <= t) probe grid
  std::vector<double> tau1_cdf_p;
  std::vector<double> tau1_cdf_stderr;
  bool extend_horizon_warning = false;
};

TauChainStats tau_chain(const StateKernel& kernel, const PathConfig& cfg,
                        double eta, int depth);

struct ExitTimeRow {
  double radius = 0.0;
  double mean_exit = 0.0;   // grid-resolution exit time (upward bias <= dt)
  double stderr_ = 0.0;
  double censor_rate = 0.0;
  double big_l = 0.0;       // L(radius)
  double product = 0.0;     // mean_exit * L(radius)
};

struct ExitTimeReport {
  std::vector<ExitTimeRow> rows;
  double dt = 0.0;
  bool refine_warning = false;  // censoring above 20% at some radius
};

ExitTimeReport exit_times(const StateKernel& kernel, const PathConfig& cfg,
                          const Point& center, const std::vector<double>& radii);

}  // namespace levylab
