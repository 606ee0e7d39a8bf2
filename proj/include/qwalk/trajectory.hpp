#pragma once

// Monte-Carlo trajectory engine.
//
// One trajectory follows the production algorithm for the walk with
// spontaneous emission: per kick, draw up to three emission times at
// the fixed total rate gamma, snap each to the nearest of `substeps` equal
// sub-intervals of the pulse, and apply the collapse there.  Between events
// the kick phases commute with each other, so a whole segment of sub-steps
// is applied as a single spectral multiplication with the accumulated phase
// fraction; the sub-step count then only controls the time resolution of
// the collapses (and, optionally, the kinetic Trotterization inside the
// pulse when finite_pulse_kinetics is requested).
//
// Ensembles average trajectories with independent RNG substreams and, when a
// quasimomentum width is configured, a fresh Gaussian beta per trajectory.
// Accumulation runs over a fixed number of contiguous blocks that are summed
// in index order, which makes the ensemble average bit-identical for any
// thread count.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "qwalk/constants.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/physics_params.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/se_model.hpp"
#include "qwalk/state.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

struct RunConfig {
  // Dimensionless targets (ignored when explicit physics is supplied).
  double k1 = 1.45, k2 = 1.45;   // kick strengths per level
  double p_se = 0.0;             // scattering probability per kick
  double ratio1 = 1.0, ratio2 = 1.0;  // gamma1 : gamma2 split
  double tau_p = 380e-9;         // pulse duration (s)
  double tau_se = 26e-9;         // excited-state lifetime (s)
  double tau = resonant_tau;     // free-evolution phase per period
  double period_phys = 0.0;      // physical kick period (s), 0 = unspecified

  // Laboratory parameters given directly; they win over the targets above.
  bool has_explicit_physics = false;
  PhysicsParams physics;

  // Walk.
  int steps = 15;
  int n_max = 0;                 // momentum-span truncation; 0 = automatic
  double coin_alpha = pi / 4.0, coin_chi = pi / 2.0;
  bool apply_phase_correction = false;  // re-insert the uncompensated phase

  // Emission handling.
  CollapseMode collapse_mode = CollapseMode::MeanCos;
  int substeps = 4096;
  bool finite_pulse_kinetics = false;

  // Ensemble.
  int n_traj = 1000;
  double beta_mean = 0.0;
  double beta_fwhm = 0.0;        // FWHM of the Gaussian quasimomentum spread
  std::uint64_t seed = 1;
  int threads = 0;               // 0 = hardware concurrency
};

struct ResolvedRun {
  RunConfig cfg;                 // input echo
  PhysicsParams physics;
  DerivedParams derived;
  SeChannelWeights weights;      // rates with the configured split applied
  CoinMatrix coin;
  double kick1 = 0.0, kick2 = 0.0;  // light-shift-corrected kick phases
  double spacing = 1.0;
  int n_sites = 0;               // ladder half-width in sites
  double tau_kick = 0.0;         // kinetic phase spent inside the pulse
  double tau_free = 0.0;         // remaining free-evolution phase
  std::vector<std::string> warnings;
};

inline ResolvedRun resolve(const RunConfig& cfg) {
  if (cfg.steps < 0) throw ConfigError("walk: steps must be >= 0");
  if (cfg.n_traj < 1) throw ConfigError("ensemble: trajectories must be >= 1");
  if (cfg.substeps < 1) throw ConfigError("se: substeps must be >= 1");
  if (cfg.k1 < 0.0 || cfg.k2 < 0.0) throw ConfigError("physics: k must be >= 0");
  if (!(cfg.p_se >= 0.0 && cfg.p_se < 1.0))
    throw ConfigError("physics: p_se must be in [0,1)");
  if (!(cfg.ratio1 > 0.0 && cfg.ratio2 > 0.0))
    throw ConfigError("se: ratio parts must be positive");
  if (!(cfg.beta_mean >= 0.0 && cfg.beta_mean < 1.0))
    throw ConfigError("ensemble: beta_mean must be in [0,1)");
  if (cfg.beta_fwhm < 0.0) throw ConfigError("ensemble: beta_fwhm must be >= 0");
  if (cfg.finite_pulse_kinetics && !(cfg.period_phys > 0.0))
    throw ConfigError("se: finite_pulse_kinetics needs period_phys > 0");

  ResolvedRun r;
  r.cfg = cfg;
  if (cfg.has_explicit_physics) {
    r.physics = cfg.physics;
    r.derived = derive(r.physics, &r.warnings);
    r.kick1 = r.derived.xi1 * r.derived.k1;
    r.kick2 = r.derived.xi2 * r.derived.k2;
    r.weights = SeChannelWeights::from_params(r.physics, r.derived);
  } else {
    const double kbar = std::sqrt(cfg.k1 * cfg.k2);
    if (kbar > 0.0) {
      r.physics = invert_for_targets(kbar, cfg.p_se, 1.0, 1.0, cfg.tau_p, cfg.tau_se);
      r.physics.tau = cfg.tau;
      r.physics.period_phys = cfg.period_phys;
      r.derived = derive(r.physics, &r.warnings);
      r.weights = SeChannelWeights::from_params(r.physics, r.derived);
      // Keep the configured kick strengths; only the light-shift factor and
      // the internal jump amplitudes come from the inverted parameters.  The
      // rate split is a free experimental knob and is imposed on top.
      const double rsum = cfg.ratio1 + cfg.ratio2;
      r.weights.gamma1 = r.derived.gamma * cfg.ratio1 / rsum;
      r.weights.gamma2 = r.derived.gamma * cfg.ratio2 / rsum;
      r.kick1 = r.derived.xi1 * cfg.k1;
      r.kick2 = r.derived.xi2 * cfg.k2;
    } else {
      if (cfg.p_se > 0.0)
        throw ConfigError("physics: p_se > 0 requires a nonzero kick strength");
      r.physics = PhysicsParams{};
      r.physics.tau_p = cfg.tau_p;
      r.weights = SeChannelWeights{};
      r.weights.gamma1 = r.weights.gamma2 = 0.0;
    }
  }

  r.coin = coin_matrix(cfg.coin_alpha, cfg.coin_chi);
  if (!r.coin.is_unitary()) throw ConfigError("walk: coin matrix is not unitary");

  r.spacing = (cfg.collapse_mode == CollapseMode::ExactCos) ? 0.5 : 1.0;
  const double kmax = std::max(r.kick1, r.kick2);
  const int span = (cfg.n_max > 0) ? cfg.n_max : default_n_max(cfg.steps, kmax);
  r.n_sites = (r.spacing == 0.5) ? 2 * span : span;

  if (cfg.finite_pulse_kinetics) {
    r.tau_kick = cfg.tau * (cfg.tau_p / cfg.period_phys);
    if (r.tau_kick >= cfg.tau)
      throw ConfigError("se: period_phys must exceed tau_p");
  }
  r.tau_free = cfg.tau - r.tau_kick;
  return r;
}

// Applies one kick pulse including any emission events, using `workspace`
// for the spectral phases.  Events can be injected for testing through
// `forced`; normally they are drawn from `rng`.  Returns the events applied.
inline std::vector<SeEvent> kick_with_se(WalkerState& s, const ResolvedRun& r, Rng& rng,
                                         KickWorkspace& ws,
                                         const std::vector<SeEvent>* forced = nullptr) {
  const int nsub = r.cfg.substeps;
  std::vector<SeEvent> events;
  if (forced) {
    events = *forced;
  } else {
    const std::vector<double> times =
        draw_se_times(rng, r.weights.total_rate(), r.cfg.tau_p);
    events.reserve(times.size());
    for (double t : times) {
      SeEvent ev;
      ev.t = t;
      ev.channel = select_channel(rng, r.weights);
      ev.u = sample_recoil_u(rng);
      events.push_back(ev);
    }
  }

  // Segment boundaries: each event snaps to the nearest sub-step edge.
  auto run_segment = [&](long from, long to) {
    if (to <= from) return;
    const double frac = static_cast<double>(to - from) / static_cast<double>(nsub);
    if (r.cfg.finite_pulse_kinetics) {
      const double dk = r.tau_kick / static_cast<double>(nsub);
      for (long q = from; q < to; ++q) {
        ws.apply_phases(s, r.kick1 / nsub, r.kick2 / nsub);
        apply_free_evolution(s, dk);
      }
    } else {
      ws.apply_phases(s, r.kick1 * frac, r.kick2 * frac);
    }
  };

  long cursor = 0;
  for (const SeEvent& ev : events) {
    long snap = std::lround(ev.t / r.cfg.tau_p * nsub);
    if (snap < 0) snap = 0;
    if (snap > nsub) snap = nsub;
    run_segment(cursor, snap);
    apply_collapse(s, ev, r.weights, r.cfg.collapse_mode);
    cursor = snap;
  }
  run_segment(cursor, nsub);
  return events;
}

// Runs a single trajectory from the ratchet state at quasimomentum `beta`,
// invoking `sink(step, state)` after preparation (step 0) and after each
// full period.  Returns the total number of emission events.
inline int run_trajectory(const ResolvedRun& r, double beta, Rng& rng,
                          const std::function<void(int, const WalkerState&)>& sink) {
  WalkerState s = ratchet_state(r.n_sites, beta, r.spacing);
  KickWorkspace ws(r.n_sites, r.spacing);
  int events = 0;
  sink(0, s);
  for (int step = 1; step <= r.cfg.steps; ++step) {
    events += static_cast<int>(kick_with_se(s, r, rng, ws).size());
    if (r.cfg.apply_phase_correction) {
      // Without experimental compensation, level |1> leads |2> by the
      // dynamical phase each period.
      const cplx ph = std::polar(1.0, r.derived.phi_dyn);
      for (cplx& v : s.a1) v *= ph;
    }
    apply_coin(s, r.coin);
    apply_free_evolution(s, r.tau_free);
    sink(step, s);
  }
  return events;
}

struct EnsembleResult {
  ResolvedRun resolved;
  std::vector<MomentumDistribution> frames;  // ensemble average per step
  std::vector<int> event_counts;             // per trajectory
  long total_events = 0;
  double mean_beta = 0.0;
  double elapsed_seconds = 0.0;
};

namespace detail {

inline double fold_unit(double x) {
  const double f = x - std::floor(x);
  return (f >= 1.0) ? 0.0 : f;  // guard against floor rounding at the edge
}

}

// Number of accumulation blocks; fixed so that the reduction order (and the
// bit pattern of the result) does not depend on the thread count.
inline constexpr int kEnsembleBlocks = 64;

inline EnsembleResult run_ensemble(const RunConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  EnsembleResult out;
  out.resolved = resolve(cfg);
  const ResolvedRun& r = out.resolved;

  const int nt = cfg.n_traj;
  const int nframes = cfg.steps + 1;
  const int sites = 2 * r.n_sites + 1;
  const int nblocks = std::min(kEnsembleBlocks, nt);

  struct Block {
    std::vector<double> acc1, acc2;  // nframes * sites
    double beta_sum = 0.0;
  };
  std::vector<Block> blocks(static_cast<std::size_t>(nblocks));
  out.event_counts.assign(static_cast<std::size_t>(nt), 0);

  const double sigma =
      (cfg.beta_fwhm > 0.0) ? cfg.beta_fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0))) : 0.0;

  auto run_block = [&](int b) {
    Block& blk = blocks[static_cast<std::size_t>(b)];
    blk.acc1.assign(static_cast<std::size_t>(nframes) * sites, 0.0);
    blk.acc2.assign(static_cast<std::size_t>(nframes) * sites, 0.0);
    const int lo = static_cast<int>(static_cast<long>(nt) * b / nblocks);
    const int hi = static_cast<int>(static_cast<long>(nt) * (b + 1) / nblocks);
    for (int j = lo; j < hi; ++j) {
      Rng rng(cfg.seed, static_cast<std::uint64_t>(j));
      const double beta = (sigma > 0.0)
                              ? detail::fold_unit(cfg.beta_mean + sigma * rng.gaussian())
                              : cfg.beta_mean;
      blk.beta_sum += beta;
      const int ev = run_trajectory(r, beta, rng, [&](int step, const WalkerState& s) {
        double* d1 = blk.acc1.data() + static_cast<std::size_t>(step) * sites;
        double* d2 = blk.acc2.data() + static_cast<std::size_t>(step) * sites;
        for (int i = 0; i < sites; ++i) {
          d1[i] += std::norm(s.a1[static_cast<std::size_t>(i)]);
          d2[i] += std::norm(s.a2[static_cast<std::size_t>(i)]);
        }
      });
      out.event_counts[static_cast<std::size_t>(j)] = ev;
    }
  };

  int nthreads = cfg.threads > 0 ? cfg.threads
                                 : static_cast<int>(std::thread::hardware_concurrency());
  if (nthreads < 1) nthreads = 1;
  if (nthreads > nblocks) nthreads = nblocks;

  if (nthreads == 1) {
    for (int b = 0; b < nblocks; ++b) run_block(b);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nthreads));
    for (int w = 0; w < nthreads; ++w)
      pool.emplace_back([&] {
        for (;;) {
          const int b = next.fetch_add(1);
          if (b >= nblocks) return;
          run_block(b);
        }
      });
    for (std::thread& th : pool) th.join();
  }

  // Ordered reduction.
  std::vector<double> sum1(static_cast<std::size_t>(nframes) * sites, 0.0);
  std::vector<double> sum2(static_cast<std::size_t>(nframes) * sites, 0.0);
  double beta_sum = 0.0;
  for (const Block& blk : blocks) {
    for (std::size_t i = 0; i < sum1.size(); ++i) sum1[i] += blk.acc1[i];
    for (std::size_t i = 0; i < sum2.size(); ++i) sum2[i] += blk.acc2[i];
    beta_sum += blk.beta_sum;
  }

  out.frames.reserve(static_cast<std::size_t>(nframes));
  for (int step = 0; step < nframes; ++step) {
    MomentumDistribution d;
    d.step = step;
    d.n_max = r.n_sites;
    d.spacing = r.spacing;
    d.p1.resize(sites);
    d.p2.resize(sites);
    d.total.resize(sites);
    for (int i = 0; i < sites; ++i) {
      d.p1[i] = sum1[static_cast<std::size_t>(step) * sites + i] / nt;
      d.p2[i] = sum2[static_cast<std::size_t>(step) * sites + i] / nt;
      d.total[i] = d.p1[i] + d.p2[i];
    }
    out.frames.push_back(std::move(d));
  }
  for (int c : out.event_counts) out.total_events += c;
  out.mean_beta = beta_sum / nt;
  out.elapsed_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}
