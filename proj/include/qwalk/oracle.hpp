#pragma once

// Dense reference solvers for small walks.
//
// Everything here trades speed for independence from the trajectory engine:
// the master equation of the decaying walk is integrated as a full density
// matrix (fixed-step RK4), and a textbook norm-threshold Monte-Carlo
// unraveling of the same generator provides a second, stochastic reference.
//
// The solvers work on a periodic angle grid with an odd number of points
// M = 2 n_max + 1, theta_j in (-pi, pi], which is the conjugate basis of the
// integer ladder -n_max..n_max.  Every pulse operator is diagonal in theta,
// so a density matrix evolves block by block in (theta_i, theta_j), each
// block a 2x2 internal matrix.  The half-angle recoil factor e^{-iu theta/2}
// is taken on the same grid (symmetric branch, cos(theta/2) >= 0); this
// periodic convention is what makes a fixed-size dense computation possible
// and is shared by both solvers, so they can be compared to each other and,
// at vanishing emission rate, to the ideal walk.
//
// The internal energy offsets of the two ground levels are left out: they
// commute with everything during the pulse and produce only the relative
// phase that the experiment's phase correction removes.  For the same reason
// each pulse ends with the compensation unitary diag(e^{-i xi1 k1},
// e^{+i xi2 k2}) that strips the constant light-shift phase, exactly as the
// kick operator of the ideal walk is defined.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "qwalk/constants.hpp"
#include "qwalk/effective_reduction.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/physics_params.hpp"
#include "qwalk/quadrature.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/state.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

// ---------------------------------------------------------------------------
// Generic dense Lindblad right-hand side and RK4 step (any dimension).

struct LindbladTerm {
  double rate = 0.0;
  Eigen::MatrixXcd op;
};

inline void lindblad_rhs(const Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& h,
                         const std::vector<LindbladTerm>& ls, Eigen::MatrixXcd& out) {
  out = -iu * (h * rho - rho * h);
  for (const LindbladTerm& t : ls) {
    if (t.rate == 0.0) continue;
    const Eigen::MatrixXcd lr = t.op * rho;
    const Eigen::MatrixXcd ll = t.op.adjoint() * t.op;
    out += t.rate * (lr * t.op.adjoint() - 0.5 * (ll * rho + rho * ll));
  }
}

// One fixed-step RK4 update of the master equation.  Guards against step
// sizes that are obviously beyond the stability region of the generator.
inline void lindblad_step(Eigen::MatrixXcd& rho, const Eigen::MatrixXcd& h,
                          const std::vector<LindbladTerm>& ls, double dt) {
  double scale = h.norm();
  for (const LindbladTerm& t : ls) scale += t.rate * t.op.squaredNorm();
  if (!(dt * scale < 1.0))
    throw NumericalError("lindblad_step: dt * ||generator|| = " +
                         std::to_string(dt * scale) + " is too large for RK4");
  Eigen::MatrixXcd k1, k2, k3, k4, tmp;
  lindblad_rhs(rho, h, ls, k1);
  tmp = rho + (dt / 2.0) * k1;
  lindblad_rhs(tmp, h, ls, k2);
  tmp = rho + (dt / 2.0) * k2;
  lindblad_rhs(tmp, h, ls, k3);
  tmp = rho + dt * k3;
  lindblad_rhs(tmp, h, ls, k4);
  rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Density-matrix sanity: Hermitian, unit trace, no negative eigenvalue
// beyond tolerance.
inline void check_density_matrix(const Eigen::MatrixXcd& rho, double herm_tol = 1e-9,
                                 double trace_tol = 1e-9, double pos_tol = 1e-8) {
  const double herm = (rho - rho.adjoint().eval()).cwiseAbs().maxCoeff();
  if (herm > herm_tol)
    throw NumericalError("density matrix lost hermiticity: " + std::to_string(herm));
  const double tr = std::abs(rho.trace().real() - 1.0) + std::abs(rho.trace().imag());
  if (tr > trace_tol)
    throw NumericalError("density matrix lost trace: drift " + std::to_string(tr));
  Eigen::MatrixXcd sym = (rho + rho.adjoint().eval()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -pos_tol)
    throw NumericalError("density matrix lost positivity: min eigenvalue " +
                         std::to_string(es.eigenvalues().minCoeff()));
}

// ---------------------------------------------------------------------------
// Dense walk configuration.

struct DenseWalkConfig {
  ThreeLevelModel model;  // omega/detunings define shapes, gamma1/2 the rates
  double tau_p = 380e-9;  // pulse duration (s)
  double tau = resonant_tau;
  double beta = 0.0;
  int n_max = 6;
  int steps = 2;
  CoinMatrix coin = balanced_coin();
  int quad_nodes = 16;
  double dt_safety = 10.0;
};

// Builds a dense configuration realizing dimensionless targets the same way
// the trajectory engine does: symmetric-detuning inversion for the shapes,
// with the rate split imposed separately.
inline DenseWalkConfig dense_config_from_targets(double k, double p_se, double ratio1,
                                                 double ratio2, double tau_p,
                                                 double tau_se) {
  const PhysicsParams p = invert_for_targets(k, p_se, 1.0, 1.0, tau_p, tau_se);
  const DerivedParams d = derive(p);
  DenseWalkConfig cfg;
  cfg.model.omega = p.omega;
  cfg.model.delta1 = p.delta1;
  cfg.model.delta2 = p.delta2;
  const double rsum = ratio1 + ratio2;
  cfg.model.gamma1 = d.gamma * ratio1 / rsum;
  cfg.model.gamma2 = d.gamma * ratio2 / rsum;
  cfg.tau_p = tau_p;
  return cfg;
}

namespace detail {

// Per-run tables shared by the dense and MCWF solvers.
//
// The jump operators are calibrated so that gamma_m keeps its meaning as the
// per-level scattering rate of the walker: the internal shape (c1, c2) is
// normalized to a unit row v, and the rate carries a factor 2 that undoes the
// spatial average <cos^2(theta/2)> = 1/2 of the mode profile.  A walker whose
// internal state is aligned with v then scatters at exactly gamma1 + gamma2,
// which is the rate at which the trajectory engine draws its emission times.
struct PulseTables {
  int msize = 0;                      // grid points / ladder sites
  std::vector<double> theta;          // symmetric grid (-pi, pi]
  std::vector<double> cos_t, cos_h;   // cos(theta), cos(theta/2)
  Eigen::Matrix2cd hint;              // coefficient of cos^2(theta/2)
  Eigen::Vector2cd cvec;              // unit jump shape v = (c1, c2)/|c|, unconjugated row
  Eigen::Matrix2cd njump[2];          // |m><v| per channel
  Eigen::Matrix2cd cc;                // N^dag N, channel independent
  double g1 = 0.0, g2 = 0.0;          // calibrated jump rates 2 gamma_m (1/s)
  QuadratureRule quad;
  Eigen::MatrixXcd vmat;              // ladder -> theta unitary, V_{jn} = e^{i n theta_j}/sqrt(M)
  cplx comp1{1.0, 0.0}, comp2{1.0, 0.0};  // end-of-pulse compensation phases
  double xi_k1 = 0.0, xi_k2 = 0.0;    // effective kick strengths (for reference)

  PulseTables(const DenseWalkConfig& cfg) {
    if (cfg.n_max < 2 || cfg.n_max > 10)
      throw ConfigError("dense oracle: n_max must be in [2, 10]");
    msize = 2 * cfg.n_max + 1;
    const EffectiveModel eff = reduce(cfg.model);
    hint << eff.h11, eff.h12, std::conj(eff.h12), eff.h22;
    const double cn = std::sqrt(std::norm(eff.c1) + std::norm(eff.c2));
    if (!(cn > 0.0) && (cfg.model.gamma1 > 0.0 || cfg.model.gamma2 > 0.0))
      throw ConfigError("dense oracle: nonzero decay rates with a vanishing jump shape");
    const cplx v1 = (cn > 0.0) ? eff.c1 / cn : cplx{1.0, 0.0};
    const cplx v2 = (cn > 0.0) ? eff.c2 / cn : cplx{0.0, 0.0};
    cvec << v1, v2;
    for (int m = 0; m < 2; ++m) {
      njump[m].setZero();
      njump[m](m, 0) = v1;
      njump[m](m, 1) = v2;
    }
    cc = cvec.conjugate() * cvec.transpose();
    g1 = 2.0 * cfg.model.gamma1;
    g2 = 2.0 * cfg.model.gamma2;
    quad = QuadratureRule::gauss_legendre_xi(cfg.quad_nodes);

    theta.resize(static_cast<std::size_t>(msize));
    cos_t.resize(static_cast<std::size_t>(msize));
    cos_h.resize(static_cast<std::size_t>(msize));
    const int half = cfg.n_max;
    for (int j = 0; j < msize; ++j) {
      const double th = two_pi * (j - half) / msize;
      theta[static_cast<std::size_t>(j)] = th;
      cos_t[static_cast<std::size_t>(j)] = std::cos(th);
      cos_h[static_cast<std::size_t>(j)] = std::cos(th / 2.0);
    }

    vmat.resize(msize, msize);
    const double r = 1.0 / std::sqrt(static_cast<double>(msize));
    for (int j = 0; j < msize; ++j)
      for (int n = 0; n < msize; ++n)
        vmat(j, n) = std::polar(r, theta[static_cast<std::size_t>(j)] * (n - half));

    // -h11 tau_p = 2 xi1 k1 and h22 tau_p = 2 xi2 k2; the cos^2 phase then
    // splits into the cos(theta) kick and a constant removed at pulse end.
    xi_k1 = -eff.h11 * cfg.tau_p / 2.0;
    xi_k2 = +eff.h22 * cfg.tau_p / 2.0;
    comp1 = std::polar(1.0, -xi_k1);
    comp2 = std::polar(1.0, +xi_k2);
  }

  // Magnitude scale of the pulse generator (1/s).
  double generator_scale(double tau_p) const {
    const double hmag = hint.cwiseAbs().maxCoeff();
    return 2.0 * hmag + 2.0 * (g1 + g2) + 1.0 / tau_p;
  }
};

}

// ---------------------------------------------------------------------------
// Dense master-equation walk.

// Integrates `cfg.steps` periods of the decaying walk and returns the
// momentum distribution after every period (index 0 is the initial ratchet).
inline std::vector<MomentumDistribution> evolve_walk_dense(const DenseWalkConfig& cfg) {
  const detail::PulseTables tb(cfg);
  const int ms = tb.msize;
  const int half = cfg.n_max;

  // Layout: internal-major, rho = [[r11, r12], [r21, r22]] with M x M blocks.
  auto blk = [&](Eigen::MatrixXcd& r, int a, int b) {
    return r.block(a * ms, b * ms, ms, ms);
  };

  // Recoil kernel kappa_ij = sum_q w_q e^{-i u_q (theta_i - theta_j)/2}.
  Eigen::MatrixXcd kappa(ms, ms);
  for (int i = 0; i < ms; ++i)
    for (int j = 0; j < ms; ++j) {
      cplx s{0.0, 0.0};
      for (int q = 0; q < tb.quad.size(); ++q)
        s += tb.quad.w[static_cast<std::size_t>(q)] *
             std::polar(1.0, -tb.quad.u[static_cast<std::size_t>(q)] *
                                 (tb.theta[static_cast<std::size_t>(i)] -
                                  tb.theta[static_cast<std::size_t>(j)]) / 2.0);
      kappa(i, j) = s;
    }

  const double gscale = tb.generator_scale(cfg.tau_p);
  const long nsub = static_cast<long>(std::ceil(cfg.tau_p * gscale * cfg.dt_safety / 0.1));
  const double dt = cfg.tau_p / static_cast<double>(nsub);

  // Pulse RHS, one (theta_i, theta_j) block at a time.
  Eigen::MatrixXcd rho(2 * ms, 2 * ms), kr1(2 * ms, 2 * ms), kr2(2 * ms, 2 * ms),
      kr3(2 * ms, 2 * ms), kr4(2 * ms, 2 * ms), tmp(2 * ms, 2 * ms);
  auto rhs = [&](const Eigen::MatrixXcd& r, Eigen::MatrixXcd& out) {
    for (int i = 0; i < ms; ++i) {
      const double ci = tb.cos_h[static_cast<std::size_t>(i)];
      for (int j = 0; j < ms; ++j) {
        const double cj = tb.cos_h[static_cast<std::size_t>(j)];
        Eigen::Matrix2cd rb;
        rb << r(i, j), r(i, ms + j), r(ms + i, j), r(ms + i, ms + j);
        const Eigen::Matrix2cd hi = (ci * ci) * tb.hint;
        const Eigen::Matrix2cd hj = (cj * cj) * tb.hint;
        Eigen::Matrix2cd o = -iu * (hi * rb - rb * hj);
        const cplx inner = (tb.cvec.transpose() * rb * tb.cvec.conjugate())(0, 0);
        const cplx jump = kappa(i, j) * ci * cj * inner;
        o(0, 0) += tb.g1 * jump;
        o(1, 1) += tb.g2 * jump;
        const double g = tb.g1 + tb.g2;
        o -= (g / 2.0) * (ci * ci * (tb.cc * rb) + cj * cj * (rb * tb.cc));
        out(i, j) = o(0, 0);
        out(i, ms + j) = o(0, 1);
        out(ms + i, j) = o(1, 0);
        out(ms + i, ms + j) = o(1, 1);
      }
    }
  };

  // Initial ratchet (all four amplitudes of magnitude 1/2, unit norm).
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(2 * ms);
  psi(half + 0) = 0.5;
  psi(half + 1) = cplx{0.0, -0.5};
  psi(ms + half + 0) = 0.5;
  psi(ms + half + 1) = cplx{0.0, -0.5};
  rho = psi * psi.adjoint();

  std::vector<MomentumDistribution> frames;
  auto record = [&](int step) {
    MomentumDistribution d;
    d.step = step;
    d.n_max = half;
    d.spacing = 1.0;
    d.p1.resize(ms);
    d.p2.resize(ms);
    d.total.resize(ms);
    for (int n = 0; n < ms; ++n) {
      d.p1[n] = rho(n, n).real();
      d.p2[n] = rho(ms + n, ms + n).real();
      d.total[n] = d.p1[n] + d.p2[n];
    }
    frames.push_back(d);
  };
  record(0);

  Eigen::MatrixXcd free_d = Eigen::MatrixXcd::Zero(ms, ms);
  for (int n = 0; n < ms; ++n) {
    const double p = (n - half) + cfg.beta;
    free_d(n, n) = std::polar(1.0, -cfg.tau * p * p / 2.0);
  }

  for (int step = 1; step <= cfg.steps; ++step) {
    // ladder -> theta
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        blk(rho, a, b) = tb.vmat * blk(rho, a, b) * tb.vmat.adjoint();

    for (long s = 0; s < nsub; ++s) {
      rhs(rho, kr1);
      tmp = rho + (dt / 2.0) * kr1;
      rhs(tmp, kr2);
      tmp = rho + (dt / 2.0) * kr2;
      rhs(tmp, kr3);
      tmp = rho + dt * kr3;
      rhs(tmp, kr4);
      rho += (dt / 6.0) * (kr1 + 2.0 * kr2 + 2.0 * kr3 + kr4);
    }

    // theta -> ladder
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        blk(rho, a, b) = tb.vmat.adjoint() * blk(rho, a, b) * tb.vmat;

    // compensation, coin, free evolution (all cheap in the ladder basis)
    const cplx comp[2] = {tb.comp1, tb.comp2};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        blk(rho, a, b) *= comp[a] * std::conj(comp[b]);

    const cplx c[2][2] = {{cfg.coin.m00, cfg.coin.m01}, {cfg.coin.m10, cfg.coin.m11}};
    Eigen::MatrixXcd nb[2][2];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        nb[a][b] = Eigen::MatrixXcd::Zero(ms, ms);
        for (int x = 0; x < 2; ++x)
          for (int y = 0; y < 2; ++y)
            nb[a][b] += c[a][x] * std::conj(c[b][y]) * blk(rho, x, y);
      }
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        blk(rho, a, b) = nb[a][b];

    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        blk(rho, a, b) = free_d * blk(rho, a, b) * free_d.adjoint();

    check_density_matrix(rho, 1e-9, 1e-9, 1e-8);
    record(step);
  }
  return frames;
}

// ---------------------------------------------------------------------------
// Standard Monte-Carlo wave function with norm-threshold jumps.

struct McwfResult {
  std::vector<MomentumDistribution> frames;
  long jumps = 0;
};

// Unravels the same master equation as evolve_walk_dense: deterministic
// non-Hermitian drift between jumps, a jump when the squared norm crosses a
// uniformly drawn threshold.  The threshold survives across pulses (coin and
// free evolution are unitary and leave the norm alone).  The drift is applied
// with per-site 2x2 exponentials, exact for this piecewise-constant
// generator; jump times are resolved to one substep.
inline McwfResult mcwf_standard(const DenseWalkConfig& cfg, std::uint64_t seed,
                                int n_traj, int nsub_per_pulse = 0) {
  const detail::PulseTables tb(cfg);
  const int ms = tb.msize;
  const int half = cfg.n_max;

  if (nsub_per_pulse <= 0) {
    const double gscale = tb.generator_scale(cfg.tau_p);
    nsub_per_pulse = static_cast<int>(std::ceil(cfg.tau_p * gscale * cfg.dt_safety / 0.1));
  }
  const double ds = cfg.tau_p / nsub_per_pulse;

  // Site drift G_i = -i c_i^2 Hint - (gamma/2) c_i^2 N^dag N and its exact
  // substep propagator exp(G_i ds) (plain scaled Taylor; the argument norm is
  // far below 1).
  const double g = tb.g1 + tb.g2;
  std::vector<Eigen::Matrix2cd> prop(static_cast<std::size_t>(ms));
  std::vector<Eigen::Matrix2cd> prop_full(static_cast<std::size_t>(ms));
  for (int i = 0; i < ms; ++i) {
    const double c2 = tb.cos_h[static_cast<std::size_t>(i)] * tb.cos_h[static_cast<std::size_t>(i)];
    const Eigen::Matrix2cd gi = -iu * (c2 * tb.hint) - (g / 2.0) * c2 * tb.cc;
    auto expm = [](const Eigen::Matrix2cd& a) {
      const double nrm = a.cwiseAbs().maxCoeff();
      int scale = 0;
      while (nrm / std::pow(2.0, scale) > 0.25) ++scale;
      Eigen::Matrix2cd x = a / std::pow(2.0, scale);
      Eigen::Matrix2cd term = Eigen::Matrix2cd::Identity();
      Eigen::Matrix2cd sum = term;
      for (int k = 1; k <= 18; ++k) {
        term = (term * x) / static_cast<double>(k);
        sum += term;
      }
      for (int k = 0; k < scale; ++k) sum = sum * sum;
      return sum;
    };
    prop[static_cast<std::size_t>(i)] = expm(gi * ds);
    prop_full[static_cast<std::size_t>(i)] = expm(gi * cfg.tau_p);
  }

  const CoinMatrix coin = cfg.coin;
  std::vector<cplx> free_ph(static_cast<std::size_t>(ms));
  for (int n = 0; n < ms; ++n) {
    const double p = (n - half) + cfg.beta;
    free_ph[static_cast<std::size_t>(n)] = std::polar(1.0, -cfg.tau * p * p / 2.0);
  }

  // Accumulated per-step distributions.
  std::vector<std::vector<double>> acc1(static_cast<std::size_t>(cfg.steps + 1)),
      acc2(static_cast<std::size_t>(cfg.steps + 1));
  for (auto& v : acc1) v.assign(static_cast<std::size_t>(ms), 0.0);
  for (auto& v : acc2) v.assign(static_cast<std::size_t>(ms), 0.0);

  McwfResult res;
  Eigen::VectorXcd a1(ms), a2(ms), t1(ms), t2(ms);

  for (int tr = 0; tr < n_traj; ++tr) {
    Rng rng(seed, static_cast<std::uint64_t>(tr));
    a1.setZero();
    a2.setZero();
    a1(half) = 0.5;
    a1(half + 1) = cplx{0.0, -0.5};
    a2(half) = 0.5;
    a2(half + 1) = cplx{0.0, -0.5};
    double threshold = rng.uniform();

    auto accumulate = [&](int step) {
      const double nrm = a1.squaredNorm() + a2.squaredNorm();
      for (int n = 0; n < ms; ++n) {
        acc1[static_cast<std::size_t>(step)][static_cast<std::size_t>(n)] +=
            std::norm(a1(n)) / nrm;
        acc2[static_cast<std::size_t>(step)][static_cast<std::size_t>(n)] +=
            std::norm(a2(n)) / nrm;
      }
    };
    accumulate(0);

    for (int step = 1; step <= cfg.steps; ++step) {
      // ladder -> theta
      t1 = tb.vmat * a1;
      t2 = tb.vmat * a2;

      if (g == 0.0) {
        for (int i = 0; i < ms; ++i) {
          const Eigen::Matrix2cd& e = prop_full[static_cast<std::size_t>(i)];
          const cplx v1 = t1(i), v2 = t2(i);
          t1(i) = e(0, 0) * v1 + e(0, 1) * v2;
          t2(i) = e(1, 0) * v1 + e(1, 1) * v2;
        }
      } else {
        for (int s = 0; s < nsub_per_pulse; ++s) {
          for (int i = 0; i < ms; ++i) {
            const Eigen::Matrix2cd& e = prop[static_cast<std::size_t>(i)];
            const cplx v1 = t1(i), v2 = t2(i);
            t1(i) = e(0, 0) * v1 + e(0, 1) * v2;
            t2(i) = e(1, 0) * v1 + e(1, 1) * v2;
          }
          double nrm = t1.squaredNorm() + t2.squaredNorm();
          if (nrm < threshold) {
            // Jump: channel by rate, recoil node by quadrature weight.
            const int ch = (rng.uniform() * g < tb.g1) ? 0 : 1;
            int q = tb.quad.size() - 1;
            double r = rng.uniform();
            for (int c = 0; c < tb.quad.size(); ++c) {
              r -= tb.quad.w[static_cast<std::size_t>(c)];
              if (r <= 0.0) {
                q = c;
                break;
              }
            }
            const double uq = tb.quad.u[static_cast<std::size_t>(q)];
            for (int i = 0; i < ms; ++i) {
              const double chv = tb.cos_h[static_cast<std::size_t>(i)];
              const cplx amp = (tb.cvec(0) * t1(i) + tb.cvec(1) * t2(i)) * chv *
                               std::polar(1.0, -uq * tb.theta[static_cast<std::size_t>(i)] / 2.0);
              if (ch == 0) {
                t1(i) = amp;
                t2(i) = cplx{0.0, 0.0};
              } else {
                t2(i) = amp;
                t1(i) = cplx{0.0, 0.0};
              }
            }
            nrm = t1.squaredNorm() + t2.squaredNorm();
            if (!(nrm > 0.0))
              throw NumericalError("mcwf_standard: jump annihilated the state");
            const double inv = 1.0 / std::sqrt(nrm);
            t1 *= inv;
            t2 *= inv;
            threshold = rng.uniform();
            ++res.jumps;
          }
        }
      }

      // theta -> ladder
      a1 = tb.vmat.adjoint() * t1;
      a2 = tb.vmat.adjoint() * t2;

      // compensation + coin + free evolution
      a1 *= tb.comp1;
      a2 *= tb.comp2;
      for (int n = 0; n < ms; ++n) {
        const cplx v1 = a1(n), v2 = a2(n);
        a1(n) = coin.m00 * v1 + coin.m01 * v2;
        a2(n) = coin.m10 * v1 + coin.m11 * v2;
        a1(n) *= free_ph[static_cast<std::size_t>(n)];
        a2(n) *= free_ph[static_cast<std::size_t>(n)];
      }
      accumulate(step);
    }
  }

  for (int step = 0; step <= cfg.steps; ++step) {
    MomentumDistribution d;
    d.step = step;
    d.n_max = half;
    d.spacing = 1.0;
    d.p1.resize(ms);
    d.p2.resize(ms);
    d.total.resize(ms);
    for (int n = 0; n < ms; ++n) {
      d.p1[n] = acc1[static_cast<std::size_t>(step)][static_cast<std::size_t>(n)] / n_traj;
      d.p2[n] = acc2[static_cast<std::size_t>(step)][static_cast<std::size_t>(n)] / n_traj;
      d.total[n] = d.p1[n] + d.p2[n];
    }
    res.frames.push_back(d);
  }
  return res;
}

// Full-matrix generators of one pulse in the theta basis (internal-major
// layout, dimension 2M).  Feeding these to lindblad_step reproduces the
// block integrator inside evolve_walk_dense; the tests use that agreement as
// a structural cross-check.
inline void build_pulse_generators(const DenseWalkConfig& cfg, Eigen::MatrixXcd& h,
                                   std::vector<LindbladTerm>& ls) {
  const detail::PulseTables tb(cfg);
  const int ms = tb.msize;
  h = Eigen::MatrixXcd::Zero(2 * ms, 2 * ms);
  for (int i = 0; i < ms; ++i) {
    const double c2 = tb.cos_h[static_cast<std::size_t>(i)] * tb.cos_h[static_cast<std::size_t>(i)];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        h(a * ms + i, b * ms + i) = c2 * tb.hint(a, b);
  }
  ls.clear();
  for (int m = 0; m < 2; ++m) {
    const double gm = (m == 0) ? tb.g1 : tb.g2;
    for (int q = 0; q < tb.quad.size(); ++q) {
      LindbladTerm t;
      t.rate = gm * tb.quad.w[static_cast<std::size_t>(q)];
      t.op = Eigen::MatrixXcd::Zero(2 * ms, 2 * ms);
      for (int i = 0; i < ms; ++i) {
        const cplx ph = std::polar(tb.cos_h[static_cast<std::size_t>(i)],
                                   -tb.quad.u[static_cast<std::size_t>(q)] *
                                       tb.theta[static_cast<std::size_t>(i)] / 2.0);
        t.op(m * ms + i, 0 * ms + i) = ph * tb.cvec(0);
        t.op(m * ms + i, 1 * ms + i) = ph * tb.cvec(1);
      }
      ls.push_back(std::move(t));
    }
  }
}

}
