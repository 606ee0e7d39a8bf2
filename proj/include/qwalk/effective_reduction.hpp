#pragma once

// Adiabatic elimination of the excited state.
//
// The full pulse Hamiltonian couples two ground levels to one decaying
// excited level through the standing-wave profile (omega/2) cos(theta/2).
// For large detunings the excited state can be eliminated, leaving an
// effective two-level generator: light-shift potentials cos^2(theta/2) on
// each ground level, a pair of conjugate cross couplings proportional to
// (delta2 - delta1), and bipartite jump operators that combine excitation
// and decay into a single collapse.  reduce() produces those closed-form
// coefficients; validate_reduction() integrates both master equations for
// one pulse and reports how far apart the ground-state density matrices
// drift, which is the quantitative license for using the reduced model.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "qwalk/constants.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/quadrature.hpp"

namespace qwalk {

struct ThreeLevelModel {
  double omega = 0.0;   // Rabi frequency (rad/s)
  double delta1 = 0.0;  // detuning of |1>, red side (rad/s); level energy -delta1
  double delta2 = 0.0;  // detuning of |2>, blue side (rad/s); level energy +delta2
  double gamma1 = 0.0;  // decay rate |e> -> |1> (1/s)
  double gamma2 = 0.0;  // decay rate |e> -> |2> (1/s)

  double gamma() const { return gamma1 + gamma2; }
};

struct EffectiveModel {
  // H_eff = -delta1 |1><1| + delta2 |2><2|
  //         + cos^2(theta/2) [ h11 |1><1| + h22 |2><2| + h12 |1><2| + h12* |2><1| ]
  double h11 = 0.0, h22 = 0.0;  // rad/s
  cplx h12{0.0, 0.0};
  // Jump operators sqrt(gamma_m) e^{-iu theta/2} cos(theta/2) (c1 |m><1| + c2 |m><2|).
  cplx c1{0.0, 0.0}, c2{0.0, 0.0};
  std::vector<std::string> warnings;
};

inline EffectiveModel reduce(const ThreeLevelModel& m) {
  if (m.delta1 == 0.0 || m.delta2 == 0.0)
    throw ConfigError("reduce: detunings must be nonzero");
  if (m.gamma1 < 0.0 || m.gamma2 < 0.0)
    throw ConfigError("reduce: decay rates must be non-negative");
  const double g = m.gamma();
  const double w2 = m.omega * m.omega;

  EffectiveModel e;
  e.h11 = -m.delta1 * w2 / (4.0 * m.delta1 * m.delta1 + g * g);
  e.h22 = +m.delta2 * w2 / (4.0 * m.delta2 * m.delta2 + g * g);
  e.h12 = (m.delta2 - m.delta1) * w2 /
          (8.0 * cplx{m.delta1, g / 2.0} * cplx{-m.delta2, -g / 2.0});
  e.c1 = m.omega / (2.0 * cplx{m.delta1, -g / 2.0});
  e.c2 = m.omega / (2.0 * cplx{-m.delta2, -g / 2.0});

  for (double d : {m.delta1, m.delta2}) {
    if (m.omega > 0.3 * std::abs(d)) {
      e.warnings.push_back(
          "reduce: omega/|delta| = " + std::to_string(m.omega / std::abs(d)) +
          " exceeds 0.3; the perturbative elimination is unreliable here");
      break;
    }
  }
  return e;
}

struct ReductionReport {
  double max_trace_distance = 0.0;    // over sampled times during the pulse
  double final_trace_distance = 0.0;  // at the end of the pulse
  double max_excited_population = 0.0;
  double trace_drift = 0.0;           // |tr rho - 1| of the three-level leg
  std::vector<std::string> warnings;
};

namespace detail {

// Trace distance (1/2) ||a - b||_1 of two Hermitian matrices.
inline double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd d = a - b;
  d = (d + d.adjoint().eval()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(d, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}

// Integrates one pulse of duration tau_p under (a) the literal three-level
// master equation and (b) the effective two-level one from reduce(), both on
// a half-integer momentum ladder spanning sites -span..span (momentum units
// of 1/2), and compares the ground-state density matrices.  Both legs carry
// the recoil average over the emission direction through the same
// Gauss-Legendre rule.  The fixed-step RK4 width is 0.1/(safety * g) with g
// the magnitude scale of the generator.
inline ReductionReport validate_reduction(const ThreeLevelModel& m, double tau_p,
                                          int span = 2, double dt_safety = 10.0,
                                          int quad_nodes = 16) {
  if (!(tau_p > 0.0)) throw ConfigError("validate_reduction: tau_p must be positive");
  if (span < 1 || span > 16) throw ConfigError("validate_reduction: span out of range");

  const EffectiveModel eff = reduce(m);
  ReductionReport rep;
  rep.warnings = eff.warnings;
  if (m.gamma() > 0.0 && m.gamma() * tau_p < 1.0)
    rep.warnings.push_back(
        "validate_reduction: gamma*tau_p < 1, the excited state does not decay "
        "within the pulse and the effective jump picture degrades");

  const int ms = 2 * span + 1;  // ladder sites, momentum h/2 for h in [-span, span]
  const QuadratureRule quad = QuadratureRule::gauss_legendre_xi(quad_nodes);

  // theta grid conjugate to the half-integer ladder: theta_j = 4 pi j / ms,
  // i.e. plane waves e^{i (h/2) theta_j} form the DFT basis.
  std::vector<double> theta(static_cast<std::size_t>(ms));
  for (int j = 0; j < ms; ++j) theta[static_cast<std::size_t>(j)] = 4.0 * pi * j / ms;

  // Recoil kernel kappa_ij = sum_q w_q e^{-i u_q (theta_i - theta_j)/2}.
  Eigen::MatrixXcd kappa(ms, ms);
  for (int i = 0; i < ms; ++i)
    for (int j = 0; j < ms; ++j) {
      cplx s{0.0, 0.0};
      for (int q = 0; q < quad.size(); ++q)
        s += quad.w[static_cast<std::size_t>(q)] *
             std::polar(1.0, -quad.u[static_cast<std::size_t>(q)] *
                                 (theta[static_cast<std::size_t>(i)] -
                                  theta[static_cast<std::size_t>(j)]) / 2.0);
      kappa(i, j) = s;
    }

  std::vector<double> cos_half(static_cast<std::size_t>(ms));
  for (int j = 0; j < ms; ++j)
    cos_half[static_cast<std::size_t>(j)] = std::cos(theta[static_cast<std::size_t>(j)] / 2.0);

  // --- three-level leg: internal basis {1, 2, e}, dimension 3*ms ---
  Eigen::Matrix3cd h3 = Eigen::Matrix3cd::Zero();
  h3(0, 0) = -m.delta1;
  h3(1, 1) = m.delta2;
  Eigen::Matrix3cd v3 = Eigen::Matrix3cd::Zero();  // coupling without the cos factor
  v3(2, 0) = v3(2, 1) = m.omega / 2.0;
  v3(0, 2) = v3(1, 2) = m.omega / 2.0;

  // --- effective leg: internal basis {1, 2}, dimension 2*ms ---
  Eigen::Matrix2cd h2g = Eigen::Matrix2cd::Zero();
  h2g(0, 0) = -m.delta1;
  h2g(1, 1) = m.delta2;
  Eigen::Matrix2cd h2c;  // multiplies cos^2(theta/2)
  h2c << eff.h11, eff.h12, std::conj(eff.h12), eff.h22;
  // L_int = |m>(c1 <1| + c2 <2|) acts as psi -> (c1 psi1 + c2 psi2)|m>, i.e.
  // the row vector (c1, c2) without conjugation; L_int^dag L_int is then
  // conj(c)_a c_b independent of the target channel.
  Eigen::Vector2cd cvec;
  cvec << eff.c1, eff.c2;
  const Eigen::Matrix2cd cc = cvec.conjugate() * cvec.transpose();

  const double gscale = std::abs(m.delta1) + std::abs(m.delta2) + m.omega + m.gamma();
  const double dt = 0.1 / (dt_safety * gscale);
  const long nsteps = static_cast<long>(std::ceil(tau_p / dt));
  const double h = tau_p / static_cast<double>(nsteps);

  // RHS of the three-level equation, block (i,j) at a time.
  auto rhs3 = [&](const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) {
    for (int i = 0; i < ms; ++i) {
      const double ci = cos_half[static_cast<std::size_t>(i)];
      for (int j = 0; j < ms; ++j) {
        const double cj = cos_half[static_cast<std::size_t>(j)];
        const Eigen::Matrix3cd r = rho.block<3, 3>(3 * i, 3 * j);
        const Eigen::Matrix3cd hi = h3 + ci * v3;
        const Eigen::Matrix3cd hj = h3 + cj * v3;
        Eigen::Matrix3cd o = -iu * (hi * r - r * hj);
        // Dissipator: jump |m><e| with recoil kernel, plus the |e><e| sink.
        const cplx ree = r(2, 2);
        o(0, 0) += m.gamma1 * kappa(i, j) * ree;
        o(1, 1) += m.gamma2 * kappa(i, j) * ree;
        const double gh = m.gamma() / 2.0;
        o.row(2) -= gh * r.row(2);
        o.col(2) -= gh * r.col(2);
        out.block<3, 3>(3 * i, 3 * j) = o;
      }
    }
  };

  auto rhs2 = [&](const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& out) {
    for (int i = 0; i < ms; ++i) {
      const double ci = cos_half[static_cast<std::size_t>(i)];
      for (int j = 0; j < ms; ++j) {
        const double cj = cos_half[static_cast<std::size_t>(j)];
        const Eigen::Matrix2cd r = rho.block<2, 2>(2 * i, 2 * j);
        const Eigen::Matrix2cd hi = h2g + (ci * ci) * h2c;
        const Eigen::Matrix2cd hj = h2g + (cj * cj) * h2c;
        Eigen::Matrix2cd o = -iu * (hi * r - r * hj);
        for (int ch = 0; ch < 2; ++ch) {
          const double gm = (ch == 0) ? m.gamma1 : m.gamma2;
          if (gm == 0.0) continue;
          // jump: gm kappa_ij c_i c_j |ch> (v^T r conj(v)) <ch|
          const cplx inner = (cvec.transpose() * r * cvec.conjugate())(0, 0);
          o(ch, ch) += gm * kappa(i, j) * ci * cj * inner;
          // anticommutator: -(gm/2) (c_i^2 cc r + r cc c_j^2)
          o -= (gm / 2.0) * (ci * ci * (cc * r) + cj * cj * (r * cc));
        }
        out.block<2, 2>(2 * i, 2 * j) = o;
      }
    }
  };

  auto rk4 = [&](Eigen::MatrixXcd& rho, auto&& rhs, Eigen::MatrixXcd& k1,
                 Eigen::MatrixXcd& k2, Eigen::MatrixXcd& k3, Eigen::MatrixXcd& k4,
                 Eigen::MatrixXcd& tmp) {
    rhs(rho, k1);
    tmp = rho + (h / 2.0) * k1;
    rhs(tmp, k2);
    tmp = rho + (h / 2.0) * k2;
    rhs(tmp, k3);
    tmp = rho + h * k3;
    rhs(tmp, k4);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };

  // Initial state: (|1> - i|2>)/sqrt(2) at ladder site 0 (momentum 0).
  const int i0 = span;
  Eigen::VectorXcd psi3 = Eigen::VectorXcd::Zero(3 * ms);
  psi3(3 * i0 + 0) = 1.0 / std::sqrt(2.0);
  psi3(3 * i0 + 1) = cplx{0.0, -1.0} / std::sqrt(2.0);
  Eigen::MatrixXcd rho3 = psi3 * psi3.adjoint();
  Eigen::VectorXcd psi2 = Eigen::VectorXcd::Zero(2 * ms);
  psi2(2 * i0 + 0) = 1.0 / std::sqrt(2.0);
  psi2(2 * i0 + 1) = cplx{0.0, -1.0} / std::sqrt(2.0);
  Eigen::MatrixXcd rho2 = psi2 * psi2.adjoint();

  Eigen::MatrixXcd k1a(3 * ms, 3 * ms), k2a(3 * ms, 3 * ms), k3a(3 * ms, 3 * ms),
      k4a(3 * ms, 3 * ms), tmpa(3 * ms, 3 * ms);
  Eigen::MatrixXcd k1b(2 * ms, 2 * ms), k2b(2 * ms, 2 * ms), k3b(2 * ms, 2 * ms),
      k4b(2 * ms, 2 * ms), tmpb(2 * ms, 2 * ms);

  // Ground-block extraction of the three-level rho, in the {1,2} basis.
  auto ground_of = [&](const Eigen::MatrixXcd& rho) {
    Eigen::MatrixXcd g(2 * ms, 2 * ms);
    for (int i = 0; i < ms; ++i)
      for (int j = 0; j < ms; ++j)
        g.block<2, 2>(2 * i, 2 * j) = rho.block<3, 3>(3 * i, 3 * j).topLeftCorner<2, 2>();
    return g;
  };

  const long sample_every = std::max(1L, nsteps / 64);
  for (long s = 0; s < nsteps; ++s) {
    rk4(rho3, rhs3, k1a, k2a, k3a, k4a, tmpa);
    rk4(rho2, rhs2, k1b, k2b, k3b, k4b, tmpb);
    if ((s + 1) % sample_every == 0 || s + 1 == nsteps) {
      double pe = 0.0;
      for (int i = 0; i < ms; ++i) pe += rho3(3 * i + 2, 3 * i + 2).real();
      rep.max_excited_population = std::max(rep.max_excited_population, pe);
      const double td = detail::trace_distance(ground_of(rho3), rho2);
      rep.max_trace_distance = std::max(rep.max_trace_distance, td);
      if (s + 1 == nsteps) rep.final_trace_distance = td;
    }
  }

  rep.trace_drift = std::abs(rho3.trace().real() - 1.0);
  const double herm = (rho3 - rho3.adjoint().eval()).cwiseAbs().maxCoeff();
  if (herm > 1e-9 || rep.trace_drift > 1e-7)
    throw NumericalError("validate_reduction: integrator lost hermiticity or trace");
  return rep;
}

}
