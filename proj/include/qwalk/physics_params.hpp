#pragma once

// Laser/atom parameter handling for the kicked two-level walk.
//
// The experiment drives two internal ground levels |1>, |2> with a common
// far-detuned beam (Rabi frequency omega, detunings delta1 below and delta2
// above the excited-state resonance).  During a pulse of length tau_p each
// level accumulates a kick strength
//
//     k_m = omega^2 tau_p / (8 delta_m)
//
// and scatters spontaneously at rate
//
//     gamma_m = k_m / (tau_p tau_se delta_m),
//
// where tau_se is the excited-state lifetime.  The survival of the walk is
// governed by the dimensionless probability p_se = (gamma1+gamma2) tau_p of
// scattering at least one photon per kick.  Finite gamma also weakens the
// optical potential by the light-shift factors xi_m.
//
// Everything downstream works with the dimensionless derived quantities; this
// header is the single place where laboratory units enter.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qwalk/constants.hpp"
#include "qwalk/errors.hpp"

namespace qwalk {

struct PhysicsParams {
  double omega = 0.0;    // Rabi frequency (rad/s)
  double delta1 = 0.0;   // detuning of level |1>, red side (rad/s)
  double delta2 = 0.0;   // detuning of level |2>, blue side (rad/s)
  double tau_p = 380e-9; // kick pulse duration (s)
  double tau_se = 26e-9; // excited-state lifetime (s); +inf switches decay off
  double tau = resonant_tau; // free evolution phase per period (dimensionless)
  // Physical kicking period (s).  Only used for the detuning part of the
  // dynamical phase; 0 means "not specified" and drops that term.
  double period_phys = 0.0;
};

struct DerivedParams {
  double k1 = 0.0, k2 = 0.0;         // kick strengths (dimensionless)
  double gamma1 = 0.0, gamma2 = 0.0; // per-level scattering rates (1/s)
  double gamma = 0.0;                // total scattering rate (1/s)
  double p_se = 0.0;                 // scattering probability per kick
  double xi1 = 1.0, xi2 = 1.0;       // light-shift correction factors
  double phi_dyn = 0.0;              // accumulated dynamical phase per kick (rad)
};

// Computes the derived quantities.  Throws ConfigError for unusable inputs
// (zero detuning, non-positive durations, p_se outside [0,1)).  If `warnings`
// is given, regime concerns are appended as human-readable strings.
inline DerivedParams derive(const PhysicsParams& p,
                            std::vector<std::string>* warnings = nullptr) {
  if (!(p.tau_p > 0.0)) throw ConfigError("physics: tau_p must be positive");
  if (!(p.tau_se > 0.0)) throw ConfigError("physics: tau_se must be positive");
  if (p.delta1 == 0.0 || p.delta2 == 0.0)
    throw ConfigError("physics: detunings must be nonzero");
  if (p.omega < 0.0) throw ConfigError("physics: omega must be non-negative");

  DerivedParams d;
  d.k1 = p.omega * p.omega * p.tau_p / (8.0 * p.delta1);
  d.k2 = p.omega * p.omega * p.tau_p / (8.0 * p.delta2);
  d.gamma1 = d.k1 / (p.tau_p * p.tau_se * p.delta1);
  d.gamma2 = d.k2 / (p.tau_p * p.tau_se * p.delta2);
  d.gamma = d.gamma1 + d.gamma2;
  d.p_se = d.gamma * p.tau_p;
  if (!(d.p_se >= 0.0 && d.p_se < 1.0))
    throw ConfigError("physics: derived p_se=" + std::to_string(d.p_se) +
                      " outside [0,1); the per-kick scattering model needs p_se < 1");

  d.xi1 = 1.0 / (1.0 + d.gamma * d.gamma / (4.0 * p.delta1 * p.delta1));
  d.xi2 = 1.0 / (1.0 + d.gamma * d.gamma / (4.0 * p.delta2 * p.delta2));
  d.phi_dyn = d.xi1 * d.k1 + d.xi2 * d.k2 + (p.delta1 + p.delta2) * p.period_phys;

  if (warnings && std::isfinite(p.tau_se) && p.tau_se > p.tau_p / 10.0)
    warnings->push_back("tau_se=" + std::to_string(p.tau_se) +
                        " s is not small compared with tau_p=" + std::to_string(p.tau_p) +
                        " s; the per-kick scattering picture assumes fast internal decay");
  return d;
}

// Nominal far-detuned scale used when spontaneous emission is switched off
// and the detunings are otherwise unconstrained.  With gamma = 0 no
// observable depends on this choice (xi_m = 1 and no collapses occur).
inline constexpr double kNoSeDetuningScale = 2.0e9;  // rad/s

// Builds laboratory parameters that realize dimensionless targets:
//   k      -- kick strength; for asymmetric rate ratios the two per-level
//             strengths differ and k is their geometric mean sqrt(k1*k2)
//   p_se   -- scattering probability per kick, in [0, 1)
//   ratio1:ratio2 -- the split gamma1:gamma2 of the scattering rate
// The pair (delta1, delta2) and omega follow in closed form.  p_se = 0 is
// represented exactly by tau_se = +inf.
inline PhysicsParams invert_for_targets(double k, double p_se, double ratio1,
                                        double ratio2, double tau_p,
                                        double tau_se) {
  if (!(k > 0.0)) throw ConfigError("targets: k must be positive");
  if (!(p_se >= 0.0 && p_se < 1.0)) throw ConfigError("targets: p_se must be in [0,1)");
  if (!(ratio1 > 0.0 && ratio2 > 0.0))
    throw ConfigError("targets: rate ratio parts must be positive");
  if (!(tau_p > 0.0)) throw ConfigError("targets: tau_p must be positive");
  if (!(tau_se > 0.0)) throw ConfigError("targets: tau_se must be positive");

  // gamma1/gamma2 = (delta2/delta1)^2, so the ratio fixes the detuning ratio
  // s and the geometric-mean condition fixes the absolute scale.
  const double s = std::sqrt(ratio1 / ratio2);  // delta2 = s * delta1
  PhysicsParams p;
  p.tau_p = tau_p;
  if (p_se == 0.0) {
    p.tau_se = std::numeric_limits<double>::infinity();
    p.delta1 = kNoSeDetuningScale * std::sqrt(s) * (1.0 + 1.0 / (s * s)) / 2.0;
  } else {
    p.tau_se = tau_se;
    p.delta1 = k * std::sqrt(s) * (1.0 + 1.0 / (s * s)) / (p_se * tau_se);
  }
  p.delta2 = s * p.delta1;
  // omega^2 tau_p / 8 = k * delta1 * sqrt(s) reproduces sqrt(k1 k2) = k.
  p.omega = std::sqrt(8.0 * k * p.delta1 * std::sqrt(s) / tau_p);
  return p;
}

}
