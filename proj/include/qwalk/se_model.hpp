#pragma once

// Spontaneous-emission events and the collapse they inflict on the walker.
//
// During each kick pulse the excited state is weakly populated and scatters
// photons at the total rate gamma = gamma1 + gamma2.  A scattering event
// projects the internal state onto one ground level (branching ratio
// gamma1:gamma2) and transfers a photon recoil: the longitudinal projection
// u of the emitted photon's direction is distributed as the dipole pattern
//
//     Xi(u) = (3/8)(1 + u^2),   u in [-1, 1],
//
// and the walker momentum drops by u * recoil (half a two-photon recoil for
// counter-propagating beams).  In ladder + quasimomentum coordinates the
// integer part of the drop shifts ladder sites and the fractional part
// reshuffles beta.
//
// The emission also carries a factor cos(theta/2) from the standing-wave
// mode profile.  Two treatments are supported: replace it by its ensemble
// RMS value 1/sqrt(2) (the cheap default, exact for the averaged jump rate),
// or apply the operator itself, which requires the half-integer ladder where
// cos(theta/2) is a clean nearest-neighbour average.

#include <cmath>
#include <complex>
#include <vector>

#include "qwalk/constants.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/physics_params.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/state.hpp"

namespace qwalk {

inline constexpr double kMeanCosFactor = 0.70710678118654752440;  // rms of cos(theta/2)

struct SeChannelWeights {
  double gamma1 = 0.0, gamma2 = 0.0;  // branching rates (1/s)
  cplx c1{1.0, 0.0}, c2{-1.0, 0.0};   // internal overlap amplitudes of |1>, |2>
  double recoil = 0.5;                // photon recoil along the axis (ladder momentum units)

  double total_rate() const { return gamma1 + gamma2; }

  // The overlap amplitudes come from adiabatic elimination of the excited
  // state: c1 = omega / (2 (delta1 - i gamma/2)), c2 with the opposite-sign
  // detuning.  Only their renormalized shape matters for collapses.
  static SeChannelWeights from_params(const PhysicsParams& p, const DerivedParams& d) {
    SeChannelWeights w;
    w.gamma1 = d.gamma1;
    w.gamma2 = d.gamma2;
    w.c1 = p.omega / (2.0 * cplx{p.delta1, -d.gamma / 2.0});
    w.c2 = p.omega / (2.0 * cplx{-p.delta2, -d.gamma / 2.0});
    return w;
  }
};

struct SeEvent {
  double t = 0.0;   // emission time within the pulse, [0, tau_p)
  int channel = 1;  // ground level the atom lands on (1 or 2)
  double u = 0.0;   // direction cosine of the emitted photon
};

// Poisson emission times within one pulse at fixed rate gamma, capped at
// three events per kick (the probability of more is negligible for any
// p_se where the walk survives at all).
inline std::vector<double> draw_se_times(Rng& rng, double gamma, double tau_p) {
  std::vector<double> times;
  if (!(gamma > 0.0)) return times;
  double t = 0.0;
  while (times.size() < 3) {
    t += rng.exponential(gamma);
    if (t >= tau_p) break;
    times.push_back(t);
  }
  return times;
}

inline double recoil_pdf(double u) { return 0.375 * (1.0 + u * u); }
inline double recoil_cdf(double u) { return (u * u * u + 3.0 * u + 4.0) / 8.0; }

// Inverse-CDF sampling of Xi(u): Newton from the linearized start u = 2r - 1.
// The CDF derivative is bounded below by 3/8, so the iteration is globally
// well behaved; four or five steps reach the 1e-12 tolerance.
inline double sample_recoil_u(Rng& rng) {
  const double r = rng.uniform();
  double u = 2.0 * r - 1.0;
  for (int it = 0; it < 60; ++it) {
    const double f = recoil_cdf(u) - r;
    if (std::abs(f) <= 1e-12) break;
    u -= f / recoil_pdf(u);
  }
  return u < -1.0 ? -1.0 : (u > 1.0 ? 1.0 : u);
}

inline int select_channel(Rng& rng, const SeChannelWeights& w) {
  const double total = w.total_rate();
  if (!(total > 0.0))
    throw std::invalid_argument("select_channel: total rate must be positive");
  return rng.uniform() * total < w.gamma1 ? 1 : 2;
}

enum class CollapseMode { MeanCos, ExactCos };

namespace detail {

// Shifts every ladder site by `carry` places, dropping what falls off the
// ends.  Returns the dropped population so the caller can flag leakage.
inline double shift_sites(std::vector<cplx>& a, int carry) {
  if (carry == 0) return 0.0;
  const int n = static_cast<int>(a.size());
  std::vector<cplx> out(a.size(), cplx{0.0, 0.0});
  double dropped = 0.0;
  for (int i = 0; i < n; ++i) {
    const int j = i + carry;
    if (j >= 0 && j < n)
      out[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(i)];
    else
      dropped += std::norm(a[static_cast<std::size_t>(i)]);
  }
  a.swap(out);
  return dropped;
}

// Nearest-neighbour average (a[i-1] + a[i+1]) / 2, the site representation of
// multiplying by cos(theta/2) on the half-integer ladder.
inline void half_cos_filter(std::vector<cplx>& a) {
  const int n = static_cast<int>(a.size());
  std::vector<cplx> out(a.size());
  for (int i = 0; i < n; ++i) {
    const cplx lo = (i > 0) ? a[static_cast<std::size_t>(i - 1)] : cplx{0.0, 0.0};
    const cplx hi = (i + 1 < n) ? a[static_cast<std::size_t>(i + 1)] : cplx{0.0, 0.0};
    out[static_cast<std::size_t>(i)] = 0.5 * (lo + hi);
  }
  a.swap(out);
}

}

// Applies one emission event to the walker: internal projection onto the
// event's channel, the mode-profile cosine (scalar or exact), and the recoil
// shift of the total momentum by -u * recoil.  The state is renormalized;
// the returned value is the squared norm just before renormalization, i.e.
// the relative weight of this outcome.
inline double apply_collapse(WalkerState& s, const SeEvent& ev,
                             const SeChannelWeights& w, CollapseMode mode) {
  if (ev.channel != 1 && ev.channel != 2)
    throw ConfigError("apply_collapse: channel must be 1 or 2");
  if (mode == CollapseMode::ExactCos && s.spacing != 0.5)
    throw ConfigError(
        "apply_collapse: exact cos(theta/2) needs the half-integer ladder "
        "(spacing 1/2); rebuild the state accordingly");

  // Internal projection: both levels feed the overlap c1 a1 + c2 a2, which
  // lands entirely on the event's channel.
  std::vector<cplx> amp(static_cast<std::size_t>(s.size()));
  for (int i = 0; i < s.size(); ++i)
    amp[static_cast<std::size_t>(i)] = w.c1 * s.a1[i] + w.c2 * s.a2[i];

  if (mode == CollapseMode::MeanCos) {
    for (cplx& v : amp) v *= kMeanCosFactor;
  } else {
    detail::half_cos_filter(amp);
  }

  // Recoil: p -> p - u * recoil.  Split into a ladder shift and a new beta.
  const double beta_raw = s.beta - ev.u * w.recoil;
  const double carry_f = std::floor(beta_raw / s.spacing);
  const int carry = static_cast<int>(carry_f);
  s.beta = beta_raw - carry_f * s.spacing;
  if (s.beta >= s.spacing) {  // guard the corner case of rounding up
    s.beta -= s.spacing;
  }
  const double dropped = detail::shift_sites(amp, carry);

  const std::size_t sz = amp.size();
  if (ev.channel == 1) {
    s.a1.assign(amp.begin(), amp.end());
    s.a2.assign(sz, cplx{0.0, 0.0});
  } else {
    s.a2.assign(amp.begin(), amp.end());
    s.a1.assign(sz, cplx{0.0, 0.0});
  }

  const double weight = s.norm2();
  if (!(weight > 0.0))
    throw NumericalError("apply_collapse: event annihilated the state");
  if (dropped / weight > 1e-8)
    throw NumericalError("apply_collapse: recoil shift pushed population off the ladder");
  s.renormalize();
  s.check_boundary();
  return weight;
}

}
