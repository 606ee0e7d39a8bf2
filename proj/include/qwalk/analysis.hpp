#pragma once

// Distribution diagnostics: moments, the bimodality contrast that separates
// a quantum walk from a diffusive one, distance to the matched Gaussian, and
// the classical (incoherent) walk reference built from repeated convolution
// of the single-kick kernel.

#include <cmath>
#include <limits>
#include <vector>

#include "qwalk/constants.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/state.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

struct WalkMetrics {
  double mass = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double peak_left = 0.0, peak_right = 0.0;     // momentum of the lobe maxima
  double peak_left_p = 0.0, peak_right_p = 0.0; // their probabilities
  double contrast = 0.0;       // outer-lobe mass / central mass
  double l1_gaussian = 0.0;    // L1 distance to the moment-matched Gaussian
  double window = 0.0;         // |p - center| >= window counts as outer
};

namespace detail {

inline double gaussian_cdf(double x, double mu, double sigma) {
  return 0.5 * (1.0 + std::erf((x - mu) / (sigma * std::sqrt(2.0))));
}

}

// L1 distance between a discrete distribution and the Gaussian with the same
// mean and variance, binned on the same grid.  Gaussian mass beyond the grid
// counts in full, so a distribution on a too-small grid cannot score well by
// truncation.
inline double l1_to_gaussian(const MomentumDistribution& d) {
  const double mu = d.mean();
  const double sigma = std::sqrt(std::max(d.variance(), 0.0));
  const double h = d.spacing;
  double l1 = 0.0, gauss_mass = 0.0;
  for (int n = -d.n_max; n <= d.n_max; ++n) {
    const double x = n * d.spacing;
    double q;
    if (sigma > 0.0) {
      q = detail::gaussian_cdf(x + h / 2.0, mu, sigma) -
          detail::gaussian_cdf(x - h / 2.0, mu, sigma);
    } else {
      q = (std::abs(x - mu) <= h / 2.0) ? 1.0 : 0.0;
    }
    gauss_mass += q;
    l1 += std::abs(d.total[d.index(n)] - q);
  }
  return l1 + (1.0 - gauss_mass);
}

// The walk's bimodal signature.  `center` is 1/2 for the ratchet (its two
// seed momenta straddle it); the window grows with the ballistic scale T*k.
inline WalkMetrics metrics(const MomentumDistribution& d, double k,
                           double center = 0.5) {
  WalkMetrics m;
  m.mass = d.mass();
  m.mean = d.mean();
  m.variance = d.variance();
  m.window = std::max(2.0, d.step * k / 4.0);
  m.l1_gaussian = l1_to_gaussian(d);

  double outer = 0.0, central = 0.0;
  for (int n = -d.n_max; n <= d.n_max; ++n) {
    const double p = n * d.spacing;
    const double w = d.total[d.index(n)];
    if (std::abs(p - center) >= m.window)
      outer += w;
    else
      central += w;
    if (p < center) {
      if (w > m.peak_left_p) {
        m.peak_left_p = w;
        m.peak_left = p;
      }
    } else {
      if (w > m.peak_right_p) {
        m.peak_right_p = w;
        m.peak_right = p;
      }
    }
  }
  m.contrast = (central > 0.0) ? outer / central
                               : std::numeric_limits<double>::infinity();
  return m;
}

// Momentum kernel of a single kick acting on the ratchet state: the
// incoherent building block of the classical walk.  Both internal levels
// contribute, so the kernel is already the 50:50 mix of +k and -k kicks.
inline MomentumDistribution single_kick_kernel(double k, int n_max = 0) {
  const int span = (n_max > 0) ? n_max : default_n_max(1, k) + 8;
  WalkerState s = ratchet_state(span, 0.0);
  apply_ideal_kick(s, k, k);
  return momentum_distribution(s, 1);
}

// Classical reference: T-fold convolution of the single-kick kernel,
// starting from a point mass at zero.  T = 1 returns the kernel itself.
inline MomentumDistribution classical_walk_reference(int steps,
                                                     const MomentumDistribution& kernel) {
  if (steps < 1) throw ConfigError("classical_walk_reference: steps must be >= 1");
  const int span = kernel.n_max * steps;
  MomentumDistribution cur;
  cur.step = 0;
  cur.n_max = span;
  cur.spacing = kernel.spacing;
  cur.p1.assign(static_cast<std::size_t>(2 * span + 1), 0.0);
  cur.p2 = cur.p1;
  cur.total = cur.p1;
  cur.total[cur.index(0)] = 1.0;

  for (int t = 1; t <= steps; ++t) {
    std::vector<double> next(cur.total.size(), 0.0);
    for (int n = -span; n <= span; ++n) {
      const double w = cur.total[cur.index(n)];
      if (w == 0.0) continue;
      for (int o = -kernel.n_max; o <= kernel.n_max; ++o) {
        const int tgt = n + o;
        if (tgt < -span || tgt > span) continue;
        next[static_cast<std::size_t>(cur.index(tgt))] += w * kernel.total[kernel.index(o)];
      }
    }
    cur.total.swap(next);
    cur.step = t;
  }
  for (std::size_t i = 0; i < cur.total.size(); ++i) {
    cur.p1[i] = cur.total[i] / 2.0;
    cur.p2[i] = cur.total[i] / 2.0;
  }
  return cur;
}

}
