#pragma once

// Walker state on a truncated momentum ladder.
//
// Momentum separates into a conserved quasimomentum beta and a ladder index:
// p = n * spacing + beta.  The resonant walk lives on the integer ladder
// (spacing 1); the exact-recoil collapse mode needs half-integer sites
// (spacing 1/2) so that the photon-recoil operator cos(theta/2) acts as a
// clean nearest-neighbour coupling.  Two internal levels carry one amplitude
// vector each.

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "qwalk/constants.hpp"
#include "qwalk/errors.hpp"

namespace qwalk {

struct WalkerState {
  double beta = 0.0;     // quasimomentum, in [0, spacing)
  double spacing = 1.0;  // ladder spacing: 1 or 1/2
  int n_max = 0;         // sites run over n = -n_max .. n_max
  std::vector<cplx> a1, a2;  // amplitudes per internal level, index n + n_max

  int size() const { return 2 * n_max + 1; }
  int index(int n) const { return n + n_max; }
  double momentum(int n) const { return n * spacing + beta; }

  double norm2() const {
    double s = 0.0;
    for (const cplx& v : a1) s += std::norm(v);
    for (const cplx& v : a2) s += std::norm(v);
    return s;
  }

  void scale(double f) {
    for (cplx& v : a1) v *= f;
    for (cplx& v : a2) v *= f;
  }

  void renormalize() {
    const double n2 = norm2();
    if (!(n2 > 0.0)) throw NumericalError("WalkerState: cannot renormalize zero state");
    scale(1.0 / std::sqrt(n2));
  }

  // Population sitting on the outermost site at each end of the ladder.
  double boundary_population() const {
    const int lo = 0, hi = size() - 1;
    return std::norm(a1[lo]) + std::norm(a2[lo]) + std::norm(a1[hi]) + std::norm(a2[hi]);
  }

  // The ladder is a truncation of an infinite one; once amplitude reaches the
  // edge the spectral kick would wrap it around, which is silent corruption.
  void check_boundary(double tol = 1e-8) const {
    const double b = boundary_population();
    if (!(b < tol))
      throw NumericalError("momentum ladder too small: boundary population " +
                           std::to_string(b) + " exceeds " + std::to_string(tol) +
                           " (n_max=" + std::to_string(n_max) + ")");
  }
};

inline WalkerState make_state(int n_max, double beta, double spacing = 1.0) {
  if (n_max < 1) throw ConfigError("WalkerState: n_max must be >= 1");
  if (!(spacing == 1.0 || spacing == 0.5))
    throw ConfigError("WalkerState: spacing must be 1 or 1/2");
  if (!(beta >= 0.0 && beta < spacing))
    throw ConfigError("WalkerState: beta must lie in [0, spacing)");
  WalkerState s;
  s.beta = beta;
  s.spacing = spacing;
  s.n_max = n_max;
  s.a1.assign(static_cast<std::size_t>(2 * n_max + 1), cplx{0.0, 0.0});
  s.a2.assign(static_cast<std::size_t>(2 * n_max + 1), cplx{0.0, 0.0});
  return s;
}

// Ratchet initial state: the spatial superposition
// (|p=beta> - i |p=1+beta>)/sqrt(2) on each internal level, the levels
// themselves combined as (|1> + |2>)/sqrt(2); all four amplitudes have
// magnitude 1/2.  beta is the physical quasimomentum in [0, 1); on the
// half-integer ladder it splits into a site offset and a residue below the
// spacing.
inline WalkerState ratchet_state(int n_max, double beta, double spacing = 1.0) {
  if (!(beta >= 0.0 && beta < 1.0))
    throw ConfigError("ratchet_state: beta must lie in [0, 1)");
  const int offset = static_cast<int>(std::floor(beta / spacing));
  WalkerState s = make_state(n_max, beta - offset * spacing, spacing);
  const int step = (spacing == 0.5) ? 2 : 1;  // one momentum unit in sites
  if (n_max < offset + step) throw ConfigError("ratchet_state: n_max too small");
  s.a1[s.index(offset)] = {0.5, 0.0};
  s.a1[s.index(offset + step)] = {0.0, -0.5};
  s.a2[s.index(offset)] = {0.5, 0.0};
  s.a2[s.index(offset + step)] = {0.0, -0.5};
  return s;
}

// Momentum-space probabilities of one observation step.
struct MomentumDistribution {
  int step = 0;
  int n_max = 0;
  double spacing = 1.0;
  std::vector<double> p1, p2, total;  // index n + n_max

  int size() const { return 2 * n_max + 1; }
  int index(int n) const { return n + n_max; }

  double mass() const {
    double s = 0.0;
    for (double v : total) s += v;
    return s;
  }

  double mean() const {
    double s = 0.0;
    for (int n = -n_max; n <= n_max; ++n) s += (n * spacing) * total[index(n)];
    return s;
  }

  double variance() const {
    const double m = mean();
    double s = 0.0;
    for (int n = -n_max; n <= n_max; ++n) {
      const double x = n * spacing - m;
      s += x * x * total[index(n)];
    }
    return s;
  }
};

inline MomentumDistribution momentum_distribution(const WalkerState& s, int step) {
  MomentumDistribution d;
  d.step = step;
  d.n_max = s.n_max;
  d.spacing = s.spacing;
  d.p1.resize(s.size());
  d.p2.resize(s.size());
  d.total.resize(s.size());
  for (int i = 0; i < s.size(); ++i) {
    d.p1[i] = std::norm(s.a1[i]);
    d.p2[i] = std::norm(s.a2[i]);
    d.total[i] = d.p1[i] + d.p2[i];
  }
  return d;
}

// L1 distance between two distributions, aligning ladder indices; sites
// present in only one grid count with their full weight.
inline double l1_distance(const MomentumDistribution& a, const MomentumDistribution& b) {
  if (a.spacing != b.spacing)
    throw std::invalid_argument("l1_distance: incompatible ladder spacings");
  const int lo = -std::max(a.n_max, b.n_max), hi = std::max(a.n_max, b.n_max);
  double s = 0.0;
  for (int n = lo; n <= hi; ++n) {
    const double pa = (std::abs(n) <= a.n_max) ? a.total[a.index(n)] : 0.0;
    const double pb = (std::abs(n) <= b.n_max) ? b.total[b.index(n)] : 0.0;
    s += std::abs(pa - pb);
  }
  return s;
}

}
