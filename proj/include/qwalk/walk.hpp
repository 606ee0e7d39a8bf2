#pragma once

// Ideal (decay-free) walk dynamics: coin, kick, free evolution.
//
// One period of the walk is kick -> coin -> free evolution.  The kick
// operator exp(+i k1 cos theta) on level |1> and exp(-i k2 cos theta) on
// level |2> is applied spectrally: transform the ladder amplitudes to the
// conjugate angle, multiply the phase, transform back.  At the resonant
// period tau = 4 pi the free evolution is trivial for beta = 0 and reduces a
// broad beta ensemble to dephasing between ladder sites.

#include <complex>
#include <cstddef>
#include <map>
#include <vector>

#include "qwalk/constants.hpp"
#include "qwalk/errors.hpp"
#include "qwalk/fft.hpp"
#include "qwalk/state.hpp"

namespace qwalk {

struct CoinMatrix {
  cplx m00{1, 0}, m01{0, 0}, m10{0, 0}, m11{1, 0};

  bool is_unitary(double tol = 1e-12) const {
    // Columns orthonormal.
    const double c0 = std::norm(m00) + std::norm(m10);
    const double c1 = std::norm(m01) + std::norm(m11);
    const cplx x = std::conj(m00) * m01 + std::conj(m10) * m11;
    return std::abs(c0 - 1.0) < tol && std::abs(c1 - 1.0) < tol && std::abs(x) < tol;
  }
};

// Two-parameter unitary coin family; alpha is the mixing angle, chi the
// relative phase.  coin_matrix(pi/4, pi/2) is the balanced walk coin
// (1/sqrt2) [[1, i], [i, 1]].
inline CoinMatrix coin_matrix(double alpha, double chi) {
  CoinMatrix c;
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  c.m00 = {ca, 0.0};
  c.m01 = std::polar(sa, chi);
  c.m10 = -std::polar(sa, -chi);
  c.m11 = {ca, 0.0};
  return c;
}

inline CoinMatrix balanced_coin() {
  const double r = 1.0 / std::sqrt(2.0);
  CoinMatrix c;
  c.m00 = {r, 0.0};
  c.m01 = {0.0, r};
  c.m10 = {0.0, r};
  c.m11 = {r, 0.0};
  return c;
}

inline void apply_coin(WalkerState& s, const CoinMatrix& c) {
  if (!c.is_unitary())
    throw ConfigError("apply_coin: coin matrix is not unitary");
  for (int i = 0; i < s.size(); ++i) {
    const cplx v1 = s.a1[i], v2 = s.a2[i];
    s.a1[i] = c.m00 * v1 + c.m01 * v2;
    s.a2[i] = c.m10 * v1 + c.m11 * v2;
  }
}

// Conjugate-angle grid size for a given ladder truncation.  The factor-4
// headroom over the occupied sites keeps the cyclic spectral convolution
// from wrapping kicked amplitude back into the window of interest.
inline std::size_t kick_grid_size(int n_max) {
  std::size_t m = 1;
  while (m < static_cast<std::size_t>(4 * (n_max + 1))) m <<= 1;
  return m;
}

// Reusable FFT plan + angle tables for the spectral kick at one ladder
// geometry.  cos(theta_j) is tabulated; on the half-integer ladder the site
// index is conjugate to theta/2, so the physical angle is twice the grid
// angle.
class KickWorkspace {
public:
  KickWorkspace(int n_max, double spacing)
      : n_max_(n_max), m_(kick_grid_size(n_max)), plan_(m_), buf_(m_), cos_theta_(m_) {
    const double angle_scale = (spacing == 0.5) ? 2.0 : 1.0;
    for (std::size_t j = 0; j < m_; ++j)
      cos_theta_[j] = std::cos(angle_scale * two_pi * static_cast<double>(j) /
                               static_cast<double>(m_));
  }

  int n_max() const { return n_max_; }
  std::size_t grid_size() const { return m_; }

  // Multiplies level |1> by exp(+i phi1 cos theta) and level |2> by
  // exp(-i phi2 cos theta).
  void apply_phases(WalkerState& s, double phi1, double phi2) {
    if (s.n_max != n_max_)
      throw std::invalid_argument("KickWorkspace: ladder size mismatch");
    apply_channel(s.a1, +phi1);
    apply_channel(s.a2, -phi2);
    s.check_boundary();
  }

private:
  void apply_channel(std::vector<cplx>& a, double phi) {
    if (phi == 0.0) return;
    std::fill(buf_.begin(), buf_.end(), cplx{0.0, 0.0});
    for (int n = -n_max_; n <= n_max_; ++n)
      buf_[static_cast<std::size_t>(n + static_cast<int>(m_)) % m_] =
          a[static_cast<std::size_t>(n + n_max_)];
    plan_.inverse(buf_.data());  // ladder -> angle
    for (std::size_t j = 0; j < m_; ++j)
      buf_[j] *= std::polar(1.0, phi * cos_theta_[j]);
    plan_.forward(buf_.data());  // angle -> ladder
    const double inv_m = 1.0 / static_cast<double>(m_);
    for (int n = -n_max_; n <= n_max_; ++n)
      a[static_cast<std::size_t>(n + n_max_)] =
          buf_[static_cast<std::size_t>(n + static_cast<int>(m_)) % m_] * inv_m;
  }

  int n_max_;
  std::size_t m_;
  FftPlan plan_;
  std::vector<cplx> buf_;
  std::vector<double> cos_theta_;
};

namespace detail {
inline KickWorkspace& cached_workspace(int n_max, double spacing) {
  thread_local std::map<std::pair<int, double>, KickWorkspace> cache;
  auto it = cache.find({n_max, spacing});
  if (it == cache.end())
    it = cache.emplace(std::piecewise_construct,
                       std::forward_as_tuple(n_max, spacing),
                       std::forward_as_tuple(n_max, spacing)).first;
  return it->second;
}
}

inline void apply_kick_phases(WalkerState& s, double phi1, double phi2) {
  detail::cached_workspace(s.n_max, s.spacing).apply_phases(s, phi1, phi2);
}

inline void apply_ideal_kick(WalkerState& s, double k1, double k2) {
  apply_kick_phases(s, k1, k2);
}

// Free evolution over one period: phase exp(-i tau p^2 / 2) per site.
inline void apply_free_evolution(WalkerState& s, double tau) {
  for (int n = -s.n_max; n <= s.n_max; ++n) {
    const double p = s.momentum(n);
    const cplx ph = std::polar(1.0, -tau * p * p / 2.0);
    s.a1[s.index(n)] *= ph;
    s.a2[s.index(n)] *= ph;
  }
}

inline void walk_step_ideal(WalkerState& s, double k1, double k2,
                            const CoinMatrix& coin, double tau = resonant_tau) {
  apply_ideal_kick(s, k1, k2);
  apply_coin(s, coin);
  apply_free_evolution(s, tau);
}

// Default truncation for a T-step walk at kick strength k: ballistic spread
// k/2 per step per direction, doubled for safety, plus a fixed margin.
inline int default_n_max(int steps, double k) {
  const int n = static_cast<int>(std::ceil(4.0 + 2.0 * k * steps));
  return n < 4 ? 4 : n;
}

}
