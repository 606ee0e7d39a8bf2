#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <vector>

#include "qwalk/analysis.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/state.hpp"
#include "qwalk/walk.hpp"

using qwalk::apply_coin;
using qwalk::apply_free_evolution;
using qwalk::apply_ideal_kick;
using qwalk::balanced_coin;
using qwalk::coin_matrix;
using qwalk::CoinMatrix;
using qwalk::cplx;
using qwalk::MomentumDistribution;
using qwalk::momentum_distribution;
using qwalk::ratchet_state;
using qwalk::WalkerState;

namespace {

double mean_p(const WalkerState& s) { return momentum_distribution(s, 0).mean(); }

WalkerState ideal_walk(int steps, double k, int n_max = 0, double beta = 0.0) {
  WalkerState s = ratchet_state(n_max > 0 ? n_max : qwalk::default_n_max(steps, k), beta);
  const CoinMatrix c = balanced_coin();
  for (int t = 0; t < steps; ++t) qwalk::walk_step_ideal(s, k, k, c);
  return s;
}

}  // namespace

TEST_CASE("ratchet state has the prescribed amplitudes") {
  const WalkerState s = ratchet_state(4, 0.0);
  CHECK(std::abs(s.a1[s.index(0)] - cplx{0.5, 0.0}) < 1e-15);
  CHECK(std::abs(s.a1[s.index(1)] - cplx{0.0, -0.5}) < 1e-15);
  CHECK(std::abs(s.a2[s.index(0)] - cplx{0.5, 0.0}) < 1e-15);
  CHECK(std::abs(s.a2[s.index(1)] - cplx{0.0, -0.5}) < 1e-15);
  CHECK(std::abs(s.norm2() - 1.0) < 1e-15);
  // relative phase -pi/2 between the two seed momenta
  const cplx ratio = s.a1[s.index(1)] / s.a1[s.index(0)];
  CHECK(std::abs(std::arg(ratio) + qwalk::pi / 2.0) < 1e-15);
}

TEST_CASE("ratchet state on the half-integer ladder uses sites 0 and 2") {
  const WalkerState s = ratchet_state(6, 0.0, 0.5);
  CHECK(std::abs(s.a1[s.index(0)] - cplx{0.5, 0.0}) < 1e-15);
  CHECK(std::abs(s.a1[s.index(2)] - cplx{0.0, -0.5}) < 1e-15);
  CHECK(std::abs(s.a1[s.index(1)]) == 0.0);
  // beta >= spacing shifts the seeds one half-site up
  const WalkerState t = ratchet_state(6, 0.75, 0.5);
  CHECK(std::abs(t.beta - 0.25) < 1e-15);
  CHECK(std::abs(t.a1[t.index(1)] - cplx{0.5, 0.0}) < 1e-15);
  CHECK(std::abs(t.a1[t.index(3)] - cplx{0.0, -0.5}) < 1e-15);
}

TEST_CASE("the balanced coin is the alpha=pi/4, chi=pi/2 member of the family") {
  const CoinMatrix c = coin_matrix(qwalk::pi / 4.0, qwalk::pi / 2.0);
  const CoinMatrix b = balanced_coin();
  CHECK(std::abs(c.m00 - b.m00) < 1e-15);
  CHECK(std::abs(c.m01 - b.m01) < 1e-15);
  CHECK(std::abs(c.m10 - b.m10) < 1e-15);
  CHECK(std::abs(c.m11 - b.m11) < 1e-15);

  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(b.m00 - cplx{r, 0.0}) < 1e-15);
  CHECK(std::abs(b.m01 - cplx{0.0, r}) < 1e-15);
  CHECK(std::abs(b.m10 - cplx{0.0, r}) < 1e-15);
  CHECK(std::abs(b.m11 - cplx{r, 0.0}) < 1e-15);
}

TEST_CASE("coin family is unitary everywhere; squared it swaps the levels") {
  qwalk::Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    const CoinMatrix c =
        coin_matrix(rng.uniform() * qwalk::two_pi, rng.uniform() * qwalk::two_pi);
    CHECK(c.is_unitary());
  }

  // (balanced coin)^2 = i * swap
  WalkerState s = qwalk::make_state(2, 0.0);
  s.a1[s.index(0)] = 1.0;
  apply_coin(s, balanced_coin());
  apply_coin(s, balanced_coin());
  CHECK(std::abs(s.a1[s.index(0)]) < 1e-15);
  CHECK(std::abs(s.a2[s.index(0)] - cplx{0.0, 1.0}) < 1e-15);

  CoinMatrix bad;
  bad.m00 = {0.9, 0.0};
  CHECK_FALSE(bad.is_unitary());
  CHECK_THROWS_AS(apply_coin(s, bad), qwalk::ConfigError);
}

TEST_CASE("kick amplitudes are bessel functions of the kick strength") {
  const double k = 1.45;
  WalkerState s = qwalk::make_state(16, 0.0);
  s.a1[s.index(0)] = 1.0;
  apply_ideal_kick(s, k, 0.0);

  // Independent reference: c_n = (1/2pi) Int e^{i k cos t} e^{-i n t} dt by
  // trapezoid quadrature (spectrally accurate for periodic integrands).
  const int nq = 512;
  for (int n = -8; n <= 8; ++n) {
    cplx ref{0.0, 0.0};
    for (int j = 0; j < nq; ++j) {
      const double t = qwalk::two_pi * j / nq;
      ref += std::polar(1.0, k * std::cos(t) - n * t);
    }
    ref /= static_cast<double>(nq);
    CHECK(std::abs(s.a1[s.index(n)] - ref) < 1e-12);
    // and against the standard-library bessel oracle
    CHECK(std::abs(std::abs(s.a1[s.index(n)]) - std::cyl_bessel_j(std::abs(n), k)) <
          1e-12);
  }
}

TEST_CASE("opposite kick phases mirror the momentum kernel") {
  const double k = 0.9;
  WalkerState s1 = qwalk::make_state(12, 0.0);
  s1.a1[s1.index(0)] = 1.0;
  apply_ideal_kick(s1, k, 0.0);
  WalkerState s2 = qwalk::make_state(12, 0.0);
  s2.a2[s2.index(0)] = 1.0;
  apply_ideal_kick(s2, 0.0, k);
  for (int n = -12; n <= 12; ++n)
    CHECK(std::abs(std::norm(s1.a1[s1.index(n)]) - std::norm(s2.a2[s2.index(-n)])) <
          1e-13);
}

TEST_CASE("kick by k then -k is the identity") {
  WalkerState s = ratchet_state(12, 0.0);
  const WalkerState orig = s;
  qwalk::apply_kick_phases(s, 1.3, 0.7);
  qwalk::apply_kick_phases(s, -1.3, -0.7);
  for (int i = 0; i < s.size(); ++i) {
    CHECK(std::abs(s.a1[i] - orig.a1[i]) < 1e-11);
    CHECK(std::abs(s.a2[i] - orig.a2[i]) < 1e-11);
  }
}

TEST_CASE("each internal level is kicked in its own direction") {
  const double k = 1.45;
  WalkerState s1 = ratchet_state(10, 0.0);
  // keep only level |1| of the ratchet, renormalized
  for (cplx& v : s1.a2) v = 0.0;
  s1.renormalize();
  const double before = mean_p(s1);
  apply_ideal_kick(s1, k, k);
  CHECK(mean_p(s1) - before == Catch::Approx(-k / 2.0).epsilon(1e-10));

  WalkerState s2 = ratchet_state(10, 0.0);
  for (cplx& v : s2.a1) v = 0.0;
  s2.renormalize();
  apply_ideal_kick(s2, k, k);
  CHECK(mean_p(s2) - before == Catch::Approx(+k / 2.0).epsilon(1e-10));
}

TEST_CASE("free evolution at resonance is the identity for beta = 0") {
  WalkerState s = ideal_walk(3, 1.45);
  const WalkerState orig = s;
  apply_free_evolution(s, qwalk::resonant_tau);
  for (int i = 0; i < s.size(); ++i) {
    CHECK(std::abs(s.a1[i] - orig.a1[i]) < 1e-10);
    CHECK(std::abs(s.a2[i] - orig.a2[i]) < 1e-10);
  }
}

TEST_CASE("free evolution at beta = 1/2 is a pure global phase") {
  WalkerState s = ideal_walk(2, 1.2, 0, 0.5);
  WalkerState evolved = s;
  apply_free_evolution(evolved, qwalk::resonant_tau);
  // exp(-i 2 pi (n + 1/2)^2) = exp(-i pi/2) for every integer n
  const cplx phase{0.0, -1.0};
  for (int i = 0; i < s.size(); ++i) {
    CHECK(std::abs(evolved.a1[i] - phase * s.a1[i]) < 1e-10);
    CHECK(std::abs(evolved.a2[i] - phase * s.a2[i]) < 1e-10);
  }
}

TEST_CASE("an off-resonant beta changes the walk") {
  const auto d0 = momentum_distribution(ideal_walk(4, 1.45, 20, 0.0), 4);
  const auto d1 = momentum_distribution(ideal_walk(4, 1.45, 20, 0.1), 4);
  CHECK(qwalk::l1_distance(d0, d1) > 0.05);
}

TEST_CASE("before any kick the walker sits on its two seed momenta") {
  const WalkerState s = ratchet_state(4, 0.0);
  const MomentumDistribution d = momentum_distribution(s, 0);
  CHECK(d.total[d.index(0)] == Catch::Approx(0.5).epsilon(1e-15));
  CHECK(d.total[d.index(1)] == Catch::Approx(0.5).epsilon(1e-15));
  CHECK(d.mass() == Catch::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("the resonant walk is ballistic and bimodal") {
  const int steps = 15;
  const double k = 1.45;
  const MomentumDistribution d = momentum_distribution(ideal_walk(steps, k), steps);
  const qwalk::WalkMetrics m = qwalk::metrics(d, k);
  CHECK(m.mass == Catch::Approx(1.0).margin(1e-10));
  // lobes well outside the centre, roughly at +-T k/2
  CHECK(m.peak_left < -3.0);
  CHECK(m.peak_right > 3.0);
  CHECK(m.contrast > 1.0);

  // variance grows quadratically: fit the log-log slope over T = 10..30
  std::vector<double> lt, lv;
  for (int t = 10; t <= 30; t += 4) {
    const MomentumDistribution dt = momentum_distribution(ideal_walk(t, k), t);
    lt.push_back(std::log(static_cast<double>(t)));
    lv.push_back(std::log(dt.variance()));
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lt.size(); ++i) {
    sx += lt[i];
    sy += lv[i];
    sxx += lt[i] * lt[i];
    sxy += lt[i] * lv[i];
  }
  const double n = static_cast<double>(lt.size());
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  CHECK(slope == Catch::Approx(2.0).margin(0.1));
}

TEST_CASE("the walk distribution is symmetric about p = 1/2") {
  const int steps = 25;
  const MomentumDistribution d = momentum_distribution(ideal_walk(steps, 1.45), steps);
  for (int n = -d.n_max; n <= d.n_max; ++n) {
    const int mirror = 1 - n;
    if (mirror < -d.n_max || mirror > d.n_max) continue;
    CHECK(std::abs(d.total[d.index(n)] - d.total[d.index(mirror)]) < 1e-10);
  }
}

TEST_CASE("fifty steps conserve the norm and stay off the boundary") {
  const WalkerState s = ideal_walk(50, 1.45);
  CHECK(std::abs(s.norm2() - 1.0) < 1e-10);
  CHECK(s.boundary_population() < 1e-8);
}

TEST_CASE("the result does not depend on the ladder truncation") {
  const int steps = 10;
  const double k = 1.45;
  const auto d0 = momentum_distribution(ideal_walk(steps, k), steps);
  const auto d1 = momentum_distribution(ideal_walk(steps, k, qwalk::default_n_max(steps, k) + 16), steps);
  CHECK(qwalk::l1_distance(d0, d1) < 1e-10);
}

TEST_CASE("kick grid sizes are powers of two with headroom") {
  for (int n : {1, 3, 7, 15, 31, 100}) {
    const std::size_t m = qwalk::kick_grid_size(n);
    CHECK((m & (m - 1)) == 0);
    CHECK(m >= static_cast<std::size_t>(4 * (n + 1)));
  }
}

TEST_CASE("a kick too large for the ladder is caught") {
  WalkerState s = ratchet_state(4, 0.0);
  CHECK_THROWS_AS(apply_ideal_kick(s, 6.0, 6.0), qwalk::NumericalError);
}
