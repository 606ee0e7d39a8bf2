#include <catch_amalgamated.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "qwalk/physics_params.hpp"
#include "qwalk/rng.hpp"
#include "qwalk/se_model.hpp"
#include "qwalk/state.hpp"

using qwalk::apply_collapse;
using qwalk::CollapseMode;
using qwalk::cplx;
using qwalk::draw_se_times;
using qwalk::recoil_cdf;
using qwalk::recoil_pdf;
using qwalk::Rng;
using qwalk::sample_recoil_u;
using qwalk::SeChannelWeights;
using qwalk::SeEvent;
using qwalk::WalkerState;

TEST_CASE("zero rate means no emission times and no consumed randomness") {
  Rng rng(7);
  Rng ref(7);
  CHECK(draw_se_times(rng, 0.0, 380e-9).empty());
  CHECK(rng.next_u64() == ref.next_u64());
}

TEST_CASE("emission times are sorted, in range, and capped at three") {
  Rng rng(11);
  const double tau_p = 380e-9;
  const double gamma = 2.0 / tau_p;  // two expected events per pulse
  bool saw_cap = false;
  for (int i = 0; i < 20000; ++i) {
    const auto t = draw_se_times(rng, gamma, tau_p);
    REQUIRE(t.size() <= 3);
    if (t.size() == 3) saw_cap = true;
    for (std::size_t j = 0; j < t.size(); ++j) {
      CHECK(t[j] >= 0.0);
      CHECK(t[j] < tau_p);
      if (j > 0) CHECK(t[j] > t[j - 1]);
    }
  }
  CHECK(saw_cap);
}

TEST_CASE("per-pulse emission probability matches the poisson closed form") {
  // P(at least one event) = 1 - exp(-p_se) at p_se = 0.037.
  const double tau_p = 380e-9;
  const double p_se = 0.037;
  const int n = 1000000;
  Rng rng(2024);
  int hit = 0;
  for (int i = 0; i < n; ++i)
    if (!draw_se_times(rng, p_se / tau_p, tau_p).empty()) ++hit;
  const double expect = 0.036323864696655382;  // 1 - exp(-0.037)
  const double sigma = std::sqrt(expect * (1.0 - expect) / n);
  CHECK(std::abs(static_cast<double>(hit) / n - expect) < 3.0 * sigma);
}

TEST_CASE("mean event count matches the truncated poisson at p_se = 0.11") {
  // The cap at three events truncates the tail:
  // E[min(N,3)] = 3 - 3 P0 - 2 P1 - P2 with Pk the poisson weights.
  const double tau_p = 380e-9;
  const double lambda = 0.11;
  const int n = 1000000;
  Rng rng(515);
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double c = static_cast<double>(draw_se_times(rng, lambda / tau_p, tau_p).size());
    sum += c;
    sum2 += c * c;
  }
  const double mean = sum / n;
  const double expect = 0.10999428782056682;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean - expect) < 3.0 * std::sqrt(var / n));
}

TEST_CASE("recoil pdf and cdf are consistent") {
  CHECK(recoil_cdf(-1.0) == 0.0);
  CHECK(recoil_cdf(1.0) == 1.0);
  CHECK(recoil_cdf(0.0) == 0.5);
  // d cdf / du == pdf by central differences
  for (double u = -0.9; u <= 0.95; u += 0.1) {
    const double h = 1e-6;
    const double d = (recoil_cdf(u + h) - recoil_cdf(u - h)) / (2.0 * h);
    CHECK(d == Catch::Approx(recoil_pdf(u)).epsilon(1e-8));
  }
}

TEST_CASE("recoil samples reproduce the dipole distribution") {
  const int n = 1000000;
  Rng rng(99);
  double s1 = 0.0, s2 = 0.0;
  std::array<int, 50> bins{};
  for (int i = 0; i < n; ++i) {
    const double u = sample_recoil_u(rng);
    REQUIRE(u >= -1.0);
    REQUIRE(u <= 1.0);
    s1 += u;
    s2 += u * u;
    const int b = std::min(49, static_cast<int>(recoil_cdf(u) * 50.0));
    ++bins[static_cast<std::size_t>(b)];
  }
  // the second moment of (3/8)(1+u^2) is 2/5
  CHECK(std::abs(s2 / n - 0.4) < 0.003);
  CHECK(std::abs(s1 / n) < 3.0 * std::sqrt(0.4 / n));

  // chi-squared over 50 equal-probability bins, alpha = 0.001
  const double expect = static_cast<double>(n) / 50.0;
  double chi2 = 0.0;
  for (int c : bins) {
    const double d = c - expect;
    chi2 += d * d / expect;
  }
  CHECK(chi2 < 85.350565661579923);  // 0.999 quantile, 49 dof
}

TEST_CASE("channel selection follows the branching rates") {
  SeChannelWeights w;
  w.gamma1 = 3.0;
  w.gamma2 = 1.0;
  Rng rng(5);
  int one = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i)
    if (qwalk::select_channel(rng, w) == 1) ++one;
  const double sigma = std::sqrt(0.75 * 0.25 / n);
  CHECK(std::abs(static_cast<double>(one) / n - 0.75) < 3.0 * sigma);

  SeChannelWeights dead;
  dead.gamma1 = 0.0;
  dead.gamma2 = 0.0;
  CHECK_THROWS_AS(qwalk::select_channel(rng, dead), std::invalid_argument);
}

TEST_CASE("overlap amplitudes follow the adiabatic closed form") {
  qwalk::PhysicsParams p;
  p.omega = 2.0;
  p.delta1 = 5.0;
  p.delta2 = 7.0;
  qwalk::DerivedParams d;
  d.gamma = 0.1;
  const SeChannelWeights w = SeChannelWeights::from_params(p, d);
  CHECK(std::abs(w.c1 - 1.0 / cplx{5.0, -0.05}) < 1e-15);
  CHECK(std::abs(w.c2 - 1.0 / cplx{-7.0, -0.05}) < 1e-15);
}

TEST_CASE("for equal detunings and weak decay the two overlaps are opposite") {
  const qwalk::PhysicsParams p =
      qwalk::invert_for_targets(1.45, 1e-6, 1.0, 1.0, 380e-9, 26e-9);
  const qwalk::DerivedParams d = qwalk::derive(p);
  const SeChannelWeights w = SeChannelWeights::from_params(p, d);
  CHECK(std::abs(w.c1) == Catch::Approx(std::abs(w.c2)).epsilon(1e-9));
  CHECK(std::abs(std::arg(w.c2 / w.c1)) == Catch::Approx(qwalk::pi).margin(1e-3));
}

namespace {

SeChannelWeights equal_weights() {
  SeChannelWeights w;
  w.gamma1 = 1.0;
  w.gamma2 = 1.0;
  const double r = 1.0 / std::sqrt(2.0);
  w.c1 = {r, 0.0};
  w.c2 = {r, 0.0};
  return w;
}

}  // namespace

TEST_CASE("a recoil-free collapse projects the internal state only") {
  WalkerState s = qwalk::ratchet_state(6, 0.0);
  const SeEvent ev{100e-9, 1, 0.0};
  const double weight = apply_collapse(s, ev, equal_weights(), CollapseMode::MeanCos);
  // amp = (a1 + a2)/sqrt2 = sqrt2 * a1, then the mean-cos factor 1/sqrt2:
  // weight = |amp|^2 = 1/2 on the ratchet
  CHECK(weight == Catch::Approx(0.5).epsilon(1e-12));
  CHECK(s.beta == 0.0);
  CHECK(std::abs(s.norm2() - 1.0) < 1e-14);
  const double r = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(s.a1[s.index(0)] - cplx{r, 0.0}) < 1e-12);
  CHECK(std::abs(s.a1[s.index(1)] - cplx{0.0, -r}) < 1e-12);
  for (const cplx& v : s.a2) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("a collapse onto level 2 empties level 1") {
  WalkerState s = qwalk::ratchet_state(6, 0.0);
  const SeEvent ev{10e-9, 2, 0.0};
  apply_collapse(s, ev, equal_weights(), CollapseMode::MeanCos);
  for (const cplx& v : s.a1) CHECK(std::abs(v) == 0.0);
  CHECK(std::abs(s.norm2() - 1.0) < 1e-14);
}

TEST_CASE("a collapse orthogonal to the internal state is rejected") {
  WalkerState s = qwalk::make_state(4, 0.0);
  const double r = 1.0 / std::sqrt(2.0);
  s.a1[s.index(0)] = {r, 0.0};
  s.a2[s.index(0)] = {-r, 0.0};
  const SeEvent ev{10e-9, 1, 0.0};
  CHECK_THROWS_AS(apply_collapse(s, ev, equal_weights(), CollapseMode::MeanCos),
                  qwalk::NumericalError);
}

TEST_CASE("the recoil moves total momentum down by half the direction cosine") {
  SeChannelWeights w = equal_weights();
  w.c1 = {1.0, 0.0};
  w.c2 = {0.0, 0.0};

  WalkerState s = qwalk::make_state(6, 0.0);
  s.a1[s.index(0)] = {1.0, 0.0};
  apply_collapse(s, SeEvent{0.0, 1, 0.6}, w, CollapseMode::MeanCos);
  // p = 0 -> p = -0.3: site -1 with beta 0.7
  CHECK(s.beta == Catch::Approx(0.7).margin(1e-12));
  CHECK(std::norm(s.a1[s.index(-1)]) == Catch::Approx(1.0).epsilon(1e-12));

  // an upward recoil (u < 0), and on the half-integer ladder
  WalkerState h = qwalk::make_state(6, 0.25, 0.5);
  h.a1[h.index(2)] = {1.0, 0.0};
  const double p_before = h.momentum(2);
  apply_collapse(h, SeEvent{0.0, 1, -0.3}, w, CollapseMode::MeanCos);
  // p -> p + 0.15: beta 0.25 -> 0.40, no site shift on the spacing-1/2 ladder
  CHECK(h.beta == Catch::Approx(0.40).margin(1e-12));
  CHECK(h.momentum(2) == Catch::Approx(p_before + 0.15).margin(1e-12));
  CHECK(std::norm(h.a1[h.index(2)]) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("collapse weight equals the squared overlap amplitude") {
  Rng rng(31);
  SeChannelWeights w = equal_weights();
  w.c1 = {0.3, 0.4};
  w.c2 = {-0.5, 0.2};
  WalkerState s = qwalk::make_state(8, 0.0);
  for (int i = 2; i < s.size() - 2; ++i) {
    s.a1[i] = {rng.gaussian(), rng.gaussian()};
    s.a2[i] = {rng.gaussian(), rng.gaussian()};
  }
  s.renormalize();
  double expect = 0.0;
  for (int i = 0; i < s.size(); ++i)
    expect += std::norm(w.c1 * s.a1[i] + w.c2 * s.a2[i]);
  expect *= 0.5;  // the squared mean-cos factor
  WalkerState t = s;
  const double weight = apply_collapse(t, SeEvent{0.0, 1, 0.0}, w, CollapseMode::MeanCos);
  CHECK(weight == Catch::Approx(expect).epsilon(1e-12));
  CHECK(std::abs(t.norm2() - 1.0) < 1e-13);
}

TEST_CASE("the exact mode profile is a nearest-neighbour average") {
  SeChannelWeights w = equal_weights();
  w.c1 = {1.0, 0.0};
  w.c2 = {0.0, 0.0};

  WalkerState s = qwalk::make_state(8, 0.0, 0.5);
  Rng rng(8);
  for (int i = 2; i < s.size() - 2; ++i) s.a1[i] = {rng.gaussian(), rng.gaussian()};
  const std::vector<cplx> before = s.a1;
  apply_collapse(s, SeEvent{0.0, 1, 0.0}, w, CollapseMode::ExactCos);

  // cos(theta/2) couples half-integer neighbours: a_n -> (a_{n-1} + a_{n+1})/2
  std::vector<cplx> expect(before.size(), cplx{0.0, 0.0});
  double n2 = 0.0;
  for (int i = 0; i < s.size(); ++i) {
    const cplx lo = (i > 0) ? before[static_cast<std::size_t>(i - 1)] : cplx{0.0, 0.0};
    const cplx hi = (i + 1 < s.size()) ? before[static_cast<std::size_t>(i + 1)] : cplx{0.0, 0.0};
    expect[static_cast<std::size_t>(i)] = 0.5 * (lo + hi);
    n2 += std::norm(expect[static_cast<std::size_t>(i)]);
  }
  for (int i = 0; i < s.size(); ++i)
    CHECK(std::abs(s.a1[i] - expect[static_cast<std::size_t>(i)] / std::sqrt(n2)) < 1e-12);
}

TEST_CASE("the exact mode profile requires the half-integer ladder") {
  WalkerState s = qwalk::ratchet_state(4, 0.0);
  CHECK_THROWS_AS(apply_collapse(s, SeEvent{0.0, 1, 0.0}, equal_weights(),
                                 CollapseMode::ExactCos),
                  qwalk::ConfigError);
}
