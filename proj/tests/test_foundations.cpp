#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <set>
#include <vector>

#include "qwalk/fft.hpp"
#include "qwalk/rng.hpp"

using qwalk::cplx;
using qwalk::FftPlan;
using qwalk::Rng;

namespace {

// Naive O(n^2) DFT as an independent reference.
std::vector<cplx> dft_direct(const std::vector<cplx>& x, int sign) {
  const std::size_t n = x.size();
  std::vector<cplx> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    cplx s{0.0, 0.0};
    for (std::size_t j = 0; j < n; ++j)
      s += x[j] * std::polar(1.0, sign * 2.0 * qwalk::pi * double(j * k) / double(n));
    out[k] = s;
  }
  return out;
}

}  // namespace

TEST_CASE("fft rejects sizes that are not powers of two") {
  CHECK_THROWS_AS(FftPlan(0), std::invalid_argument);
  CHECK_THROWS_AS(FftPlan(3), std::invalid_argument);
  CHECK_THROWS_AS(FftPlan(48), std::invalid_argument);
  CHECK_NOTHROW(FftPlan(1));
  CHECK_NOTHROW(FftPlan(64));
}

TEST_CASE("fft of a unit impulse is flat") {
  FftPlan plan(32);
  std::vector<cplx> x(32, cplx{0.0, 0.0});
  x[0] = 1.0;
  plan.forward(x.data());
  for (const cplx& v : x) {
    CHECK(std::abs(v.real() - 1.0) < 1e-14);
    CHECK(std::abs(v.imag()) < 1e-14);
  }
}

TEST_CASE("fft matches the direct transform") {
  Rng rng(7);
  std::vector<cplx> x(16);
  for (cplx& v : x) v = {rng.uniform() - 0.5, rng.uniform() - 0.5};
  auto fwd = x;
  FftPlan plan(16);
  plan.forward(fwd.data());
  const auto ref = dft_direct(x, -1);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(fwd[i] - ref[i]) < 1e-12);

  auto inv = x;
  plan.inverse(inv.data());
  const auto refi = dft_direct(x, +1);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(inv[i] - refi[i]) < 1e-12);
}

TEST_CASE("fft round trip scales by n") {
  Rng rng(11);
  const std::size_t n = 256;
  FftPlan plan(n);
  std::vector<cplx> x(n);
  for (cplx& v : x) v = {rng.gaussian(), rng.gaussian()};
  auto y = x;
  plan.forward(y.data());
  plan.inverse(y.data());
  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    err = std::max(err, std::abs(y[i] / double(n) - x[i]));
  CHECK(err < 1e-13);
}

TEST_CASE("fft preserves energy (parseval)") {
  Rng rng(13);
  const std::size_t n = 128;
  FftPlan plan(n);
  std::vector<cplx> x(n);
  double e_time = 0.0;
  for (cplx& v : x) {
    v = {rng.gaussian(), rng.gaussian()};
    e_time += std::norm(v);
  }
  plan.forward(x.data());
  double e_freq = 0.0;
  for (const cplx& v : x) e_freq += std::norm(v);
  CHECK(std::abs(e_freq / double(n) - e_time) < 1e-10 * e_time);
}

TEST_CASE("rng streams are deterministic and distinct") {
  Rng a(42, 3), b(42, 3), c(42, 4);
  bool same = true, differ = false;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t va = a.next_u64();
    same = same && (va == b.next_u64());
    differ = differ || (va != c.next_u64());
  }
  CHECK(same);
  CHECK(differ);
}

TEST_CASE("substream seeds do not collide over a large index range") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 100000; ++i) seen.insert(qwalk::substream_seed(1234, i));
  CHECK(seen.size() == 100000);
}

TEST_CASE("uniform lies in [0,1) with the right moments") {
  Rng rng(5);
  const int n = 200000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    s += u;
    s2 += u * u;
  }
  const double mean = s / n;
  const double var = s2 / n - mean * mean;
  CHECK(std::abs(mean - 0.5) < 0.005);
  CHECK(std::abs(var - 1.0 / 12.0) < 0.002);
}

TEST_CASE("gaussian has unit variance and zero skew") {
  Rng rng(17);
  const int n = 500000;
  double s = 0.0, s2 = 0.0, s3 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rng.gaussian();
    s += g;
    s2 += g * g;
    s3 += g * g * g;
  }
  CHECK(std::abs(s / n) < 0.01);
  CHECK(std::abs(s2 / n - 1.0) < 0.01);
  CHECK(std::abs(s3 / n) < 0.03);
}

TEST_CASE("gaussian consumes exactly two engine draws") {
  Rng a(99, 0), b(99, 0);
  for (int i = 0; i < 10; ++i) a.gaussian();
  for (int i = 0; i < 20; ++i) b.next_u64();
  CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("exponential waiting times have the configured rate") {
  Rng rng(23);
  const double rate = 3.5;
  const int n = 400000;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += rng.exponential(rate);
  CHECK(std::abs(s / n - 1.0 / rate) < 0.01 / rate);
}
