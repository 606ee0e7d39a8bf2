#pragma once

// Iterative radix-2 complex FFT.  Grid sizes in the spectral kick propagator
// are always powers of two and fixed for the lifetime of a run, so a small
// plan object precomputes the bit-reversal permutation and twiddle table and
// is reused for every transform.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "qwalk/constants.hpp"

namespace qwalk {

class FftPlan {
public:
  explicit FftPlan(std::size_t size) : n_(size) {
    if (n_ == 0 || (n_ & (n_ - 1)) != 0)
      throw std::invalid_argument("FftPlan: size must be a power of two");
    log2n_ = 0;
    while ((std::size_t{1} << log2n_) < n_) ++log2n_;

    rev_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      std::size_t r = 0;
      for (unsigned b = 0; b < log2n_; ++b) r |= ((i >> b) & 1u) << (log2n_ - 1 - b);
      rev_[i] = r;
    }
    // Twiddles for the forward (e^{-i...}) transform; the inverse uses their
    // conjugates.  w_[j] = exp(-2*pi*i*j/n), j < n/2.
    tw_.resize(n_ / 2);
    for (std::size_t j = 0; j < n_ / 2; ++j) {
      const double ang = -two_pi * static_cast<double>(j) / static_cast<double>(n_);
      tw_[j] = {std::cos(ang), std::sin(ang)};
    }
  }

  std::size_t size() const { return n_; }

  // X_k = sum_j x_j exp(-2 pi i j k / n).  Unnormalized, in place.
  void forward(std::complex<double>* x) const { transform(x, /*inverse=*/false); }

  // x_j = sum_k X_k exp(+2 pi i j k / n).  Unnormalized, in place; a forward
  // followed by an inverse multiplies the data by n.
  void inverse(std::complex<double>* x) const { transform(x, /*inverse=*/true); }

private:
  void transform(std::complex<double>* x, bool inverse) const {
    for (std::size_t i = 0; i < n_; ++i)
      if (rev_[i] > i) std::swap(x[i], x[rev_[i]]);

    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len >> 1;
      const std::size_t stride = n_ / len;  // twiddle index step at this stage
      for (std::size_t blk = 0; blk < n_; blk += len) {
        for (std::size_t j = 0; j < half; ++j) {
          std::complex<double> w = tw_[j * stride];
          if (inverse) w = std::conj(w);
          const std::complex<double> u = x[blk + j];
          const std::complex<double> v = x[blk + j + half] * w;
          x[blk + j] = u + v;
          x[blk + j + half] = u - v;
        }
      }
    }
  }

  std::size_t n_;
  unsigned log2n_ = 0;
  std::vector<std::size_t> rev_;
  std::vector<std::complex<double>> tw_;
};

}
