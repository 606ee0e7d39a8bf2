#pragma once

// Gauss-Legendre quadrature of the recoil average integral(du) Xi(u) f(u)
// over [-1, 1].  The dipole weight Xi(u) = (3/8)(1 + u^2) is folded into the
// quadrature weights, which then sum to exactly 1 (Xi is a polynomial well
// inside the rule's exactness degree).

#include <cmath>
#include <stdexcept>
#include <vector>

#include "qwalk/constants.hpp"
#include "qwalk/se_model.hpp"

namespace qwalk {

struct QuadratureRule {
  std::vector<double> u;  // nodes in (-1, 1)
  std::vector<double> w;  // weights including the Xi(u) factor

  int size() const { return static_cast<int>(u.size()); }

  double weight_sum() const {
    double s = 0.0;
    for (double v : w) s += v;
    return s;
  }

  static QuadratureRule gauss_legendre_xi(int n) {
    if (n < 2) throw std::invalid_argument("QuadratureRule: need at least 2 nodes");
    QuadratureRule q;
    q.u.resize(static_cast<std::size_t>(n));
    q.w.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < (n + 1) / 2; ++i) {
      // Newton iteration for the i-th root of the Legendre polynomial P_n.
      double x = std::cos(pi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      const double wgl = 2.0 / ((1.0 - x * x) * dp * dp);
      q.u[static_cast<std::size_t>(i)] = -x;
      q.u[static_cast<std::size_t>(n - 1 - i)] = x;
      q.w[static_cast<std::size_t>(i)] = wgl * recoil_pdf(-x);
      q.w[static_cast<std::size_t>(n - 1 - i)] = wgl * recoil_pdf(x);
    }
    return q;
  }
};

}
