#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <vector>

#include "plasmo/types.hpp"

namespace plasmo {

/// Gauss-Legendre nodes and weights on [-1, 1].
template <typename Scalar>
struct GaussLegendre {
  std::vector<Scalar> nodes;
  std::vector<Scalar> weights;

  int order() const { return static_cast<int>(nodes.size()); }

  /// Map the rule onto [lo, hi] and sum f at the mapped nodes.
  template <typename F>
  auto integrate(Scalar lo, Scalar hi, F&& f) const {
    const Scalar half = (hi - lo) / 2;
    const Scalar mid = (hi + lo) / 2;
    using R = decltype(f(mid));
    R sum = R(0);
    for (std::size_t k = 0; k < nodes.size(); ++k)
      sum += weights[k] * f(mid + half * nodes[k]);
    return sum * half;
  }
};

namespace detail {

// Newton iteration on P_n with the Tricomi initial guess.
template <typename Scalar>
GaussLegendre<Scalar> build_gauss_legendre(int n) {
  using std::abs;
  using std::cos;
  GaussLegendre<Scalar> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Scalar x = cos(pi_v<Scalar> * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
    Scalar dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      Scalar p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1;
      dp = n * (x * p1 - p0) / (x * x - 1);
      const Scalar dx = p1 / dp;
      x -= dx;
      if (abs(dx) <= 4 * eps) break;
    }
    // Recompute the derivative at the converged node.
    Scalar p0 = 1, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? Scalar(1) : n * (x * p1 - p0) / (x * x - 1);
    const Scalar w = 2 / ((1 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0;
  return rule;
}

}  // namespace detail

/// Shared, immutable Gauss-Legendre rule of the requested order.
template <typename Scalar>
const GaussLegendre<Scalar>& gauss_legendre(int order) {
  if (order < 1) throw InvalidArgument("quadrature order must be >= 1");
  static std::mutex mutex;
  static std::map<int, GaussLegendre<Scalar>> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end())
    it = cache.emplace(order, detail::build_gauss_legendre<Scalar>(order)).first;
  return it->second;
}

}  // namespace plasmo
