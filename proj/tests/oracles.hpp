#pragma once

// Test-only oracles, independent of the library code paths they check:
// a refining 1-D grid minimizer (for prox/envelope values), central finite
// differences (for gradients), and small deterministic random helpers.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>

namespace oracles {

using Vector = Eigen::VectorXd;

/// Minimizes a 1-D function by exhaustive grid search with three refinement
/// passes; accurate to ~1e-9·(hi−lo) for unimodal objectives.
inline double grid_minimize(const std::function<double(double)>& f, double lo, double hi,
                            int points = 2001, int refinements = 3) {
  double best_x = lo, best_v = f(lo);
  for (int pass = 0; pass <= refinements; ++pass) {
    const double step = (hi - lo) / (points - 1);
    for (int i = 0; i < points; ++i) {
      const double x = lo + i * step;
      const double v = f(x);
      if (v < best_v) {
        best_v = v;
        best_x = x;
      }
    }
    const double width = (hi - lo) * 2.0 / (points - 1);
    lo = best_x - width;
    hi = best_x + width;
  }
  return best_x;
}

inline double grid_min_value(const std::function<double(double)>& f, double lo, double hi,
                             int points = 2001, int refinements = 3) {
  return f(grid_minimize(f, lo, hi, points, refinements));
}

/// Central finite differences with per-coordinate step h·(1+|x_i|).
inline Vector finite_diff_grad(const std::function<double(const Vector&)>& f, const Vector& x,
                               double h = 1e-6) {
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double hi = h * (1.0 + std::abs(x[i]));
    probe[i] = x[i] + hi;
    const double fp = f(probe);
    probe[i] = x[i] - hi;
    const double fm = f(probe);
    probe[i] = x[i];
    g[i] = (fp - fm) / (2.0 * hi);
  }
  return g;
}

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double scale = 1.0) {
  std::normal_distribution<double> gauss(0.0, scale);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = gauss(rng);
  return v;
}

inline bool bitwise_equal(const Vector& a, const Vector& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

}  // namespace oracles
