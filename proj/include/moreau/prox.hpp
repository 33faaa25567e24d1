#pragma once

// Prox-capable convex functions, Moreau envelopes and their gradients, and
// the closed-form catalog used by the deblurring and SVM benchmarks.
//
// A ProxFunction is a convex L-Lipschitz function f together with its
// proximal map Prox_{γf}. The conjugate prox Prox_{(1/σ)f*}(x/σ) is derived
// from the Moreau decomposition
//     Prox_{γf}(x) + γ·Prox_{(1/γ)f*}(x/γ) = x,
// unless a catalog entry supplies a direct closed form (both routes are
// cross-checked in the tests). Lipschitz continuity of f confines dom f*
// to the ball of radius L, so conjugate prox outputs never exceed L in norm.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "moreau/linops.hpp"

namespace moreau {

/// Convex Lipschitz function with value and proximal-point oracles.
struct ProxFunction {
  Index dim = 0;
  double lipschitz = 0.0;
  std::function<double(const Vector&)> value;
  /// Computes Prox_{γf}(x); γ > 0.
  std::function<Vector(double, const Vector&)> prox;
  /// Optional closed form for Prox_{(1/σ)f*}(x/σ); empty means "derive from
  /// the Moreau decomposition".
  std::function<Vector(double, const Vector&)> conj_prox_direct;
};

/// Convex differentiable function with an L-Lipschitz gradient.
struct SmoothFunction {
  Index dim = 0;
  double grad_lipschitz = 0.0;
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

namespace detail {

inline void check_gamma(double gamma, const char* who) {
  if (!(gamma > 0.0)) {
    throw std::invalid_argument(std::string(who) + ": smoothing parameter must be positive");
  }
}

inline void check_dim(const ProxFunction& f, const Vector& x, const char* who) {
  if (x.size() != f.dim) {
    throw std::invalid_argument(std::string(who) + ": vector dimension mismatch");
  }
}

inline double soft_threshold(double t, double thr) {
  if (t > thr) return t - thr;
  if (t < -thr) return t + thr;
  return 0.0;
}

}  // namespace detail

/// Prox_{(1/σ)f*}(x/σ), the gradient of the Moreau envelope ^σf at x.
inline Vector conj_prox(const ProxFunction& f, double sigma, const Vector& x) {
  detail::check_gamma(sigma, "conj_prox");
  detail::check_dim(f, x, "conj_prox");
  if (f.conj_prox_direct) return f.conj_prox_direct(sigma, x);
  return (x - f.prox(sigma, x)) / sigma;
}

/// Moreau envelope value ^γf(x) = f(p) + ‖x−p‖²/(2γ) at p = Prox_{γf}(x).
inline double envelope(const ProxFunction& f, double gamma, const Vector& x) {
  detail::check_gamma(gamma, "envelope");
  detail::check_dim(f, x, "envelope");
  const Vector p = f.prox(gamma, x);
  return f.value(p) + (x - p).squaredNorm() / (2.0 * gamma);
}

/// Gradient of the envelope, (x − Prox_{γf}(x))/γ = Prox_{(1/γ)f*}(x/γ);
/// (1/γ)-Lipschitz.
inline Vector envelope_grad(const ProxFunction& f, double gamma, const Vector& x) {
  return conj_prox(f, gamma, x);
}

/// f ≡ 0 as a prox-capable function: prox is the identity, the conjugate
/// prox is identically zero.
inline ProxFunction zero_prox_function(Index n) {
  if (n < 1) throw std::invalid_argument("zero_prox_function: dimension must be positive");
  ProxFunction f;
  f.dim = n;
  f.lipschitz = 0.0;
  f.value = [](const Vector&) { return 0.0; };
  f.prox = [](double, const Vector& x) { return x; };
  f.conj_prox_direct = [n](double, const Vector&) { return Vector(Vector::Zero(n)); };
  return f;
}

/// g(y) = λ‖y‖₁. Prox is soft-thresholding at λγ; the conjugate prox is the
/// box projection P_{[−λ,λ]ⁿ}(y/σ); Lipschitz constant λ√n.
inline ProxFunction catalog_scaled_l1(double lambda, Index n) {
  if (!(lambda > 0.0)) throw std::invalid_argument("catalog_scaled_l1: lambda must be positive");
  if (n < 1) throw std::invalid_argument("catalog_scaled_l1: dimension must be positive");
  ProxFunction f;
  f.dim = n;
  f.lipschitz = lambda * std::sqrt(static_cast<double>(n));
  f.value = [lambda](const Vector& x) { return lambda * x.lpNorm<1>(); };
  f.prox = [lambda](double gamma, const Vector& x) {
    Vector p(x.size());
    const double thr = lambda * gamma;
    for (Index i = 0; i < x.size(); ++i) p[i] = detail::soft_threshold(x[i], thr);
    return p;
  };
  f.conj_prox_direct = [lambda](double sigma, const Vector& x) {
    return Vector((x / sigma).cwiseMax(-lambda).cwiseMin(lambda));
  };
  return f;
}

/// g(y) = ‖y−b‖₁. Prox shifts, soft-thresholds at γ and shifts back; the
/// conjugate prox is P_{[−1,1]ⁿ}((y−b)/σ); Lipschitz constant √n.
inline ProxFunction catalog_l1_deviation(Vector b) {
  if (b.size() < 1) throw std::invalid_argument("catalog_l1_deviation: empty offset");
  auto offset = std::make_shared<const Vector>(std::move(b));
  ProxFunction f;
  f.dim = offset->size();
  f.lipschitz = std::sqrt(static_cast<double>(offset->size()));
  f.value = [offset](const Vector& x) { return (x - *offset).lpNorm<1>(); };
  f.prox = [offset](double gamma, const Vector& x) {
    Vector p(x.size());
    for (Index i = 0; i < x.size(); ++i) {
      p[i] = (*offset)[i] + detail::soft_threshold(x[i] - (*offset)[i], gamma);
    }
    return p;
  };
  f.conj_prox_direct = [offset](double sigma, const Vector& x) {
    return Vector(((x - *offset) / sigma).cwiseMax(-1.0).cwiseMin(1.0));
  };
  return f;
}

namespace detail {

// 1-D hinge prox in the label-aligned coordinate s = y·t:
// argmin_s C·max(1−s,0) + (s−s0)²/(2γ).
inline double hinge_prox_aligned(double s0, double gamma, double C) {
  if (s0 >= 1.0) return s0;
  if (s0 <= 1.0 - gamma * C) return s0 + gamma * C;
  return 1.0;
}

// Slot value of P_{y·[−C,0]}((c−y)/σ).
inline double hinge_conj_aligned(double c, double sigma, double C, int y) {
  if (y > 0) return std::clamp((c - 1.0) / sigma, -C, 0.0);
  return std::clamp((c + 1.0) / sigma, 0.0, C);
}

}  // namespace detail

/// One hinge-loss term of an SVM objective: g(c) = C·max(1 − cᵢ·y, 0) on Rⁿ.
/// Only coordinate i participates; the conjugate prox places
/// P_{y·[−C,0]}((cᵢ − y)/μ) in slot i and zeros elsewhere.
inline ProxFunction catalog_hinge_component(Index i, int y_label, double C, Index n) {
  if (n < 1) throw std::invalid_argument("catalog_hinge_component: dimension must be positive");
  if (i < 0 || i >= n) throw std::invalid_argument("catalog_hinge_component: index out of range");
  if (y_label != 1 && y_label != -1) {
    throw std::invalid_argument("catalog_hinge_component: label must be +1 or -1");
  }
  if (!(C > 0.0)) throw std::invalid_argument("catalog_hinge_component: C must be positive");
  ProxFunction f;
  f.dim = n;
  f.lipschitz = C;
  const double y = static_cast<double>(y_label);
  f.value = [i, y, C](const Vector& c) { return C * std::max(1.0 - c[i] * y, 0.0); };
  f.prox = [i, y, C](double gamma, const Vector& c) {
    Vector p = c;
    p[i] = y * detail::hinge_prox_aligned(y * c[i], gamma, C);
    return p;
  };
  f.conj_prox_direct = [i, y_label, C, n](double sigma, const Vector& c) {
    Vector p = Vector::Zero(n);
    p[i] = detail::hinge_conj_aligned(c[i], sigma, C, y_label);
    return p;
  };
  return f;
}

/// Separable sum of per-sample hinge terms, g(c) = C·Σᵢ max(1 − cᵢ·Yᵢ, 0).
/// Each term touches a distinct coordinate, so prox and conjugate prox act
/// componentwise and the Lipschitz constant is C√n (the root-sum-square of
/// the per-term constants).
inline ProxFunction catalog_hinge(std::vector<int> labels, double C) {
  if (labels.empty()) throw std::invalid_argument("catalog_hinge: empty label list");
  if (!(C > 0.0)) throw std::invalid_argument("catalog_hinge: C must be positive");
  for (int y : labels) {
    if (y != 1 && y != -1) throw std::invalid_argument("catalog_hinge: labels must be +1 or -1");
  }
  auto ys = std::make_shared<const std::vector<int>>(std::move(labels));
  const Index n = static_cast<Index>(ys->size());
  ProxFunction f;
  f.dim = n;
  f.lipschitz = C * std::sqrt(static_cast<double>(n));
  f.value = [ys, C](const Vector& c) {
    double acc = 0.0;
    for (Index i = 0; i < c.size(); ++i) {
      acc += std::max(1.0 - c[i] * static_cast<double>((*ys)[i]), 0.0);
    }
    return C * acc;
  };
  f.prox = [ys, C](double gamma, const Vector& c) {
    Vector p(c.size());
    for (Index i = 0; i < c.size(); ++i) {
      const double y = static_cast<double>((*ys)[i]);
      p[i] = y * detail::hinge_prox_aligned(y * c[i], gamma, C);
    }
    return p;
  };
  f.conj_prox_direct = [ys, C](double sigma, const Vector& c) {
    Vector p(c.size());
    for (Index i = 0; i < c.size(); ++i) {
      p[i] = detail::hinge_conj_aligned(c[i], sigma, C, (*ys)[i]);
    }
    return p;
  };
  return f;
}

/// Product-space combination g(y₁,…,y_m) = Σ gᵢ(yᵢ) on the concatenated
/// space; prox and conjugate prox act slice by slice and the Lipschitz
/// constant is (Σ Lᵢ²)^{1/2}.
inline ProxFunction concat(std::vector<ProxFunction> parts) {
  if (parts.empty()) throw std::invalid_argument("concat: empty part list");
  auto ps = std::make_shared<const std::vector<ProxFunction>>(std::move(parts));
  Index total = 0;
  double l_sq = 0.0;
  for (const auto& p : *ps) {
    total += p.dim;
    l_sq += p.lipschitz * p.lipschitz;
  }
  ProxFunction f;
  f.dim = total;
  f.lipschitz = std::sqrt(l_sq);
  f.value = [ps](const Vector& x) {
    double acc = 0.0;
    Index offset = 0;
    for (const auto& p : *ps) {
      acc += p.value(x.segment(offset, p.dim));
      offset += p.dim;
    }
    return acc;
  };
  f.prox = [ps, total](double gamma, const Vector& x) {
    Vector out(total);
    Index offset = 0;
    for (const auto& p : *ps) {
      out.segment(offset, p.dim) = p.prox(gamma, x.segment(offset, p.dim));
      offset += p.dim;
    }
    return out;
  };
  f.conj_prox_direct = [ps, total](double sigma, const Vector& x) {
    Vector out(total);
    Index offset = 0;
    for (const auto& p : *ps) {
      out.segment(offset, p.dim) = conj_prox(p, sigma, x.segment(offset, p.dim));
      offset += p.dim;
    }
    return out;
  };
  return f;
}

/// f ≡ 0 as a smooth function (zero gradient, L_∇f = 0).
inline SmoothFunction catalog_zero(Index n) {
  if (n < 1) throw std::invalid_argument("catalog_zero: dimension must be positive");
  SmoothFunction f;
  f.dim = n;
  f.grad_lipschitz = 0.0;
  f.value = [](const Vector&) { return 0.0; };
  f.gradient = [n](const Vector&) { return Vector(Vector::Zero(n)); };
  return f;
}

/// f(c) = ½⟨c, Mc⟩ for a self-adjoint positive-semidefinite map M;
/// ∇f(c) = Mc with Lipschitz constant √(M.norm_sq_bound) = ‖M‖.
inline SmoothFunction catalog_quadratic_form(const LinearMap& M) {
  if (M.in_dim != M.out_dim) {
    throw std::invalid_argument("catalog_quadratic_form: map must be square");
  }
  // spot-check self-adjointness on a few deterministic probes
  std::mt19937_64 rng(98765);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int probe = 0; probe < 4; ++probe) {
    Vector x(M.in_dim), y(M.in_dim);
    for (Index i = 0; i < M.in_dim; ++i) {
      x[i] = gauss(rng);
      y[i] = gauss(rng);
    }
    const double lhs = M.forward(x).dot(y);
    const double rhs = x.dot(M.forward(y));
    if (std::abs(lhs - rhs) > 1e-8 * (1.0 + x.norm() * y.norm())) {
      throw std::invalid_argument("catalog_quadratic_form: map is not self-adjoint");
    }
  }
  auto op = std::make_shared<const LinearMap>(M);
  SmoothFunction f;
  f.dim = M.in_dim;
  f.grad_lipschitz = std::sqrt(M.norm_sq_bound);
  f.value = [op](const Vector& c) { return 0.5 * c.dot(op->forward(c)); };
  f.gradient = [op](const Vector& c) { return op->forward(c); };
  return f;
}

}  // namespace moreau
