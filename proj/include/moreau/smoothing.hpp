#pragma once

// Composite problem model F(x) = f(x) + Σᵢ gᵢ(Kᵢx) and its smooth surrogate
//
//     F^{ρ,μ}(x) = ^ρf(x) + Σᵢ ^μgᵢ(Kᵢx),
//
// where ^γh denotes the Moreau envelope of parameter γ. When f is itself
// differentiable with Lipschitz gradient, only the g-terms are smoothed and
// the surrogate is f(x) + Σᵢ ^μgᵢ(Kᵢx). The surrogate has gradient
//
//     ∇F^{ρ,μ}(x) = Prox_{(1/ρ)f*}(x/ρ) + Σᵢ Kᵢ* Prox_{(1/μ)gᵢ*}(Kᵢx/μ)
//
// with Lipschitz constant 1/ρ + Σ‖Kᵢ‖²/μ (or L_∇f + Σ‖Kᵢ‖²/μ), and satisfies
// the sandwich F^{ρ,μ}(x) ≤ F(x) ≤ F^{ρ,μ}(x) + ρL_f²/2 + μ(ΣL_gᵢ²)/2.

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <variant>
#include <vector>

#include "moreau/linops.hpp"
#include "moreau/prox.hpp"

namespace moreau {

/// Smoothing parameters: ρ smooths the f-term (absent when f is already
/// differentiable), μ smooths the g-terms.
struct SmoothingParams {
  std::optional<double> rho;
  double mu = 0.0;
};

struct CompositeTerm {
  ProxFunction g;
  LinearMap op;
};

/// One f-term (prox-capable or smooth) plus the list of (gᵢ, Kᵢ) pairs.
struct CompositeProblem {
  std::variant<ProxFunction, SmoothFunction> f_term;
  std::vector<CompositeTerm> terms;

  bool smooth_mode() const { return std::holds_alternative<SmoothFunction>(f_term); }

  Index dim() const {
    return smooth_mode() ? std::get<SmoothFunction>(f_term).dim
                         : std::get<ProxFunction>(f_term).dim;
  }

  /// L_f of the prox-capable f-term (0 in smooth mode, where it is unused).
  double f_lipschitz() const {
    return smooth_mode() ? 0.0 : std::get<ProxFunction>(f_term).lipschitz;
  }

  /// L_∇f of the smooth f-term (0 in Lipschitz mode, where it is unused).
  double grad_lipschitz() const {
    return smooth_mode() ? std::get<SmoothFunction>(f_term).grad_lipschitz : 0.0;
  }

  double l_g_sq_total() const {
    double acc = 0.0;
    for (const auto& t : terms) acc += t.g.lipschitz * t.g.lipschitz;
    return acc;
  }

  double k_norm_sq_total() const {
    double acc = 0.0;
    for (const auto& t : terms) acc += t.op.norm_sq_bound;
    return acc;
  }
};

/// Validating constructor: checks dimension consistency and that every
/// gᵢ has a finite positive Lipschitz constant.
inline CompositeProblem make_problem(std::variant<ProxFunction, SmoothFunction> f_term,
                                     std::vector<CompositeTerm> terms) {
  CompositeProblem p{std::move(f_term), std::move(terms)};
  if (p.terms.empty()) throw std::invalid_argument("make_problem: need at least one term");
  const Index n = p.dim();
  if (n < 1) throw std::invalid_argument("make_problem: f-term has no dimension");
  for (const auto& t : p.terms) {
    if (t.op.in_dim != n) {
      throw std::invalid_argument("make_problem: operator in_dim does not match problem dimension");
    }
    if (t.g.dim != t.op.out_dim) {
      throw std::invalid_argument("make_problem: g dimension does not match operator out_dim");
    }
    if (!(t.g.lipschitz > 0.0) || !std::isfinite(t.g.lipschitz)) {
      throw std::invalid_argument("make_problem: g terms need finite positive Lipschitz constants");
    }
  }
  return p;
}

namespace detail {

inline void check_params(const CompositeProblem& p, const SmoothingParams& s, const char* who) {
  if (!(s.mu > 0.0)) throw std::invalid_argument(std::string(who) + ": mu must be positive");
  if (p.smooth_mode()) {
    if (s.rho.has_value()) {
      throw std::invalid_argument(std::string(who) + ": rho given, but the f-term is smooth");
    }
  } else {
    if (!s.rho.has_value()) {
      throw std::invalid_argument(std::string(who) + ": rho required for a prox-capable f-term");
    }
    if (!(*s.rho > 0.0)) throw std::invalid_argument(std::string(who) + ": rho must be positive");
  }
}

}  // namespace detail

/// The exact nonsmooth objective F(x) = f(x) + Σᵢ gᵢ(Kᵢx).
inline double true_value(const CompositeProblem& p, const Vector& x) {
  double acc = p.smooth_mode() ? std::get<SmoothFunction>(p.f_term).value(x)
                               : std::get<ProxFunction>(p.f_term).value(x);
  for (const auto& t : p.terms) acc += t.g.value(t.op.forward(x));
  return acc;
}

inline double smoothed_value(const CompositeProblem& p, const SmoothingParams& s,
                             const Vector& x) {
  detail::check_params(p, s, "smoothed_value");
  double acc = p.smooth_mode()
                   ? std::get<SmoothFunction>(p.f_term).value(x)
                   : envelope(std::get<ProxFunction>(p.f_term), *s.rho, x);
  for (const auto& t : p.terms) acc += envelope(t.g, s.mu, t.op.forward(x));
  return acc;
}

inline Vector smoothed_gradient(const CompositeProblem& p, const SmoothingParams& s,
                                const Vector& x) {
  detail::check_params(p, s, "smoothed_gradient");
  Vector grad = p.smooth_mode()
                    ? std::get<SmoothFunction>(p.f_term).gradient(x)
                    : conj_prox(std::get<ProxFunction>(p.f_term), *s.rho, x);
  for (const auto& t : p.terms) {
    grad += t.op.adjoint(conj_prox(t.g, s.mu, t.op.forward(x)));
  }
  return grad;
}

/// Lipschitz constant of ∇F^{ρ,μ}: 1/ρ + Σ‖Kᵢ‖²/μ, or L_∇f + Σ‖Kᵢ‖²/μ when
/// the f-term is smooth.
inline double lipschitz_of_smoothed(const CompositeProblem& p, const SmoothingParams& s) {
  detail::check_params(p, s, "lipschitz_of_smoothed");
  const double f_part = p.smooth_mode() ? p.grad_lipschitz() : 1.0 / *s.rho;
  return f_part + p.k_norm_sq_total() / s.mu;
}

/// Worst-case distance between the surrogate and the exact objective:
/// F^{ρ,μ}(x) ≤ F(x) ≤ F^{ρ,μ}(x) + gap_bound for every x.
inline double gap_bound(const CompositeProblem& p, const SmoothingParams& s) {
  detail::check_params(p, s, "gap_bound");
  const double f_part =
      p.smooth_mode() ? 0.0 : *s.rho * p.f_lipschitz() * p.f_lipschitz() / 2.0;
  return f_part + s.mu * p.l_g_sq_total() / 2.0;
}

}  // namespace moreau
