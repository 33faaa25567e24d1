#pragma once

// Linear operator abstraction plus the concrete operators the benchmarks
// need: Gaussian blur with reflexive boundaries, orthonormal Haar wavelet
// transforms, Gaussian-kernel Gram matrices, identity/diagonal/dense maps,
// product-space stacking and a power-iteration norm estimator.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

namespace moreau {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// A bounded linear operator K between finite-dimensional coordinate spaces.
/// `norm_sq_bound` is an upper bound on the squared spectral norm ‖K‖².
/// Maps are immutable after construction; forward/adjoint are re-entrant.
struct LinearMap {
  Index in_dim = 0;
  Index out_dim = 0;
  std::function<Vector(const Vector&)> forward;
  std::function<Vector(const Vector&)> adjoint;
  double norm_sq_bound = 0.0;
};

namespace detail {

// Half-sample symmetric extension: indices fold as ... x1 x0 | x0 x1 ... and
// ... x_{n-1} | x_{n-1} x_{n-2} ...  This is the reflexive boundary rule that
// keeps convolution with a symmetric kernel self-adjoint.
inline Index reflect_index(Index i, Index n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -1 - i;
    if (i >= n) i = 2 * n - 1 - i;
  }
  return i;
}

// Separable 2-D convolution of a row-major rows×cols image with a symmetric
// odd-length 1-D kernel applied along both axes, reflexive padding.
inline Vector conv2_symmetric(const Vector& kernel, Index rows, Index cols,
                              const Vector& img) {
  const Index radius = (kernel.size() - 1) / 2;
  Vector tmp(rows * cols), out(rows * cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      double acc = 0.0;
      for (Index t = -radius; t <= radius; ++t) {
        acc += kernel[t + radius] * img[i * cols + reflect_index(j + t, cols)];
      }
      tmp[i * cols + j] = acc;
    }
  }
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      double acc = 0.0;
      for (Index t = -radius; t <= radius; ++t) {
        acc += kernel[t + radius] * tmp[reflect_index(i + t, rows) * cols + j];
      }
      out[i * cols + j] = acc;
    }
  }
  return out;
}

constexpr double kInvSqrt2 = 0.70710678118654752440;

// In-place Mallat decomposition: at each level the top-left block is split
// into approximation/detail halves along rows, then along columns.
inline void haar2_forward(Index rows, Index cols, int levels, Vector& a) {
  Vector buf(std::max(rows, cols));
  Index r = rows, c = cols;
  for (int level = 0; level < levels; ++level) {
    for (Index i = 0; i < r; ++i) {
      for (Index j = 0; j < c / 2; ++j) {
        const double u = a[i * cols + 2 * j];
        const double v = a[i * cols + 2 * j + 1];
        buf[j] = (u + v) * kInvSqrt2;
        buf[c / 2 + j] = (u - v) * kInvSqrt2;
      }
      for (Index j = 0; j < c; ++j) a[i * cols + j] = buf[j];
    }
    for (Index j = 0; j < c; ++j) {
      for (Index i = 0; i < r / 2; ++i) {
        const double u = a[(2 * i) * cols + j];
        const double v = a[(2 * i + 1) * cols + j];
        buf[i] = (u + v) * kInvSqrt2;
        buf[r / 2 + i] = (u - v) * kInvSqrt2;
      }
      for (Index i = 0; i < r; ++i) a[i * cols + j] = buf[i];
    }
    r /= 2;
    c /= 2;
  }
}

inline void haar2_inverse(Index rows, Index cols, int levels, Vector& a) {
  Vector buf(std::max(rows, cols));
  for (int level = levels - 1; level >= 0; --level) {
    const Index r = rows >> level;
    const Index c = cols >> level;
    for (Index j = 0; j < c; ++j) {
      for (Index i = 0; i < r / 2; ++i) {
        const double u = a[i * cols + j];
        const double v = a[(r / 2 + i) * cols + j];
        buf[2 * i] = (u + v) * kInvSqrt2;
        buf[2 * i + 1] = (u - v) * kInvSqrt2;
      }
      for (Index i = 0; i < r; ++i) a[i * cols + j] = buf[i];
    }
    for (Index i = 0; i < r; ++i) {
      for (Index j = 0; j < c / 2; ++j) {
        const double u = a[i * cols + j];
        const double v = a[i * cols + c / 2 + j];
        buf[2 * j] = (u + v) * kInvSqrt2;
        buf[2 * j + 1] = (u - v) * kInvSqrt2;
      }
      for (Index j = 0; j < c; ++j) a[i * cols + j] = buf[j];
    }
  }
}

}  // namespace detail

inline LinearMap make_identity(Index n) {
  if (n < 1) throw std::invalid_argument("make_identity: dimension must be positive");
  LinearMap map;
  map.in_dim = map.out_dim = n;
  map.forward = [](const Vector& x) { return x; };
  map.adjoint = [](const Vector& x) { return x; };
  map.norm_sq_bound = 1.0;
  return map;
}

inline LinearMap make_diagonal(Vector d) {
  if (d.size() < 1) throw std::invalid_argument("make_diagonal: empty diagonal");
  auto diag = std::make_shared<const Vector>(std::move(d));
  LinearMap map;
  map.in_dim = map.out_dim = diag->size();
  map.forward = [diag](const Vector& x) { return Vector(diag->cwiseProduct(x)); };
  map.adjoint = map.forward;
  map.norm_sq_bound = diag->cwiseAbs().maxCoeff();
  map.norm_sq_bound *= map.norm_sq_bound;
  return map;
}

/// Dense matrix-backed map. The stored norm bound is the Schur bound
/// ‖M‖₁‖M‖∞ ≥ ‖M‖₂², valid but not tight; callers needing a sharp value
/// should replace it with a power-iteration estimate.
inline LinearMap make_dense(Matrix m) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw std::invalid_argument("make_dense: empty matrix");
  }
  auto mat = std::make_shared<const Matrix>(std::move(m));
  LinearMap map;
  map.in_dim = mat->cols();
  map.out_dim = mat->rows();
  map.forward = [mat](const Vector& x) { return Vector(*mat * x); };
  map.adjoint = [mat](const Vector& y) { return Vector(mat->transpose() * y); };
  const double col_abs_max = mat->cwiseAbs().colwise().sum().maxCoeff();
  const double row_abs_max = mat->cwiseAbs().rowwise().sum().maxCoeff();
  map.norm_sq_bound = col_abs_max * row_abs_max;
  return map;
}

/// 2-D Gaussian lowpass convolution on row-major rows×cols images with
/// reflexive (half-sample symmetric) boundary handling. The kernel
/// h(i,j) ∝ exp(−(i²+j²)/(2·std²)) is truncated to filter_size×filter_size
/// and normalized to sum 1, so the map is self-adjoint with ‖A‖² = 1.
inline LinearMap make_gaussian_blur(int filter_size, double std, Index rows,
                                    Index cols) {
  if (filter_size < 1 || filter_size % 2 == 0) {
    throw std::invalid_argument("make_gaussian_blur: filter_size must be odd and positive");
  }
  if (!(std > 0.0)) {
    throw std::invalid_argument("make_gaussian_blur: std must be positive");
  }
  if (rows < 1 || cols < 1 || filter_size > std::min(rows, cols)) {
    throw std::invalid_argument("make_gaussian_blur: filter_size exceeds image size");
  }
  const Index radius = (filter_size - 1) / 2;
  Vector kernel(filter_size);
  for (Index t = -radius; t <= radius; ++t) {
    kernel[t + radius] = std::exp(-static_cast<double>(t * t) / (2.0 * std * std));
  }
  kernel /= kernel.sum();
  auto k = std::make_shared<const Vector>(std::move(kernel));
  LinearMap map;
  map.in_dim = map.out_dim = rows * cols;
  map.forward = [k, rows, cols](const Vector& x) {
    return detail::conv2_symmetric(*k, rows, cols, x);
  };
  map.adjoint = map.forward;  // symmetric kernel + reflexive padding
  map.norm_sq_bound = 1.0;
  return map;
}

/// Orthonormal separable 2-D Haar transform with `levels` recursive
/// decompositions of the low-pass band. Adjoint equals the inverse.
inline LinearMap make_haar_dwt(int levels, Index rows, Index cols) {
  if (levels < 1) throw std::invalid_argument("make_haar_dwt: levels must be positive");
  const Index block = Index{1} << levels;
  if (rows < 1 || cols < 1 || rows % block != 0 || cols % block != 0) {
    throw std::invalid_argument("make_haar_dwt: rows and cols must be divisible by 2^levels");
  }
  LinearMap map;
  map.in_dim = map.out_dim = rows * cols;
  map.forward = [rows, cols, levels](const Vector& x) {
    Vector a = x;
    detail::haar2_forward(rows, cols, levels, a);
    return a;
  };
  map.adjoint = [rows, cols, levels](const Vector& y) {
    Vector a = y;
    detail::haar2_inverse(rows, cols, levels, a);
    return a;
  };
  map.norm_sq_bound = 1.0;
  return map;
}

struct NormEstimate {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Power iteration on K*K. Returns an estimate of ‖K‖² that is within
/// tol·‖K‖² for generic seeded starting vectors; non-convergence within
/// max_iter is reported through the flag, never thrown.
inline NormEstimate estimate_norm(const LinearMap& op, double tol = 1e-6,
                                  int max_iter = 1000, std::uint64_t seed = 12345) {
  if (!(tol > 0.0)) throw std::invalid_argument("estimate_norm: tol must be positive");
  if (max_iter < 1) throw std::invalid_argument("estimate_norm: max_iter must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(op.in_dim);
  for (Index i = 0; i < v.size(); ++i) v[i] = gauss(rng);
  const double v0 = v.norm();
  if (v0 == 0.0) v.setOnes();
  v /= v.norm();

  NormEstimate est;
  double lambda = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const Vector w = op.adjoint(op.forward(v));
    const double lambda_new = std::max(0.0, v.dot(w));
    const double wn = w.norm();
    est.iterations = it;
    if (wn == 0.0) {  // v in the null space of K*K: operator norm is 0 along it
      est.value = 0.0;
      est.converged = true;
      return est;
    }
    v = w / wn;
    if (it > 1 && std::abs(lambda_new - lambda) <= tol * std::max(lambda_new, 1e-300)) {
      est.value = lambda_new;
      est.converged = true;
      return est;
    }
    lambda = lambda_new;
  }
  est.value = lambda;
  est.converged = false;
  return est;
}

/// Dense Gram matrix of the Gaussian kernel κ(x,y) = exp(−‖x−y‖²/(2σ²))
/// over the given points. Self-adjoint; the norm bound is a power-iteration
/// estimate inflated slightly so it stays a true upper bound.
inline LinearMap make_gram(double kernel_std, const std::vector<Vector>& points) {
  if (points.empty()) throw std::invalid_argument("make_gram: empty point list");
  if (!(kernel_std > 0.0)) throw std::invalid_argument("make_gram: kernel_std must be positive");
  const Index n = static_cast<Index>(points.size());
  const Index d = points.front().size();
  for (const auto& p : points) {
    if (p.size() != d) throw std::invalid_argument("make_gram: points must share one dimension");
  }
  Matrix gram(n, n);
  const double denom = 2.0 * kernel_std * kernel_std;
  for (Index i = 0; i < n; ++i) {
    gram(i, i) = 1.0;
    for (Index j = i + 1; j < n; ++j) {
      const double k = std::exp(-(points[i] - points[j]).squaredNorm() / denom);
      gram(i, j) = k;
      gram(j, i) = k;
    }
  }
  LinearMap map = make_dense(std::move(gram));
  const NormEstimate est = estimate_norm(map, 1e-8, 5000);
  // power iteration approaches the top eigenvalue from below; inflate the
  // estimate so the stored value stays a genuine upper bound
  map.norm_sq_bound = est.value * (1.0 + 1e-4);
  return map;
}

/// Product-space concatenation of operators sharing one domain:
/// forward stacks the part outputs, adjoint sums the part adjoints over the
/// corresponding slices, and the norm bound is the sum of part bounds.
struct StackedMap {
  std::vector<LinearMap> parts;
  Index in_dim = 0;
  Index out_dim = 0;
  double norm_sq_bound = 0.0;

  Vector forward(const Vector& x) const {
    Vector out(out_dim);
    Index offset = 0;
    for (const auto& p : parts) {
      out.segment(offset, p.out_dim) = p.forward(x);
      offset += p.out_dim;
    }
    return out;
  }

  Vector adjoint(const Vector& y) const {
    Vector out = Vector::Zero(in_dim);
    Index offset = 0;
    for (const auto& p : parts) {
      out += p.adjoint(y.segment(offset, p.out_dim));
      offset += p.out_dim;
    }
    return out;
  }
};

inline StackedMap stack(std::vector<LinearMap> ops) {
  if (ops.empty()) throw std::invalid_argument("stack: need at least one operator");
  StackedMap s;
  s.in_dim = ops.front().in_dim;
  for (const auto& op : ops) {
    if (op.in_dim != s.in_dim) {
      throw std::invalid_argument("stack: operators must share in_dim");
    }
    s.out_dim += op.out_dim;
    s.norm_sq_bound += op.norm_sq_bound;
  }
  s.parts = std::move(ops);
  return s;
}

inline LinearMap as_linear_map(StackedMap s) {
  auto shared = std::make_shared<const StackedMap>(std::move(s));
  LinearMap map;
  map.in_dim = shared->in_dim;
  map.out_dim = shared->out_dim;
  map.forward = [shared](const Vector& x) { return shared->forward(x); };
  map.adjoint = [shared](const Vector& y) { return shared->adjoint(y); };
  map.norm_sq_bound = shared->norm_sq_bound;
  return map;
}

}  // namespace moreau
