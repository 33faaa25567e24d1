#pragma once

// Benchmark harnesses.
//
// Deblurring: min ‖Ax−b‖₁ + λ‖Wx‖₁ over row-major images, where A is a 9×9
// Gaussian blur (std 4, reflexive boundaries) and W the 4-level orthonormal
// Haar transform. Solved with the mu-only variable schedule μ_k = 1/(ak)
// from x₀ = b; restoration quality is tracked as ISNR.
//
// Kernel SVM: min ½cᵀKc + C·Σᵢ max(1 − (Kc)ᵢYᵢ, 0) over the coefficients of
// a Gaussian-kernel expansion, trained with the same schedule from c₀ = 0,
// evaluated by k-fold cross-validation. A seeded two-blob generator stands
// in for external data.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "moreau/linops.hpp"
#include "moreau/prox.hpp"
#include "moreau/smoothing.hpp"
#include "moreau/solvers.hpp"

namespace moreau {

inline constexpr int kBlurFilterSize = 9;
inline constexpr double kBlurStd = 4.0;
inline constexpr int kHaarLevels = 4;

/// image + N(0, std²) per pixel, seeded; no clipping.
inline Vector add_gaussian_noise(const Vector& image, double std, std::uint64_t seed) {
  if (std < 0.0) throw std::invalid_argument("add_gaussian_noise: std must be nonnegative");
  if (std == 0.0) return image;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std);
  Vector out = image;
  for (Index i = 0; i < out.size(); ++i) out[i] += gauss(rng);
  return out;
}

/// Improvement in signal-to-noise ratio, 10·log₁₀(‖x−b‖²/‖x−x_k‖²) dB.
/// Returns +inf when the estimate matches the original exactly.
inline double isnr(const Vector& original, const Vector& observed, const Vector& estimate) {
  if (original.size() != observed.size() || original.size() != estimate.size()) {
    throw std::invalid_argument("isnr: dimension mismatch");
  }
  const double err = (original - estimate).squaredNorm();
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10((original - observed).squaredNorm() / err);
}

struct DeblurInstance {
  Vector original;  // clean image, values in [0,1]
  Vector observed;  // blur(original) + noise
  Index rows = 0;
  Index cols = 0;
  double lambda = 0.0;
  double noise_std = 0.0;
  std::uint64_t seed = 0;
};

/// Blurs the clean image with the benchmark operator and adds seeded noise.
inline DeblurInstance make_deblur_instance(Vector original, Index rows, Index cols,
                                           double lambda, double noise_std,
                                           std::uint64_t seed) {
  if (original.size() != rows * cols) {
    throw std::invalid_argument("make_deblur_instance: image size does not match dimensions");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("make_deblur_instance: lambda must be positive");
  const LinearMap blur = make_gaussian_blur(kBlurFilterSize, kBlurStd, rows, cols);
  DeblurInstance inst;
  inst.observed = add_gaussian_noise(blur.forward(original), noise_std, seed);
  inst.original = std::move(original);
  inst.rows = rows;
  inst.cols = cols;
  inst.lambda = lambda;
  inst.noise_std = noise_std;
  inst.seed = seed;
  return inst;
}

inline CompositeProblem make_deblur_problem(const DeblurInstance& inst) {
  const Index n = inst.rows * inst.cols;
  std::vector<CompositeTerm> terms;
  terms.push_back({catalog_l1_deviation(inst.observed),
                   make_gaussian_blur(kBlurFilterSize, kBlurStd, inst.rows, inst.cols)});
  terms.push_back({catalog_scaled_l1(inst.lambda, n),
                   make_haar_dwt(kHaarLevels, inst.rows, inst.cols)});
  return make_problem(catalog_zero(n), std::move(terms));
}

/// ‖Ax−b‖₁ + λ‖Wx‖₁ evaluated exactly.
inline double deblur_true_objective(const DeblurInstance& inst, const Vector& x) {
  return true_value(make_deblur_problem(inst), x);
}

/// Runs the deblurring scheme with μ_k = 1/(ak) from x₀ = b, logging the
/// exact objective and ISNR each recorded iteration.
inline RunReport run_deblur(const DeblurInstance& inst, double a, int iters,
                            int log_every = 1) {
  if (!(a > 0.0)) throw std::invalid_argument("run_deblur: a must be positive");
  const Index block = Index{1} << kHaarLevels;
  if (inst.rows % block != 0 || inst.cols % block != 0) {
    throw std::invalid_argument("run_deblur: image dimensions must be divisible by 16");
  }
  const CompositeProblem problem = make_deblur_problem(inst);
  RunOptions opt;
  opt.log_every = log_every;
  opt.observer = [&inst](int, const Vector& x, IterationRecord& rec) {
    rec.isnr = isnr(inst.original, inst.observed, x);
  };
  return run(problem, VariableSmoothFSchedule{a}, inst.observed, iters, opt);
}

/// Built-in piecewise-constant test image (geometric shapes on a flat
/// background) so the deblurring pipeline runs without external assets.
inline Vector make_phantom(Index rows, Index cols) {
  if (rows < 32 || cols < 32) throw std::invalid_argument("make_phantom: image too small");
  Vector img = Vector::Constant(rows * cols, 0.15);
  auto at = [&](Index i, Index j) -> double& { return img[i * cols + j]; };
  // bright rectangle
  for (Index i = rows / 8; i < rows * 4 / 9; ++i) {
    for (Index j = cols / 10; j < cols * 4 / 9; ++j) at(i, j) = 0.85;
  }
  // mid-gray disc
  const double ci = rows * 0.66, cj = cols * 0.35, r = std::min(rows, cols) * 0.16;
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const double di = i - ci, dj = j - cj;
      if (di * di + dj * dj <= r * r) at(i, j) = 0.55;
    }
  }
  // bright horizontal bar and dark vertical bar
  for (Index i = rows * 3 / 4; i < rows * 3 / 4 + std::max<Index>(2, rows / 32); ++i) {
    for (Index j = cols / 16; j < cols * 15 / 16; ++j) at(i, j) = 0.95;
  }
  for (Index j = cols * 2 / 3; j < cols * 2 / 3 + std::max<Index>(2, cols / 32); ++j) {
    for (Index i = rows / 8; i < rows / 2; ++i) at(i, j) = 0.05;
  }
  // small dot grid for fine detail
  for (Index bi = 0; bi < 4; ++bi) {
    for (Index bj = 0; bj < 4; ++bj) {
      const Index i0 = rows / 2 + bi * rows / 16;
      const Index j0 = cols / 2 + bj * cols / 16;
      for (Index i = i0; i < std::min(rows, i0 + 2); ++i) {
        for (Index j = j0; j < std::min(cols, j0 + 2); ++j) at(i, j) = 1.0;
      }
    }
  }
  return img;
}

struct SvmDataset {
  std::vector<Vector> points;
  std::vector<int> labels;  // +1 / -1
  double kernel_std = 0.5;
  double C = 100.0;
};

struct ClassifierModel {
  Vector coefficients;
  std::vector<Vector> points;
  double kernel_std = 0.5;
};

namespace detail {

inline void check_dataset(const SvmDataset& ds, const char* who) {
  if (ds.points.empty() || ds.points.size() != ds.labels.size()) {
    throw std::invalid_argument(std::string(who) + ": dataset points/labels mismatch or empty");
  }
  for (int y : ds.labels) {
    if (y != 1 && y != -1) throw std::invalid_argument(std::string(who) + ": labels must be +1/-1");
  }
  if (!(ds.kernel_std > 0.0) || !(ds.C > 0.0)) {
    throw std::invalid_argument(std::string(who) + ": kernel_std and C must be positive");
  }
}

}  // namespace detail

inline CompositeProblem make_svm_problem(const SvmDataset& ds) {
  detail::check_dataset(ds, "make_svm_problem");
  const LinearMap gram = make_gram(ds.kernel_std, ds.points);
  std::vector<CompositeTerm> terms;
  terms.push_back({catalog_hinge(ds.labels, ds.C), gram});
  return make_problem(catalog_quadratic_form(gram), std::move(terms));
}

/// Trains the kernel expansion coefficients with μ_k = 1/(ak) from c₀ = 0
/// for a fixed iteration budget.
inline ClassifierModel train_svm(const SvmDataset& ds, double a, int iters,
                                 int log_every = 0, RunReport* report_out = nullptr) {
  if (!(a > 0.0)) throw std::invalid_argument("train_svm: a must be positive");
  const CompositeProblem problem = make_svm_problem(ds);
  RunOptions opt;
  opt.log_every = log_every > 0 ? log_every : iters;  // thin by default: CV needs no curves
  RunReport report = run(problem, VariableSmoothFSchedule{a},
                         Vector::Zero(static_cast<Index>(ds.points.size())), iters, opt);
  if (report.failed || !report.final_x.allFinite()) {
    throw std::runtime_error("train_svm: training diverged (" + report.failure_reason + ")");
  }
  ClassifierModel model;
  model.coefficients = report.final_x;
  model.points = ds.points;
  model.kernel_std = ds.kernel_std;
  if (report_out) *report_out = std::move(report);
  return model;
}

/// sign(Σⱼ cⱼ κ(q, Xⱼ)) with sign(0) = +1.
inline std::vector<int> predict(const ClassifierModel& m, const std::vector<Vector>& queries) {
  const double denom = 2.0 * m.kernel_std * m.kernel_std;
  std::vector<int> labels;
  labels.reserve(queries.size());
  for (const auto& q : queries) {
    double score = 0.0;
    for (std::size_t j = 0; j < m.points.size(); ++j) {
      score += m.coefficients[static_cast<Index>(j)] *
               std::exp(-(q - m.points[j]).squaredNorm() / denom);
    }
    labels.push_back(score < 0.0 ? -1 : 1);
  }
  return labels;
}

/// Seeded shuffle, near-equal folds (remainder spread over the first folds),
/// mean misclassification percentage across folds.
inline double kfold_cv(const SvmDataset& ds, int folds, double a, int iters,
                       std::uint64_t seed) {
  detail::check_dataset(ds, "kfold_cv");
  const std::size_t n = ds.points.size();
  if (folds < 2) throw std::invalid_argument("kfold_cv: need at least 2 folds");
  if (static_cast<std::size_t>(folds) > n) {
    throw std::invalid_argument("kfold_cv: more folds than samples");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  double error_sum = 0.0;
  std::size_t cursor = 0;
  for (int f = 0; f < folds; ++f) {
    const std::size_t size = n / folds + (static_cast<std::size_t>(f) < n % folds ? 1 : 0);
    const std::size_t begin = cursor;
    cursor += size;

    SvmDataset train{{}, {}, ds.kernel_std, ds.C};
    std::vector<Vector> test_points;
    std::vector<int> test_labels;
    for (std::size_t pos = 0; pos < n; ++pos) {
      const std::size_t idx = order[pos];
      if (pos >= begin && pos < begin + size) {
        test_points.push_back(ds.points[idx]);
        test_labels.push_back(ds.labels[idx]);
      } else {
        train.points.push_back(ds.points[idx]);
        train.labels.push_back(ds.labels[idx]);
      }
    }
    const ClassifierModel model = train_svm(train, a, iters);
    const std::vector<int> predicted = predict(model, test_points);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      if (predicted[i] != test_labels[i]) ++wrong;
    }
    error_sum += 100.0 * static_cast<double>(wrong) / static_cast<double>(test_points.size());
  }
  return error_sum / folds;
}

/// Two seeded Gaussian clouds at ±(center_dist/2)·1 with labels ±1, then the
/// whole dataset is divided by the root mean squared point norm.
inline SvmDataset make_blobs(int n_per_class, int d, double center_dist, double std,
                             std::uint64_t seed, double kernel_std = 0.5, double C = 100.0) {
  if (n_per_class < 1 || d < 1) throw std::invalid_argument("make_blobs: bad sizes");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std);
  SvmDataset ds;
  ds.kernel_std = kernel_std;
  ds.C = C;
  const Vector center = Vector::Constant(d, center_dist / 2.0);
  for (int cls = 0; cls < 2; ++cls) {
    const double sign = cls == 0 ? 1.0 : -1.0;
    for (int i = 0; i < n_per_class; ++i) {
      Vector p(d);
      for (int j = 0; j < d; ++j) p[j] = gauss(rng);
      ds.points.push_back(sign * center + p);
      ds.labels.push_back(cls == 0 ? 1 : -1);
    }
  }
  double mean_sq = 0.0;
  for (const auto& p : ds.points) mean_sq += p.squaredNorm();
  mean_sq /= static_cast<double>(ds.points.size());
  const double scale = 1.0 / std::sqrt(mean_sq);
  for (auto& p : ds.points) p *= scale;
  return ds;
}

}  // namespace moreau
