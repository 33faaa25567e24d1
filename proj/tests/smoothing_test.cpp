#include "moreau/smoothing.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"

using namespace moreau;

namespace {

Matrix random_matrix(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> gauss(0.0, 0.7);
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) m(i, j) = gauss(rng);
  }
  return m;
}

// Random composite problem on R^20 with 1-3 terms from the catalog.
CompositeProblem random_problem(std::mt19937_64& rng, bool smooth_f) {
  const Index n = 20;
  std::uniform_int_distribution<int> term_count(1, 3);
  std::uniform_int_distribution<int> kind(0, 2);
  std::vector<CompositeTerm> terms;
  const int m = term_count(rng);
  for (int t = 0; t < m; ++t) {
    LinearMap op;
    switch (kind(rng)) {
      case 0:
        op = make_identity(n);
        break;
      case 1:
        op = make_diagonal(oracles::random_vector(rng, n));
        break;
      default:
        op = make_dense(random_matrix(rng, 12, n));
        break;
    }
    if (kind(rng) == 0) {
      terms.push_back({catalog_scaled_l1(0.3 + std::abs(oracles::random_vector(rng, 1)[0]),
                                         op.out_dim),
                       std::move(op)});
    } else {
      terms.push_back(
          {catalog_l1_deviation(oracles::random_vector(rng, op.out_dim)), std::move(op)});
    }
  }
  if (smooth_f) {
    return make_problem(catalog_zero(n), std::move(terms));
  }
  return make_problem(catalog_l1_deviation(oracles::random_vector(rng, n)), std::move(terms));
}

SmoothingParams random_params(std::mt19937_64& rng, bool smooth_f) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  SmoothingParams s;
  if (!smooth_f) s.rho = u(rng);
  s.mu = u(rng);
  return s;
}

}  // namespace

TEST(SmoothingTest, TrivialZeroProblem) {
  const Index n = 4;
  std::vector<CompositeTerm> terms;
  terms.push_back({catalog_scaled_l1(0.5, n), make_identity(n)});
  const CompositeProblem p = make_problem(catalog_zero(n), std::move(terms));
  const SmoothingParams s{std::nullopt, 0.3};
  EXPECT_DOUBLE_EQ(smoothed_value(p, s, Vector::Zero(n)), 0.0);
  EXPECT_TRUE(
      oracles::bitwise_equal(smoothed_gradient(p, s, Vector::Zero(n)), Vector::Zero(n)));
}

TEST(SmoothingTest, TinyMuApproachesTrueValue) {
  std::mt19937_64 rng(41);
  const CompositeProblem p = random_problem(rng, true);
  const SmoothingParams s{std::nullopt, 1e-12};
  const Vector x = oracles::random_vector(rng, 20);
  const double gap = gap_bound(p, s);
  const double f_true = true_value(p, x);
  const double f_smooth = smoothed_value(p, s, x);
  EXPECT_LE(f_smooth, f_true + 1e-10);
  EXPECT_LE(f_true, f_smooth + gap + 1e-10);
}

TEST(SmoothingTest, ScalarHuberValue) {
  // f = 0, g = |.|, K = id, mu = 1, x = 2: the smoothed objective is the
  // Huber value 1.5
  std::vector<CompositeTerm> terms;
  terms.push_back({catalog_scaled_l1(1.0, 1), make_identity(1)});
  const CompositeProblem p = make_problem(catalog_zero(1), std::move(terms));
  Vector x(1);
  x << 2.0;
  const double oracle = oracles::grid_min_value(
      [](double y) { return std::abs(y) + (2.0 - y) * (2.0 - y) / 2.0; }, -10.0, 10.0);
  EXPECT_NEAR(smoothed_value(p, {std::nullopt, 1.0}, x), oracle, 1e-8);
  EXPECT_NEAR(smoothed_value(p, {std::nullopt, 1.0}, x), 1.5, 1e-12);
}

TEST(SmoothingTest, GradientZeroAtSmoothedMinimizer) {
  std::vector<CompositeTerm> terms;
  terms.push_back({catalog_scaled_l1(1.0, 3), make_identity(3)});
  const CompositeProblem p = make_problem(catalog_zero(3), std::move(terms));
  EXPECT_TRUE(oracles::bitwise_equal(smoothed_gradient(p, {std::nullopt, 1.0}, Vector::Zero(3)),
                                     Vector::Zero(3)));
}

TEST(SmoothingTest, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const bool smooth_f = trial % 2 == 0;
    const CompositeProblem p = random_problem(rng, smooth_f);
    const SmoothingParams s = random_params(rng, smooth_f);
    const Vector x = oracles::random_vector(rng, 20);
    const Vector grad = smoothed_gradient(p, s, x);
    const Vector fd = oracles::finite_diff_grad(
        [&](const Vector& z) { return smoothed_value(p, s, z); }, x);
    EXPECT_LT((grad - fd).norm(), 1e-5 * (1.0 + grad.norm()));
  }
}

TEST(SmoothingTest, DeblurFormGradient) {
  // gradient = A P_box1((Ax-b)/mu) + W P_boxLambda(Wx/mu) on a small image
  const Index rows = 16, cols = 16, n = rows * cols;
  const double lambda = 2e-5, mu = 0.37;
  std::mt19937_64 rng(43);
  const Vector b = oracles::random_vector(rng, n);
  const LinearMap blur = make_gaussian_blur(9, 4.0, rows, cols);
  const LinearMap haar = make_haar_dwt(4, rows, cols);

  std::vector<CompositeTerm> terms;
  terms.push_back({catalog_l1_deviation(b), blur});
  terms.push_back({catalog_scaled_l1(lambda, n), haar});
  const CompositeProblem p = make_problem(catalog_zero(n), std::move(terms));

  const Vector x = oracles::random_vector(rng, n);
  const Vector lhs = smoothed_gradient(p, {std::nullopt, mu}, x);
  const Vector proj1 = ((blur.forward(x) - b) / mu).cwiseMax(-1.0).cwiseMin(1.0);
  const Vector proj2 = (haar.forward(x) / mu).cwiseMax(-lambda).cwiseMin(lambda);
  const Vector rhs = blur.adjoint(proj1) + haar.adjoint(proj2);
  EXPECT_LT((lhs - rhs).lpNorm<Eigen::Infinity>(), 1e-14);
}

TEST(SmoothingTest, LipschitzConstantFormulas) {
  // deblur shape: two unit-norm operators, mu_k = 1/(a k) gives L_k = 2 a k
  const Index n = 16 * 16;
  std::vector<CompositeTerm> terms;
  terms.push_back({catalog_l1_deviation(Vector::Zero(n)), make_gaussian_blur(9, 4.0, 16, 16)});
  terms.push_back({catalog_scaled_l1(1.0, n), make_haar_dwt(4, 16, 16)});
  const CompositeProblem deblur = make_problem(catalog_zero(n), std::move(terms));
  const double a = 0.1;
  for (int k = 1; k <= 5; ++k) {
    EXPECT_DOUBLE_EQ(lipschitz_of_smoothed(deblur, {std::nullopt, 1.0 / (a * k)}),
                     2.0 * a * k);
  }

  // svm shape: L_k = |K| + a k |K|^2
  std::mt19937_64 rng(44);
  std::vector<Vector> pts;
  for (int i = 0; i < 5; ++i) pts.push_back(oracles::random_vector(rng, 2));
  const LinearMap gram = make_gram(0.5, pts);
  std::vector<CompositeTerm> sterms;
  sterms.push_back({catalog_hinge({1, -1, 1, -1, 1}, 10.0), gram});
  const CompositeProblem svm = make_problem(catalog_quadratic_form(gram), std::move(sterms));
  const double norm_k = std::sqrt(gram.norm_sq_bound);
  for (int k = 1; k <= 5; ++k) {
    EXPECT_NEAR(lipschitz_of_smoothed(svm, {std::nullopt, 1.0 / (a * k)}),
                norm_k + a * k * norm_k * norm_k, 1e-12);
  }

  // rho = mu = 1 with a single unit-norm operator in Lipschitz mode gives 2
  std::vector<CompositeTerm> lterms;
  lterms.push_back({catalog_scaled_l1(1.0, 4), make_identity(4)});
  const CompositeProblem lip =
      make_problem(catalog_l1_deviation(Vector::Zero(4)), std::move(lterms));
  EXPECT_DOUBLE_EQ(lipschitz_of_smoothed(lip, {1.0, 1.0}), 2.0);
}

TEST(SmoothingTest, GapBoundExamples) {
  std::vector<CompositeTerm> terms;
  terms.push_back({catalog_scaled_l1(1.0, 1), make_identity(1)});
  const CompositeProblem p = make_problem(catalog_zero(1), std::move(terms));
  EXPECT_DOUBLE_EQ(gap_bound(p, {std::nullopt, 2.0}), 1.0);
  EXPECT_NEAR(gap_bound(p, {std::nullopt, 1e-14}), 0.0, 1e-13);

  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 5; ++trial) {
    const bool smooth_f = trial % 2 == 0;
    const CompositeProblem q = random_problem(rng, smooth_f);
    const SmoothingParams s = random_params(rng, smooth_f);
    const double gap = gap_bound(q, s);
    for (int t = 0; t < 200; ++t) {
      const Vector x = oracles::random_vector(rng, 20, 2.0);
      const double diff = true_value(q, x) - smoothed_value(q, s, x);
      EXPECT_GE(diff, -1e-10);
      EXPECT_LE(diff, gap + 1e-10);
    }
  }
}

TEST(SmoothingTest, SandwichAcrossParameters) {
  std::mt19937_64 rng(46);
  for (int trial = 0; trial < 10; ++trial) {
    const bool smooth_f = trial % 2 == 0;
    const CompositeProblem p = random_problem(rng, smooth_f);
    std::uniform_real_distribution<double> u(0.05, 1.0);
    for (int t = 0; t < 100; ++t) {
      const double mu1 = u(rng);
      const double mu2 = mu1 + u(rng);
      SmoothingParams s1{std::nullopt, mu1}, s2{std::nullopt, mu2};
      double f_slack = 0.0;
      if (!smooth_f) {
        const double rho1 = u(rng);
        const double rho2 = rho1 + u(rng);
        s1.rho = rho1;
        s2.rho = rho2;
        f_slack = (rho2 - rho1) * p.f_lipschitz() * p.f_lipschitz() / 2.0;
      }
      const Vector x = oracles::random_vector(rng, 20, 2.0);
      const double v1 = smoothed_value(p, s1, x);
      const double v2 = smoothed_value(p, s2, x);
      const double g_slack = (mu2 - mu1) * p.l_g_sq_total() / 2.0;
      EXPECT_LE(v2, v1 + 1e-10);
      EXPECT_LE(v1, v2 + f_slack + g_slack + 1e-10);
    }
  }
}

TEST(SmoothingTest, GradientIsLipschitz) {
  std::mt19937_64 rng(47);
  for (int trial = 0; trial < 10; ++trial) {
    const bool smooth_f = trial % 2 == 0;
    const CompositeProblem p = random_problem(rng, smooth_f);
    const SmoothingParams s = random_params(rng, smooth_f);
    const double lip = lipschitz_of_smoothed(p, s);
    for (int t = 0; t < 50; ++t) {
      const Vector x = oracles::random_vector(rng, 20, 2.0);
      const Vector y = oracles::random_vector(rng, 20, 2.0);
      const double lhs = (smoothed_gradient(p, s, x) - smoothed_gradient(p, s, y)).norm();
      EXPECT_LE(lhs, lip * (x - y).norm() * (1.0 + 1e-10) + 1e-12);
    }
  }
}

TEST(SmoothingTest, TermLoopMatchesExplicitStack) {
  std::mt19937_64 rng(48);
  const Index n = 12;
  Vector b1 = oracles::random_vector(rng, n);
  Vector b2 = oracles::random_vector(rng, 8);
  LinearMap op1 = make_diagonal(oracles::random_vector(rng, n));
  LinearMap op2 = make_dense(random_matrix(rng, 8, n));

  std::vector<CompositeTerm> terms;
  terms.push_back({catalog_l1_deviation(b1), op1});
  terms.push_back({catalog_l1_deviation(b2), op2});
  const CompositeProblem by_terms = make_problem(catalog_zero(n), std::move(terms));

  std::vector<CompositeTerm> stacked;
  stacked.push_back({concat({catalog_l1_deviation(b1), catalog_l1_deviation(b2)}),
                     as_linear_map(stack({op1, op2}))});
  const CompositeProblem by_stack = make_problem(catalog_zero(n), std::move(stacked));

  for (int t = 0; t < 50; ++t) {
    const Vector x = oracles::random_vector(rng, n, 2.0);
    const SmoothingParams s{std::nullopt, 0.3};
    EXPECT_NEAR(smoothed_value(by_terms, s, x), smoothed_value(by_stack, s, x), 1e-12);
    EXPECT_LT((smoothed_gradient(by_terms, s, x) - smoothed_gradient(by_stack, s, x))
                  .lpNorm<Eigen::Infinity>(),
              1e-12);
    EXPECT_NEAR(true_value(by_terms, x), true_value(by_stack, x), 1e-12);
  }
  EXPECT_DOUBLE_EQ(by_terms.k_norm_sq_total(), by_stack.k_norm_sq_total());
  EXPECT_NEAR(by_terms.l_g_sq_total(), by_stack.l_g_sq_total(), 1e-12);
}

TEST(SmoothingTest, ParameterModeValidation) {
  std::vector<CompositeTerm> terms;
  terms.push_back({catalog_scaled_l1(1.0, 2), make_identity(2)});
  const CompositeProblem smooth = make_problem(catalog_zero(2), std::move(terms));
  EXPECT_THROW(smoothed_value(smooth, {1.0, 1.0}, Vector::Zero(2)), std::invalid_argument);
  EXPECT_THROW(smoothed_value(smooth, {std::nullopt, 0.0}, Vector::Zero(2)),
               std::invalid_argument);

  std::vector<CompositeTerm> terms2;
  terms2.push_back({catalog_scaled_l1(1.0, 2), make_identity(2)});
  const CompositeProblem lip =
      make_problem(catalog_l1_deviation(Vector::Zero(2)), std::move(terms2));
  EXPECT_THROW(smoothed_value(lip, {std::nullopt, 1.0}, Vector::Zero(2)),
               std::invalid_argument);
  EXPECT_THROW(smoothed_gradient(lip, {0.0, 1.0}, Vector::Zero(2)), std::invalid_argument);
}

TEST(SmoothingTest, ProblemValidation) {
  EXPECT_THROW(make_problem(catalog_zero(3), {}), std::invalid_argument);

  std::vector<CompositeTerm> bad_dim;
  bad_dim.push_back({catalog_scaled_l1(1.0, 4), make_identity(3)});
  EXPECT_THROW(make_problem(catalog_zero(3), std::move(bad_dim)), std::invalid_argument);

  std::vector<CompositeTerm> bad_in;
  bad_in.push_back({catalog_scaled_l1(1.0, 3), make_identity(3)});
  EXPECT_THROW(make_problem(catalog_zero(4), std::move(bad_in)), std::invalid_argument);
}
