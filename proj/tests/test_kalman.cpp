#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "smc/error.hpp"
#include "smc/kalman.hpp"
#include "support.hpp"

namespace {

using namespace smc;

GaussianSSM scalar_ssm(double a, double q, double h, double r, double m0, double p0, std::size_t T) {
  GaussianSSM s;
  s.A = Eigen::MatrixXd::Constant(1, 1, a);
  s.H = Eigen::MatrixXd::Constant(1, 1, h);
  s.m0 = Eigen::VectorXd::Constant(1, m0);
  s.P0 = Eigen::MatrixXd::Constant(1, 1, p0);
  s.Q.assign(T - 1, Eigen::MatrixXd::Constant(1, 1, q));
  s.R.assign(T, Eigen::MatrixXd::Constant(1, 1, r));
  return s;
}

std::vector<Eigen::VectorXd> as_vectors(const std::vector<double>& y) {
  std::vector<Eigen::VectorXd> out;
  for (double v : y) out.push_back(Eigen::VectorXd::Constant(1, v));
  return out;
}

double normal_pdf(double x, double m, double v) {
  return std::exp(-0.5 * (x - m) * (x - m) / v) / std::sqrt(2 * std::numbers::pi * v);
}

TEST(Kalman, FirstStepIsConjugateUpdate) {
  const auto y = testing_support::lg_observations();
  const auto k = kalman_filter(scalar_ssm(0.8, 1, 1, 0.5, 0, 1, y.size()), as_vectors(y));
  EXPECT_NEAR(k.steps[0].mean[0], 2.0 / 3.0 * y[0], 1e-15);
  EXPECT_NEAR(k.steps[0].cov(0, 0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(k.steps[0].gain(0, 0), 2.0 / 3.0, 1e-15);
}

TEST(Kalman, MatchesLonghandScalarRecursion) {
  const auto y = testing_support::lg_observations();
  const auto k = kalman_filter(scalar_ssm(0.8, 1, 1, 0.5, 0, 1, y.size()), as_vectors(y));
  const auto ref = testing_support::lg_oracle(y);
  for (std::size_t t = 0; t < y.size(); ++t) {
    EXPECT_NEAR(k.steps[t].mean[0], ref.mean[t], 1e-12);
    EXPECT_NEAR(k.steps[t].cov(0, 0), ref.var[t], 1e-12);
    EXPECT_NEAR(k.steps[t].gain(0, 0), ref.gain[t], 1e-12);
  }
  EXPECT_NEAR(k.log_likelihood, ref.loglik, 1e-12);
}

TEST(Kalman, MatchesGridPosterior) {
  // Filtering densities on a fine grid by direct numerical integration.
  const auto y = testing_support::lg_observations();
  const double lo = -12.0, hi = 12.0, h = 0.004;
  const auto n = static_cast<std::size_t>((hi - lo) / h) + 1;
  std::vector<double> grid(n), f(n), pred(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = lo + h * static_cast<double>(i);
  const auto k = kalman_filter(scalar_ssm(0.8, 1, 1, 0.5, 0, 1, y.size()), as_vectors(y));
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      if (t == 0) {
        pred[i] = normal_pdf(grid[i], 0.0, 1.0);
      } else {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += normal_pdf(grid[i], 0.8 * grid[j], 1.0) * f[j];
        pred[i] = s * h;
      }
    }
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      f[i] = pred[i] * normal_pdf(y[t], grid[i], 0.5);
      z += f[i] * h;
    }
    double m = 0.0, v = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      f[i] /= z;
      m += grid[i] * f[i] * h;
    }
    for (std::size_t i = 0; i < n; ++i) v += (grid[i] - m) * (grid[i] - m) * f[i] * h;
    EXPECT_NEAR(k.steps[t].mean[0], m, 1e-6) << "t=" << t + 1;
    EXPECT_NEAR(k.steps[t].cov(0, 0), v, 1e-6) << "t=" << t + 1;
  }
}

TEST(Kalman, UninformativeObservationsLeavePrior) {
  const std::vector<double> y = {3.0, -2.0, 5.0, 1.0};
  const auto k = kalman_filter(scalar_ssm(0.8, 1, 0, 0.5, 0.5, 1, y.size()), as_vectors(y));
  double m = 0.5, p = 1.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    if (t > 0) {
      m *= 0.8;
      p = 0.64 * p + 1.0;
    }
    EXPECT_NEAR(k.steps[t].mean[0], m, 1e-14);
    EXPECT_NEAR(k.steps[t].cov(0, 0), p, 1e-14);
  }
}

TEST(Kalman, LikelihoodFactorizes) {
  const auto y = testing_support::lg_observations();
  const auto full = kalman_filter(scalar_ssm(0.8, 1, 1, 0.5, 0, 1, y.size()), as_vectors(y));
  double sum = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    sum += full.steps[t].log_likelihood;
    const std::vector<double> prefix(y.begin(), y.begin() + static_cast<long>(t) + 1);
    const auto part = kalman_filter(scalar_ssm(0.8, 1, 1, 0.5, 0, 1, prefix.size()), as_vectors(prefix));
    EXPECT_NEAR(part.log_likelihood, sum, 1e-12);
  }
  EXPECT_EQ(full.log_likelihood, sum);
}

TEST(Kalman, NonPositiveDefiniteFails) {
  const std::vector<double> y = {1.0, 2.0};
  auto s = scalar_ssm(0.8, 1, 1, -2.0, 0, 1, 2);
  EXPECT_THROW(kalman_filter(s, as_vectors(y)), NumericalError);
  EXPECT_THROW(kalman_filter(scalar_ssm(0.8, 1, 1, 0.5, 0, 1, 3), as_vectors(y)), ConfigError);
}

TEST(Kalman, MissingObservationsSkipUpdate) {
  auto y = as_vectors({1.0, 0.0, 2.0});
  y[1] = Eigen::VectorXd(0);
  const auto k = kalman_filter(scalar_ssm(0.8, 1, 1, 0.5, 0, 1, 3), y);
  EXPECT_EQ(k.steps[1].mean[0], k.steps[1].predicted_mean[0]);
  EXPECT_EQ(k.steps[1].log_likelihood, 0.0);
}

TEST(Extract, LinearGaussianModel) {
  const auto m = testing_support::lg_model();
  const auto ex = extract_gaussian(m.graph, m.state, "x");
  ASSERT_TRUE(ex) << ex.mismatch;
  const auto& s = *ex.ssm;
  EXPECT_EQ(s.A(0, 0), 0.8);
  EXPECT_EQ(s.H(0, 0), 1.0);
  EXPECT_EQ(s.Q[0](0, 0), 1.0);
  EXPECT_EQ(s.R[0](0, 0), 0.5);
  EXPECT_EQ(s.m0[0], 0.0);
  EXPECT_EQ(s.P0(0, 0), 1.0);
  EXPECT_EQ(s.time_points(), 10u);
  const auto y = testing_support::lg_observations();
  for (std::size_t t = 0; t < 10; ++t) EXPECT_EQ(ex.y[t][0], y[t]);
}

TEST(Extract, StochasticVolatilityMismatchAtFirstObservation) {
  auto m = testing_support::sv_model();
  Rng rng(1);
  initialize(m.graph, m.state, rng);
  const auto ex = extract_gaussian(m.graph, m.state, "x");
  ASSERT_FALSE(ex);
  ASSERT_TRUE(ex.node);
  EXPECT_EQ(m.graph.node(*ex.node).name, "y[1]");
  EXPECT_NE(ex.mismatch.find("variance"), std::string::npos);
}

TEST(Extract, NonlinearTransitionMismatch) {
  lang::CompileInputs in;
  in.data["y"] = {0.1, 0.2};
  in.latent = {"x"};
  const auto m = testing_support::load(
      "x[1] ~ dnorm(0, 1)\ny[1] ~ dnorm(x[1], 1)\nx[2] ~ dnorm(exp(x[1]), 1)\ny[2] ~ dnorm(x[2], 1)", in);
  const auto ex = extract_gaussian(m.graph, m.state, "x");
  ASSERT_FALSE(ex);
  EXPECT_EQ(m.graph.node(*ex.node).name, "x[2]");
}

TEST(Extract, InitialNodeIsIntegratedOut) {
  lang::CompileInputs in;
  in.data["y"] = {0.4, -0.3};
  in.latent = {"x"};
  const auto m = testing_support::load(
      "x0 ~ dnorm(1, var = 2)\nx[1] ~ dnorm(.5 * x0 + 3, var = 1)\ny[1] ~ dnorm(2 * x[1] - 1, sd = 2)\n"
      "x[2] ~ dnorm(.5 * x[1] + 3, var = 1)\ny[2] ~ dnorm(2 * x[2] - 1, sd = 2)",
      in);
  const auto ex = extract_gaussian(m.graph, m.state, "x");
  ASSERT_TRUE(ex) << ex.mismatch;
  EXPECT_DOUBLE_EQ(ex.ssm->m0[0], 3.5);
  EXPECT_DOUBLE_EQ(ex.ssm->P0(0, 0), 1.5);
  EXPECT_DOUBLE_EQ(ex.ssm->c[0][0], 3.0);
  EXPECT_DOUBLE_EQ(ex.ssm->d[1][0], -1.0);
  EXPECT_DOUBLE_EQ(ex.ssm->H(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(ex.ssm->R[0](0, 0), 4.0);
}

TEST(Extract, HeldInitialNodeStaysFixed) {
  lang::CompileInputs in;
  in.data["y"] = {0.4, -0.3};
  in.inits["mu"] = 1.5;
  in.latent = {"x"};
  const auto m = testing_support::load(
      "mu ~ dnorm(0, var = 1)\nx[1] ~ dnorm(mu, var = 2)\ny[1] ~ dnorm(x[1], 1)\n"
      "x[2] ~ dnorm(x[1], 1)\ny[2] ~ dnorm(x[2], 1)",
      in);
  const auto integrated = extract_gaussian(m.graph, m.state, "x");
  ASSERT_TRUE(integrated);
  EXPECT_EQ(integrated.ssm->m0[0], 0.0);
  EXPECT_EQ(integrated.ssm->P0(0, 0), 3.0);
  const NodeId held[] = {m.graph.at("mu")};
  const auto fixed = extract_gaussian(m.graph, m.state, "x", held);
  ASSERT_TRUE(fixed);
  EXPECT_EQ(fixed.ssm->m0[0], 1.5);
  EXPECT_EQ(fixed.ssm->P0(0, 0), 2.0);
}

}  // namespace
