#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rydsim/fitting.hpp"
#include "rydsim/models.hpp"
#include "rydsim/rng.hpp"
#include "rydsim/rydberg_memory.hpp"

using namespace rydsim;
using namespace rydsim::fit;

namespace {

std::vector<double> grid(double a, double b, int n) {
  std::vector<double> x;
  for (int i = 0; i < n; ++i) x.push_back(a + (b - a) * i / (n - 1));
  return x;
}

struct Case {
  ModelId model;
  std::vector<double> truth;
  std::vector<double> x;
  double rel_sigma;  // sigma_y as a fraction of |y| (plus a floor)
};

// Generating parameters per model, on the sampling a typical fit sees.
std::vector<Case> cases() {
  return {
      {ModelId::kEitSpectrum, {5.4, 2.66, 0.29, 6.07}, grid(-15.0, 15.0, 121), 0.01},
      {ModelId::kG2VsPw, {6.5, 0.0, 0.385, 0.1, 2e-4, 0.1}, grid(1e-3, 0.03, 12), 0.05},
      {ModelId::kAlphaVsPw, {6.0, 1e-3}, grid(1e-3, 0.03, 10), 0.05},
      {ModelId::kStorageDecay, {0.05, 3.3, 182.3, 0.6, 0.0}, grid(0.3, 9.0, 30), 0.05},
      {ModelId::kDlczDecay, {0.01, 0.385, 24.0, 0.1, 0.1, 2e-4}, grid(1.0, 40.0, 14), 0.05},
      {ModelId::kGaussianLine, {1.0, 0.2, 1.01, 0.0}, grid(-4.0, 4.0, 17), 0.02},
      {ModelId::kSaturation, {68.0, 0.0044}, {1, 2, 5, 10, 20, 35, 50, 75, 100, 150, 200, 300, 400}, 0.03},
  };
}

FitProblem noiseless_problem(const Case& c) {
  std::vector<DataPoint> data;
  for (double x : c.x) {
    const double y = model_eval(c.model, x, c.truth);
    data.push_back({x, y, c.rel_sigma * std::abs(y) + 1e-12});
  }
  auto p = make_problem(c.model, data);
  for (std::size_t i = 0; i < p.params.size(); ++i) {
    if (p.params[i].fixed) p.params[i].value = c.truth[i];
  }
  return p;
}

}  // namespace

TEST(Models, TrivialValues) {
  EXPECT_DOUBLE_EQ(model_eval(ModelId::kSaturation, 0.0, std::vector<double>{68.0, 0.0044}), 0.0);
  EXPECT_NEAR(model_eval(ModelId::kEitSpectrum, 1e7, std::vector<double>{5.4, 2.66, 0.29, 6.07}), 1.0, 1e-9);
  EXPECT_DOUBLE_EQ(model_eval(ModelId::kStorageDecay, 0.0, std::vector<double>{0.05, 3.3, 182.3, 0.6, 0.0}), 0.05);
  EXPECT_THROW(model_eval(ModelId::kSaturation, 1.0, std::vector<double>{1.0}), std::invalid_argument);
  EXPECT_THROW(parse_model_id("nope"), std::invalid_argument);
  for (const auto& c : cases()) EXPECT_EQ(parse_model_id(to_string(c.model)), c.model);
}

TEST(Models, DelegateToOwningModule) {
  memory::StorageParams s;
  s.eta0 = 0.04;
  s.tau_r_us = 3.1;
  s.delta_f_khz = 170.0;
  s.p_f1 = 0.55;
  for (double t : {0.0, 1.0, 4.4, 7.9})
    EXPECT_EQ(model_eval(ModelId::kStorageDecay, t - 0.47, std::vector<double>{0.04, 3.1, 170.0, 0.55, 0.47}),
              memory::storage_efficiency(s, t));
}

// Central differences at h, h/2, h/4 converge at second order for every
// model parameter at random points around the generating values.
TEST(Models, FiniteDifferenceRichardsonConsistent) {
  Rng rng(21);
  for (const auto& c : cases()) {
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<double> theta = c.truth;
      for (auto& t : theta) t *= 1.0 + 0.05 * (rng.uniform() - 0.5);
      const double x = c.x[static_cast<std::size_t>(rng.next() % c.x.size())];
      for (std::size_t k = 0; k < theta.size(); ++k) {
        const double h0 = 1e-2 * std::max(std::abs(theta[k]), 1e-4);
        auto d = [&](double h) {
          auto up = theta, dn = theta;
          up[k] += h;
          dn[k] -= h;
          return (model_eval(c.model, x, up) - model_eval(c.model, x, dn)) / (2.0 * h);
        };
        const double d1 = d(h0), d2 = d(h0 / 2), d4 = d(h0 / 4);
        const double richardson = (4.0 * d2 - d1) / 3.0;
        const double scale = std::abs(richardson) + 1e-9 * std::abs(model_eval(c.model, x, theta)) / h0;
        EXPECT_LE(std::abs(d4 - richardson), 1e-3 * scale + 1e-12)
            << to_string(c.model) << " param " << k << " x " << x;
        EXPECT_LE(std::abs(d2 - d4), std::abs(d1 - d2) + 1e-6 * scale) << to_string(c.model) << " param " << k;
      }
    }
  }
}

TEST(Fit, NoiselessRecoveryEveryModel) {
  for (const auto& c : cases()) {
    const auto problem = noiseless_problem(c);
    const auto r = fit::fit(problem);
    EXPECT_TRUE(r.converged) << to_string(c.model) << ": " << r.diagnostics;
    for (std::size_t i = 0; i < c.truth.size(); ++i) {
      if (problem.params[i].fixed) continue;
      EXPECT_NEAR(r.params[i], c.truth[i], 1e-6 * std::abs(c.truth[i])) << to_string(c.model) << " " << r.names[i];
    }
    EXPECT_LT(r.chi_square, 1e-9) << to_string(c.model);
  }
}

TEST(Fit, GaussianLineSigmaFromSupplementaryFigure) {
  const Case c{ModelId::kGaussianLine, {1.0, 0.0, 1.01, 0.0}, grid(-4.0, 4.0, 17), 0.02};
  const auto r = fit::fit(noiseless_problem(c));
  EXPECT_NEAR(r.params[2], 1.01, 1e-6);
}

TEST(Fit, InvariantUnderReordering) {
  for (const auto& c : cases()) {
    auto problem = noiseless_problem(c);
    Rng rng(3);
    for (auto& d : problem.data) d.y += 0.5 * d.sigma * rng.normal();
    const auto a = fit::fit(problem);
    std::reverse(problem.data.begin(), problem.data.end());
    std::rotate(problem.data.begin(), problem.data.begin() + 3, problem.data.end());
    const auto b = fit::fit(problem);
    for (std::size_t i = 0; i < a.params.size(); ++i)
      EXPECT_NEAR(a.params[i], b.params[i], 1e-6 * (std::abs(a.params[i]) + a.sigma[i])) << to_string(c.model);
  }
}

TEST(Fit, RefitFromOptimumIsFixedPoint) {
  for (const auto& c : cases()) {
    auto problem = noiseless_problem(c);
    Rng rng(4);
    for (auto& d : problem.data) d.y += d.sigma * rng.normal();
    const auto a = fit::fit(problem);
    ASSERT_TRUE(a.converged) << to_string(c.model) << ": " << a.diagnostics;
    for (std::size_t i = 0; i < problem.params.size(); ++i) problem.params[i].value = a.params[i];
    const auto b = fit::fit(problem);
    EXPECT_LE(b.n_iterations, 2) << to_string(c.model);
    EXPECT_NEAR(b.chi_square, a.chi_square, 1e-8 * (1.0 + a.chi_square));
  }
}

TEST(Fit, SimplexAgreesWithDampedLeastSquares) {
  const Case c{ModelId::kSaturation, {68.0, 0.0044}, {1, 2, 5, 10, 20, 35, 50, 75, 100, 150, 200, 300, 400}, 0.03};
  auto problem = noiseless_problem(c);
  Rng rng(5);
  for (auto& d : problem.data) d.y += d.sigma * rng.normal();
  const auto lm = fit::fit(problem);
  problem.options.method = Method::kSimplex;
  const auto nm = fit::fit(problem);
  EXPECT_TRUE(nm.converged);
  EXPECT_NEAR(nm.params[0], lm.params[0], 1e-3 * lm.params[0]);
  EXPECT_NEAR(nm.params[1], lm.params[1], 1e-3 * lm.params[1]);
  EXPECT_NEAR(nm.sigma[0], lm.sigma[0], 1e-3 * lm.sigma[0]);
}

TEST(Fit, CurvatureSigmaOfLinearParameter) {
  // Only the amplitude free: chi2 is exactly quadratic in it.
  auto problem = make_problem(ModelId::kGaussianLine, {});
  for (double x : grid(-3.0, 3.0, 13)) problem.data.push_back({x, 2.0 * std::exp(-0.5 * x * x) + 0.03 * std::sin(7 * x), 0.05});
  problem.params[1].fixed = true;
  problem.params[2].fixed = true;
  const auto r = fit::fit(problem);
  double s = 0.0;
  for (const auto& d : problem.data) s += std::pow(std::exp(-0.5 * d.x * d.x) / d.sigma, 2);
  EXPECT_NEAR(r.sigma[0], 1.0 / std::sqrt(s), 1e-5 / std::sqrt(s));
  const auto prof = profile_uncertainty(problem, r, 0);
  EXPECT_NEAR(r.params[0] - prof.lower, r.sigma[0], 0.01 * r.sigma[0]);
  EXPECT_NEAR(prof.upper - r.params[0], r.sigma[0], 0.01 * r.sigma[0]);
  EXPECT_FALSE(prof.lower_at_bound || prof.upper_at_bound);
}

TEST(Profile, FixedParameterHasZeroWidth) {
  const auto problem = noiseless_problem(cases()[5]);
  const auto r = fit::fit(problem);
  const auto prof = profile_uncertainty(problem, r, 3);
  EXPECT_EQ(prof.lower, prof.upper);
  EXPECT_EQ(prof.lower, r.params[3]);
}

// Zero observed counts: deviance 2 a sum(k) rises by one at a = 1 / (2 sum k).
TEST(Profile, ZeroCountsGiveOneSidedInterval) {
  FitProblem problem;
  problem.params = {{"a", 1.0, 0.0, 1e6, Transform::kIdentity, false}};
  problem.options.objective = Objective::kPoisson;
  const std::vector<double> k{1.0, 2.0, 3.0};
  for (double x : k) problem.data.push_back({x, 0.0, 1.0});
  const ModelFunction model = [](double x, std::span<const double> p) { return p[0] * x; };
  const auto r = fit::fit(problem, model);
  ASSERT_TRUE(r.converged) << r.diagnostics;
  EXPECT_NEAR(r.params[0], 0.0, 1e-9);
  const auto prof = profile_uncertainty(problem, r, 0, model);
  EXPECT_EQ(prof.lower, 0.0);
  EXPECT_TRUE(prof.lower_at_bound);
  EXPECT_FALSE(prof.upper_at_bound);
  EXPECT_NEAR(prof.upper, 1.0 / 12.0, 1e-6);
}

TEST(Fit, SingularCurvatureFlagged) {
  // Two amplitudes that only enter as a sum.
  FitProblem problem;
  problem.params = {{"a", 1.0}, {"b", 1.0}};
  for (double x : grid(0.0, 1.0, 5)) problem.data.push_back({x, 3.0 * x, 0.1});
  const ModelFunction model = [](double x, std::span<const double> p) { return (p[0] + p[1]) * x; };
  const auto r = fit::fit(problem, model);
  EXPECT_FALSE(r.converged);
  EXPECT_FALSE(r.diagnostics.empty());
  EXPECT_TRUE(std::isinf(r.sigma[0]));
}

TEST(FitProblem, ValidationErrors) {
  auto good = noiseless_problem(cases()[6]);
  auto p = good;
  p.data[0].sigma = 0.0;
  EXPECT_THROW(fit::fit(p), std::invalid_argument);
  p = good;
  p.params[1].value = 2.0;  // t_lin outside [0, 1]
  EXPECT_THROW(fit::fit(p), std::invalid_argument);
  p = good;
  p.data.resize(1);
  EXPECT_THROW(fit::fit(p), std::invalid_argument);
  p = good;
  for (auto& s : p.params) s.fixed = true;
  EXPECT_THROW(fit::fit(p), std::invalid_argument);
  p = good;
  p.data[2].y = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(fit::fit(p), std::invalid_argument);
}

TEST(Fit, DeterministicGivenInputs) {
  auto problem = noiseless_problem(cases()[3]);
  Rng rng(6);
  for (auto& d : problem.data) d.y += d.sigma * rng.normal();
  const auto a = fit::fit(problem);
  const auto b = fit::fit(problem);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.sigma, b.sigma);
  EXPECT_EQ(a.n_iterations, b.n_iterations);
}
