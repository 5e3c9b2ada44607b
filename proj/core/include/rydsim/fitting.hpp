#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rydsim/models.hpp"

// Nonlinear least-squares engine: damped Gauss-Newton (Levenberg-Marquardt)
// on transformed parameters with a numerical Jacobian, a Nelder-Mead
// fallback, curvature uncertainties and delta-chi2 = 1 profile intervals.
namespace rydsim::fit {

struct DataPoint {
  double x = 0.0;
  double y = 0.0;
  double sigma = 1.0;
};

enum class Objective {
  kLeastSquares,  ///< sum ((y - f) / sigma)^2
  kPoisson,       ///< Poisson deviance; y are counts, sigma is ignored
};

enum class Method { kDampedLeastSquares, kSimplex };

struct FitOptions {
  Method method = Method::kDampedLeastSquares;
  Objective objective = Objective::kLeastSquares;
  int max_iterations = 500;
  double rel_tol = 1e-10;   ///< stop when the relative chi2 decrease is below this
  double step_tol = 1e-12;  ///< or when the step norm is below this
};

using ModelFunction = std::function<double(double, std::span<const double>)>;

struct FitProblem {
  ModelId model = ModelId::kGaussianLine;
  std::vector<DataPoint> data;
  std::vector<ParamSpec> params;
  FitOptions options;

  /// Throws std::invalid_argument: non-positive sigma, start values outside
  /// bounds, fewer points than free parameters.
  void validate() const;
  std::size_t free_count() const;
};

/// Problem for `model` with its default parameter specs.
FitProblem make_problem(ModelId model, std::vector<DataPoint> data);

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> params;
  std::vector<double> sigma;  ///< zero for fixed parameters
  double chi_square = 0.0;
  int n_dof = 0;
  bool converged = false;
  int n_iterations = 0;
  std::string diagnostics;
};

FitResult fit(const FitProblem& problem);
FitResult fit(const FitProblem& problem, const ModelFunction& model);

/// Objective value (chi2 or deviance) at `params`; +inf outside the model domain.
double objective_value(const FitProblem& problem, const ModelFunction& model, std::span<const double> params);

struct ProfileInterval {
  double lower = 0.0;
  double upper = 0.0;
  bool lower_at_bound = false;  ///< profile never rose by 1 before the lower bound
  bool upper_at_bound = false;
};

/// Values where the profiled objective rises by 1 above the optimum.
ProfileInterval profile_uncertainty(const FitProblem& problem, const FitResult& result, std::size_t index);
ProfileInterval profile_uncertainty(const FitProblem& problem, const FitResult& result, std::size_t index,
                                    const ModelFunction& model);

/// Model function bound to a ModelId.
ModelFunction model_function(ModelId id);

}  // namespace rydsim::fit
