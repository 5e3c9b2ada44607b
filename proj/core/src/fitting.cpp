#include "rydsim/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

namespace rydsim::fit {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Maps between external parameter values and the unconstrained coordinates
// seen by the optimisers. Only free parameters get a coordinate.
class ParamMap {
 public:
  explicit ParamMap(const std::vector<ParamSpec>& specs) : specs_(specs) {
    for (std::size_t i = 0; i < specs_.size(); ++i)
      if (!specs_[i].fixed) free_.push_back(i);
  }

  std::size_t size() const { return free_.size(); }
  std::size_t index(std::size_t k) const { return free_[k]; }

  Eigen::VectorXd to_internal(const std::vector<double>& values) const {
    Eigen::VectorXd u(static_cast<Eigen::Index>(free_.size()));
    for (std::size_t k = 0; k < free_.size(); ++k) {
      const auto& s = specs_[free_[k]];
      const double v = values[free_[k]];
      switch (s.transform) {
        case Transform::kIdentity:
          u[static_cast<Eigen::Index>(k)] = std::clamp(v, s.lower, s.upper);
          break;
        case Transform::kLog:
          u[static_cast<Eigen::Index>(k)] = std::log(v - s.lower);
          break;
        case Transform::kLogistic:
          u[static_cast<Eigen::Index>(k)] = std::log((v - s.lower) / (s.upper - v));
          break;
      }
    }
    return u;
  }

  // Returns the full parameter vector: fixed values from `base`.
  std::vector<double> to_external(const Eigen::VectorXd& u, const std::vector<double>& base) const {
    std::vector<double> out = base;
    for (std::size_t k = 0; k < free_.size(); ++k) out[free_[k]] = value(k, u[static_cast<Eigen::Index>(k)]);
    return out;
  }

  double value(std::size_t k, double u) const {
    const auto& s = specs_[free_[k]];
    switch (s.transform) {
      case Transform::kIdentity:
        return std::clamp(u, s.lower, s.upper);
      case Transform::kLog:
        return s.lower + std::exp(u);
      case Transform::kLogistic:
        return s.lower + (s.upper - s.lower) / (1.0 + std::exp(-u));
    }
    return u;
  }

  // d(value)/du.
  double derivative(std::size_t k, double u) const {
    const auto& s = specs_[free_[k]];
    switch (s.transform) {
      case Transform::kIdentity:
        return 1.0;
      case Transform::kLog:
        return std::exp(u);
      case Transform::kLogistic: {
        const double e = std::exp(-std::abs(u));
        return (s.upper - s.lower) * e / ((1.0 + e) * (1.0 + e));
      }
    }
    return 1.0;
  }

  // Keeps identity-transformed coordinates inside their bounds.
  void clamp(Eigen::VectorXd& u) const {
    for (std::size_t k = 0; k < free_.size(); ++k) {
      const auto& s = specs_[free_[k]];
      if (s.transform == Transform::kIdentity)
        u[static_cast<Eigen::Index>(k)] = std::clamp(u[static_cast<Eigen::Index>(k)], s.lower, s.upper);
    }
  }

  bool at_lower(std::size_t k, double u) const {
    const auto& s = specs_[free_[k]];
    return s.transform == Transform::kIdentity && u <= s.lower;
  }
  bool at_upper(std::size_t k, double u) const {
    const auto& s = specs_[free_[k]];
    return s.transform == Transform::kIdentity && u >= s.upper;
  }

 private:
  const std::vector<ParamSpec>& specs_;
  std::vector<std::size_t> free_;
};

double poisson_residual(double y, double mu) {
  if (y < 0.0) return kInf;
  if (y == 0.0) return mu >= 0.0 ? std::sqrt(2.0 * mu) : kInf;
  if (!(mu > 0.0)) return kInf;
  const double d = 2.0 * (mu - y + y * std::log(y / mu));
  return (y > mu ? 1.0 : -1.0) * std::sqrt(std::max(d, 0.0));
}

// Residual vector; returns false when the model cannot be evaluated.
bool residuals(const FitProblem& problem, const ModelFunction& model, std::span<const double> params,
               Eigen::VectorXd& r) {
  r.resize(static_cast<Eigen::Index>(problem.data.size()));
  for (std::size_t i = 0; i < problem.data.size(); ++i) {
    const auto& d = problem.data[i];
    double f = 0.0;
    try {
      f = model(d.x, params);
    } catch (const std::domain_error&) {
      return false;
    }
    if (!std::isfinite(f)) return false;
    const double ri = problem.options.objective == Objective::kPoisson ? poisson_residual(d.y, f) : (d.y - f) / d.sigma;
    if (!std::isfinite(ri)) return false;
    r[static_cast<Eigen::Index>(i)] = ri;
  }
  return true;
}

struct Evaluator {
  const FitProblem& problem;
  const ModelFunction& model;
  const ParamMap& map;
  std::vector<double> base;

  bool operator()(const Eigen::VectorXd& u, Eigen::VectorXd& r) const {
    const auto p = map.to_external(u, base);
    return residuals(problem, model, p, r);
  }

  double chi2(const Eigen::VectorXd& u) const {
    Eigen::VectorXd r;
    return (*this)(u, r) ? r.squaredNorm() : kInf;
  }

  // Central differences; one-sided at identity bounds or domain edges.
  bool jacobian(const Eigen::VectorXd& u, const Eigen::VectorXd& r0, Eigen::MatrixXd& jac) const {
    const auto n = u.size();
    jac.resize(r0.size(), n);
    Eigen::VectorXd rp, rm;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double h = 6e-6 * std::max(1.0, std::abs(u[k]));
      Eigen::VectorXd up = u, um = u;
      up[k] += h;
      um[k] -= h;
      const auto kk = static_cast<std::size_t>(k);
      const bool can_up = !map.at_upper(kk, u[k]) && (*this)(up, rp);
      const bool can_dn = !map.at_lower(kk, u[k]) && (*this)(um, rm);
      if (can_up && can_dn) {
        jac.col(k) = (rp - rm) / (2.0 * h);
      } else if (can_up) {
        jac.col(k) = (rp - r0) / h;
      } else if (can_dn) {
        jac.col(k) = (r0 - rm) / h;
      } else {
        return false;
      }
    }
    return true;
  }
};

// Covariance of the free parameters in external coordinates. Returns false
// when the curvature matrix is singular.
bool covariance(const ParamMap& map, const Eigen::VectorXd& u, const Eigen::MatrixXd& jac, Eigen::MatrixXd& cov,
                std::string& diag, const std::vector<ParamSpec>& specs) {
  const auto n = u.size();
  Eigen::MatrixXd a = jac.transpose() * jac;
  Eigen::VectorXd scale(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(a(k, k) > 0.0)) {
      diag = "singular curvature: parameter '" + specs[map.index(static_cast<std::size_t>(k))].name +
             "' does not affect the residuals";
      return false;
    }
    scale[k] = 1.0 / std::sqrt(a(k, k));
  }
  const Eigen::MatrixXd as = scale.asDiagonal() * a * scale.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(as);
  const double lmin = es.eigenvalues().minCoeff();
  if (!(lmin > 1e-13)) {
    // Name the parameters spanning the null direction.
    const Eigen::VectorXd v = es.eigenvectors().col(0);
    diag = "singular curvature (degenerate parameters:";
    for (Eigen::Index k = 0; k < n; ++k)
      if (std::abs(v[k]) > 0.2) diag += " " + specs[map.index(static_cast<std::size_t>(k))].name;
    diag += ")";
    return false;
  }
  const Eigen::MatrixXd inv_s = es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                                es.eigenvectors().transpose();
  Eigen::VectorXd d(n);
  for (Eigen::Index k = 0; k < n; ++k) d[k] = map.derivative(static_cast<std::size_t>(k), u[k]) * scale[k];
  cov = d.asDiagonal() * inv_s * d.asDiagonal();
  return true;
}

struct OptimOutcome {
  Eigen::VectorXd u;
  double chi2 = kInf;
  int iterations = 0;
  bool converged = false;
  std::string diagnostics;
};

OptimOutcome damped_least_squares(const Evaluator& ev, Eigen::VectorXd u, const FitOptions& opt) {
  OptimOutcome out;
  Eigen::VectorXd r;
  if (!ev(u, r)) {
    out.u = u;
    out.diagnostics = "model cannot be evaluated at the starting point";
    return out;
  }
  double chi2 = r.squaredNorm();
  double lambda = 1e-3;
  Eigen::MatrixXd jac;
  int it = 0;
  bool converged = false;
  std::string diag;
  while (it < opt.max_iterations) {
    ++it;
    if (!ev.jacobian(u, r, jac)) {
      diag = "Jacobian could not be evaluated";
      break;
    }
    const Eigen::MatrixXd a = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * r;
    bool accepted = false;
    double step_norm = 0.0;
    double new_chi2 = chi2;
    Eigen::VectorXd u_new, r_new;
    while (lambda < 1e16) {
      Eigen::MatrixXd damped = a;
      for (Eigen::Index k = 0; k < a.rows(); ++k) damped(k, k) += lambda * std::max(a(k, k), 1e-12);
      const Eigen::VectorXd step = damped.ldlt().solve(-g);
      u_new = u + step;
      ev.map.clamp(u_new);
      step_norm = (u_new - u).norm();
      if (step_norm <= opt.step_tol * (u.norm() + opt.step_tol)) {
        converged = true;
        break;
      }
      if (ev(u_new, r_new) && r_new.squaredNorm() < chi2) {
        new_chi2 = r_new.squaredNorm();
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (converged) break;
    if (!accepted) {
      // No damping yields a decrease: a minimum at working precision.
      converged = true;
      break;
    }
    const double decrease = chi2 - new_chi2;
    u = u_new;
    r = r_new;
    chi2 = new_chi2;
    lambda = std::max(lambda / 10.0, 1e-12);
    if (decrease <= opt.rel_tol * std::max(chi2, std::numeric_limits<double>::min()) || chi2 == 0.0) {
      converged = true;
      break;
    }
  }
  if (!converged && diag.empty()) diag = "iteration limit reached";
  out.u = u;
  out.chi2 = chi2;
  out.iterations = it;
  out.converged = converged;
  out.diagnostics = diag;
  return out;
}

OptimOutcome nelder_mead(const Evaluator& ev, const Eigen::VectorXd& u0, const FitOptions& opt) {
  const auto n = u0.size();
  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(n) + 1, u0);
  std::vector<double> f(pts.size());
  for (Eigen::Index k = 0; k < n; ++k) pts[static_cast<std::size_t>(k) + 1][k] += 0.1 * std::max(1.0, std::abs(u0[k]));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ev.map.clamp(pts[i]);
    f[i] = ev.chi2(pts[i]);
  }
  OptimOutcome out;
  std::vector<std::size_t> order(pts.size());
  const int max_it = opt.max_iterations * static_cast<int>(std::max<Eigen::Index>(n, 1)) * 20;
  int it = 0;
  for (; it < max_it; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];
    if (std::isfinite(f[worst]) &&
        f[worst] - f[best] <= opt.rel_tol * std::max(std::abs(f[best]), std::numeric_limits<double>::min())) {
      out.converged = true;
      break;
    }
    double size = 0.0;
    for (const auto& p : pts) size = std::max(size, (p - pts[best]).norm());
    if (size <= opt.step_tol) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (std::size_t i : order)
      if (i != worst) centroid += pts[i];
    centroid /= static_cast<double>(n);
    auto trial = [&](double coef) {
      Eigen::VectorXd p = centroid + coef * (pts[worst] - centroid);
      ev.map.clamp(p);
      return p;
    };
    Eigen::VectorXd xr = trial(-1.0);
    const double fr = ev.chi2(xr);
    if (fr < f[best]) {
      Eigen::VectorXd xe = trial(-2.0);
      const double fe = ev.chi2(xe);
      if (fe < fr) {
        pts[worst] = xe;
        f[worst] = fe;
      } else {
        pts[worst] = xr;
        f[worst] = fr;
      }
    } else if (fr < f[second]) {
      pts[worst] = xr;
      f[worst] = fr;
    } else {
      Eigen::VectorXd xc = fr < f[worst] ? trial(-0.5) : trial(0.5);
      const double fc = ev.chi2(xc);
      if (fc < std::min(fr, f[worst])) {
        pts[worst] = xc;
        f[worst] = fc;
      } else {
        for (std::size_t i = 0; i < pts.size(); ++i) {
          if (i == best) continue;
          pts[i] = pts[best] + 0.5 * (pts[i] - pts[best]);
          ev.map.clamp(pts[i]);
          f[i] = ev.chi2(pts[i]);
        }
      }
    }
  }
  const auto best = static_cast<std::size_t>(std::min_element(f.begin(), f.end()) - f.begin());
  out.u = pts[best];
  out.chi2 = f[best];
  out.iterations = it;
  if (!out.converged) out.diagnostics = "iteration limit reached";
  return out;
}

}  // namespace

void FitProblem::validate() const {
  for (const auto& d : data) {
    if (!std::isfinite(d.x) || !std::isfinite(d.y)) throw std::invalid_argument("data must be finite");
    if (options.objective == Objective::kLeastSquares && !(d.sigma > 0.0))
      throw std::invalid_argument("sigma_y must be > 0");
  }
  for (const auto& p : params) {
    if (!(p.lower <= p.upper)) throw std::invalid_argument("parameter '" + p.name + "' has lower > upper");
    if (p.fixed) continue;
    const bool strict = p.transform != Transform::kIdentity;
    const bool inside = strict ? (p.value > p.lower && (p.transform == Transform::kLog || p.value < p.upper))
                               : (p.value >= p.lower && p.value <= p.upper);
    if (!inside || !std::isfinite(p.value))
      throw std::invalid_argument("initial value of '" + p.name + "' lies outside its bounds");
    if (p.transform == Transform::kLogistic && !std::isfinite(p.upper - p.lower))
      throw std::invalid_argument("logistic transform of '" + p.name + "' needs finite bounds");
  }
  if (free_count() == 0) throw std::invalid_argument("no free parameters");
  if (data.size() < free_count()) throw std::invalid_argument("fewer data points than free parameters");
}

std::size_t FitProblem::free_count() const {
  return static_cast<std::size_t>(std::count_if(params.begin(), params.end(), [](const ParamSpec& p) { return !p.fixed; }));
}

FitProblem make_problem(ModelId model, std::vector<DataPoint> data) {
  FitProblem p;
  p.model = model;
  p.data = std::move(data);
  p.params = default_params(model);
  return p;
}

ModelFunction model_function(ModelId id) {
  return [id](double x, std::span<const double> params) { return model_eval(id, x, params); };
}

double objective_value(const FitProblem& problem, const ModelFunction& model, std::span<const double> params) {
  Eigen::VectorXd r;
  return residuals(problem, model, params, r) ? r.squaredNorm() : kInf;
}

FitResult fit(const FitProblem& problem) { return fit(problem, model_function(problem.model)); }

FitResult fit(const FitProblem& problem, const ModelFunction& model) {
  problem.validate();
  const ParamMap map(problem.params);
  std::vector<double> base;
  base.reserve(problem.params.size());
  for (const auto& p : problem.params) base.push_back(p.value);
  const Evaluator ev{problem, model, map, base};

  const Eigen::VectorXd u0 = map.to_internal(base);
  OptimOutcome out = problem.options.method == Method::kSimplex ? nelder_mead(ev, u0, problem.options)
                                                                : damped_least_squares(ev, u0, problem.options);

  FitResult res;
  for (const auto& p : problem.params) res.names.push_back(p.name);
  res.params = map.to_external(out.u, base);
  res.chi_square = out.chi2;
  res.n_dof = static_cast<int>(problem.data.size()) - static_cast<int>(map.size());
  res.n_iterations = out.iterations;
  res.converged = out.converged;
  res.diagnostics = out.diagnostics;
  res.sigma.assign(problem.params.size(), 0.0);

  if (!std::isfinite(out.chi2)) {
    res.converged = false;
    if (res.diagnostics.empty()) res.diagnostics = "objective is not finite";
    return res;
  }
  Eigen::VectorXd r;
  Eigen::MatrixXd jac, cov;
  std::string diag;
  if (ev(out.u, r) && ev.jacobian(out.u, r, jac) && covariance(map, out.u, jac, cov, diag, problem.params)) {
    for (std::size_t k = 0; k < map.size(); ++k)
      res.sigma[map.index(k)] = std::sqrt(std::max(cov(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)), 0.0));
  } else {
    res.converged = false;
    res.diagnostics = diag.empty() ? "curvature could not be evaluated" : diag;
    for (std::size_t k = 0; k < map.size(); ++k) res.sigma[map.index(k)] = kInf;
  }
  return res;
}

ProfileInterval profile_uncertainty(const FitProblem& problem, const FitResult& result, std::size_t index) {
  return profile_uncertainty(problem, result, index, model_function(problem.model));
}

ProfileInterval profile_uncertainty(const FitProblem& problem, const FitResult& result, std::size_t index,
                                    const ModelFunction& model) {
  if (index >= problem.params.size()) throw std::out_of_range("parameter index out of range");
  if (!result.converged) throw std::invalid_argument("profile needs a converged fit");
  const auto& spec = problem.params[index];
  const double best = result.params[index];
  if (spec.fixed) return {best, best, false, false};

  FitProblem sub = problem;
  for (std::size_t i = 0; i < sub.params.size(); ++i) sub.params[i].value = result.params[i];
  sub.params[index].fixed = true;
  const bool others_free = sub.free_count() > 0;
  const double target = result.chi_square + 1.0;

  // Profiled objective minus target at a fixed value of the parameter.
  auto excess = [&](double v) {
    FitProblem p = sub;
    p.params[index].value = v;
    double chi2 = kInf;
    if (others_free) {
      try {
        chi2 = fit(p, model).chi_square;
      } catch (const std::invalid_argument&) {
        chi2 = kInf;
      }
    } else {
      std::vector<double> vals;
      for (const auto& ps : p.params) vals.push_back(ps.value);
      chi2 = objective_value(p, model, vals);
    }
    return chi2 - target;
  };

  double step = result.sigma[index];
  if (!(step > 0.0) || !std::isfinite(step)) step = 0.1 * std::max(std::abs(best), 1e-3);

  auto search = [&](double dir, double bound, bool& at_bound) {
    double inside = best;
    double v = best;
    double s = step;
    for (int k = 0; k < 80; ++k) {
      v = best + dir * s;
      if ((dir > 0 && v >= bound) || (dir < 0 && v <= bound)) {
        v = bound;
        if (!std::isfinite(bound) || excess(v) < 0.0) {
          at_bound = true;
          return bound;
        }
        break;
      }
      if (excess(v) > 0.0) break;
      inside = v;
      s *= 2.0;
      if (k == 79) {
        at_bound = true;
        return v;
      }
    }
    double lo = inside, hi = v;
    for (int k = 0; k < 60 && std::abs(hi - lo) > 1e-9 * std::max(step, std::abs(best) * 1e-6); ++k) {
      const double mid = 0.5 * (lo + hi);
      (excess(mid) > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  };

  ProfileInterval out;
  out.upper = search(+1.0, spec.upper, out.upper_at_bound);
  out.lower = search(-1.0, spec.lower, out.lower_at_bound);
  return out;
}

}  // namespace rydsim::fit
