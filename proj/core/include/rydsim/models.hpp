#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

// Model adapters for the fitting engine. Each model delegates pointwise to
// the owning physics module so fits and forward simulations agree exactly.
namespace rydsim::fit {

enum class ModelId {
  kEitSpectrum,  ///< x: probe detuning (MHz) -> transmission
  kG2VsPw,       ///< x: p(w) -> g2_wr, with p = c1 p(w) + c2
  kAlphaVsPw,    ///< x: p(w) -> alpha, with p = c1 p(w) + c2
  kStorageDecay, ///< x: storage time (us) -> eta_B(x + t_off)
  kDlczDecay,    ///< x: t_A (us) -> p(r|w) with Gaussian decay of eta_A
  kGaussianLine, ///< x: detuning -> A exp(-(x - x0)^2 / 2 sigma^2) + baseline
  kSaturation,   ///< x: N_in -> N_out
};

/// How a parameter is mapped to the unconstrained optimiser coordinate.
enum class Transform {
  kIdentity,  ///< clamped to [lower, upper]
  kLog,       ///< value = lower + exp(u)
  kLogistic,  ///< value = lower + (upper - lower) / (1 + exp(-u))
};

struct ParamSpec {
  std::string name;
  double value = 0.0;
  double lower = -1e300;
  double upper = 1e300;
  Transform transform = Transform::kIdentity;
  bool fixed = false;
};

std::string_view to_string(ModelId id);
ModelId parse_model_id(std::string_view s);  ///< throws std::invalid_argument
std::string_view to_string(Transform t);
Transform parse_transform(std::string_view s);

/// Parameter layout, default starting values, bounds, transforms and the
/// default fixed mask for a model. Degenerate combinations are fixed by
/// default; see README for the list.
std::vector<ParamSpec> default_params(ModelId id);

/// Evaluates the model; throws std::invalid_argument on a parameter-count
/// mismatch and std::domain_error when parameters leave the model domain.
double model_eval(ModelId id, double x, std::span<const double> params);

}  // namespace rydsim::fit
