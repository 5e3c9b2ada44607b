#include "rydsim/models.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rydsim/photon_source.hpp"
#include "rydsim/rydberg_memory.hpp"

namespace rydsim::fit {
namespace {

constexpr double kInf = 1e300;

void expect_size(std::span<const double> params, std::size_t n, ModelId id) {
  if (params.size() != n)
    throw std::invalid_argument(std::string(to_string(id)) + " expects " + std::to_string(n) + " parameters");
}

double pair_probability(double c1, double c2, double pw) {
  const double p = c1 * pw + c2;
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("c1 p(w) + c2 leaves (0, 1)");
  return p;
}

}  // namespace

std::string_view to_string(ModelId id) {
  switch (id) {
    case ModelId::kEitSpectrum:
      return "eit_spectrum";
    case ModelId::kG2VsPw:
      return "g2_vs_pw";
    case ModelId::kAlphaVsPw:
      return "alpha_vs_pw";
    case ModelId::kStorageDecay:
      return "storage_decay";
    case ModelId::kDlczDecay:
      return "dlcz_decay";
    case ModelId::kGaussianLine:
      return "gaussian_line";
    case ModelId::kSaturation:
      return "saturation";
  }
  return "?";
}

ModelId parse_model_id(std::string_view s) {
  for (auto id : {ModelId::kEitSpectrum, ModelId::kG2VsPw, ModelId::kAlphaVsPw, ModelId::kStorageDecay,
                  ModelId::kDlczDecay, ModelId::kGaussianLine, ModelId::kSaturation}) {
    if (to_string(id) == s) return id;
  }
  throw std::invalid_argument("unknown model_id '" + std::string(s) + "'");
}

std::string_view to_string(Transform t) {
  switch (t) {
    case Transform::kIdentity:
      return "identity";
    case Transform::kLog:
      return "log";
    case Transform::kLogistic:
      return "logistic";
  }
  return "?";
}

Transform parse_transform(std::string_view s) {
  if (s == "identity") return Transform::kIdentity;
  if (s == "log") return Transform::kLog;
  if (s == "logistic") return Transform::kLogistic;
  throw std::invalid_argument("unknown transform '" + std::string(s) + "'");
}

std::vector<ParamSpec> default_params(ModelId id) {
  using T = Transform;
  switch (id) {
    case ModelId::kEitSpectrum:
      return {{"od", 5.0, 0.0, kInf, T::kLog, false},
              {"omega_c_mhz", 2.5, 0.0, kInf, T::kLog, false},
              {"gamma_gr_mhz", 0.3, 0.0, kInf, T::kLog, false},
              {"gamma_mhz", 6.07, 0.0, kInf, T::kLog, true}};
    case ModelId::kG2VsPw:
      // g2 depends on eta_a and p_se only through (1/eta_a - 1) p_se and on
      // p_nr only through p_nr / (eta_a eta_r); c1, c2 come from the
      // write-arm calibration. Free by default: eta_a and p_nr.
      return {{"c1", 1.0 / 0.15, 0.0, kInf, T::kLog, true},
              {"c2", 0.0, -1.0, 1.0, T::kIdentity, true},
              {"eta_a", 0.3, 0.0, 1.0, T::kLogistic, false},
              {"p_se", 0.1, 0.0, 1.0, T::kLogistic, true},
              {"p_nr", 1e-4, 0.0, 1.0, T::kLogistic, false},
              {"eta_r", 0.1, 0.0, 1.0, T::kLogistic, true}};
    case ModelId::kAlphaVsPw:
      return {{"c1", 5.0, 0.0, kInf, T::kLog, false}, {"c2", 0.0, -1.0, 1.0, T::kIdentity, false}};
    case ModelId::kStorageDecay:
      return {{"eta0", 0.05, 0.0, 1.0, T::kLogistic, false},
              {"tau_r_us", 3.0, 0.0, kInf, T::kLog, false},
              {"delta_f_khz", 180.0, 0.0, kInf, T::kLog, false},
              {"p_f1", 0.6, 0.0, 1.0, T::kLogistic, false},
              {"t_off_us", 0.0, -kInf, kInf, T::kIdentity, true}};
    case ModelId::kDlczDecay:
      // eta_a and eta_r enter as a product; eta_r is fixed by default.
      return {{"p", 0.01, 0.0, 1.0, T::kLogistic, true},
              {"eta_a", 0.3, 0.0, 1.0, T::kLogistic, false},
              {"tau_dlcz_us", 20.0, 0.0, kInf, T::kLog, false},
              {"eta_r", 0.1, 0.0, 1.0, T::kLogistic, true},
              {"p_se", 0.1, 0.0, 1.0, T::kLogistic, true},
              {"p_nr", 1e-4, 0.0, 1.0, T::kLogistic, false}};
    case ModelId::kGaussianLine:
      return {{"amplitude", 1.0, -kInf, kInf, T::kIdentity, false},
              {"center", 0.0, -kInf, kInf, T::kIdentity, false},
              {"sigma", 1.0, 0.0, kInf, T::kLog, false},
              {"baseline", 0.0, -kInf, kInf, T::kIdentity, true}};
    case ModelId::kSaturation:
      return {{"n_max", 50.0, 0.0, kInf, T::kLog, false}, {"t_lin", 0.005, 0.0, 1.0, T::kLogistic, false}};
  }
  throw std::invalid_argument("unknown model");
}

double model_eval(ModelId id, double x, std::span<const double> params) {
  switch (id) {
    case ModelId::kEitSpectrum: {
      expect_size(params, 4, id);
      memory::EitMediumParams m;
      m.od = params[0];
      m.omega_c_mhz = params[1];
      m.gamma_gr_mhz = params[2];
      m.gamma_mhz = params[3];
      try {
        return memory::transmission(m, x);
      } catch (const std::invalid_argument& e) {
        throw std::domain_error(e.what());
      }
    }
    case ModelId::kG2VsPw: {
      expect_size(params, 6, id);
      source::DlczSourceParams s;
      s.p = pair_probability(params[0], params[1], x);
      s.eta_w = 1.0;
      s.p_nw = 0.0;
      s.eta_a = params[2];
      s.p_se = params[3];
      s.p_nr = params[4];
      s.eta_r = params[5];
      try {
        return source::detection_probabilities(s, 0.0).cross_correlation();
      } catch (const std::invalid_argument& e) {
        throw std::domain_error(e.what());
      }
    }
    case ModelId::kAlphaVsPw: {
      expect_size(params, 2, id);
      return source::ideal_antibunching(pair_probability(params[0], params[1], x));
    }
    case ModelId::kStorageDecay: {
      expect_size(params, 5, id);
      memory::StorageParams s;
      s.eta0 = params[0];
      s.tau_r_us = params[1];
      s.delta_f_khz = params[2];
      s.p_f1 = params[3];
      s.t_off_us = params[4];
      try {
        return memory::storage_efficiency(s, x + s.t_off_us);
      } catch (const std::invalid_argument& e) {
        throw std::domain_error(e.what());
      }
    }
    case ModelId::kDlczDecay: {
      expect_size(params, 6, id);
      source::DlczSourceParams s;
      s.p = params[0];
      s.eta_w = 1.0;
      s.p_nw = 0.0;
      s.eta_a = params[1];
      s.tau_dlcz_us = params[2];
      s.eta_r = params[3];
      s.p_se = params[4];
      s.p_nr = params[5];
      try {
        return source::detection_probabilities(s, x).conditional_read();
      } catch (const std::invalid_argument& e) {
        throw std::domain_error(e.what());
      }
    }
    case ModelId::kGaussianLine: {
      expect_size(params, 4, id);
      const double z = (x - params[1]) / params[2];
      return params[0] * std::exp(-0.5 * z * z) + params[3];
    }
    case ModelId::kSaturation: {
      expect_size(params, 2, id);
      memory::SaturationParams s{params[0], params[1]};
      try {
        return memory::nonlinear_retrieval(x, s);
      } catch (const std::invalid_argument& e) {
        throw std::domain_error(e.what());
      }
    }
  }
  throw std::invalid_argument("unknown model");
}

}  // namespace rydsim::fit
