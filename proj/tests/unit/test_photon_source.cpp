#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "rydsim/constants.hpp"
#include "rydsim/photon_source.hpp"
#include "rydsim/rng.hpp"

using namespace rydsim;
using namespace rydsim::source;

TEST(PairDistribution, NormalisedAtDefaultCutoff) {
  for (double p : {1e-4, 0.01, 0.3, 0.9}) {
    const auto d = pair_number_distribution(p, default_fock_cutoff(p));
    EXPECT_NEAR(d.total(), 1.0, 1e-12) << p;
  }
}

TEST(PairDistribution, MeanMatchesGeometricSeries) {
  // sum n (1-p) p^n = p / (1 - p)
  const double p = 0.05;
  const auto d = pair_number_distribution(p, default_fock_cutoff(p));
  EXPECT_NEAR(d.mean(), p / (1.0 - p), 1e-12);
}

TEST(PairDistribution, CutoffTailBelowThreshold) {
  for (double p : {0.001, 0.1, 0.5}) {
    const int n = default_fock_cutoff(p);
    EXPECT_LT(std::pow(p, n + 1), 1e-12);
    EXPECT_GE(std::pow(p, n), 1e-12 * (1.0 - 1e-9));
  }
}

TEST(PairDistribution, RejectsBadInputs) {
  EXPECT_THROW(pair_number_distribution(0.0, 10), std::invalid_argument);
  EXPECT_THROW(pair_number_distribution(1.0, 10), std::invalid_argument);
  EXPECT_THROW(pair_number_distribution(0.1, -1), std::invalid_argument);
}

// Moments computed directly from the truncated distribution.
TEST(IdealCorrelations, MatchDistributionMoments) {
  for (double p : {0.002, 0.01, 0.05, 0.2}) {
    // Three times the default cutoff leaves a negligible tail for third moments.
    const auto d = pair_number_distribution(p, 3 * default_fock_cutoff(p));
    double m1 = 0.0, m2 = 0.0, f2 = 0.0, f3 = 0.0;
    for (std::size_t n = 0; n < d.probs.size(); ++n) {
      const double x = static_cast<double>(n);
      m1 += x * d.probs[n];
      m2 += x * x * d.probs[n];
      f2 += x * (x - 1.0) * d.probs[n];
      f3 += x * (x - 1.0) * (x - 2.0) * d.probs[n];
    }
    EXPECT_NEAR(ideal_cross_correlation(p), m2 / (m1 * m1), 1e-9 * m2 / (m1 * m1)) << p;
    // alpha = <n(n-1)n> / <n n>^2 * <n>  (heralded autocorrelation)
    const double alpha = (f3 + 2.0 * f2) * m1 / (m2 * m2);
    EXPECT_NEAR(ideal_antibunching(p), alpha, 1e-9) << p;
  }
}

TEST(IdealCorrelations, Limits) {
  EXPECT_NEAR(ideal_cross_correlation(0.01), 101.0, 1e-9);
  EXPECT_LT(ideal_antibunching(1e-6), 1e-5);
  EXPECT_NEAR(ideal_antibunching(1.0 - 1e-9), 1.5, 1e-6);
}

TEST(DetectionProbabilities, NoiselessCaseIsPairProduct) {
  DlczSourceParams s;
  s.p = 0.01;
  s.eta_w = 0.4;
  s.eta_r = 0.3;
  s.eta_a = 0.5;
  s.p_se = 0.0;
  s.p_nw = 0.0;
  s.p_nr = 0.0;
  const auto d = detection_probabilities(s, 0.0);
  EXPECT_DOUBLE_EQ(d.write, 0.004);
  EXPECT_DOUBLE_EQ(d.read, 0.01 * 0.15);
  EXPECT_DOUBLE_EQ(d.joint, 0.004 * 0.15);
  EXPECT_NEAR(d.cross_correlation(), 1.0 / 0.01, 1e-9);
}

TEST(DetectionProbabilities, NoiseTermsAddAsWritten) {
  DlczSourceParams s;
  s.p = 0.02;
  s.eta_w = 0.2;
  s.eta_r = 0.1;
  s.eta_a = 0.4;
  s.p_se = 0.3;
  s.p_nw = 1e-4;
  s.p_nr = 2e-4;
  s.tau_dlcz_us = 10.0;
  const double t = 5.0;
  const double ea = 0.4 * std::exp(-0.25);
  const double pw = 0.02 * 0.2 + 1e-4;
  const double pr = 0.02 * ea * 0.1 + 0.02 * (1.0 - ea) * 0.3 * 0.1 + 2e-4;
  const double pwr = pw * (ea * 0.1 + 0.02 * (1.0 - ea) * 0.3 * 0.1 + 2e-4);
  const auto d = detection_probabilities(s, t);
  EXPECT_NEAR(d.write, pw, 1e-15);
  EXPECT_NEAR(d.read, pr, 1e-15);
  EXPECT_NEAR(d.joint, pwr, 1e-15);
  EXPECT_NEAR(d.conditional_read(), pwr / pw, 1e-12);
}

TEST(DetectionProbabilities, InvalidParamsThrow) {
  DlczSourceParams s;
  s.eta_a = 1.2;
  EXPECT_THROW(detection_probabilities(s, 0.0), std::invalid_argument);
  s = {};
  s.p = 0.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(RetrievalEfficiency, GaussianDecay) {
  DlczSourceParams s;
  s.eta_a = 0.385;
  s.tau_dlcz_us = 24.0;
  EXPECT_DOUBLE_EQ(retrieval_efficiency(s, 0.0), 0.385);
  EXPECT_NEAR(retrieval_efficiency(s, 24.0), 0.385 / std::exp(1.0), 1e-12);
}

TEST(CoherenceTime, ScalesAsInverseSqrtTemperature) {
  const double dk = 1e6;
  const double a = motional_coherence_time(constants::kRb87Mass, 1e-4, dk);
  const double b = motional_coherence_time(constants::kRb87Mass, 4e-4, dk);
  EXPECT_NEAR(a / b, 2.0, 1e-12);
  EXPECT_THROW(motional_coherence_time(constants::kRb87Mass, 0.0, dk), std::invalid_argument);
  EXPECT_THROW(motional_coherence_time(constants::kRb87Mass, 1e-4, -1.0), std::invalid_argument);
}

// Random parameter points: the closed form agrees with a direct sum over
// the photon-number distribution at first order in the efficiencies.
TEST(DetectionProbabilities, PropertyLowEfficiencyLimitOfPairSum) {
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    DlczSourceParams s;
    s.p = 1e-3 + 0.02 * rng.uniform();
    s.eta_w = 1e-4 * (1.0 + rng.uniform());
    s.eta_r = 1.0;
    s.eta_a = 1e-4 * (1.0 + rng.uniform());
    s.p_se = 0.0;
    s.p_nw = 0.0;
    s.p_nr = 0.0;
    const auto d = detection_probabilities(s, 0.0);
    const auto dist = pair_number_distribution(s.p, default_fock_cutoff(s.p));
    double pw = 0.0, pr = 0.0, pwr = 0.0;
    for (std::size_t n = 0; n < dist.probs.size(); ++n) {
      const double x = static_cast<double>(n);
      pw += dist.probs[n] * (1.0 - std::pow(1.0 - s.eta_w, x));
      pr += dist.probs[n] * (1.0 - std::pow(1.0 - s.eta_a, x));
      pwr += dist.probs[n] * (1.0 - std::pow(1.0 - s.eta_w, x)) * (1.0 - std::pow(1.0 - s.eta_a, x));
    }
    // detection_probabilities uses p where the exact mean is p / (1 - p).
    EXPECT_NEAR(d.write, pw, 2.0 * s.p * pw);
    EXPECT_NEAR(d.read, pr, 2.0 * s.p * pr);
    EXPECT_NEAR(pwr / (pw * pr), 1.0 + 1.0 / s.p, 1e-2 * (1.0 + 1.0 / s.p));
  }
}
