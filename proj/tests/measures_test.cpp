#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "srm/errors.hpp"
#include "srm/measures.hpp"

namespace {

using srm::QuadratureConfig;
using srm::QuantileSource;
using srm::WeightSpec;

QuadratureConfig fast() { return QuadratureConfig::replication(100'001); }

double normal_es_closed_form(double alpha) {
  const double z = srm::inverse_normal_cdf(alpha);
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi) / (1.0 - alpha);
}

TEST(Var, OperationExamples) {
  const auto normal = QuantileSource::standard_normal();
  EXPECT_NEAR(srm::var(normal, 0.95), 1.644854, 1e-6);
  EXPECT_EQ(srm::var(normal, 0.5), 0.0);
  std::vector<double> hundred;
  for (int i = 1; i <= 100; ++i) hundred.push_back(i);
  EXPECT_NEAR(srm::var(srm::load_empirical(hundred), 0.95), 95.05, 1e-12);
  EXPECT_THROW(srm::var(normal, 1.0), srm::DomainError);
  EXPECT_THROW(srm::var(normal, 0.0), srm::DomainError);
}

TEST(Es, OperationExamples) {
  const auto normal = QuantileSource::standard_normal();
  EXPECT_NEAR(normal_es_closed_form(0.95), 2.062713, 1e-6);
  EXPECT_NEAR(srm::es(normal, 0.95), 2.062713, 0.001);
  EXPECT_EQ(srm::es(QuantileSource::constant(4.2), 0.99), 4.2);
  EXPECT_NEAR(srm::es(normal, 1e-6), 0.0, 0.01);
  EXPECT_THROW(srm::es(normal, 1.0), srm::DomainError);
}

TEST(Es, SamePathAsGenericSrm) {
  const auto normal = QuantileSource::normal(0.3, 1.7);
  for (double alpha : {0.5, 0.9, 0.99}) {
    for (const auto& config : {QuadratureConfig::converged(), fast()}) {
      EXPECT_NEAR(srm::es(normal, alpha, config),
                  srm::srm(normal, WeightSpec::expected_shortfall(alpha), config), 1e-10);
    }
  }
}

TEST(ExponentialSrm, ReferenceValuesAtDefaultGrid) {
  const auto normal = QuantileSource::standard_normal();
  EXPECT_NEAR(srm::exponential_srm(normal, 1.0), 0.2781, 0.001);
  EXPECT_NEAR(srm::exponential_srm(normal, 25.0), 1.9549, 0.001);
  EXPECT_NEAR(srm::exponential_srm(QuantileSource::constant(4.2), 100.0), 4.2, 1e-6);
  EXPECT_THROW(srm::exponential_srm(normal, -1.0), srm::ParameterError);
}

TEST(PowerSrm, ReferenceValuesAtDefaultGrid) {
  const auto normal = QuantileSource::standard_normal();
  EXPECT_NEAR(srm::power_srm(normal, 0.5), 0.7026, 0.01);
  EXPECT_NEAR(srm::power_srm(normal, 0.9), 0.0968, 0.002);
  EXPECT_NEAR(srm::power_srm(QuantileSource::constant(4.2), 0.3), 4.2, 1e-6);
  EXPECT_THROW(srm::power_srm(normal, 1.0), srm::ParameterError);
}

TEST(Srm, LocationScaleEquivariance) {
  const auto std_normal = QuantileSource::standard_normal();
  const double mu = 0.75;
  const double sigma = 2.5;
  const auto scaled = QuantileSource::normal(0.0, sigma);
  const auto shifted = QuantileSource::normal(mu, sigma);
  for (double a : {1.0, 5.0, 25.0}) {
    const double base = srm::exponential_srm(std_normal, a, fast());
    EXPECT_NEAR(srm::exponential_srm(scaled, a, fast()), sigma * base, 1e-12);
    // The dropped infinite endpoints also drop their share of the shift.
    const double endpoint_mass = srm::weight(WeightSpec::exponential(a), 1.0) / 3.0 / 100'000.0;
    EXPECT_NEAR(srm::exponential_srm(shifted, a, fast()), mu + sigma * base, 1.5 * mu * endpoint_mass);
  }
  const double base = srm::exponential_srm(std_normal, 5.0, QuadratureConfig::converged());
  EXPECT_NEAR(srm::exponential_srm(shifted, 5.0, QuadratureConfig::converged()), mu + sigma * base,
              1e-6);
}

TEST(Srm, ExponentialStrictlyIncreasingInAversion) {
  const auto normal = QuantileSource::standard_normal();
  double previous = -1.0;
  for (double a : {1.0, 5.0, 25.0, 100.0}) {
    const double v = srm::exponential_srm(normal, a, fast());
    EXPECT_GT(v, previous) << "a = " << a;
    previous = v;
  }
}

TEST(Srm, PowerRisesThenFalls) {
  const auto normal = QuantileSource::standard_normal();
  const double v002 = srm::power_srm(normal, 0.02, fast());
  const double v011 = srm::power_srm(normal, 0.11, fast());
  const double v05 = srm::power_srm(normal, 0.5, fast());
  const double v09 = srm::power_srm(normal, 0.9, fast());
  EXPECT_LT(v002, v011);
  EXPECT_GT(v011, v05);
  EXPECT_GT(v05, v09);
}

TEST(Srm, EmpiricalValuesStayWithinSampleRange) {
  std::mt19937_64 rng(99);
  std::lognormal_distribution<double> loss(0.0, 1.0);
  std::vector<double> sample(257);
  for (double& x : sample) x = 10.0 + loss(rng);
  const auto src = srm::load_empirical(sample);
  const double lo = *std::min_element(sample.begin(), sample.end());
  const double hi = *std::max_element(sample.begin(), sample.end());
  const double slack = 1e-9 * hi;
  for (const auto& spec : {WeightSpec::exponential(1.0), WeightSpec::exponential(100.0),
                           WeightSpec::power(0.05), WeightSpec::power(0.9),
                           WeightSpec::expected_shortfall(0.99), WeightSpec::flat()}) {
    for (const auto& config : {fast(), QuadratureConfig::converged()}) {
      const double v = srm::srm(src, spec, config);
      EXPECT_GE(v, lo - slack) << to_string(spec.family()) << " " << spec.parameter();
      EXPECT_LE(v, hi + slack) << to_string(spec.family()) << " " << spec.parameter();
    }
  }
}

TEST(Srm, ConstantSourceIsExact) {
  const auto constant = QuantileSource::constant(-3.5);
  for (const auto& spec : {WeightSpec::exponential(2.0), WeightSpec::power(0.01), WeightSpec::flat()}) {
    EXPECT_EQ(srm::srm(constant, spec, QuadratureConfig{}), -3.5);
  }
}

TEST(Lpm, OperationExamples) {
  const double above[] = {1.0, 2.0, 3.0};
  for (double k : {0.0, 0.5, 1.0, 2.0}) EXPECT_EQ(srm::lpm(above, 0.0, k), 0.0);
  const double pair[] = {-1.0, 1.0};
  EXPECT_DOUBLE_EQ(srm::lpm(pair, 0.0, 1.0), 0.5);
  const double three[] = {-2.0, -1.0, 3.0};
  EXPECT_NEAR(srm::lpm(three, 0.0, 2.0), 5.0 / 3.0, 1e-15);
  EXPECT_THROW(srm::lpm(std::span<const double>{}, 0.0, 1.0), srm::DataError);
  EXPECT_THROW(srm::lpm(pair, 0.0, -1.0), srm::ParameterError);
}

TEST(Lpm, OrderZeroAndOneRecoverShortfallStatistics) {
  const double returns[] = {-3.0, -1.0, 0.0, 0.5, 2.0, 4.0};
  // k = 0: probability of falling strictly below target (0^0 = 0 at the target).
  EXPECT_DOUBLE_EQ(srm::lpm(returns, 0.0, 0.0), 2.0 / 6.0);
  // k = 1: expected shortfall below target.
  EXPECT_DOUBLE_EQ(srm::lpm(returns, 0.0, 1.0), (3.0 + 1.0) / 6.0);
  EXPECT_DOUBLE_EQ(srm::lpm(returns, 1.0, 0.0), 4.0 / 6.0);
}

TEST(RiskMeasure, EvaluateDispatches) {
  const auto normal = QuantileSource::standard_normal();
  EXPECT_EQ(srm::evaluate(srm::RiskMeasure::value_at_risk(0.95), normal), srm::var(normal, 0.95));
  EXPECT_EQ(srm::evaluate(srm::RiskMeasure::expected_shortfall(0.95), normal), srm::es(normal, 0.95));
  EXPECT_EQ(srm::evaluate(srm::RiskMeasure::spectral(WeightSpec::exponential(5.0), fast()), normal),
            srm::exponential_srm(normal, 5.0, fast()));
  EXPECT_THROW(srm::RiskMeasure::value_at_risk(1.5), srm::ParameterError);
}

}  // namespace
