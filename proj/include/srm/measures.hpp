// measures.hpp
//
// User-facing risk measures on a QuantileSource: VaR, expected shortfall,
// the exponential and power spectral measures, the generic spectral measure
// for any WeightSpec, and lower partial moments of a return sample.

#pragma once

#include <span>

#include "srm/distributions.hpp"
#include "srm/quadrature.hpp"
#include "srm/risk_aversion.hpp"

namespace srm {

/// VaR_alpha = q_alpha. No quadrature: the weight is a point mass at alpha.
double var(const QuantileSource& source, double alpha);

/// ES with the converged scheme.
double es(const QuantileSource& source, double alpha);
/// ES_alpha = 1/(1-alpha) int_alpha^1 q_p dp; same path as srm() with the es spec.
double es(const QuantileSource& source, double alpha, const QuadratureConfig& config);

/// Spectral measure int_0^1 phi(p) q_p dp. A constant source returns its
/// value exactly.
double srm(const QuantileSource& source, const WeightSpec& spec, const QuadratureConfig& config);

double exponential_srm(const QuantileSource& source, double a, const QuadratureConfig& config = {});
double power_srm(const QuantileSource& source, double c, const QuadratureConfig& config = {});

/// Lower partial moment E[max(0, target - r)^order], with 0^0 = 0 so that
/// order 0 gives the fraction strictly below target.
double lpm(std::span<const double> returns, double target, double order);

enum class MeasureKind { var, es, srm };

/// A fully specified risk measure: which measure, its parameters, and the
/// quadrature used where one is needed.
struct RiskMeasure {
  MeasureKind kind = MeasureKind::srm;
  double alpha = 0.95;
  WeightSpec spec = WeightSpec::flat();
  QuadratureConfig config{};

  static RiskMeasure value_at_risk(double alpha);
  static RiskMeasure expected_shortfall(double alpha, QuadratureConfig config = QuadratureConfig::converged());
  static RiskMeasure spectral(WeightSpec spec, QuadratureConfig config = {});

  /// Throws ParameterError when the parameters of `kind` are out of range.
  void validate() const;
};

double evaluate(const RiskMeasure& measure, const QuantileSource& source);

}  // namespace srm
