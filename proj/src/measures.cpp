#include "srm/measures.hpp"

#include <cmath>
#include <string>

#include "format.hpp"
#include "srm/errors.hpp"

namespace srm {

double var(const QuantileSource& source, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("var: alpha must lie in (0,1), got " + detail::shortest(alpha));
  }
  return source.quantile(alpha);
}

double es(const QuantileSource& source, double alpha) {
  return es(source, alpha, QuadratureConfig::converged());
}

double es(const QuantileSource& source, double alpha, const QuadratureConfig& config) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("es: alpha must lie in (0,1), got " + detail::shortest(alpha));
  }
  return srm(source, WeightSpec::expected_shortfall(alpha), config);
}

double srm(const QuantileSource& source, const WeightSpec& spec, const QuadratureConfig& config) {
  config.validate();
  if (source.kind() == SourceKind::constant) return source.value();
  return srm_integrate(source, spec, config).value;
}

double exponential_srm(const QuantileSource& source, double a, const QuadratureConfig& config) {
  return srm(source, WeightSpec::exponential(a), config);
}

double power_srm(const QuantileSource& source, double c, const QuadratureConfig& config) {
  return srm(source, WeightSpec::power(c), config);
}

double lpm(std::span<const double> returns, double target, double order) {
  if (returns.empty()) throw DataError("lpm: sample is empty");
  if (!(order >= 0.0)) throw ParameterError("lpm: order must be >= 0");
  double sum = 0.0;
  for (double r : returns) {
    const double shortfall = target - r;
    if (shortfall > 0.0) sum += order == 0.0 ? 1.0 : std::pow(shortfall, order);
  }
  return sum / static_cast<double>(returns.size());
}

RiskMeasure RiskMeasure::value_at_risk(double alpha) {
  RiskMeasure m;
  m.kind = MeasureKind::var;
  m.alpha = alpha;
  m.validate();
  return m;
}

RiskMeasure RiskMeasure::expected_shortfall(double alpha, QuadratureConfig config) {
  RiskMeasure m;
  m.kind = MeasureKind::es;
  m.alpha = alpha;
  m.spec = WeightSpec::expected_shortfall(alpha);
  m.config = config;
  m.validate();
  return m;
}

RiskMeasure RiskMeasure::spectral(WeightSpec spec, QuadratureConfig config) {
  RiskMeasure m;
  m.kind = MeasureKind::srm;
  m.spec = spec;
  m.config = config;
  m.validate();
  return m;
}

void RiskMeasure::validate() const {
  if (kind != MeasureKind::srm && !(alpha > 0.0 && alpha < 1.0)) {
    throw ParameterError("alpha must lie in (0,1), got " + detail::shortest(alpha));
  }
  if (kind != MeasureKind::var) config.validate();
}

double evaluate(const RiskMeasure& measure, const QuantileSource& source) {
  switch (measure.kind) {
    case MeasureKind::var: return var(source, measure.alpha);
    case MeasureKind::es: return es(source, measure.alpha, measure.config);
    case MeasureKind::srm: return srm(source, measure.spec, measure.config);
  }
  return 0.0;
}

}  // namespace srm
