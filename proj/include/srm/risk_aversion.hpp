// risk_aversion.hpp
//
// Utility functions, their Arrow-Pratt coefficients, and the risk-aversion
// weight functions phi(p) they induce over cumulative loss probabilities.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace srm {

enum class WeightFamily { exponential, power, es, flat };

std::string_view to_string(WeightFamily family);
WeightFamily parse_weight_family(std::string_view name);

/// A normalized risk-aversion weight function. Parameters are validated at
/// construction; lambda() is the normalization constant of the family.
class WeightSpec {
 public:
  /// phi(p) = a e^{-a(1-p)} / (1 - e^{-a}), a > 0.
  static WeightSpec exponential(double a);
  /// Exponential family in the gamma parameterization, a = 1 / gamma.
  static WeightSpec exponential_gamma(double gamma);
  /// phi(p) = c (1-p)^{c-1}, 0 < c < 1.
  static WeightSpec power(double c);
  /// phi(p) = 1/(1-alpha) on [alpha, 1], 0 elsewhere.
  static WeightSpec expected_shortfall(double alpha);
  /// phi(p) = 1. Admissible but not strictly rising.
  static WeightSpec flat();
  /// Single-parameter constructor used by sweeps; flat ignores `param`.
  static WeightSpec make(WeightFamily family, double param);

  WeightFamily family() const noexcept { return family_; }
  double a() const noexcept { return a_; }
  double c() const noexcept { return c_; }
  double alpha() const noexcept { return alpha_; }
  double lambda() const noexcept { return lambda_; }

  /// The family's sweepable parameter (a, c or alpha; 0 for flat).
  double parameter() const noexcept;

  bool operator==(const WeightSpec&) const = default;

 private:
  WeightSpec() = default;

  WeightFamily family_ = WeightFamily::flat;
  double a_ = 0.0;
  double c_ = 0.0;
  double alpha_ = 0.0;
  double lambda_ = 1.0;
};

/// phi(p). p in [0,1]; the power family throws SingularityError at p = 1.
double weight(const WeightSpec& spec, double p);

/// phi(1 - tail), evaluated without forming 1 - tail. tail in [0,1].
double weight_at_tail(const WeightSpec& spec, double tail);

/// Exact weight mass on [1 - tail, 1].
double weight_mass_upper(const WeightSpec& spec, double tail);

/// Exact weight mass on [0, p].
double weight_mass_lower(const WeightSpec& spec, double p);

void to_json(nlohmann::json& j, const WeightSpec& spec);
void from_json(const nlohmann::json& j, WeightSpec& spec);
WeightSpec weight_spec_from_json(const nlohmann::json& j);

struct AdmissibilityReport {
  struct Positivity {
    bool pass = true;
    double worst_p = 0.0;
    double worst_value = 0.0;
  } positivity;
  struct Normalisation {
    bool pass = false;
    double integral = 0.0;
    double tolerance = 1e-6;
  } normalisation;
  struct Increasingness {
    bool pass = true;
    double worst_p_lo = 0.0;
    double worst_p_hi = 0.0;
    double worst_drop = 0.0;  // phi(p_hi) - phi(p_lo), most negative pair
    double tolerance = -1e-12;
  } increasingness;
  bool strict_rise = false;
  std::size_t grid_size = 0;
  std::size_t non_finite_points = 0;

  /// Conditions 1-3 (positivity, normalisation, increasingness).
  bool admissible() const noexcept {
    return positivity.pass && normalisation.pass && increasingness.pass;
  }
  bool all_pass() const noexcept { return admissible() && strict_rise; }
};

void to_json(nlohmann::json& j, const AdmissibilityReport& report);

/// Checks the admissibility conditions of an arbitrary weight callable defined
/// on (0,1), sampled at p_i = i / (grid_size + 1). The normalisation integral is
/// computed with singularity-aware quadrature; non-finite samples are reported
/// as failures rather than thrown.
AdmissibilityReport check_admissibility(const std::function<double(double)>& phi,
                                        std::size_t grid_size);
AdmissibilityReport check_admissibility(const WeightSpec& spec, std::size_t grid_size);

/// U(x) = -e^{-a x}.
double utility_exponential(double x, double a);
/// U(x) = x^{1-c} / (1-c), x > 0.
double utility_power(double x, double c);

/// Absolute risk aversion -U''(x)/U'(x) by central differences, O(step^2).
double ara(const std::function<double(double)>& utility, double x, double step);
/// Relative risk aversion x * ara.
double rra(const std::function<double(double)>& utility, double x, double step);

}  // namespace srm
