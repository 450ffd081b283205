#include "srm/risk_aversion.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "format.hpp"
#include "srm/errors.hpp"
#include "srm/quadrature.hpp"

namespace srm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError(std::string(what) + ": argument must lie in [0,1], got " +
                      detail::shortest(p));
  }
}

}  // namespace

std::string_view to_string(WeightFamily family) {
  switch (family) {
    case WeightFamily::exponential: return "exponential";
    case WeightFamily::power: return "power";
    case WeightFamily::es: return "es";
    case WeightFamily::flat: return "flat";
  }
  return "unknown";
}

WeightFamily parse_weight_family(std::string_view name) {
  if (name == "exponential") return WeightFamily::exponential;
  if (name == "power") return WeightFamily::power;
  if (name == "es") return WeightFamily::es;
  if (name == "flat") return WeightFamily::flat;
  throw ParameterError("unknown weight family '" + std::string(name) + "'");
}

WeightSpec WeightSpec::exponential(double a) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw ParameterError("exponential weight: a must be > 0, got " + detail::shortest(a));
  }
  WeightSpec s;
  s.family_ = WeightFamily::exponential;
  s.a_ = a;
  s.lambda_ = a / -std::expm1(-a);
  return s;
}

WeightSpec WeightSpec::exponential_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ParameterError("exponential weight: gamma must be > 0, got " + detail::shortest(gamma));
  }
  return exponential(1.0 / gamma);
}

WeightSpec WeightSpec::power(double c) {
  if (!(c > 0.0 && c < 1.0)) {
    throw ParameterError("power weight: c must lie in (0,1), got " + detail::shortest(c));
  }
  WeightSpec s;
  s.family_ = WeightFamily::power;
  s.c_ = c;
  // phi = lambda (1-p)^{c-1} / (1-c) with lambda = c(1-c).
  s.lambda_ = c * (1.0 - c);
  return s;
}

WeightSpec WeightSpec::expected_shortfall(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ParameterError("es weight: alpha must lie in (0,1), got " + detail::shortest(alpha));
  }
  WeightSpec s;
  s.family_ = WeightFamily::es;
  s.alpha_ = alpha;
  s.lambda_ = 1.0 / (1.0 - alpha);
  return s;
}

WeightSpec WeightSpec::flat() { return WeightSpec{}; }

WeightSpec WeightSpec::make(WeightFamily family, double param) {
  switch (family) {
    case WeightFamily::exponential: return exponential(param);
    case WeightFamily::power: return power(param);
    case WeightFamily::es: return expected_shortfall(param);
    case WeightFamily::flat: return flat();
  }
  return flat();
}

double WeightSpec::parameter() const noexcept {
  switch (family_) {
    case WeightFamily::exponential: return a_;
    case WeightFamily::power: return c_;
    case WeightFamily::es: return alpha_;
    case WeightFamily::flat: return 0.0;
  }
  return 0.0;
}

double weight(const WeightSpec& spec, double p) {
  require_probability(p, "weight");
  switch (spec.family()) {
    case WeightFamily::exponential: return spec.lambda() * std::exp(-spec.a() * (1.0 - p));
    case WeightFamily::power:
      if (p == 1.0) throw SingularityError("power weight is infinite at p = 1");
      return spec.c() * std::pow(1.0 - p, spec.c() - 1.0);
    case WeightFamily::es: return p >= spec.alpha() ? spec.lambda() : 0.0;
    case WeightFamily::flat: return 1.0;
  }
  return 0.0;
}

double weight_at_tail(const WeightSpec& spec, double tail) {
  require_probability(tail, "weight_at_tail");
  switch (spec.family()) {
    case WeightFamily::exponential: return spec.lambda() * std::exp(-spec.a() * tail);
    case WeightFamily::power:
      if (tail == 0.0) throw SingularityError("power weight is infinite at p = 1");
      return spec.c() * std::pow(tail, spec.c() - 1.0);
    case WeightFamily::es: return tail <= 1.0 - spec.alpha() ? spec.lambda() : 0.0;
    case WeightFamily::flat: return 1.0;
  }
  return 0.0;
}

double weight_mass_upper(const WeightSpec& spec, double tail) {
  require_probability(tail, "weight_mass_upper");
  switch (spec.family()) {
    case WeightFamily::exponential:
      return std::expm1(-spec.a() * tail) / std::expm1(-spec.a());
    case WeightFamily::power: return std::pow(tail, spec.c());
    case WeightFamily::es: return std::min(tail, 1.0 - spec.alpha()) * spec.lambda();
    case WeightFamily::flat: return tail;
  }
  return 0.0;
}

double weight_mass_lower(const WeightSpec& spec, double p) {
  require_probability(p, "weight_mass_lower");
  switch (spec.family()) {
    case WeightFamily::exponential:
      return (std::exp(-spec.a() * (1.0 - p)) - std::exp(-spec.a())) / -std::expm1(-spec.a());
    case WeightFamily::power: return -std::expm1(spec.c() * std::log1p(-p));
    case WeightFamily::es: return std::max(0.0, p - spec.alpha()) * spec.lambda();
    case WeightFamily::flat: return p;
  }
  return 0.0;
}

void to_json(nlohmann::json& j, const WeightSpec& spec) {
  j = nlohmann::json{{"family", std::string(to_string(spec.family()))}};
  switch (spec.family()) {
    case WeightFamily::exponential: j["a"] = spec.a(); break;
    case WeightFamily::power: j["c"] = spec.c(); break;
    case WeightFamily::es: j["alpha"] = spec.alpha(); break;
    case WeightFamily::flat: break;
  }
}

void from_json(const nlohmann::json& j, WeightSpec& spec) { spec = weight_spec_from_json(j); }

WeightSpec weight_spec_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string()) {
    throw ParameterError("weight spec JSON needs a string \"family\" field");
  }
  auto number = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw ParameterError(std::string("weight spec JSON: missing numeric \"") + key + "\"");
    }
    return j[key].get<double>();
  };
  switch (parse_weight_family(j["family"].get<std::string>())) {
    case WeightFamily::exponential:
      if (j.contains("a") && j.contains("gamma")) {
        throw ParameterError("weight spec JSON: give either \"a\" or \"gamma\", not both");
      }
      if (j.contains("gamma")) return WeightSpec::exponential_gamma(number("gamma"));
      return WeightSpec::exponential(number("a"));
    case WeightFamily::power: return WeightSpec::power(number("c"));
    case WeightFamily::es: return WeightSpec::expected_shortfall(number("alpha"));
    case WeightFamily::flat: return WeightSpec::flat();
  }
  return WeightSpec::flat();
}

void to_json(nlohmann::json& j, const AdmissibilityReport& r) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
  j = nlohmann::json{
      {"positivity", r.positivity.pass},
      {"positivity_worst_p", num(r.positivity.worst_p)},
      {"positivity_worst_value", num(r.positivity.worst_value)},
      {"normalisation", r.normalisation.pass},
      {"normalisation_integral", num(r.normalisation.integral)},
      {"normalisation_tolerance", r.normalisation.tolerance},
      {"increasingness", r.increasingness.pass},
      {"increasingness_worst_p_lo", num(r.increasingness.worst_p_lo)},
      {"increasingness_worst_p_hi", num(r.increasingness.worst_p_hi)},
      {"increasingness_worst_drop", num(r.increasingness.worst_drop)},
      {"increasingness_tolerance", r.increasingness.tolerance},
      {"strict_rise", r.strict_rise},
      {"non_finite_points", r.non_finite_points},
      {"grid_size", r.grid_size},
  };
}

namespace {

// phi_tail(t) evaluates phi(1 - t); the spec overload supplies an exact tail
// form, the callable overload one built from 1 - t.
AdmissibilityReport check_admissibility_impl(const std::function<double(double)>& phi,
                                             const std::function<double(double)>& phi_tail,
                                             std::size_t grid_size, int max_halvings) {
  if (grid_size < 3) throw ParameterError("check_admissibility: grid_size must be >= 3");

  AdmissibilityReport report;
  report.grid_size = grid_size;

  const double denom = static_cast<double>(grid_size + 1);
  std::vector<double> values(grid_size);
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double p = static_cast<double>(i + 1) / denom;
    double v = kNaN;
    try {
      v = phi(p);
    } catch (const std::exception&) {
      v = kNaN;
    }
    values[i] = v;
    if (!std::isfinite(v)) {
      if (report.non_finite_points == 0) {
        report.positivity.worst_p = p;
        report.positivity.worst_value = v;
      }
      ++report.non_finite_points;
      report.positivity.pass = false;
      continue;
    }
    if (v < 0.0 && (report.positivity.pass || v < report.positivity.worst_value)) {
      report.positivity.pass = false;
      report.positivity.worst_p = p;
      report.positivity.worst_value = v;
    }
  }

  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < grid_size; ++i) {
    const double diff = values[i + 1] - values[i];
    if (std::isnan(diff)) {
      report.increasingness.pass = false;
      continue;
    }
    if (diff < worst) {
      worst = diff;
      report.increasingness.worst_p_lo = static_cast<double>(i + 1) / denom;
      report.increasingness.worst_p_hi = static_cast<double>(i + 2) / denom;
    }
    if (diff > -report.increasingness.tolerance) report.strict_rise = true;
  }
  report.increasingness.worst_drop = worst;
  if (worst < report.increasingness.tolerance) report.increasingness.pass = false;

  try {
    auto integrand = [&](const Abscissa& at) {
      return at.from_hi < 0.5 ? phi_tail(at.from_hi) : phi(at.x);
    };
    const auto result = integrate_singular(integrand, 0.0, 1.0, 1e-10, {}, max_halvings);
    report.normalisation.integral = result.value;
    report.normalisation.pass =
        std::abs(result.value - 1.0) <= report.normalisation.tolerance;
  } catch (const std::exception&) {
    report.normalisation.integral = kNaN;
    report.normalisation.pass = false;
  }
  return report;
}

}  // namespace

AdmissibilityReport check_admissibility(const std::function<double(double)>& phi,
                                        std::size_t grid_size) {
  // Panel distances are powers of two, so 1 - d stays exact down to 2^-40.
  return check_admissibility_impl(
      phi, [&](double t) { return phi(1.0 - t); }, grid_size, 40);
}

AdmissibilityReport check_admissibility(const WeightSpec& spec, std::size_t grid_size) {
  return check_admissibility_impl([&](double p) { return weight(spec, p); },
                                  [&](double t) { return weight_at_tail(spec, t); },
                                  grid_size, kMaxHalvings);
}

double utility_exponential(double x, double a) {
  if (!(a > 0.0)) throw ParameterError("utility_exponential: a must be > 0");
  return -std::exp(-a * x);
}

double utility_power(double x, double c) {
  if (!(c > 0.0 && c < 1.0)) throw ParameterError("utility_power: c must lie in (0,1)");
  if (!(x > 0.0)) throw DomainError("utility_power: x must be > 0");
  return std::pow(x, 1.0 - c) / (1.0 - c);
}

double ara(const std::function<double(double)>& utility, double x, double step) {
  if (!(step > 0.0)) throw ParameterError("ara: step must be > 0");
  const double up = utility(x + step);
  const double mid = utility(x);
  const double down = utility(x - step);
  const double first = (up - down) / (2.0 * step);
  const double second = (up - 2.0 * mid + down) / (step * step);
  if (std::abs(first) <= 1e-12) {
    throw NumericError("ara: U'(x) vanishes at x = " + detail::shortest(x));
  }
  return -second / first;
}

double rra(const std::function<double(double)>& utility, double x, double step) {
  return x * ara(utility, x, step);
}

}  // namespace srm
