#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "srm/analysis.hpp"
#include "srm/errors.hpp"
#include "srm/measures.hpp"
#include "srm/quadrature.hpp"
#include "srm/risk_aversion.hpp"

namespace {

using srm::QuadratureConfig;
using srm::QuantileSource;
using srm::WeightFamily;
using srm::WeightSpec;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
  void near(double actual, double expected, double tol, const std::string& what) {
    detail << " " << what << "=" << actual;
    expect(std::abs(actual - expected) <= tol, what + " not within " + std::to_string(tol) +
                                                  " of " + std::to_string(expected));
  }
};

double bisect_normal_quantile(double p) {
  double lo = -40.0;
  double hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (0.5 * std::erfc(-mid / std::numbers::sqrt2) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void exponential_reference(Verdict& v) {
  const auto normal = QuantileSource::standard_normal();
  const auto config = QuadratureConfig::replication(srm::kDefaultGridPoints);
  const double a[] = {1.0, 5.0, 25.0, 100.0};
  const double expected[] = {0.2781, 1.0816, 1.9549, 2.5055};
  for (int i = 0; i < 4; ++i) {
    v.near(srm::exponential_srm(normal, a[i], config), expected[i], 0.001,
           "a" + std::to_string(static_cast<int>(a[i])));
  }
}

void power_reference(Verdict& v) {
  const auto normal = QuantileSource::standard_normal();
  const auto config = QuadratureConfig::replication(srm::kDefaultGridPoints);
  v.near(srm::power_srm(normal, 0.9, config), 0.0968, 0.002, "c0.9");
  v.near(srm::power_srm(normal, 0.5, config), 0.7026, 0.01, "c0.5");
  const double rep = srm::power_srm(normal, 0.1, config);
  v.near(rep, 1.9278, 0.1, "c0.1");
  const double conv = srm::power_srm(normal, 0.1, QuadratureConfig::converged());
  v.detail << " c0.1_converged=" << conv << " c0.1_gap=" << conv - rep;
  v.expect(conv > rep, "replication should approach the converged value from below");
}

void exponential_sweep(Verdict& v) {
  const auto grid = srm::log_grid(0.5, 100.0, 20);
  const auto sweep =
      srm::sweep_srm(WeightFamily::exponential, grid, QuantileSource::standard_normal());
  for (std::size_t i = 0; i + 1 < sweep.rows.size(); ++i) {
    v.expect(sweep.rows[i + 1].value > sweep.rows[i].value,
             "not increasing at a=" + std::to_string(sweep.rows[i + 1].param));
  }
  v.detail << " first=" << sweep.rows.front().value << " last=" << sweep.rows.back().value;
}

void power_sweep(Verdict& v) {
  const auto normal = QuantileSource::standard_normal();
  const auto sweep =
      srm::sweep_srm(WeightFamily::power, srm::linear_grid(0.01, 0.99, 99), normal);
  const auto peak = srm::find_peak(sweep);
  v.detail << " n=" << sweep.config.n_points << " peak_c=" << peak.param;
  v.expect(peak.param >= 0.05 && peak.param <= 0.20, "peak outside [0.05, 0.20]");
  const double ends[] = {0.005, 0.995};
  const auto edge = srm::sweep_srm(WeightFamily::power, ends, normal);
  v.detail << " c0.005=" << edge.rows[0].value << " c0.995=" << edge.rows[1].value;
  v.expect(edge.rows[0].value < 0.25, "c=0.005 not below 0.25");
  v.expect(edge.rows[1].value < 0.05, "c=0.995 not below 0.05");
}

void closed_form_es(Verdict& v) {
  const double z = bisect_normal_quantile(0.95);
  const double oracle = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi) / 0.05;
  v.near(oracle, 2.062713, 1e-6, "oracle");
  v.near(srm::es(QuantileSource::standard_normal(), 0.95), oracle, 0.001, "es");
}

void degenerate(Verdict& v) {
  const double level = 4.2;
  const auto constant = QuantileSource::constant(level);
  double worst = 0.0;
  auto track = [&](double value) { worst = std::max(worst, std::abs(value - level)); };
  const std::vector<WeightSpec> specs = {WeightSpec::exponential(1.0), WeightSpec::exponential(100.0),
                                         WeightSpec::power(0.1), WeightSpec::power(0.9),
                                         WeightSpec::expected_shortfall(0.95), WeightSpec::flat()};
  const std::vector<QuadratureConfig> configs = {
      QuadratureConfig::replication(srm::kDefaultGridPoints),
      QuadratureConfig::replication(1001, srm::EndpointPolicy::clip_epsilon),
      QuadratureConfig::converged()};
  for (double alpha : {0.5, 0.95, 0.99}) {
    track(srm::var(constant, alpha));
    track(srm::es(constant, alpha));
  }
  for (const auto& spec : specs) {
    for (const auto& config : configs) track(srm::srm(constant, spec, config));
    track(srm::srm_converged(constant, spec, 1e-10).value);
    if (spec.family() == WeightFamily::exponential || spec.family() == WeightFamily::flat) {
      track(srm::srm_replication(constant, spec, QuadratureConfig::replication(100'001)).value);
    }
  }
  v.detail << " worst_deviation=" << worst;
  v.expect(worst <= 1e-6, "deviation above 1e-6");
}

void coherence(Verdict& v) {
  const auto start = std::chrono::steady_clock::now();
  const auto measure = srm::RiskMeasure::spectral(WeightSpec::exponential(5.0),
                                                  srm::sweep_default_config());
  const auto report = srm::subadditivity_check(measure, 500, 1000, 20070311);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  v.detail << " violations=" << report.violations << " worst_gap=" << report.worst_gap
           << " seconds=" << seconds;
  v.expect(report.trials == 1000 && report.violations == 0, "subadditivity violated");
  v.expect(seconds < 300.0, "slower than 5 minutes");

  // Two independent losses of 10 with probability 1/25, all 625 joint states.
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> sum;
  for (int i = 0; i < 25; ++i) {
    for (int j = 0; j < 25; ++j) {
      a.push_back(i == 0 ? 10.0 : 0.0);
      b.push_back(j == 0 ? 10.0 : 0.0);
      sum.push_back(a.back() + b.back());
    }
  }
  auto brute_var = [](const std::vector<double>& losses, double alpha) {
    for (double x : {0.0, 10.0, 20.0}) {
      double below = 0.0;
      for (double l : losses) below += l <= x ? 1.0 : 0.0;
      if (below / static_cast<double>(losses.size()) >= alpha) return x;
    }
    return 20.0;
  };
  v.expect(brute_var(a, 0.95) + brute_var(b, 0.95) < brute_var(sum, 0.95),
           "enumeration does not break VaR subadditivity");
  const auto pair = srm::subadditivity_pair(srm::RiskMeasure::value_at_risk(0.95), a, b);
  v.detail << " var_gap=" << pair.gap;
  v.expect(pair.violation, "VaR counterexample not flagged");
}

void admissibility(Verdict& v) {
  const std::size_t grid = 10001;
  for (const auto& spec : {WeightSpec::exponential(0.5), WeightSpec::exponential(5.0),
                           WeightSpec::exponential(100.0), WeightSpec::power(0.1),
                           WeightSpec::power(0.5), WeightSpec::power(0.9)}) {
    const auto report = srm::check_admissibility(spec, grid);
    v.expect(report.admissible() && report.strict_rise,
             std::string(to_string(spec.family())) + " " + std::to_string(spec.parameter()) +
                 " not admissible");
  }
  const auto flat = srm::check_admissibility(WeightSpec::flat(), grid);
  v.expect(flat.admissible(), "flat should pass conditions 1-3");
  v.expect(!flat.strict_rise, "flat should fail strict rise");
  v.detail << " flat_strict_rise=" << (flat.strict_rise ? "true" : "false");
}

void numerical_analysis(Verdict& v) {
  double worst_coeff = 0.0;
  for (double x : {0.5, 1.0, 2.0}) {
    for (double a : {0.5, 2.0, 5.0}) {
      auto u = [a](double t) { return srm::utility_exponential(t, a); };
      worst_coeff = std::max(worst_coeff, std::abs(srm::ara(u, x, 1e-4) - a));
      worst_coeff = std::max(worst_coeff, std::abs(srm::rra(u, x, 1e-4) - a * x));
    }
    for (double c : {0.1, 0.5, 0.9}) {
      auto u = [c](double t) { return srm::utility_power(t, c); };
      worst_coeff = std::max(worst_coeff, std::abs(srm::ara(u, x, 1e-4) - c / x));
      worst_coeff = std::max(worst_coeff, std::abs(srm::rra(u, x, 1e-4) - c));
    }
  }
  v.detail << " coeff_err=" << worst_coeff;
  v.expect(worst_coeff <= 1e-5, "ARA/RRA error above 1e-5");

  double worst_mass = 0.0;
  for (double c : {0.1, 0.5, 0.9}) {
    const auto spec = WeightSpec::power(c);
    for (double eps : {1e-3, 1e-7}) {
      auto integrand = [&](const srm::Abscissa& at) {
        return at.from_hi < 0.5 ? srm::weight_at_tail(spec, eps + at.from_hi)
                                : srm::weight(spec, at.x);
      };
      const auto r = srm::integrate_singular(integrand, 0.0, 1.0 - eps, 1e-14);
      worst_mass = std::max(worst_mass, std::abs(r.value - (1.0 - std::pow(eps, c))));
    }
  }
  v.detail << " mass_err=" << worst_mass;
  v.expect(worst_mass <= 1e-12, "partial mass error above 1e-12");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria = {
      {"exponential table", exponential_reference},
      {"power table", power_reference},
      {"exponential sweep rises", exponential_sweep},
      {"power sweep hump", power_sweep},
      {"closed-form expected shortfall", closed_form_es},
      {"constant-loss exactness", degenerate},
      {"coherence", coherence},
      {"admissibility", admissibility},
      {"risk-aversion coefficients and partial mass", numerical_analysis},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " [exception: " << e.what() << "]";
    }
    failures += v.pass ? 0 : 1;
    std::printf("%s %zu %s:%s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                v.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
