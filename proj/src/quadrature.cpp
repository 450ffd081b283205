#include "srm/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "format.hpp"
#include "parallel.hpp"
#include "srm/errors.hpp"

namespace srm {

namespace {

constexpr std::size_t kMaxEvaluations = 50'000'000;
constexpr int kMaxPanelDepth = 60;
constexpr int kMinPanelDepth = 2;
constexpr std::size_t kReplicationChunks = 64;
constexpr std::size_t kMonteCarloStreams = 16;

// q at p = 1 - tail, choosing the representation that avoids cancellation.
double quantile_at(const QuantileSource& source, double p, double tail) {
  return tail < 0.5 ? source.upper_quantile(tail) : source.quantile(p);
}

double weight_at(const WeightSpec& spec, double p, double tail) {
  return tail < 0.5 ? weight_at_tail(spec, tail) : weight(spec, p);
}

class AdaptiveSimpson {
 public:
  AdaptiveSimpson(const std::function<double(double)>& f, std::size_t& evaluations)
      : f_(f), evaluations_(evaluations) {}

  struct Panel {
    double value = 0.0;
    double abs_value = 0.0;
    double error = 0.0;
    bool converged = true;
  };

  Panel integrate(double a, double b, double rel_tol) {
    const double m = 0.5 * (a + b);
    const double fa = eval(a);
    const double fm = eval(m);
    const double fb = eval(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double coarse_abs = (b - a) / 6.0 * (std::abs(fa) + 4.0 * std::abs(fm) + std::abs(fb));
    Panel panel;
    recurse(a, fa, m, fm, b, fb, whole, rel_tol * coarse_abs, 0, panel);
    return panel;
  }

 private:
  double eval(double x) {
    ++evaluations_;
    const double v = f_(x);
    if (!std::isfinite(v)) {
      throw NumericError("non-finite integrand at abscissa " + detail::shortest(x));
    }
    return v;
  }

  void recurse(double a, double fa, double m, double fm, double b, double fb, double whole,
               double tol, int depth, Panel& out) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    const bool budget_spent = depth >= kMaxPanelDepth || evaluations_ > kMaxEvaluations;
    if ((depth >= kMinPanelDepth && std::abs(delta) <= 15.0 * tol) || budget_spent) {
      if (budget_spent && std::abs(delta) > 15.0 * tol) out.converged = false;
      const double value = left + right + delta / 15.0;
      out.value += value;
      out.abs_value += std::abs(value);
      out.error += std::abs(delta) / 15.0;
      return;
    }
    recurse(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth + 1, out);
    recurse(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth + 1, out);
  }

  const std::function<double(double)>& f_;
  std::size_t& evaluations_;
};

// int_0^d of g(distance) assuming g ~ K distance^beta near 0.
double extrapolate_remainder(double d, double g_d, double g_half) {
  if (g_d != 0.0 && g_half != 0.0 && (g_d > 0.0) == (g_half > 0.0)) {
    const double beta = -std::log2(g_half / g_d);
    if (beta > -1.0 + 1e-6 && beta < 64.0) return d * g_d / (beta + 1.0);
  }
  return 0.5 * d * (g_d + g_half);
}

std::array<std::uint64_t, 2> split_seed(std::uint64_t seed) {
  return {seed & 0xffffffffULL, seed >> 32};
}

// Uniform in the open interval (0,1) from the top 53 bits.
double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::string_view to_string(EndpointPolicy policy) {
  return policy == EndpointPolicy::zero_endpoints ? "zero_endpoints" : "clip_epsilon";
}

std::string_view to_string(Scheme scheme) {
  return scheme == Scheme::replication ? "replication" : "converged";
}

void QuadratureConfig::validate() const {
  if (n_points < 3 || n_points % 2 == 0) {
    throw ParameterError("quadrature: n_points must be odd and >= 3, got " +
                         std::to_string(n_points));
  }
  if (endpoint_policy == EndpointPolicy::clip_epsilon && !(epsilon > 0.0 && epsilon < 0.5)) {
    throw ParameterError("quadrature: epsilon must lie in (0, 0.5)");
  }
  if (!(rel_tol > 0.0)) throw ParameterError("quadrature: rel_tol must be > 0");
}

QuadratureConfig QuadratureConfig::replication(std::size_t n_points, EndpointPolicy policy,
                                               double epsilon) {
  QuadratureConfig config;
  config.n_points = n_points;
  config.endpoint_policy = policy;
  config.epsilon = epsilon;
  config.scheme = Scheme::replication;
  return config;
}

QuadratureConfig QuadratureConfig::converged(double rel_tol) {
  QuadratureConfig config;
  config.scheme = Scheme::converged;
  config.rel_tol = rel_tol;
  return config;
}

double simpson_composite(const std::function<double(double)>& f, double lo, double hi,
                         std::size_t n_points) {
  if (!(lo < hi)) throw ParameterError("simpson_composite: requires lo < hi");
  if (n_points < 3 || n_points % 2 == 0) {
    throw ParameterError("simpson_composite: n_points must be odd and >= 3");
  }
  const std::size_t intervals = n_points - 1;
  const double width = hi - lo;
  double sum = 0.0;
  for (std::size_t i = 0; i < n_points; ++i) {
    const double x = i == intervals ? hi
                                    : lo + width * (static_cast<double>(i) /
                                                    static_cast<double>(intervals));
    const double v = f(x);
    if (!std::isfinite(v)) {
      throw NumericError("simpson_composite: non-finite value at grid point " +
                         std::to_string(i) + " (x = " + detail::shortest(x) + ")");
    }
    const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    sum += w * v;
  }
  return sum * (width / static_cast<double>(intervals)) / 3.0;
}

IntegrationResult integrate_singular(const std::function<double(const Abscissa&)>& f, double lo,
                                     double hi, double rel_tol,
                                     const std::function<double(double)>& tail_bound,
                                     int max_halvings) {
  if (!(lo < hi)) throw ParameterError("integrate_singular: requires lo < hi");
  if (!(rel_tol > 0.0)) throw ParameterError("integrate_singular: rel_tol must be > 0");

  const double width = hi - lo;
  IntegrationResult result;
  std::function<double(double)> from_lo = [&](double d) {
    return f(Abscissa{lo + d, d, width - d});
  };
  std::function<double(double)> from_hi = [&](double d) {
    return f(Abscissa{hi - d, width - d, d});
  };
  AdaptiveSimpson left(from_lo, result.evaluations);
  AdaptiveSimpson right(from_hi, result.evaluations);

  double panels = 0.0;
  double panels_abs = 0.0;
  double panels_err = 0.0;
  double previous = std::numeric_limits<double>::quiet_NaN();
  bool panels_converged = true;
  double d = 0.5 * width;

  for (int k = 0; k < max_halvings; ++k) {
    const auto l = left.integrate(0.5 * d, d, rel_tol);
    const auto r = right.integrate(0.5 * d, d, rel_tol);
    panels += l.value + r.value;
    panels_abs += l.abs_value + r.abs_value;
    panels_err += l.error + r.error;
    panels_converged = panels_converged && l.converged && r.converged;
    d *= 0.5;
    result.halvings = k + 1;

    result.evaluations += 4;
    const double remainder = extrapolate_remainder(d, from_lo(d), from_lo(0.5 * d)) +
                             extrapolate_remainder(d, from_hi(d), from_hi(0.5 * d));
    const double estimate = panels + remainder;
    const double scale = panels_abs + std::abs(remainder);
    const double threshold = rel_tol * scale;
    const double change = std::abs(estimate - previous);
    const double bound = tail_bound ? tail_bound(d) : 0.0;

    result.value = estimate;
    result.error = panels_err + (std::isfinite(change) ? change : std::abs(remainder)) + bound;
    if (k >= 3 && change <= threshold && bound <= threshold) {
      result.converged = panels_converged;
      return result;
    }
    previous = estimate;
  }
  result.converged = false;
  return result;
}

QuadratureResult srm_replication(const QuantileSource& source, const WeightSpec& spec,
                                 const QuadratureConfig& config) {
  config.validate();
  const std::size_t n = config.n_points;
  const std::size_t intervals = n - 1;
  const double denom = static_cast<double>(intervals);
  const bool clip = config.endpoint_policy == EndpointPolicy::clip_epsilon;
  const double eps = config.epsilon;

  // Integrand at grid index i, with p = i/(n-1) and tail = (n-1-i)/(n-1).
  auto integrand = [&](std::size_t i) -> double {
    double p = static_cast<double>(i) / denom;
    double tail = static_cast<double>(intervals - i) / denom;
    if (clip) {
      p = std::clamp(p, eps, 1.0 - eps);
      tail = std::clamp(tail, eps, 1.0 - eps);
    } else if (i == 0 || i == intervals) {
      // Endpoint: drop the term when phi or q is infinite there.
      double phi = 0.0;
      try {
        phi = i == 0 ? weight(spec, 0.0) : weight_at_tail(spec, 0.0);
      } catch (const SingularityError&) {
        return 0.0;
      }
      if (phi == 0.0) return 0.0;
      const double q = source.quantile_closed(i == 0 ? 0.0 : 1.0);
      return std::isfinite(q) ? phi * q : 0.0;
    }
    const double phi = weight_at(spec, p, tail);
    if (phi == 0.0) return 0.0;
    const double v = phi * quantile_at(source, p, tail);
    if (!std::isfinite(v)) {
      throw NumericError("srm_replication: non-finite integrand at grid point " +
                         std::to_string(i) + " (p = " + detail::shortest(p) + ")");
    }
    return v;
  };

  // Fixed chunking keeps the summation order, hence the result, independent
  // of the number of worker threads.
  const std::size_t chunks = std::min(kReplicationChunks, n);
  std::vector<double> partial(chunks, 0.0);
  detail::parallel_for(chunks, [&](std::size_t c) {
    const std::size_t begin = c * n / chunks;
    const std::size_t end = (c + 1) * n / chunks;
    double sum = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      sum += w * integrand(i);
    }
    partial[c] = sum;
  });
  double total = 0.0;
  for (double s : partial) total += s;

  QuadratureResult result;
  result.value = total / denom / 3.0;
  result.n_points = n;
  result.scheme = Scheme::replication;
  result.endpoint_policy = config.endpoint_policy;
  return result;
}

QuadratureResult srm_converged(const QuantileSource& source, const WeightSpec& spec,
                               double rel_tol) {
  if (!(rel_tol > 0.0)) throw ParameterError("srm_converged: rel_tol must be > 0");

  IntegrationResult integral;
  if (spec.family() == WeightFamily::power) {
    // u = (1-p)^c maps phi(p) dp onto du; the tail is t = u^{1/c}.
    const double inv_c = 1.0 / spec.c();
    auto integrand = [&](const Abscissa& at) {
      const double log_u = at.from_lo < 0.5 ? std::log(at.from_lo) : std::log1p(-at.from_hi);
      return source.quantile_from_log_tail(log_u * inv_c);
    };
    integral = integrate_singular(integrand, 0.0, 1.0, rel_tol);
  } else {
    const double lo = spec.family() == WeightFamily::es ? spec.alpha() : 0.0;
    auto integrand = [&](const Abscissa& at) {
      const double phi = weight_at(spec, at.x, at.from_hi);
      return phi == 0.0 ? 0.0 : phi * quantile_at(source, at.x, at.from_hi);
    };
    // Weight mass beyond each clip point times the quantile there.
    auto tail_bound = [&](double d) {
      const double upper = weight_mass_upper(spec, d) * std::abs(source.upper_quantile(d));
      const double lower =
          lo > 0.0 ? spec.lambda() * d * std::abs(source.quantile(lo + d))
                   : weight_mass_lower(spec, d) * std::abs(source.quantile(d));
      return upper + lower;
    };
    integral = integrate_singular(integrand, lo, 1.0, rel_tol, tail_bound);
  }

  if (!integral.converged) {
    throw ConvergenceError("srm_converged: tolerance " + detail::shortest(rel_tol) +
                               " not met within " + std::to_string(kMaxHalvings) +
                               " halvings",
                           integral.value, integral.error);
  }
  QuadratureResult result;
  result.value = integral.value;
  result.n_points = integral.evaluations;
  result.scheme = Scheme::converged;
  result.endpoint_policy = EndpointPolicy::zero_endpoints;
  result.estimated_error = integral.error;
  return result;
}

QuadratureResult srm_integrate(const QuantileSource& source, const WeightSpec& spec,
                               const QuadratureConfig& config) {
  if (config.scheme == Scheme::converged) {
    config.validate();
    return srm_converged(source, spec, config.rel_tol);
  }
  return srm_replication(source, spec, config);
}

MonteCarloEstimate srm_monte_carlo(const QuantileSource& source, const WeightSpec& spec,
                                   std::size_t draws, std::uint64_t seed) {
  if (draws < 2) throw ParameterError("srm_monte_carlo: need at least 2 draws");

  struct Moments {
    double count = 0.0;
    double mean = 0.0;
    double m2 = 0.0;
  };
  const double expm1_neg_a =
      spec.family() == WeightFamily::exponential ? -std::expm1(-spec.a()) : 0.0;

  auto sample = [&](std::mt19937_64& rng) {
    const double v = open_uniform(rng);
    switch (spec.family()) {
      case WeightFamily::exponential: {
        // P = 1 + ln(V(1 - e^{-a}) + e^{-a}) / a, expressed through the tail.
        const double tail = -std::log1p(-(1.0 - v) * expm1_neg_a) / spec.a();
        return quantile_at(source, 1.0 - tail, tail);
      }
      case WeightFamily::power:
        // P = 1 - V^{1/c}.
        return source.quantile_from_log_tail(std::log(v) / spec.c());
      case WeightFamily::es: {
        const double tail = (1.0 - spec.alpha()) * v;
        return quantile_at(source, 1.0 - tail, tail);
      }
      case WeightFamily::flat: return source.quantile(v);
    }
    return 0.0;
  };

  const auto seed_words = split_seed(seed);
  std::vector<Moments> streams(kMonteCarloStreams);
  detail::parallel_for(kMonteCarloStreams, [&](std::size_t s) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed_words[0]),
                      static_cast<std::uint32_t>(seed_words[1]),
                      static_cast<std::uint32_t>(s)};
    std::mt19937_64 rng(seq);
    const std::size_t count =
        draws / kMonteCarloStreams + (s < draws % kMonteCarloStreams ? 1 : 0);
    Moments m;
    for (std::size_t i = 0; i < count; ++i) {
      const double x = sample(rng);
      m.count += 1.0;
      const double delta = x - m.mean;
      m.mean += delta / m.count;
      m.m2 += delta * (x - m.mean);
    }
    streams[s] = m;
  });

  Moments total;
  for (const auto& m : streams) {
    if (m.count == 0.0) continue;
    const double count = total.count + m.count;
    const double delta = m.mean - total.mean;
    total.mean += delta * m.count / count;
    total.m2 += m.m2 + delta * delta * total.count * m.count / count;
    total.count = count;
  }

  MonteCarloEstimate estimate;
  estimate.mean = total.mean;
  estimate.std_error = std::sqrt(total.m2 / (total.count - 1.0) / total.count);
  estimate.draws = draws;
  estimate.seed = seed;
  return estimate;
}

std::vector<ConvergencePoint> convergence_study(const QuantileSource& source,
                                                const WeightSpec& spec,
                                                std::span<const std::size_t> n_list,
                                                const QuadratureConfig& config) {
  std::vector<ConvergencePoint> points;
  points.reserve(n_list.size());
  for (std::size_t n : n_list) {
    QuadratureConfig c = config;
    c.scheme = Scheme::replication;
    c.n_points = n;
    points.push_back({n, srm_replication(source, spec, c).value});
  }
  return points;
}

}  // namespace srm
