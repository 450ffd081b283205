// quadrature.hpp
//
// Integration engines for quantile-weighted risk measures.
//
// Two independent routes are provided for M = int_0^1 phi(p) q_p dp:
//
//  * replication: composite Simpson on a uniform grid that includes both
//    endpoints. Endpoint values that are infinite (q_0, q_1 of an unbounded
//    loss, phi(1) of the power family) are either dropped or replaced by the
//    value at p clamped into [eps, 1 - eps]. The default grid has
//    10,000,001 points (an even number of intervals).
//
//  * converged: geometric panels shrinking towards both endpoints, adaptive
//    Simpson on each panel, and a power-law extrapolation of the unresolved
//    remainder. The power family is first mapped through u = (1-p)^c, which
//    turns the weighted integral into int_0^1 q_{1 - u^{1/c}} du.
//
// A seeded Monte Carlo estimator (inverse-CDF sampling of the weight
// density) serves as a third, stochastic check.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "srm/distributions.hpp"
#include "srm/risk_aversion.hpp"

namespace srm {

inline constexpr std::size_t kDefaultGridPoints = 10'000'001;
inline constexpr int kMaxHalvings = 60;

enum class EndpointPolicy { zero_endpoints, clip_epsilon };
enum class Scheme { replication, converged };

std::string_view to_string(EndpointPolicy policy);
std::string_view to_string(Scheme scheme);

struct QuadratureConfig {
  std::size_t n_points = kDefaultGridPoints;
  EndpointPolicy endpoint_policy = EndpointPolicy::zero_endpoints;
  double epsilon = 1e-9;
  Scheme scheme = Scheme::replication;
  double rel_tol = 1e-10;

  /// Throws ParameterError on an even or too small grid, bad epsilon or rel_tol.
  void validate() const;

  static QuadratureConfig replication(std::size_t n_points = kDefaultGridPoints,
                                      EndpointPolicy policy = EndpointPolicy::zero_endpoints,
                                      double epsilon = 1e-9);
  static QuadratureConfig converged(double rel_tol = 1e-10);
};

struct QuadratureResult {
  double value = 0.0;
  std::size_t n_points = 0;  // grid points (replication) or evaluations (converged)
  Scheme scheme = Scheme::replication;
  EndpointPolicy endpoint_policy = EndpointPolicy::zero_endpoints;
  double estimated_error = 0.0;
};

/// Composite Simpson rule on a uniform grid of n_points (odd, >= 3) points.
/// Throws NumericError naming the grid point where f is not finite.
double simpson_composite(const std::function<double(double)>& f, double lo, double hi,
                         std::size_t n_points);

/// Point handed to integrands that may be singular at an endpoint: the
/// abscissa together with its distances to both ends, each computed without
/// cancellation.
struct Abscissa {
  double x;
  double from_lo;
  double from_hi;
};

struct IntegrationResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  int halvings = 0;
  bool converged = false;
};

/// Integrates f over [lo, hi] where f may have integrable singularities at
/// either endpoint. Panels [d/2, d] are peeled off each end, d halving each
/// step, until the estimate (panels plus extrapolated remainder) changes by
/// at most rel_tol relative to the accumulated |f| mass and, when supplied,
/// tail_bound(d) falls below the same threshold.
IntegrationResult integrate_singular(const std::function<double(const Abscissa&)>& f, double lo,
                                     double hi, double rel_tol,
                                     const std::function<double(double)>& tail_bound = {},
                                     int max_halvings = kMaxHalvings);

/// Uniform-grid Simpson estimate of int_0^1 phi(p) q_p dp. Deterministic:
/// identical inputs give bit-identical results.
QuadratureResult srm_replication(const QuantileSource& source, const WeightSpec& spec,
                                 const QuadratureConfig& config);

/// Singularity-free adaptive estimate. Throws ConvergenceError (with the best
/// estimate and bound) when the refinement budget is exhausted.
QuadratureResult srm_converged(const QuantileSource& source, const WeightSpec& spec,
                               double rel_tol);

/// Dispatches on config.scheme.
QuadratureResult srm_integrate(const QuantileSource& source, const WeightSpec& spec,
                               const QuadratureConfig& config);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t draws = 0;
  std::uint64_t seed = 0;
};

/// Samples P from the weight density by inverse CDF and averages q_P. Draws
/// are split over a fixed number of independently seeded streams, so the
/// result does not depend on thread count.
MonteCarloEstimate srm_monte_carlo(const QuantileSource& source, const WeightSpec& spec,
                                   std::size_t draws, std::uint64_t seed);

struct ConvergencePoint {
  std::size_t n_points;
  double value;
};

/// Replication values over n_list, all with config's endpoint policy.
std::vector<ConvergencePoint> convergence_study(const QuantileSource& source,
                                                const WeightSpec& spec,
                                                std::span<const std::size_t> n_list,
                                                const QuadratureConfig& config = {});

}  // namespace srm
