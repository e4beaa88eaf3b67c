#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "qhydro/grid.hpp"

namespace qhydro {

/// Values with optional non-negative weights summing to one (empty = equal).
struct EmpiricalSample {
  std::vector<double> values;
  std::vector<double> weights;

  void validate() const;
  std::size_t size() const { return values.size(); }
  double mean() const;
  double variance() const;
  double effective_size() const;
};

/// Sup distance between the empirical CDF of `sample` and `cdf`, checking
/// both one-sided gaps at every sample point.
double ks_distance(const EmpiricalSample& sample, const std::function<double(double)>& cdf);

/// Asymptotic 99% critical value of the one-sample KS statistic, 1.63/sqrt(n).
double ks_critical_99(std::size_t n);

/// 1.06 * std * n^(-1/5). Throws for a zero-variance sample.
double silverman_bandwidth(const EmpiricalSample& sample);

struct KdeFields {
  RealField density;
  RealField derivative;
  double bandwidth = 0.0;
};

/// Gaussian-kernel density on a periodic grid: linear binning followed by an
/// exact spectral convolution, so the result integrates to the total weight
/// to rounding. Bandwidth defaults to Silverman's rule.
RealField kde(const EmpiricalSample& sample, const Grid& grid,
              std::optional<double> bandwidth = std::nullopt);
KdeFields kde_with_derivative(const EmpiricalSample& sample, const Grid& grid,
                              std::optional<double> bandwidth = std::nullopt);

/// Ensemble- and time-averaged <u(t) u(t + lag)> for lag = 0..max_lag.
/// `values` holds consecutive series of `series_length` samples each.
std::vector<double> autocorrelation(std::span<const double> values, std::size_t series_length,
                                    std::size_t max_lag);

/// Least-squares slope of log(error) against log(step).
double convergence_order(std::span<const double> errors, std::span<const double> steps);

/// CDF of a non-negative density tabulated at increasing nodes, integrated
/// with the trapezoid rule and interpolated linearly between nodes.
class PiecewiseLinearCdf {
 public:
  PiecewiseLinearCdf(std::vector<double> nodes, std::span<const double> density);
  explicit PiecewiseLinearCdf(const RealField& density);

  double operator()(double x) const;
  double inverse(double u) const;
  double total_mass() const { return total_; }

 private:
  std::vector<double> nodes_;
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

}  // namespace qhydro
