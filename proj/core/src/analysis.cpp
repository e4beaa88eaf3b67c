#include "qhydro/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qhydro/fft.hpp"
#include "qhydro/rng.hpp"

namespace qhydro {

// --- rng -------------------------------------------------------------------

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double to_unit(std::uint32_t a, std::uint32_t b) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(a) << 21) ^ (b >> 11);
  return static_cast<double>(bits & ((1ull << 53) - 1)) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> c,
                                           std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kPhiloxW0;
      k[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c[0], hi0, lo0);
    mulhilo(kPhiloxM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

std::array<std::uint32_t, 4> CounterRng::block(std::uint64_t stream, std::uint64_t index) const {
  return philox4x32_10(
      {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
       static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)},
      {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
}

double CounterRng::uniform(std::uint64_t stream, std::uint64_t index) const {
  const auto b = block(stream, index);
  return to_unit(b[0], b[1]);
}

double CounterRng::normal(std::uint64_t stream, std::uint64_t index) const {
  const auto b = block(stream, index);
  const double u1 = 1.0 - to_unit(b[0], b[1]);  // (0, 1]
  const double u2 = to_unit(b[2], b[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// --- samples ---------------------------------------------------------------

void EmpiricalSample::validate() const {
  if (values.empty()) throw DomainError("sample: empty");
  ensure_finite(values, "sample values");
  if (weights.empty()) return;
  if (weights.size() != values.size()) throw DomainError("sample: weights size mismatch");
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("sample: weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("sample: weights must sum to 1");
}

double EmpiricalSample::mean() const {
  if (weights.empty()) {
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) acc += weights[i] * values[i];
  return acc;
}

double EmpiricalSample::variance() const {
  const double mu = mean();
  double acc = 0.0;
  if (weights.empty()) {
    for (double v : values) acc += (v - mu) * (v - mu);
    return values.size() > 1 ? acc / static_cast<double>(values.size() - 1) : 0.0;
  }
  for (std::size_t i = 0; i < values.size(); ++i) acc += weights[i] * (values[i] - mu) * (values[i] - mu);
  return acc;
}

double EmpiricalSample::effective_size() const {
  if (weights.empty()) return static_cast<double>(values.size());
  double s2 = 0.0;
  for (double w : weights) s2 += w * w;
  return 1.0 / s2;
}

double ks_distance(const EmpiricalSample& sample, const std::function<double(double)>& cdf) {
  sample.validate();
  const std::size_t n = sample.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return sample.values[a] < sample.values[b]; });
  const double uniform_w = 1.0 / static_cast<double>(n);
  double below = 0.0;
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t idx = order[i];
    const double w = sample.weights.empty() ? uniform_w : sample.weights[idx];
    const double f = cdf(sample.values[idx]);
    const double above = sample.weights.empty() ? static_cast<double>(i + 1) * uniform_w : below + w;
    d = std::max({d, above - f, f - below});
    below = above;
  }
  return d;
}

double ks_critical_99(std::size_t n) { return 1.63 / std::sqrt(static_cast<double>(n)); }

double silverman_bandwidth(const EmpiricalSample& sample) {
  sample.validate();
  const double var = sample.variance();
  if (!(var > 0.0)) throw DomainError("kde: zero-variance sample has no automatic bandwidth");
  return 1.06 * std::sqrt(var) * std::pow(sample.effective_size(), -0.2);
}

KdeFields kde_with_derivative(const EmpiricalSample& sample, const Grid& grid,
                              std::optional<double> bandwidth) {
  sample.validate();
  const double h = bandwidth ? *bandwidth : silverman_bandwidth(sample);
  if (!(h > 0.0)) throw DomainError("kde: bandwidth must be positive");

  const std::size_t n = grid.size();
  const double dx = grid.spacing();
  std::vector<Complex> bins(n);
  const double uniform_w = 1.0 / static_cast<double>(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double w = sample.weights.empty() ? uniform_w : sample.weights[i];
    const double u = (grid.wrap(sample.values[i]) - grid.origin()) / dx;
    auto j = static_cast<std::size_t>(std::floor(u));
    double t = u - static_cast<double>(j);
    if (j >= n) {
      j = 0;
      t = 0.0;
    }
    bins[j] += w * (1.0 - t) / dx;
    bins[(j + 1) % n] += w * t / dx;
  }

  fft::forward(bins);
  std::vector<Complex> dbins(n);
  const auto k = grid.wavenumbers();
  for (std::size_t j = 0; j < n; ++j) {
    const double kernel = std::exp(-0.5 * k[j] * k[j] * h * h);
    bins[j] *= kernel;
    dbins[j] = j == grid.nyquist_index() ? Complex{} : bins[j] * Complex{0.0, k[j]};
  }
  fft::inverse(bins);
  fft::inverse(dbins);

  KdeFields out{RealField(grid), RealField(grid), h};
  for (std::size_t j = 0; j < n; ++j) {
    // transform rounding leaves ~1e-17 ripples below zero in the far tails
    out.density.values[j] = std::max(bins[j].real(), 0.0);
    out.derivative.values[j] = dbins[j].real();
  }
  return out;
}

RealField kde(const EmpiricalSample& sample, const Grid& grid, std::optional<double> bandwidth) {
  return kde_with_derivative(sample, grid, bandwidth).density;
}

std::vector<double> autocorrelation(std::span<const double> values, std::size_t series_length,
                                    std::size_t max_lag) {
  if (series_length == 0 || values.size() % series_length != 0) {
    throw DomainError("autocorrelation: values must hold whole series");
  }
  if (max_lag >= series_length) {
    throw DomainError("autocorrelation: max_lag must be shorter than the series");
  }
  const std::size_t n_series = values.size() / series_length;
  std::vector<double> out(max_lag + 1, 0.0);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (std::size_t s = 0; s < n_series; ++s) {
      const double* u = values.data() + s * series_length;
      for (std::size_t t = 0; t + lag < series_length; ++t) acc += u[t] * u[t + lag];
    }
    out[lag] = acc / static_cast<double>(n_series * (series_length - lag));
  }
  return out;
}

double convergence_order(std::span<const double> errors, std::span<const double> steps) {
  if (errors.size() != steps.size()) throw DomainError("convergence_order: size mismatch");
  if (errors.size() < 3) throw DomainError("convergence_order: need at least 3 pairs");
  const std::size_t n = errors.size();
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(errors[i] > 0.0)) throw DomainError("convergence_order: errors must be positive");
    if (!(steps[i] > 0.0)) throw DomainError("convergence_order: steps must be positive");
    const double x = std::log(steps[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double nd = static_cast<double>(n);
  const double denom = nd * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) throw DomainError("convergence_order: steps must differ");
  return (nd * sxy - sx * sy) / denom;
}

PiecewiseLinearCdf::PiecewiseLinearCdf(std::vector<double> nodes, std::span<const double> density)
    : nodes_(std::move(nodes)), cumulative_(nodes_.size(), 0.0) {
  if (nodes_.size() < 2 || density.size() != nodes_.size()) {
    throw DomainError("cdf: need at least two nodes with matching densities");
  }
  for (std::size_t j = 1; j < nodes_.size(); ++j) {
    if (!(nodes_[j] > nodes_[j - 1])) throw DomainError("cdf: nodes must increase");
    const double a = std::max(density[j - 1], 0.0);
    const double b = std::max(density[j], 0.0);
    cumulative_[j] = cumulative_[j - 1] + 0.5 * (a + b) * (nodes_[j] - nodes_[j - 1]);
  }
  total_ = cumulative_.back();
  if (!(total_ > 0.0)) throw DomainError("cdf: density has zero mass");
  for (double& c : cumulative_) c /= total_;
}

PiecewiseLinearCdf::PiecewiseLinearCdf(const RealField& density)
    : PiecewiseLinearCdf(density.grid.coordinates(), density.values) {}

double PiecewiseLinearCdf::operator()(double x) const {
  if (x <= nodes_.front()) return 0.0;
  if (x >= nodes_.back()) return 1.0;
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  const auto j = static_cast<std::size_t>(it - nodes_.begin());
  const double t = (x - nodes_[j - 1]) / (nodes_[j] - nodes_[j - 1]);
  return cumulative_[j - 1] + t * (cumulative_[j] - cumulative_[j - 1]);
}

double PiecewiseLinearCdf::inverse(double u) const {
  if (u <= 0.0) return nodes_.front();
  if (u >= 1.0) return nodes_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto j = static_cast<std::size_t>(it - cumulative_.begin());
  const double span = cumulative_[j] - cumulative_[j - 1];
  const double t = span > 0.0 ? (u - cumulative_[j - 1]) / span : 0.0;
  return nodes_[j - 1] + t * (nodes_[j] - nodes_[j - 1]);
}

}  // namespace qhydro
