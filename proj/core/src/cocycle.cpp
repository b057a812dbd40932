#include "qplab/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qplab {

namespace {

void require_line(const OperatorSpec& spec, const char* who) {
  if (spec.geometry != Geometry::Line)
    throw std::invalid_argument(std::string(who) + ": line geometry only");
}

struct LogNorms {
  double at_half = 0.0;
  double at_full = 0.0;
  Mat2 normalized = Mat2::identity();
};

// Core kernel: rescale by the Frobenius norm after every factor.
LogNorms accumulate(std::span<const double> v, double E) {
  LogNorms out;
  Mat2 m = Mat2::identity();
  double acc = 0.0;
  const std::size_t k = v.size();
  const std::size_t half = k / 2;
  for (std::size_t n = 0; n < k; ++n) {
    m = transfer_step(E, v[n]) * m;
    const double s = m.frobenius_norm();
    m.scale(1.0 / s);
    acc += std::log(s);
    if (n + 1 == half) out.at_half = acc;
  }
  out.at_full = acc;
  out.normalized = m;
  return out;
}

}  // namespace

CocycleProduct cocycle_product_over(std::span<const double> v, double E) {
  const LogNorms ln = accumulate(v, E);
  CocycleProduct p;
  p.normalized = ln.normalized;
  p.log_norm = ln.at_full;
  p.log_norm_halfway = ln.at_half;
  p.steps = static_cast<std::int64_t>(v.size());
  return p;
}

CocycleProduct cocycle_product(const OperatorSpec& spec, double E, std::int64_t k) {
  require_line(spec, "cocycle_product");
  if (k < 0) throw std::invalid_argument("cocycle_product: k must be >= 0");
  if (k == 0) return CocycleProduct{};
  const std::vector<double> v = potential_sequence(spec, 0, k);
  return cocycle_product_over(v, E);
}

LyapunovEstimate lyapunov_orbit(const OperatorSpec& spec, double E, std::int64_t k,
                                bool richardson) {
  require_line(spec, "lyapunov_orbit");
  if (k < 1) throw std::invalid_argument("lyapunov_orbit: k must be >= 1");
  const CocycleProduct p = cocycle_product(spec, E, k);
  LyapunovEstimate est;
  est.energy = E;
  est.steps = k;
  est.theta_samples = 1;
  const double g_full = p.log_norm / static_cast<double>(k);
  const double g_half = (k >= 2) ? p.log_norm_halfway / static_cast<double>(k / 2) : g_full;
  est.gamma = richardson ? 2.0 * g_full - g_half : g_full;
  est.gamma_half = g_half;
  est.stderr_ = std::fabs(g_full - g_half);
  return est;
}

double lyapunov_grid_point(int j, int grid_size) {
  return frac_unit(static_cast<double>(j) / grid_size + 0.5 / grid_size +
                   golden_mean * 1e-3);
}

LyapunovEstimate lyapunov_theta_avg(const OperatorSpec& spec, double E, std::int64_t k,
                                    int grid_size, bool richardson) {
  const double e[1] = {E};
  // single-energy slice of the curve kernel
  require_line(spec, "lyapunov_theta_avg");
  if (k < 1) throw std::invalid_argument("lyapunov_theta_avg: k must be >= 1");
  if (grid_size < 2) throw std::invalid_argument("lyapunov_theta_avg: grid size must be >= 2");

  double sum = 0.0, sum_sq = 0.0, sum_half = 0.0;
  for (int j = 0; j < grid_size; ++j) {
    const OperatorSpec shifted = with_phase_offset(spec, lyapunov_grid_point(j, grid_size));
    const std::vector<double> v = potential_sequence(shifted, 0, k);
    const CocycleProduct p = cocycle_product_over(v, e[0]);
    const double g = p.log_norm / static_cast<double>(k);
    const double gh = (k >= 2) ? p.log_norm_halfway / static_cast<double>(k / 2) : g;
    sum += g;
    sum_sq += g * g;
    sum_half += gh;
  }
  const double M = static_cast<double>(grid_size);
  LyapunovEstimate est;
  est.energy = E;
  est.steps = k;
  est.theta_samples = grid_size;
  const double mean = sum / M;
  const double mean_half = sum_half / M;
  est.gamma = richardson ? 2.0 * mean - mean_half : mean;
  est.gamma_half = mean_half;
  const double var = std::max(0.0, sum_sq / M - mean * mean);
  est.stderr_ = std::sqrt(var / M);
  return est;
}

std::vector<LyapunovEstimate> lyapunov_curve(const OperatorSpec& spec,
                                             std::span<const double> energies,
                                             std::int64_t k, int grid_size) {
  require_line(spec, "lyapunov_curve");
  if (energies.empty()) throw std::invalid_argument("lyapunov_curve: empty energy grid");
  if (k < 1) throw std::invalid_argument("lyapunov_curve: k must be >= 1");
  if (grid_size < 2) throw std::invalid_argument("lyapunov_curve: grid size must be >= 2");

  const std::size_t ne = energies.size();
  std::vector<double> sum(ne, 0.0), sum_sq(ne, 0.0), sum_half(ne, 0.0);
  // theta outer so each potential sequence is evaluated once and reused
  // across the whole energy grid; accumulation order is fixed.
  for (int j = 0; j < grid_size; ++j) {
    const OperatorSpec shifted = with_phase_offset(spec, lyapunov_grid_point(j, grid_size));
    const std::vector<double> v = potential_sequence(shifted, 0, k);
    for (std::size_t i = 0; i < ne; ++i) {
      const CocycleProduct p = cocycle_product_over(v, energies[i]);
      const double g = p.log_norm / static_cast<double>(k);
      const double gh = (k >= 2) ? p.log_norm_halfway / static_cast<double>(k / 2) : g;
      sum[i] += g;
      sum_sq[i] += g * g;
      sum_half[i] += gh;
    }
  }
  const double M = static_cast<double>(grid_size);
  std::vector<LyapunovEstimate> out(ne);
  for (std::size_t i = 0; i < ne; ++i) {
    out[i].energy = energies[i];
    out[i].steps = k;
    out[i].theta_samples = grid_size;
    const double mean = sum[i] / M;
    out[i].gamma = mean;
    out[i].gamma_half = sum_half[i] / M;
    const double var = std::max(0.0, sum_sq[i] / M - mean * mean);
    out[i].stderr_ = std::sqrt(var / M);
  }
  return out;
}

}  // namespace qplab
