#include "qplab/kicked_rotor.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <stdexcept>

#include "qplab/model.hpp"

namespace qplab {

namespace {

std::mutex& fftw_plan_mutex() {
  static std::mutex m;  // FFTW plan creation is not thread-safe
  return m;
}

int next_pow2(int n) {
  int g = 1;
  while (g < n) g <<= 1;
  return g;
}

constexpr double kBoundaryBudget = 1e-8;

}  // namespace

ToeplitzKick kick_coefficients(double kappa, double eps) {
  if (kappa < 0.0) throw std::invalid_argument("kick_coefficients: kappa must be >= 0");
  if (!(eps > 0.0)) throw std::invalid_argument("kick_coefficients: eps must be positive");

  // Bessel coefficients decay super-exponentially past |n| ~ kappa; a grid of
  // 8 (kappa + 48) samples resolves everything above 1e-16.
  const int grid = next_pow2(static_cast<int>(8.0 * (kappa + 48.0)));
  std::vector<std::complex<double>> table(static_cast<std::size_t>(grid));
  for (int g = 0; g < grid; ++g) {
    const double phase = -kappa * std::cos(two_pi * g / grid);
    table[static_cast<std::size_t>(g)] = {std::cos(phase), std::sin(phase)};
  }
  // S(n) = (1/G) sum_g table(g) e^{-2 pi i n g / G}: forward DFT / G
  std::vector<std::complex<double>> coeff(static_cast<std::size_t>(grid));
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_plan plan = fftw_plan_dft_1d(
        grid, reinterpret_cast<fftw_complex*>(table.data()),
        reinterpret_cast<fftw_complex*>(coeff.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  for (auto& c : coeff) c /= static_cast<double>(grid);

  int support = 0;
  const int n_cap = grid / 2 - 1;
  for (int n = n_cap; n >= 1; --n) {
    const double mag = std::max(std::abs(coeff[static_cast<std::size_t>(n)]),
                                std::abs(coeff[static_cast<std::size_t>(grid - n)]));
    if (mag >= eps) {
      support = n;
      break;
    }
  }
  ToeplitzKick kick;
  kick.n_max = support;
  kick.coeffs.resize(static_cast<std::size_t>(2 * support + 1));
  for (int n = -support; n <= support; ++n)
    kick.coeffs[static_cast<std::size_t>(n + support)] =
        coeff[static_cast<std::size_t>((n + grid) % grid)];
  return kick;
}

double RotorState::norm() const {
  double s = 0.0;
  for (const auto& a : amps) s += std::norm(a);
  return std::sqrt(s);
}

double RotorState::n2() const {
  double s = 0.0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double n = static_cast<double>(static_cast<std::int64_t>(i) - half_width);
    s += n * n * std::norm(amps[i]);
  }
  return s;
}

RotorState RotorState::delta(int N) {
  RotorState st;
  st.half_width = N;
  st.amps.assign(static_cast<std::size_t>(2 * N + 1), {0.0, 0.0});
  st.amps[static_cast<std::size_t>(N)] = {1.0, 0.0};
  return st;
}

struct FloquetOperator::Impl {
  KickedRotorSpec spec;
  int N = 0;
  int grid = 0;
  std::vector<std::complex<double>> free_phase;  // exp(-i(a n^2 + b n)), n = -N..N
  std::vector<std::complex<double>> kick_table;  // exp(-i kappa cos(2 pi g / G))
  std::vector<std::complex<double>> buf;
  fftw_plan to_angle = nullptr;   // backward: synthesis sum_n c_n e^{+2 pi i n g / G}
  fftw_plan to_momentum = nullptr;  // forward, scaled by 1/G afterwards

  ~Impl() {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    if (to_angle) fftw_destroy_plan(to_angle);
    if (to_momentum) fftw_destroy_plan(to_momentum);
  }
};

FloquetOperator::FloquetOperator(const KickedRotorSpec& spec, int N)
    : impl_(std::make_unique<Impl>()) {
  if (spec.kappa < 0.0) throw std::invalid_argument("FloquetOperator: kappa must be >= 0");
  if (N < 1) throw std::invalid_argument("FloquetOperator: N must be >= 1");
  impl_->spec = spec;
  impl_->N = N;
  impl_->grid = next_pow2(4 * (2 * N + 1));
  const int G = impl_->grid;

  impl_->free_phase.resize(static_cast<std::size_t>(2 * N + 1));
  for (int n = -N; n <= N; ++n) {
    const double nd = static_cast<double>(n);
    const double ph = -(spec.a * nd * nd + spec.b * nd);
    impl_->free_phase[static_cast<std::size_t>(n + N)] = {std::cos(ph), std::sin(ph)};
  }
  impl_->kick_table.resize(static_cast<std::size_t>(G));
  for (int g = 0; g < G; ++g) {
    const double ph = -spec.kappa * std::cos(two_pi * g / G);
    impl_->kick_table[static_cast<std::size_t>(g)] = {std::cos(ph), std::sin(ph)};
  }
  impl_->buf.resize(static_cast<std::size_t>(G));
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    auto* raw = reinterpret_cast<fftw_complex*>(impl_->buf.data());
    impl_->to_angle = fftw_plan_dft_1d(G, raw, raw, FFTW_BACKWARD, FFTW_ESTIMATE);
    impl_->to_momentum = fftw_plan_dft_1d(G, raw, raw, FFTW_FORWARD, FFTW_ESTIMATE);
  }

  // aliasing headroom: the kick must not scatter across the padding
  const ToeplitzKick kick = kick_coefficients(spec.kappa, 1e-16);
  if (kick.n_max + (2 * N + 1) > G / 2)
    throw std::invalid_argument(
        "FloquetOperator: kick support exceeds the angle-grid headroom; increase N");
}

FloquetOperator::~FloquetOperator() = default;

int FloquetOperator::half_width() const { return impl_->N; }
int FloquetOperator::grid_size() const { return impl_->grid; }
const KickedRotorSpec& FloquetOperator::spec() const { return impl_->spec; }

void FloquetOperator::step(RotorState& state) const {
  const int N = impl_->N;
  const int G = impl_->grid;
  if (state.half_width != N)
    throw std::invalid_argument("FloquetOperator::step: state size mismatch");

  std::memset(impl_->buf.data(), 0, sizeof(std::complex<double>) * static_cast<std::size_t>(G));
  for (int n = -N; n <= N; ++n)
    impl_->buf[static_cast<std::size_t>((n + G) % G)] =
        state.amps[static_cast<std::size_t>(n + N)] * impl_->free_phase[static_cast<std::size_t>(n + N)];

  fftw_execute(impl_->to_angle);
  for (int g = 0; g < G; ++g) impl_->buf[static_cast<std::size_t>(g)] *= impl_->kick_table[static_cast<std::size_t>(g)];
  fftw_execute(impl_->to_momentum);

  const double inv = 1.0 / static_cast<double>(G);
  for (int n = -N; n <= N; ++n)
    state.amps[static_cast<std::size_t>(n + N)] = impl_->buf[static_cast<std::size_t>((n + G) % G)] * inv;
  state.period += 1;

  const int edge = std::max(1, static_cast<int>(0.025 * (2 * N + 1)));
  double boundary = 0.0;
  for (int i = 0; i < edge; ++i) {
    boundary += std::norm(state.amps[static_cast<std::size_t>(i)]);
    boundary += std::norm(state.amps[state.amps.size() - 1 - static_cast<std::size_t>(i)]);
  }
  if (boundary > kBoundaryBudget) state.boundary_flagged = true;
}

RotorState floquet_step(const RotorState& state, const KickedRotorSpec& spec) {
  FloquetOperator op(spec, state.half_width);
  RotorState out = state;
  op.step(out);
  return out;
}

RotorRun rotor_run(const KickedRotorSpec& spec, int N, int periods) {
  if (periods < 1) throw std::invalid_argument("rotor_run: periods must be >= 1");
  FloquetOperator op(spec, N);
  RotorState state = RotorState::delta(N);

  RotorRun run;
  run.n2.reserve(static_cast<std::size_t>(periods) + 1);
  run.n2.push_back(state.n2());
  run.valid_periods = 0;
  for (int t = 1; t <= periods; ++t) {
    op.step(state);
    run.n2.push_back(state.n2());
    run.norm_drift_max = std::max(run.norm_drift_max, std::fabs(state.norm() - 1.0));
    if (!state.boundary_flagged) run.valid_periods = t;
  }

  run.running_metric.assign(run.n2.size(), 0.0);
  for (std::size_t t = 10; t < run.n2.size(); ++t) {
    const std::size_t start = t / 10;
    double peak = 0.0;
    for (std::size_t s = start; s <= t; ++s) peak = std::max(peak, run.n2[s]);
    const double base = run.n2[start];
    run.running_metric[t] = base > 0.0 ? peak / base : 0.0;
  }
  run.saturation_metric = run.running_metric.back();
  return run;
}

}  // namespace qplab
