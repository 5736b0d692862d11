#include "phasorctl/phasor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fourier_tables.hpp"
#include "phasorctl/errors.hpp"

namespace phasorctl {

double PhasorConfig::omega() const { return 2.0 * std::numbers::pi / period; }

void PhasorConfig::validate() const {
  require(std::isfinite(period) && period > 0.0, ErrorCode::Configuration,
          "period must be positive");
  require(truncation >= 0, ErrorCode::Configuration, "truncation must be non-negative");
  require(samples_per_period > 0, ErrorCode::Configuration,
          "samples_per_period must be positive");
  if (samples_per_period < 4 * harmonics()) {
    std::ostringstream os;
    os << "samples_per_period " << samples_per_period << " below 4(2h+1) = " << 4 * harmonics();
    fail(ErrorCode::Configuration, os.str());
  }
}

PhasorVector::PhasorVector(int dim, int truncation)
    : dim_(dim), truncation_(truncation),
      stacked_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim) * (2 * truncation + 1))) {
  require(dim > 0 && truncation >= 0, ErrorCode::DimensionMismatch, "invalid phasor shape");
}

PhasorVector::PhasorVector(int dim, int truncation, Eigen::VectorXcd stacked)
    : dim_(dim), truncation_(truncation), stacked_(std::move(stacked)) {
  require(dim > 0 && truncation >= 0 && stacked_.size() == static_cast<Eigen::Index>(dim) * (2 * truncation + 1),
          ErrorCode::DimensionMismatch, "stacked phasor length does not match n(2h+1)");
}

Eigen::Index PhasorVector::offset(int k) const {
  return static_cast<Eigen::Index>(k + truncation_) * dim_;
}

bool PhasorVector::is_conjugate_symmetric(double tol) const {
  double scale = 1.0 + stacked_.cwiseAbs().maxCoeff();
  for (int k = 0; k <= truncation_; ++k) {
    if ((at(-k) - at(k).conjugate()).cwiseAbs().maxCoeff() > tol * scale) return false;
  }
  return true;
}

Eigen::VectorXcd PhasorVector::evaluate(double omega, double t) const {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim_);
  for (int k = -truncation_; k <= truncation_; ++k) {
    out += at(k) * std::polar(1.0, omega * k * t);
  }
  return out;
}

PhasorVector PhasorVector::retruncated(int truncation) const {
  PhasorVector out(dim_, truncation);
  int kk = std::min(truncation, truncation_);
  for (int k = -kk; k <= kk; ++k) out.at(k) = at(k);
  return out;
}

SampledSignal::SampledSignal(int dim, double t0, double dt, int count, bool real)
    : t0_(t0), dt_(dt), re_(RowMatrixXd::Zero(dim, count)) {
  require(dim > 0 && count >= 0, ErrorCode::DimensionMismatch, "invalid signal shape");
  require(dt > 0.0, ErrorCode::Configuration, "signal time step must be positive");
  if (!real) im_ = RowMatrixXd::Zero(dim, count);
}

SampledSignal SampledSignal::from_function(int dim, double t0, double dt, int count,
                                           const std::function<Eigen::VectorXd(double)>& fn) {
  SampledSignal out(dim, t0, dt, count, true);
  for (int i = 0; i < count; ++i) out.re_.col(i) = fn(out.time(i));
  return out;
}

SampledSignal SampledSignal::from_complex_function(
    int dim, double t0, double dt, int count, const std::function<Eigen::VectorXcd(double)>& fn) {
  SampledSignal out(dim, t0, dt, count, false);
  for (int i = 0; i < count; ++i) out.set(i, fn(out.time(i)));
  return out;
}

Eigen::VectorXcd SampledSignal::value(int i) const {
  Eigen::VectorXcd v(dim());
  for (int d = 0; d < dim(); ++d) v[d] = cplx(re_(d, i), is_real() ? 0.0 : im_(d, i));
  return v;
}

void SampledSignal::set(int i, const Eigen::VectorXcd& v) {
  require(v.size() == dim(), ErrorCode::DimensionMismatch, "sample dimension mismatch");
  re_.col(i) = v.real();
  if (is_real()) {
    require(v.imag().cwiseAbs().maxCoeff() == 0.0, ErrorCode::Parameter,
            "complex sample stored in a real signal");
  } else {
    im_.col(i) = v.imag();
  }
}

void SampledSignal::set(int i, const Eigen::VectorXd& v) {
  require(v.size() == dim(), ErrorCode::DimensionMismatch, "sample dimension mismatch");
  re_.col(i) = v;
  if (!is_real()) im_.col(i).setZero();
}

SampledSignal SampledSignal::to_real(double tol) const {
  SampledSignal out(dim(), t0_, dt_, count(), true);
  out.re_ = re_;
  if (!is_real() && im_.size() > 0) {
    double scale = 1.0 + (re_.size() ? re_.cwiseAbs().maxCoeff() : 0.0);
    require(im_.cwiseAbs().maxCoeff() <= tol * scale, ErrorCode::Numerical,
            "signal has a non-negligible imaginary part");
  }
  return out;
}

void PhasorTrajectory::validate() const {
  config.validate();
  require(times.size() == values.size(), ErrorCode::DimensionMismatch,
          "times and values differ in length");
  const double dt = config.step();
  for (std::size_t i = 1; i < times.size(); ++i) {
    require(std::abs(times[i] - times[i - 1] - dt) <= 1e-9 * dt + 1e-12 * std::abs(times[i]),
            ErrorCode::Configuration, "trajectory time step differs from T/N");
  }
  for (const auto& v : values) {
    require(v.truncation() == config.truncation && v.dim() == values.front().dim(),
            ErrorCode::DimensionMismatch, "phasor shape differs from configuration");
  }
}

namespace {

void check_grid(const SampledSignal& signal, const PhasorConfig& config) {
  config.validate();
  const double dt = config.step();
  if (std::abs(signal.dt() - dt) > 1e-9 * dt) {
    std::ostringstream os;
    os << "signal step " << signal.dt() << " does not match T/N = " << dt;
    fail(ErrorCode::Configuration, os.str());
  }
}

PhasorVector window_phasors(const SampledSignal& signal, const PhasorConfig& config,
                            const detail::FourierTables& tab, int end_index) {
  const int n = config.samples_per_period;
  const int h = config.truncation;
  const int start = end_index - n;
  const double ts = signal.time(start);
  const double w = config.omega();
  PhasorVector out(signal.dim(), h);
  for (int d = 0; d < signal.dim(); ++d) {
    const double* xr = signal.re().row(d).data() + start;
    const double* xi = signal.is_real() ? nullptr : signal.im().row(d).data() + start;
    for (int k = 0; k <= h; ++k) {
      auto [plus, minus] = detail::project(tab, k, xr, xi);
      out.at(k)[d] = plus * std::polar(1.0 / n, -w * k * ts);
      if (k > 0) out.at(-k)[d] = minus * std::polar(1.0 / n, w * k * ts);
    }
  }
  return out;
}

}  // namespace

PhasorVector decompose_window(const SampledSignal& signal, const PhasorConfig& config,
                              int end_index) {
  check_grid(signal, config);
  require(end_index >= config.samples_per_period && end_index < signal.count(),
          ErrorCode::WindowUnderflow, "window extends before the first sample");
  detail::FourierTables tab(config.truncation, config.samples_per_period);
  return window_phasors(signal, config, tab, end_index);
}

PhasorTrajectory decompose(const SampledSignal& signal, const PhasorConfig& config) {
  check_grid(signal, config);
  const int n = config.samples_per_period;
  if (signal.count() < n + 1) {
    std::ostringstream os;
    os << "window underflow: " << signal.count() << " samples, need at least " << n + 1;
    fail(ErrorCode::WindowUnderflow, os.str());
  }
  detail::FourierTables tab(config.truncation, n);
  PhasorTrajectory traj;
  traj.config = config;
  traj.times.reserve(signal.count() - n);
  traj.values.reserve(signal.count() - n);
  for (int i = n; i < signal.count(); ++i) {
    traj.times.push_back(signal.time(i));
    traj.values.push_back(window_phasors(signal, config, tab, i));
  }
  return traj;
}

struct SlidingDecomposer::Tables {
  detail::FourierTables tab;
};

SlidingDecomposer::SlidingDecomposer(int dim, const PhasorConfig& config)
    : dim_(dim), config_(config) {
  config.validate();
  require(dim > 0, ErrorCode::DimensionMismatch, "monitor dimension must be positive");
  tables_ = std::make_unique<Tables>(Tables{detail::FourierTables(config.truncation,
                                                                  config.samples_per_period)});
  ring_ = RowMatrixXd::Zero(dim, 2 * (config.samples_per_period + 1));
}

SlidingDecomposer::~SlidingDecomposer() = default;
SlidingDecomposer::SlidingDecomposer(SlidingDecomposer&&) noexcept = default;
SlidingDecomposer& SlidingDecomposer::operator=(SlidingDecomposer&&) noexcept = default;

void SlidingDecomposer::push(double t, const Eigen::VectorXd& x) {
  require(x.size() == dim_, ErrorCode::DimensionMismatch, "monitored sample dimension mismatch");
  const long len = config_.samples_per_period + 1;
  const long slot = pushed_ % len;
  ring_.col(slot) = x;
  ring_.col(slot + len) = x;
  ++pushed_;
  last_t_ = t;
}

PhasorVector SlidingDecomposer::phasors() const {
  require(ready(), ErrorCode::WindowUnderflow, "monitor has not seen a full window yet");
  const int n = config_.samples_per_period;
  const int h = config_.truncation;
  const long len = n + 1;
  const long start = pushed_ % len;  // oldest sample
  const double ts = last_t_ - config_.period;
  const double w = config_.omega();
  PhasorVector out(dim_, h);
  for (int d = 0; d < dim_; ++d) {
    const double* xr = ring_.row(d).data() + start;
    for (int k = 0; k <= h; ++k) {
      auto [plus, minus] = detail::project(tables_->tab, k, xr, nullptr);
      out.at(k)[d] = plus * std::polar(1.0 / n, -w * k * ts);
      if (k > 0) out.at(-k)[d] = minus * std::polar(1.0 / n, w * k * ts);
    }
  }
  return out;
}

std::vector<PhasorVector> differentiate(const PhasorTrajectory& traj) {
  const std::size_t m = traj.size();
  require(m >= 2, ErrorCode::Precondition, "need at least two trajectory samples");
  const double dt = traj.config.step();
  std::vector<PhasorVector> out;
  out.reserve(m);
  const int n = traj.dim();
  const int h = traj.config.truncation;
  for (std::size_t i = 0; i < m; ++i) {
    Eigen::VectorXcd d;
    if (i == 0) {
      d = (traj.values[1].stacked() - traj.values[0].stacked()) / dt;
    } else if (i + 1 == m) {
      d = (traj.values[i].stacked() - traj.values[i - 1].stacked()) / dt;
    } else {
      d = (traj.values[i + 1].stacked() - traj.values[i - 1].stacked()) / (2.0 * dt);
    }
    out.emplace_back(n, h, std::move(d));
  }
  return out;
}

namespace {

SampledSignal reconstruct_causal(const PhasorTrajectory& traj) {
  const auto deriv = differentiate(traj);
  const double w = traj.config.omega();
  const double half_t = 0.5 * traj.config.period;
  SampledSignal out(traj.dim(), traj.times.front(), traj.config.step(),
                    static_cast<int>(traj.size()), false);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    Eigen::VectorXcd x = traj.values[i].evaluate(w, traj.times[i]) + half_t * deriv[i].at(0);
    out.set(static_cast<int>(i), x);
  }
  return out;
}

SampledSignal reconstruct_noncausal(const PhasorTrajectory& traj, double offset) {
  const double period = traj.config.period;
  if (!(offset > 0.0 && offset < period)) {
    std::ostringstream os;
    os << "noncausal offset " << offset << " outside (0, " << period << ")";
    fail(ErrorCode::Parameter, os.str());
  }
  const int n = traj.config.samples_per_period;
  int m = static_cast<int>(std::lround(offset / traj.config.step()));
  m = std::clamp(m, 1, n - 1);
  const int count = static_cast<int>(traj.size()) - m;
  require(count > 0, ErrorCode::Parameter, "trajectory shorter than the noncausal offset");
  const double w = traj.config.omega();
  SampledSignal out(traj.dim(), traj.times.front(), traj.config.step(), count, false);
  for (int i = 0; i < count; ++i) out.set(i, traj.values[i + m].evaluate(w, traj.times[i]));
  return out;
}

SampledSignal reconstruct_twosided(const PhasorTrajectory& traj,
                                   const std::optional<SampledSignal>& seed) {
  if (!seed) fail(ErrorCode::SeedRequired, "two-sided reconstruction needs a seed window");
  const int n = traj.config.samples_per_period;
  const double dt = traj.config.step();
  const double t0 = traj.times.front();
  require(seed->dim() == traj.dim(), ErrorCode::DimensionMismatch,
          "seed dimension differs from trajectory");
  require(std::abs(seed->dt() - dt) <= 1e-9 * dt, ErrorCode::Configuration,
          "seed step does not match T/N");
  const long j0 = std::lround((t0 - traj.config.period - seed->t0()) / dt);
  if (j0 < 0 || j0 + n > seed->count()) {
    fail(ErrorCode::SeedRequired, "seed does not cover the window preceding the trajectory");
  }
  const double w = traj.config.omega();
  const int count = static_cast<int>(traj.size());
  SampledSignal out(traj.dim(), t0, dt, count, false);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXcd prev = i < n ? seed->value(static_cast<int>(j0 + i)) : out.value(i - n);
    out.set(i, Eigen::VectorXcd(2.0 * traj.values[i].evaluate(w, traj.times[i]) - prev));
  }
  return out;
}

}  // namespace

SampledSignal reconstruct(const PhasorTrajectory& traj, const ReconstructionMode& mode) {
  require(traj.size() > 0, ErrorCode::Precondition, "empty trajectory");
  traj.validate();
  return std::visit(
      [&](const auto& m) -> SampledSignal {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, reconstruction::Causal>) {
          return reconstruct_causal(traj);
        } else if constexpr (std::is_same_v<M, reconstruction::NonCausal>) {
          return reconstruct_noncausal(traj, m.offset);
        } else {
          return reconstruct_twosided(traj, m.seed);
        }
      },
      mode);
}

CoincidenceReport coincidence_residual(const PhasorTrajectory& traj) {
  require(traj.size() >= 3, ErrorCode::Precondition,
          "coincidence test needs at least three samples");
  const auto deriv = differentiate(traj);
  const double w = traj.config.omega();
  const int h = traj.config.truncation;
  CoincidenceReport rep;
  rep.times = traj.times;
  rep.residual.resize(traj.size(), 0.0);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto d0 = deriv[i].at(0);
    // one-sided quotients at the ends are centred half a step inward
    double tc = traj.times[i];
    if (i == 0) tc = 0.5 * (traj.times[0] + traj.times[1]);
    if (i + 1 == traj.size()) tc = 0.5 * (traj.times[i - 1] + traj.times[i]);
    double worst = 0.0;
    for (int k = -h; k <= h; ++k) {
      if (k == 0) continue;
      double r = (deriv[i].at(k) - d0 * std::polar(1.0, -w * k * tc)).norm();
      worst = std::max(worst, r);
    }
    rep.residual[i] = worst / (1.0 + d0.norm());
    rep.max = std::max(rep.max, rep.residual[i]);
  }
  return rep;
}

}  // namespace phasorctl
