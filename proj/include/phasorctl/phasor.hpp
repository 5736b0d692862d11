#pragma once

// Sliding Fourier decomposition of sampled signals over a trailing window of
// one period, its inverse, and the phase-locking test that characterises
// phasor trajectories owning a time-domain representative.

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace phasorctl {

using cplx = std::complex<double>;
using RowMatrixXd = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Window length, truncation order and quadrature grid shared by every
/// harmonic-domain object.
struct PhasorConfig {
  double period = 0.0;         // T, seconds
  int truncation = 0;          // h: phasors kept for |k| <= h
  int samples_per_period = 0;  // N: uniform quadrature grid

  double omega() const;
  double step() const { return period / samples_per_period; }
  int harmonics() const { return 2 * truncation + 1; }

  /// Throws Configuration if the grid is not Nyquist-safe (N >= 4(2h+1)).
  void validate() const;

  bool operator==(const PhasorConfig&) const = default;
};

/// Truncated doubly indexed sequence X_k in C^n, |k| <= h, stored stacked
/// with the harmonic index varying slowest (block k holds X_k).
class PhasorVector {
 public:
  PhasorVector() = default;
  PhasorVector(int dim, int truncation);
  PhasorVector(int dim, int truncation, Eigen::VectorXcd stacked);

  int dim() const { return dim_; }
  int truncation() const { return truncation_; }
  int harmonics() const { return 2 * truncation_ + 1; }

  auto at(int k) { return stacked_.segment(offset(k), dim_); }
  auto at(int k) const { return stacked_.segment(offset(k), dim_); }

  const Eigen::VectorXcd& stacked() const { return stacked_; }
  Eigen::VectorXcd& stacked() { return stacked_; }

  /// True when X_{-k} = conj(X_k) for every k (real-signal phasors).
  bool is_conjugate_symmetric(double tol = 1e-10) const;

  /// Fourier synthesis sum_k X_k e^{j omega k t}.
  Eigen::VectorXcd evaluate(double omega, double t) const;

  /// Same phasors truncated or zero-padded to another order.
  PhasorVector retruncated(int truncation) const;

 private:
  Eigen::Index offset(int k) const;

  int dim_ = 0;
  int truncation_ = 0;
  Eigen::VectorXcd stacked_;
};

/// Uniformly sampled n-dimensional signal. Components are stored row-wise so
/// that every component is a contiguous time series; real signals carry no
/// imaginary plane.
class SampledSignal {
 public:
  SampledSignal() = default;
  SampledSignal(int dim, double t0, double dt, int count, bool real = true);

  static SampledSignal from_function(int dim, double t0, double dt, int count,
                                     const std::function<Eigen::VectorXd(double)>& fn);
  static SampledSignal from_complex_function(int dim, double t0, double dt, int count,
                                             const std::function<Eigen::VectorXcd(double)>& fn);

  int dim() const { return static_cast<int>(re_.rows()); }
  int count() const { return static_cast<int>(re_.cols()); }
  double t0() const { return t0_; }
  double dt() const { return dt_; }
  double time(int i) const { return t0_ + dt_ * i; }
  bool is_real() const { return im_.size() == 0; }

  Eigen::VectorXcd value(int i) const;
  Eigen::VectorXd real_value(int i) const { return re_.col(i); }
  void set(int i, const Eigen::VectorXcd& v);
  void set(int i, const Eigen::VectorXd& v);

  const RowMatrixXd& re() const { return re_; }
  const RowMatrixXd& im() const { return im_; }

  /// Drops the imaginary plane after checking it is below tol.
  SampledSignal to_real(double tol) const;

 private:
  double t0_ = 0.0;
  double dt_ = 0.0;
  RowMatrixXd re_;
  RowMatrixXd im_;
};

/// Time-sampled path of phasor vectors on the grid of its configuration.
struct PhasorTrajectory {
  PhasorConfig config;
  std::vector<double> times;
  std::vector<PhasorVector> values;

  std::size_t size() const { return times.size(); }
  int dim() const { return values.empty() ? 0 : values.front().dim(); }
  void validate() const;
};

/// Phasors of x over [t-T, t] for every sample time t with one full window
/// of history, by trapezoidal quadrature.
PhasorTrajectory decompose(const SampledSignal& signal, const PhasorConfig& config);

/// Phasors of the single window ending at sample `end_index`.
PhasorVector decompose_window(const SampledSignal& signal, const PhasorConfig& config,
                              int end_index);

/// Streaming decomposition over a ring buffer of the last N+1 samples.
/// Phasors are withheld until one full window has been pushed.
class SlidingDecomposer {
 public:
  SlidingDecomposer(int dim, const PhasorConfig& config);
  ~SlidingDecomposer();
  SlidingDecomposer(SlidingDecomposer&&) noexcept;
  SlidingDecomposer& operator=(SlidingDecomposer&&) noexcept;

  void push(double t, const Eigen::VectorXd& x);
  bool ready() const { return pushed_ > config_.samples_per_period; }
  double time() const { return last_t_; }
  PhasorVector phasors() const;

 private:
  struct Tables;
  int dim_;
  PhasorConfig config_;
  std::unique_ptr<Tables> tables_;
  // each component is stored twice so every window is contiguous
  RowMatrixXd ring_;
  long pushed_ = 0;
  double last_t_ = 0.0;
};

/// Phasor derivatives by central differences (one-sided at the ends).
std::vector<PhasorVector> differentiate(const PhasorTrajectory& traj);

namespace reconstruction {
/// x(t) = sum_p X_p(t) e^{j w p t} + (T/2) dX_0/dt(t)
struct Causal {};
/// x(t) = sum_p X_p(t + offset) e^{j w p t}, 0 < offset < T; the offset is
/// snapped to the trajectory grid.
struct NonCausal {
  double offset = 0.0;
};
/// x(t) = 2 sum_p X_p(t) e^{j w p t} - x(t - T), seeded with one window of
/// the original signal covering [t0 - T, t0).
struct TwoSided {
  std::optional<SampledSignal> seed;
};
}  // namespace reconstruction

using ReconstructionMode =
    std::variant<reconstruction::Causal, reconstruction::NonCausal, reconstruction::TwoSided>;

SampledSignal reconstruct(const PhasorTrajectory& traj, const ReconstructionMode& mode);

struct CoincidenceReport {
  std::vector<double> times;
  std::vector<double> residual;  // per time, normalised by (1 + |dX_0/dt|)
  double max = 0.0;
};

/// Departure of a trajectory from dX_k/dt = dX_0/dt e^{-j w k t}.
CoincidenceReport coincidence_residual(const PhasorTrajectory& traj);

}  // namespace phasorctl
