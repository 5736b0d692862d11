#pragma once

// Harmonic equilibria of bilinear affine models and the weighted
// least-squares design of the periodic control that sustains them.

#include <optional>
#include <vector>

#include "phasorctl/model.hpp"

namespace phasorctl {

/// X^e = -(A(S) - N)^{-1} B(S) W; throws NearSingular when the harmonic
/// matrix is ill-conditioned.
PhasorVector equilibrium_for_control(const HarmonicBilinearModel& model, const ToeplitzOperator& S,
                                     const PhasorVector& W);

/// |(A(S)-N)X + B(S)W| / (1 + |X|)
double equilibrium_residual(const HarmonicBilinearModel& model, const PhasorVector& X,
                            const ToeplitzOperator& S, const PhasorVector& W);

/// J = w0 |V_0 - v_ref|^2 + w1 sum_{k>=1} |V_k|^2 + w2 sum_{k>=0} |Re I_k|^2
///   + w3 sum_{k>=2} |I_k|^2
/// with I and V the state components at current_index and voltage_index.
struct EquilibriumSpec {
  double w0 = 1e3;
  double w1 = 1.0;
  double w2 = 1e3;
  double w3 = 1.0;
  double v_ref = 200.0;
  int current_index = 0;
  int voltage_index = 1;
  ControlBounds bounds;
  /// Harmonics k >= 0 of s^e that are optimised; empty means 0..h.
  std::vector<int> free_harmonics;
  /// Phasors of the starting s^e; by default s_1 = W_1 / v_ref.
  std::optional<PhasorVector> initial_guess;
  int max_iterations = 500;
  double gradient_tolerance = 1e-6;  // on |grad J| / (1 + J)
  /// Trust radius on each phasor parameter per step; |s_k| <= 1 for any
  /// admissible control, so longer steps only reach inadmissible basins.
  double max_step = 0.1;

  void validate() const;
};

struct EquilibriumResult {
  PhasorVector s;  // phasors of s^e
  ToeplitzOperator S;
  PhasorVector X;
  double J = 0.0;
  double residual = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  double s_min = 0.0;  // range of the representative s^e(t) over a fine grid
  double s_max = 0.0;
  bool within_bounds = false;
};

/// Objective value and gradient with respect to the free parameters
/// (Re s_0, then Re s_k, Im s_k for each free k >= 1).
struct ObjectiveEval {
  double J = 0.0;
  Eigen::VectorXd gradient;
  Eigen::VectorXd residuals;  // J = |residuals|^2
  Eigen::MatrixXd jacobian;   // d residuals / d parameters
  PhasorVector X;
};

class EquilibriumProblem {
 public:
  EquilibriumProblem(const HarmonicBilinearModel& model, const EquilibriumSpec& spec,
                     const PhasorVector& W);

  int parameter_count() const { return static_cast<int>(2 * free_.size() - (has_zero_ ? 1 : 0)); }
  Eigen::VectorXd parameters_of(const PhasorVector& s) const;
  PhasorVector phasors_of(const Eigen::VectorXd& p, const PhasorVector& base) const;

  /// Objective with analytic gradient through the linear equilibrium solve.
  ObjectiveEval evaluate(const PhasorVector& s) const;
  double objective(const PhasorVector& s) const;

 private:
  const HarmonicBilinearModel& model_;
  EquilibriumSpec spec_;
  PhasorVector W_;
  std::vector<int> free_;
  bool has_zero_ = false;
};

EquilibriumResult optimize_equilibrium(const HarmonicBilinearModel& model,
                                       const EquilibriumSpec& spec, const PhasorVector& W);

/// Range of a scalar representative over `samples` points of one period.
std::pair<double, double> representative_range(const PhasorVector& s, double period,
                                               int samples = 4096);

}  // namespace phasorctl
