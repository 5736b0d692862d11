#pragma once

// Stabilising and forwarding feedback laws built from harmonic Lyapunov and
// Sylvester solutions, realised in the time domain through the T-periodic
// representatives of the harmonic gains.

#include <optional>
#include <string>
#include <vector>

#include "phasorctl/equilibrium.hpp"
#include "phasorctl/solvers.hpp"

namespace phasorctl {

/// Real T-periodic matrix function sum_k C_k cos(kwt) + S_k sin(kwt),
/// k = 0..K, evaluated with a cos/sin recurrence.
class PeriodicMatrix {
 public:
  PeriodicMatrix() = default;
  /// Representative of an operator with a real representative.
  explicit PeriodicMatrix(const ToeplitzOperator& op);
  /// Representative of constant phasors (dim x 1).
  PeriodicMatrix(const PhasorVector& x, double period);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  double omega() const { return omega_; }
  Eigen::MatrixXd operator()(double t) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  double omega_ = 0.0;
  std::vector<Eigen::MatrixXd> c_;
  std::vector<Eigen::MatrixXd> s_;
};

/// s = s^e - gamma g(x)' P(t) (x - x^e), g(x) = A_dep x + B_dep w.
struct HarmonicController {
  PhasorConfig config;
  ControlBounds bounds;
  Eigen::MatrixXd A_dep;
  Eigen::MatrixXd B_dep;
  PhasorVector W;  // nominal exogenous input phasors
  PhasorVector s_e;
  ToeplitzOperator S_e;
  PhasorVector X_e;
  ToeplitzOperator P;
  ToeplitzOperator Gamma;
  ToeplitzOperator Q;
  double lyapunov_residual = 0.0;
  double lyapunov_defect = 0.0;
  double hurwitz_margin = 0.0;

  // time-domain representatives
  PeriodicMatrix P_t;
  PeriodicMatrix gamma_t;
  PeriodicMatrix s_e_t;
  PeriodicMatrix x_e_t;
  PeriodicMatrix w_t;

  /// Rebuilds the representatives from the harmonic data.
  void realise();
};

enum class ActionKind {
  Integrator,  // z' = gamma y
  Cosine,      // z' = gamma cos(k w t) y
  Oscillator,  // z' = [[0, -k w], [k w, 0]] z + [gamma; 0] y
};

std::string action_name(ActionKind kind);
ActionKind action_from_name(const std::string& name);

/// One internal-model action driven by y = x~[channel].
struct BankAction {
  ActionKind kind = ActionKind::Integrator;
  int channel = 0;
  int harmonic = 0;
  double gain = 0.0;

  int states() const { return kind == ActionKind::Oscillator ? 2 : 1; }
};

/// s = s^e - eta1 g' P x~ + eta2 g' M(t)' (z - M(t) x~), z' = O z + L C x~.
/// With an empty bank the base law is used unchanged.
struct ForwardingController {
  HarmonicController base;
  std::vector<BankAction> bank;
  double eta1 = 0.0;
  double eta2 = 0.0;
  ToeplitzOperator O;   // q x q
  ToeplitzOperator LC;  // q x n
  ToeplitzOperator M;   // q x n, re-Toeplitzified Sylvester solution
  Eigen::MatrixXcd M_dense;
  double sylvester_residual = 0.0;
  double sylvester_defect = 0.0;

  PeriodicMatrix O_t;
  PeriodicMatrix LC_t;
  PeriodicMatrix M_t;

  int bank_states() const;
  bool has_bank() const { return !bank.empty(); }
  void realise();
};

/// Raises Unstable when A(S^e) - N is not Hurwitz and Precondition when the
/// Q or gamma samples are not symmetric positive definite.
HarmonicController synthesize_feedback(const HarmonicBilinearModel& model,
                                       const EquilibriumResult& eq, const MatrixSamples& Q,
                                       const MatrixSamples& gamma, const ControlBounds& bounds);

/// Constant Q and gamma.
HarmonicController synthesize_feedback(const HarmonicBilinearModel& model,
                                       const EquilibriumResult& eq, const Eigen::MatrixXd& Q,
                                       double gamma, const ControlBounds& bounds);

ForwardingController synthesize_forwarding(const HarmonicBilinearModel& model,
                                           const HarmonicController& base,
                                           const std::vector<BankAction>& bank, double eta1,
                                           double eta2);

/// Wraps a base controller as a bank-free forwarding controller.
ForwardingController as_forwarding(const HarmonicController& base);

/// Unsaturated control value at time t.
double eval_control(const ForwardingController& ctrl, double t, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& z);
double eval_control(const HarmonicController& ctrl, double t, const Eigen::VectorXd& x);

/// Bank derivative O z + L C (x - x^e).
Eigen::VectorXd bank_rhs(const ForwardingController& ctrl, double t, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& z);

/// Instantaneous Lyapunov function x~' P x~ + (eta2/eta1) |z - M x~|^2.
double lyapunov_value(const ForwardingController& ctrl, double t, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& z);

struct Saturated {
  double s = 0.0;
  double alpha = 1.0;
};

/// Largest alpha in [0, 1] keeping s_e + alpha (s - s_e) in bounds.
Saturated saturate(double s, double s_e, const ControlBounds& bounds);

bool is_block_toeplitz_gain(const Eigen::MatrixXcd& K, int rows, int cols, double tol);

/// Harmonic form of the base law: phasors of s for state phasors X,
/// S^e - Gamma G(X)* P (X - X^e).
PhasorVector harmonic_law(const HarmonicController& ctrl, const PhasorVector& X);

}  // namespace phasorctl
