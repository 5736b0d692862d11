#include "phasorctl/control.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "phasorctl/errors.hpp"

namespace phasorctl {

PeriodicMatrix::PeriodicMatrix(const ToeplitzOperator& op)
    : rows_(op.rows()), cols_(op.cols()), omega_(op.omega()) {
  const int kmax = op.band();
  c_.resize(kmax + 1);
  s_.resize(kmax + 1);
  c_[0] = op.block(0).real();
  s_[0] = Eigen::MatrixXd::Zero(rows_, cols_);
  for (int k = 1; k <= kmax; ++k) {
    c_[k] = op.block(k).real() + op.block(-k).real();
    s_[k] = op.block(-k).imag() - op.block(k).imag();
  }
}

PeriodicMatrix::PeriodicMatrix(const PhasorVector& x, double period)
    : rows_(x.dim()), cols_(1), omega_(2.0 * std::numbers::pi / period) {
  const int kmax = x.truncation();
  c_.resize(kmax + 1);
  s_.resize(kmax + 1);
  c_[0] = x.at(0).real();
  s_[0] = Eigen::MatrixXd::Zero(rows_, 1);
  for (int k = 1; k <= kmax; ++k) {
    c_[k] = x.at(k).real() + x.at(-k).real();
    s_[k] = x.at(-k).imag() - x.at(k).imag();
  }
}

Eigen::MatrixXd PeriodicMatrix::operator()(double t) const {
  Eigen::MatrixXd out = c_.empty() ? Eigen::MatrixXd::Zero(rows_, cols_) : c_[0];
  if (c_.size() <= 1) return out;
  const double c1 = std::cos(omega_ * t);
  const double s1 = std::sin(omega_ * t);
  double ck = c1, sk = s1;
  for (std::size_t k = 1; k < c_.size(); ++k) {
    out += ck * c_[k] + sk * s_[k];
    const double cn = ck * c1 - sk * s1;
    sk = sk * c1 + ck * s1;
    ck = cn;
  }
  return out;
}

void HarmonicController::realise() {
  P_t = PeriodicMatrix(P);
  gamma_t = PeriodicMatrix(Gamma);
  s_e_t = PeriodicMatrix(s_e, config.period);
  x_e_t = PeriodicMatrix(X_e, config.period);
  w_t = PeriodicMatrix(W, config.period);
}

std::string action_name(ActionKind kind) {
  switch (kind) {
    case ActionKind::Integrator: return "integrator";
    case ActionKind::Cosine: return "cosine";
    case ActionKind::Oscillator: return "oscillator";
  }
  return "unknown";
}

ActionKind action_from_name(const std::string& name) {
  if (name == "integrator") return ActionKind::Integrator;
  if (name == "cosine") return ActionKind::Cosine;
  if (name == "oscillator") return ActionKind::Oscillator;
  fail(ErrorCode::Parameter, "unknown bank action kind '" + name + "'");
}

int ForwardingController::bank_states() const {
  int q = 0;
  for (const auto& a : bank) q += a.states();
  return q;
}

void ForwardingController::realise() {
  base.realise();
  if (!has_bank()) return;
  O_t = PeriodicMatrix(O);
  LC_t = PeriodicMatrix(LC);
  M_t = PeriodicMatrix(M);
}

namespace {

void check_spd_samples(const MatrixSamples& s, const std::string& what) {
  for (const auto& v : s.values) {
    const Eigen::MatrixXd re = v.real();
    const double scale = std::max(1.0, re.cwiseAbs().maxCoeff());
    require(v.imag().cwiseAbs().maxCoeff() <= 1e-12 * scale &&
                (re - re.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale,
            ErrorCode::Precondition, what + " samples must be real symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(re, Eigen::EigenvaluesOnly);
    require(es.eigenvalues().minCoeff() > 0.0, ErrorCode::Precondition,
            what + " samples must be positive definite");
  }
}

MatrixSamples constant_samples(const Eigen::MatrixXcd& m, const PhasorConfig& config) {
  return MatrixSamples::sample([&](double) { return m; }, config);
}

}  // namespace

HarmonicController synthesize_feedback(const HarmonicBilinearModel& model,
                                       const EquilibriumResult& eq, const MatrixSamples& Q,
                                       const MatrixSamples& gamma, const ControlBounds& bounds) {
  const PhasorConfig& cfg = model.config();
  check_spd_samples(Q, "Q");
  check_spd_samples(gamma, "gamma");
  require(!Q.values.empty() && Q.values.front().rows() == model.n(),
          ErrorCode::DimensionMismatch, "Q must be n x n");
  require(!gamma.values.empty() && gamma.values.front().rows() == 1,
          ErrorCode::DimensionMismatch, "gamma must be scalar");

  HarmonicController c;
  c.config = cfg;
  c.bounds = bounds;
  c.A_dep = model.A_dep();
  c.B_dep = model.B_dep();
  c.W = model.W();
  c.s_e = eq.s.retruncated(cfg.truncation);
  c.S_e = control_operator(c.s_e, cfg.period);
  c.X_e = eq.X;

  auto [lo, hi] = representative_range(c.s_e, cfg.period);
  require(bounds.interior(lo) && bounds.interior(hi), ErrorCode::Precondition,
          "equilibrium control leaves the interior of the bounds");

  const Eigen::MatrixXcd drift = model.drift(c.S_e);
  c.hurwitz_margin = hurwitz_margin(drift);
  if (c.hurwitz_margin <= 0.0) {
    std::ostringstream os;
    os << "equilibrium harmonic drift is not Hurwitz (margin " << c.hurwitz_margin << ")";
    fail(ErrorCode::Unstable, os.str());
  }
  c.Q = toeplitz_of(Q, cfg);
  c.Gamma = toeplitz_of(gamma, cfg);
  auto sol = solve_lyapunov(drift, c.Q);
  c.P = std::move(sol.P);
  c.lyapunov_residual = sol.residual;
  c.lyapunov_defect = sol.defect;
  const auto st = check_structure(c.P);
  require(st.hermitian && st.positive_definite, ErrorCode::Numerical,
          "Lyapunov solution is not hermitian positive definite");
  c.realise();
  return c;
}

HarmonicController synthesize_feedback(const HarmonicBilinearModel& model,
                                       const EquilibriumResult& eq, const Eigen::MatrixXd& Q,
                                       double gamma, const ControlBounds& bounds) {
  const PhasorConfig& cfg = model.config();
  Eigen::MatrixXcd g(1, 1);
  g(0, 0) = gamma;
  return synthesize_feedback(model, eq, constant_samples(Q.cast<cplx>(), cfg),
                             constant_samples(g, cfg), bounds);
}

ForwardingController as_forwarding(const HarmonicController& base) {
  ForwardingController f;
  f.base = base;
  f.realise();
  return f;
}

ForwardingController synthesize_forwarding(const HarmonicBilinearModel& model,
                                           const HarmonicController& base,
                                           const std::vector<BankAction>& bank, double eta1,
                                           double eta2) {
  ForwardingController f;
  f.base = base;
  f.bank = bank;
  f.eta1 = eta1;
  f.eta2 = eta2;
  if (bank.empty()) {
    f.realise();
    return f;
  }
  require(eta1 > 0.0 && eta2 > 0.0, ErrorCode::Parameter, "eta1 and eta2 must be positive");
  const PhasorConfig& cfg = model.config();
  const int n = model.n();
  const double w = cfg.omega();
  for (const auto& a : bank) {
    require(a.channel >= 0 && a.channel < n, ErrorCode::Parameter, "bank channel out of range");
    require(a.gain > 0.0, ErrorCode::Parameter, "bank gains must be positive");
    require(a.kind == ActionKind::Integrator || a.harmonic >= 1, ErrorCode::Parameter,
            "cosine and oscillator actions need a harmonic >= 1");
  }
  const int q = f.bank_states();

  Eigen::MatrixXcd o = Eigen::MatrixXcd::Zero(q, q);
  {
    int row = 0;
    for (const auto& a : bank) {
      if (a.kind == ActionKind::Oscillator) {
        o(row, row + 1) = -a.harmonic * w;
        o(row + 1, row) = a.harmonic * w;
      }
      row += a.states();
    }
  }
  auto lc = [&](double t) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(q, n);
    int row = 0;
    for (const auto& a : bank) {
      double g = a.gain;
      if (a.kind == ActionKind::Cosine) g *= std::cos(a.harmonic * w * t);
      m(row, a.channel) = g;
      row += a.states();
    }
    return m;
  };
  f.O = toeplitz_of(constant_samples(o, cfg), cfg);
  f.LC = toeplitz_of(MatrixSamples::sample(lc, cfg), cfg);
  const Eigen::MatrixXcd od = f.O.dense();
  require((od + od.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 * std::max(1.0, od.cwiseAbs().maxCoeff()),
          ErrorCode::Precondition, "bank dynamics must be skew-hermitian");

  const Eigen::MatrixXcd drift = model.drift(base.S_e);
  auto sol = solve_sylvester(od - n_operator(cfg, q), drift, f.LC.dense());
  f.M_dense = sol.M;
  f.sylvester_residual = sol.residual;
  auto rt = retoeplitz(sol.M, q, n, cfg.truncation, cfg.period);
  f.M = std::move(rt.op);
  f.sylvester_defect = rt.defect;
  f.realise();
  return f;
}

double eval_control(const HarmonicController& c, double t, const Eigen::VectorXd& x) {
  const Eigen::VectorXd xt = x - c.x_e_t(t);
  const Eigen::VectorXd g = c.A_dep * x + c.B_dep * c.w_t(t);
  const double se = c.s_e_t(t)(0, 0);
  return se - c.gamma_t(t)(0, 0) * g.dot(c.P_t(t) * xt);
}

double eval_control(const ForwardingController& f, double t, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& z) {
  if (!f.has_bank()) return eval_control(f.base, t, x);
  const auto& c = f.base;
  const Eigen::VectorXd xt = x - c.x_e_t(t);
  const Eigen::VectorXd g = c.A_dep * x + c.B_dep * c.w_t(t);
  const Eigen::MatrixXd m = f.M_t(t);
  const double se = c.s_e_t(t)(0, 0);
  return se - f.eta1 * g.dot(c.P_t(t) * xt) + f.eta2 * g.dot(m.transpose() * (z - m * xt));
}

Eigen::VectorXd bank_rhs(const ForwardingController& f, double t, const Eigen::VectorXd& x,
                         const Eigen::VectorXd& z) {
  if (!f.has_bank()) return Eigen::VectorXd();
  const Eigen::VectorXd xt = x - f.base.x_e_t(t);
  return f.O_t(t) * z + f.LC_t(t) * xt;
}

double lyapunov_value(const ForwardingController& f, double t, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& z) {
  const auto& c = f.base;
  const Eigen::VectorXd xt = x - c.x_e_t(t);
  double v = xt.dot(c.P_t(t) * xt);
  if (f.has_bank()) v += (f.eta2 / f.eta1) * (z - f.M_t(t) * xt).squaredNorm();
  return v;
}

Saturated saturate(double s, double s_e, const ControlBounds& bounds) {
  require(bounds.interior(s_e), ErrorCode::Precondition,
          "equilibrium control must lie strictly inside the bounds");
  if (bounds.contains(s)) return {s, 1.0};
  const double edge = s > bounds.hi ? bounds.hi : bounds.lo;
  const double alpha = (edge - s_e) / (s - s_e);
  return {edge, alpha};
}

bool is_block_toeplitz_gain(const Eigen::MatrixXcd& K, int rows, int cols, double tol) {
  return toeplitz_defect(K, rows, cols) <= tol;
}

PhasorVector harmonic_law(const HarmonicController& c, const PhasorVector& X) {
  const int h = c.config.truncation;
  const int n = static_cast<int>(c.A_dep.rows());
  require(X.dim() == n && X.truncation() == h, ErrorCode::DimensionMismatch,
          "state phasors do not match the controller");
  ToeplitzOperator G(n, 1, h, c.config.period);
  for (int k = -h; k <= h; ++k) {
    G.block(k) = (c.A_dep.cast<cplx>() * X.at(k) + c.B_dep.cast<cplx>() * c.W.at(k)).eval();
  }
  Eigen::VectorXcd xt = X.stacked() - c.X_e.stacked();
  Eigen::VectorXcd ds = c.Gamma.dense() * (G.adjoint().dense() * (c.P.dense() * xt));
  Eigen::VectorXcd s = c.s_e.stacked() - ds;
  return PhasorVector(1, h, std::move(s));
}

}  // namespace phasorctl
