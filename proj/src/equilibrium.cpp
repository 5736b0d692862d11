#include "phasorctl/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "phasorctl/errors.hpp"

namespace phasorctl {

namespace {

Eigen::PartialPivLU<Eigen::MatrixXcd> factor(const Eigen::MatrixXcd& f) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(f);
  const double rc = lu.rcond();
  if (!(rc > 1e-13)) {
    std::ostringstream os;
    os << "harmonic equilibrium matrix is near-singular (rcond " << rc << ")";
    fail(ErrorCode::NearSingular, os.str());
  }
  return lu;
}

}  // namespace

PhasorVector equilibrium_for_control(const HarmonicBilinearModel& model, const ToeplitzOperator& S,
                                     const PhasorVector& W) {
  require(W.dim() == model.m() && W.truncation() == model.config().truncation,
          ErrorCode::DimensionMismatch, "input phasors do not match the model");
  auto lu = factor(model.drift(S));
  Eigen::VectorXcd x = -lu.solve(model.B_of(S) * W.stacked());
  return PhasorVector(model.n(), model.config().truncation, std::move(x));
}

double equilibrium_residual(const HarmonicBilinearModel& model, const PhasorVector& X,
                            const ToeplitzOperator& S, const PhasorVector& W) {
  return harmonic_rhs(model, X, S, W).stacked().norm() / (1.0 + X.stacked().norm());
}

void EquilibriumSpec::validate() const {
  require(w0 >= 0 && w1 >= 0 && w2 >= 0 && w3 >= 0, ErrorCode::Parameter,
          "weights must be non-negative");
  require(current_index >= 0 && voltage_index >= 0, ErrorCode::Parameter,
          "state indices must be non-negative");
  require(max_iterations >= 0, ErrorCode::Parameter, "max_iterations must be non-negative");
  require(max_step > 0, ErrorCode::Parameter, "max_step must be positive");
  for (int k : free_harmonics) require(k >= 0, ErrorCode::Parameter, "free harmonics are k >= 0");
}

EquilibriumProblem::EquilibriumProblem(const HarmonicBilinearModel& model,
                                       const EquilibriumSpec& spec, const PhasorVector& W)
    : model_(model), spec_(spec), W_(W) {
  spec.validate();
  const int h = model.config().truncation;
  require(spec.current_index < model.n() && spec.voltage_index < model.n(),
          ErrorCode::Parameter, "state index outside the model dimension");
  if (spec.free_harmonics.empty()) {
    for (int k = 0; k <= h; ++k) free_.push_back(k);
  } else {
    free_ = spec.free_harmonics;
    std::sort(free_.begin(), free_.end());
    free_.erase(std::unique(free_.begin(), free_.end()), free_.end());
    require(free_.back() <= h, ErrorCode::Parameter, "free harmonic above the truncation");
  }
  has_zero_ = free_.front() == 0;
}

Eigen::VectorXd EquilibriumProblem::parameters_of(const PhasorVector& s) const {
  Eigen::VectorXd p(parameter_count());
  int i = 0;
  for (int k : free_) {
    p[i++] = s.at(k)[0].real();
    if (k > 0) p[i++] = s.at(k)[0].imag();
  }
  return p;
}

PhasorVector EquilibriumProblem::phasors_of(const Eigen::VectorXd& p,
                                            const PhasorVector& base) const {
  PhasorVector s = base;
  int i = 0;
  for (int k : free_) {
    if (k == 0) {
      s.at(0)[0] = cplx(p[i++], 0.0);
    } else {
      cplx v(p[i], p[i + 1]);
      i += 2;
      s.at(k)[0] = v;
      s.at(-k)[0] = std::conj(v);
    }
  }
  return s;
}

namespace {

// Weighted residual entries of J; `offset` toggles the constant -v_ref term
// so the same routine maps phasor perturbations to residual perturbations.
Eigen::VectorXd weighted_residuals(const PhasorVector& x, const EquilibriumSpec& spec,
                                   bool offset) {
  const int h = x.truncation();
  const int ii = spec.current_index;
  const int vi = spec.voltage_index;
  std::vector<double> r;
  const double s0 = std::sqrt(spec.w0), s1 = std::sqrt(spec.w1);
  const double s2 = std::sqrt(spec.w2), s3 = std::sqrt(spec.w3);
  cplx v0 = x.at(0)[vi] - (offset ? spec.v_ref : 0.0);
  r.push_back(s0 * v0.real());
  r.push_back(s0 * v0.imag());
  for (int k = 1; k <= h; ++k) {
    r.push_back(s1 * x.at(k)[vi].real());
    r.push_back(s1 * x.at(k)[vi].imag());
  }
  for (int k = 0; k <= h; ++k) r.push_back(s2 * x.at(k)[ii].real());
  for (int k = 2; k <= h; ++k) {
    r.push_back(s3 * x.at(k)[ii].real());
    r.push_back(s3 * x.at(k)[ii].imag());
  }
  return Eigen::Map<Eigen::VectorXd>(r.data(), static_cast<Eigen::Index>(r.size()));
}

}  // namespace

ObjectiveEval EquilibriumProblem::evaluate(const PhasorVector& s) const {
  const double period = model_.config().period;
  const int h = model_.config().truncation;
  const ToeplitzOperator S = control_operator(s, period);
  auto lu = factor(model_.drift(S));
  const Eigen::MatrixXcd bs = model_.B_of(S);
  Eigen::VectorXcd x = -lu.solve(bs * W_.stacked());

  ObjectiveEval ev;
  ev.X = PhasorVector(model_.n(), h, x);
  ev.residuals = weighted_residuals(ev.X, spec_, true);
  ev.J = ev.residuals.squaredNorm();
  ev.jacobian.resize(ev.residuals.size(), parameter_count());

  int col = 0;
  for (int k : free_) {
    for (int part = 0; part < (k == 0 ? 1 : 2); ++part) {
      PhasorVector ds(1, h);
      cplx unit = part == 0 ? cplx(1.0, 0.0) : cplx(0.0, 1.0);
      ds.at(k)[0] = unit;
      if (k > 0) ds.at(-k)[0] = std::conj(unit);
      const Eigen::MatrixXcd dsd = control_operator(ds, period).dense();
      Eigen::VectorXcd rhs = kron(dsd, model_.A_dep()) * x + kron(dsd, model_.B_dep()) * W_.stacked();
      Eigen::VectorXcd dx = -lu.solve(rhs);
      ev.jacobian.col(col++) = weighted_residuals(PhasorVector(model_.n(), h, dx), spec_, false);
    }
  }
  ev.gradient = 2.0 * ev.jacobian.transpose() * ev.residuals;
  return ev;
}

double EquilibriumProblem::objective(const PhasorVector& s) const {
  const ToeplitzOperator S = control_operator(s, model_.config().period);
  PhasorVector x = equilibrium_for_control(model_, S, W_);
  return weighted_residuals(x, spec_, true).squaredNorm();
}

std::pair<double, double> representative_range(const PhasorVector& s, double period,
                                               int samples) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  const double w = 2.0 * std::numbers::pi / period;
  for (int i = 0; i < samples; ++i) {
    double v = s.evaluate(w, period * i / samples)[0].real();
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

EquilibriumResult optimize_equilibrium(const HarmonicBilinearModel& model,
                                       const EquilibriumSpec& spec, const PhasorVector& W) {
  EquilibriumProblem prob(model, spec, W);
  const int h = model.config().truncation;

  PhasorVector seed(1, h);
  if (spec.initial_guess) {
    seed = spec.initial_guess->retruncated(h);
    require(seed.dim() == 1 && seed.is_conjugate_symmetric(1e-12), ErrorCode::Parameter,
            "initial guess must be conjugate-symmetric scalar phasors");
  } else if (h >= 1 && spec.v_ref != 0.0) {
    cplx s1 = W.at(1)[0] / spec.v_ref;
    seed.at(1)[0] = s1;
    seed.at(-1)[0] = std::conj(s1);
  }
  auto [lo0, hi0] = representative_range(seed, model.config().period);
  require(spec.bounds.contains(lo0) && spec.bounds.contains(hi0), ErrorCode::Parameter,
          "initial guess leaves the control bounds");

  Eigen::VectorXd p = prob.parameters_of(seed);
  ObjectiveEval ev = prob.evaluate(seed);
  double mu = 1e-3;
  int it = 0;
  bool converged = false;
  for (; it <= spec.max_iterations; ++it) {
    if (ev.gradient.norm() <= spec.gradient_tolerance * (1.0 + ev.J)) {
      converged = true;
      break;
    }
    if (it == spec.max_iterations) break;
    const Eigen::MatrixXd jtj = ev.jacobian.transpose() * ev.jacobian;
    const Eigen::VectorXd jtr = ev.jacobian.transpose() * ev.residuals;
    Eigen::VectorXd d = jtj.diagonal();
    const double dmax = std::max(d.maxCoeff(), 1e-300);
    d = d.cwiseMax(1e-12 * dmax);
    bool accepted = false;
    while (mu < 1e16) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal() += mu * d;
      Eigen::VectorXd step = -lhs.ldlt().solve(jtr);
      const double len = step.cwiseAbs().maxCoeff();
      if (len > spec.max_step) step *= spec.max_step / len;
      Eigen::VectorXd pn = p + step;
      try {
        ObjectiveEval en = prob.evaluate(prob.phasors_of(pn, seed));
        if (std::isfinite(en.J) && en.J < ev.J) {
          p = pn;
          ev = std::move(en);
          mu = std::max(mu / 3.0, 1e-12);
          accepted = true;
          break;
        }
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NearSingular) throw;
      }
      mu *= 4.0;
    }
    if (!accepted) break;  // no descent possible at working precision
  }

  EquilibriumResult res;
  res.s = prob.phasors_of(p, seed);
  res.S = control_operator(res.s, model.config().period);
  res.X = ev.X;
  res.J = ev.J;
  res.gradient_norm = ev.gradient.norm();
  res.iterations = it;
  res.converged = converged || res.gradient_norm <= spec.gradient_tolerance * (1.0 + res.J);
  res.residual = equilibrium_residual(model, res.X, res.S, W);
  auto [lo, hi] = representative_range(res.s, model.config().period);
  res.s_min = lo;
  res.s_max = hi;
  res.within_bounds = spec.bounds.interior(lo) && spec.bounds.interior(hi);
  return res;
}

}  // namespace phasorctl
