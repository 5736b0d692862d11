#include "phasorctl/solvers.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "phasorctl/errors.hpp"

namespace phasorctl {

double hurwitz_margin(const Eigen::MatrixXcd& m) {
  require(m.rows() == m.cols(), ErrorCode::DimensionMismatch, "hurwitz margin needs a square matrix");
  if (m.size() == 0) return std::numeric_limits<double>::infinity();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, false);
  require(es.info() == Eigen::Success, ErrorCode::Numerical, "eigenvalue computation failed");
  return -es.eigenvalues().real().maxCoeff();
}

Eigen::MatrixXcd solve_sylvester_schur(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                       const Eigen::MatrixXcd& c, double gap_tol) {
  require(a.rows() == a.cols() && b.rows() == b.cols() && c.rows() == a.rows() &&
              c.cols() == b.rows(),
          ErrorCode::DimensionMismatch, "Sylvester operand shapes disagree");
  Eigen::ComplexSchur<Eigen::MatrixXcd> sa(a), sb(b);
  require(sa.info() == Eigen::Success && sb.info() == Eigen::Success, ErrorCode::Numerical,
          "Schur decomposition failed");
  const Eigen::MatrixXcd& ta = sa.matrixT();
  const Eigen::MatrixXcd& tb = sb.matrixT();
  const Eigen::MatrixXcd& ua = sa.matrixU();
  const Eigen::MatrixXcd& ub = sb.matrixU();

  double scale = 1.0;
  for (Eigen::Index i = 0; i < ta.rows(); ++i) scale = std::max(scale, std::abs(ta(i, i)));
  for (Eigen::Index j = 0; j < tb.rows(); ++j) scale = std::max(scale, std::abs(tb(j, j)));
  for (Eigen::Index i = 0; i < ta.rows(); ++i) {
    for (Eigen::Index j = 0; j < tb.rows(); ++j) {
      if (std::abs(ta(i, i) + tb(j, j)) < gap_tol * scale) {
        std::ostringstream os;
        os << "resonant Sylvester equation: eigenvalues " << ta(i, i) << " and " << -tb(j, j)
           << " coincide";
        fail(ErrorCode::ResonantSylvester, os.str());
      }
    }
  }

  Eigen::MatrixXcd f = ua.adjoint() * c * ub;
  Eigen::MatrixXcd y(f.rows(), f.cols());
  const auto n = ta.rows();
  for (Eigen::Index j = 0; j < tb.rows(); ++j) {
    Eigen::VectorXcd rhs = f.col(j);
    for (Eigen::Index i = 0; i < j; ++i) rhs -= tb(i, j) * y.col(i);
    Eigen::MatrixXcd sys = ta;
    sys.diagonal().array() += tb(j, j);
    y.col(j) = sys.topLeftCorner(n, n).triangularView<Eigen::Upper>().solve(rhs);
  }
  Eigen::MatrixXcd x = ua * y * ub.adjoint();
  require(x.allFinite(), ErrorCode::Numerical, "Sylvester solve produced non-finite values");
  return x;
}

LyapunovSolution solve_lyapunov(const Eigen::MatrixXcd& drift, const ToeplitzOperator& Q,
                                RetoeplitzMode mode) {
  require(drift.rows() == drift.cols(), ErrorCode::DimensionMismatch, "drift must be square");
  require(Q.rows() == Q.cols(), ErrorCode::DimensionMismatch, "Q must have square blocks");
  const Eigen::MatrixXcd q = Q.dense();
  require(q.rows() == drift.rows(), ErrorCode::DimensionMismatch, "Q and drift sizes differ");
  const auto st = check_structure(Q);
  require(st.hermitian && st.positive_definite, ErrorCode::Precondition,
          "Q must be hermitian positive definite");
  const double margin = hurwitz_margin(drift);
  if (margin <= 0.0) {
    std::ostringstream os;
    os << "drift is not Hurwitz (margin " << margin << ")";
    fail(ErrorCode::Unstable, os.str());
  }

  LyapunovSolution sol;
  sol.dense = solve_sylvester_schur(drift.adjoint(), drift, -q);
  sol.dense = 0.5 * (sol.dense + sol.dense.adjoint()).eval();
  Eigen::MatrixXcd res = sol.dense * drift + drift.adjoint() * sol.dense + q;
  sol.residual = res.norm() / (2.0 * drift.norm() * sol.dense.norm() + q.norm());
  auto rt = retoeplitz(sol.dense, Q.rows(), Q.cols(), Q.truncation(), Q.period(), mode);
  sol.P = std::move(rt.op);
  sol.defect = rt.defect;
  return sol;
}

SylvesterSolution solve_sylvester(const Eigen::MatrixXcd& o_minus_n,
                                  const Eigen::MatrixXcd& a_minus_n,
                                  const Eigen::MatrixXcd& lc) {
  require(lc.rows() == o_minus_n.rows() && lc.cols() == a_minus_n.rows(),
          ErrorCode::DimensionMismatch, "LC must be dim(O) x dim(A)");
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> eo(o_minus_n, false), ea(a_minus_n, false);
  SylvesterSolution sol;
  sol.min_gap = std::numeric_limits<double>::infinity();
  cplx lo, la;
  for (Eigen::Index i = 0; i < eo.eigenvalues().size(); ++i) {
    for (Eigen::Index j = 0; j < ea.eigenvalues().size(); ++j) {
      double g = std::abs(eo.eigenvalues()[i] - ea.eigenvalues()[j]);
      if (g < sol.min_gap) {
        sol.min_gap = g;
        lo = eo.eigenvalues()[i];
        la = ea.eigenvalues()[j];
      }
    }
  }
  const double scale = std::max({1.0, o_minus_n.cwiseAbs().maxCoeff(), a_minus_n.cwiseAbs().maxCoeff()});
  if (sol.min_gap < 1e-10 * scale) {
    std::ostringstream os;
    os << "resonant Sylvester equation: eig(O-N) " << lo << " and eig(A-N) " << la
       << " are " << sol.min_gap << " apart";
    fail(ErrorCode::ResonantSylvester, os.str());
  }
  sol.M = solve_sylvester_schur(o_minus_n, -a_minus_n, -lc, 0.0);
  Eigen::MatrixXcd res = o_minus_n * sol.M - sol.M * a_minus_n + lc;
  const double denom = (o_minus_n.norm() + a_minus_n.norm()) * sol.M.norm() + lc.norm();
  sol.residual = denom > 0.0 ? res.norm() / denom : 0.0;
  return sol;
}

RiccatiSolution solve_riccati(const Eigen::MatrixXcd& drift, const ToeplitzOperator& B,
                              const ToeplitzOperator& Q, const ToeplitzOperator& R,
                              const PhasorConfig& config, const RiccatiOptions& options) {
  const Eigen::MatrixXcd b = B.dense();
  const Eigen::MatrixXcd q = Q.dense();
  require(drift.rows() == drift.cols() && b.rows() == drift.rows() && q.rows() == drift.rows(),
          ErrorCode::DimensionMismatch, "Riccati operand shapes disagree");
  require(R.rows() == R.cols() && R.rows() == B.cols(), ErrorCode::DimensionMismatch,
          "R must be m x m");
  const auto sq = check_structure(Q);
  require(sq.hermitian && sq.positive_definite, ErrorCode::Precondition,
          "Q must be hermitian positive definite");
  const auto sr = check_structure(R);
  require(sr.hermitian && sr.positive_definite, ErrorCode::Precondition,
          "R must be hermitian positive definite");

  const Eigen::MatrixXcd rinv = toeplitz_inverse(R, options.eta, config).dense();
  const Eigen::MatrixXcd rcons = rinv.inverse();
  const Eigen::MatrixXcd s = b * rinv * b.adjoint();
  const auto dim = drift.rows();

  // initial stabilising gain
  Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(b.cols(), dim);
  if (hurwitz_margin(drift) <= 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (drift + drift.adjoint()),
                                                       Eigen::EigenvaluesOnly);
    const double beta = std::max(0.0, -es.eigenvalues().minCoeff()) + 1.0;
    Eigen::MatrixXcd fb = drift + beta * Eigen::MatrixXcd::Identity(dim, dim);
    Eigen::MatrixXcd z = solve_sylvester_schur(fb, fb.adjoint(), 2.0 * s);
    z = 0.5 * (z + z.adjoint()).eval();
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(z);
    if (!lu.isInvertible()) fail(ErrorCode::NotStabilizable, "not stabilizable at this truncation");
    k = rinv * b.adjoint() * lu.inverse();
  }

  auto riccati_residual = [&](const Eigen::MatrixXcd& p) {
    Eigen::MatrixXcd res = p * drift + drift.adjoint() * p - p * s * p + q;
    return res.norm() / (2.0 * drift.norm() * p.norm() + p.norm() * p.norm() * s.norm() + q.norm());
  };

  RiccatiSolution sol;
  Eigen::MatrixXcd p;
  double res = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::MatrixXcd fc = drift - b * k;
    if (hurwitz_margin(fc) <= 0.0) fail(ErrorCode::NotStabilizable, "not stabilizable at this truncation");
    Eigen::MatrixXcd qk = q + k.adjoint() * rcons * k;
    Eigen::MatrixXcd pn = solve_sylvester_schur(fc.adjoint(), fc, -qk);
    pn = 0.5 * (pn + pn.adjoint()).eval();
    double rn = riccati_residual(pn);
    sol.iterations = it;
    if (converged && rn >= res) break;  // polishing step did not help
    p = pn;
    res = rn;
    k = rinv * b.adjoint() * p;
    if (converged) break;
    if (res < options.tolerance) converged = true;
  }
  if (!converged) {
    std::ostringstream os;
    os << "not stabilizable at this truncation: Newton iteration stalled at residual " << res;
    fail(ErrorCode::NotStabilizable, os.str());
  }

  sol.residual = res;
  sol.P.dense = p;
  Eigen::MatrixXcd lres = p * (drift - s * p) + (drift - s * p).adjoint() * p + q + p * s * p;
  sol.P.residual = lres.norm() / (2.0 * drift.norm() * p.norm() + q.norm());
  auto rp = retoeplitz(p, Q.rows(), Q.cols(), Q.truncation(), Q.period(), options.mode);
  sol.P.P = std::move(rp.op);
  sol.P.defect = rp.defect;
  sol.K_dense = rinv * b.adjoint() * p;
  auto rk = retoeplitz(sol.K_dense, B.cols(), B.rows(), B.truncation(), B.period(), options.mode);
  sol.K = std::move(rk.op);
  sol.gain_defect = rk.defect;
  sol.margin = hurwitz_margin(drift - b * sol.K_dense);
  return sol;
}

namespace {

using Rhs = std::function<Eigen::MatrixXd(double, const Eigen::MatrixXd&)>;

// RK4 from t over `steps` steps of size h (negative for backward); optional
// recorder receives the state after each step.
Eigen::MatrixXd rk4(const Rhs& f, double t, Eigen::MatrixXd y, double h, int steps) {
  for (int i = 0; i < steps; ++i) {
    Eigen::MatrixXd k1 = f(t, y);
    Eigen::MatrixXd k2 = f(t + 0.5 * h, y + 0.5 * h * k1);
    Eigen::MatrixXd k3 = f(t + 0.5 * h, y + 0.5 * h * k2);
    Eigen::MatrixXd k4 = f(t + h, y + h * k3);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    t += h;
  }
  return y;
}

struct BackwardPass {
  std::vector<Eigen::MatrixXd> samples;  // index j holds P(t_j)
};

BackwardPass backward(const Rhs& f, const Eigen::MatrixXd& terminal, double period, int n,
                      int substeps) {
  BackwardPass out;
  out.samples.resize(n + 1);
  out.samples[n] = terminal;
  const double dt = period / n;
  const double h = -dt / substeps;
  Eigen::MatrixXd p = terminal;
  for (int j = n; j > 0; --j) {
    p = rk4(f, j * dt, p, h, substeps);
    out.samples[j - 1] = p;
  }
  return out;
}

}  // namespace

OracleResult periodic_lyapunov_oracle(const MatrixFn& A, const MatrixFn& Q, double period,
                                      const std::optional<RiccatiWeights>& riccati,
                                      const OracleOptions& options) {
  require(period > 0.0, ErrorCode::Parameter, "period must be positive");
  const int n = options.samples_per_period;
  require(n > 0 && options.substeps > 0, ErrorCode::Parameter, "invalid oracle grid");
  const Eigen::MatrixXd a0 = A(0.0);
  const auto dim = a0.rows();
  require(a0.cols() == dim && Q(0.0).rows() == dim, ErrorCode::DimensionMismatch,
          "A and Q must be n x n");

  OracleResult out;
  out.period = period;
  for (int j = 0; j <= n; ++j) out.times.push_back(period * j / n);
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(dim, dim);

  if (!riccati) {
    Rhs f = [&](double t, const Eigen::MatrixXd& p) -> Eigen::MatrixXd {
      Eigen::MatrixXd at = A(t);
      return -(at.transpose() * p + p * at + Q(t));
    };
    Rhs fx = [&](double t, const Eigen::MatrixXd& x) -> Eigen::MatrixXd { return A(t) * x; };
    Eigen::MatrixXd psi = rk4(fx, 0.0, Eigen::MatrixXd::Identity(dim, dim), period / (n * options.substeps),
                              n * options.substeps);
    out.monodromy_radius = psi.eigenvalues().cwiseAbs().maxCoeff();
    if (!(out.monodromy_radius < 1.0)) {
      std::ostringstream os;
      os << "unstable monodromy: spectral radius " << out.monodromy_radius;
      fail(ErrorCode::Unstable, os.str());
    }
    // the discrete period map P(T) -> P(0) is affine; solve its fixed point exactly
    auto map = [&](const Eigen::MatrixXd& pt) {
      return backward(f, pt, period, n, options.substeps).samples.front();
    };
    const Eigen::MatrixXd w = map(zero);
    const auto d2 = dim * dim;
    Eigen::MatrixXd lin(d2, d2);
    for (Eigen::Index c = 0; c < d2; ++c) {
      Eigen::MatrixXd e = zero;
      e(c % dim, c / dim) = 1.0;
      Eigen::MatrixXd img = map(e) - w;
      lin.col(c) = Eigen::Map<Eigen::VectorXd>(img.data(), d2);
    }
    Eigen::VectorXd vw = Eigen::Map<const Eigen::VectorXd>(w.data(), d2);
    Eigen::VectorXd vp = (Eigen::MatrixXd::Identity(d2, d2) - lin).fullPivLu().solve(vw);
    Eigen::MatrixXd pt = Eigen::Map<Eigen::MatrixXd>(vp.data(), dim, dim);
    pt = 0.5 * (pt + pt.transpose()).eval();
    out.P = backward(f, pt, period, n, options.substeps).samples;
    out.sweeps = 1;
  } else {
    Rhs f = [&](double t, const Eigen::MatrixXd& p) -> Eigen::MatrixXd {
      Eigen::MatrixXd at = A(t);
      Eigen::MatrixXd bt = riccati->B(t);
      Eigen::MatrixXd rt = riccati->R(t);
      return -(at.transpose() * p + p * at - p * bt * rt.ldlt().solve(bt.transpose()) * p + Q(t));
    };
    Eigen::MatrixXd pt = zero;
    bool converged = false;
    for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
      Eigen::MatrixXd p0 = backward(f, pt, period, n, options.substeps).samples.front();
      require(p0.allFinite(), ErrorCode::Divergence, "periodic Riccati oracle diverged");
      const double gap = (p0 - pt).cwiseAbs().maxCoeff();
      out.sweeps = sweep;
      pt = (1.0 - options.relaxation) * pt + options.relaxation * p0;
      if (gap <= options.tolerance * 1e-2 * (1.0 + pt.cwiseAbs().maxCoeff())) {
        converged = true;
        break;
      }
    }
    if (!converged) fail(ErrorCode::NonConvergence, "periodic oracle fixed point did not converge");
    out.P = backward(f, pt, period, n, options.substeps).samples;
  }
  out.periodicity_defect = (out.P.front() - out.P.back()).cwiseAbs().maxCoeff();
  if (out.periodicity_defect > options.tolerance * (1.0 + out.P.back().cwiseAbs().maxCoeff())) {
    std::ostringstream os;
    os << "periodic oracle defect " << out.periodicity_defect << " above tolerance";
    fail(ErrorCode::NonConvergence, os.str());
  }
  return out;
}

}  // namespace phasorctl
