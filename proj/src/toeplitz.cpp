#include "phasorctl/toeplitz.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fourier_tables.hpp"
#include "phasorctl/errors.hpp"

namespace phasorctl {

MatrixSamples MatrixSamples::sample(const std::function<Eigen::MatrixXcd(double)>& fn,
                                    const PhasorConfig& config, double t0) {
  MatrixSamples out;
  out.t0 = t0;
  out.dt = config.step();
  out.values.reserve(config.samples_per_period + 1);
  for (int j = 0; j <= config.samples_per_period; ++j) out.values.push_back(fn(t0 + j * out.dt));
  return out;
}

ToeplitzOperator::ToeplitzOperator(int rows, int cols, int truncation, double period)
    : rows_(rows), cols_(cols), truncation_(truncation), period_(period) {
  require(rows > 0 && cols > 0 && truncation >= 0, ErrorCode::DimensionMismatch,
          "invalid Toeplitz operator shape");
  blocks_.assign(4 * truncation + 1, Eigen::MatrixXcd::Zero(rows, cols));
}

ToeplitzOperator ToeplitzOperator::constant(const Eigen::MatrixXcd& a, int truncation,
                                            double period) {
  ToeplitzOperator out(static_cast<int>(a.rows()), static_cast<int>(a.cols()), truncation, period);
  out.block(0) = a;
  return out;
}

double ToeplitzOperator::omega() const { return 2.0 * std::numbers::pi / period_; }

const Eigen::MatrixXcd& ToeplitzOperator::block(int k) const {
  require(std::abs(k) <= band(), ErrorCode::Parameter, "block index outside the coefficient band");
  return blocks_[k + band()];
}

Eigen::MatrixXcd& ToeplitzOperator::block(int k) {
  require(std::abs(k) <= band(), ErrorCode::Parameter, "block index outside the coefficient band");
  return blocks_[k + band()];
}

Eigen::MatrixXcd ToeplitzOperator::dense() const {
  const int m = 2 * truncation_ + 1;
  Eigen::MatrixXcd out(rows_ * m, cols_ * m);
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) out.block(r * rows_, c * cols_, rows_, cols_) = block(r - c);
  }
  return out;
}

Eigen::MatrixXcd ToeplitzOperator::representative_at(double t) const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rows_, cols_);
  const double w = omega();
  for (int k = -band(); k <= band(); ++k) out += block(k) * std::polar(1.0, w * k * t);
  return out;
}

bool ToeplitzOperator::has_real_representative(double tol) const {
  const double scale = 1.0 + max_abs();
  for (int k = 0; k <= band(); ++k) {
    if ((block(-k) - block(k).conjugate()).cwiseAbs().maxCoeff() > tol * scale) return false;
  }
  return true;
}

ToeplitzOperator ToeplitzOperator::adjoint() const {
  ToeplitzOperator out(cols_, rows_, truncation_, period_);
  for (int k = -band(); k <= band(); ++k) out.block(k) = block(-k).adjoint();
  return out;
}

ToeplitzOperator ToeplitzOperator::operator+(const ToeplitzOperator& o) const {
  require(rows_ == o.rows_ && cols_ == o.cols_ && truncation_ == o.truncation_,
          ErrorCode::DimensionMismatch, "Toeplitz sum shape mismatch");
  ToeplitzOperator out = *this;
  for (std::size_t i = 0; i < blocks_.size(); ++i) out.blocks_[i] += o.blocks_[i];
  return out;
}

ToeplitzOperator ToeplitzOperator::operator-(const ToeplitzOperator& o) const {
  return *this + o * cplx(-1.0);
}

ToeplitzOperator ToeplitzOperator::operator*(cplx a) const {
  ToeplitzOperator out = *this;
  for (auto& b : out.blocks_) b *= a;
  return out;
}

double ToeplitzOperator::max_abs() const {
  double m = 0.0;
  for (const auto& b : blocks_) m = std::max(m, b.cwiseAbs().maxCoeff());
  return m;
}

ToeplitzOperator toeplitz_of(const MatrixSamples& samples, const PhasorConfig& config) {
  config.validate();
  const int n = config.samples_per_period;
  require(static_cast<int>(samples.values.size()) == n + 1, ErrorCode::Configuration,
          "matrix samples must cover one period with N+1 points");
  require(std::abs(samples.dt - config.step()) <= 1e-9 * config.step(), ErrorCode::Configuration,
          "matrix sample step does not match T/N");
  const auto& first = samples.values.front();
  const int rows = static_cast<int>(first.rows());
  const int cols = static_cast<int>(first.cols());
  double scale = 1.0;
  for (const auto& v : samples.values) {
    require(v.rows() == rows && v.cols() == cols, ErrorCode::DimensionMismatch,
            "matrix samples differ in shape");
    scale = std::max(scale, v.cwiseAbs().maxCoeff());
  }
  const double gap = (samples.values.back() - first).cwiseAbs().maxCoeff();
  if (gap > 1e-8 * scale) {
    std::ostringstream os;
    os << "samples are not T-periodic: endpoint mismatch " << gap;
    fail(ErrorCode::NotPeriodic, os.str());
  }

  const int h = config.truncation;
  const int kmax = 2 * h;
  detail::FourierTables tab(kmax, n);
  ToeplitzOperator out(rows, cols, h, config.period);
  const double w = config.omega();
  std::vector<double> xr(n + 1), xi(n + 1);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      bool real = true;
      for (int s = 0; s <= n; ++s) {
        xr[s] = samples.values[s](i, j).real();
        xi[s] = samples.values[s](i, j).imag();
        real = real && xi[s] == 0.0;
      }
      for (int k = 0; k <= kmax; ++k) {
        auto [plus, minus] = detail::project(tab, k, xr.data(), real ? nullptr : xi.data());
        out.block(k)(i, j) = plus * std::polar(1.0 / n, -w * k * samples.t0);
        if (k > 0) out.block(-k)(i, j) = minus * std::polar(1.0 / n, w * k * samples.t0);
      }
    }
  }
  return out;
}

ToeplitzOperator toeplitz_of(const std::function<Eigen::MatrixXcd(double)>& fn,
                             const PhasorConfig& config) {
  return toeplitz_of(MatrixSamples::sample(fn, config), config);
}

Eigen::MatrixXcd n_operator(const PhasorConfig& config, int dim) {
  const int h = config.truncation;
  const int m = 2 * h + 1;
  Eigen::VectorXcd diag(dim * m);
  const double w = config.omega();
  for (int k = -h; k <= h; ++k) diag.segment((k + h) * dim, dim).setConstant(cplx(0.0, w * k));
  return diag.asDiagonal();
}

namespace {

// Block row of the entry chosen to represent diagonal d = r - c (indices -h..h).
int central_row(int d) { return d >= 0 ? (d + 1) / 2 : -((-d) / 2); }

}  // namespace

double toeplitz_defect(const Eigen::MatrixXcd& dense, int rows, int cols) {
  const int m = static_cast<int>(dense.rows() / rows);
  require(dense.rows() == rows * m && dense.cols() == cols * m, ErrorCode::DimensionMismatch,
          "matrix is not a square grid of blocks");
  const int h = (m - 1) / 2;
  double defect = 0.0;
  for (int d = -2 * h; d <= 2 * h; ++d) {
    const int r0 = central_row(d);
    Eigen::MatrixXcd ref = dense.block((r0 + h) * rows, (r0 - d + h) * cols, rows, cols);
    for (int r = std::max(-h, d - h); r <= std::min(h, d + h); ++r) {
      const int c = r - d;
      defect = std::max(defect, (dense.block((r + h) * rows, (c + h) * cols, rows, cols) - ref)
                                    .cwiseAbs()
                                    .maxCoeff());
    }
  }
  return defect;
}

Retoeplitzed retoeplitz(const Eigen::MatrixXcd& dense, int rows, int cols, int truncation,
                        double period, RetoeplitzMode mode) {
  const int h = truncation;
  const int m = 2 * h + 1;
  require(dense.rows() == rows * m && dense.cols() == cols * m, ErrorCode::DimensionMismatch,
          "dense matrix does not match the truncation");
  Retoeplitzed out{ToeplitzOperator(rows, cols, h, period), 0.0};
  for (int d = -2 * h; d <= 2 * h; ++d) {
    const int rlo = std::max(-h, d - h);
    const int rhi = std::min(h, d + h);
    auto at = [&](int r) { return dense.block((r + h) * rows, (r - d + h) * cols, rows, cols); };
    Eigen::MatrixXcd& blk = out.op.block(d);
    if (mode == RetoeplitzMode::Central) {
      blk = at(central_row(d));
    } else {
      blk.setZero();
      for (int r = rlo; r <= rhi; ++r) blk += at(r);
      blk /= static_cast<double>(rhi - rlo + 1);
    }
    for (int r = rlo; r <= rhi; ++r) {
      out.defect = std::max(out.defect, (at(r) - blk).cwiseAbs().maxCoeff());
    }
  }
  return out;
}

Retoeplitzed toeplitz_mul(const ToeplitzOperator& a, const ToeplitzOperator& b,
                          RetoeplitzMode mode) {
  require(a.cols() == b.rows(), ErrorCode::DimensionMismatch, "inner block dimensions differ");
  require(a.truncation() == b.truncation() && std::abs(a.period() - b.period()) <= 1e-12 * a.period(),
          ErrorCode::DimensionMismatch, "operators use different configurations");
  Eigen::MatrixXcd prod = a.dense() * b.dense();
  return retoeplitz(prod, a.rows(), b.cols(), a.truncation(), a.period(), mode);
}

ToeplitzOperator toeplitz_inverse(const ToeplitzOperator& a, double eta,
                                  const PhasorConfig& config) {
  require(a.rows() == a.cols(), ErrorCode::DimensionMismatch, "inverse needs square blocks");
  require(eta > 0.0, ErrorCode::Parameter, "eta must be positive");
  PhasorConfig cfg = config;
  cfg.truncation = a.truncation();
  cfg.period = a.period();
  cfg.validate();
  MatrixSamples s;
  s.t0 = 0.0;
  s.dt = cfg.step();
  double worst = std::numeric_limits<double>::infinity();
  double worst_t = 0.0;
  for (int j = 0; j <= cfg.samples_per_period; ++j) {
    const double t = j * s.dt;
    Eigen::MatrixXcd rep = a.representative_at(t);
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(rep);
    const double det = std::abs(lu.determinant());
    if (det < worst) {
      worst = det;
      worst_t = t;
    }
    s.values.push_back(lu.inverse());
  }
  if (worst < eta) {
    std::ostringstream os;
    os << "near-singular representative: |det| = " << worst << " < " << eta << " at t = " << worst_t;
    fail(ErrorCode::NearSingular, os.str());
  }
  // the sampled endpoints coincide exactly for a resynthesised representative
  s.values.back() = s.values.front();
  return toeplitz_of(s, cfg);
}

StructureReport check_structure(const Eigen::MatrixXcd& dense, int block_dim) {
  require(dense.rows() == dense.cols(), ErrorCode::DimensionMismatch,
          "structure check needs a square matrix");
  StructureReport rep;
  const double scale = std::max(1.0, dense.cwiseAbs().maxCoeff());
  rep.hermitian = (dense - dense.adjoint()).cwiseAbs().maxCoeff() <= 1e-9 * scale;
  Eigen::MatrixXcd herm = 0.5 * (dense + dense.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  rep.min_eigenvalue = ev.minCoeff();
  const double top = ev.cwiseAbs().maxCoeff();
  rep.positive_definite = rep.min_eigenvalue > 1e-9 * top;
  rep.toeplitz_defect = toeplitz_defect(dense, block_dim, block_dim);
  return rep;
}

StructureReport check_structure(const ToeplitzOperator& a) {
  require(a.rows() == a.cols(), ErrorCode::DimensionMismatch,
          "structure check needs square blocks");
  return check_structure(a.dense(), a.rows());
}

}  // namespace phasorctl
