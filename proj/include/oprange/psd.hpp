#pragma once

// Dense Hermitian positive-semidefinite matrices with a cached spectrum, and
// the spectral calculus (square roots, powers, partial inverses) built on it.
//
// Every spectral function acts on the numerical range only: an eigenvalue at or
// below the rank cutoff is treated as an exact zero, so f(0) = 0 functions
// never amplify roundoff that sits in the kernel.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "oprange/error.hpp"

namespace oprange {

using Scalar = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

struct ToleranceContext {
  // An eigenvalue counts as zero when lambda <= rank_rel_tol * lambda_max.
  double rank_rel_tol = 64.0 * std::numeric_limits<double>::epsilon();
  // Largest admissible negative eigenvalue, relative to the spectral radius.
  double psd_clamp_tol = 1e-9;
  // Relative Frobenius tolerance for matrix-equality assertions.
  double cmp_tol = 1e-9;

  // Principal angles below this count as an exact intersection. An angle theta
  // shows up as an eigenvalue of order sin^2(theta) in the blocks of a PSD
  // operator, so the angle cutoff is the square root of the eigenvalue cutoff.
  double angle_tol() const { return std::sqrt(rank_rel_tol); }

  void validate() const {
    auto ok = [](double t) { return t > 0.0 && t < 1.0; };
    require(ok(rank_rel_tol) && ok(psd_clamp_tol) && ok(cmp_tol), ErrorKind::InvalidTolerance,
            "tolerances must lie in (0, 1)");
  }
};

inline Matrix hermitian_part(const Matrix& m) { return (m + m.adjoint()) * 0.5; }

inline double operator_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

inline RealVector singular_values(const Matrix& m) {
  if (m.size() == 0) return RealVector(0);
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

inline Matrix identity(Index n) { return Matrix::Identity(n, n); }

// Sorted Hermitian eigendecomposition, eigenvalues nonincreasing.
struct Eigensystem {
  RealVector values;
  Matrix vectors;
};

inline Eigensystem hermitian_eigensystem(const Matrix& hermitian) {
  Eigensystem out;
  const Index n = hermitian.rows();
  if (n == 0) {
    out.values = RealVector(0);
    out.vectors = Matrix(0, 0);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian);
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

inline double min_eigenvalue(const Matrix& hermitian) {
  if (hermitian.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(hermitian), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

class PsdOperator {
 public:
  PsdOperator() = default;

  // Assemble from an eigensystem. Values may come in any order; tiny negatives
  // (within psd_clamp_tol of the spectral radius) are clamped to zero.
  static PsdOperator from_spectrum(const Matrix& vectors, const RealVector& values,
                                   const ToleranceContext& ctx, double scale_floor = 0.0) {
    ctx.validate();
    const Index n = vectors.rows();
    require(vectors.cols() == values.size() && vectors.cols() == n, ErrorKind::DimensionMismatch,
            "eigensystem shape");
    std::vector<Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return values(a) > values(b); });
    PsdOperator out;
    out.ctx_ = ctx;
    out.scale_floor_ = scale_floor;
    out.values_ = RealVector(n);
    out.vectors_ = Matrix(n, n);
    const double radius = std::max(n ? values.cwiseAbs().maxCoeff() : 0.0, scale_floor);
    for (Index k = 0; k < n; ++k) {
      double v = values(order[static_cast<std::size_t>(k)]);
      if (v < 0.0) {
        require(v >= -ctx.psd_clamp_tol * radius, ErrorKind::NotPsd,
                "eigenvalue " + std::to_string(v) + " below clamp");
        v = 0.0;
      }
      out.values_(k) = v;
      out.vectors_.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
    }
    out.matrix_ = hermitian_part(out.vectors_ * out.values_.asDiagonal() * out.vectors_.adjoint());
    return out;
  }

  Index dim() const { return matrix_.rows(); }
  const Matrix& matrix() const { return matrix_; }
  const RealVector& eigenvalues() const { return values_; }
  const Matrix& eigenvectors() const { return vectors_; }
  const ToleranceContext& ctx() const { return ctx_; }

  double max_eigenvalue() const { return dim() ? values_(0) : 0.0; }
  double norm() const { return max_eigenvalue(); }

  // Operators derived from others (blocks, sums, results that may vanish)
  // carry the size of their inputs as a floor for the rank cutoff.
  double scale_floor() const { return scale_floor_; }

  double cutoff(double reference_scale = 0.0) const {
    return ctx_.rank_rel_tol * std::max({max_eigenvalue(), reference_scale, scale_floor_});
  }

  Index rank(double reference_scale = 0.0) const {
    const double cut = cutoff(reference_scale);
    Index r = 0;
    for (Index k = 0; k < dim(); ++k)
      if (values_(k) > cut) ++r;
    return r;
  }

 private:
  friend PsdOperator make_psd(const Matrix& raw, const ToleranceContext& ctx, double scale_floor);

  Matrix matrix_;
  RealVector values_;
  Matrix vectors_;
  ToleranceContext ctx_;
  double scale_floor_ = 0.0;
};

inline PsdOperator make_psd(const Matrix& raw, const ToleranceContext& ctx = {}, double scale_floor = 0.0) {
  ctx.validate();
  require(raw.rows() == raw.cols(), ErrorKind::NotSquare,
          std::to_string(raw.rows()) + "x" + std::to_string(raw.cols()));
  const Matrix sym = hermitian_part(raw);
  Eigensystem es = hermitian_eigensystem(sym);
  const Index n = sym.rows();
  const double radius = std::max(n ? es.values.cwiseAbs().maxCoeff() : 0.0, scale_floor);
  if (n && es.values(n - 1) < -ctx.psd_clamp_tol * radius)
    fail(ErrorKind::NotPsd, "eigenvalue " + std::to_string(es.values(n - 1)));
  const double raw_scale = std::max(raw.norm(), scale_floor);
  if (raw_scale > 0.0 && (raw - sym).norm() > 1e-6 * raw_scale)
    fail(ErrorKind::NotHermitian, "asymmetry above 1e-6 relative");
  PsdOperator out;
  out.ctx_ = ctx;
  out.scale_floor_ = scale_floor;
  out.matrix_ = sym;
  out.values_ = es.values.cwiseMax(0.0);
  out.vectors_ = std::move(es.vectors);
  return out;
}

// V f(Lambda) V* where f is applied above the cutoff and `below` is used at or
// below it.
template <class F>
Matrix spectral_apply(const PsdOperator& a, F&& f, double below = 0.0, double reference_scale = 0.0) {
  const double cut = a.cutoff(reference_scale);
  RealVector mapped(a.dim());
  for (Index k = 0; k < a.dim(); ++k) {
    const double lambda = a.eigenvalues()(k);
    mapped(k) = lambda > cut ? f(lambda) : below;
  }
  return hermitian_part(a.eigenvectors() * mapped.asDiagonal() * a.eigenvectors().adjoint());
}

inline PsdOperator power_psd(const PsdOperator& a, double p) {
  const double cut = a.cutoff();
  RealVector mapped(a.dim());
  for (Index k = 0; k < a.dim(); ++k) {
    const double lambda = a.eigenvalues()(k);
    mapped(k) = lambda > cut ? std::pow(lambda, p) : 0.0;
  }
  return PsdOperator::from_spectrum(a.eigenvectors(), mapped, a.ctx(), std::pow(a.scale_floor(), p));
}

inline PsdOperator sqrt_psd(const PsdOperator& a) { return power_psd(a, 0.5); }

// Inverse of A^p restricted to the numerical range, zero on the kernel.
inline Matrix partial_inverse_power(const PsdOperator& a, double p, double reference_scale = 0.0) {
  return spectral_apply(a, [p](double lambda) { return std::pow(lambda, -p); }, 0.0, reference_scale);
}

inline Matrix partial_inverse_sqrt(const PsdOperator& a, double reference_scale = 0.0) {
  return partial_inverse_power(a, 0.5, reference_scale);
}

inline Matrix pseudo_inverse(const PsdOperator& a, double reference_scale = 0.0) {
  return partial_inverse_power(a, 1.0, reference_scale);
}

inline Matrix range_projection(const PsdOperator& a, double reference_scale = 0.0) {
  return spectral_apply(a, [](double) { return 1.0; }, 0.0, reference_scale);
}

// Smallest eigenvalue of (upper - lower); nonnegative iff lower <= upper.
inline double loewner_gap(const Matrix& lower, const Matrix& upper) {
  return min_eigenvalue(upper - lower);
}

inline bool loewner_le(const Matrix& lower, const Matrix& upper, double tol) {
  return loewner_gap(lower, upper) >= -tol;
}

inline double relative_distance(const Matrix& a, const Matrix& b) {
  const double scale = std::max({a.norm(), b.norm(), 1e-300});
  return (a - b).norm() / scale;
}

}  // namespace oprange
