#pragma once

// Douglas factorization A = BC and the finite-dimensional range identities
//   ran F1^{1/2} + ... + ran Fn^{1/2} = ran (F1 + ... + Fn)^{1/2}
//   ran (F^{1/2} M F^{1/2})^{1/2}   = F^{1/2} ran M^{1/2}.

#include <limits>
#include <vector>

#include "oprange/psd.hpp"
#include "oprange/subspace.hpp"

namespace oprange {

// Moore-Penrose inverse of a general matrix with the shared rank cutoff.
inline Matrix pinv(const Matrix& m, const ToleranceContext& ctx = {}, double reference_scale = 0.0) {
  if (m.size() == 0) return Matrix::Zero(m.cols(), m.rows());
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sigma = svd.singularValues();
  const double cut = ctx.rank_rel_tol * std::max(sigma(0), reference_scale);
  RealVector inv = RealVector::Zero(sigma.size());
  for (Index k = 0; k < sigma.size(); ++k)
    if (sigma(k) > cut) inv(k) = 1.0 / sigma(k);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

struct DouglasFactor {
  Matrix factor;            // C with A = B C, ran C ⊆ ran B*
  double residual = 0.0;    // ||A - B C||_F
  double lambda = 0.0;      // least lambda with A A* <= lambda B B*, equal to ||C||^2
  bool range_in_adjoint = false;  // ran C ⊆ ran B*
  bool kernels_match = false;     // ker C = ker A
};

inline double douglas_tolerance(const Matrix& a) { return 1e-8 * std::max(1.0, a.norm()); }

inline DouglasFactor douglas_solve(const Matrix& a, const Matrix& b, const ToleranceContext& ctx = {}) {
  require(a.rows() == b.rows(), ErrorKind::DimensionMismatch, "A and B need the same row dimension");
  DouglasFactor out;
  out.factor = pinv(b, ctx) * a;
  out.residual = (a - b * out.factor).norm();
  if (out.residual > douglas_tolerance(a))
    fail(ErrorKind::NoFactorization, "ran A is not contained in ran B (residual " + std::to_string(out.residual) + ")");
  const double c_norm = operator_norm(out.factor);
  out.lambda = c_norm * c_norm;
  out.range_in_adjoint = is_contained(column_space(out.factor, ctx), column_space(b.adjoint(), ctx), ctx);
  const double a_scale = operator_norm(a);
  const Subspace ker_a = null_space(a, ctx, a_scale);
  const Subspace ker_c = null_space(out.factor, ctx, c_norm);
  out.kernels_match = same_subspace(ker_a, ker_c, ctx);
  return out;
}

struct RangeInclusion {
  bool included = false;
  double lambda = std::numeric_limits<double>::infinity();
};

// ran A ⊆ ran B for general matrices with the same row dimension.
inline RangeInclusion range_inclusion(const Matrix& a, const Matrix& b, const ToleranceContext& ctx = {}) {
  require(a.rows() == b.rows(), ErrorKind::DimensionMismatch, "range_inclusion dimensions");
  RangeInclusion out;
  out.included = is_contained(column_space(a, ctx), column_space(b, ctx), ctx);
  if (out.included) {
    const double c_norm = operator_norm(pinv(b, ctx) * a);
    out.lambda = c_norm * c_norm;
  }
  return out;
}

inline RangeInclusion range_inclusion(const PsdOperator& a, const PsdOperator& b) {
  require(a.dim() == b.dim(), ErrorKind::DimensionMismatch, "range_inclusion dimensions");
  RangeInclusion out;
  out.included = is_contained(range_basis(a), range_basis(b), b.ctx());
  if (out.included) {
    const double c_norm = operator_norm(pseudo_inverse(b) * a.matrix());
    out.lambda = c_norm * c_norm;
  }
  return out;
}

// A A* <= lambda B B* up to a relative tolerance.
inline bool majorized(const Matrix& a, const Matrix& b, double lambda, double rel_tol = 1e-8) {
  if (!std::isfinite(lambda)) return false;
  const Matrix lower = a * a.adjoint();
  const Matrix upper = lambda * (b * b.adjoint());
  const double scale = std::max({operator_norm(lower), operator_norm(upper), 1.0});
  return loewner_le(lower, upper, rel_tol * scale);
}

struct RangeSumReport {
  Index rank_of_sum = 0;
  Index rank_of_span = 0;
  bool pass = false;
};

inline RangeSumReport range_sum_identity_check(const std::vector<PsdOperator>& list) {
  require(!list.empty(), ErrorKind::EmptyList, "range_sum_identity_check needs at least one operator");
  const Index n = list.front().dim();
  const ToleranceContext& ctx = list.front().ctx();
  Matrix total = Matrix::Zero(n, n);
  double scale = 0.0;
  Subspace span = Subspace::trivial(n);
  for (const auto& f : list) {
    require(f.dim() == n, ErrorKind::DimensionMismatch, "range_sum_identity_check dimensions");
    total += f.matrix();
    scale += f.norm();
    span = subspace_sum(span, range_basis(f), ctx);
  }
  RangeSumReport out;
  out.rank_of_sum = make_psd(total, ctx, scale).rank();
  out.rank_of_span = span.dim();
  out.pass = out.rank_of_sum == out.rank_of_span;
  return out;
}

struct SandwichReport {
  Subspace left;   // ran (F^{1/2} M F^{1/2})^{1/2}
  Subspace right;  // F^{1/2} ran M^{1/2}
  double max_angle = 0.0;
  bool pass = false;
};

inline SandwichReport sandwich_range_check(const PsdOperator& f, const PsdOperator& m) {
  require(f.dim() == m.dim(), ErrorKind::DimensionMismatch, "sandwich_range_check dimensions");
  const ToleranceContext& ctx = f.ctx();
  const PsdOperator f_half = sqrt_psd(f);
  const PsdOperator sandwich =
      make_psd(f_half.matrix() * m.matrix() * f_half.matrix(), ctx, f.norm() * m.norm());
  SandwichReport out;
  out.left = range_basis(sandwich);
  out.right = image(f_half.matrix(), range_basis(m), ctx);
  if (out.left.dim() == out.right.dim()) {
    const auto angles = principal_angles(out.left, out.right);
    out.max_angle = angles.empty() ? 0.0 : angles.front();
    out.pass = out.max_angle < ctx.angle_tol();
  } else {
    out.max_angle = M_PI / 2;
  }
  return out;
}

}  // namespace oprange
