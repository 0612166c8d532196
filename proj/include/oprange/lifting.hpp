#pragma once

// Liftings A = T^{1/2} P_M T^{1/2}: the block range test, recovery of the
// factors of T^{1/2} from a given T, the range conditions on a pair (W, V)
// deciding which lifting forms a block operator admits, and a truncation
// experiment on graded diagonal models.

#include <cmath>
#include <limits>
#include <vector>

#include "oprange/fit.hpp"
#include "oprange/psd.hpp"
#include "oprange/range.hpp"
#include "oprange/subspace.hpp"

namespace oprange {

struct LiftingCriterion {
  bool included = false;     // ran A12 ⊆ ran A11^{3/4}
  double factor_norm = 0.0;  // ‖A11^{[-3/4]} A12‖
};

inline LiftingCriterion lifting_criterion(const Matrix& a11, const Matrix& a12, const ToleranceContext& ctx = {}) {
  require(a11.rows() == a11.cols() && a12.rows() == a11.rows(), ErrorKind::DimensionMismatch,
          "block shapes do not match");
  const PsdOperator block = make_psd(a11, ctx);
  const PsdOperator root34 = power_psd(block, 0.75);
  LiftingCriterion out;
  const double scale = std::max(root34.norm(), operator_norm(a12));
  out.included = is_contained(column_space(a12, ctx, scale), column_space(root34.matrix(), ctx, scale), ctx);
  out.factor_norm = operator_norm(partial_inverse_power(block, 0.75) * a12);
  return out;
}

inline LiftingCriterion lifting_criterion(const PsdOperator& a, const Subspace& m) {
  require(a.dim() == m.ambient_dim(), ErrorKind::DimensionMismatch, "operator and subspace dimensions differ");
  const BlockSplit blocks = split_blocks(a.matrix(), m);
  return lifting_criterion(blocks.b11, blocks.b12, a.ctx());
}

// Blocks of T^{1/2} in the (M, M⊥) frame, with A = T^{1/2} P_M T^{1/2} and
// U = W^{1/2} G X22^{1/2}.
struct LiftingFactors {
  Matrix a;    // ambient coordinates
  Matrix w;    // X11
  Matrix u;    // X12
  Matrix x22;
  Matrix g;
  double block_residual = 0.0;  // max(‖A11 − W²‖, ‖A12 − WU‖)
  double g_norm = 0.0;
  bool contraction = false;
};

inline LiftingFactors recover_factors(const PsdOperator& t, const Subspace& m) {
  require(t.dim() == m.ambient_dim(), ErrorKind::DimensionMismatch, "operator and subspace dimensions differ");
  const ToleranceContext& ctx = t.ctx();
  const Matrix root = sqrt_psd(t).matrix();
  LiftingFactors out;
  out.a = hermitian_part(root * m.projection() * root);
  const BlockSplit roots = split_blocks(root, m);
  const BlockSplit blocks = split_blocks(out.a, m);
  out.w = roots.b11;
  out.u = roots.b12;
  out.x22 = roots.b22;
  out.block_residual = std::max((blocks.b11 - out.w * out.w).norm(), (blocks.b12 - out.w * out.u).norm());
  const double scale = std::sqrt(t.norm());
  const PsdOperator w = make_psd(out.w, ctx, scale);
  const PsdOperator x22 = make_psd(out.x22, ctx, scale);
  const Matrix left = douglas_solve(out.u, sqrt_psd(w).matrix(), ctx).factor;
  out.g = douglas_solve(left.adjoint(), sqrt_psd(x22).matrix(), ctx).factor.adjoint();
  out.g_norm = operator_norm(out.g);
  out.contraction = out.g_norm <= 1.0 + ctx.cmp_tol;
  return out;
}

// Range conditions on a pair (W, V) of nonnegative operators on M. The block
// operator [[W², WVΦ], [Φ*VW, Φ*V²Φ]] admits a lifting T^{1/2} P_M T^{1/2}
// when the ranges of V and W meet trivially and ran V ⊆ ran W^{1/2}; a lifting
// through P_{M⊥} when they meet trivially and ran W ⊆ ran V^{1/2}.
struct LiftingConditions {
  bool ranges_disjoint = false;  // ran V ∩ ran W = {0}
  bool v_in_root_w = false;      // ran V ⊆ ran W^{1/2}
  bool w_in_root_v = false;      // ran W ⊆ ran V^{1/2}
  bool both_inclusions = false;
  bool admits_lifting = false;
  bool admits_complement_lifting = false;
  bool admits_both = false;
};

inline LiftingConditions classify_conditions(const PsdOperator& w, const PsdOperator& v) {
  require(w.dim() == v.dim(), ErrorKind::DimensionMismatch, "W and V must act on the same space");
  const ToleranceContext& ctx = w.ctx();
  const Subspace ran_w = range_basis(w);
  const Subspace ran_v = range_basis(v);
  LiftingConditions out;
  out.ranges_disjoint = intersect_trivially(ran_v, ran_w, ctx);
  out.v_in_root_w = is_contained(ran_v, range_basis(sqrt_psd(w)), ctx);
  out.w_in_root_v = is_contained(ran_w, range_basis(sqrt_psd(v)), ctx);
  out.both_inclusions = out.v_in_root_w && out.w_in_root_v;
  out.admits_lifting = out.ranges_disjoint && out.v_in_root_w;
  out.admits_complement_lifting = out.ranges_disjoint && out.w_in_root_v;
  out.admits_both = out.ranges_disjoint && out.both_inclusions;
  return out;
}

// In finite dimensions ran W^{1/2} = ran W, which erases the distinction the
// examples below are built to show; finite_collapse records that this happened.
struct ExampleOperator {
  PsdOperator v;
  bool v_in_root_w = false;      // ran V ⊆ ran W^{1/2}
  Index root_v_meets_w = 0;      // dim(ran V^{1/2} ∩ ran W)
  Index v_meets_w = 0;           // dim(ran V ∩ ran W)
  bool root_ranges_equal = false;  // ran V^{1/2} = ran W^{1/2}
  double root_angle = 0.0;
  bool finite_collapse = false;
};

namespace detail {

inline ExampleOperator describe_example(const PsdOperator& w, const Matrix& v_raw) {
  const ToleranceContext& ctx = w.ctx();
  ExampleOperator out;
  out.v = make_psd(v_raw, ctx, 2.0 * w.norm());
  const Subspace ran_w = range_basis(w);
  const Subspace root_w = range_basis(sqrt_psd(w));
  const Subspace ran_v = range_basis(out.v);
  const Subspace root_v = range_basis(sqrt_psd(out.v));
  out.v_in_root_w = is_contained(ran_v, root_w, ctx);
  out.root_v_meets_w = intersection_dim(root_v, ran_w, ctx);
  out.v_meets_w = intersection_dim(ran_v, ran_w, ctx);
  if (root_v.dim() == root_w.dim()) {
    const auto angles = principal_angles(root_v, root_w);
    out.root_angle = angles.empty() ? 0.0 : angles.front();
  } else {
    out.root_angle = M_PI / 2;
  }
  out.root_ranges_equal = out.root_angle < ctx.angle_tol();
  out.finite_collapse = same_subspace(ran_w, root_w, ctx);
  return out;
}

}  // namespace detail

// V1 = W^{1/2} P_L W^{1/2}.
inline ExampleOperator example_v1(const PsdOperator& w, const Subspace& l) {
  require(w.dim() == l.ambient_dim(), ErrorKind::DimensionMismatch, "subspace must lie in the space of W");
  const Matrix half = sqrt_psd(w).matrix();
  return detail::describe_example(w, hermitian_part(half * l.projection() * half));
}

// V2 = W^{1/2} (I + P_L) W^{1/2}.
inline ExampleOperator example_v2(const PsdOperator& w, const Subspace& l) {
  require(w.dim() == l.ambient_dim(), ErrorKind::DimensionMismatch, "subspace must lie in the space of W");
  const Matrix half = sqrt_psd(w).matrix();
  return detail::describe_example(w, hermitian_part(half * (identity(w.dim()) + l.projection()) * half));
}

// A11(n) = diag(i^{-a}) and A12(n) = (i^{-b}) for i = 1..n. A coupling
// exponent of +inf means zero coupling.
struct GradedModel {
  std::vector<Index> sizes;
  double a_exponent = 1.0;
  double b_exponent = 2.0;
};

inline std::vector<Index> default_truncation_sizes() {
  std::vector<Index> sizes;
  for (Index n = 8; n <= 1024; n *= 2) sizes.push_back(n);
  return sizes;
}

struct TruncationReport {
  std::vector<Index> sizes;
  std::vector<double> factor_norms;  // ‖A11(n)^{-3/4} A12(n)‖
  std::vector<double> increments;    // growth of the squared norm between sizes
  double slope = 0.0;                // log-log fit of the increments against n
  bool numeric_bounded = false;
  bool exponent_bounded = false;     // 2b − 3a/2 > 1
  bool agree = false;
};

// Bounded iff the fitted slope is below this.
inline constexpr double kBoundedSlope = -0.1;

inline TruncationReport truncation_diagnostic(const GradedModel& model) {
  require(model.a_exponent > 0.0 && model.b_exponent > 0.0, ErrorKind::InvalidArgument, "exponents must be positive");
  require(model.sizes.size() >= 3, ErrorKind::InvalidArgument, "need at least three truncation sizes");
  for (std::size_t k = 0; k < model.sizes.size(); ++k) {
    require(model.sizes[k] >= 1, ErrorKind::InvalidArgument, "sizes must be positive");
    if (k) require(model.sizes[k] > model.sizes[k - 1], ErrorKind::InvalidArgument, "sizes must increase");
  }
  TruncationReport out;
  out.sizes = model.sizes;
  const bool uncoupled = std::isinf(model.b_exponent);
  for (Index n : model.sizes) {
    // The model is diagonal, so the spectral 3/4 power acts entrywise.
    double squared = 0.0;
    for (Index i = 1; i <= n; ++i) {
      const double eigenvalue = std::pow(static_cast<double>(i), -model.a_exponent);
      const double coupling = uncoupled ? 0.0 : std::pow(static_cast<double>(i), -model.b_exponent);
      const double entry = coupling / std::pow(eigenvalue, 0.75);
      squared += entry * entry;
    }
    out.factor_norms.push_back(std::sqrt(squared));
  }
  std::vector<double> sizes;
  for (std::size_t k = 1; k < out.sizes.size(); ++k) {
    const double inc = out.factor_norms[k] * out.factor_norms[k] - out.factor_norms[k - 1] * out.factor_norms[k - 1];
    out.increments.push_back(inc);
    sizes.push_back(static_cast<double>(out.sizes[k]));
  }
  out.slope = loglog_slope(sizes, out.increments).value_or(-std::numeric_limits<double>::infinity());
  out.numeric_bounded = out.slope < kBoundedSlope;
  out.exponent_bounded = uncoupled || 2.0 * model.b_exponent - 1.5 * model.a_exponent > 1.0;
  out.agree = out.numeric_bounded == out.exponent_bounded;
  return out;
}

}  // namespace oprange
