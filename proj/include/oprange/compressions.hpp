#pragma once

// The compression A ↦ A^{1/2} P_M A^{1/2} and what is built from it: ordered
// splittings, compositions, iterated chains, the family P(x) attached to a pair
// with trivially intersecting ranges, and its unitary-group variant.

#include <cmath>
#include <string>
#include <vector>

#include "oprange/psd.hpp"
#include "oprange/range.hpp"
#include "oprange/shorting.hpp"
#include "oprange/subspace.hpp"

namespace oprange {

namespace detail {

inline Matrix compress_matrix(const Matrix& half, const Subspace& m) {
  return hermitian_part(half * m.projection() * half);
}

inline double max_principal_angle(const Subspace& s1, const Subspace& s2) {
  if (s1.dim() != s2.dim()) return M_PI / 2;
  const auto angles = principal_angles(s1, s2);
  return angles.empty() ? 0.0 : angles.front();
}

}  // namespace detail

struct CompressionReport {
  PsdOperator a1;
  bool kernel_trivial = false;
  Index range_a_intersect = 0;  // dim(ran A1^{1/2} ∩ ran A)
  double frame_angle = 0.0;     // ran A1^{1/2} against A^{1/2} M
  bool frame_identity = false;
  double isometry_deviation = 0.0;  // max |‖A1^{[-1/2]}h‖ − ‖A^{[-1/2]}h‖| over a frame of ran A1^{1/2}
  double order_gap = 0.0;           // λ_min(A − A1)
};

inline CompressionReport compress(const PsdOperator& a, const Subspace& m) {
  require(a.dim() == m.ambient_dim(), ErrorKind::DimensionMismatch, "operator and subspace dimensions differ");
  const ToleranceContext& ctx = a.ctx();
  const Matrix half = sqrt_psd(a).matrix();
  CompressionReport out;
  out.a1 = make_psd(detail::compress_matrix(half, m), ctx, a.norm());
  out.kernel_trivial = out.a1.rank() == a.dim();
  const Subspace range_a1 = range_basis(out.a1);
  out.range_a_intersect = intersection_dim(range_a1, range_basis(a), ctx);
  out.frame_angle = detail::max_principal_angle(range_a1, image(half, m, ctx));
  out.frame_identity = out.frame_angle < ctx.angle_tol();
  const Matrix inv_a1 = partial_inverse_sqrt(out.a1);
  const Matrix inv_a = partial_inverse_sqrt(a);
  for (Index j = 0; j < range_a1.dim(); ++j) {
    const Vector h = range_a1.frame().col(j);
    out.isometry_deviation = std::max(out.isometry_deviation, std::abs((inv_a1 * h).norm() - (inv_a * h).norm()));
  }
  out.order_gap = loewner_gap(out.a1.matrix(), a.matrix());
  return out;
}

struct Composition {
  PsdOperator a1;
  PsdOperator a2;    // A1^{1/2} P2 A1^{1/2}
  Matrix factor;     // V with A^{1/2} V = A2^{1/2}
  Matrix gram;       // Q12 = V V*, A2 = A^{1/2} Q12 A^{1/2}
  Subspace p12;      // ran V
  double gram_residual = 0.0;        // ‖A2 − A^{1/2} Q12 A^{1/2}‖_F
  double projection_residual = 0.0;  // ‖A2 − A^{1/2} P12 A^{1/2}‖_F
  double projection_defect = 0.0;    // ‖Q12² − Q12‖_F
  bool exact_compression = false;    // projection_residual ≤ 1e-7 ‖A‖²
};

inline Composition compose_compressions(const PsdOperator& a, const Subspace& p1, const Subspace& p2) {
  require(a.dim() == p1.ambient_dim() && a.dim() == p2.ambient_dim(), ErrorKind::DimensionMismatch,
          "operator and subspace dimensions differ");
  const ToleranceContext& ctx = a.ctx();
  const PsdOperator a_half = sqrt_psd(a);
  Composition out;
  out.a1 = make_psd(detail::compress_matrix(a_half.matrix(), p1), ctx, a.norm());
  const PsdOperator a1_half = sqrt_psd(out.a1);
  out.a2 = make_psd(detail::compress_matrix(a1_half.matrix(), p2), ctx, a.norm());
  const Matrix first = partial_inverse_sqrt(a) * a1_half.matrix();
  const Matrix second = partial_inverse_sqrt(out.a1) * sqrt_psd(out.a2).matrix();
  out.factor = first * second;
  out.gram = hermitian_part(out.factor * out.factor.adjoint());
  out.p12 = column_space(out.factor, ctx, 1.0);
  const Matrix& h = a_half.matrix();
  out.gram_residual = (out.a2.matrix() - h * out.gram * h).norm();
  out.projection_residual = (out.a2.matrix() - detail::compress_matrix(h, out.p12)).norm();
  out.projection_defect = (out.gram * out.gram - out.gram).norm();
  out.exact_compression = out.projection_residual <= 1e-7 * a.norm() * a.norm();
  return out;
}

struct MonotoneFactor {
  PsdOperator a1;
  PsdOperator a2;
  Matrix gram;       // A2^{[-1/2]} A1 A2^{[-1/2]}
  Subspace factor;   // P = range of the Gram operator
  double residual = 0.0;             // ‖A1 − A2^{1/2} P A2^{1/2}‖_F
  double projection_defect = 0.0;    // ‖Q² − Q‖_F
  Index complement_intersection = 0; // dim(ran(I − P) ∩ ran A2^{1/2})
};

inline MonotoneFactor monotone_factor(const PsdOperator& a, const Subspace& p1, const Subspace& p2) {
  require(a.dim() == p1.ambient_dim() && a.dim() == p2.ambient_dim(), ErrorKind::DimensionMismatch,
          "operator and subspace dimensions differ");
  const ToleranceContext& ctx = a.ctx();
  require(is_contained(p1, p2, ctx), ErrorKind::NotNested, "first subspace is not contained in the second");
  const Matrix half = sqrt_psd(a).matrix();
  MonotoneFactor out;
  out.a1 = make_psd(detail::compress_matrix(half, p1), ctx, a.norm());
  out.a2 = make_psd(detail::compress_matrix(half, p2), ctx, a.norm());
  const Matrix inv_half = partial_inverse_sqrt(out.a2);
  const PsdOperator gram = make_psd(inv_half * out.a1.matrix() * inv_half, ctx, 1.0);
  out.gram = gram.matrix();
  out.factor = range_basis(gram);
  out.residual = (out.a1.matrix() - detail::compress_matrix(sqrt_psd(out.a2).matrix(), out.factor)).norm();
  out.projection_defect = (out.gram * out.gram - out.gram).norm();
  out.complement_intersection = intersection_dim(out.factor.complement(), range_basis(out.a2), ctx);
  return out;
}

// X = Y*Y with Y = [W U], in coordinates where M is spanned by the first
// dim(W) basis vectors: (Xf, f) = ‖W f1 + U f2‖².
struct PathologicalBlock {
  PsdOperator x;
  Subspace m;
  bool short_m_vanishes = false;
  bool short_perp_vanishes = false;
  bool w_in_u = false;  // ran W ⊆ ran U, equivalent to X_M = 0
  bool u_in_w = false;  // ran U ⊆ ran W, equivalent to X_{M⊥} = 0
  bool criteria_agree = false;
  Subspace kernel;
};

inline Matrix block_generator(const Matrix& w, const Matrix& u) {
  require(w.rows() == w.cols() && u.rows() == w.rows(), ErrorKind::DimensionMismatch,
          "W must be square and U must map into its space");
  Matrix y(w.rows(), w.cols() + u.cols());
  y << w, u;
  return y;
}

inline double block_form_value(const Matrix& w, const Matrix& u, const Vector& f) {
  require(f.size() == w.cols() + u.cols(), ErrorKind::DimensionMismatch, "probe length");
  return (w * f.head(w.cols()) + u * f.tail(u.cols())).squaredNorm();
}

inline PathologicalBlock pathological_block(const PsdOperator& w, const Matrix& u) {
  const ToleranceContext& ctx = w.ctx();
  const Matrix y = block_generator(w.matrix(), u);
  const Index k = w.dim();
  const Index n = k + u.cols();
  std::vector<Index> first(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) first[static_cast<std::size_t>(i)] = i;
  PathologicalBlock out;
  const double y_norm = operator_norm(y);
  out.x = make_psd(y.adjoint() * y, ctx, y_norm * y_norm);
  out.m = Subspace::coordinate(n, first);
  out.short_m_vanishes = shorted(out.x, out.m).vanishes;
  out.short_perp_vanishes = shorted(out.x, out.m.complement()).vanishes;
  const Subspace ran_w = column_space(w.matrix(), ctx, y_norm);
  const Subspace ran_u = column_space(u, ctx, y_norm);
  out.w_in_u = is_contained(ran_w, ran_u, ctx);
  out.u_in_w = is_contained(ran_u, ran_w, ctx);
  out.criteria_agree = out.w_in_u == out.short_m_vanishes && out.u_in_w == out.short_perp_vanishes;
  out.kernel = null_space(out.x.matrix(), ctx, out.x.norm());
  return out;
}

// Block conditions in the (M, M⊥) frame against the direct test of the
// pathology M ∩ ran X^{1/2} = M⊥ ∩ ran X^{1/2} = {0} with ker X = {0}.
struct CriterionReport {
  bool ker_x11_trivial = false;
  bool ker_x22_trivial = false;
  bool ranges_disjoint = false;  // ran X12 ∩ ran X11 = {0}
  bool x12_injective = false;
  bool x12_adjoint_injective = false;
  bool conjunction = false;
  bool short_m_vanishes = false;
  bool short_perp_vanishes = false;
  bool kernel_trivial = false;
  bool direct = false;
  bool agree = false;
};

inline CriterionReport general_criterion(const PsdOperator& x, const Subspace& m) {
  require(x.dim() == m.ambient_dim(), ErrorKind::DimensionMismatch, "operator and subspace dimensions differ");
  const ToleranceContext& ctx = x.ctx();
  const double scale = x.norm();
  const BlockSplit blocks = split_blocks(x.matrix(), m);
  CriterionReport out;
  const PsdOperator x11 = make_psd(blocks.b11, ctx, scale);
  const PsdOperator x22 = make_psd(blocks.b22, ctx, scale);
  out.ker_x11_trivial = x11.rank() == x11.dim();
  out.ker_x22_trivial = x22.rank() == x22.dim();
  out.ranges_disjoint = intersect_trivially(column_space(blocks.b12, ctx, scale), range_basis(x11), ctx);
  out.x12_injective = null_space(blocks.b12, ctx, scale).is_trivial();
  out.x12_adjoint_injective = null_space(blocks.b12.adjoint(), ctx, scale).is_trivial();
  out.conjunction = out.ker_x11_trivial && out.ker_x22_trivial && out.ranges_disjoint && out.x12_injective &&
                    out.x12_adjoint_injective;
  out.short_m_vanishes = shorted(x, m).vanishes;
  out.short_perp_vanishes = shorted(x, m.complement()).vanishes;
  out.kernel_trivial = x.rank() == x.dim();
  out.direct = out.short_m_vanishes && out.short_perp_vanishes && out.kernel_trivial;
  out.agree = out.conjunction == out.direct;
  return out;
}

struct ExtremeSplit {
  PsdOperator a1;  // A^{1/2} P_M A^{1/2}
  PsdOperator a2;  // A^{1/2} P_{M⊥} A^{1/2}
  double sum_residual = 0.0;  // ‖A1 + A2 − A‖_F
  bool rank_bound = false;    // rank A1 + rank A2 ≥ rank A
  bool spans_range = false;   // ran A1^{1/2} + ran A2^{1/2} = ran A^{1/2}
  bool direct = false;        // and the sum is direct
};

inline ExtremeSplit split_extreme(const PsdOperator& a, const Subspace& m) {
  require(a.dim() == m.ambient_dim(), ErrorKind::DimensionMismatch, "operator and subspace dimensions differ");
  const ToleranceContext& ctx = a.ctx();
  const Matrix half = sqrt_psd(a).matrix();
  ExtremeSplit out;
  out.a1 = make_psd(detail::compress_matrix(half, m), ctx, a.norm());
  out.a2 = make_psd(detail::compress_matrix(half, m.complement()), ctx, a.norm());
  out.sum_residual = (out.a1.matrix() + out.a2.matrix() - a.matrix()).norm();
  const Index r1 = out.a1.rank();
  const Index r2 = out.a2.rank();
  const Index r = a.rank();
  out.rank_bound = r1 + r2 >= r;
  const Subspace range1 = range_basis(out.a1);
  const Subspace range2 = range_basis(out.a2);
  out.spans_range = same_subspace(subspace_sum(range1, range2, ctx), range_basis(a), ctx);
  out.direct = out.spans_range && r1 + r2 == r;
  return out;
}

struct ChainStep {
  PsdOperator a_k;
  double norm = 0.0;
  Matrix gram;          // Q_k = A^{[-1/2]} A_k A^{[-1/2]}, A_k = A^{1/2} Q_k A^{1/2}
  Subspace projection;  // P_k = ran Q_k
  double gram_residual = 0.0;
  bool a_decreasing = false;    // A_k ≤ A_{k-1}
  bool gram_decreasing = false; // Q_k ≤ Q_{k-1}
  bool p_decreasing = false;    // P_k ⊆ P_{k-1}
};

struct ChainReport {
  std::vector<ChainStep> steps;
  double fixed_point_residual = 0.0;  // ‖A_K − A_K^{1/2} P_M A_K^{1/2}‖_F
  bool monotone = false;
};

inline ChainReport chain(const PsdOperator& a, const Subspace& m, int k_max) {
  require(k_max >= 1, ErrorKind::InvalidArgument, "chain length must be at least 1");
  require(a.dim() == m.ambient_dim(), ErrorKind::DimensionMismatch, "operator and subspace dimensions differ");
  const ToleranceContext& ctx = a.ctx();
  const double scale = a.norm();
  const double order_tol = ctx.cmp_tol * std::max(scale, 1e-300);
  const Matrix inv_half = partial_inverse_sqrt(a);
  const Matrix a_half = sqrt_psd(a).matrix();
  ChainReport out;
  PsdOperator previous = a;
  Matrix previous_gram = range_projection(a);
  Subspace previous_p = Subspace::full(a.dim());
  out.monotone = true;
  for (int k = 1; k <= k_max; ++k) {
    ChainStep step;
    step.a_k = make_psd(detail::compress_matrix(sqrt_psd(previous).matrix(), m), ctx, scale);
    step.norm = step.a_k.norm();
    const PsdOperator gram = make_psd(inv_half * step.a_k.matrix() * inv_half, ctx, 1.0);
    step.gram = gram.matrix();
    step.projection = range_basis(gram);
    step.gram_residual = (step.a_k.matrix() - a_half * step.gram * a_half).norm();
    step.a_decreasing = loewner_le(step.a_k.matrix(), previous.matrix(), order_tol);
    step.gram_decreasing = loewner_le(step.gram, previous_gram, ctx.cmp_tol);
    // ran Q_k ⊆ ran Q_{k-1}, weighted by Q_k^{1/2} so that directions carrying
    // roundoff-sized eigenvalues cannot fail the test on their own.
    const Matrix gram_half = sqrt_psd(gram).matrix();
    const Matrix outside = gram_half - previous_p.projection() * gram_half;
    step.p_decreasing = operator_norm(outside) <= ctx.angle_tol() * std::max(operator_norm(gram_half), 1e-300);
    out.monotone = out.monotone && step.a_decreasing && step.gram_decreasing && step.p_decreasing;
    previous = step.a_k;
    previous_gram = step.gram;
    previous_p = step.projection;
    out.steps.push_back(std::move(step));
  }
  const Matrix last = previous.matrix();
  out.fixed_point_residual = (last - detail::compress_matrix(sqrt_psd(previous).matrix(), m)).norm();
  return out;
}

namespace detail {

inline void require_trivial_ranges(const PsdOperator& a, const PsdOperator& b) {
  require(a.dim() == b.dim(), ErrorKind::DimensionMismatch, "pair dimensions differ");
  require(intersect_trivially(range_basis(a), range_basis(b), a.ctx()), ErrorKind::HypothesisViolated,
          "ran A^{1/2} and ran B^{1/2} intersect nontrivially");
}

}  // namespace detail

// One member of the family: C = A + xB, S_x = C^{[-1/2]} A^{1/2},
// P(x) = C^{[-1/2]} A C^{[-1/2]} so that A = C^{1/2} P(x) C^{1/2}.
struct FamilySample {
  double x = 0.0;
  Matrix projection;
  Matrix factor;                     // S_x
  double projection_defect = 0.0;    // ‖P² − P‖_F
  double hermitian_defect = 0.0;     // ‖P − P*‖_F
  double reconstruction = 0.0;       // ‖A − C^{1/2} P C^{1/2}‖_F
  double factor_defect = 0.0;        // ‖S S* − P‖_F
};

struct ProjectionFamily {
  PsdOperator a;
  PsdOperator b;
  std::vector<FamilySample> samples;
};

inline FamilySample family_member(const PsdOperator& a, const PsdOperator& b, double x) {
  require(x > 0.0, ErrorKind::InvalidArgument, "family parameter must be positive");
  const ToleranceContext& ctx = a.ctx();
  const double scale = a.norm() + x * b.norm();
  const PsdOperator c = make_psd(a.matrix() + x * b.matrix(), ctx, scale);
  const Matrix inv_half = partial_inverse_sqrt(c);
  const Matrix c_half = sqrt_psd(c).matrix();
  FamilySample out;
  out.x = x;
  out.projection = inv_half * a.matrix() * inv_half;
  out.factor = inv_half * sqrt_psd(a).matrix();
  out.hermitian_defect = (out.projection - out.projection.adjoint()).norm();
  out.projection = hermitian_part(out.projection);
  out.projection_defect = (out.projection * out.projection - out.projection).norm();
  out.reconstruction = (a.matrix() - c_half * out.projection * c_half).norm();
  out.factor_defect = (out.factor * out.factor.adjoint() - out.projection).norm();
  return out;
}

inline ProjectionFamily projection_family(const PsdOperator& a, const PsdOperator& b, const std::vector<double>& xs) {
  detail::require_trivial_ranges(a, b);
  ProjectionFamily out{a, b, {}};
  for (double x : xs) out.samples.push_back(family_member(a, b, x));
  return out;
}

struct ContinuityReport {
  double x0 = 0.0;
  std::vector<double> deltas;
  std::vector<double> distances;  // ‖P(x0 + δ) − P(x0)‖_F
  double modulus = 0.0;           // max distance / δ
  bool monotone = false;
};

inline std::vector<double> default_delta_schedule() {
  std::vector<double> out;
  for (int k = 1; k <= 6; ++k) out.push_back(std::pow(10.0, -k));
  return out;
}

inline ContinuityReport continuity_modulus(const PsdOperator& a, const PsdOperator& b, double x0,
                                           const std::vector<double>& deltas = default_delta_schedule()) {
  detail::require_trivial_ranges(a, b);
  const Matrix base = family_member(a, b, x0).projection;
  ContinuityReport out;
  out.x0 = x0;
  out.deltas = deltas;
  out.monotone = true;
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    const double d = (family_member(a, b, x0 + deltas[k]).projection - base).norm();
    out.distances.push_back(d);
    out.modulus = std::max(out.modulus, d / deltas[k]);
    if (k && d > out.distances[k - 1]) out.monotone = false;
  }
  return out;
}

// Z with (A + xB)^{1/2} = Z (A + yB)^{1/2}, and the law P(y) = Z* P(x) Z.
struct IntertwinerReport {
  Matrix z;
  double norm = 0.0;
  bool contraction = false;
  double law_residual = 0.0;
  RealVector restricted_singular_values;  // Z on ran(A + yB) ⊖ ran P(y)
  double scaling_deviation = 0.0;         // max |σ − √(x/y)|
};

inline IntertwinerReport intertwiner(const PsdOperator& a, const PsdOperator& b, double x, double y) {
  detail::require_trivial_ranges(a, b);
  require(x > 0.0 && x <= y, ErrorKind::InvalidArgument, "intertwiner needs 0 < x <= y");
  const ToleranceContext& ctx = a.ctx();
  const PsdOperator cx = make_psd(a.matrix() + x * b.matrix(), ctx, a.norm() + x * b.norm());
  const PsdOperator cy = make_psd(a.matrix() + y * b.matrix(), ctx, a.norm() + y * b.norm());
  const Matrix cx_half = sqrt_psd(cx).matrix();
  const Matrix cy_half = sqrt_psd(cy).matrix();
  IntertwinerReport out;
  out.z = douglas_solve(cx_half, cy_half, ctx).factor.adjoint();
  out.norm = operator_norm(out.z);
  out.contraction = out.norm <= 1.0 + ctx.cmp_tol;
  const FamilySample px = family_member(a, b, x);
  const FamilySample py = family_member(a, b, y);
  out.law_residual = (py.projection - out.z.adjoint() * px.projection * out.z).norm();
  const Subspace rest =
      orthogonal_difference(range_basis(cy), column_space(py.projection, ctx, 1.0), ctx);
  out.restricted_singular_values = singular_values(out.z * rest.frame());
  const double expected = std::sqrt(x / y);
  for (Index k = 0; k < out.restricted_singular_values.size(); ++k)
    out.scaling_deviation = std::max(out.scaling_deviation, std::abs(out.restricted_singular_values(k) - expected));
  return out;
}

// U_t = exp(itH) through the eigensystem of H.
inline Matrix unitary_group(const Matrix& generator, double t) {
  const Eigensystem es = hermitian_eigensystem(hermitian_part(generator));
  Vector phases(es.values.size());
  for (Index k = 0; k < phases.size(); ++k) phases(k) = std::polar(1.0, t * es.values(k));
  return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

struct GroupSample {
  double t = 0.0;
  bool skipped = false;
  std::string notice;
  Matrix p_t;
  Matrix p_minus_t;
  double residual = 0.0;  // ‖(R_{-t} − P_{-t}) − U_{-t} P_t U_t‖_F, R = range projection of A + B_{-t}
};

inline std::vector<GroupSample> group_family(const PsdOperator& a, const Matrix& generator,
                                             const std::vector<double>& ts) {
  require(generator.rows() == a.dim() && generator.cols() == a.dim(), ErrorKind::DimensionMismatch,
          "generator dimension");
  const double gen_norm = std::max(generator.norm(), 1e-300);
  require((generator - generator.adjoint()).norm() <= 1e-9 * gen_norm, ErrorKind::NotHermitian,
          "group generator must be Hermitian");
  const ToleranceContext& ctx = a.ctx();
  std::vector<GroupSample> out;
  for (double t : ts) {
    GroupSample sample;
    sample.t = t;
    if (t == 0.0) {
      sample.skipped = true;
      sample.notice = "t = 0 excluded";
      out.push_back(std::move(sample));
      continue;
    }
    const Matrix u_t = unitary_group(generator, t);
    const Matrix u_minus = u_t.adjoint();
    const PsdOperator b_t = make_psd(u_t * a.matrix() * u_minus, ctx, a.norm());
    const PsdOperator b_minus = make_psd(u_minus * a.matrix() * u_t, ctx, a.norm());
    if (!intersect_trivially(range_basis(a), range_basis(b_t), ctx)) {
      sample.skipped = true;
      sample.notice = "ran U_t A U_-t meets ran A";
      out.push_back(std::move(sample));
      continue;
    }
    sample.p_t = family_member(a, b_t, 1.0).projection;
    sample.p_minus_t = family_member(a, b_minus, 1.0).projection;
    const PsdOperator sum = make_psd(a.matrix() + b_minus.matrix(), ctx, 2.0 * a.norm());
    const Matrix complement = range_projection(sum) - sample.p_minus_t;
    sample.residual = (complement - u_minus * sample.p_t * u_t).norm();
    out.push_back(std::move(sample));
  }
  return out;
}

}  // namespace oprange
