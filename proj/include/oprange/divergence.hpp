#pragma once

// Operators L2* L2 restricted to a subspace D, their Friedrichs and Kreĭn
// extensions as relations, sampled extensions in between, and the product
// restrictions of an invertible B along the form-domain split of B².

#include <cmath>
#include <cstdint>
#include <vector>

#include "oprange/psd.hpp"
#include "oprange/random.hpp"
#include "oprange/relations.hpp"
#include "oprange/subspace.hpp"

namespace oprange {

struct PartialOperator {
  Subspace domain;
  Matrix action;  // applied to vectors of the domain; values in the whole space
  double symmetry_defect = 0.0;  // ‖J* A J − (J* A J)*‖
  double min_form = 0.0;         // smallest eigenvalue of J* A J
  bool symmetric = false;
  bool nonnegative = false;

  Vector apply(const Vector& f) const {
    require(f.size() == domain.ambient_dim(), ErrorKind::DimensionMismatch, "vector length");
    require(contains_vector(domain, f), ErrorKind::InvalidArgument, "vector is outside the domain");
    return action * f;
  }
};

namespace detail {

inline void require_source(const Matrix& l2, const Subspace& d) {
  require(l2.cols() == d.ambient_dim(), ErrorKind::DimensionMismatch,
          "domain must live in the source space of L2");
}

}  // namespace detail

inline PartialOperator divergence_form(const Matrix& l2, const Subspace& d) {
  detail::require_source(l2, d);
  PartialOperator out;
  out.domain = d;
  out.action = l2.adjoint() * l2;
  const Matrix compressed = d.frame().adjoint() * out.action * d.frame();
  const double scale = std::max(1.0, compressed.norm());
  out.symmetry_defect = (compressed - compressed.adjoint()).norm();
  out.min_form = d.dim() ? min_eigenvalue(hermitian_part(compressed)) : 0.0;
  out.symmetric = out.symmetry_defect <= 1e-12 * scale;
  out.nonnegative = out.min_form >= -1e-12 * scale;
  return out;
}

// Form u -> ‖L2 u‖² on exactly D, multivalued on D⊥.
inline NonnegRelation friedrichs(const Matrix& l2, const Subspace& d, const ToleranceContext& ctx = {}) {
  detail::require_source(l2, d);
  return form_relation(d, l2.adjoint() * l2, ctx);
}

// L2* P L2 with P the projection onto L2 D.
inline NonnegRelation krein(const Matrix& l2, const Subspace& d, const ToleranceContext& ctx = {}) {
  detail::require_source(l2, d);
  const Matrix p = image(l2, d, ctx).projection();
  return from_operator(make_psd(l2.adjoint() * p * l2, ctx, (l2.adjoint() * l2).norm()));
}

// (T + aI)^{-1}, zero on the multivalued part.
inline Matrix shifted_resolvent(const NonnegRelation& rel, double a) {
  require(a > 0.0, ErrorKind::InvalidArgument, "shift must be positive");
  const RealVector& t = rel.operator_values();
  RealVector inv(t.size());
  for (Index k = 0; k < t.size(); ++k) inv(k) = 1.0 / (t(k) + a);
  return hermitian_part(rel.operator_frame() * inv.asDiagonal() * rel.operator_frame().adjoint());
}

// Whether the relation contains the pair (f, g).
inline bool relation_contains(const NonnegRelation& rel, const Vector& f, const Vector& g) {
  const Subspace dom = rel.dom_closure();
  if (!contains_vector(dom, f, rel.ctx())) return false;
  const Vector residual = dom.projection() * g - rel.form_matrix() * f;
  return residual.norm() <= rel.ctx().angle_tol() * std::max(1.0, g.norm() + rel.form_matrix().norm() * f.norm());
}

// Does the relation extend f -> action f on the given domain?
inline bool extends(const NonnegRelation& rel, const PartialOperator& a) {
  for (Index k = 0; k < a.domain.dim(); ++k) {
    const Vector f = a.domain.frame().col(k);
    if (!relation_contains(rel, f, a.action * f)) return false;
  }
  return true;
}

struct SandwichGaps {
  double left = 0.0;   // λ_min(R_C − R_F)
  double right = 0.0;  // λ_min(R_K − R_C)
};

inline SandwichGaps sandwich_gaps(const NonnegRelation& f, const NonnegRelation& c, const NonnegRelation& k,
                                  double a = 1.0) {
  const Matrix rf = shifted_resolvent(f, a);
  const Matrix rc = shifted_resolvent(c, a);
  const Matrix rk = shifted_resolvent(k, a);
  return {loewner_gap(rf, rc), loewner_gap(rc, rk)};
}

// An extension between the two extremes: the Kreĭn form plus
// (s / (1 − s)) (P_{D⊥} + G) for a random G ≥ 0 supported on D⊥, optionally
// with the form domain cut down to D ⊕ W for a random W ⊆ D⊥. s = 0 gives the
// Kreĭn extension and s → 1 the Friedrichs extension.
inline NonnegRelation sample_extension(const Matrix& l2, const Subspace& d, Rng& rng,
                                       const ToleranceContext& ctx = {}) {
  detail::require_source(l2, d);
  const Index n = d.ambient_dim();
  const Subspace perp = d.complement();
  const NonnegRelation k = krein(l2, d, ctx);
  const double s = rng.uniform(0.0, 0.999);
  Matrix bump = perp.projection();
  if (perp.dim()) {
    const Matrix g = random_psd(perp.dim(), rng.integer(0, perp.dim()), rng);
    bump += perp.frame() * g * perp.frame().adjoint();
  }
  const Matrix form = k.form_matrix() + (s / (1.0 - s)) * bump;
  Subspace domain = Subspace::full(n);
  if (perp.dim() && rng.uniform() < 0.3) {
    const Index keep = rng.integer(0, perp.dim() - 1);
    const Matrix rotate = random_unitary(perp.dim(), rng);
    const Subspace w = Subspace::from_orthonormal(perp.frame() * rotate.leftCols(keep));
    domain = subspace_sum(d, w, ctx);
  }
  return form_relation(domain, hermitian_part(form), ctx);
}

struct ExtensionReport {
  NonnegRelation friedrichs;
  NonnegRelation krein;
  int samples = 0;
  double worst_left_gap = 0.0;
  double worst_right_gap = 0.0;
  bool all_extend = false;           // every sample (and both extremes) extends the partial operator
  bool friedrichs_domain = false;    // form domain of the Friedrichs relation is D
  double friedrichs_form_residual = 0.0;  // |F[u,u] − ‖L2 u‖²| on probes of D
  bool krein_domain_full = false;
  bool friedrichs_below_krein = false;  // resolvent order
  bool pass = false;
};

inline ExtensionReport extension_sandwich_check(const Matrix& l2, const Subspace& d, int samples = 100,
                                                std::uint64_t seed = 1, double a = 1.0,
                                                const ToleranceContext& ctx = {}) {
  require(samples >= 1, ErrorKind::InvalidArgument, "need at least one sample");
  const PartialOperator op = divergence_form(l2, d);
  ExtensionReport out;
  out.friedrichs = friedrichs(l2, d, ctx);
  out.krein = krein(l2, d, ctx);
  out.samples = samples;
  out.friedrichs_domain = same_subspace(out.friedrichs.dom_closure(), d, ctx);
  out.krein_domain_full = out.krein.is_operator();
  Rng rng(seed);
  for (int p = 0; p < 20 && d.dim(); ++p) {
    const Vector u = detail::random_in(d, rng);
    const double expected = (l2 * u).squaredNorm();
    out.friedrichs_form_residual = std::max(out.friedrichs_form_residual,
                                            std::abs(form_value(out.friedrichs, u, u) - expected) / (1.0 + expected));
  }
  const SandwichGaps extremes = sandwich_gaps(out.friedrichs, out.friedrichs, out.krein, a);
  out.friedrichs_below_krein = extremes.right >= -1e-9;
  out.worst_left_gap = extremes.left;
  out.worst_right_gap = extremes.right;
  out.all_extend = extends(out.friedrichs, op) && extends(out.krein, op);
  for (int k = 0; k < samples; ++k) {
    const NonnegRelation c = sample_extension(l2, d, rng, ctx);
    const SandwichGaps gaps = sandwich_gaps(out.friedrichs, c, out.krein, a);
    out.worst_left_gap = std::min(out.worst_left_gap, gaps.left);
    out.worst_right_gap = std::min(out.worst_right_gap, gaps.right);
    out.all_extend = out.all_extend && extends(c, op);
  }
  out.pass = out.worst_left_gap >= -1e-8 && out.worst_right_gap >= -1e-8 && out.all_extend &&
             out.friedrichs_domain && out.krein_domain_full && out.friedrichs_form_residual <= 1e-8;
  return out;
}

// Restrictions of an invertible Hermitian B to the two form domains
// D1 = (I + B²)^{-1/2} M and D2 = (I + B²)^{-1/2} M⊥ of the split of B².
struct ProductPairReport {
  PairSplit split;
  Subspace d1;
  Subspace d2;
  bool direct = false;                  // D1 ∩ D2 = {0} and D1 + D2 = whole space
  bool friedrichs_below = false;        // friedrichs(B, B^{-1} D_k) resolvent <= resolvent of B²
  double friedrichs_form_residual = 0.0;  // its form against (B² u, u) on B^{-1} D_k
  double krein_residual = 0.0;          // krein(B, B^{-1} D_k) against B P_{D_k} B
  bool products_below = false;          // B P_{D_k} B <= B²
  double resolvent_sum_residual = 0.0;
  double graph_orthogonality = 0.0;     // (B f, B g) + (f, g) for f ∈ D1, g ∈ D2
  bool images_match = false;            // B D_k = sgn(B) (I − S)^{1/2} M_k
  bool image_spans[2] = {false, false};  // B D_k = whole space
  bool pass = false;
};

inline ProductPairReport product_pair(const Matrix& b, const Subspace& m, const ToleranceContext& ctx = {}) {
  require(b.rows() == b.cols(), ErrorKind::NotSquare, "B must be square");
  require(b.rows() == m.ambient_dim(), ErrorKind::DimensionMismatch, "B and M act on different spaces");
  require((b - b.adjoint()).norm() <= 1e-12 * std::max(1.0, b.norm()), ErrorKind::NotHermitian, "B must be Hermitian");
  const Index n = b.rows();
  const Eigensystem es = hermitian_eigensystem(hermitian_part(b));
  const double largest = n ? es.values.cwiseAbs().maxCoeff() : 0.0;
  require(n == 0 || es.values.cwiseAbs().minCoeff() > ctx.rank_rel_tol * largest, ErrorKind::NotInvertible,
          "B is singular");
  const Matrix b_inv = es.vectors * es.values.cwiseInverse().asDiagonal() * es.vectors.adjoint();
  const Matrix sign = es.vectors * es.values.cwiseSign().asDiagonal() * es.vectors.adjoint();
  const PsdOperator square = make_psd(b.adjoint() * b, ctx);

  ProductPairReport out;
  out.split = split_pair(square, m, 20);
  out.d1 = out.split.domain1;
  out.d2 = out.split.domain2;
  out.direct = out.split.domains_disjoint && out.split.domains_span;
  out.resolvent_sum_residual = out.split.resolvent_sum_residual;
  out.graph_orthogonality = out.split.graph_orthogonality;

  // (I - S)^{1/2} = sqrt(2) |B| (I + B²)^{-1/2}.
  const Matrix lift = std::sqrt(2.0) * sign * sqrt_psd(square).matrix() * sqrt_psd(out.split.t.resolvent()).matrix();
  const NonnegRelation whole = from_operator(square);
  const Matrix whole_resolvent = whole.resolvent().matrix();
  const double tol = ctx.cmp_tol * std::max(1.0, square.norm());
  out.friedrichs_below = out.products_below = out.images_match = true;
  const Subspace ms[2] = {m, m.complement()};
  const Subspace ds[2] = {out.d1, out.d2};
  Rng rng(7);
  for (int k = 0; k < 2; ++k) {
    const Subspace pulled = image(b_inv, ds[k], ctx);
    const NonnegRelation f = friedrichs(b, pulled, ctx);
    out.friedrichs_below =
        out.friedrichs_below && loewner_le(f.resolvent().matrix(), whole_resolvent, ctx.cmp_tol);
    for (int p = 0; p < 10 && pulled.dim(); ++p) {
      const Vector u = detail::random_in(pulled, rng);
      const double expected = std::real(u.dot(square.matrix() * u));
      out.friedrichs_form_residual = std::max(out.friedrichs_form_residual,
                                              std::abs(form_value(f, u, u) - expected) / (1.0 + expected));
    }
    const Matrix model = hermitian_part(b * ds[k].projection() * b);
    const NonnegRelation kr = krein(b, pulled, ctx);
    const NonnegRelation kr_model = from_operator(make_psd(model, ctx, square.norm()));
    out.krein_residual =
        std::max(out.krein_residual, (kr.resolvent().matrix() - kr_model.resolvent().matrix()).norm());
    out.products_below = out.products_below && loewner_le(model, square.matrix(), tol);
    const Subspace mapped = image(b, ds[k], ctx);
    out.images_match = out.images_match && same_subspace(mapped, image(lift, ms[k], ctx), ctx);
    out.image_spans[k] = mapped.is_full();
  }
  out.pass = out.direct && out.friedrichs_below && out.friedrichs_form_residual <= 1e-8 &&
             out.krein_residual <= 1e-8 && out.products_below && out.resolvent_sum_residual <= 1e-12 &&
             out.graph_orthogonality <= 1e-8 && out.images_match;
  return out;
}

// Polar decomposition ℬ = U |ℬ| of a full-column-rank ℬ, and the restrictions
// ℬ_k = U B_k built from the product pair of |ℬ|.
struct PolarReport {
  Matrix u;
  Matrix modulus;               // |ℬ| = (ℬ*ℬ)^{1/2}
  double polar_residual = 0.0;  // ‖ℬ − U|ℬ|‖_F
  double isometry_defect = 0.0; // ‖U*U − P_{ran |ℬ|}‖
  ProductPairReport pair;
  double product_residual = 0.0;  // ‖ℬ*ℬ_k − |ℬ| B_k‖ over k
  Subspace domain_meet;           // {h : ℬ*h ∈ D1} ∩ {h : ℬ*h ∈ D2}
  Subspace adjoint_kernel;        // ker ℬ*
  bool meet_is_kernel = false;
  bool pass = false;
};

inline PolarReport polar_restrictions(const Matrix& op, const Subspace& m, const ToleranceContext& ctx = {}) {
  require(op.cols() == m.ambient_dim(), ErrorKind::DimensionMismatch, "M must live in the source space");
  Eigen::JacobiSVD<Matrix> svd(op, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RealVector& sigma = svd.singularValues();
  const Index n = op.cols();
  require(op.rows() >= n && (n == 0 || sigma(n - 1) > ctx.rank_rel_tol * sigma(0)), ErrorKind::RankDeficientSource,
          "operator does not have full column rank");
  PolarReport out;
  out.u = svd.matrixU() * svd.matrixV().adjoint();
  out.modulus = hermitian_part(svd.matrixV() * sigma.asDiagonal() * svd.matrixV().adjoint());
  out.polar_residual = (op - out.u * out.modulus).norm();
  out.isometry_defect = (out.u.adjoint() * out.u - identity(n)).norm();
  out.pair = product_pair(out.modulus, m, ctx);
  const Subspace ds[2] = {out.pair.d1, out.pair.d2};
  Subspace meet = Subspace::full(op.rows());
  for (const Subspace& d : ds) {
    const Matrix restricted = out.modulus * d.frame();  // B_k in the frame of D_k
    const Matrix lifted = out.u * restricted;          // ℬ_k
    out.product_residual = std::max(out.product_residual, (op.adjoint() * lifted - out.modulus * restricted).norm());
    meet = intersection(meet, preimage(op.adjoint(), d, ctx), ctx);
  }
  out.domain_meet = meet;
  out.adjoint_kernel = null_space(op.adjoint(), ctx);
  out.meet_is_kernel = same_subspace(out.domain_meet, out.adjoint_kernel, ctx);
  out.pass = out.polar_residual <= 1e-10 * std::max(1.0, op.norm()) && out.isometry_defect <= 1e-10 &&
             out.product_residual <= 1e-10 * std::max(1.0, op.norm() * op.norm()) && out.meet_is_kernel &&
             out.pair.pass;
  return out;
}

}  // namespace oprange
