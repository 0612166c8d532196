#pragma once

// Nonnegative self-adjoint relations stored through their resolvent
// R = (I + T)^{-1}. The kernel of R is the multivalued part; on ran R the
// relation acts as the operator with eigenvalues 1/mu - 1. Splittings of a
// relation along a subspace, completions, chains of splittings, semigroups,
// the Euler approximation and alternating semigroup products.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "oprange/fit.hpp"
#include "oprange/psd.hpp"
#include "oprange/random.hpp"
#include "oprange/subspace.hpp"

namespace oprange {

class NonnegRelation {
 public:
  NonnegRelation() = default;

  // The resolvent's rank cutoff is taken relative to 1, the norm of the
  // resolvent of the zero operator: a direction whose resolvent eigenvalue is
  // below rank_rel_tol belongs to the multivalued part.
  static NonnegRelation from_resolvent(const Matrix& resolvent, const ToleranceContext& ctx = {}) {
    return NonnegRelation(make_psd(resolvent, ctx, 1.0));
  }

  static NonnegRelation from_resolvent(const PsdOperator& resolvent) {
    return NonnegRelation(
        PsdOperator::from_spectrum(resolvent.eigenvectors(), resolvent.eigenvalues(), resolvent.ctx(), 1.0));
  }

  Index dim() const { return resolvent_.dim(); }
  const PsdOperator& resolvent() const { return resolvent_; }
  const ToleranceContext& ctx() const { return resolvent_.ctx(); }

  // Closure of the domain, which is also the form domain.
  Subspace dom_closure() const { return Subspace::from_orthonormal(frame_); }
  Subspace mul_part() const { return dom_closure().complement(); }
  bool is_operator() const { return frame_.cols() == dim(); }

  // Orthonormal eigenvectors of the operator part and its eigenvalues.
  const Matrix& operator_frame() const { return frame_; }
  const RealVector& operator_values() const { return values_; }

  // Matrix of the closed form on the domain closure, zero on the multivalued part.
  Matrix form_matrix() const {
    return hermitian_part(frame_ * values_.asDiagonal() * frame_.adjoint());
  }

  // Partial inverse of (2R)^{1/2}.
  const Matrix& inverse_root() const { return inverse_root_; }

 private:
  explicit NonnegRelation(PsdOperator resolvent) : resolvent_(std::move(resolvent)) {
    const ToleranceContext& c = resolvent_.ctx();
    require(resolvent_.norm() <= 1.0 + c.psd_clamp_tol, ErrorKind::NotContraction,
            "resolvent norm " + std::to_string(resolvent_.norm()) + " exceeds 1");
    const Index r = resolvent_.rank();
    frame_ = resolvent_.eigenvectors().leftCols(r);
    values_ = RealVector(r);
    RealVector inverse_roots(r);
    for (Index k = 0; k < r; ++k) {
      const double mu = resolvent_.eigenvalues()(k);
      values_(k) = std::max(0.0, 1.0 / mu - 1.0);
      inverse_roots(k) = 1.0 / std::sqrt(2.0 * mu);
    }
    inverse_root_ = hermitian_part(frame_ * inverse_roots.asDiagonal() * frame_.adjoint());
  }

  PsdOperator resolvent_;
  Matrix frame_;
  RealVector values_;
  Matrix inverse_root_;
};

inline NonnegRelation from_operator(const PsdOperator& t) {
  RealVector mu(t.dim());
  for (Index k = 0; k < t.dim(); ++k) mu(k) = 1.0 / (1.0 + t.eigenvalues()(k));
  return NonnegRelation::from_resolvent(PsdOperator::from_spectrum(t.eigenvectors(), mu, t.ctx(), 1.0));
}

inline PsdOperator to_operator(const NonnegRelation& rel) {
  require(rel.is_operator(), ErrorKind::NotOperator,
          "relation has a multivalued part of dimension " + std::to_string(rel.dim() - rel.operator_frame().cols()));
  return PsdOperator::from_spectrum(rel.operator_frame(), rel.operator_values(), rel.ctx());
}

// The relation whose form is u -> u* F u on `domain` and which is multivalued
// on the rest: R = J (J* F J + I)^{-1} J* for a frame J of the domain.
inline NonnegRelation form_relation(const Subspace& domain, const Matrix& form, const ToleranceContext& ctx = {}) {
  require(form.rows() == domain.ambient_dim() && form.cols() == domain.ambient_dim(), ErrorKind::DimensionMismatch,
          "form and domain dimensions differ");
  const Matrix& j = domain.frame();
  const Matrix inner = hermitian_part(j.adjoint() * form * j) + identity(domain.dim());
  const Matrix resolvent = j * inner.ldlt().solve(j.adjoint());
  return NonnegRelation::from_resolvent(hermitian_part(resolvent), ctx);
}

inline void require_in_form_domain(const NonnegRelation& rel, const Vector& u) {
  require(u.size() == rel.dim(), ErrorKind::DimensionMismatch, "vector length differs from the relation dimension");
  require(contains_vector(rel.dom_closure(), u, rel.ctx()), ErrorKind::OutOfFormDomain,
          "vector is not in the form domain");
}

// T[u, v] = -(u, v) + 2((2R)^{-1/2} u, (2R)^{-1/2} v).
inline Scalar form_value(const NonnegRelation& rel, const Vector& u, const Vector& v) {
  require_in_form_domain(rel, u);
  require_in_form_domain(rel, v);
  const Matrix& w = rel.inverse_root();
  return -u.dot(v) + 2.0 * (w * u).dot(w * v);
}

// T[u, v] + (u, v).
inline Scalar graph_inner(const NonnegRelation& rel, const Vector& u, const Vector& v) {
  require_in_form_domain(rel, u);
  require_in_form_domain(rel, v);
  const Matrix& w = rel.inverse_root();
  return 2.0 * (w * u).dot(w * v);
}

// Closed sum of the two forms on the intersection of the form domains.
inline NonnegRelation form_sum(const NonnegRelation& a, const NonnegRelation& b) {
  require(a.dim() == b.dim(), ErrorKind::DimensionMismatch, "relations act on different spaces");
  const Subspace common = intersection(a.dom_closure(), b.dom_closure(), a.ctx());
  return form_relation(common, a.form_matrix() + b.form_matrix(), a.ctx());
}

namespace detail {

inline NonnegRelation sandwich_relation(const Matrix& root, const Subspace& m, const ToleranceContext& ctx) {
  return NonnegRelation::from_resolvent(hermitian_part(root * m.projection() * root), ctx);
}

inline double graph_cross(const NonnegRelation& rel, const Subspace& d1, const Subspace& d2) {
  double worst = 0.0;
  for (Index i = 0; i < d1.dim(); ++i)
    for (Index j = 0; j < d2.dim(); ++j)
      worst = std::max(worst, std::abs(graph_inner(rel, d1.frame().col(i), d2.frame().col(j))));
  return worst;
}

inline Vector random_in(const Subspace& s, Rng& rng) {
  Vector coeffs(s.dim());
  for (Index k = 0; k < s.dim(); ++k) coeffs(k) = rng.complex_normal();
  Vector v = s.frame() * coeffs;
  const double len = v.norm();
  return len > 0.0 ? Vector(v / len) : v;
}

// Worst |T_k[g, g] - T[g, g]| / (1 + |T[g, g]|) over random g in D[T_k].
inline double form_defect(const NonnegRelation& t, const NonnegRelation& part, const Subspace& domain, int probes,
                          Rng& rng) {
  double worst = 0.0;
  if (domain.is_trivial()) return worst;
  for (int p = 0; p < probes; ++p) {
    const Vector g = random_in(domain, rng);
    const Scalar whole = form_value(t, g, g);
    worst = std::max(worst, std::abs(form_value(part, g, g) - whole) / (1.0 + std::abs(whole)));
  }
  return worst;
}

// Eigenvectors of the operator part of `part` with (numerically) zero
// eigenvalue must also be null vectors of the form of t.
inline bool kernel_in_form_kernel(const NonnegRelation& t, const NonnegRelation& part) {
  const double scale = 1.0 + (part.operator_values().size() ? part.operator_values().maxCoeff() : 0.0);
  for (Index k = 0; k < part.operator_values().size(); ++k) {
    if (part.operator_values()(k) > part.ctx().angle_tol() * scale) continue;
    const Vector g = part.operator_frame().col(k);
    if (std::abs(form_value(t, g, g)) > part.ctx().angle_tol() * scale) return false;
  }
  return true;
}

inline double resolvent_sum_residual(const NonnegRelation& t, const std::vector<NonnegRelation>& parts) {
  Matrix sum = Matrix::Zero(t.dim(), t.dim());
  for (const NonnegRelation& p : parts) sum += p.resolvent().matrix();
  const double scale = t.resolvent().matrix().norm();
  return (sum - t.resolvent().matrix()).norm() / std::max(scale, std::numeric_limits<double>::min());
}

}  // namespace detail

struct PairSplit {
  NonnegRelation t;
  NonnegRelation rel1;  // resolvent R^{1/2} P_M R^{1/2}
  NonnegRelation rel2;  // resolvent R^{1/2} P_{M⊥} R^{1/2}
  Subspace domain1;     // R^{1/2} M
  Subspace domain2;     // R^{1/2} M⊥
  double resolvent_sum_residual = 0.0;  // ‖R1 + R2 − R‖_F / ‖R‖_F
  bool domains_match = false;           // D[T_k] = R^{1/2} M_k
  bool domains_disjoint = false;
  bool domains_span = false;            // D[T1] + D[T2] = D[T]
  double form_defect = 0.0;             // worst relative |T_k[g,g] − T[g,g]| on probes
  double graph_orthogonality = 0.0;     // worst |T[u,v] + (u,v)| across the two domain frames
  double decomposition_residual = 0.0;  // f = R1(I+T)f + R2(I+T)f on probes of dom T
  bool pieces_in_domains = false;
  bool kernel_claim = false;
};

inline PairSplit split_pair(const NonnegRelation& t, const Subspace& m, int probes = 20, std::uint64_t seed = 1) {
  require(t.dim() == m.ambient_dim(), ErrorKind::DimensionMismatch, "relation and subspace dimensions differ");
  const ToleranceContext& ctx = t.ctx();
  const Matrix root = sqrt_psd(t.resolvent()).matrix();
  const Subspace perp = m.complement();
  PairSplit out;
  out.t = t;
  out.rel1 = detail::sandwich_relation(root, m, ctx);
  out.rel2 = detail::sandwich_relation(root, perp, ctx);
  out.domain1 = image(root, m, ctx);
  out.domain2 = image(root, perp, ctx);
  out.resolvent_sum_residual = detail::resolvent_sum_residual(t, {out.rel1, out.rel2});
  out.domains_match = same_subspace(out.domain1, out.rel1.dom_closure(), ctx) &&
                      same_subspace(out.domain2, out.rel2.dom_closure(), ctx);
  out.domains_disjoint = intersect_trivially(out.domain1, out.domain2, ctx);
  out.domains_span = same_subspace(subspace_sum(out.domain1, out.domain2, ctx), t.dom_closure(), ctx);

  Rng rng(seed);
  out.form_defect = std::max(detail::form_defect(t, out.rel1, out.domain1, probes, rng),
                             detail::form_defect(t, out.rel2, out.domain2, probes, rng));
  out.graph_orthogonality = detail::graph_cross(t, out.domain1, out.domain2);

  const Subspace dom = t.dom_closure();
  const Matrix shift = pseudo_inverse(t.resolvent());  // (I + T) on the operator part
  out.pieces_in_domains = true;
  for (int p = 0; p < probes && !dom.is_trivial(); ++p) {
    const Vector f = detail::random_in(dom, rng);
    const Vector h = shift * f;
    const Vector f1 = out.rel1.resolvent().matrix() * h;
    const Vector f2 = out.rel2.resolvent().matrix() * h;
    out.decomposition_residual = std::max(out.decomposition_residual, (f1 + f2 - f).norm());
    out.pieces_in_domains = out.pieces_in_domains && contains_vector(out.rel1.dom_closure(), f1, ctx) &&
                            contains_vector(out.rel2.dom_closure(), f2, ctx);
  }
  out.kernel_claim = detail::kernel_in_form_kernel(t, out.rel1) && detail::kernel_in_form_kernel(t, out.rel2);
  return out;
}

inline PairSplit split_pair(const PsdOperator& t, const Subspace& m, int probes = 20, std::uint64_t seed = 1) {
  return split_pair(from_operator(t), m, probes, seed);
}

struct SplitFamily {
  std::vector<NonnegRelation> relations;
  std::vector<Subspace> domains;
  double resolvent_sum_residual = 0.0;
  bool domains_disjoint = false;  // pairwise
  bool domains_span = false;
  double graph_orthogonality = 0.0;
};

inline SplitFamily split_n(const PsdOperator& t, const std::vector<Subspace>& parts) {
  require(!parts.empty(), ErrorKind::EmptyList, "no parts given");
  const ToleranceContext& ctx = t.ctx();
  Index total = 0;
  Matrix projections = Matrix::Zero(t.dim(), t.dim());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    require(parts[i].ambient_dim() == t.dim(), ErrorKind::DimensionMismatch, "part lives in a different space");
    for (std::size_t j = 0; j < i; ++j) {
      const double overlap = operator_norm(parts[j].frame().adjoint() * parts[i].frame());
      require(overlap <= ctx.angle_tol(), ErrorKind::NotOrthogonal,
              "parts " + std::to_string(j) + " and " + std::to_string(i) + " are not orthogonal");
    }
    total += parts[i].dim();
    projections += parts[i].projection();
  }
  require(total == t.dim() && (projections - identity(t.dim())).norm() <= ctx.angle_tol(), ErrorKind::NotSpanning,
          "parts do not span the space");

  const NonnegRelation whole = from_operator(t);
  const Matrix root = sqrt_psd(whole.resolvent()).matrix();
  SplitFamily out;
  for (const Subspace& part : parts) {
    out.relations.push_back(detail::sandwich_relation(root, part, ctx));
    out.domains.push_back(image(root, part, ctx));
  }
  out.resolvent_sum_residual = detail::resolvent_sum_residual(whole, out.relations);
  out.domains_disjoint = true;
  Subspace spanned = Subspace::trivial(t.dim());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    spanned = subspace_sum(spanned, out.domains[i], ctx);
    for (std::size_t j = 0; j < i; ++j) {
      out.domains_disjoint = out.domains_disjoint && intersect_trivially(out.domains[i], out.domains[j], ctx);
      out.graph_orthogonality =
          std::max(out.graph_orthogonality, detail::graph_cross(whole, out.domains[j], out.domains[i]));
    }
  }
  out.domains_span = same_subspace(spanned, whole.dom_closure(), ctx);
  return out;
}

// Recover a partner T2 and a whole T from T1 and X with 0 <= X <= I and
// ran X ∩ ran A1 = {0}, where A1 is the resolvent of T1:
// B = (I - A1)^{1/2} X (I - A1)^{1/2}, resolvent of T = A1 + B, resolvent of T2 = B.
struct Completion {
  NonnegRelation t;
  NonnegRelation t2;
  Matrix a1;
  Matrix b;
  Matrix projection;  // A1 = (A1 + B)^{1/2} P (A1 + B)^{1/2}
  double projection_defect = 0.0;
  double reconstruction_residual = 0.0;
  double split_residual = 0.0;  // split of T along ran P against (T1, T2)
  bool pass = false;
};

inline Completion complete_pair(const NonnegRelation& t1, const PsdOperator& x) {
  require(t1.dim() == x.dim(), ErrorKind::DimensionMismatch, "T1 and X act on different spaces");
  const ToleranceContext& ctx = t1.ctx();
  require(x.norm() <= 1.0 + ctx.psd_clamp_tol, ErrorKind::NotContraction, "X must satisfy X <= I");
  const PsdOperator& a1 = t1.resolvent();
  const Subspace ran_a1 = range_basis(a1);
  require(intersect_trivially(range_basis(x), ran_a1, ctx), ErrorKind::HypothesisViolated,
          "ran X meets ran A1");
  const Index n = a1.dim();
  const PsdOperator rest = make_psd(identity(n) - a1.matrix(), ctx, 1.0);
  const Matrix rest_root = sqrt_psd(rest).matrix();

  Completion out;
  out.a1 = a1.matrix();
  out.b = hermitian_part(rest_root * x.matrix() * rest_root);
  const PsdOperator b = make_psd(out.b, ctx, 1.0);
  require(intersect_trivially(range_basis(b), ran_a1, ctx), ErrorKind::HypothesisViolated, "ran B meets ran A1");

  out.t = NonnegRelation::from_resolvent(out.a1 + out.b, ctx);
  out.t2 = NonnegRelation::from_resolvent(b);
  const Matrix inv_root = partial_inverse_sqrt(out.t.resolvent());
  out.projection = hermitian_part(inv_root * out.a1 * inv_root);
  out.projection_defect = (out.projection * out.projection - out.projection).norm();
  const Matrix root = sqrt_psd(out.t.resolvent()).matrix();
  out.reconstruction_residual = std::max((root * out.projection * root - out.a1).norm(),
                                         (root * (identity(n) - out.projection) * root - out.b).norm());
  const PairSplit again = split_pair(out.t, column_space(out.projection, ctx, 1.0), 0);
  out.split_residual = std::max((again.rel1.resolvent().matrix() - out.a1).norm(),
                                (again.rel2.resolvent().matrix() - out.b).norm());
  out.pass = out.projection_defect <= 1e-8 && out.reconstruction_residual <= 1e-8 && out.split_residual <= 1e-7;
  return out;
}

inline Matrix semigroup(const NonnegRelation& rel, Scalar z) {
  require(z.real() >= 0.0, ErrorKind::InvalidZ, "semigroup needs Re z >= 0");
  const RealVector& t = rel.operator_values();
  Vector factors(t.size());
  for (Index k = 0; k < t.size(); ++k) factors(k) = std::exp(-z * t(k));
  return rel.operator_frame() * factors.asDiagonal() * rel.operator_frame().adjoint();
}

struct ChainLevel {
  NonnegRelation rel1;  // resolvent R^{1/2} P_{N_j⊥} R^{1/2}
  NonnegRelation rel2;  // resolvent R^{1/2} P_{N_j} R^{1/2}
  Subspace domain1;
  Subspace domain2;
  double r1_norm = 0.0;
  double r2_gap = 0.0;           // ‖R_{2,j} − R‖
  double sum_residual = 0.0;
  double graph_orthogonality = 0.0;
  bool domains_span = false;
};

struct ChainFamilies {
  std::vector<ChainLevel> levels;
  bool r1_decreasing = false;  // R_{1,j} >= R_{1,j+1}
  bool r2_increasing = false;  // R_{2,j} <= R_{2,j+1} <= R
  bool domains1_nested = false;
  bool domains2_nested = false;
  bool exhausts = false;             // the last subspace is the whole space
  double endpoint_residual = 0.0;    // max(‖R_{1,last}‖, ‖R_{2,last} − R‖)
  double semigroup_residual = 0.0;   // same at the semigroup level, z = 1
};

inline ChainFamilies chain_families(const PsdOperator& t, const std::vector<Subspace>& ns) {
  require(!ns.empty(), ErrorKind::EmptyList, "no subspaces given");
  const ToleranceContext& ctx = t.ctx();
  for (std::size_t j = 0; j < ns.size(); ++j) {
    require(ns[j].ambient_dim() == t.dim(), ErrorKind::DimensionMismatch, "subspace lives in a different space");
    if (j)
      require(ns[j].dim() > ns[j - 1].dim() && is_contained(ns[j - 1], ns[j], ctx), ErrorKind::NotNested,
              "subspace " + std::to_string(j) + " does not strictly contain its predecessor");
  }
  const NonnegRelation whole = from_operator(t);
  const Matrix& r = whole.resolvent().matrix();
  const Matrix root = sqrt_psd(whole.resolvent()).matrix();
  const double tol = ctx.cmp_tol * std::max(1.0, whole.resolvent().norm());

  ChainFamilies out;
  for (const Subspace& nj : ns) {
    ChainLevel level;
    const Subspace perp = nj.complement();
    level.rel1 = detail::sandwich_relation(root, perp, ctx);
    level.rel2 = detail::sandwich_relation(root, nj, ctx);
    level.domain1 = image(root, perp, ctx);
    level.domain2 = image(root, nj, ctx);
    level.r1_norm = level.rel1.resolvent().norm();
    level.r2_gap = operator_norm(level.rel2.resolvent().matrix() - r);
    level.sum_residual = detail::resolvent_sum_residual(whole, {level.rel1, level.rel2});
    level.graph_orthogonality = detail::graph_cross(whole, level.domain1, level.domain2);
    level.domains_span =
        same_subspace(subspace_sum(level.domain1, level.domain2, ctx), whole.dom_closure(), ctx);
    out.levels.push_back(std::move(level));
  }
  out.r1_decreasing = out.r2_increasing = out.domains1_nested = out.domains2_nested = true;
  for (std::size_t j = 0; j < out.levels.size(); ++j) {
    const ChainLevel& cur = out.levels[j];
    out.r2_increasing = out.r2_increasing && loewner_le(cur.rel2.resolvent().matrix(), r, tol);
    if (j == 0) continue;
    const ChainLevel& prev = out.levels[j - 1];
    out.r1_decreasing =
        out.r1_decreasing && loewner_le(cur.rel1.resolvent().matrix(), prev.rel1.resolvent().matrix(), tol);
    out.r2_increasing =
        out.r2_increasing && loewner_le(prev.rel2.resolvent().matrix(), cur.rel2.resolvent().matrix(), tol);
    out.domains1_nested = out.domains1_nested && is_contained(cur.domain1, prev.domain1, ctx);
    out.domains2_nested = out.domains2_nested && is_contained(prev.domain2, cur.domain2, ctx);
  }
  const ChainLevel& last = out.levels.back();
  out.exhausts = ns.back().is_full();
  out.endpoint_residual = std::max(last.r1_norm, last.r2_gap);
  out.semigroup_residual = std::max(operator_norm(semigroup(last.rel1, 1.0)),
                                    operator_norm(semigroup(last.rel2, 1.0) - semigroup(whole, 1.0)));
  return out;
}

namespace detail {

inline void require_sector(Scalar z) {
  require(z.real() >= 0.0 && (z == Scalar(0.0) || z.real() > 0.0), ErrorKind::InvalidZ,
          "z must be 0 or satisfy |arg z| < pi/2");
}

}  // namespace detail

struct EulerResult {
  Matrix approx;  // (I + zT/n)^{-n}, zero on the multivalued part
  double error = 0.0;
};

inline EulerResult euler_approx(const NonnegRelation& rel, Scalar z, int n) {
  detail::require_sector(z);
  require(n >= 1, ErrorKind::InvalidArgument, "n must be at least 1");
  const RealVector& t = rel.operator_values();
  Vector factors(t.size());
  for (Index k = 0; k < t.size(); ++k) factors(k) = std::pow(1.0 + z * t(k) / static_cast<double>(n), -n);
  EulerResult out;
  out.approx = rel.operator_frame() * factors.asDiagonal() * rel.operator_frame().adjoint();
  out.error = operator_norm(out.approx - semigroup(rel, z));
  return out;
}

inline std::vector<int> default_euler_ns() {
  std::vector<int> ns;
  for (int n = 8; n <= 1024; n *= 2) ns.push_back(n);
  return ns;
}

struct EulerSweep {
  std::vector<int> ns;
  std::vector<double> errors;
  std::optional<double> slope;  // empty when the error vanishes identically
  double constant = 0.0;        // max n·error·cos²(arg z)
  bool rate_ok = false;         // slope in [-1.2, -0.8]
};

inline EulerSweep euler_sweep(const NonnegRelation& rel, Scalar z, const std::vector<int>& ns = default_euler_ns()) {
  require(!ns.empty(), ErrorKind::EmptyList, "no step counts given");
  EulerSweep out;
  out.ns = ns;
  const double cos_phi = z == Scalar(0.0) ? 1.0 : std::cos(std::arg(z));
  std::vector<double> xs;
  for (int n : ns) {
    const double e = euler_approx(rel, z, n).error;
    out.errors.push_back(e);
    xs.push_back(static_cast<double>(n));
    out.constant = std::max(out.constant, n * e * cos_phi * cos_phi);
  }
  out.slope = loglog_slope(xs, out.errors);
  out.rate_ok = out.slope && *out.slope >= -1.2 && *out.slope <= -0.8;
  return out;
}

// (exp(-t T1 / n) exp(-t T2 / n))^n.
inline Matrix trotter_product(const NonnegRelation& rel1, const NonnegRelation& rel2, double t, int n) {
  require(rel1.dim() == rel2.dim(), ErrorKind::DimensionMismatch, "relations act on different spaces");
  require(t >= 0.0 && n >= 1, ErrorKind::InvalidArgument, "need t >= 0 and n >= 1");
  const double step = t / static_cast<double>(n);
  const Matrix factor = semigroup(rel1, step) * semigroup(rel2, step);
  Matrix out = identity(rel1.dim());
  for (int k = 0; k < n; ++k) out = out * factor;
  return out;
}

inline std::vector<int> default_trotter_ns() {
  std::vector<int> ns;
  for (int n = 2; n <= 256; n *= 2) ns.push_back(n);
  return ns;
}

// The alternating product tends to the semigroup of the form sum on
// D[T1] ∩ D[T2]; that limit is zero when the form domains meet trivially and
// exp(-2t T1) when T1 is a closed restriction of the form of T2.
struct TrotterSweep {
  std::vector<int> ns;
  std::vector<double> norms;
  std::vector<double> distances;  // to the form-sum semigroup
  Matrix limit;
  bool vanishing = false;  // D[T1] ∩ D[T2] = {0}
  bool nested = false;     // one form domain inside the other
  bool decreasing = false;
};

inline TrotterSweep trotter_sweep(const NonnegRelation& rel1, const NonnegRelation& rel2, double t,
                                  const std::vector<int>& ns = default_trotter_ns()) {
  require(!ns.empty(), ErrorKind::EmptyList, "no step counts given");
  const ToleranceContext& ctx = rel1.ctx();
  TrotterSweep out;
  out.ns = ns;
  const Subspace d1 = rel1.dom_closure();
  const Subspace d2 = rel2.dom_closure();
  out.vanishing = intersect_trivially(d1, d2, ctx);
  out.nested = is_contained(d1, d2, ctx) || is_contained(d2, d1, ctx);
  out.limit = semigroup(form_sum(rel1, rel2), t);
  for (int n : ns) {
    const Matrix product = trotter_product(rel1, rel2, t, n);
    out.norms.push_back(operator_norm(product));
    out.distances.push_back(operator_norm(product - out.limit));
  }
  out.decreasing = true;
  for (std::size_t k = 1; k < out.distances.size(); ++k)
    out.decreasing = out.decreasing && (out.distances[k] < out.distances[k - 1] || out.distances[k] <= 1e-14);
  return out;
}

}  // namespace oprange
