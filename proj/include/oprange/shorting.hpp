#pragma once

// Parallel addition F : G and the shorted operator B_K, each by independent
// routes, plus the exact detector B_K = 0 <=> K ∩ ran B^{1/2} = {0}.

#include <algorithm>
#include <array>
#include <functional>
#include <vector>

#include "oprange/psd.hpp"
#include "oprange/subspace.hpp"

namespace oprange {

namespace detail {

// Hermitian matrix of the quadratic form q in the orthonormal basis `basis`,
// recovered by polarization: e_i* Q e_j = 1/4 sum_k i^k q(e_j + i^k e_i).
inline Matrix assemble_form(const std::function<double(const Vector&)>& q, const Matrix& basis) {
  const Index n = basis.cols();
  const std::array<Scalar, 4> phases{Scalar(1, 0), Scalar(0, 1), Scalar(-1, 0), Scalar(0, -1)};
  Matrix coords(n, n);
  for (Index i = 0; i < n; ++i) {
    coords(i, i) = q(basis.col(i));
    for (Index j = i + 1; j < n; ++j) {
      Scalar value = 0.0;
      for (const Scalar& phase : phases) value += phase * q(basis.col(j) + phase * basis.col(i));
      coords(i, j) = value / 4.0;
      coords(j, i) = std::conj(coords(i, j));
    }
  }
  return hermitian_part(basis * coords * basis.adjoint());
}

inline double form_at(const Matrix& op, const Vector& v) { return v.dot(op * v).real(); }

inline double max_pairwise_distance(const std::vector<const Matrix*>& items) {
  double worst = 0.0;
  for (std::size_t i = 0; i < items.size(); ++i)
    for (std::size_t j = i + 1; j < items.size(); ++j) worst = std::max(worst, (*items[i] - *items[j]).norm());
  return worst;
}

}  // namespace detail

// M = (F+G)^{[-1/2]} F (F+G)^{[-1/2]}, a contraction supported on ran(F+G).
inline Matrix parallel_contraction(const PsdOperator& f, const PsdOperator& g) {
  require(f.dim() == g.dim(), ErrorKind::DimensionMismatch, "parallel sum dimensions");
  const PsdOperator total = make_psd(f.matrix() + g.matrix(), f.ctx(), f.norm() + g.norm());
  const Matrix inv_half = partial_inverse_sqrt(total);
  return hermitian_part(inv_half * f.matrix() * inv_half);
}

inline PsdOperator parallel_sum(const PsdOperator& f, const PsdOperator& g) {
  require(f.dim() == g.dim(), ErrorKind::DimensionMismatch, "parallel sum dimensions");
  const double scale = f.norm() + g.norm();
  const PsdOperator total = make_psd(f.matrix() + g.matrix(), f.ctx(), scale);
  const Matrix half = sqrt_psd(total).matrix();
  const Matrix inv_half = partial_inverse_sqrt(total);
  const Matrix m = hermitian_part(inv_half * f.matrix() * inv_half);
  return make_psd(half * (m - m * m) * half, f.ctx(), scale);
}

// Variational route: ((F:G)h, h) = min over g of (F(h-g), h-g) + (Gg, g),
// attained at (F+G)g = Fh. `basis` is an orthonormal probe basis (identity if
// empty).
inline PsdOperator parallel_sum_variational(const PsdOperator& f, const PsdOperator& g, const Matrix& basis = {}) {
  require(f.dim() == g.dim(), ErrorKind::DimensionMismatch, "parallel sum dimensions");
  const Index n = f.dim();
  const double scale = f.norm() + g.norm();
  const PsdOperator total = make_psd(f.matrix() + g.matrix(), f.ctx(), scale);
  const Matrix solve = pseudo_inverse(total) * f.matrix();
  auto q = [&](const Vector& h) {
    const Vector part = solve * h;
    return detail::form_at(f.matrix(), h - part) + detail::form_at(g.matrix(), part);
  };
  const Matrix probes = basis.size() ? basis : identity(n);
  require(probes.rows() == n && probes.cols() == n, ErrorKind::DimensionMismatch, "probe basis");
  return make_psd(detail::assemble_form(q, probes), f.ctx(), scale);
}

inline std::vector<double> default_eps_schedule() {
  std::vector<double> eps;
  for (int k = 1; k <= 10; ++k) eps.push_back(std::pow(10.0, -k));
  return eps;
}

struct LimitResult {
  PsdOperator value;
  std::vector<double> increments;  // ||X_k - X_{k-1}||_F / (||F|| + ||G||)
  double last_increment = 0.0;
};

// Route 3: F (F + G + eps I)^{-1} G along a decreasing schedule.
inline LimitResult parallel_sum_limit(const PsdOperator& f, const PsdOperator& g,
                                      const std::vector<double>& eps_schedule = default_eps_schedule()) {
  require(f.dim() == g.dim(), ErrorKind::DimensionMismatch, "parallel sum dimensions");
  require(eps_schedule.size() >= 2, ErrorKind::InvalidArgument, "schedule needs at least two values");
  for (std::size_t k = 0; k < eps_schedule.size(); ++k) {
    require(eps_schedule[k] > 0.0, ErrorKind::InvalidArgument, "schedule must be positive");
    if (k) require(eps_schedule[k] < eps_schedule[k - 1], ErrorKind::InvalidArgument, "schedule must decrease");
  }
  const double scale = std::max(f.norm() + g.norm(), 1e-300);
  const Eigensystem total = hermitian_eigensystem(hermitian_part(f.matrix() + g.matrix()));
  const Matrix left = f.matrix() * total.vectors;
  const Matrix right = total.vectors.adjoint() * g.matrix();
  LimitResult out;
  Matrix previous;
  Matrix current;
  for (std::size_t k = 0; k < eps_schedule.size(); ++k) {
    const RealVector inv = (total.values.array() + eps_schedule[k]).inverse();
    current = hermitian_part(left * inv.asDiagonal() * right);
    if (k) out.increments.push_back((current - previous).norm() / scale);
    previous = current;
  }
  out.last_increment = out.increments.back();
  const double threshold = 1e-6;
  const double noise_floor = 1e-12;
  bool below = false;
  bool monotone = true;
  for (std::size_t k = 0; k < out.increments.size(); ++k) {
    if (!below && out.increments[k] <= threshold) below = true;
    else if (below && out.increments[k] > out.increments[k - 1] + noise_floor) monotone = false;
  }
  if (!below || !monotone || out.last_increment > threshold)
    fail(ErrorKind::NotConverged, "Cauchy increments did not settle below 1e-6");
  out.value = make_psd(current, f.ctx(), scale);
  return out;
}

struct ShortReport {
  PsdOperator shorted;        // block route, ambient coordinates
  Matrix variational;         // stationarity route
  Matrix omega_route;         // B^{1/2} P_Omega B^{1/2}
  double route_disagreement = 0.0;
  bool vanishes = false;
  bool range_condition = false;  // ran B12* ⊆ ran B22^{1/2}
};

// Omega_K = ran B ⊖ B^{1/2} K⊥.
inline Subspace omega_subspace(const PsdOperator& b, const Subspace& k) {
  require(b.dim() == k.ambient_dim(), ErrorKind::DimensionMismatch, "operator and subspace dimensions differ");
  const ToleranceContext& ctx = b.ctx();
  const Subspace range = range_basis(b);
  const Matrix half = sqrt_psd(b).matrix();
  return orthogonal_difference(range, image(half, k.complement(), ctx), ctx);
}

// Relative threshold for "the shorted operator is zero".
inline double vanish_tolerance(const ToleranceContext& ctx) { return 10.0 * ctx.cmp_tol; }

inline ShortReport shorted(const PsdOperator& b, const Subspace& k) {
  require(b.dim() == k.ambient_dim(), ErrorKind::DimensionMismatch, "operator and subspace dimensions differ");
  const ToleranceContext& ctx = b.ctx();
  const double scale = b.norm();
  const BlockSplit blocks = split_blocks(b.matrix(), k);
  const PsdOperator b22 = make_psd(blocks.b22, ctx, scale);
  const Matrix lifted = partial_inverse_sqrt(b22) * blocks.b12.adjoint();
  const Matrix reduced = blocks.b11 - lifted.adjoint() * lifted;

  ShortReport out;
  out.shorted = make_psd(blocks.q1 * reduced * blocks.q1.adjoint(), ctx, scale);

  const Matrix off = blocks.b12.adjoint() - range_projection(b22) * blocks.b12.adjoint();
  out.range_condition = operator_norm(off) <= 2.0 * ctx.angle_tol() * std::max(scale, 1e-300);

  // Stationarity: minimize (B(f + Q2 c), f + Q2 c) over c, i.e. B22 c = -Q2* B f.
  const Matrix correction = blocks.q2 * pseudo_inverse(b22) * blocks.q2.adjoint() * b.matrix();
  auto q = [&](const Vector& f) { return detail::form_at(b.matrix(), f - correction * f); };
  out.variational = detail::assemble_form(q, identity(b.dim()));

  const Subspace omega = omega_subspace(b, k);
  const Matrix half = sqrt_psd(b).matrix();
  out.omega_route = hermitian_part(half * omega.projection() * half);

  out.route_disagreement = detail::max_pairwise_distance({&out.shorted.matrix(), &out.variational, &out.omega_route});
  out.vanishes = out.shorted.norm() <= vanish_tolerance(ctx) * scale;
  return out;
}

struct GammaReport {
  Matrix gamma;         // ran B22 -> ran B11, in (K, K⊥) coordinates
  double gamma_norm = 0.0;
  bool contraction = false;
  Matrix short_k;       // B11^{1/2}(I - Gamma Gamma*)B11^{1/2}, ambient
  Matrix short_k_perp;  // B22^{1/2}(I - Gamma* Gamma)B22^{1/2}, ambient
  double cross_check = 0.0;  // max distance to shorted() on both sides
};

inline GammaReport gamma_form(const PsdOperator& b, const Subspace& k) {
  require(b.dim() == k.ambient_dim(), ErrorKind::DimensionMismatch, "operator and subspace dimensions differ");
  const ToleranceContext& ctx = b.ctx();
  const double scale = b.norm();
  const BlockSplit blocks = split_blocks(b.matrix(), k);
  const PsdOperator b11 = make_psd(blocks.b11, ctx, scale);
  const PsdOperator b22 = make_psd(blocks.b22, ctx, scale);
  GammaReport out;
  out.gamma = partial_inverse_sqrt(b11) * blocks.b12 * partial_inverse_sqrt(b22);
  out.gamma_norm = operator_norm(out.gamma);
  out.contraction = out.gamma_norm <= 1.0 + ctx.cmp_tol;
  const Matrix h11 = sqrt_psd(b11).matrix();
  const Matrix h22 = sqrt_psd(b22).matrix();
  const Index k_dim = blocks.b11.rows();
  const Index c_dim = blocks.b22.rows();
  out.short_k = blocks.q1 * (h11 * (identity(k_dim) - out.gamma * out.gamma.adjoint()) * h11) * blocks.q1.adjoint();
  out.short_k_perp =
      blocks.q2 * (h22 * (identity(c_dim) - out.gamma.adjoint() * out.gamma) * h22) * blocks.q2.adjoint();
  out.short_k = hermitian_part(out.short_k);
  out.short_k_perp = hermitian_part(out.short_k_perp);
  const double d1 = (out.short_k - shorted(b, k).shorted.matrix()).norm();
  const double d2 = (out.short_k_perp - shorted(b, k.complement()).shorted.matrix()).norm();
  out.cross_check = std::max(d1, d2);
  return out;
}

struct IntersectionTest {
  bool trivial = false;          // by the vanishing shorted operator
  Index frame_intersection = 0;  // dim(K ∩ ran B^{1/2}) from frames
  bool consistent = false;       // both evaluations agree
};

inline IntersectionTest trivial_intersection(const PsdOperator& b, const Subspace& k) {
  IntersectionTest out;
  out.trivial = shorted(b, k).vanishes;
  out.frame_intersection = intersection_dim(k, range_basis(b), b.ctx());
  out.consistent = out.trivial == (out.frame_intersection == 0);
  return out;
}

}  // namespace oprange
