#pragma once

// Subspaces as orthonormal column frames, and the frame algebra used to decide
// intersections, inclusions and equalities of operator ranges.

#include <algorithm>
#include <cmath>
#include <vector>

#include "oprange/psd.hpp"

namespace oprange {

class Subspace {
 public:
  Subspace() = default;

  static Subspace trivial(Index ambient) { return Subspace(Matrix(ambient, 0)); }
  static Subspace full(Index ambient) { return Subspace(identity(ambient)); }

  static Subspace coordinate(Index ambient, const std::vector<Index>& indices) {
    Matrix frame = Matrix::Zero(ambient, static_cast<Index>(indices.size()));
    for (std::size_t k = 0; k < indices.size(); ++k) {
      require(indices[k] >= 0 && indices[k] < ambient, ErrorKind::DimensionMismatch, "coordinate index");
      frame(indices[k], static_cast<Index>(k)) = 1.0;
    }
    return from_orthonormal(frame);
  }

  // Frame must already be orthonormal.
  static Subspace from_orthonormal(const Matrix& frame, double tol = 1e-9) {
    const Index k = frame.cols();
    require((frame.adjoint() * frame - identity(k)).norm() <= tol * std::max<double>(1.0, static_cast<double>(k)),
            ErrorKind::InvalidArgument, "frame is not orthonormal");
    return Subspace(frame);
  }

  // Column span. Singular values at or below rank_rel_tol * max(sigma_max,
  // reference_scale) are discarded.
  static Subspace span(const Matrix& columns, const ToleranceContext& ctx = {}, double reference_scale = 0.0) {
    const Index n = columns.rows();
    if (columns.cols() == 0 || n == 0) return trivial(n);
    Eigen::BDCSVD<Matrix> svd(columns, Eigen::ComputeThinU);
    const RealVector& sigma = svd.singularValues();
    const double cut = ctx.rank_rel_tol * std::max(sigma(0), reference_scale);
    Index r = 0;
    while (r < sigma.size() && sigma(r) > cut) ++r;
    return Subspace(svd.matrixU().leftCols(r));
  }

  Index ambient_dim() const { return frame_.rows(); }
  Index dim() const { return frame_.cols(); }
  bool is_trivial() const { return dim() == 0; }
  bool is_full() const { return dim() == ambient_dim(); }
  const Matrix& frame() const { return frame_; }

  Matrix projection() const { return frame_ * frame_.adjoint(); }

  Subspace complement() const {
    const Index n = ambient_dim();
    const Index k = dim();
    if (k == 0) return full(n);
    if (k == n) return trivial(n);
    Eigen::HouseholderQR<Matrix> qr(frame_);
    Matrix q = qr.householderQ() * identity(n);
    return Subspace(q.rightCols(n - k));
  }

 private:
  explicit Subspace(Matrix frame) : frame_(std::move(frame)) {}

  Matrix frame_;
};

inline void require_same_ambient(const Subspace& a, const Subspace& b) {
  require(a.ambient_dim() == b.ambient_dim(), ErrorKind::DimensionMismatch, "subspace ambient dimensions differ");
}

inline Subspace range_basis(const PsdOperator& a, double reference_scale = 0.0) {
  const Index r = a.rank(reference_scale);
  return Subspace::from_orthonormal(a.eigenvectors().leftCols(r));
}

inline Subspace column_space(const Matrix& m, const ToleranceContext& ctx = {}, double reference_scale = 0.0) {
  return Subspace::span(m, ctx, reference_scale);
}

inline Subspace null_space(const Matrix& m, const ToleranceContext& ctx = {}, double reference_scale = 0.0) {
  const Index cols = m.cols();
  if (cols == 0) return Subspace::trivial(0);
  if (m.rows() == 0) return Subspace::full(cols);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const RealVector& sigma = svd.singularValues();
  const double cut = ctx.rank_rel_tol * std::max(sigma.size() ? sigma(0) : 0.0, reference_scale);
  Index r = 0;
  while (r < sigma.size() && sigma(r) > cut) ++r;
  return Subspace::from_orthonormal(svd.matrixV().rightCols(cols - r));
}

// Principal angles in [0, pi/2], nonincreasing. Each angle is atan2(sin, cos)
// with the sine measured directly as the residual of the paired singular
// vector, which keeps small angles accurate.
inline std::vector<double> principal_angles(const Subspace& s1, const Subspace& s2) {
  require_same_ambient(s1, s2);
  std::vector<double> angles;
  if (s1.is_trivial() || s2.is_trivial()) return angles;
  const Matrix& q1 = s1.frame();
  const Matrix& q2 = s2.frame();
  const Matrix cross = q1.adjoint() * q2;
  Eigen::JacobiSVD<Matrix> svd(cross, Eigen::ComputeThinV);
  const RealVector& sigma = svd.singularValues();
  const Index m = sigma.size();
  angles.reserve(static_cast<std::size_t>(m));
  for (Index i = 0; i < m; ++i) {
    const Vector w = svd.matrixV().col(i);
    const Vector image = q2 * w;
    const double sine = (image - q1 * (q1.adjoint() * image)).norm();
    const double cosine = std::clamp(sigma(i), 0.0, 1.0);
    angles.push_back(std::clamp(std::atan2(sine, cosine), 0.0, M_PI / 2));
  }
  std::sort(angles.begin(), angles.end(), std::greater<>());
  return angles;
}

inline Index intersection_dim(const Subspace& s1, const Subspace& s2, const ToleranceContext& ctx = {}) {
  const auto angles = principal_angles(s1, s2);
  return static_cast<Index>(std::count_if(angles.begin(), angles.end(),
                                          [&](double a) { return a < ctx.angle_tol(); }));
}

inline bool intersect_trivially(const Subspace& s1, const Subspace& s2, const ToleranceContext& ctx = {}) {
  return intersection_dim(s1, s2, ctx) == 0;
}

inline Subspace intersection(const Subspace& s1, const Subspace& s2, const ToleranceContext& ctx = {}) {
  require_same_ambient(s1, s2);
  const Index n = s1.ambient_dim();
  if (s1.is_trivial() || s2.is_trivial()) return Subspace::trivial(n);
  const Matrix& q1 = s1.frame();
  const Matrix& q2 = s2.frame();
  Eigen::JacobiSVD<Matrix> svd(q1.adjoint() * q2, Eigen::ComputeThinU | Eigen::ComputeThinV);
  std::vector<Index> keep;
  for (Index i = 0; i < svd.singularValues().size(); ++i) {
    const Vector image = q2 * svd.matrixV().col(i);
    const double sine = (image - q1 * (q1.adjoint() * image)).norm();
    if (std::atan2(sine, svd.singularValues()(i)) < ctx.angle_tol()) keep.push_back(i);
  }
  Matrix frame(n, static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) frame.col(static_cast<Index>(k)) = q1 * svd.matrixU().col(keep[k]);
  return Subspace::span(frame, ctx, 1.0);
}

inline Subspace subspace_sum(const Subspace& s1, const Subspace& s2, const ToleranceContext& ctx = {}) {
  require_same_ambient(s1, s2);
  Matrix joined(s1.ambient_dim(), s1.dim() + s2.dim());
  joined << s1.frame(), s2.frame();
  // Frames are accurate to about angle_tol, so a new direction only counts
  // when it leaves the other frame by more than that.
  ToleranceContext frame_ctx = ctx;
  frame_ctx.rank_rel_tol = ctx.angle_tol();
  return Subspace::span(joined, frame_ctx, 1.0);
}

// Largest principal sine of `inner` against `outer`: zero iff inner ⊆ outer.
inline double inclusion_defect(const Subspace& inner, const Subspace& outer) {
  require_same_ambient(inner, outer);
  if (inner.is_trivial()) return 0.0;
  const Matrix residual = inner.frame() - outer.frame() * (outer.frame().adjoint() * inner.frame());
  return operator_norm(residual);
}

inline bool is_contained(const Subspace& inner, const Subspace& outer, const ToleranceContext& ctx = {}) {
  return inclusion_defect(inner, outer) < ctx.angle_tol();
}

inline bool same_subspace(const Subspace& s1, const Subspace& s2, const ToleranceContext& ctx = {}) {
  return s1.dim() == s2.dim() && is_contained(s1, s2, ctx);
}

inline bool contains_vector(const Subspace& s, const Vector& v, const ToleranceContext& ctx = {}) {
  const double len = v.norm();
  if (len == 0.0) return true;
  return (v - s.frame() * (s.frame().adjoint() * v)).norm() <= ctx.angle_tol() * len;
}

// L·S, judged against the size of L.
inline Subspace image(const Matrix& map, const Subspace& s, const ToleranceContext& ctx = {}) {
  require(map.cols() == s.ambient_dim(), ErrorKind::DimensionMismatch, "image of subspace");
  return Subspace::span(map * s.frame(), ctx, operator_norm(map));
}

// {x : Y x ∈ S}.
inline Subspace preimage(const Matrix& map, const Subspace& s, const ToleranceContext& ctx = {}) {
  require(map.rows() == s.ambient_dim(), ErrorKind::DimensionMismatch, "preimage of subspace");
  const Matrix off = (identity(map.rows()) - s.projection()) * map;
  return null_space(off, ctx, operator_norm(map));
}

// outer ⊖ inner: the part of `outer` orthogonal to (the projection into outer of) `inner`.
inline Subspace orthogonal_difference(const Subspace& outer, const Subspace& inner, const ToleranceContext& ctx = {}) {
  require_same_ambient(outer, inner);
  if (outer.is_trivial()) return outer;
  const Subspace inside = Subspace::span(outer.frame().adjoint() * inner.frame(), ctx, 1.0);
  const Subspace rest = inside.complement();
  return Subspace::span(outer.frame() * rest.frame(), ctx, 1.0);
}

inline Matrix fundamental_symmetry(const Subspace& s) {
  return 2.0 * s.projection() - identity(s.ambient_dim());
}

// Coordinates of a Hermitian matrix in the (K, K⊥) frame.
struct BlockSplit {
  Matrix b11;
  Matrix b12;
  Matrix b22;
  Matrix q1;
  Matrix q2;
};

inline BlockSplit split_blocks(const Matrix& b, const Subspace& k) {
  require(b.rows() == k.ambient_dim() && b.cols() == k.ambient_dim(), ErrorKind::DimensionMismatch,
          "operator and subspace dimensions differ");
  BlockSplit out;
  out.q1 = k.frame();
  out.q2 = k.complement().frame();
  out.b11 = hermitian_part(out.q1.adjoint() * b * out.q1);
  out.b12 = out.q1.adjoint() * b * out.q2;
  out.b22 = hermitian_part(out.q2.adjoint() * b * out.q2);
  return out;
}

}  // namespace oprange
