#pragma once

// Seeded generators for random test objects.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. Uniforms use the top 53 bits of one draw; normals use Box-Muller on
// two uniforms. No standard-library distribution is involved, so a seed
// reproduces the same stream on every platform.

#include <cmath>
#include <cstdint>
#include <random>

#include "oprange/psd.hpp"
#include "oprange/subspace.hpp"

namespace oprange {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi].
  Index integer(Index lo, Index hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<Index>(engine_() % span);
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    spare_ = radius * std::sin(2.0 * M_PI * u2);
    has_spare_ = true;
    return radius * std::cos(2.0 * M_PI * u2);
  }

  Scalar complex_normal() {
    const double re = normal();
    return {re, normal()};
  }

  std::uint64_t next_seed() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

inline Matrix random_gaussian(Index rows, Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Index c = 0; c < cols; ++c)
    for (Index r = 0; r < rows; ++r) m(r, c) = rng.complex_normal() * M_SQRT1_2;
  return m;
}

inline Matrix random_unitary(Index n, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_gaussian(n, n, rng));
  Matrix q = qr.householderQ() * identity(n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < n; ++k) {
    const Scalar d = r(k, k);
    if (std::abs(d) > 0.0) q.col(k) *= d / std::abs(d);
  }
  return q;
}

inline Subspace random_subspace(Index n, Index k, Rng& rng) {
  if (k == 0) return Subspace::trivial(n);
  return Subspace::from_orthonormal(random_unitary(n, rng).leftCols(k));
}

// PSD matrix whose range is the given subspace and whose nonzero eigenvalues
// are drawn uniformly from [lo, hi].
inline Matrix random_psd_on(const Subspace& range, Rng& rng, double lo = 0.2, double hi = 2.0) {
  const Index k = range.dim();
  const Matrix rotate = random_unitary(k, rng);
  RealVector values(k);
  for (Index i = 0; i < k; ++i) values(i) = rng.uniform(lo, hi);
  const Matrix frame = range.frame() * rotate;
  return hermitian_part(frame * values.asDiagonal() * frame.adjoint());
}

inline Matrix random_psd(Index n, Index rank, Rng& rng, double lo = 0.2, double hi = 2.0) {
  return random_psd_on(random_subspace(n, rank, rng), rng, lo, hi);
}

inline Matrix random_hermitian(Index n, Rng& rng) { return hermitian_part(random_gaussian(n, n, rng)); }

// Two subspaces of the given dimensions meeting in exactly `common` dimensions
// and otherwise in generic (non-orthogonal) position.
struct SubspacePair {
  Subspace first;
  Subspace second;
};

inline SubspacePair random_subspace_pair(Index n, Index dim1, Index dim2, Index common, Rng& rng) {
  require(common <= dim1 && common <= dim2 && dim1 + dim2 - common <= n, ErrorKind::InvalidArgument,
          "subspace pair dimensions do not fit");
  const Matrix u = random_unitary(n, rng);
  const Index only1 = dim1 - common;
  const Index only2 = dim2 - common;
  const Matrix shared = u.leftCols(common);
  const Matrix own1 = u.middleCols(common, only1);
  const Matrix own2 = u.middleCols(common + only1, only2) + own1 * random_gaussian(only1, only2, rng) +
                      shared * random_gaussian(common, only2, rng);
  Matrix m1(n, dim1);
  m1 << shared, own1;
  Matrix m2(n, dim2);
  m2 << shared, own2;
  return {Subspace::span(m1), Subspace::span(m2)};
}

struct PsdPair {
  Matrix first;
  Matrix second;
  Index common = 0;  // dim(ran first ∩ ran second)
};

inline PsdPair random_psd_pair(Index n, Index rank1, Index rank2, Index common, Rng& rng, double lo = 0.2,
                               double hi = 2.0) {
  const SubspacePair ranges = random_subspace_pair(n, rank1, rank2, common, rng);
  return {random_psd_on(ranges.first, rng, lo, hi), random_psd_on(ranges.second, rng, lo, hi), common};
}

// Random pair with random ranks; `common` is drawn so the pair fits in C^n.
inline PsdPair random_singular_pair(Index n, Rng& rng) {
  const Index rank1 = rng.integer(1, n - 1);
  const Index rank2 = rng.integer(1, n - 1);
  const Index least = std::max<Index>(0, rank1 + rank2 - n);
  const Index common = rng.integer(least, std::min(rank1, rank2));
  return random_psd_pair(n, rank1, rank2, common, rng);
}

}  // namespace oprange
