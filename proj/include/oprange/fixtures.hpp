#pragma once

// Named witness models, each a set of text files in the shared matrix format.

#include <cmath>
#include <string>
#include <vector>

#include "oprange/compressions.hpp"
#include "oprange/matrix_io.hpp"

namespace oprange {

struct FixtureFile {
  std::string name;
  std::string contents;
};

struct Fixture {
  std::string name;
  std::string description;
  std::vector<FixtureFile> files;
};

namespace detail {

inline Matrix real_matrix(Index rows, Index cols, std::initializer_list<double> values) {
  Matrix m(rows, cols);
  auto it = values.begin();
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = *it++;
  return m;
}

inline Matrix diagonal(std::initializer_list<double> values) {
  const Index n = static_cast<Index>(values.size());
  Matrix m = Matrix::Zero(n, n);
  Index k = 0;
  for (double v : values) m(k, k) = v, ++k;
  return m;
}

inline Matrix unit_column(std::initializer_list<double> values) {
  Matrix v = real_matrix(static_cast<Index>(values.size()), 1, values);
  return v / v.norm();
}

inline FixtureFile matrix_file(const std::string& name, const Matrix& m) { return {name, matrix_to_string(m)}; }

inline FixtureFile relation_file(const std::string& name, const Matrix& resolvent) {
  std::ostringstream out;
  write_relation_resolvent(out, resolvent);
  return {name, out.str()};
}

// [[A11, A12], [A12*, A22]] with A11 = diag(i^-1), A12 = (i^-2), i = 1..n, and
// A22 = 1 + A12* A11^{-1} A12 so that the operator is positive definite.
inline Matrix graded_operator(Index n) {
  Matrix a = Matrix::Zero(n + 1, n + 1);
  double tail = 1.0;
  for (Index i = 1; i <= n; ++i) {
    const double d = 1.0 / static_cast<double>(i);
    const double c = d * d;
    a(i - 1, i - 1) = d;
    a(i - 1, n) = a(n, i - 1) = c;
    tail += c * c / d;
  }
  a(n, n) = tail;
  return a;
}

}  // namespace detail

inline std::vector<Fixture> bundled_fixtures() {
  using namespace detail;
  const Matrix diagonal_line = unit_column({1, 1});
  std::vector<Fixture> out;

  const PathologicalBlock witness = pathological_block(make_psd(diagonal({1, 0})), diagonal({1, 0}));
  out.push_back({"rank1-witness",
                 "rank-one X in C^4 whose range meets M and M-perp trivially; both shorted operators vanish",
                 {matrix_file("X.mat", witness.x.matrix()), matrix_file("M.sub", witness.m.frame())}});

  out.push_back({"c4-disjoint-pair", "singular F, G in C^4 with ran F ∩ ran G = {0}; F:G = 0",
                 {matrix_file("F.mat", diagonal({1, 1, 0, 0})),
                  matrix_file("G.mat", real_matrix(4, 4, {1, 0, 1, 0, 0, 1, 0, 1, 1, 0, 1, 0, 0, 1, 0, 1}) / 2.0)}});

  out.push_back({"pfamily-noncommuting", "A = diag(1,0), B = projection onto (1,1)/sqrt2; P(x) varies with x",
                 {matrix_file("A.mat", diagonal({1, 0})), matrix_file("B.mat", diagonal_line * diagonal_line.adjoint())}});

  out.push_back({"pfamily-commuting", "A = diag(1,0), B = diag(0,1); P(x) is constant",
                 {matrix_file("A.mat", diagonal({1, 0})), matrix_file("B.mat", diagonal({0, 1}))}});

  out.push_back({"chain-diag14", "A = diag(1,4), M = span (1,1); the compression chain decays by 9/10",
                 {matrix_file("A.mat", diagonal({1, 4})), matrix_file("M.sub", diagonal_line)}});

  std::vector<Index> first16(16);
  for (Index i = 0; i < 16; ++i) first16[static_cast<std::size_t>(i)] = i;
  out.push_back({"lifting-graded", "A11 = diag(i^-1), A12 = (i^-2), n = 16, M = first 16 coordinates",
                 {matrix_file("A.mat", graded_operator(16)), matrix_file("M.sub", Subspace::coordinate(17, first16).frame())}});

  out.push_back({"lifting-pair", "W = diag(1,4), V = W^{1/2} P_L W^{1/2} with L = span (1,1)",
                 {matrix_file("W.mat", diagonal({1, 4})),
                  matrix_file("V.mat", diagonal({1, 2}) * diagonal_line * diagonal_line.adjoint() * diagonal({1, 2}))}});

  out.push_back({"split-diag13", "T = diag(1,3), M = span (1,1): resolvent splitting along M",
                 {matrix_file("T.mat", diagonal({1, 3})), matrix_file("M.sub", diagonal_line)}});

  out.push_back({"euler-scalar", "T = 1; the Euler error behaves like e^-1/(2n)", {matrix_file("T.mat", diagonal({1}))}});

  const Matrix tilted = unit_column({std::cos(M_PI / 8), std::sin(M_PI / 8)});
  out.push_back({"trotter-eighth", "zero relations on two lines at angle pi/8, multivalued elsewhere",
                 {relation_file("T1.rel", diagonal({1, 0})), relation_file("T2.rel", tilted * tilted.adjoint())}});

  out.push_back({"divext-axis", "L2 = diag(1,2) restricted to span e1",
                 {matrix_file("L2.mat", diagonal({1, 2})), matrix_file("D.sub", real_matrix(2, 1, {1, 0}))}});

  out.push_back({"prodpair-diag12", "B = diag(1,2), M = span (1,1)",
                 {matrix_file("B.mat", diagonal({1, 2})), matrix_file("M.sub", diagonal_line)}});

  out.push_back({"douglas-diag", "B = diag(2,0), A = diag(4,0): A = B C with C = diag(2,0)",
                 {matrix_file("A.mat", diagonal({4, 0})), matrix_file("B.mat", diagonal({2, 0}))}});
  return out;
}

inline Fixture find_fixture(const std::string& name) {
  for (const Fixture& f : bundled_fixtures())
    if (f.name == name) return f;
  fail(ErrorKind::UnknownFixture, "no fixture named '" + name + "'");
}

inline Matrix fixture_matrix(const std::string& fixture, const std::string& file) {
  for (const FixtureFile& f : find_fixture(fixture).files) {
    if (f.name != file) continue;
    std::istringstream in(f.contents);
    if (f.contents.rfind("RELATION", 0) == 0) return read_relation_resolvent(in);
    return read_matrix(in);
  }
  fail(ErrorKind::UnknownFixture, "fixture '" + fixture + "' has no file '" + file + "'");
}

}  // namespace oprange
