#pragma once

// The twelve property checks run by `oprange selftest` and the acceptance
// binary. Every random object is drawn from one Rng per criterion, seeded from
// the suite seed, and every tolerance-dependent computation uses the supplied
// context.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <tuple>
#include <vector>

#include "oprange/compressions.hpp"
#include "oprange/divergence.hpp"
#include "oprange/fixtures.hpp"
#include "oprange/lifting.hpp"
#include "oprange/random.hpp"
#include "oprange/range.hpp"
#include "oprange/relations.hpp"
#include "oprange/shorting.hpp"

namespace oprange {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace detail {

inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

// Counts failures and remembers the first one.
class Tally {
 public:
  void check(bool ok, const std::string& what) {
    if (ok) return;
    if (failures_ == 0) first_ = what;
    ++failures_;
  }
  bool ok() const { return failures_ == 0; }
  std::string summary(const std::string& extra) const {
    if (ok()) return extra;
    return std::to_string(failures_) + " failure(s), first: " + first_ + "; " + extra;
  }

 private:
  int failures_ = 0;
  std::string first_;
};

inline std::string trial(int k) { return "trial " + std::to_string(k); }

inline Matrix rank_deficient(Index rows, Index cols, Index rank, Rng& rng) {
  return random_gaussian(rows, rank, rng) * random_gaussian(rank, cols, rng);
}

// Eigenvalues spread over [0, top] with most of the mass near zero.
inline PsdOperator spread_psd(Index n, double top, Rng& rng, const ToleranceContext& ctx) {
  const Matrix u = random_unitary(n, rng);
  RealVector values(n);
  for (Index k = 0; k < n; ++k) values(k) = top * std::pow(rng.uniform(), 3.0);
  return make_psd(u * values.asDiagonal() * u.adjoint(), ctx);
}

inline NonnegRelation line_relation(const Vector& direction, double value, const ToleranceContext& ctx) {
  const Vector unit = direction / direction.norm();
  return NonnegRelation::from_resolvent(unit * unit.adjoint() / (1.0 + value), ctx);
}

inline Vector real_vector(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index k = 0;
  for (double x : values) v(k++) = x;
  return v;
}

inline CriterionResult parallel_sum_routes(const ToleranceContext& ctx, Rng& rng) {
  Tally tally;
  double worst = 0.0;
  for (int k = 0; k < 300; ++k) {
    const Index n = rng.integer(2, 12);
    const PsdPair pair = rng.uniform() < 0.25 ? PsdPair{random_psd(n, n, rng), random_psd(n, n, rng), n}
                                              : random_singular_pair(n, rng);
    const PsdOperator f = make_psd(pair.first, ctx);
    const PsdOperator g = make_psd(pair.second, ctx);
    const Matrix block = parallel_sum(f, g).matrix();
    const Matrix variational = parallel_sum_variational(f, g).matrix();
    const Matrix limit = parallel_sum_limit(f, g).value.matrix();
    const double d = max_pairwise_distance({&block, &variational, &limit}) / (f.norm() + g.norm());
    worst = std::max(worst, d);
    tally.check(d <= 1e-6, trial(k) + " disagreement " + sci(d));
  }
  return {1, "parallel-sum three-route agreement", tally.ok(), tally.summary("worst relative disagreement " + sci(worst))};
}

inline CriterionResult parallel_sum_rank(const ToleranceContext& ctx, Rng& rng) {
  Tally tally;
  int zeros = 0;
  for (int k = 0; k < 200; ++k) {
    const Index n = rng.integer(2, 10);
    const Index r1 = rng.integer(1, n - 1);
    const Index r2 = rng.integer(1, n - r1);
    const Index common = rng.uniform() < 0.5 ? 0 : rng.integer(0, std::min(r1, r2));
    const PsdPair pair = random_psd_pair(n, r1, r2, common, rng);
    const PsdOperator f = make_psd(pair.first, ctx);
    const PsdOperator g = make_psd(pair.second, ctx);
    const PsdOperator fg = parallel_sum(f, g);
    const Index meet = intersection_dim(range_basis(sqrt_psd(f)), range_basis(sqrt_psd(g)), ctx);
    tally.check(sqrt_psd(fg).rank() == meet && meet == common, trial(k) + " rank mismatch");
    const bool vanishes = fg.norm() <= vanish_tolerance(ctx) * (f.norm() + g.norm());
    const Matrix m = parallel_contraction(f, g);
    const bool idempotent = (m * m - m).norm() <= 1e-7;
    const bool trivial = meet == 0;
    tally.check(vanishes == idempotent && idempotent == trivial, trial(k) + " equivalence broken");
    zeros += vanishes;
  }
  return {2, "parallel-sum rank identity", tally.ok(),
          tally.summary(std::to_string(zeros) + " of 200 pairs with F:G = 0")};
}

inline CriterionResult shorted_routes(const ToleranceContext& ctx, Rng& rng) {
  Tally tally;
  double worst = 0.0;
  double worst_excess = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Index n = rng.integer(2, 8);
    const PsdOperator b = make_psd(random_psd(n, rng.integer(1, n), rng), ctx);
    const Subspace sub = random_subspace(n, rng.integer(1, n - 1), rng);
    const ShortReport report = shorted(b, sub);
    const double scale = b.norm();
    worst = std::max(worst, report.route_disagreement / scale);
    tally.check(report.route_disagreement <= 1e-7 * scale, trial(k) + " routes disagree");
    // Every feasible Z (0 <= Z <= B, ran Z ⊆ K) is B^{1/2} Y B^{1/2} with
    // 0 <= Y <= P_Omega.
    const Subspace omega = omega_subspace(b, sub);
    const Matrix half = sqrt_psd(b).matrix();
    const Matrix& short_k = report.shorted.matrix();
    for (int sample = 0; sample < 100; ++sample) {
      Matrix y = Matrix::Zero(n, n);
      if (omega.dim()) {
        Matrix h = random_psd(omega.dim(), rng.integer(1, omega.dim()), rng);
        h /= std::max(operator_norm(h), 1e-300) * rng.uniform(1.0, 2.0);
        if (rng.uniform() < 0.3) h = identity(omega.dim());
        y = omega.frame() * h * omega.frame().adjoint();
      }
      const Matrix z = hermitian_part(half * y * half);
      const double excess = -loewner_gap(z, short_k);
      worst_excess = std::max(worst_excess, excess / scale);
      tally.check(loewner_le(z, b.matrix(), 1e-10 * scale), trial(k) + " sample outside [0, B]");
      tally.check(excess <= 1e-7 * scale, trial(k) + " feasible Z exceeds the shorted operator");
    }
  }
  return {3, "shorted-operator routes and maximality", tally.ok(),
          tally.summary("worst route disagreement " + sci(worst) + ", worst excess " + sci(worst_excess))};
}

inline CriterionResult finite_witness(const ToleranceContext& ctx) {
  Tally tally;
  const PsdOperator x = make_psd(fixture_matrix("rank1-witness", "X.mat"), ctx);
  const Subspace m = Subspace::span(fixture_matrix("rank1-witness", "M.sub"), ctx);
  const ShortReport on_m = shorted(x, m);
  const ShortReport on_perp = shorted(x, m.complement());
  tally.check(on_m.vanishes, "X_M != 0");
  tally.check(on_perp.vanishes, "X_{M-perp} != 0");
  const Subspace range = range_basis(x);
  tally.check(intersect_trivially(m, range, ctx), "M meets ran X");
  tally.check(intersect_trivially(m.complement(), range, ctx), "M-perp meets ran X");
  return {4, "finite rank-one witness", tally.ok(),
          tally.summary("|X_M| = " + sci(on_m.shorted.norm()) + ", |X_Mperp| = " + sci(on_perp.shorted.norm()))};
}

inline CriterionResult projection_family_checks(const ToleranceContext& ctx) {
  Tally tally;
  const std::vector<double> xs{0.5, 1, 2, 4};
  const PsdOperator a = make_psd(fixture_matrix("pfamily-noncommuting", "A.mat"), ctx);
  const PsdOperator b = make_psd(fixture_matrix("pfamily-noncommuting", "B.mat"), ctx);
  const ProjectionFamily family = projection_family(a, b, xs);
  for (const FamilySample& s : family.samples) {
    tally.check(s.reconstruction <= 1e-9, "reconstruction residual " + sci(s.reconstruction));
    tally.check(s.projection_defect <= 1e-8, "projection defect " + sci(s.projection_defect));
  }
  const double spread = (family.samples[1].projection - family.samples[2].projection).norm();
  tally.check(spread > 1e-3, "P(1) and P(2) coincide");

  const PsdOperator ca = make_psd(fixture_matrix("pfamily-commuting", "A.mat"), ctx);
  const PsdOperator cb = make_psd(fixture_matrix("pfamily-commuting", "B.mat"), ctx);
  const ProjectionFamily constant = projection_family(ca, cb, xs);
  double drift = 0.0;
  for (const FamilySample& s : constant.samples)
    drift = std::max(drift, (s.projection - constant.samples.front().projection).norm());
  tally.check(drift <= 1e-14, "commuting family drifts by " + sci(drift));

  double law = 0.0;
  for (auto [x, y] : {std::pair{0.5, 1.0}, std::pair{1.0, 2.0}, std::pair{0.1, 7.0}}) {
    const IntertwinerReport r = intertwiner(a, b, x, y);
    law = std::max(law, r.law_residual);
    tally.check(r.law_residual <= 1e-8, "intertwiner law residual " + sci(r.law_residual));
    tally.check(r.scaling_deviation <= 1e-6, "restricted singular values off by " + sci(r.scaling_deviation));
    tally.check(r.restricted_singular_values.size() > 0, "no restricted singular values");
  }
  return {5, "P(x) family", tally.ok(),
          tally.summary("|P(1)-P(2)| = " + sci(spread) + ", commuting drift " + sci(drift) + ", law " + sci(law))};
}

inline CriterionResult chain_decay(const ToleranceContext& ctx) {
  Tally tally;
  const PsdOperator a = make_psd(fixture_matrix("chain-diag14", "A.mat"), ctx);
  const Subspace m = Subspace::span(fixture_matrix("chain-diag14", "M.sub"), ctx);
  const ChainReport report = chain(a, m, 20);
  const double first = report.steps.front().norm;
  double worst = 0.0;
  for (std::size_t k = 0; k < report.steps.size(); ++k) {
    const double expected = std::pow(0.9, static_cast<double>(k)) * first;
    const double rel = std::abs(report.steps[k].norm / expected - 1.0);
    worst = std::max(worst, rel);
    tally.check(rel <= 1e-6, "step " + std::to_string(k + 1) + " off by " + sci(rel));
    tally.check(report.steps[k].p_decreasing, "P_" + std::to_string(k + 1) + " not inside P_" + std::to_string(k));
  }
  tally.check(std::abs(first - 2.5) <= 1e-12, "|A_1| = " + sci(first));
  return {6, "chain decay", tally.ok(), tally.summary("worst relative deviation " + sci(worst))};
}

inline CriterionResult resolvent_sum(const ToleranceContext& ctx, Rng& rng) {
  Tally tally;
  double sum = 0.0, orth = 0.0, form = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Index n = rng.integer(2, 12);
    const PsdOperator t = spread_psd(n, std::pow(10.0, rng.uniform(0.0, 4.0)), rng, ctx);
    const Subspace m = random_subspace(n, rng.integer(1, n - 1), rng);
    const PairSplit s = split_pair(t, m, 20, rng.next_seed());
    sum = std::max(sum, s.resolvent_sum_residual);
    orth = std::max(orth, s.graph_orthogonality);
    form = std::max(form, s.form_defect);
    tally.check(s.resolvent_sum_residual <= 1e-12, trial(k) + " resolvent sum " + sci(s.resolvent_sum_residual));
    tally.check(s.graph_orthogonality <= 1e-8, trial(k) + " graph orthogonality " + sci(s.graph_orthogonality));
    tally.check(s.form_defect <= 1e-8, trial(k) + " form defect " + sci(s.form_defect));
    tally.check(s.domains_match && s.domains_disjoint && s.domains_span, trial(k) + " form domains wrong");
  }
  return {7, "resolvent-sum identity", tally.ok(),
          tally.summary("worst sum " + sci(sum) + ", orthogonality " + sci(orth) + ", form " + sci(form))};
}

inline CriterionResult euler_rate(const ToleranceContext& ctx) {
  Tally tally;
  const NonnegRelation scalar = from_operator(make_psd(fixture_matrix("euler-scalar", "T.mat"), ctx));
  Matrix coupled(2, 2);
  coupled << 2.0, 1.0, 1.0, 1.0;
  const NonnegRelation pair = from_operator(make_psd(coupled, ctx));
  const Scalar rotated = std::polar(1.0, M_PI / 4);
  std::string slopes;
  for (const auto& [name, rel, z] : {std::tuple{"scalar", &scalar, Scalar(1.0)}, std::tuple{"scalar/pi4", &scalar, rotated},
                                     std::tuple{"2x2", &pair, Scalar(1.0)}, std::tuple{"2x2/pi4", &pair, rotated}}) {
    const EulerSweep sweep = euler_sweep(*rel, z);
    const double slope = sweep.slope.value_or(0.0);
    tally.check(sweep.rate_ok, std::string(name) + " slope " + sci(slope));
    slopes += std::string(slopes.empty() ? "" : ", ") + name + " " + sci(slope);
  }
  return {8, "Euler rate", tally.ok(), tally.summary("slopes " + slopes)};
}

inline CriterionResult trotter_vanishing(const ToleranceContext& ctx, Rng& rng) {
  Tally tally;
  double worst_norm = 0.0;
  for (double angle : {M_PI / 8, M_PI / 6, M_PI / 4, M_PI / 3, M_PI / 2}) {
    const NonnegRelation a = line_relation(real_vector({1, 0}), rng.uniform(0.0, 3.0), ctx);
    const NonnegRelation b = line_relation(real_vector({std::cos(angle), std::sin(angle)}), rng.uniform(0.0, 3.0), ctx);
    const TrotterSweep sweep = trotter_sweep(a, b, 1.0);
    worst_norm = std::max(worst_norm, sweep.norms.back());
    tally.check(sweep.vanishing, "form domains at angle " + sci(angle) + " not disjoint");
    tally.check(sweep.norms.back() <= 1e-3, "norm " + sci(sweep.norms.back()) + " at angle " + sci(angle));
  }
  const NonnegRelation r1 = NonnegRelation::from_resolvent(fixture_matrix("trotter-eighth", "T1.rel"), ctx);
  const NonnegRelation r2 = NonnegRelation::from_resolvent(fixture_matrix("trotter-eighth", "T2.rel"), ctx);
  const TrotterSweep eighth = trotter_sweep(r1, r2, 1.0);
  worst_norm = std::max(worst_norm, eighth.norms.back());
  tally.check(eighth.norms.back() <= 1e-3, "fixture norm " + sci(eighth.norms.back()));
  double worst_final = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Index n = rng.integer(2, 6);
    const PsdOperator t = make_psd(random_psd(n, n, rng), ctx);
    const PairSplit s = split_pair(t, random_subspace(n, rng.integer(1, n - 1), rng), 0);
    const TrotterSweep sweep = trotter_sweep(from_operator(t), s.rel1, 1.0);
    const Matrix expected = s.rel1.operator_frame() *
                            (-2.0 * s.rel1.operator_values()).array().exp().matrix().asDiagonal() *
                            s.rel1.operator_frame().adjoint();
    const double limit_gap = (sweep.limit - expected).norm();
    worst_final = std::max(worst_final, sweep.distances.back());
    tally.check(sweep.nested, trial(k) + " domains not nested");
    tally.check(limit_gap <= 1e-9, trial(k) + " limit differs from exp(-2tT1) by " + sci(limit_gap));
    tally.check(sweep.decreasing, trial(k) + " distance not decreasing");
  }
  return {9, "Trotter vanishing", tally.ok(),
          tally.summary("worst norm at n=256 " + sci(worst_norm) + ", worst nested distance " + sci(worst_final))};
}

inline CriterionResult extension_sandwich(const ToleranceContext& ctx, Rng& rng) {
  Tally tally;
  double left = 0.0, right = 0.0;
  auto run = [&](const Matrix& l2, const Subspace& d, const std::string& label) {
    const ExtensionReport r = extension_sandwich_check(l2, d, 100, rng.next_seed(), 1.0, ctx);
    left = std::min(left, r.worst_left_gap);
    right = std::min(right, r.worst_right_gap);
    tally.check(r.pass, label + " sandwich fails (" + sci(r.worst_left_gap) + ", " + sci(r.worst_right_gap) + ")");
  };
  run(fixture_matrix("divext-axis", "L2.mat"), Subspace::span(fixture_matrix("divext-axis", "D.sub"), ctx), "axis");
  for (int k = 0; k < 10; ++k) {
    const Index n = rng.integer(2, 6);
    const Matrix l2 = random_gaussian(rng.integer(n, n + 2), n, rng);
    run(l2, random_subspace(n, rng.integer(1, n - 1), rng), trial(k));
  }
  double krein_worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Index n = rng.integer(2, 8);
    Matrix b = random_hermitian(n, rng);
    if (hermitian_eigensystem(b).values.cwiseAbs().minCoeff() < 0.05) b += 0.5 * identity(n);
    const ProductPairReport r = product_pair(b, random_subspace(n, rng.integer(1, n - 1), rng), ctx);
    krein_worst = std::max(krein_worst, r.krein_residual);
    tally.check(r.krein_residual <= 1e-8, trial(k) + " Krein residual " + sci(r.krein_residual));
  }
  return {10, "extension sandwich", tally.ok(),
          tally.summary("worst gaps " + sci(left) + ", " + sci(right) + ", Krein residual " + sci(krein_worst))};
}

inline bool same_flags(const LiftingConditions& a, const LiftingConditions& b) {
  return a.ranges_disjoint == b.ranges_disjoint && a.v_in_root_w == b.v_in_root_w && a.w_in_root_v == b.w_in_root_v &&
         a.admits_lifting == b.admits_lifting && a.admits_complement_lifting == b.admits_complement_lifting &&
         a.admits_both == b.admits_both;
}

inline CriterionResult lifting_lab(const ToleranceContext& ctx, Rng& rng) {
  Tally tally;
  int disjoint = 0;
  for (int k = 0; k < 100; ++k) {
    const PsdPair pair = random_singular_pair(rng.integer(2, 8), rng);
    const double c = std::exp(rng.uniform(-5.0, 5.0));
    const LiftingConditions base = classify_conditions(make_psd(pair.first, ctx), make_psd(pair.second, ctx));
    const LiftingConditions scaled =
        classify_conditions(make_psd(c * pair.first, ctx), make_psd(c * pair.second, ctx));
    tally.check(same_flags(base, scaled), trial(k) + " flags change under scaling");
    tally.check(base.ranges_disjoint == (pair.common == 0), trial(k) + " range intersection misjudged");
    disjoint += base.ranges_disjoint;
  }
  const std::vector<double> grid{0.5, 1, 1.5, 2, 3};
  int bounded = 0;
  for (double a : grid) {
    for (double b : grid) {
      const TruncationReport r = truncation_diagnostic({default_truncation_sizes(), a, b});
      tally.check(r.agree, "a=" + sci(a) + " b=" + sci(b) + " slope " + sci(r.slope));
      bounded += r.numeric_bounded;
    }
  }
  return {11, "lifting criterion and truncation lab", tally.ok(),
          tally.summary(std::to_string(disjoint) + " disjoint pairs, " + std::to_string(bounded) + " of 25 bounded")};
}

inline CriterionResult douglas_equivalence(const ToleranceContext& ctx, Rng& rng) {
  Tally tally;
  int included = 0;
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Index n = rng.integer(2, 10);
    const Matrix b = rank_deficient(n, n, rng.integer(1, n), rng);
    const Matrix a = rng.uniform() < 0.5 ? Matrix(b * random_gaussian(n, n, rng))
                                         : rank_deficient(n, n, rng.integer(1, n), rng);
    const RangeInclusion inc = range_inclusion(a, b, ctx);
    bool factors = true;
    try {
      const DouglasFactor d = douglas_solve(a, b, ctx);
      const double residual = (b * d.factor - a).norm() / std::max(1.0, a.norm());
      worst = std::max(worst, residual);
      tally.check(residual <= 1e-8, trial(k) + " round trip " + sci(residual));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoFactorization) throw;
      factors = false;
    }
    tally.check(inc.included == factors, trial(k) + " inclusion and factorization disagree");
    tally.check(inc.included == majorized(a, b, inc.lambda), trial(k) + " inclusion and majorization disagree");
    included += inc.included;
  }
  return {12, "Douglas equivalence", tally.ok(),
          tally.summary(std::to_string(included) + " of 200 included, worst round trip " + sci(worst))};
}

}  // namespace detail

inline std::vector<CriterionResult> run_acceptance(const ToleranceContext& ctx = {}, std::uint64_t seed = 1) {
  ctx.validate();
  using Check = std::function<CriterionResult(Rng&)>;
  const std::vector<std::pair<std::string, Check>> checks{
      {"parallel-sum three-route agreement", [&](Rng& r) { return detail::parallel_sum_routes(ctx, r); }},
      {"parallel-sum rank identity", [&](Rng& r) { return detail::parallel_sum_rank(ctx, r); }},
      {"shorted-operator routes and maximality", [&](Rng& r) { return detail::shorted_routes(ctx, r); }},
      {"finite rank-one witness", [&](Rng&) { return detail::finite_witness(ctx); }},
      {"P(x) family", [&](Rng&) { return detail::projection_family_checks(ctx); }},
      {"chain decay", [&](Rng&) { return detail::chain_decay(ctx); }},
      {"resolvent-sum identity", [&](Rng& r) { return detail::resolvent_sum(ctx, r); }},
      {"Euler rate", [&](Rng&) { return detail::euler_rate(ctx); }},
      {"Trotter vanishing", [&](Rng& r) { return detail::trotter_vanishing(ctx, r); }},
      {"extension sandwich", [&](Rng& r) { return detail::extension_sandwich(ctx, r); }},
      {"lifting criterion and truncation lab", [&](Rng& r) { return detail::lifting_lab(ctx, r); }},
      {"Douglas equivalence", [&](Rng& r) { return detail::douglas_equivalence(ctx, r); }},
  };
  std::vector<CriterionResult> out;
  Rng seeds(seed);
  for (std::size_t k = 0; k < checks.size(); ++k) {
    Rng rng(seeds.next_seed());
    const int id = static_cast<int>(k) + 1;
    try {
      out.push_back(checks[k].second(rng));
    } catch (const Error& e) {
      out.push_back({id, checks[k].first, false, std::string("raised ") + e.what()});
    }
  }
  return out;
}

}  // namespace oprange
