#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace arveson;
using boost::multiprecision::cpp_rational;

namespace {

InterpolationSpec points_spec(const std::vector<Point>& pts, const std::vector<Mat>& xs) {
  InterpolationSpec s;
  s.variant = InterpolationSpec::Variant::points;
  s.d = static_cast<int>(pts.front().size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    InterpolationCondition c;
    c.omega = pts[i];
    c.x = xs[i];
    s.conditions.push_back(c);
  }
  return s;
}

InterpolationSpec hom3_spec() {
  InterpolationSpec s;
  s.variant = InterpolationSpec::Variant::lower_inclusive;
  s.d = 2;
  s.omega = Point::Zero(2);
  for (const MultiIndex& n : {MultiIndex{0, 0}, MultiIndex{1, 0}, MultiIndex{0, 1}}) {
    InterpolationCondition c;
    c.index = n;
    c.x = Mat::Ones(1, 1);
    s.conditions.push_back(c);
  }
  return s;
}

Mat one() { return Mat::Ones(1, 1); }

// b_a(z) = (1 - |a|^2)^{1/2} (1 - <z, a>)^{-1} (z - a)(I - a^* a)^{-1/2}
Mat blaschke_closed_form(const Point& a, const Point& z) {
  const Eigen::Index d = a.size();
  const Mat arow = a.transpose();
  const Mat zrow = z.transpose();
  const Mat inv_root = psd_inv_sqrt(Mat::Identity(d, d) - arow.adjoint() * arow);
  const Scalar s = std::sqrt(1.0 - a.squaredNorm()) / (1.0 - (zrow * arow.adjoint())(0, 0));
  return s * (zrow - arow) * inv_root;
}

// Cofactor expansion over exact rationals.
cpp_rational det_oracle(std::vector<std::vector<cpp_rational>> m) {
  const std::size_t n = m.size();
  if (n == 1) return m[0][0];
  cpp_rational acc = 0;
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::vector<cpp_rational>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<cpp_rational> row;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != c) row.push_back(m[r][k]);
      }
      minor.push_back(row);
    }
    const cpp_rational term = m[0][c] * det_oracle(minor);
    acc += (c % 2 == 0) ? term : cpp_rational(-term);
  }
  return acc;
}

}  // namespace

TEST(BuildPair, SinglePointAtOrigin) {
  const OutputPair pr = build_pair(points_spec({Point::Zero(2)}, {one()}));
  ASSERT_EQ(pr.A.size(), 2u);
  EXPECT_EQ(pr.A[0].rows(), 1);
  EXPECT_LT(pr.A[0].norm() + pr.A[1].norm(), 1e-15);
  EXPECT_EQ(pr.C(0, 0), Scalar(1.0));
}

TEST(BuildPair, TwoPoints) {
  const OutputPair pr = build_pair(points_spec({fixtures::pt(0.5, 0), fixtures::pt(0, 0.5)}, {one(), one()}));
  Mat a1 = Mat::Zero(2, 2), a2 = Mat::Zero(2, 2);
  a1(0, 0) = 0.5;
  a2(1, 1) = 0.5;
  EXPECT_LT((pr.A[0].adjoint() - a1).norm(), 1e-15);
  EXPECT_LT((pr.A[1].adjoint() - a2).norm(), 1e-15);
  EXPECT_LT((pr.C.adjoint() - Mat::Ones(2, 1)).norm(), 1e-15);
}

TEST(BuildPair, LowerInclusiveShiftPattern) {
  const OutputPair pr = build_pair(hom3_spec());
  for (int j = 0; j < 2; ++j) {
    const Mat astar = pr.A[j].adjoint();
    EXPECT_NEAR(astar.cwiseAbs().sum(), 1.0, 1e-15);
    EXPECT_EQ(astar(j + 1, 0), Scalar(1.0));  // row n + e_j, column n = 0
  }
  EXPECT_LT(pr.max_commutator(), 1e-15);
  // annihilated polynomials vanish to second order at the origin
  EXPECT_LT(annihilator_residual(pr, TruncatedSeries::monomial(2, 2, {1, 1}, one())).norm(), 1e-15);
  EXPECT_GT(annihilator_residual(pr, TruncatedSeries::variable(2, 2, 1)).norm(), 0.5);
}

TEST(BuildPair, JetChainIsLowerBidiagonal) {
  InterpolationSpec s;
  s.variant = InterpolationSpec::Variant::jet_chain;
  s.d = 2;
  s.omega = fixtures::pt(0.2, -0.1);
  for (int i = 0; i < 3; ++i) s.conditions.push_back({Point(), one(), MultiIndex()});
  const OutputPair pr = build_pair(s);
  const Mat astar = pr.A[0].adjoint();
  EXPECT_EQ(astar(1, 0), Scalar(1.0));
  EXPECT_EQ(astar(2, 1), Scalar(1.0));
  EXPECT_EQ(astar(0, 0), Scalar(0.2));
  EXPECT_EQ(astar(0, 1), Scalar(0.0));
}

TEST(BuildPair, Errors) {
  EXPECT_THROW(build_pair(points_spec({fixtures::pt(0.8, 0.8)}, {one()})), OutsideBall);
  InterpolationSpec s = hom3_spec();
  s.conditions[1].index = MultiIndex{2, 0};
  EXPECT_THROW(build_pair(s), ShapeError);
}

TEST(CholeskyComplete, PointAtOriginGivesZRow) {
  const Colligation col = cholesky_complete(build_pair(points_spec({Point::Zero(2)}, {one()})));
  EXPECT_EQ(col.q(), 2);
  Rng rng(1);
  for (int t = 0; t < 5; ++t) {
    const Point l = random_ball_point(rng, 2, 0.9);
    EXPECT_LT((transfer_eval(col, l) - Mat(l.transpose())).norm(), 1e-14);
  }
}

TEST(CholeskyComplete, QuadraticInnerPairRankFromEigenCount) {
  const OutputPair pr = fixtures::quadratic_inner().pair();
  const Mat v = pr.stacked();
  const RealVec ev = Eigen::SelfAdjointEigenSolver<Mat>(Mat::Identity(7, 7) - v * v.adjoint()).eigenvalues();
  const Eigen::Index oracle_rank = (ev.array() > 1e-10).count();
  const Colligation col = cholesky_complete(pr);
  EXPECT_EQ(col.q(), oracle_rank);
  EXPECT_LE(structure_report(col).coisometry_residual, 1e-10);
  Rng rng(2);
  for (int t = 0; t < 10; ++t) {
    const Point l = random_ball_point(rng, 2, 0.7), z = random_ball_point(rng, 2, 0.7);
    EXPECT_LT(std::abs(kernel_KS(evaluator_of(col), l, z)(0, 0) - (1.0 + ball_inner(l, z))), 1e-12);
  }
}

TEST(CholeskyComplete, ZeroPair) {
  const OutputPair pr(Mat::Zero(1, 2), {Mat::Zero(2, 2), Mat::Zero(2, 2)});
  const Colligation col = cholesky_complete(pr);
  EXPECT_EQ(col.q(), 5);
  EXPECT_TRUE(structure_report(col).coisometric);
  EXPECT_FALSE(structure_report(col).isometric);
}

TEST(CholeskyComplete, RejectsExpansivePair) {
  const OutputPair pr(Mat::Constant(1, 1, 2.0), {Mat::Zero(1, 1)});
  EXPECT_THROW(cholesky_complete(pr), NotContractive);
}

TEST(Pipeline, SinglePointAtOrigin) {
  const PipelineResult res = representer_pipeline(points_spec({Point::Zero(2)}, {one()}));
  EXPECT_TRUE(res.inner.inner);
  EXPECT_LE(res.membership_residual, 1e-10);
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const Point l = random_ball_point(rng, 2, 0.7), z = random_ball_point(rng, 2, 0.7);
    const Mat sl = transfer_eval(res.col, l), sz = transfer_eval(res.col, z);
    EXPECT_LT(std::abs((sl * sz.adjoint())(0, 0) - ball_inner(l, z)), 1e-10);
  }
}

TEST(Pipeline, LowerInclusiveReproducesQuadraticInnerKernel) {
  const PipelineResult res = representer_pipeline(hom3_spec());
  EXPECT_TRUE(res.inner.inner);
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const Point l = random_ball_point(rng, 2, 0.7), z = random_ball_point(rng, 2, 0.7);
    EXPECT_LT(std::abs(kernel_KS(evaluator_of(res.col), l, z)(0, 0) - (1.0 + ball_inner(l, z))), 1e-9);
  }
}

TEST(Pipeline, OffOriginPointIsRenormalizedAndCertified) {
  const PipelineResult res = representer_pipeline(points_spec({fixtures::pt(0.5, 0)}, {one()}));
  EXPECT_TRUE(res.renormalized);
  EXPECT_TRUE(res.inner.inner) << res.inner.reason;
  EXPECT_LE(res.membership_residual, 1e-10);
}

TEST(Pipeline, RenormalizationCanBeDisabled) {
  EXPECT_THROW(representer_pipeline(points_spec({fixtures::pt(0.5, 0)}, {one()}), kDefaultTol, false),
               PreconditionError);
}

TEST(Pipeline, SoundnessOnRandomSpecs) {
  Rng rng(5);
  for (int trial = 0; trial < 6; ++trial) {
    const int n = 1 + trial % 3;
    std::vector<Point> pts;
    std::vector<Mat> xs;
    for (int i = 0; i < n; ++i) {
      pts.push_back(random_ball_point(rng, 2, 0.5));
      xs.push_back(random_gaussian(rng, 1, 2));
    }
    const PipelineResult res = representer_pipeline(points_spec(pts, xs));
    EXPECT_LE(res.membership_residual, 1e-9) << trial;
    EXPECT_LE(res.col.pair().max_commutator(), 1e-12) << trial;
    EXPECT_LE(res.structure.coisometry_residual, 1e-10) << trial;
    EXPECT_TRUE(res.inner.inner) << trial << ": " << res.inner.reason;
  }
}

TEST(InnerCertify, QuadraticInner) {
  const InnerVerdict v = inner_certify(fixtures::quadratic_inner());
  EXPECT_TRUE(v.inner) << v.reason;
  EXPECT_TRUE(v.polynomial);
  EXPECT_TRUE(v.partial_isometry_checked);
  EXPECT_LE(v.partial_isometry_defect, 1e-10);
}

TEST(InnerCertify, TwistedU0IsNotCertified) {
  const InnerVerdict v = inner_certify(fixtures::twisted_u0());
  EXPECT_FALSE(v.inner);
  EXPECT_FALSE(v.isometric_pair);
  EXPECT_GT(v.partial_isometry_defect, 1e-3);
}

TEST(InnerCertify, NonCommutingTupleReported) {
  const OutputPair pr = fixtures::twisted_pair(0.5);
  const Colligation col(pr.A, {Mat::Zero(3, 1), Mat::Zero(3, 1)}, pr.C, Mat::Zero(1, 1));
  const InnerVerdict v = inner_certify(col);
  EXPECT_FALSE(v.commutative);
  EXPECT_NE(v.reason.find("commute"), std::string::npos);
}

TEST(Blaschke, OriginIsZRow) {
  const Colligation b = blaschke(Point::Zero(2));
  EXPECT_LT((transfer_eval(b, fixtures::pt(0.3, -0.2)) - Mat(fixtures::pt(0.3, -0.2).transpose())).norm(), 1e-15);
}

TEST(Blaschke, VanishesAtAAndIsUnitary) {
  const Point a = fixtures::pt(0.3, 0.4);
  const Colligation b = blaschke(a);
  EXPECT_LE(norm2(transfer_eval(b, a)), 1e-12);
  EXPECT_LE(structure_report(b).isometry_residual, 1e-12);
}

TEST(Blaschke, ScalarClosedForm) {
  Point a(1);
  a << 0.5;
  const Colligation b = blaschke(a);
  Rng rng(6);
  for (int t = 0; t < 10; ++t) {
    const Point l = random_ball_point(rng, 1, 0.95);
    EXPECT_LT(std::abs(transfer_eval(b, l)(0, 0) - (l(0) - 0.5) / (1.0 - 0.5 * l(0))), 1e-13);
  }
}

TEST(Blaschke, RandomPointsAgainstClosedForm) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 1 + trial % 4;
    const Point a = random_ball_point(rng, d, 0.9);
    const Colligation b = blaschke(a);
    const StructureReport sr = structure_report(b, 1e-12);
    EXPECT_TRUE(sr.unitary);
    EXPECT_LE(norm2(transfer_eval(b, a)), 1e-12);
    const Point z = random_ball_point(rng, d, 0.9);
    EXPECT_LT((transfer_eval(b, z) - blaschke_closed_form(a, z)).norm(), 1e-12);
  }
  for (int trial = 0; trial < 5; ++trial) EXPECT_TRUE(inner_certify(blaschke(random_ball_point(rng, 2, 0.9))).inner);
}

TEST(Blaschke, RejectsBoundary) { EXPECT_THROW(blaschke(fixtures::pt(0.6, 0.8)), OutsideBall); }

TEST(Hankel, SmallCases) {
  const auto rows = hankel_probe(1);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].rank, 1);
  EXPECT_EQ(rows[0].det, cpp_rational(1));
  EXPECT_EQ(rows[1].rank, 2);
  EXPECT_EQ(rows[1].det, cpp_rational(7, 45));
}

TEST(Hankel, FullRankThroughEight) {
  const auto rows = hankel_probe(8);
  ASSERT_EQ(rows.size(), 9u);
  for (const HankelRow& r : rows) EXPECT_TRUE(r.full_rank()) << r.n;
}

TEST(Hankel, DeterminantsMatchCofactorOracle) {
  const auto rows = hankel_probe(5);
  for (const HankelRow& r : rows) {
    std::vector<std::vector<cpp_rational>> h(static_cast<std::size_t>(r.n + 1));
    for (int i = 0; i <= r.n; ++i) {
      for (int j = 0; j <= r.n; ++j) h[i].push_back(cpp_rational(i + j + 1, 2 * (i + j) + 1));
    }
    EXPECT_EQ(r.det, det_oracle(h)) << r.n;
  }
}

TEST(Hankel, BoundEnforced) {
  EXPECT_THROW(hankel_probe(kHankelMaxN + 1), PreconditionError);
  EXPECT_THROW(hankel_probe(-1), PreconditionError);
}
