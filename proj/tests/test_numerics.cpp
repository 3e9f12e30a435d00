#include "pirep/errors.hpp"
#include "pirep/numerics.hpp"
#include "pirep/random.hpp"
#include "pirep/subspace.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace pirep;
using pirep::testing::diag;
using pirep::testing::diff;
using pirep::testing::mat;

namespace {

const Tolerance tol;

double penrose_residual(const CMatrix& m, const CMatrix& p)
{
    const double r1 = op_norm(m * p * m - m);
    const double r2 = op_norm(p * m * p - p);
    const double r3 = op_norm((m * p).adjoint() - m * p);
    const double r4 = op_norm((p * m).adjoint() - p * m);
    return std::max({r1, r2, r3, r4});
}

CMatrix rank_deficient(Rng& rng, Index rows, Index cols, Index rank)
{
    return rng.gaussian(rows, rank) * rng.gaussian(rank, cols);
}

} // namespace

TEST(Pseudoinverse, IdentityIsItsOwnInverse)
{
    EXPECT_LT(diff(pseudoinverse(CMatrix::Identity(3, 3), tol), CMatrix::Identity(3, 3)), 1e-14);
}

TEST(Pseudoinverse, InvertsOnTheSupport)
{
    EXPECT_LT(diff(pseudoinverse(diag({2.0, 0.0}), tol), diag({0.5, 0.0})), 1e-14);
}

TEST(Pseudoinverse, RandomMatrixSatisfiesPenroseEquations)
{
    Rng rng(7);
    const CMatrix m = rng.gaussian(4, 3);
    EXPECT_LE(penrose_residual(m, pseudoinverse(m, tol)), 1e-10 * op_norm(m));
}

TEST(Pseudoinverse, IsAnInvolution)
{
    Rng rng(21);
    for (int t = 0; t < 50; ++t) {
        const Index r = rng.integer(1, 7);
        const Index c = rng.integer(1, 7);
        const CMatrix m = rank_deficient(rng, r, c, rng.integer(0, std::min(r, c)));
        const CMatrix back = pseudoinverse(pseudoinverse(m, tol), tol);
        EXPECT_LE(op_norm(back - m), tol.eq_rel * std::max(1.0, op_norm(m)));
    }
}

TEST(Pseudoinverse, RejectsNonFiniteInput)
{
    CMatrix m = CMatrix::Identity(2, 2);
    m(0, 1) = std::nan("");
    EXPECT_THROW(pseudoinverse(m, tol), Error);
}

TEST(Projectors, ZeroOperator)
{
    const CMatrix z = CMatrix::Zero(2, 2);
    EXPECT_LT(diff(range_projector(z, tol), z), 1e-15);
    EXPECT_LT(diff(kernel_projector(z, tol), CMatrix::Identity(2, 2)), 1e-15);
}

TEST(Projectors, RankOneNilpotent)
{
    const CMatrix m = mat(2, 2, {0, 1, 0, 0});
    EXPECT_LT(diff(range_projector(m, tol), diag({1, 0})), 1e-14);
    EXPECT_LT(diff(kernel_projector(m, tol), diag({1, 0})), 1e-14);
}

TEST(Projectors, RandomRankTwoProjectorsAreOrthogonalProjections)
{
    Rng rng(11);
    const CMatrix m = rank_deficient(rng, 5, 5, 2);
    for (const CMatrix& p : {range_projector(m, tol), kernel_projector(m, tol)}) {
        EXPECT_LE(op_norm(p * p - p), 1e-10);
        EXPECT_LE(op_norm(p - p.adjoint()), 1e-10);
    }
    EXPECT_LE(op_norm(range_projector(m, tol) - m * pseudoinverse(m, tol)), tol.eq_rel);
    EXPECT_EQ(numerical_rank(m, tol), 2);
}

TEST(Projectors, RangeAndCokernelAreComplementary)
{
    Rng rng(12);
    for (int t = 0; t < 50; ++t) {
        const Index r = rng.integer(1, 8);
        const Index c = rng.integer(1, 8);
        const CMatrix m = rank_deficient(rng, r, c, rng.integer(0, std::min(r, c)));
        const CMatrix sum = range_projector(m, tol) + kernel_projector(m.adjoint(), tol);
        EXPECT_LE(op_norm(sum - CMatrix::Identity(r, r)), tol.eq_rel);
    }
}

TEST(PsdSqrt, Examples)
{
    EXPECT_LT(diff(psd_sqrt(CMatrix::Identity(3, 3), tol), CMatrix::Identity(3, 3)), 1e-14);
    EXPECT_LT(diff(psd_sqrt(diag({4, 0}), tol), diag({2, 0})), 1e-14);

    const double h = 1.0 / std::sqrt(2.0);
    const CMatrix v = mat(2, 2, {h, 0, h, 0});
    const CMatrix d = CMatrix::Identity(2, 2) - v * v.adjoint();
    const CMatrix s = psd_sqrt(d, tol);
    EXPECT_LE(op_norm(s * s - d), 1e-10);
    EXPECT_LE(op_norm(s - s.adjoint()), 1e-14);
}

TEST(PsdSqrt, ClampsDustAndRejectsNegativeSpectrum)
{
    const CMatrix dust = diag({1.0, -1e-12});
    const CMatrix s = psd_sqrt(dust, tol);
    EXPECT_NEAR(s(1, 1).real(), 0.0, 1e-15);
    try {
        psd_sqrt(diag({1.0, -0.5}), tol);
        FAIL() << "expected a domain error";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::domain);
    }
}

TEST(Subspaces, IntersectionOfCoordinateSpans)
{
    const CMatrix id = CMatrix::Identity(3, 3);
    const Subspace a = Subspace::span_of(id.leftCols(2), tol);
    const Subspace b = Subspace::span_of(id.rightCols(2), tol);
    const Subspace c = intersect(a, b, tol);
    ASSERT_EQ(c.dim(), 1);
    EXPECT_LT(diff(c.projector(), diag({0, 1, 0})), 1e-12);
}

TEST(Subspaces, OminusWholeByZero)
{
    const Subspace w = ominus(Subspace::whole(4), Subspace::zero(4), tol);
    EXPECT_EQ(w.dim(), 4);
}

TEST(Subspaces, IntersectionAgreesWithAlternatingProjections)
{
    Rng rng(3);
    // Two random 3-dimensional subspaces of C^6 sharing one direction.
    const CMatrix shared = rng.gaussian(6, 1);
    CMatrix a(6, 3);
    CMatrix b(6, 3);
    a << shared, rng.gaussian(6, 2);
    b << shared, rng.gaussian(6, 2);
    const Subspace sa = Subspace::span_of(a, tol);
    const Subspace sb = Subspace::span_of(b, tol);
    const Subspace both = intersect(sa, sb, tol);
    ASSERT_EQ(both.dim(), 1);
    // 2^14 > 10^4 alternating steps.
    const CMatrix oracle = pirep::testing::alternating_projection_limit(sa.projector(), sb.projector(), 14);
    EXPECT_LE(op_norm(both.projector() - oracle), 1e-8);
}

TEST(Subspaces, ImageAndInclusion)
{
    const CMatrix m = mat(2, 2, {0, 1, 0, 0});
    const Subspace img = image(m, Subspace::whole(2), tol);
    EXPECT_EQ(img.dim(), 1);
    EXPECT_TRUE(is_subset(img, Subspace::span_of(pirep::testing::basis_vector(2, 0), tol), tol));
    EXPECT_FALSE(is_subset(Subspace::whole(2), img, tol));
}

TEST(Subspaces, InclusionIsAPartialOrder)
{
    Rng rng(31);
    for (int t = 0; t < 40; ++t) {
        const Index n = rng.integer(2, 7);
        const CMatrix base = rng.gaussian(n, n);
        const Index k1 = rng.integer(0, n);
        const Index k2 = rng.integer(k1, n);
        const Index k3 = rng.integer(k2, n);
        const Subspace a = Subspace::span_of(base.leftCols(k1), tol);
        const Subspace b = Subspace::span_of(base.leftCols(k2), tol);
        const Subspace c = Subspace::span_of(base.leftCols(k3), tol);
        const Subspace r = Subspace::span_of(rng.gaussian(n, rng.integer(0, n)), tol);
        for (const Subspace* s : {&a, &b, &c, &r})
            EXPECT_TRUE(is_subset(*s, *s, tol));
        EXPECT_TRUE(is_subset(a, b, tol));
        EXPECT_TRUE(is_subset(b, c, tol));
        EXPECT_TRUE(is_subset(a, c, tol));
        if (is_subset(r, b, tol) && is_subset(b, c, tol))
            EXPECT_TRUE(is_subset(r, c, tol));
    }
}

TEST(Subspaces, EmptyFramesAreAccepted)
{
    const Subspace z = Subspace::zero(3);
    const Subspace w = Subspace::whole(3);
    EXPECT_EQ(intersect(z, w, tol).dim(), 0);
    EXPECT_EQ(ortho_complement(z).dim(), 3);
    EXPECT_EQ(join(z, z, tol).dim(), 0);
    EXPECT_TRUE(is_subset(z, w, tol));
    EXPECT_EQ(ominus(w, w, tol).dim(), 0);
}

TEST(Subspaces, ErrorsForMismatchedOrNonNestedInput)
{
    try {
        intersect(Subspace::whole(2), Subspace::whole(3), tol);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::dimension);
    }
    const CMatrix id = CMatrix::Identity(2, 2);
    try {
        ominus(Subspace::span_of(id.col(0), tol), Subspace::span_of(id.col(1), tol), tol);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::domain);
    }
}

TEST(Predicates, Examples)
{
    EXPECT_TRUE(is_partial_isometry(mat(2, 2, {0, 1, 0, 0}), tol));
    EXPECT_FALSE(is_partial_isometry(0.5 * CMatrix::Identity(2, 2), tol));
    const double h = 1.0 / std::sqrt(2.0);
    const CMatrix v = mat(2, 2, {h, 0, h, 0});
    EXPECT_TRUE(is_partial_isometry(v, tol));
    // Oracle: the singular values of v are {1, 0}.
    const SvdResult svd = thin_svd(v, tol);
    EXPECT_NEAR(svd.s(0), 1.0, 1e-14);
    EXPECT_NEAR(svd.s(1), 0.0, 1e-14);

    EXPECT_TRUE(is_isometry(CMatrix::Identity(3, 2), tol));
    EXPECT_FALSE(is_isometry(v, tol));
    EXPECT_TRUE(is_projection(diag({1, 0}), tol));
    EXPECT_FALSE(is_projection(v, tol));
    EXPECT_TRUE(is_contraction(v, tol));
    EXPECT_FALSE(is_contraction(2.0 * v, tol));
}

TEST(Predicates, SixConditionsAgree)
{
    Rng rng(5);
    for (int t = 0; t < 200; ++t) {
        const Index r = rng.integer(1, 8);
        const Index c = rng.integer(1, 8);
        const Index k = std::min(r, c);
        RVector s = RVector::Zero(k);
        const bool forced = t % 2 == 0;
        for (Index i = 0; i < k; ++i)
            s(i) = rng.coin() ? 1.0 : 0.0;
        if (!forced)
            s(rng.integer(0, k - 1)) = rng.uniform(0.2, 0.8);
        const CMatrix m = rng.with_singular_values(r, c, s);
        const PartialIsometryConditions pc = partial_isometry_conditions(m, tol);
        EXPECT_TRUE(pc.consistent()) << "trial " << t;
        EXPECT_EQ(pc.verdict(), forced);
        EXPECT_EQ(pc.verdict(), is_partial_isometry(m, tol));
    }
}

TEST(Tolerance, ValidationRejectsBadValues)
{
    Tolerance t;
    EXPECT_NO_THROW(t.validate());
    t.rank_rel = 1.0;
    EXPECT_THROW(t.validate(), Error);
    t = Tolerance{};
    t.eq_rel = 0.0;
    EXPECT_THROW(t.validate(), Error);
}

TEST(Kron, IdentityAmplification)
{
    const CMatrix x = mat(1, 2, {1, 2});
    const CMatrix k = kron_identity(2, x);
    EXPECT_LT(diff(k, kron(CMatrix::Identity(2, 2), x)), 1e-15);
    EXPECT_EQ(k.rows(), 2);
    EXPECT_EQ(k.cols(), 4);
}
