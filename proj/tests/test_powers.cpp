#include "pirep/errors.hpp"
#include "pirep/generators.hpp"
#include "pirep/powers.hpp"
#include "test_support.hpp"

#include <Eigen/SVD>

#include <cmath>

using namespace pirep;
using pirep::testing::mat;
using pirep::testing::scalar_rep;
using pirep::testing::throws_kind;

namespace {

const Tolerance tol;
const double r2 = 1.0 / std::sqrt(2.0);

// ---- brute-force oracle, independent of Subspace and TensorSpace ----

struct SvdSplit {
    CMatrix range;
    CMatrix kernel;
    CMatrix initial;
};

SvdSplit split(const CMatrix& m)
{
    Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.size() == 0 ? 0.0 : s(0);
    Index rank = 0;
    while (rank < s.size() && s(rank) > 1e-9 * std::max(1.0, smax))
        ++rank;
    return {svd.matrixU().leftCols(rank), svd.matrixV().rightCols(m.cols() - rank), svd.matrixV().leftCols(rank)};
}

// Largest deviation of the columns of a from span(b), b orthonormal.
double outside(const CMatrix& a, const CMatrix& b)
{
    if (a.cols() == 0)
        return 0.0;
    const CMatrix rest = a - b * (b.adjoint() * a);
    return rest.norm();
}

// Row-concatenated V_{i1} ... V_{im} over lexicographic multi-indices.
CMatrix scalar_power(const std::vector<CMatrix>& v, int m)
{
    if (m == 0)
        return CMatrix::Identity(v.front().rows(), v.front().rows());
    const CMatrix prev = scalar_power(v, m - 1);
    const Index d = v.front().rows();
    const Index width = prev.cols();
    CMatrix out(d, width * static_cast<Index>(v.size()));
    for (size_t i = 0; i < v.size(); ++i)
        out.middleCols(static_cast<Index>(i) * width, width) = v[i] * prev;
    return out;
}

CMatrix kron_identity(Index n, const CMatrix& x)
{
    CMatrix out = CMatrix::Zero(n * x.rows(), n * x.cols());
    for (Index i = 0; i < n; ++i)
        out.block(i * x.rows(), i * x.cols(), x.rows(), x.cols()) = x;
    return out;
}

bool oracle_chain(const std::vector<CMatrix>& v, int m)
{
    if (m == 1)
        return true;
    const CMatrix x = kron_identity(static_cast<Index>(std::pow(v.size(), m - 1)), scalar_power(v, 1));
    const CMatrix moved = x * split(scalar_power(v, m)).initial;
    return outside(moved, split(scalar_power(v, m - 1)).initial) < 1e-7;
}

bool oracle_pi(const CMatrix& m)
{
    Eigen::JacobiSVD<CMatrix> svd(m);
    for (Index i = 0; i < svd.singularValues().size(); ++i) {
        const double s = svd.singularValues()(i);
        if (s > 1e-9 && std::abs(s - 1.0) > 1e-7)
            return false;
    }
    return true;
}

std::vector<CMatrix> column_blocks(const CMatrix& tilde, Index n)
{
    const Index d = tilde.rows();
    std::vector<CMatrix> out;
    for (Index i = 0; i < n; ++i)
        out.push_back(tilde.middleCols(i * d, d));
    return out;
}

// V e1 = e0, V (e0 + e2)/√2 = e1: partial isometric, V² is not.
std::vector<CMatrix> broken_chain()
{
    return {mat(3, 3, {0.0, 1.0, 0.0, r2, 0.0, r2, 0.0, 0.0, 0.0})};
}

CovariantRep unitary_rep(Rng& rng, Index d)
{
    return scalar_rep({rng.unitary(d)});
}

// Over C² with one edge from the first summand into the second: Ṽ is an
// isometry from C^d into C^d ⊕ C^{d+1}.
CovariantRep isometric_rep(Rng& rng, Index d)
{
    const BlockShape shape{FdCStarAlgebra({1, 1}), {{0, 0}, {1, 0}}, {d, d + 1}};
    return rep_from_row_blocks(shape, {CMatrix(d, 0), random_partial_isometry(rng, d + 1, d, d)}, tol);
}

// Co-isometric scalar rep over C²: Ṽ = [V_1 V_2] with ṼṼ* = I.
CovariantRep coisometric_rep(Rng& rng, Index d)
{
    return scalar_rep(column_blocks(random_partial_isometry(rng, d, 2 * d, d), 2));
}

ShapeLimits unit_limits()
{
    ShapeLimits limits;
    limits.max_hilbert_dim = 6;
    limits.max_module_dim = 3;
    return limits;
}

} // namespace

// ---------------------------------------------------------------- chain / range

TEST(KernelChain, IsometricAlwaysHolds)
{
    Rng rng(71);
    const CovariantRep rep = isometric_rep(rng, 2);
    ASSERT_LT(op_norm(rep.tilde().adjoint() * rep.tilde() - CMatrix::Identity(2, 2)), 1e-12);
    for (int m = 1; m <= 4; ++m) {
        EXPECT_TRUE(kernel_chain_condition(rep, m).holds);
        EXPECT_TRUE(range_invariance_condition(rep, m).holds);
    }
}

TEST(KernelChain, TruncatedShift2x2)
{
    const CovariantRep rep = truncated_shift(2);
    for (int m = 1; m <= 4; ++m) {
        EXPECT_TRUE(kernel_chain_condition(rep, m).holds) << m;
        EXPECT_TRUE(range_invariance_condition(rep, m).holds) << m;
    }
}

TEST(KernelChain, BrokenChainFailsAtTwo)
{
    const auto v = broken_chain();
    ASSERT_FALSE(oracle_chain(v, 2));
    const CovariantRep rep = scalar_rep(v);
    EXPECT_FALSE(kernel_chain_condition(rep, 2).holds);
    EXPECT_FALSE(range_invariance_condition(rep, 2).holds);
    EXPECT_GT(kernel_chain_condition(rep, 2).residual, 0.1);

    const PowerReport report = power_report(rep, 4);
    ASSERT_EQ(report.applicable, Outcome::holds);
    ASSERT_EQ(report.pi_flags.size(), 4u);
    EXPECT_TRUE(report.pi_flags[0]);
    for (size_t m = 1; m < 4; ++m)
        EXPECT_FALSE(report.pi_flags[m]) << m + 1;
    EXPECT_FALSE(report.chain_flags[1]);
    EXPECT_TRUE(report.consistent());
}

TEST(KernelChain, ZeroRepRangeFormHolds)
{
    const CovariantRep rep = scalar_rep({CMatrix::Zero(3, 3)});
    for (int m = 1; m <= 3; ++m)
        EXPECT_TRUE(range_invariance_condition(rep, m).holds);
}

TEST(KernelChain, PowerIndexMustBePositive)
{
    const CovariantRep rep = truncated_shift(2);
    EXPECT_TRUE(throws_kind(ErrorKind::domain, [&] { kernel_chain_condition(rep, 0); }));
    EXPECT_TRUE(throws_kind(ErrorKind::domain, [&] { range_invariance_condition(rep, 0); }));
    EXPECT_TRUE(throws_kind(ErrorKind::usage, [&] { power_report(rep, 0); }));
}

TEST(KernelChain, MatchesBruteForceOnScalarReps)
{
    Rng rng(72);
    int failures = 0;
    for (int trial = 0; trial < 120; ++trial) {
        const Index n = rng.integer(1, 2);
        const Index d = rng.integer(2, 4);
        const auto v = column_blocks(random_partial_isometry(rng, d, n * d, rng.integer(1, d)), n);
        const CovariantRep rep = scalar_rep(v);
        for (int m = 1; m <= 3; ++m) {
            const bool expected = oracle_chain(v, m);
            failures += expected ? 0 : 1;
            EXPECT_EQ(kernel_chain_condition(rep, m).holds, expected) << "trial " << trial << " m " << m;
            EXPECT_EQ(oracle_pi(scalar_power(v, m)), partial_isometry_residual(rep.tilde_power(m)) <= tol.eq_rel);
        }
    }
    EXPECT_GT(failures, 10);
}

TEST(KernelChain, RangeFormAgreesOnRandomReps)
{
    Rng rng(73);
    const ShapeLimits limits = unit_limits();
    for (int trial = 0; trial < 150; ++trial) {
        const CovariantRep rep = rng.coin() ? random_pi_rep(rng, random_block_shape(rng, limits), tol)
                                            : random_contractive_rep(rng, random_block_shape(rng, limits), tol);
        for (int m = 1; m <= 3; ++m)
            EXPECT_EQ(kernel_chain_condition(rep, m).holds, range_invariance_condition(rep, m).holds)
                << "trial " << trial << " m " << m;
    }
}

// ---------------------------------------------------------------- power report

TEST(PowerReport, ShiftPlusUnitaryAllTrue)
{
    Rng rng(74);
    const CovariantRep rep = direct_sum(truncated_shift(3), unitary_rep(rng, 2));
    const PowerReport report = power_report(rep, 4);
    ASSERT_EQ(report.applicable, Outcome::holds);
    for (int m = 0; m < 4; ++m) {
        EXPECT_TRUE(report.pi_flags[m]);
        EXPECT_TRUE(report.chain_flags[m]);
        EXPECT_TRUE(report.range_flags[m]);
        EXPECT_TRUE(oracle_pi(scalar_power({rep.tilde()}, m + 1)));
    }
}

TEST(PowerReport, IsometricAllTrue)
{
    Rng rng(75);
    const PowerReport report = power_report(isometric_rep(rng, 3), 4);
    ASSERT_EQ(report.applicable, Outcome::holds);
    EXPECT_EQ(report.pi_flags, std::vector<bool>(4, true));
    EXPECT_EQ(report.chain_flags, std::vector<bool>(4, true));
}

TEST(PowerReport, NotApplicableForNonPi)
{
    const PowerReport report = power_report(scalar_rep({mat(2, 2, {0.0, r2, 0.0, 0.0})}), 3);
    EXPECT_EQ(report.applicable, Outcome::not_applicable);
    EXPECT_TRUE(report.pi_flags.empty());
}

TEST(PowerReport, TheoremEquivalenceAndMonotoneStep)
{
    Rng rng(76);
    const ShapeLimits limits = unit_limits();
    int broken = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const CovariantRep rep = random_pi_rep(rng, random_block_shape(rng, limits), tol);
        const PowerReport report = power_report(rep, 3);
        ASSERT_EQ(report.applicable, Outcome::holds);
        EXPECT_TRUE(report.consistent()) << "trial " << trial;
        for (size_t m = 0; m + 1 < report.pi_flags.size(); ++m)
            if (report.pi_flags[m] && report.chain_flags[m + 1])
                EXPECT_TRUE(report.pi_flags[m + 1]) << "trial " << trial;
        broken += report.pi_flags[1] ? 0 : 1;
    }
    EXPECT_GT(broken, 10);
}

// ---------------------------------------------------------------- regularity

TEST(GeneralizedRange, Examples)
{
    Rng rng(77);
    EXPECT_EQ(generalized_range(unitary_rep(rng, 3)).dim(), 3);
    EXPECT_TRUE(generalized_range(scalar_rep({mat(2, 2, {0.0, 1.0, 0.0, 0.0})})).empty());

    const CovariantRep sum = direct_sum(truncated_shift(3), unitary_rep(rng, 2));
    const Subspace r = generalized_range(sum);
    ASSERT_EQ(r.dim(), 2);
    CMatrix tail = CMatrix::Zero(5, 2);
    tail(3, 0) = 1.0;
    tail(4, 1) = 1.0;
    EXPECT_LT(outside(tail, r.frame()), 1e-9);
}

TEST(Regularity, Examples)
{
    Rng rng(78);
    EXPECT_TRUE(is_regular(isometric_rep(rng, 3)));
    const RegularityCheck shift = regularity(truncated_shift(3));
    EXPECT_FALSE(shift.regular);
    EXPECT_TRUE(shift.generalized_range.empty());
    EXPECT_NEAR(shift.residual, 1.0, 1e-12);
    EXPECT_TRUE(is_regular(direct_sum(coisometric_rep(rng, 1), coisometric_rep(rng, 2))));
}

TEST(Regularity, ShiftPlusUnitaryIsNotRegular)
{
    Rng rng(79);
    const CovariantRep sum = direct_sum(truncated_shift(3), unitary_rep(rng, 2));
    EXPECT_FALSE(is_regular(sum));
}

TEST(Regularity, GeneratedRegularReps)
{
    Rng rng(80);
    ShapeLimits limits;
    for (int trial = 0; trial < 100; ++trial) {
        const bool pi = rng.coin();
        const CovariantRep rep = random_regular_rep(rng, limits, pi, tol);
        EXPECT_TRUE(is_regular(rep)) << "trial " << trial;
        EXPECT_EQ(partial_isometry_residual(rep.tilde()) <= tol.eq_rel, pi) << "trial " << trial;
    }
}

// ---------------------------------------------------------------- generalized inverses

TEST(GeneralizedInverse, Examples)
{
    Rng rng(81);
    const CovariantRep rep = direct_sum(coisometric_rep(rng, 1), coisometric_rep(rng, 2));
    const auto pinv = generalized_inverse_check(rep, rep.pinv());
    EXPECT_TRUE(pinv.is_gen_inverse);

    const auto zero = generalized_inverse_check(rep, CMatrix::Zero(rep.tilde().cols(), rep.tilde().rows()));
    EXPECT_FALSE(zero.is_gen_inverse);
    EXPECT_GT(zero.vsv_residual, 0.5);

    EXPECT_TRUE(throws_kind(ErrorKind::dimension, [&] { generalized_inverse_check(rep, rep.tilde()); }));
}

TEST(GeneralizedInverse, AdjointOfRegularPiFixture)
{
    Rng rng(82);
    for (int trial = 0; trial < 30; ++trial) {
        const CovariantRep rep = random_regular_rep(rng, ShapeLimits{}, true, tol);
        const auto report = generalized_inverse_check(rep, rep.tilde().adjoint(), 3);
        ASSERT_TRUE(report.is_gen_inverse);
        ASSERT_TRUE(report.regular);
        EXPECT_EQ(report.lemma_holds_up_to, report.lemma_bound) << "trial " << trial;
        EXPECT_GE(report.lemma_bound, 1);
    }
}

TEST(GeneralizedInverse, LemmaOnRandomInverses)
{
    Rng rng(83);
    ShapeLimits limits;
    for (int trial = 0; trial < 60; ++trial) {
        const CovariantRep rep = random_regular_rep(rng, limits, rng.coin(), tol);
        const CMatrix s = random_generalized_inverse(rng, rep);
        EXPECT_LT(intertwining_residual(rep.space(0), rep.space(1), s), 1e-9);
        const auto report = generalized_inverse_check(rep, s, 3);
        ASSERT_TRUE(report.is_gen_inverse) << report.svs_residual << " " << report.vsv_residual;
        EXPECT_EQ(report.lemma_holds_up_to, report.lemma_bound) << "trial " << trial;
    }
}

TEST(RegularPower, Examples)
{
    Rng rng(84);
    const auto unitary = regular_pi_iff_power_pi(unitary_rep(rng, 3), 4);
    EXPECT_EQ(unitary.applicable, Outcome::holds);
    EXPECT_TRUE(unitary.is_pi);
    EXPECT_EQ(unitary.power_pi_up_to, 4);

    EXPECT_EQ(regular_pi_iff_power_pi(truncated_shift(3)).applicable, Outcome::not_applicable);

    for (int trial = 0; trial < 40; ++trial) {
        const bool pi = rng.coin();
        const auto report = regular_pi_iff_power_pi(random_regular_rep(rng, ShapeLimits{}, pi, tol), 4);
        ASSERT_EQ(report.applicable, Outcome::holds);
        EXPECT_EQ(report.is_pi, pi);
        EXPECT_TRUE(report.consistent);
        if (pi)
            EXPECT_EQ(report.power_pi_up_to, report.bound);
    }
}

// ---------------------------------------------------------------- root theorem

TEST(RootCriterion, PiRepSatisfiesBoth)
{
    Rng rng(85);
    const CovariantRep rep = direct_sum(truncated_shift(3), unitary_rep(rng, 2));
    const RootReport report = root_criterion(rep, 2);
    ASSERT_EQ(report.applicable, Outcome::holds);
    EXPECT_TRUE(report.cond_a);
    EXPECT_TRUE(report.cond_b);
    EXPECT_TRUE(report.rep_is_pi);
}

TEST(RootCriterion, HalfShift)
{
    // V = [[0, 1/√2], [0, 0]]: V² = 0, D = span{e1}, ||V e1|| = 1/√2.
    const CovariantRep rep = scalar_rep({mat(2, 2, {0.0, r2, 0.0, 0.0})});
    const RootReport report = root_criterion(rep, 2);
    ASSERT_EQ(report.applicable, Outcome::holds);
    EXPECT_FALSE(report.cond_a);
    EXPECT_NEAR(report.residual_a, 0.5, 1e-12);
    EXPECT_FALSE(report.rep_is_pi);
    EXPECT_TRUE(report.equivalence_holds());
}

TEST(RootCriterion, Hypotheses)
{
    const CovariantRep big = scalar_rep({mat(2, 2, {0.0, 2.0, 0.0, 0.0})});
    EXPECT_EQ(root_criterion(big, 2).applicable, Outcome::not_applicable);
    EXPECT_NE(root_criterion(big, 2).reason.find("contractive"), std::string::npos);
    EXPECT_TRUE(throws_kind(ErrorKind::usage, [&] { root_criterion(big, 1); }));

    // V² not PI: V = diag(1/2, 0).
    const CovariantRep half = scalar_rep({mat(2, 2, {0.5, 0.0, 0.0, 0.0})});
    EXPECT_EQ(root_criterion(half, 2).applicable, Outcome::not_applicable);

    // C² acting on its first summand only: E is not full.
    const FdCStarAlgebra alg({1, 1});
    const BlockShape shape{alg, {{1, 0}, {0, 0}}, {1, 1}};
    const CovariantRep partial = rep_from_row_blocks(shape, {mat(1, 1, {0.0}), CMatrix(1, 0)}, tol);
    const RootReport report = root_criterion(partial, 2);
    EXPECT_EQ(report.applicable, Outcome::not_applicable);
    EXPECT_NE(report.reason.find("full"), std::string::npos);
}

TEST(RootCriterion, EquivalenceOnFixtures)
{
    Rng rng(86);
    const ShapeLimits limits = unit_limits();
    int pi = 0;
    int non_pi = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const CovariantRep rep = random_root_fixture(rng, limits, rng.coin(), tol);
        const int k = rng.integer(0, 3) == 0 ? 3 : 2;
        const RootReport report = root_criterion(rep, k);
        ASSERT_EQ(report.applicable, Outcome::holds) << report.reason;
        EXPECT_TRUE(report.equivalence_holds()) << "trial " << trial << " a " << report.residual_a << " b "
                                                << report.residual_b << " pi " << report.rep_residual;
        EXPECT_LT(report.kernel_inclusion_residual, tol.incl_abs);
        if (report.cond_a && report.chain_holds)
            EXPECT_TRUE(report.cond_b) << "trial " << trial;
        (report.rep_is_pi ? pi : non_pi)++;
    }
    EXPECT_GT(pi, 20);
    EXPECT_GT(non_pi, 20);
}

// ---------------------------------------------------------------- kernel remark

TEST(GuptaCriterion, Examples)
{
    Rng rng(87);
    // A full correspondence admits isometric reps only when Ṽ is unitary.
    const GuptaReport iso = gupta_criterion(unitary_rep(rng, 2), 2);
    EXPECT_EQ(iso.applicable, Outcome::holds);
    EXPECT_TRUE(iso.rep_is_pi);
    EXPECT_TRUE(iso.consistent);

    const GuptaReport half = gupta_criterion(scalar_rep({mat(2, 2, {0.0, r2, 0.0, 0.0})}), 2);
    EXPECT_EQ(half.applicable, Outcome::not_applicable);
    EXPECT_FALSE(half.kernels_equal);
    EXPECT_TRUE(half.consistent);
}

TEST(GuptaCriterion, AlignedKernelFixtures)
{
    Rng rng(88);
    for (int trial = 0; trial < 100; ++trial) {
        const CovariantRep rep = random_aligned_kernel_rep(rng, rng.integer(1, 6), tol);
        const GuptaReport report = gupta_criterion(rep, 2);
        ASSERT_EQ(report.applicable, Outcome::holds) << report.reason;
        EXPECT_TRUE(report.rep_is_pi);
        EXPECT_TRUE(report.consistent);
    }
}

TEST(GuptaCriterion, ConsistentOnRootFixtures)
{
    Rng rng(89);
    const ShapeLimits limits = unit_limits();
    for (int trial = 0; trial < 100; ++trial) {
        const GuptaReport report = gupta_criterion(random_root_fixture(rng, limits, rng.coin(), tol), 2);
        EXPECT_TRUE(report.consistent) << "trial " << trial;
    }
}
