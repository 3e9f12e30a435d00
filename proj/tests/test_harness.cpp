#include "pirep/harness.hpp"
#include "pirep/powers.hpp"
#include "test_support.hpp"

#include <cmath>

using namespace pirep;
using pirep::testing::diff;
using pirep::testing::mat;
using pirep::testing::scalar_rep;
using pirep::testing::throws_kind;

namespace {

const Tolerance tol;

// Oracle: the partial-isometry residual straight from its definition.
double oracle_pi_residual(const CMatrix& m)
{
    const double norm = m.size() == 0 ? 0.0 : Eigen::JacobiSVD<CMatrix>(m).singularValues()(0);
    const CMatrix r = m * m.adjoint() * m - m;
    const double rn = r.size() == 0 ? 0.0 : Eigen::JacobiSVD<CMatrix>(r).singularValues()(0);
    return rn / std::max(1.0, norm);
}

TrialConfig quick(TheoremId id, int trials)
{
    TrialConfig c = default_config(id);
    c.trials = trials;
    c.master_seed = 7;
    return c;
}

} // namespace

// ---------------------------------------------------------------- ids and config

TEST(TheoremIds, RoundTrip)
{
    for (TheoremId id : all_theorems()) {
        EXPECT_EQ(theorem_from_string(to_string(id)), id);
        EXPECT_NE(std::string(statement(id)), "");
    }
    EXPECT_TRUE(is_conjecture(TheoremId::product_pi));
    EXPECT_FALSE(is_conjecture(TheoremId::root));
    EXPECT_TRUE(throws_kind(ErrorKind::usage, [] { theorem_from_string("no-such-theorem"); }));
}

TEST(TrialConfig, Validation)
{
    TrialConfig c;
    EXPECT_NO_THROW(c.validate());
    c.trials = 0;
    EXPECT_TRUE(throws_kind(ErrorKind::usage, [&] { c.validate(); }));
    c.trials = 1;
    c.perturbation = 50.0 * c.tol.eq_rel;
    EXPECT_TRUE(throws_kind(ErrorKind::usage, [&] { c.validate(); }));
    c.perturbation = 100.0 * c.tol.eq_rel;
    EXPECT_NO_THROW(c.validate());
    c.jobs = -1;
    EXPECT_TRUE(throws_kind(ErrorKind::usage, [&] { verify(TheoremId::root, c); }));
}

// ---------------------------------------------------------------- generators

TEST(Generators, PartialIsometricRep)
{
    const CovariantRep scalar = random_partial_isometric_rep(scalar_shape(4, 2), 1, tol);
    EXPECT_EQ(scalar.hilbert_dim(), 4);
    EXPECT_TRUE(classify(scalar).is_partial_isometric);
    EXPECT_LE(oracle_pi_residual(scalar.tilde()), 1e-12);

    Rng rng(3);
    const CovariantRep zero = random_pi_rep(rng, scalar_shape(3, 2), tol, kDefaultTensorCap, 0);
    EXPECT_EQ(zero.tilde().norm(), 0.0);
    EXPECT_TRUE(classify(zero).is_partial_isometric);

    const BlockShape blocks{FdCStarAlgebra({1, 1}), {{1, 1}, {1, 0}}, {2, 3}};
    const CovariantRep block = random_partial_isometric_rep(blocks, 2, tol);
    EXPECT_LE(block.covariance_residual(), 1e-10);
    EXPECT_TRUE(classify(block).is_partial_isometric);

    TrialConfig c;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        EXPECT_TRUE(classify(random_partial_isometric_rep(c, seed)).is_partial_isometric);
        EXPECT_LE(classify(random_contractive_rep(c, seed)).norm, 1.0 + 1e-12);
    }
}

TEST(Generators, SameSeedSameRep)
{
    TrialConfig c;
    const CovariantRep a = random_partial_isometric_rep(c, 11);
    const CovariantRep b = random_partial_isometric_rep(c, 11);
    EXPECT_EQ(dump(to_json(a)), dump(to_json(b)));
    EXPECT_NE(dump(to_json(a)), dump(to_json(random_partial_isometric_rep(c, 12))));
}

TEST(Generators, ShiftSpecsStayInBudget)
{
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const WeightedShiftSpec spec = random_shift_spec(rng, rng.coin());
        EXPECT_GE(spec.n, 1);
        EXPECT_LE(spec.n, 3);
        EXPECT_LE(spec.resolved_trunc(), 243);
        EXPECT_GE(spec.resolved_trunc(), minimal_trunc(spec.n, 3));
        EXPECT_NO_THROW(spec.validate());
    }
}

// ---------------------------------------------------------------- fixtures

TEST(Fixtures, Unitary)
{
    Rng rng(1);
    const ClassificationReport r = classify(random_structured_fixture("unitary", rng));
    EXPECT_TRUE(r.is_isometric);
    EXPECT_TRUE(r.is_coisometric);
}

TEST(Fixtures, IsometricAndCoisometric)
{
    Rng rng(2);
    FixtureOptions options;
    options.dim = 2;
    const ClassificationReport iso = classify(random_structured_fixture("isometric", rng, options));
    EXPECT_TRUE(iso.is_isometric);
    EXPECT_FALSE(iso.is_coisometric);
    const ClassificationReport co = classify(random_structured_fixture("coisometric", rng, options));
    EXPECT_FALSE(co.is_isometric);
    EXPECT_TRUE(co.is_coisometric);
}

TEST(Fixtures, PerturbedPartialIsometry)
{
    Rng rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const CovariantRep rep = random_structured_fixture("perturbed_pi(1e-2)", rng);
        const ClassificationReport r = classify(rep);
        EXPECT_FALSE(r.is_partial_isometric);
        EXPECT_GE(oracle_pi_residual(rep.tilde()), 1e-3);
        EXPECT_NEAR(oracle_pi_residual(rep.tilde()), 0.99 * 0.01 * 1.99, 1e-12);
    }
}

TEST(Fixtures, ShiftBesideUnitaryIsPiButNotRegular)
{
    // The truncated shift kills e_0, and R^∞ of the sum is the unitary part,
    // so N(Ṽ) is not inside E ⊗ R^∞.
    Rng rng(4);
    const CovariantRep rep = random_structured_fixture("direct_sum(truncated_shift, unitary)", rng);
    EXPECT_EQ(rep.hilbert_dim(), 6);
    EXPECT_TRUE(classify(rep).is_partial_isometric);
    EXPECT_FALSE(is_regular(rep));
    EXPECT_TRUE(power_report(rep, 4).consistent());

    const CovariantRep regular = random_structured_fixture("direct_sum(unitary, unitary)", rng);
    EXPECT_TRUE(is_regular(regular));
    EXPECT_TRUE(classify(regular).is_partial_isometric);
}

TEST(Fixtures, WeightedShiftMatchesBuilder)
{
    Rng rng(5);
    FixtureOptions options;
    options.shift.n = 2;
    options.shift.zero_set = {0, 3};
    const CovariantRep rep = random_structured_fixture("weighted_shift", rng, options);
    const ShiftRealization direct = build_shift(options.shift);
    EXPECT_EQ(diff(rep.tilde(), direct.rep.tilde()), 0.0);
}

TEST(Fixtures, UsageErrors)
{
    Rng rng(6);
    EXPECT_TRUE(throws_kind(ErrorKind::usage, [&] { random_structured_fixture("banana", rng); }));
    EXPECT_TRUE(throws_kind(ErrorKind::usage, [&] { random_structured_fixture("perturbed_pi(x)", rng); }));
    EXPECT_TRUE(throws_kind(ErrorKind::usage, [&] { random_structured_fixture("perturbed_pi(2)", rng); }));
    EXPECT_TRUE(throws_kind(ErrorKind::usage, [&] { random_structured_fixture("direct_sum(unitary", rng); }));
    EXPECT_TRUE(throws_kind(ErrorKind::usage, [&] { random_structured_fixture("unitary(3)", rng); }));
    // Summands over different modules cannot be added.
    EXPECT_TRUE(throws_kind(ErrorKind::composition,
                            [&] { random_structured_fixture("direct_sum(unitary, coisometric)", rng); }));
}

// ---------------------------------------------------------------- evaluation

TEST(Evaluate, HandProductCounterexample)
{
    const double r2 = 1.0 / std::sqrt(2.0);
    Instance inst;
    inst.reps = {scalar_rep({mat(2, 2, {1.0, 0.0, 0.0, 0.0})}), scalar_rep({mat(2, 2, {r2, 0.0, r2, 0.0})})};
    TrialConfig c;
    const Evaluation conj = evaluate(TheoremId::product_pi, inst, c);
    EXPECT_TRUE(conj.violated);
    // Both sides are false, so the theorem itself is not violated.
    const Evaluation thm = evaluate(TheoremId::commuting_projections, inst, c);
    EXPECT_TRUE(thm.applicable);
    EXPECT_FALSE(thm.violated);
    // T̃ = diag(1/√2, 0) gives |2^{-3/2} - 2^{-1/2}|; the commutator has norm 1/2.
    EXPECT_NEAR(thm.min_negative_residual, std::min(0.5, r2 - r2 * r2 * r2), 1e-12);
}

TEST(Evaluate, HypothesisFailureIsNotApplicable)
{
    Instance inst;
    inst.reps = {scalar_rep({mat(1, 1, {0.5})}), scalar_rep({mat(1, 1, {1.0})})};
    const Evaluation e = evaluate(TheoremId::commuting_projections, inst, TrialConfig{});
    EXPECT_FALSE(e.applicable);
    EXPECT_FALSE(e.violated);
}

TEST(Instances, JsonRoundTrip)
{
    TrialConfig c;
    for (TheoremId id : all_theorems()) {
        const Instance inst = generate(id, c, 3, 0);
        const std::string text = dump(to_json(inst));
        const Instance back = instance_from_json(parse_json(text), c.tol, c.tensor_cap);
        EXPECT_EQ(dump(to_json(back)), text) << to_string(id);
    }
}

// ---------------------------------------------------------------- engine

TEST(Verify, CountsAreConsistent)
{
    for (TheoremId id : {TheoremId::commuting_projections, TheoremId::kernel_remark, TheoremId::root}) {
        const VerificationReport r = verify(id, quick(id, 60));
        EXPECT_EQ(r.trials_run, 60);
        EXPECT_LE(r.equivalence_violations + r.hypothesis_skips, r.trials_run);
        EXPECT_EQ(r.equivalence_violations, 0) << to_string(id);
        EXPECT_TRUE(r.passed());
    }
}

TEST(Verify, GeneratorSeparation)
{
    for (TheoremId id : {TheoremId::commuting_projections, TheoremId::pinv_chain, TheoremId::defect_dilation,
                         TheoremId::root}) {
        const TrialConfig c = quick(id, 80);
        const VerificationReport r = verify(id, c);
        EXPECT_LE(r.max_positive_residual, 10.0 * c.tol.eq_rel) << to_string(id);
        EXPECT_GE(r.min_negative_residual, c.perturbation / 10.0) << to_string(id);
    }
}

TEST(Verify, FalsificationFindsAndReplaysCounterexamples)
{
    TrialConfig c = quick(TheoremId::product_pi, 100);
    c.falsify = true;
    const VerificationReport r = verify(TheoremId::product_pi, c);
    ASSERT_GE(r.equivalence_violations, 1);
    EXPECT_TRUE(r.passed());
    EXPECT_LE(r.trials_run, 100);
    ASSERT_EQ(r.counterexamples.size(), 1u);
    const Counterexample& ce = r.counterexamples.front();
    EXPECT_EQ(ce.trial, r.trials_run - 1);
    EXPECT_TRUE(replay_counterexample(TheoremId::product_pi, ce, c));
    EXPECT_TRUE(replay_from_seed(TheoremId::product_pi, ce, c));

    // A full run keeps every counterexample up to the cap, and each replays
    // after a trip through text.
    c.falsify = false;
    c.trials = 40;
    c.max_counterexamples = 5;
    const VerificationReport full = verify(TheoremId::product_pi, c);
    EXPECT_FALSE(full.passed());
    EXPECT_GT(full.equivalence_violations, 5);
    ASSERT_EQ(full.counterexamples.size(), 5u);
    for (const Counterexample& x : full.counterexamples) {
        Counterexample reloaded = x;
        reloaded.instance = parse_json(dump(x.instance));
        EXPECT_TRUE(replay_counterexample(TheoremId::product_pi, reloaded, c));
        EXPECT_TRUE(replay_from_seed(TheoremId::product_pi, reloaded, c));
    }
}

TEST(Verify, TrueTheoremFalsificationFails)
{
    TrialConfig c = quick(TheoremId::commuting_projections, 30);
    c.falsify = true;
    const VerificationReport r = verify(TheoremId::commuting_projections, c);
    EXPECT_EQ(r.trials_run, 30);
    EXPECT_FALSE(r.passed());
}

TEST(Verify, ReportIsIndependentOfJobs)
{
    for (TheoremId id : {TheoremId::power_chain, TheoremId::wold, TheoremId::product_pi}) {
        TrialConfig c = quick(id, 40);
        c.falsify = is_conjecture(id);
        c.jobs = 1;
        const std::string serial = dump(to_json(verify(id, c)), 2);
        EXPECT_EQ(dump(to_json(verify(id, c)), 2), serial);
        c.jobs = 4;
        EXPECT_EQ(dump(to_json(verify(id, c)), 2), serial) << to_string(id);
    }
}

TEST(Verify, SeedChangesTheReport)
{
    TrialConfig c = quick(TheoremId::product_pi, 20);
    const std::string a = dump(to_json(verify(TheoremId::product_pi, c)));
    c.master_seed = 8;
    EXPECT_NE(dump(to_json(verify(TheoremId::product_pi, c))), a);
}
