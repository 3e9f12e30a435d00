#pragma once

#include "pirep/generators.hpp"
#include "pirep/io.hpp"
#include "pirep/shifts.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pirep {

/// The statements the engine can check. Every entry except product_pi is a
/// theorem and should never produce a violation; product_pi ("a product of
/// two partial isometric reps is partial isometric") is false and exists to
/// show that the generators reach counterexamples.
enum class TheoremId {
    commuting_projections,
    sufficient_intertwining,
    product_chain,
    pinv_chain,
    defect_dilation,
    range_invariance,
    power_chain,
    power_step,
    inverse_lemma,
    regular_power,
    shift_criterion,
    root,
    kernel_remark,
    wold,
    product_pi,
};

const std::vector<TheoremId>& all_theorems();
/// Hyphenated names such as "commuting-projections".
const char* to_string(TheoremId id);
/// Usage error for unknown names.
TheoremId theorem_from_string(std::string_view name);
/// One line stating both sides of the checked equivalence or implication.
const char* statement(TheoremId id);
bool is_conjecture(TheoremId id);

struct TrialConfig {
    std::uint64_t master_seed = 42;
    int trials = 100;
    ShapeLimits limits;
    /// Decisions whose residual lands in (threshold, perturbation / 10) are
    /// borderline; such draws are regenerated.
    double perturbation = 1e-3;
    int n_max = kDefaultPowerBound;
    /// Worker threads; 0 means one per hardware thread. Never affects the report.
    int jobs = 1;
    Tolerance tol;
    Index tensor_cap = kDefaultTensorCap;
    /// Stop after the first batch that contains a violation and count the run
    /// as successful when at least one was found.
    bool falsify = false;
    int max_regenerations = 8;
    /// Counterexamples kept in the report (lowest trial indices first).
    int max_counterexamples = 10;

    /// Usage error unless trials >= 1, perturbation >= 100 eq_rel and the
    /// counts are sensible.
    void validate() const;
};

/// Sizes that keep a run of a few hundred trials to seconds: tensor powers and
/// three-factor products use H of dimension at most 6 and modules of
/// dimension at most 3, everything else the ShapeLimits defaults.
TrialConfig default_config(TheoremId id);

/// A draw for one trial. Which fields are used depends on the statement.
struct Instance {
    std::vector<CovariantRep> reps;
    std::optional<WeightedShiftSpec> shift;
    /// A generalized inverse of reps[0] (inverse_lemma).
    std::optional<CMatrix> s;
    /// Root power (root, kernel_remark).
    int k = 0;
    /// Dimension of the chain block of a regular fixture (wold), or -1.
    Index chain_dim = -1;
};
Json to_json(const Instance& inst);
Instance instance_from_json(const Json& j, const Tolerance& tol, Index tensor_cap);

struct Evaluation {
    bool applicable = true;
    bool violated = false;
    /// Some decision residual fell in the ambiguous band.
    bool borderline = false;
    std::string detail;
    double max_residual = 0.0;
    /// Largest residual among decisions that came out true, smallest among
    /// those that came out false (infinity when there were none).
    double max_positive_residual = 0.0;
    double min_negative_residual = 0.0;
};

/// Both sides of the statement on one instance.
Evaluation evaluate(TheoremId id, const Instance& inst, const TrialConfig& config);
/// The instance for attempt `attempt` of trial `trial`; depends only on
/// (master_seed, id, trial, attempt).
Instance generate(TheoremId id, const TrialConfig& config, int trial, int attempt);
std::uint64_t stream_id(TheoremId id, int trial, int attempt);

struct Counterexample {
    int trial = 0;
    int attempt = 0;
    std::uint64_t stream = 0;
    std::string detail;
    Json instance;
};

struct VerificationReport {
    TheoremId theorem = TheoremId::commuting_projections;
    TrialConfig config;
    int trials_run = 0;
    int equivalence_violations = 0;
    int hypothesis_skips = 0;
    /// Draws replaced because a decision was borderline.
    int regenerations = 0;
    double max_residual = 0.0;
    double max_positive_residual = 0.0;
    double min_negative_residual = 0.0;
    std::vector<Counterexample> counterexamples;

    /// Zero violations, or at least one in falsification mode.
    bool passed() const;
};

/// Runs the trials concurrently; the report is identical for any job count.
VerificationReport verify(TheoremId id, const TrialConfig& config);
/// Jobs are left out so that reports from different job counts compare equal.
Json to_json(const VerificationReport& report);

/// Re-evaluates the embedded instance; true when the violation reappears.
bool replay_counterexample(TheoremId id, const Counterexample& c, const TrialConfig& config);
/// Regenerates the instance from its seed and compares it with the embedded one.
bool replay_from_seed(TheoremId id, const Counterexample& c, const TrialConfig& config);

// ---- instance generators ----

/// Gaussian row blocks for a random shape under config.limits, with spectra
/// projected to {0, 1}; covariant by construction.
CovariantRep random_partial_isometric_rep(const TrialConfig& config, std::uint64_t seed);
CovariantRep random_partial_isometric_rep(const BlockShape& shape, std::uint64_t seed, const Tolerance& tol = {});
/// Random shape under config.limits, row blocks with spectra in [0, 1].
CovariantRep random_contractive_rep(const TrialConfig& config, std::uint64_t seed);

/// n in 1..3, M = max(c n³, n + n² + n³) with c in 2..8 (so M <= 216), up to
/// four zeros in B and, unless unit_weights, a few weight overrides in
/// [0.2, 1.5].
WeightedShiftSpec random_shift_spec(Rng& rng, bool unit_weights);

struct FixtureOptions {
    Index dim = 3;
    /// Used by "weighted_shift".
    WeightedShiftSpec shift;
    Tolerance tol;
    Index tensor_cap = kDefaultTensorCap;
};
/// Named structures:
///   isometric            Ṽ an isometry from C^d into C^d ⊕ C^{d+1} over C ⊕ C
///   unitary              scalar E = C, V a Haar unitary on C^d
///   coisometric          scalar E = C², Ṽ a co-isometry on C^d
///   truncated_shift      scalar E = C, V e_k = e_{k-1}
///   weighted_shift       build_shift(options.shift)
///   perturbed_pi(eps)    (1 - eps) times a nonzero PI rep over E = C², d = dim
///   direct_sum(a, b, ...) direct sum of fixtures over the same E
/// Usage error for anything else.
CovariantRep random_structured_fixture(std::string_view kind, Rng& rng, const FixtureOptions& options = {});

} // namespace pirep
