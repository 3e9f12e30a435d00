#include "pirep/harness.hpp"

#include "pirep/errors.hpp"
#include "pirep/powers.hpp"
#include "pirep/products.hpp"
#include "pirep/wold.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

namespace pirep {

namespace {

struct TheoremInfo {
    TheoremId id;
    const char* name;
    const char* statement;
};

// clang-format off
const std::array<TheoremInfo, 15> kTheorems = {{
    {TheoremId::commuting_projections, "commuting-projections",
     "for PI factors, T̃ = Ṽ¹(I ⊗ Ṽ²) is PI iff Ṽ¹*Ṽ¹ commutes with I ⊗ Ṽ²Ṽ²*"},
    {TheoremId::sufficient_intertwining, "sufficient-intertwining",
     "for PI factors, Ṽ¹(I ⊗ Ṽ²Ṽ²*) = Ṽ²Ṽ²*Ṽ¹ implies T̃ is PI"},
    {TheoremId::product_chain, "product-chain",
     "for PI factors, the four chain conditions give the same cumulative verdict at every stage"},
    {TheoremId::pinv_chain, "pinv-chain",
     "for PI factors, T̃ is PI iff T̃† equals the reversed chain of amplified factor pseudoinverses"},
    {TheoremId::defect_dilation, "defect-dilation",
     "for contractive factors, the defect dilation M is PI iff Ṽ¹ is PI; the single-rep dilation is always PI"},
    {TheoremId::range_invariance, "range-invariance",
     "for PI reps, the kernel chain inclusion at m holds iff I ⊗ ṼṼ* leaves N(Ṽ_{m-1}) invariant"},
    {TheoremId::power_chain, "power-chain",
     "for PI reps, Ṽ_1..Ṽ_n are all PI iff the kernel chain inclusion holds at 1..n"},
    {TheoremId::power_step, "power-step",
     "for PI reps, Ṽ_n PI and the chain inclusion at n + 1 imply Ṽ_{n+1} PI"},
    {TheoremId::inverse_lemma, "inverse-lemma",
     "for regular reps and generalized inverses S of Ṽ, (I ⊗ S) N(Ṽ_m) ⊆ N(Ṽ_{m+1})"},
    {TheoremId::regular_power, "regular-power",
     "for regular reps, Ṽ PI implies every power Ṽ_m PI"},
    {TheoremId::shift_criterion, "shift-criterion",
     "for weighted shifts, the kernel formula matches the truncated kernels, V is PI iff w = 1 off B, "
     "and PI shifts are power PI across the faithful window"},
    {TheoremId::root, "root",
     "for contractive reps of a full E with Ṽ_k PI, Ṽ is PI iff conditions a and b hold; "
     "a with the chain inclusion forces b"},
    {TheoremId::kernel_remark, "kernel-remark",
     "for contractive reps of a full E with Ṽ_k PI, N(I ⊗ Ṽ) = N(Ṽ_2) forces Ṽ to be PI"},
    {TheoremId::wold, "wold",
     "for regular PI or bi-regular reps, H = [H ⊖ R(Ṽ)]_Ṽ ⊕ R^∞(Ṽ') orthogonally, with primal = dual "
     "and Ṽ' = Ṽ in the PI case"},
    {TheoremId::product_pi, "product-pi",
     "(false) the product of two PI reps is PI"},
}};
// clang-format on

const TheoremInfo& info(TheoremId id)
{
    for (const TheoremInfo& t : kTheorems)
        if (t.id == id)
            return t;
    fail(ErrorKind::usage, "unknown theorem id");
}

CovariantRep with_cap(const CovariantRep& rep, Index cap)
{
    if (rep.tensor_cap() == cap)
        return rep;
    return CovariantRep(rep.correspondence_ptr(), rep.sigma(), rep.v_on_basis(), rep.tolerance(), cap);
}

int power_bound(const CovariantRep& rep, int n_max)
{
    return std::max(1, std::min(n_max, max_tensor_power(rep)));
}

// Collects every decision of a trial: its residual and the verdict the
// library reached on it.
class Decisions {
public:
    explicit Decisions(const TrialConfig& config) : band_(config.perturbation / 10.0) {}

    bool operator()(double residual, bool holds)
    {
        max_ = std::max(max_, residual);
        if (holds) {
            max_pos_ = std::max(max_pos_, residual);
        } else {
            min_neg_ = std::min(min_neg_, residual);
            borderline_ = borderline_ || residual < band_;
        }
        return holds;
    }

    void finish(Evaluation& e) const
    {
        e.borderline = borderline_;
        e.max_residual = max_;
        e.max_positive_residual = max_pos_;
        e.min_negative_residual = min_neg_;
    }

private:
    double band_;
    bool borderline_ = false;
    double max_ = 0.0;
    double max_pos_ = 0.0;
    double min_neg_ = std::numeric_limits<double>::infinity();
};

Evaluation not_applicable(std::string reason)
{
    Evaluation e;
    e.applicable = false;
    e.detail = std::move(reason);
    return e;
}

void violation(Evaluation& e, const std::string& what)
{
    e.violated = true;
    if (!e.detail.empty())
        e.detail += "; ";
    e.detail += what;
}

std::string flag_string(const std::vector<bool>& v)
{
    std::string out;
    for (bool b : v)
        out += b ? '1' : '0';
    return out;
}

// ---- generators per statement ----

ShapeLimits small_limits()
{
    ShapeLimits limits;
    limits.max_hilbert_dim = 6;
    limits.max_module_dim = 3;
    return limits;
}

Instance pair_instance(Rng& rng, const TrialConfig& c, bool allow_commuting)
{
    Instance inst;
    if (allow_commuting) {
        auto [a, b] = random_pi_pair(rng, c.limits, c.tol, c.tensor_cap);
        inst.reps = {std::move(a), std::move(b)};
    } else {
        const BlockShape s1 = random_block_shape(rng, c.limits);
        const BlockShape s2 = redraw_module(rng, s1, c.limits);
        CovariantRep a = random_pi_rep(rng, s1, c.tol, c.tensor_cap);
        inst.reps = {std::move(a), random_pi_rep(rng, s2, c.tol, c.tensor_cap)};
    }
    return inst;
}

// Random PI reps, with one draw in eight replaced by a truncated shift beside
// a unitary (power PI, not regular).
CovariantRep power_instance(Rng& rng, const TrialConfig& c)
{
    if (rng.integer(0, 7) == 0) {
        const CovariantRep shift = truncated_shift(rng.integer(1, 3), c.tol);
        const CovariantRep u = scalar_unitary(rng, rng.integer(1, 3), c.tol);
        return with_cap(direct_sum(shift, u), c.tensor_cap);
    }
    return random_pi_rep(rng, random_block_shape(rng, c.limits), c.tol, c.tensor_cap);
}

// ---- evaluators ----

Evaluation eval_commuting(const Instance& inst, const TrialConfig& c)
{
    const CovariantRep& a = inst.reps.at(0);
    const CovariantRep& b = inst.reps.at(1);
    if (!is_partial_isometry(a.tilde(), c.tol) || !is_partial_isometry(b.tilde(), c.tol))
        return not_applicable("a factor is not partial isometric");
    const CommutingProjectionReport r = commuting_projection_test(a, b);
    Evaluation e;
    Decisions d(c);
    d(r.product_residual, r.product_is_pi);
    d(r.commutator_norm, r.projections_commute);
    d.finish(e);
    if (r.product_is_pi != r.projections_commute)
        violation(e, std::string("product PI = ") + (r.product_is_pi ? "true" : "false") + ", commute = "
                         + (r.projections_commute ? "true" : "false"));
    return e;
}

Evaluation eval_intertwining(const Instance& inst, const TrialConfig& c)
{
    const IntertwiningReport r = sufficient_intertwining_check(inst.reps.at(0), inst.reps.at(1));
    if (r.condition == Outcome::not_applicable)
        return not_applicable("a factor is not partial isometric");
    Evaluation e;
    Decisions d(c);
    d(r.residual, r.condition == Outcome::holds);
    d(r.product_residual, r.product_is_pi);
    d.finish(e);
    if (!r.conclusion_consistent)
        violation(e, "intertwining holds but the product is not PI");
    return e;
}

Evaluation eval_chain(const Instance& inst, const TrialConfig& c)
{
    const ChainReport r = erdelyi_chain_test(ProductRep(inst.reps));
    Evaluation e;
    Decisions d(c);
    for (size_t k = 0; k < 4; ++k)
        for (size_t j = 0; j < r.residuals[k].size(); ++j)
            d(r.residuals[k][j], r.stagewise[k][j]);
    d.finish(e);
    if (!r.verdicts_agree()) {
        std::string what = "cumulative verdicts differ:";
        for (size_t k = 0; k < 4; ++k)
            what += " " + flag_string(r.cumulative[k]);
        violation(e, what);
    }
    return e;
}

Evaluation eval_pinv(const Instance& inst, const TrialConfig& c)
{
    const PinvChainReport r = product_pinv_test(ProductRep(inst.reps));
    if (!r.factors_pi)
        return not_applicable("a factor is not partial isometric");
    Evaluation e;
    Decisions d(c);
    d(r.product_residual, r.is_pi);
    d(r.chain_residual, r.pinv_factors_match);
    d.finish(e);
    if (r.is_pi != r.pinv_factors_match)
        violation(e, std::string("product PI = ") + (r.is_pi ? "true" : "false")
                         + ", chain residual = " + std::to_string(r.chain_residual));
    return e;
}

Evaluation eval_dilation(const Instance& inst, const TrialConfig& c)
{
    const CovariantRep& a = inst.reps.at(0);
    const CovariantRep& b = inst.reps.at(1);
    if (!is_contraction(a.tilde(), c.tol) || !is_contraction(b.tilde(), c.tol))
        return not_applicable("a factor is not contractive");
    const DefectDilationReport r = defect_dilation_test(a, b);
    Evaluation e;
    Decisions d(c);
    d(r.m_residual, r.m_is_pi);
    d(r.rep1_residual, r.rep1_is_pi);
    d(r.single_dilation_residual, r.single_dilation_is_pi);
    d.finish(e);
    if (r.m_is_pi != r.rep1_is_pi)
        violation(e, std::string("M PI = ") + (r.m_is_pi ? "true" : "false") + ", first factor PI = "
                         + (r.rep1_is_pi ? "true" : "false"));
    if (!r.single_dilation_is_pi)
        violation(e, "single-rep dilation is not PI");
    return e;
}

Evaluation eval_powers(TheoremId id, const Instance& inst, const TrialConfig& c)
{
    const CovariantRep& rep = inst.reps.at(0);
    const PowerReport r = power_report(rep, power_bound(rep, c.n_max));
    if (r.applicable != Outcome::holds)
        return not_applicable("Ṽ is not partial isometric");
    Evaluation e;
    Decisions d(c);
    for (size_t m = 0; m < r.pi_flags.size(); ++m) {
        d(r.chain_residuals[m], r.chain_flags[m]);
        d(r.range_residuals[m], r.range_flags[m]);
        if (id != TheoremId::range_invariance)
            d(r.pi_residuals[m], r.pi_flags[m]);
    }
    d.finish(e);
    const std::string flags =
        "pi " + flag_string(r.pi_flags) + " chain " + flag_string(r.chain_flags) + " range " + flag_string(r.range_flags);
    switch (id) {
    case TheoremId::range_invariance:
        if (r.chain_flags != r.range_flags)
            violation(e, flags);
        break;
    case TheoremId::power_chain:
        if (!r.consistent())
            violation(e, flags);
        break;
    default:
        for (size_t m = 0; m + 1 < r.pi_flags.size(); ++m)
            if (r.pi_flags[m] && r.chain_flags[m + 1] && !r.pi_flags[m + 1])
                violation(e, "step fails at " + std::to_string(m + 2) + ": " + flags);
    }
    return e;
}

Evaluation eval_inverse(const Instance& inst, const TrialConfig& c)
{
    const CovariantRep& rep = inst.reps.at(0);
    const GeneralizedInverseReport r =
        generalized_inverse_check(rep, inst.s.value(), std::min(3, power_bound(rep, c.n_max) - 1));
    if (!r.regular)
        return not_applicable("representation is not regular");
    Evaluation e;
    Decisions d(c);
    // Both residuals are already normalised by the operator norms.
    const bool svs = d(r.svs_residual, r.svs_residual <= c.tol.eq_rel);
    const bool vsv = d(r.vsv_residual, r.vsv_residual <= c.tol.eq_rel);
    for (double res : r.lemma_residuals)
        d(res, res <= c.tol.incl_abs);
    d.finish(e);
    if (!svs || !vsv)
        return not_applicable("S is not a generalized inverse");
    if (r.lemma_holds_up_to < r.lemma_bound)
        violation(e, "inclusion holds only up to m = " + std::to_string(r.lemma_holds_up_to) + " of "
                         + std::to_string(r.lemma_bound));
    return e;
}

Evaluation eval_regular_power(const Instance& inst, const TrialConfig& c)
{
    const CovariantRep& rep = inst.reps.at(0);
    const RegularPowerReport r = regular_pi_iff_power_pi(rep, power_bound(rep, c.n_max));
    if (r.applicable != Outcome::holds)
        return not_applicable("representation is not regular");
    Evaluation e;
    Decisions d(c);
    for (int m = 1; m <= r.bound; ++m) {
        const double res = partial_isometry_residual(rep.tilde_power(m));
        d(res, res <= c.tol.eq_rel);
    }
    d.finish(e);
    if (!r.consistent)
        violation(e, "Ṽ is PI but powers are PI only up to " + std::to_string(r.power_pi_up_to) + " of "
                         + std::to_string(r.bound));
    return e;
}

std::string index_list(const std::vector<Index>& v)
{
    std::string out = "{";
    for (size_t k = 0; k < v.size(); ++k)
        out += (k ? "," : "") + std::to_string(v[k]);
    return out + "}";
}

Evaluation eval_shift(const Instance& inst, const TrialConfig& c)
{
    const WeightedShiftSpec& spec = inst.shift.value();
    Evaluation e;
    Decisions d(c);
    for (int k = 1; k <= std::min(3, c.n_max); ++k)
        for (Index i = 1; i <= spec.n; ++i) {
            const auto formula = kernel_formula(spec, i, k);
            const auto brute = brute_force_kernel(spec, i, k, c.tol);
            if (formula != brute)
                violation(e, "kernel of V_" + std::to_string(i) + "^" + std::to_string(k) + ": formula "
                                 + index_list(formula) + ", truncated matrix " + index_list(brute));
        }
    const ShiftPiReport r = shift_pi_criterion(spec, c.n_max, c.tol);
    d(r.pi_residual, r.is_pi);
    d.finish(e);
    if (!r.equivalence_holds)
        violation(e, std::string("PI = ") + (r.is_pi ? "true" : "false") + ", unit weights off B = "
                         + (r.weights_unit_off_B ? "true" : "false"));
    if (r.is_pi && r.power_pi_up_to < r.power_bound)
        violation(e, "PI shift is power PI only up to " + std::to_string(r.power_pi_up_to));
    return e;
}

Evaluation eval_root(const Instance& inst, const TrialConfig& c)
{
    const RootReport r = root_criterion(inst.reps.at(0), inst.k);
    if (r.applicable != Outcome::holds)
        return not_applicable(r.reason);
    Evaluation e;
    Decisions d(c);
    d(r.residual_a, r.cond_a);
    d(r.residual_b, r.cond_b);
    d(r.rep_residual, r.rep_is_pi);
    d.finish(e);
    if (r.kernel_inclusion_residual > c.tol.incl_abs)
        violation(e, "N(I ⊗ Ṽ) is not inside N(Ṽ_k)");
    if (!r.equivalence_holds())
        violation(e, std::string("a = ") + (r.cond_a ? "true" : "false") + ", b = " + (r.cond_b ? "true" : "false")
                         + ", PI = " + (r.rep_is_pi ? "true" : "false"));
    if (r.cond_a && r.chain_holds && !r.cond_b)
        violation(e, "a and the chain inclusion hold but b fails");
    return e;
}

Evaluation eval_kernel_remark(const Instance& inst, const TrialConfig& c)
{
    const CovariantRep& rep = inst.reps.at(0);
    const GuptaReport r = gupta_criterion(rep, inst.k);
    if (r.applicable != Outcome::holds)
        return not_applicable(r.reason);
    Evaluation e;
    Decisions d(c);
    d(r.kernel_residual, r.kernels_equal);
    d(partial_isometry_residual(rep.tilde()), r.rep_is_pi);
    d.finish(e);
    if (!r.kernels_equal)
        return not_applicable("N(I ⊗ Ṽ) differs from N(Ṽ_2)");
    if (!r.consistent)
        violation(e, "kernels agree but Ṽ is not PI");
    return e;
}

Evaluation eval_wold(const Instance& inst, const TrialConfig& c)
{
    const CovariantRep& rep = inst.reps.at(0);
    const WoldReport r = wold_decompose(rep);
    if (r.applicable != Outcome::holds)
        return not_applicable(r.reason);
    Evaluation e;
    Decisions d(c);
    d(r.primal.direct_sum_residual, r.primal.direct_sum_residual <= c.tol.eq_rel);
    d(r.primal.orthogonality_residual, r.primal.orthogonality_residual <= c.tol.incl_abs);
    d(r.dual.direct_sum_residual, r.dual.direct_sum_residual <= c.tol.eq_rel);
    d(r.dual.orthogonality_residual, r.dual.orthogonality_residual <= c.tol.incl_abs);
    if (r.is_pi) {
        d(r.form_gap, r.form_gap <= c.tol.eq_rel);
        const double dual_gap = op_norm(cauchy_dual(rep.tilde(), c.tol) - rep.tilde());
        d(dual_gap, dual_gap <= c.tol.eq_rel);
        if (dual_gap > c.tol.eq_rel)
            violation(e, "Ṽ' differs from Ṽ by " + std::to_string(dual_gap));
        if (r.form_gap > c.tol.eq_rel)
            violation(e, "primal and dual forms differ by " + std::to_string(r.form_gap));
        if (inst.chain_dim >= 0) {
            // The fixture's chain block is exactly the part generated by the
            // wandering space.
            const Index n = rep.hilbert_dim();
            CMatrix p = CMatrix::Zero(n, n);
            for (Index k = 0; k < inst.chain_dim; ++k)
                p(k, k) = 1.0;
            const double gap = op_norm(r.primal.generated.projector() - p);
            d(gap, gap <= c.tol.eq_rel);
            if (gap > c.tol.eq_rel)
                violation(e, "generated part misses the chain block by " + std::to_string(gap));
        }
    }
    d.finish(e);
    if (!r.primal.valid(c.tol))
        violation(e, "primal decomposition is not an orthogonal direct sum");
    if (!r.dual.valid(c.tol))
        violation(e, "dual decomposition is not an orthogonal direct sum");
    return e;
}

Evaluation eval_product_pi(const Instance& inst, const TrialConfig& c)
{
    const ProductRep p(inst.reps);
    Evaluation e;
    Decisions d(c);
    const double res = partial_isometry_residual(p.stage(2));
    const bool pi = d(res, res <= c.tol.eq_rel);
    d.finish(e);
    if (!pi)
        violation(e, "product residual " + std::to_string(res));
    return e;
}

// ---- fixture parsing ----

std::string_view trim(std::string_view s)
{
    while (!s.empty() && s.front() == ' ')
        s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ')
        s.remove_suffix(1);
    return s;
}

// Splits "name(a, b(c, d))" into the name and its top-level arguments.
std::pair<std::string_view, std::vector<std::string_view>> split_kind(std::string_view kind)
{
    kind = trim(kind);
    const size_t open = kind.find('(');
    if (open == std::string_view::npos)
        return {kind, {}};
    if (kind.back() != ')')
        fail(ErrorKind::usage, "unbalanced parentheses in fixture kind '" + std::string(kind) + "'");
    std::vector<std::string_view> args;
    const std::string_view inner = kind.substr(open + 1, kind.size() - open - 2);
    int depth = 0;
    size_t start = 0;
    for (size_t p = 0; p < inner.size(); ++p) {
        if (inner[p] == '(')
            ++depth;
        else if (inner[p] == ')')
            --depth;
        else if (inner[p] == ',' && depth == 0) {
            args.push_back(trim(inner.substr(start, p - start)));
            start = p + 1;
        }
        if (depth < 0)
            fail(ErrorKind::usage, "unbalanced parentheses in fixture kind '" + std::string(kind) + "'");
    }
    if (depth != 0)
        fail(ErrorKind::usage, "unbalanced parentheses in fixture kind '" + std::string(kind) + "'");
    if (!trim(inner).empty())
        args.push_back(trim(inner.substr(start)));
    return {trim(kind.substr(0, open)), args};
}

} // namespace

// ---------------------------------------------------------------- theorem ids

const std::vector<TheoremId>& all_theorems()
{
    static const std::vector<TheoremId> ids = [] {
        std::vector<TheoremId> out;
        for (const TheoremInfo& t : kTheorems)
            out.push_back(t.id);
        return out;
    }();
    return ids;
}

const char* to_string(TheoremId id)
{
    return info(id).name;
}

TheoremId theorem_from_string(std::string_view name)
{
    for (const TheoremInfo& t : kTheorems)
        if (name == t.name)
            return t.id;
    std::string known;
    for (const TheoremInfo& t : kTheorems)
        known += std::string(known.empty() ? "" : ", ") + t.name;
    fail(ErrorKind::usage, "unknown theorem '" + std::string(name) + "'; known: " + known);
}

const char* statement(TheoremId id)
{
    return info(id).statement;
}

bool is_conjecture(TheoremId id)
{
    return id == TheoremId::product_pi;
}

// ---------------------------------------------------------------- config

void TrialConfig::validate() const
{
    tol.validate();
    if (trials < 1)
        fail(ErrorKind::usage, "trials must be at least 1");
    if (!(perturbation >= 100.0 * tol.eq_rel))
        fail(ErrorKind::usage, "perturbation must be at least 100 eq_rel");
    if (n_max < 1)
        fail(ErrorKind::usage, "n_max must be at least 1");
    if (jobs < 0)
        fail(ErrorKind::usage, "jobs must be nonnegative");
    if (tensor_cap < 1)
        fail(ErrorKind::usage, "tensor cap must be positive");
    if (max_regenerations < 0 || max_counterexamples < 0)
        fail(ErrorKind::usage, "regeneration and counterexample limits must be nonnegative");
    if (limits.max_hilbert_dim < 1 || limits.max_module_dim < 1 || limits.max_blocks < 1
        || limits.max_block_size < 1 || limits.max_multiplicity < 1)
        fail(ErrorKind::usage, "shape limits must be positive");
}

TrialConfig default_config(TheoremId id)
{
    TrialConfig c;
    switch (id) {
    case TheoremId::product_chain:
    case TheoremId::range_invariance:
    case TheoremId::power_chain:
    case TheoremId::power_step:
        c.limits = small_limits();
        break;
    default:
        break;
    }
    return c;
}

// ---------------------------------------------------------------- instances

Json to_json(const Instance& inst)
{
    Json reps = Json::array();
    for (const CovariantRep& r : inst.reps)
        reps.push_back(to_json(r));
    Json out{{"reps", std::move(reps)}};
    if (inst.shift)
        out["shift"] = to_json(*inst.shift);
    if (inst.s)
        out["s"] = to_json(*inst.s);
    if (inst.k > 0)
        out["k"] = inst.k;
    if (inst.chain_dim >= 0)
        out["chain_dim"] = inst.chain_dim;
    return out;
}

Instance instance_from_json(const Json& j, const Tolerance& tol, Index tensor_cap)
{
    Instance inst;
    if (!j.is_object())
        fail(ErrorKind::parse, "an instance is a JSON object");
    if (j.contains("reps"))
        for (const Json& r : j.at("reps"))
            inst.reps.push_back(rep_from_json(r, tol, tensor_cap));
    if (j.contains("shift"))
        inst.shift = shift_spec_from_json(j.at("shift"));
    if (j.contains("s"))
        inst.s = matrix_from_json(j.at("s"));
    if (j.contains("k") && j.at("k").is_number_integer())
        inst.k = j.at("k").get<int>();
    if (j.contains("chain_dim") && j.at("chain_dim").is_number_integer())
        inst.chain_dim = j.at("chain_dim").get<Index>();
    return inst;
}

std::uint64_t stream_id(TheoremId id, int trial, int attempt)
{
    return (static_cast<std::uint64_t>(id) + 1) << 56 | static_cast<std::uint64_t>(attempt) << 40
           | static_cast<std::uint64_t>(trial);
}

Instance generate(TheoremId id, const TrialConfig& c, int trial, int attempt)
{
    Rng rng(c.master_seed, stream_id(id, trial, attempt));
    Instance inst;
    switch (id) {
    case TheoremId::commuting_projections:
    case TheoremId::sufficient_intertwining:
    case TheoremId::pinv_chain:
        return pair_instance(rng, c, true);
    case TheoremId::product_pi:
        return pair_instance(rng, c, false);
    case TheoremId::product_chain: {
        const BlockShape s = random_block_shape(rng, c.limits);
        for (int i = 0; i < 3; ++i) {
            const BlockShape si = i == 0 ? s : redraw_module(rng, s, c.limits);
            // A co-isometric later factor keeps the chain PI one stage longer.
            const Index rank = (i > 0 && rng.coin()) ? std::numeric_limits<Index>::max() : -1;
            inst.reps.push_back(random_pi_rep(rng, si, c.tol, c.tensor_cap, rank));
        }
        return inst;
    }
    case TheoremId::defect_dilation: {
        const BlockShape s = random_block_shape(rng, c.limits);
        CovariantRep a = trial % 2 == 0 ? random_pi_rep(rng, s, c.tol, c.tensor_cap)
                                        : random_contractive_rep(rng, s, c.tol, c.tensor_cap);
        inst.reps = {std::move(a),
                     random_contractive_rep(rng, redraw_module(rng, s, c.limits), c.tol, c.tensor_cap)};
        return inst;
    }
    case TheoremId::range_invariance:
    case TheoremId::power_chain:
    case TheoremId::power_step:
        inst.reps.push_back(power_instance(rng, c));
        return inst;
    case TheoremId::inverse_lemma: {
        CovariantRep rep = with_cap(random_regular_rep(rng, c.limits, rng.coin(), c.tol), c.tensor_cap);
        inst.s = trial % 2 == 0 ? rep.pinv() : random_generalized_inverse(rng, rep);
        inst.reps.push_back(std::move(rep));
        return inst;
    }
    case TheoremId::regular_power:
        inst.reps.push_back(with_cap(random_regular_rep(rng, c.limits, rng.coin(), c.tol), c.tensor_cap));
        return inst;
    case TheoremId::shift_criterion:
        inst.shift = random_shift_spec(rng, rng.coin());
        return inst;
    case TheoremId::root:
        inst.reps.push_back(with_cap(random_root_fixture(rng, c.limits, rng.coin(), c.tol), c.tensor_cap));
        inst.k = rng.integer(0, 3) == 0 ? 3 : 2;
        return inst;
    case TheoremId::kernel_remark:
        if (rng.integer(0, 3) != 0)
            inst.reps.push_back(with_cap(random_aligned_kernel_rep(rng, rng.integer(1, c.limits.max_hilbert_dim), c.tol),
                                         c.tensor_cap));
        else
            inst.reps.push_back(with_cap(random_root_fixture(rng, c.limits, rng.coin(), c.tol), c.tensor_cap));
        inst.k = 2;
        return inst;
    case TheoremId::wold: {
        RegularFixture fx = random_regular_fixture(rng, c.limits, trial % 2 == 0, c.tol);
        inst.reps.push_back(with_cap(fx.rep, c.tensor_cap));
        inst.chain_dim = fx.chain_dim;
        return inst;
    }
    }
    fail(ErrorKind::usage, "unknown theorem id");
}

Evaluation evaluate(TheoremId id, const Instance& inst, const TrialConfig& c)
{
    switch (id) {
    case TheoremId::commuting_projections:
        return eval_commuting(inst, c);
    case TheoremId::sufficient_intertwining:
        return eval_intertwining(inst, c);
    case TheoremId::product_chain:
        return eval_chain(inst, c);
    case TheoremId::pinv_chain:
        return eval_pinv(inst, c);
    case TheoremId::defect_dilation:
        return eval_dilation(inst, c);
    case TheoremId::range_invariance:
    case TheoremId::power_chain:
    case TheoremId::power_step:
        return eval_powers(id, inst, c);
    case TheoremId::inverse_lemma:
        return eval_inverse(inst, c);
    case TheoremId::regular_power:
        return eval_regular_power(inst, c);
    case TheoremId::shift_criterion:
        return eval_shift(inst, c);
    case TheoremId::root:
        return eval_root(inst, c);
    case TheoremId::kernel_remark:
        return eval_kernel_remark(inst, c);
    case TheoremId::wold:
        return eval_wold(inst, c);
    case TheoremId::product_pi:
        return eval_product_pi(inst, c);
    }
    fail(ErrorKind::usage, "unknown theorem id");
}

// ---------------------------------------------------------------- engine

namespace {

enum class Status { pass, violation, skip };

struct TrialResult {
    Status status = Status::skip;
    int attempt = 0;
    int regenerations = 0;
    Evaluation eval;
    Json instance;
};

TrialResult run_trial(TheoremId id, const TrialConfig& c, int trial)
{
    TrialResult out;
    for (int attempt = 0; attempt <= c.max_regenerations; ++attempt) {
        out.attempt = attempt;
        Instance inst;
        try {
            inst = generate(id, c, trial, attempt);
            out.eval = evaluate(id, inst, c);
        } catch (const Error& e) {
            // Draws past the tensor cap cannot be evaluated; anything else
            // thrown while evaluating a statement is a failure of the statement
            // or of the library, and both deserve a counterexample.
            if (e.kind() == ErrorKind::resource) {
                out.eval = not_applicable(e.what());
                out.status = Status::skip;
                return out;
            }
            out.eval = Evaluation{};
            out.eval.violated = true;
            out.eval.detail = std::string("error (") + to_string(e.kind()) + "): " + e.what();
            out.status = Status::violation;
            out.instance = to_json(inst);
            return out;
        }
        if (out.eval.applicable && out.eval.borderline && attempt < c.max_regenerations) {
            ++out.regenerations;
            continue;
        }
        if (!out.eval.applicable || out.eval.borderline) {
            if (out.eval.applicable)
                out.eval.detail = "borderline after " + std::to_string(attempt) + " regenerations";
            out.status = Status::skip;
        } else if (out.eval.violated) {
            out.status = Status::violation;
            out.instance = to_json(inst);
        } else {
            out.status = Status::pass;
        }
        return out;
    }
    return out;
}

void parallel_for(int begin, int end, int jobs, const std::function<void(int)>& body)
{
    const int count = end - begin;
    if (count <= 0)
        return;
    const int workers = std::min(count, jobs);
    if (workers <= 1) {
        for (int i = begin; i < end; ++i)
            body(i);
        return;
    }
    std::atomic<int> next{begin};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < end; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error)
                        first_error = std::current_exception();
                }
            }
        });
    for (std::thread& t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

int resolve_jobs(int jobs)
{
    if (jobs > 0)
        return jobs;
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace

bool VerificationReport::passed() const
{
    return config.falsify ? equivalence_violations > 0 : equivalence_violations == 0;
}

VerificationReport verify(TheoremId id, const TrialConfig& config)
{
    config.validate();
    const int jobs = resolve_jobs(config.jobs);
    std::vector<TrialResult> results(static_cast<size_t>(config.trials));
    int done = 0;
    if (config.falsify) {
        // Batches keep the early stop deterministic: the report is cut at the
        // first violating trial, whichever worker found it.
        const int batch = std::max(8, 2 * jobs);
        bool found = false;
        while (done < config.trials && !found) {
            const int end = std::min(config.trials, done + batch);
            parallel_for(done, end, jobs,
                         [&](int t) { results[static_cast<size_t>(t)] = run_trial(id, config, t); });
            for (int t = done; t < end && !found; ++t)
                if (results[static_cast<size_t>(t)].status == Status::violation) {
                    found = true;
                    done = t + 1;
                }
            if (!found)
                done = end;
        }
    } else {
        parallel_for(0, config.trials, jobs,
                     [&](int t) { results[static_cast<size_t>(t)] = run_trial(id, config, t); });
        done = config.trials;
    }

    VerificationReport report;
    report.theorem = id;
    report.config = config;
    report.trials_run = done;
    report.min_negative_residual = std::numeric_limits<double>::infinity();
    for (int t = 0; t < done; ++t) {
        TrialResult& r = results[static_cast<size_t>(t)];
        report.regenerations += r.regenerations;
        if (r.status == Status::skip) {
            ++report.hypothesis_skips;
            continue;
        }
        report.max_residual = std::max(report.max_residual, r.eval.max_residual);
        report.max_positive_residual = std::max(report.max_positive_residual, r.eval.max_positive_residual);
        report.min_negative_residual = std::min(report.min_negative_residual, r.eval.min_negative_residual);
        if (r.status == Status::violation) {
            ++report.equivalence_violations;
            if (static_cast<int>(report.counterexamples.size()) < config.max_counterexamples)
                report.counterexamples.push_back(
                    {t, r.attempt, stream_id(id, t, r.attempt), r.eval.detail, std::move(r.instance)});
        }
    }
    return report;
}

Json to_json(const VerificationReport& report)
{
    const TrialConfig& c = report.config;
    const ShapeLimits& l = c.limits;
    Json config{{"master_seed", c.master_seed},
                {"trials", c.trials},
                {"perturbation", c.perturbation},
                {"n_max", c.n_max},
                {"tensor_cap", c.tensor_cap},
                {"max_regenerations", c.max_regenerations},
                {"limits",
                 Json{{"max_hilbert_dim", l.max_hilbert_dim},
                      {"max_module_dim", l.max_module_dim},
                      {"max_blocks", l.max_blocks},
                      {"max_block_size", l.max_block_size},
                      {"max_multiplicity", l.max_multiplicity},
                      {"scalar_only", l.scalar_only}}},
                {"tolerance", to_json(c.tol)}};
    Json examples = Json::array();
    for (const Counterexample& ce : report.counterexamples)
        examples.push_back(Json{{"trial", ce.trial},
                                {"attempt", ce.attempt},
                                {"stream", ce.stream},
                                {"detail", ce.detail},
                                {"instance", ce.instance}});
    return Json{{"theorem", to_string(report.theorem)},
                {"statement", statement(report.theorem)},
                {"conjecture", is_conjecture(report.theorem)},
                {"mode", c.falsify ? "falsify" : "verify"},
                {"config", std::move(config)},
                {"trials_run", report.trials_run},
                {"equivalence_violations", report.equivalence_violations},
                {"hypothesis_skips", report.hypothesis_skips},
                {"regenerations", report.regenerations},
                {"max_residual", report.max_residual},
                {"max_positive_residual", report.max_positive_residual},
                {"min_negative_residual", report.min_negative_residual},
                {"passed", report.passed()},
                {"counterexamples", std::move(examples)}};
}

bool replay_counterexample(TheoremId id, const Counterexample& c, const TrialConfig& config)
{
    try {
        const Instance inst = instance_from_json(c.instance, config.tol, config.tensor_cap);
        const Evaluation e = evaluate(id, inst, config);
        return e.applicable && e.violated;
    } catch (const Error& e) {
        // Violations recorded as errors replay as the same error.
        return e.kind() != ErrorKind::resource && c.detail.rfind("error (", 0) == 0;
    }
}

bool replay_from_seed(TheoremId id, const Counterexample& c, const TrialConfig& config)
{
    const Instance inst = generate(id, config, c.trial, c.attempt);
    return dump(to_json(inst)) == dump(c.instance) && replay_counterexample(id, c, config);
}

// ---------------------------------------------------------------- generators

CovariantRep random_partial_isometric_rep(const TrialConfig& config, std::uint64_t seed)
{
    Rng rng(config.master_seed, seed);
    return random_pi_rep(rng, random_block_shape(rng, config.limits), config.tol, config.tensor_cap);
}

CovariantRep random_partial_isometric_rep(const BlockShape& shape, std::uint64_t seed, const Tolerance& tol)
{
    Rng rng(seed);
    return random_pi_rep(rng, shape, tol);
}

CovariantRep random_contractive_rep(const TrialConfig& config, std::uint64_t seed)
{
    Rng rng(config.master_seed, seed);
    return random_contractive_rep(rng, random_block_shape(rng, config.limits), config.tol, config.tensor_cap);
}

WeightedShiftSpec random_shift_spec(Rng& rng, bool unit_weights)
{
    WeightedShiftSpec spec;
    spec.n = rng.integer(1, 3);
    spec.trunc = std::max(rng.integer(2, 8) * spec.n * spec.n * spec.n, minimal_trunc(spec.n, 3));
    const Index zeros = rng.integer(0, 4);
    for (Index z = 0; z < zeros; ++z)
        spec.zero_set.insert(rng.integer(0, spec.trunc / 2));
    if (!unit_weights) {
        const Index overrides = rng.integer(1, 4);
        for (Index o = 0; o < overrides; ++o)
            spec.weights[{rng.integer(1, spec.n), rng.integer(0, spec.trunc / (2 * spec.n))}] = rng.uniform(0.2, 1.5);
    }
    return spec;
}

CovariantRep random_structured_fixture(std::string_view kind, Rng& rng, const FixtureOptions& options)
{
    const auto [name, args] = split_kind(kind);
    const Index d = options.dim;
    const Tolerance& tol = options.tol;
    const auto no_args = [&, &name = name, &args = args] {
        if (!args.empty())
            fail(ErrorKind::usage, "fixture '" + std::string(name) + "' takes no arguments");
    };
    if (d < 1)
        fail(ErrorKind::usage, "fixture dimension must be at least 1");

    if (name == "isometric") {
        no_args();
        const BlockShape shape{FdCStarAlgebra({1, 1}), {{0, 0}, {1, 0}}, {d, d + 1}};
        return rep_from_row_blocks(shape, {CMatrix(d, 0), random_partial_isometry(rng, d + 1, d, d)}, tol,
                                   options.tensor_cap);
    }
    if (name == "unitary") {
        no_args();
        return with_cap(scalar_unitary(rng, d, tol), options.tensor_cap);
    }
    if (name == "coisometric") {
        no_args();
        return random_pi_rep(rng, scalar_shape(d, 2), tol, options.tensor_cap, d);
    }
    if (name == "truncated_shift") {
        no_args();
        return with_cap(truncated_shift(d, tol), options.tensor_cap);
    }
    if (name == "weighted_shift") {
        no_args();
        return with_cap(build_shift(options.shift, tol).rep, options.tensor_cap);
    }
    if (name == "perturbed_pi") {
        if (args.size() != 1)
            fail(ErrorKind::usage, "perturbed_pi takes one argument, the perturbation size");
        double eps = 0.0;
        try {
            eps = std::stod(std::string(args[0]));
        } catch (const std::exception&) {
            fail(ErrorKind::usage, "perturbed_pi needs a number, got '" + std::string(args[0]) + "'");
        }
        if (!(eps > 0.0 && eps < 1.0))
            fail(ErrorKind::usage, "perturbed_pi needs 0 < eps < 1");
        const CovariantRep pi = random_pi_rep(rng, scalar_shape(d, 2), tol, options.tensor_cap, rng.integer(1, d));
        // ||m m* m - m|| = (1 - eps) eps (2 - eps) on the unit singular values.
        std::vector<CMatrix> v = pi.v_on_basis();
        for (CMatrix& m : v)
            m *= 1.0 - eps;
        return CovariantRep(pi.correspondence_ptr(), pi.sigma(), std::move(v), tol, options.tensor_cap);
    }
    if (name == "direct_sum") {
        if (args.empty())
            fail(ErrorKind::usage, "direct_sum needs at least one summand");
        CovariantRep out = random_structured_fixture(args[0], rng, options);
        for (size_t k = 1; k < args.size(); ++k)
            out = direct_sum(out, random_structured_fixture(args[k], rng, options));
        return out;
    }
    fail(ErrorKind::usage, "unknown fixture kind '" + std::string(name)
                               + "'; known: isometric, unitary, coisometric, truncated_shift, weighted_shift, "
                                 "perturbed_pi(eps), direct_sum(...)");
}

} // namespace pirep
