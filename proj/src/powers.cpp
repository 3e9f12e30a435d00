#include "pirep/powers.hpp"

#include "pirep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pirep {

namespace {

void require_power(int m)
{
    if (m < 1)
        fail(ErrorKind::domain, "power index must be at least 1, got " + std::to_string(m));
}

int max_power(const CovariantRep& rep)
{
    return max_tensor_power(rep);
}

bool is_pi(const CMatrix& m, const Tolerance& tol)
{
    return partial_isometry_residual(m) <= tol.eq_rel;
}

Subspace initial_space(const CMatrix& m, const Tolerance& tol)
{
    return Subspace::span_of(m.adjoint(), tol);
}

} // namespace

int max_tensor_power(const CovariantRep& rep)
{
    const double n = static_cast<double>(rep.correspondence().module_dim());
    double formal = static_cast<double>(rep.hilbert_dim());
    int m = 0;
    while (m < 64) {
        formal *= n;
        if (formal > static_cast<double>(rep.tensor_cap()) || n < 1.0)
            break;
        ++m;
    }
    return n <= 1.0 ? 64 : m;
}

InclusionCheck kernel_chain_condition(const CovariantRep& rep, int m)
{
    require_power(m);
    if (m == 1)
        return {};
    const Tolerance& tol = rep.tolerance();
    const CMatrix x = rep.amplify(m - 1, rep.tilde(), 1, 0);
    InclusionCheck out;
    out.residual = invariance_residual(x, initial_space(rep.tilde_power(m), tol),
                                       initial_space(rep.tilde_power(m - 1), tol));
    out.holds = out.residual <= tol.incl_abs;
    return out;
}

InclusionCheck range_invariance_condition(const CovariantRep& rep, int m)
{
    require_power(m);
    if (m == 1)
        return {};
    const Tolerance& tol = rep.tolerance();
    const CMatrix q = rep.amplify(m - 1, rep.tilde() * rep.tilde().adjoint(), 0, 0);
    const Subspace kernel = rep.kernel(m - 1);
    InclusionCheck out;
    out.residual = invariance_residual(q, kernel, kernel);
    out.holds = out.residual <= tol.incl_abs;
    return out;
}

bool PowerReport::consistent() const
{
    if (applicable != Outcome::holds)
        return true;
    bool all_pi = true;
    bool all_chain = true;
    for (size_t m = 0; m < pi_flags.size(); ++m) {
        all_pi = all_pi && pi_flags[m];
        all_chain = all_chain && chain_flags[m];
        if (all_pi != all_chain || chain_flags[m] != range_flags[m])
            return false;
    }
    return true;
}

PowerReport power_report(const CovariantRep& rep, int n_max)
{
    if (n_max < 1)
        fail(ErrorKind::usage, "n_max must be at least 1");
    const Tolerance& tol = rep.tolerance();
    PowerReport out;
    out.n_max = n_max;
    if (!is_pi(rep.tilde(), tol))
        return out;
    out.applicable = Outcome::holds;
    for (int m = 1; m <= n_max; ++m) {
        const double r = partial_isometry_residual(rep.tilde_power(m));
        const InclusionCheck chain = kernel_chain_condition(rep, m);
        const InclusionCheck range = range_invariance_condition(rep, m);
        out.pi_residuals.push_back(r);
        out.pi_flags.push_back(r <= tol.eq_rel);
        out.chain_residuals.push_back(chain.residual);
        out.chain_flags.push_back(chain.holds);
        out.range_residuals.push_back(range.residual);
        out.range_flags.push_back(range.holds);
    }
    return out;
}

Subspace generalized_range(const CovariantRep& rep)
{
    return generalized_range(rep, rep.tilde());
}

Subspace generalized_range(const CovariantRep& rep, const CMatrix& x)
{
    const Tolerance& tol = rep.tolerance();
    if (x.rows() != rep.tilde().rows() || x.cols() != rep.tilde().cols())
        fail(ErrorKind::dimension, "operator must map E ⊗ H to H");
    Subspace current = Subspace::whole(rep.hilbert_dim());
    // Ranges decrease, and one repeated dimension means they have stabilised.
    for (Index step = 0; step <= rep.hilbert_dim(); ++step) {
        if (current.empty())
            return current;
        const CMatrix lifted = rep.amplify(1, current.projector(), 0, 0);
        Subspace next = Subspace::span_of(x * lifted, tol);
        if (next.dim() == current.dim())
            return next;
        current = std::move(next);
    }
    return current;
}

RegularityCheck regularity(const CovariantRep& rep)
{
    const Tolerance& tol = rep.tolerance();
    RegularityCheck out;
    out.generalized_range = generalized_range(rep);
    const Subspace spread = Subspace::span_of(rep.amplify(1, out.generalized_range.projector(), 0, 0), tol);
    out.residual = inclusion_residual(rep.kernel(1), spread);
    out.regular = out.residual <= tol.incl_abs;
    return out;
}

bool is_regular(const CovariantRep& rep)
{
    return regularity(rep).regular;
}

GeneralizedInverseReport generalized_inverse_check(const CovariantRep& rep, const CMatrix& s, int bound)
{
    const Tolerance& tol = rep.tolerance();
    const CMatrix& v = rep.tilde();
    if (s.rows() != v.cols() || s.cols() != v.rows())
        fail(ErrorKind::dimension, "S must map H (" + std::to_string(v.rows()) + ") to E ⊗ H ("
                                       + std::to_string(v.cols()) + "), got " + std::to_string(s.rows()) + "x"
                                       + std::to_string(s.cols()));
    require_finite(s, "generalized inverse");
    GeneralizedInverseReport out;
    const double ns = op_norm(s);
    const double nv = op_norm(v);
    out.svs_residual = op_norm(s * v * s - s) / std::max(1.0, ns * nv * ns);
    out.vsv_residual = op_norm(v * s * v - v) / std::max(1.0, nv * ns * nv);
    out.is_gen_inverse = out.svs_residual <= tol.eq_rel && out.vsv_residual <= tol.eq_rel;
    out.regular = is_regular(rep);
    if (!out.is_gen_inverse || !out.regular)
        return out;
    out.lemma_bound = std::min(bound, max_power(rep) - 1);
    bool running = true;
    for (int m = 1; m <= out.lemma_bound; ++m) {
        const CMatrix lifted = rep.amplify(m, s, 0, 1);
        const double r = invariance_residual(lifted, rep.kernel(m), rep.kernel(m + 1));
        out.lemma_residuals.push_back(r);
        running = running && r <= tol.incl_abs;
        if (running)
            out.lemma_holds_up_to = m;
    }
    return out;
}

RegularPowerReport regular_pi_iff_power_pi(const CovariantRep& rep, int bound)
{
    const Tolerance& tol = rep.tolerance();
    RegularPowerReport out;
    if (!is_regular(rep))
        return out;
    out.applicable = Outcome::holds;
    out.is_pi = is_pi(rep.tilde(), tol);
    out.bound = std::min(bound, max_power(rep));
    for (int m = 1; m <= out.bound; ++m) {
        if (!is_pi(rep.tilde_power(m), tol))
            break;
        out.power_pi_up_to = m;
    }
    out.consistent = !out.is_pi || out.power_pi_up_to == out.bound;
    return out;
}

namespace {

// Shared hypotheses of the root theorem and its kernel remark.
bool root_hypotheses(const CovariantRep& rep, int k, Outcome& applicable, std::string& reason)
{
    if (k < 2)
        fail(ErrorKind::usage, "the root criterion needs k >= 2, got " + std::to_string(k));
    const Tolerance& tol = rep.tolerance();
    applicable = Outcome::not_applicable;
    const double norm = op_norm(rep.tilde());
    if (norm > 1.0 + tol.eq_rel) {
        reason = "representation is not contractive (norm " + std::to_string(norm) + ")";
        return false;
    }
    if (!is_full(rep.correspondence(), tol)) {
        reason = "correspondence is not full";
        return false;
    }
    if (k > max_power(rep))
        fail(ErrorKind::resource, "E^⊗" + std::to_string(k) + " ⊗ H exceeds the tensor cap");
    if (!is_pi(rep.tilde_power(k), tol)) {
        reason = "Ṽ_" + std::to_string(k) + " is not partial isometric";
        return false;
    }
    applicable = Outcome::holds;
    return true;
}

} // namespace

RootReport root_criterion(const CovariantRep& rep, int k)
{
    RootReport out;
    out.k = k;
    if (!root_hypotheses(rep, k, out.applicable, out.reason))
        return out;
    const Tolerance& tol = rep.tolerance();
    const CMatrix x = rep.amplify(k - 1, rep.tilde(), 1, 0);
    const Subspace nk = rep.kernel(k);
    const Subspace nx = kernel_of(x, tol);
    out.kernel_inclusion_residual = inclusion_residual(nx, nk);
    if (out.kernel_inclusion_residual > tol.incl_abs)
        out.reason = "numeric inconsistency: N(X) is not inside N(Ṽ_k)";
    const Subspace d = intersect(nk, ortho_complement(nx), tol);

    if (!d.empty()) {
        const CMatrix xd = x * d.frame();
        out.residual_a = op_norm(xd.adjoint() * xd - CMatrix::Identity(d.dim(), d.dim()));
    }
    out.cond_a = out.residual_a <= tol.eq_rel;
    out.residual_b = overlap(image(x, ortho_complement(nk), tol), image(x, d, tol));
    out.cond_b = out.residual_b <= tol.incl_abs;
    out.rep_residual = partial_isometry_residual(rep.tilde());
    out.rep_is_pi = out.rep_residual <= tol.eq_rel;
    out.chain_holds = kernel_chain_condition(rep, k).holds;
    return out;
}

GuptaReport gupta_criterion(const CovariantRep& rep, int k)
{
    GuptaReport out;
    Outcome hyp = Outcome::not_applicable;
    if (!root_hypotheses(rep, k, hyp, out.reason))
        return out;
    const Tolerance& tol = rep.tolerance();
    const Subspace n1 = kernel_of(rep.amplify(1, rep.tilde(), 1, 0), tol);
    const Subspace n2 = rep.kernel(2);
    out.kernel_residual = std::max(inclusion_residual(n1, n2), inclusion_residual(n2, n1));
    out.kernels_equal = out.kernel_residual <= tol.incl_abs;
    out.rep_is_pi = is_pi(rep.tilde(), tol);
    if (!out.kernels_equal) {
        out.reason = "N(I_E ⊗ Ṽ) differs from N(Ṽ_2)";
        return out;
    }
    out.applicable = Outcome::holds;
    out.consistent = out.rep_is_pi;
    return out;
}

} // namespace pirep
