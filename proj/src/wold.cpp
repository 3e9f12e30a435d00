#include "pirep/wold.hpp"

#include "pirep/errors.hpp"
#include "pirep/powers.hpp"

#include <algorithm>
#include <string>

namespace pirep {

CMatrix cauchy_dual(const CMatrix& tilde, const Tolerance& tol)
{
    require_finite(tilde, "cauchy dual");
    return tilde * pseudoinverse(tilde.adjoint() * tilde, tol);
}

CMatrix cauchy_dual(const CovariantRep& rep)
{
    const Tolerance& tol = rep.tolerance();
    CMatrix dual = cauchy_dual(rep.tilde(), tol);
    if (partial_isometry_residual(rep.tilde()) <= tol.eq_rel) {
        const double gap = op_norm(dual - rep.tilde());
        if (gap > tol.eq_rel * std::max(1.0, op_norm(rep.tilde())))
            fail(ErrorKind::numeric_failure,
                 "Cauchy dual of a partial isometry differs from Ṽ by " + std::to_string(gap));
    }
    return dual;
}

BiRegularityReport bi_regularity(const CovariantRep& rep, int n_max)
{
    if (n_max < 1)
        fail(ErrorKind::usage, "n_max must be at least 1");
    const Tolerance& tol = rep.tolerance();
    BiRegularityReport out;
    if (!is_regular(rep))
        return out;
    out.applicable = Outcome::holds;
    out.n_max = std::min(n_max, max_tensor_power(rep) - 1);
    out.bi_regular = true;
    out.adjoint_regular = true;
    const CMatrix& pinv = rep.pinv();
    const CMatrix adjoint = rep.tilde().adjoint();
    for (int n = 1; n <= out.n_max; ++n) {
        const Subspace k = kernel_of(rep.amplify(n, pinv, 0, 1), tol);
        const double r = inclusion_residual(k, Subspace::span_of(rep.pinv_chain(n), tol));
        out.residuals.push_back(r);
        out.bi_regular = out.bi_regular && r <= tol.incl_abs;

        const Subspace ka = kernel_of(rep.amplify(n, adjoint, 0, 1), tol);
        const double ra = inclusion_residual(ka, Subspace::span_of(rep.tilde_power(n).adjoint(), tol));
        out.adjoint_residuals.push_back(ra);
        out.adjoint_regular = out.adjoint_regular && ra <= tol.incl_abs;
    }
    return out;
}

bool is_bi_regular(const CovariantRep& rep, int n_max)
{
    const BiRegularityReport report = bi_regularity(rep, n_max);
    return report.applicable == Outcome::holds && report.bi_regular;
}

Subspace generated_invariant_subspace(const CovariantRep& rep, const CMatrix& x, const Subspace& w, int bound)
{
    const Tolerance& tol = rep.tolerance();
    const Index d = rep.hilbert_dim();
    if (w.ambient_dim() != d)
        fail(ErrorKind::dimension, "W must be a subspace of H");
    if (x.rows() != rep.tilde().rows() || x.cols() != rep.tilde().cols())
        fail(ErrorKind::dimension, "operator must map E ⊗ H to H");
    if (bound < 0)
        bound = static_cast<int>(d);

    const StarRepresentation& sigma = rep.sigma();
    CMatrix moved(d, w.dim() * sigma.algebra().dim());
    for (Index b = 0; b < sigma.algebra().dim(); ++b)
        moved.middleCols(b * w.dim(), w.dim()) = sigma.basis_image(b) * w.frame();
    const Subspace seed = Subspace::span_of(moved, tol);

    Subspace current = seed;
    for (int j = 0; j < bound && current.dim() < d; ++j) {
        const CMatrix lifted = rep.amplify(1, current.projector(), 0, 0);
        Subspace next = join(seed, Subspace::span_of(x * lifted, tol), tol);
        if (next.dim() == current.dim())
            break;
        current = std::move(next);
    }
    return current;
}

namespace {

WoldResult assemble(Subspace wandering, Subspace generated, Subspace residual)
{
    WoldResult out;
    const Index d = wandering.ambient_dim();
    out.direct_sum_residual =
        op_norm(generated.projector() + residual.projector() - CMatrix::Identity(d, d));
    out.orthogonality_residual = overlap(generated, residual);
    out.wandering = std::move(wandering);
    out.generated = std::move(generated);
    out.residual = std::move(residual);
    return out;
}

double gap(const Subspace& a, const Subspace& b)
{
    return op_norm(a.projector() - b.projector());
}

} // namespace

WoldReport wold_decompose(const CovariantRep& rep, int bound)
{
    const Tolerance& tol = rep.tolerance();
    WoldReport out;
    const Subspace wandering = ortho_complement(rep.range(1));
    const CMatrix dual = cauchy_dual(rep);

    out.primal = assemble(wandering, generated_invariant_subspace(rep, rep.tilde(), wandering, bound),
                          generalized_range(rep, dual));
    out.dual = assemble(wandering, generated_invariant_subspace(rep, dual, wandering, bound), generalized_range(rep));
    out.form_gap = std::max(gap(out.primal.generated, out.dual.generated), gap(out.primal.residual, out.dual.residual));

    out.is_pi = partial_isometry_residual(rep.tilde()) <= tol.eq_rel;
    const BiRegularityReport bi = bi_regularity(rep);
    out.regular = bi.applicable == Outcome::holds;
    out.bi_regular = out.regular && bi.bi_regular;
    if (!out.regular)
        out.reason = "representation is not regular";
    else if (!out.bi_regular && !out.is_pi)
        out.reason = "representation is not bi-regular";
    else
        out.applicable = Outcome::holds;
    return out;
}

} // namespace pirep
