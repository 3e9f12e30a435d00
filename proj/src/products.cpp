#include "pirep/products.hpp"

#include "pirep/errors.hpp"
#include "pirep/random.hpp"

#include <algorithm>
#include <string>

namespace pirep {

namespace {

size_t at(int i)
{
    return static_cast<size_t>(i);
}

CMatrix identity(Index n)
{
    return CMatrix::Identity(n, n);
}

void require_pi(const CovariantRep& rep, const std::string& what)
{
    const double r = partial_isometry_residual(rep.tilde());
    if (r > rep.tolerance().eq_rel)
        fail(ErrorKind::precondition, what + " is not partial isometric (residual " + std::to_string(r) + ")");
}

void require_contractive(const CovariantRep& rep, const std::string& what)
{
    const double n = op_norm(rep.tilde());
    if (n > 1.0 + rep.tolerance().eq_rel)
        fail(ErrorKind::precondition, what + " is not contractive (norm " + std::to_string(n) + ")");
}

} // namespace

const char* to_string(Outcome o)
{
    switch (o) {
    case Outcome::holds:
        return "holds";
    case Outcome::fails:
        return "fails";
    case Outcome::not_applicable:
        return "not_applicable";
    }
    return "unknown";
}

ProductRep::ProductRep(std::vector<CovariantRep> factors) : factors_(std::move(factors))
{
    if (factors_.empty())
        fail(ErrorKind::composition, "a product needs at least one factor");
    const StarRepresentation& sigma = factors_.front().sigma();
    const Tolerance& tol = factors_.front().tolerance();
    Index cap = factors_.front().tensor_cap();
    for (size_t i = 1; i < factors_.size(); ++i) {
        if (!(factors_[i].sigma() == sigma))
            fail(ErrorKind::composition, "factor " + std::to_string(i + 1) + " uses a different σ or H");
        cap = std::min(cap, factors_[i].tensor_cap());
    }

    double formal = static_cast<double>(sigma.dim());
    for (const CovariantRep& f : factors_) {
        formal *= static_cast<double>(f.correspondence().module_dim());
        if (formal > static_cast<double>(cap))
            fail(ErrorKind::resource, "product tensor space has formal dimension above the tensor cap "
                                          + std::to_string(cap));
    }

    modules_.push_back(std::make_shared<const FdCorrespondence>(trivial_correspondence(sigma.algebra())));
    spaces_.push_back(TensorSpace::base(sigma));
    stages_.push_back(identity(sigma.dim()));
    amplified_.emplace_back();
    for (int i = 1; i <= size(); ++i) {
        const CovariantRep& f = factor(i);
        if (i == 1)
            modules_.push_back(f.correspondence_ptr());
        else
            modules_.push_back(
                std::make_shared<const FdCorrespondence>(tensor_product(*modules_[at(i - 1)], f.correspondence())));
        spaces_.push_back(TensorSpace::interior(modules_[at(i)], sigma, tol));
        if (i == 1)
            amplified_.push_back(f.tilde());
        else
            amplified_.push_back(
                pirep::amplify(spaces_[at(i)], spaces_[at(i - 1)], f.space(1), f.space(0), f.tilde(), tol));
        stages_.push_back(stages_[at(i - 1)] * amplified_[at(i)]);
    }

    // T^{(i)}(ξ_1 ⊗ ... ⊗ ξ_i)h = V^{(1)}(ξ_1) ... V^{(i)}(ξ_i)h on random simple tensors.
    const Index d = sigma.dim();
    for (int i = 2; i <= size(); ++i) {
        Rng rng(0x9c0d, static_cast<std::uint64_t>(i));
        for (int t = 0; t < 20; ++t) {
            CVector h(d);
            for (Index j = 0; j < d; ++j)
                h(j) = rng.complex_normal();
            CVector simple = h;
            CVector expected = h;
            double bound = h.norm();
            for (int f = i; f >= 1; --f) {
                const std::vector<CMatrix>& v = factor(f).v_on_basis();
                CVector c(static_cast<Index>(v.size()));
                CMatrix vc = CMatrix::Zero(d, d);
                for (size_t a = 0; a < v.size(); ++a) {
                    c(static_cast<Index>(a)) = rng.complex_normal();
                    vc += c(static_cast<Index>(a)) * v[a];
                }
                simple = kron(c, simple);
                expected = vc * expected;
                bound *= std::max(1.0, op_norm(vc));
            }
            const double err = (stages_[at(i)] * spaces_[at(i)].embed_rows(simple) - expected).norm();
            if (err > tol.eq_rel * bound)
                fail(ErrorKind::numeric_failure, "T̃^(" + std::to_string(i)
                                                     + ") disagrees with the product of the V's on a simple tensor");
        }
    }
}

const std::shared_ptr<const FdCorrespondence>& ProductRep::module(int i) const
{
    if (i < 0 || i > size())
        fail(ErrorKind::domain, "stage index out of range");
    return modules_[at(i)];
}

const TensorSpace& ProductRep::space(int i) const
{
    if (i < 0 || i > size())
        fail(ErrorKind::domain, "stage index out of range");
    return spaces_[at(i)];
}

const CMatrix& ProductRep::stage(int i) const
{
    if (i < 0 || i > size())
        fail(ErrorKind::domain, "stage index out of range");
    return stages_[at(i)];
}

const CMatrix& ProductRep::amplified_factor(int i) const
{
    if (i < 1 || i > size())
        fail(ErrorKind::domain, "factor index out of range");
    return amplified_[at(i)];
}

CMatrix ProductRep::amplified_factor_pinv(int i) const
{
    if (i < 1 || i > size())
        fail(ErrorKind::domain, "factor index out of range");
    const CovariantRep& f = factor(i);
    if (i == 1)
        return f.pinv();
    return pirep::amplify(spaces_[at(i - 1)], spaces_[at(i)], f.space(0), f.space(1), f.pinv(), tolerance());
}

CMatrix ProductRep::amplify_on_h(int i, const CMatrix& x) const
{
    if (i < 0 || i > size())
        fail(ErrorKind::domain, "stage index out of range");
    if (i == 0)
        return x;
    return pirep::amplify(spaces_[at(i)], spaces_[at(i)], spaces_[0], spaces_[0], x, tolerance());
}

CovariantRep ProductRep::as_rep(int i) const
{
    return CovariantRep::from_tilde(module(i), sigma(), stage(i), tolerance(), factors_.front().tensor_cap());
}

IntertwiningReport sufficient_intertwining_check(const CovariantRep& rep1, const CovariantRep& rep2)
{
    const ProductRep product({rep1, rep2});
    const Tolerance& tol = product.tolerance();
    IntertwiningReport out;
    out.product_residual = partial_isometry_residual(product.stage(2));
    out.product_is_pi = out.product_residual <= tol.eq_rel;
    if (partial_isometry_residual(rep1.tilde()) > tol.eq_rel || partial_isometry_residual(rep2.tilde()) > tol.eq_rel)
        return out;
    const CMatrix& v1 = rep1.tilde();
    const CMatrix q2 = rep2.tilde() * rep2.tilde().adjoint();
    out.residual = op_norm(v1 * product.amplify_on_h(1, q2) - q2 * v1);
    out.condition = out.residual <= tol.eq_rel * std::max(1.0, op_norm(v1)) ? Outcome::holds : Outcome::fails;
    out.conclusion_consistent = out.condition != Outcome::holds || out.product_is_pi;
    return out;
}

CommutingProjectionReport commuting_projection_test(const CovariantRep& rep1, const CovariantRep& rep2)
{
    require_pi(rep1, "first factor");
    require_pi(rep2, "second factor");
    const ProductRep product({rep1, rep2});
    const Tolerance& tol = product.tolerance();
    const CMatrix e = rep1.tilde().adjoint() * rep1.tilde();
    const CMatrix f = product.amplify_on_h(1, rep2.tilde() * rep2.tilde().adjoint());
    CommutingProjectionReport out;
    out.product_residual = partial_isometry_residual(product.stage(2));
    out.product_is_pi = out.product_residual <= tol.eq_rel;
    out.commutator_norm = op_norm(e * f - f * e);
    out.projections_commute = out.commutator_norm <= tol.eq_rel;
    out.ef_norm = op_norm(e * f);
    return out;
}

bool ChainReport::verdicts_agree() const
{
    for (int k = 1; k < 4; ++k)
        if (cumulative[at(k)] != cumulative[0])
            return false;
    return true;
}

double ChainReport::max_residual() const
{
    double m = 0.0;
    for (const auto& r : residuals)
        for (double x : r)
            m = std::max(m, x);
    return m;
}

ChainReport erdelyi_chain_test(const ProductRep& product)
{
    for (int i = 1; i <= product.size(); ++i)
        require_pi(product.factor(i), "factor " + std::to_string(i));
    const Tolerance& tol = product.tolerance();
    ChainReport out;
    std::array<bool, 4> running{true, true, true, true};
    for (int j = 2; j <= product.size(); ++j) {
        const CMatrix& prev = product.stage(j - 1);
        const CMatrix& w = product.amplified_factor(j);
        const Subspace prev_initial = Subspace::span_of(prev.adjoint(), tol);
        const Subspace w_range = Subspace::span_of(w, tol);

        std::array<double, 4> r{};
        r[0] = partial_isometry_residual(product.stage(j));
        r[1] = invariance_residual(w * w.adjoint(), prev_initial, prev_initial);
        r[2] = invariance_residual(prev.adjoint() * prev, w_range, w_range);
        const CMatrix q = prev_initial.projector() * w_range.projector();
        r[3] = op_norm(q * q - q);

        const std::array<double, 4> limit{tol.eq_rel, tol.incl_abs, tol.incl_abs, tol.eq_rel};
        out.stages.push_back(j);
        for (size_t k = 0; k < 4; ++k) {
            const bool ok = r[k] <= limit[k];
            running[k] = running[k] && ok;
            out.residuals[k].push_back(r[k]);
            out.stagewise[k].push_back(ok);
            out.cumulative[k].push_back(running[k]);
        }
    }
    return out;
}

PinvChainReport product_pinv_test(const ProductRep& product)
{
    const Tolerance& tol = product.tolerance();
    const int n = product.size();
    PinvChainReport out;
    out.factors_pi = true;
    for (int i = 1; i <= n; ++i)
        out.factors_pi = out.factors_pi && partial_isometry_residual(product.factor(i).tilde()) <= tol.eq_rel;
    const CMatrix& t = product.stage(n);
    out.product_residual = partial_isometry_residual(t);
    out.is_pi = out.product_residual <= tol.eq_rel;
    CMatrix chain = product.amplified_factor_pinv(1);
    for (int i = 2; i <= n; ++i)
        chain = product.amplified_factor_pinv(i) * chain;
    const CMatrix pinv = pseudoinverse(t, tol);
    out.chain_residual = op_norm(pinv - chain) / std::max(1.0, op_norm(pinv));
    out.pinv_factors_match = out.chain_residual <= tol.eq_rel;
    return out;
}

CMatrix contractive_dilation(const CMatrix& tilde, const Tolerance& tol)
{
    const Index d = tilde.rows();
    const Index k = tilde.cols();
    CMatrix m = CMatrix::Zero(2 * d, k + d);
    m.topLeftCorner(d, k) = tilde;
    m.block(0, k, d, d) = psd_sqrt(identity(d) - tilde * tilde.adjoint(), tol);
    return m;
}

DefectDilationReport defect_dilation_test(const CovariantRep& rep1, const CovariantRep& rep2)
{
    require_contractive(rep1, "first factor");
    require_contractive(rep2, "second factor");
    const ProductRep product({rep1, rep2});
    const Tolerance& tol = product.tolerance();
    const Index d = rep1.hilbert_dim();
    const CMatrix& t = product.stage(2);
    const CMatrix defect = psd_sqrt(identity(d) - rep2.tilde() * rep2.tilde().adjoint(), tol);
    const CMatrix corner = rep1.tilde() * product.amplify_on_h(1, defect);

    DefectDilationReport out;
    out.m = CMatrix::Zero(2 * d, t.cols() + corner.cols());
    out.m.topLeftCorner(d, t.cols()) = t;
    out.m.block(0, t.cols(), d, corner.cols()) = corner;
    out.m_residual = partial_isometry_residual(out.m);
    out.m_is_pi = out.m_residual <= tol.eq_rel;
    out.rep1_residual = partial_isometry_residual(rep1.tilde());
    out.rep1_is_pi = out.rep1_residual <= tol.eq_rel;
    out.single_dilation_residual = partial_isometry_residual(contractive_dilation(rep1.tilde(), tol));
    out.single_dilation_is_pi = out.single_dilation_residual <= tol.eq_rel;
    return out;
}

} // namespace pirep
