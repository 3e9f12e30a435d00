#include "pirep/covrep.hpp"

#include "pirep/errors.hpp"
#include "pirep/random.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <string>

namespace pirep {

namespace {

size_t at(Index i)
{
    return static_cast<size_t>(i);
}

bool same_correspondence(const FdCorrespondence& a, const FdCorrespondence& b)
{
    if (&a == &b)
        return true;
    if (!(a.algebra() == b.algebra()) || a.module_dim() != b.module_dim())
        return false;
    const auto equal = [](const std::vector<CMatrix>& x, const std::vector<CMatrix>& y) {
        for (size_t i = 0; i < x.size(); ++i)
            if (x[i] != y[i])
                return false;
        return true;
    };
    return equal(a.gram_entries(), b.gram_entries()) && equal(a.left_actions(), b.left_actions())
           && equal(a.right_actions(), b.right_actions());
}

} // namespace

struct CovariantRep::Cache {
    std::mutex mutex;
    std::map<int, std::shared_ptr<const FdCorrespondence>> modules;
    std::map<int, std::shared_ptr<const TensorSpace>> spaces;
    std::map<int, std::shared_ptr<const CMatrix>> powers;
    std::shared_ptr<const CMatrix> pinv;
};

CovariantRep::CovariantRep(std::shared_ptr<const FdCorrespondence> e, StarRepresentation sigma,
                           std::vector<CMatrix> v_on_basis, const Tolerance& tol, Index tensor_cap)
    : e_(std::move(e)), sigma_(std::move(sigma)), v_(std::move(v_on_basis)), tol_(tol), cap_(tensor_cap),
      cache_(std::make_shared<Cache>())
{
    tol_.validate();
    if (!e_)
        fail(ErrorKind::invalid_representation, "representation needs a correspondence");
    if (!(e_->algebra() == sigma_.algebra()))
        fail(ErrorKind::composition, "correspondence and representation act on different algebras");
    if (cap_ < 1)
        fail(ErrorKind::usage, "tensor cap must be positive");
    const Index n = e_->module_dim();
    const Index d = sigma_.dim();
    if (static_cast<Index>(v_.size()) != n)
        fail(ErrorKind::dimension, "need one operator per module basis element, got " + std::to_string(v_.size())
                                       + " for module dimension " + std::to_string(n));
    formal_ = CMatrix(d, n * d);
    double scale = 1.0;
    for (Index a = 0; a < n; ++a) {
        const CMatrix& va = v_[at(a)];
        if (va.rows() != d || va.cols() != d)
            fail(ErrorKind::dimension, "V(ξ) must be a square matrix on H");
        require_finite(va, "V(ξ)");
        formal_.middleCols(a * d, d) = va;
        scale = std::max(scale, op_norm(va));
    }

    const FdCStarAlgebra& alg = e_->algebra();
    double cov = 0.0;
    for (Index c = 0; c < alg.dim(); ++c) {
        const CMatrix& sc = sigma_.basis_image(c);
        const CMatrix& l = e_->left_action(c);
        const CMatrix& r = e_->right_action(c);
        for (Index b = 0; b < n; ++b) {
            CMatrix vl = CMatrix::Zero(d, d);
            CMatrix vr = CMatrix::Zero(d, d);
            for (Index k = 0; k < n; ++k) {
                if (l(k, b) != cplx(0.0))
                    vl += l(k, b) * v_[at(k)];
                if (r(k, b) != cplx(0.0))
                    vr += r(k, b) * v_[at(k)];
            }
            cov = std::max(cov, op_norm(vl - sc * v_[at(b)]));
            cov = std::max(cov, op_norm(vr - v_[at(b)] * sc));
        }
    }

    const TensorSpace& s1 = space(1);
    tilde_ = s1.lift_cols(formal_);
    // Ṽ must vanish on the null vectors of the formal tensor space.
    cov = std::max(cov, op_norm(s1.embed_cols(tilde_) - formal_));
    covariance_residual_ = cov;
    if (cov > tol_.eq_rel * scale)
        fail(ErrorKind::invalid_representation,
             "V is not covariant (residual " + std::to_string(cov) + ")");
    intertwining_residual_ = pirep::intertwining_residual(s1, TensorSpace::base(sigma_), tilde_);
    if (intertwining_residual_ > tol_.eq_rel * scale)
        fail(ErrorKind::invalid_representation,
             "Ṽ does not intertwine the left action (residual " + std::to_string(intertwining_residual_) + ")");
}

CovariantRep CovariantRep::from_tilde(std::shared_ptr<const FdCorrespondence> e, StarRepresentation sigma,
                                      const CMatrix& tilde, const Tolerance& tol, Index tensor_cap)
{
    if (!e)
        fail(ErrorKind::invalid_representation, "representation needs a correspondence");
    const TensorSpace s1 = TensorSpace::interior(e, sigma, tol);
    if (tilde.rows() != sigma.dim() || tilde.cols() != s1.dim())
        fail(ErrorKind::dimension, "Ṽ has shape " + std::to_string(tilde.rows()) + "x" + std::to_string(tilde.cols())
                                       + ", expected " + std::to_string(sigma.dim()) + "x" + std::to_string(s1.dim()));
    const CMatrix formal = s1.embed_cols(tilde);
    const Index d = sigma.dim();
    std::vector<CMatrix> v;
    for (Index a = 0; a < e->module_dim(); ++a)
        v.push_back(formal.middleCols(a * d, d));
    return CovariantRep(std::move(e), std::move(sigma), std::move(v), tol, tensor_cap);
}

std::shared_ptr<const FdCorrespondence> CovariantRep::power_module(int m) const
{
    if (m < 0)
        fail(ErrorKind::domain, "tensor power exponent must be nonnegative");
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->modules.find(m);
        if (it != cache_->modules.end())
            return it->second;
    }
    std::shared_ptr<const FdCorrespondence> built;
    if (m == 0)
        built = std::make_shared<const FdCorrespondence>(trivial_correspondence(e_->algebra()));
    else if (m == 1)
        built = e_;
    else
        built = std::make_shared<const FdCorrespondence>(tensor_product(*e_, *power_module(m - 1)));
    std::lock_guard<std::mutex> lock(cache_->mutex);
    return cache_->modules.emplace(m, std::move(built)).first->second;
}

const TensorSpace& CovariantRep::space(int m) const
{
    if (m < 0)
        fail(ErrorKind::domain, "tensor power exponent must be nonnegative");
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->spaces.find(m);
        if (it != cache_->spaces.end())
            return *it->second;
    }
    std::shared_ptr<const TensorSpace> built;
    if (m == 0) {
        built = std::make_shared<const TensorSpace>(TensorSpace::base(sigma_));
    } else {
        double formal = static_cast<double>(sigma_.dim());
        for (int i = 0; i < m; ++i)
            formal *= static_cast<double>(e_->module_dim());
        if (formal > static_cast<double>(cap_))
            fail(ErrorKind::resource, "E^⊗" + std::to_string(m) + " ⊗ H has formal dimension "
                                          + std::to_string(static_cast<long long>(formal)) + ", above the tensor cap "
                                          + std::to_string(cap_));
        built = std::make_shared<const TensorSpace>(TensorSpace::interior(power_module(m), sigma_, tol_));
    }
    std::lock_guard<std::mutex> lock(cache_->mutex);
    return *cache_->spaces.emplace(m, std::move(built)).first->second;
}

CMatrix CovariantRep::amplify(int m, const CMatrix& x, int dom, int cod) const
{
    if (m < 0 || dom < 0 || cod < 0)
        fail(ErrorKind::domain, "tensor power exponents must be nonnegative");
    if (m == 0)
        return x;
    return pirep::amplify(space(m + dom), space(m + cod), space(dom), space(cod), x, tol_);
}

const CMatrix& CovariantRep::tilde_power(int m) const
{
    if (m < 0)
        fail(ErrorKind::domain, "tensor power exponent must be nonnegative");
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        auto it = cache_->powers.find(m);
        if (it != cache_->powers.end())
            return *it->second;
    }
    std::shared_ptr<const CMatrix> built;
    if (m == 0) {
        built = std::make_shared<const CMatrix>(CMatrix::Identity(sigma_.dim(), sigma_.dim()));
    } else if (m == 1) {
        built = std::make_shared<const CMatrix>(tilde_);
    } else {
        CMatrix product = tilde_power(m - 1) * amplify(m - 1, tilde_, 1, 0);

        // V(ξ_1)...V(ξ_m)h on random simple tensors.
        const Index n = e_->module_dim();
        const Index d = sigma_.dim();
        Rng rng(0x7e115e7, static_cast<std::uint64_t>(m));
        const TensorSpace& sm = space(m);
        for (int t = 0; t < 20; ++t) {
            CVector h(d);
            for (Index j = 0; j < d; ++j)
                h(j) = rng.complex_normal();
            CVector formal = h;
            CVector expected = h;
            double bound = h.norm();
            for (int f = 0; f < m; ++f) {
                CVector c(n);
                for (Index a = 0; a < n; ++a)
                    c(a) = rng.complex_normal();
                CMatrix vc = CMatrix::Zero(d, d);
                for (Index a = 0; a < n; ++a)
                    vc += c(a) * v_[at(a)];
                // The leftmost factor is applied last.
                formal = kron(c, formal);
                expected = vc * expected;
                bound *= std::max(1.0, op_norm(vc));
            }
            const CVector got = product * sm.embed_rows(formal);
            const double err = (got - expected).norm();
            if (err > tol_.eq_rel * bound)
                fail(ErrorKind::numeric_failure, "Ṽ_" + std::to_string(m)
                                                     + " disagrees with V(ξ_1)...V(ξ_m)h on a simple tensor (error "
                                                     + std::to_string(err) + ")");
        }
        built = std::make_shared<const CMatrix>(std::move(product));
    }
    std::lock_guard<std::mutex> lock(cache_->mutex);
    return *cache_->powers.emplace(m, std::move(built)).first->second;
}

const CMatrix& CovariantRep::pinv() const
{
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        if (cache_->pinv)
            return *cache_->pinv;
    }
    auto built = std::make_shared<const CMatrix>(pseudoinverse(tilde_, tol_));
    std::lock_guard<std::mutex> lock(cache_->mutex);
    if (!cache_->pinv)
        cache_->pinv = std::move(built);
    return *cache_->pinv;
}

CMatrix CovariantRep::pinv_chain(int m) const
{
    if (m < 0)
        fail(ErrorKind::domain, "tensor power exponent must be nonnegative");
    if (m == 0)
        return CMatrix::Identity(sigma_.dim(), sigma_.dim());
    CMatrix chain = pinv();
    for (int k = 1; k < m; ++k)
        chain = amplify(k, pinv(), 0, 1) * chain;
    return chain;
}

Subspace CovariantRep::kernel(int m) const
{
    if (m == 0)
        return Subspace::zero(sigma_.dim());
    return Subspace::from_frame(kernel_frame(tilde_power(m), tol_), tol_);
}

Subspace CovariantRep::range(int m) const
{
    if (m == 0)
        return Subspace::whole(sigma_.dim());
    return Subspace::span_of(tilde_power(m), tol_);
}

// ---------------------------------------------------------------------------

ClassificationReport classify(const CMatrix& tilde, const Tolerance& tol)
{
    ClassificationReport r;
    r.conditions = partial_isometry_conditions(tilde, tol);
    r.norm = r.conditions.norm;
    r.is_contractive = r.norm <= 1.0 + tol.eq_rel;
    r.isometry_residual = op_norm(tilde.adjoint() * tilde - CMatrix::Identity(tilde.cols(), tilde.cols()));
    r.is_isometric = r.isometry_residual <= tol.eq_rel;
    r.is_coisometric = op_norm(tilde * tilde.adjoint() - CMatrix::Identity(tilde.rows(), tilde.rows())) <= tol.eq_rel;
    r.is_partial_isometric = r.conditions.verdict();
    r.consistent = r.conditions.consistent();
    return r;
}

ClassificationReport classify(const CovariantRep& rep)
{
    return classify(rep.tilde(), rep.tolerance());
}

ReducingCheck reducing_check(const CovariantRep& rep, const Subspace& k)
{
    const Index d = rep.hilbert_dim();
    if (k.ambient_dim() != d)
        fail(ErrorKind::dimension, "subspace does not live in H");
    ReducingCheck out;
    const FdCStarAlgebra& alg = rep.sigma().algebra();
    for (Index c = 0; c < alg.dim(); ++c)
        out.sigma_invariance = std::max(out.sigma_invariance,
                                        inclusion_residual(image(rep.sigma().basis_image(c), k, rep.tolerance()), k));
    if (out.sigma_invariance > rep.tolerance().incl_abs)
        return out;
    const Subspace ek = Subspace::span_of(rep.amplify(1, k.projector(), 0, 0), rep.tolerance());
    out.forward = inclusion_residual(image(rep.tilde(), ek, rep.tolerance()), k);
    out.adjoint = inclusion_residual(image(rep.tilde().adjoint(), k, rep.tolerance()), ek);
    return out;
}

CovariantRep restrict(const CovariantRep& rep, const Subspace& k)
{
    const Tolerance& tol = rep.tolerance();
    const ReducingCheck check = reducing_check(rep, k);
    if (check.sigma_invariance > tol.incl_abs)
        fail(ErrorKind::domain, "subspace is not σ-invariant (residual " + std::to_string(check.sigma_invariance) + ")");
    if (check.forward > tol.incl_abs)
        fail(ErrorKind::domain, "Ṽ(E ⊗ K) is not contained in K (residual " + std::to_string(check.forward) + ")");
    if (check.adjoint > tol.incl_abs)
        fail(ErrorKind::domain, "Ṽ*(K) is not contained in E ⊗ K (residual " + std::to_string(check.adjoint) + ")");

    // σ-adapted frame: column (i, p, r) is σ(e^i_{p0}) f_i(:, r), f_i a frame of σ(e^i_{00})K.
    const StarRepresentation& sigma = rep.sigma();
    const FdCStarAlgebra& alg = sigma.algebra();
    std::vector<Index> mult;
    std::vector<CMatrix> frames;
    Index dk = 0;
    for (Index i = 0; i < alg.block_count(); ++i) {
        const CMatrix& e00 = sigma.basis_image(alg.unit_index(i, 0, 0));
        CMatrix f = k.empty() ? CMatrix(sigma.dim(), 0) : range_frame(e00 * k.frame(), tol);
        mult.push_back(f.cols());
        dk += alg.block_size(i) * f.cols();
        frames.push_back(std::move(f));
    }
    if (dk != k.dim())
        fail(ErrorKind::numeric_failure, "σ-adapted frame of the reducing subspace has the wrong dimension");
    CMatrix j(sigma.dim(), dk);
    Index col = 0;
    for (Index i = 0; i < alg.block_count(); ++i)
        for (Index p = 0; p < alg.block_size(i); ++p) {
            const CMatrix& ep0 = sigma.basis_image(alg.unit_index(i, p, 0));
            j.middleCols(col, mult[at(i)]) = ep0 * frames[at(i)];
            col += mult[at(i)];
        }
    std::vector<CMatrix> v;
    for (const CMatrix& va : rep.v_on_basis())
        v.push_back(j.adjoint() * va * j);
    return CovariantRep(rep.correspondence_ptr(), StarRepresentation(alg, mult), std::move(v), tol, rep.tensor_cap());
}

CMatrix direct_sum_embedding(const StarRepresentation& a, const StarRepresentation& b)
{
    if (!(a.algebra() == b.algebra()))
        fail(ErrorKind::composition, "direct sum needs representations of the same algebra");
    const FdCStarAlgebra& alg = a.algebra();
    std::vector<Index> mult;
    for (Index i = 0; i < alg.block_count(); ++i)
        mult.push_back(a.multiplicity(i) + b.multiplicity(i));
    const StarRepresentation sum(alg, mult);
    CMatrix q = CMatrix::Zero(sum.dim(), a.dim() + b.dim());
    for (Index i = 0; i < alg.block_count(); ++i) {
        const Index ma = a.multiplicity(i);
        const Index mb = b.multiplicity(i);
        for (Index p = 0; p < alg.block_size(i); ++p) {
            for (Index r = 0; r < ma; ++r)
                q(sum.block_offset(i) + p * (ma + mb) + r, a.block_offset(i) + p * ma + r) = 1.0;
            for (Index r = 0; r < mb; ++r)
                q(sum.block_offset(i) + p * (ma + mb) + ma + r, a.dim() + b.block_offset(i) + p * mb + r) = 1.0;
        }
    }
    return q;
}

CovariantRep direct_sum(const CovariantRep& a, const CovariantRep& b)
{
    if (!same_correspondence(a.correspondence(), b.correspondence()))
        fail(ErrorKind::composition, "direct sum needs representations of the same correspondence");
    const CMatrix q = direct_sum_embedding(a.sigma(), b.sigma());
    const Index da = a.hilbert_dim();
    const Index db = b.hilbert_dim();
    std::vector<CMatrix> v;
    for (size_t k = 0; k < a.v_on_basis().size(); ++k) {
        CMatrix block = CMatrix::Zero(da + db, da + db);
        block.topLeftCorner(da, da) = a.v_on_basis()[k];
        block.bottomRightCorner(db, db) = b.v_on_basis()[k];
        v.push_back(q * block * q.adjoint());
    }
    std::vector<Index> mult;
    for (Index i = 0; i < a.sigma().algebra().block_count(); ++i)
        mult.push_back(a.sigma().multiplicity(i) + b.sigma().multiplicity(i));
    return CovariantRep(a.correspondence_ptr(), StarRepresentation(a.sigma().algebra(), mult), std::move(v),
                        a.tolerance(), std::min(a.tensor_cap(), b.tensor_cap()));
}

// ---------------------------------------------------------------------------

Index BlockShape::row_count(Index i) const
{
    return multiplicities[at(i)];
}

Index BlockShape::column_count(Index i) const
{
    Index w = 0;
    for (Index j = 0; j < algebra.block_count(); ++j)
        w += mu[at(i)][at(j)] * multiplicities[at(j)];
    return w;
}

CovariantRep rep_from_row_blocks(const BlockShape& shape, const std::vector<CMatrix>& row_blocks, const Tolerance& tol,
                                 Index tensor_cap)
{
    const FdCStarAlgebra& alg = shape.algebra;
    const Index r = alg.block_count();
    if (static_cast<Index>(shape.multiplicities.size()) != r || static_cast<Index>(row_blocks.size()) != r)
        fail(ErrorKind::dimension, "need one multiplicity and one row block per algebra block");
    for (Index i = 0; i < r; ++i)
        if (row_blocks[at(i)].rows() != shape.row_count(i) || row_blocks[at(i)].cols() != shape.column_count(i))
            fail(ErrorKind::dimension, "row block " + std::to_string(i) + " has the wrong shape");
    auto e = std::make_shared<const FdCorrespondence>(bimodule_correspondence(alg, shape.mu));
    StarRepresentation sigma(alg, shape.multiplicities);
    const Index d = sigma.dim();
    std::vector<CMatrix> v;
    for (const BimoduleUnit& u : bimodule_basis(alg, shape.mu)) {
        const Index i = u.left_block;
        const Index j = u.right_block;
        const Index mi = shape.multiplicities[at(i)];
        const Index mj = shape.multiplicities[at(j)];
        Index offset = u.copy * mj;
        for (Index jj = 0; jj < j; ++jj)
            offset += shape.mu[at(i)][at(jj)] * shape.multiplicities[at(jj)];
        CMatrix va = CMatrix::Zero(d, d);
        va.block(sigma.block_offset(i) + u.row * mi, sigma.block_offset(j) + u.col * mj, mi, mj) =
            row_blocks[at(i)].middleCols(offset, mj);
        v.push_back(std::move(va));
    }
    return CovariantRep(std::move(e), std::move(sigma), std::move(v), tol, tensor_cap);
}

} // namespace pirep
