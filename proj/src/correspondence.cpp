#include "pirep/correspondence.hpp"

#include "pirep/errors.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace pirep {

namespace {

size_t at(Index i)
{
    return static_cast<size_t>(i);
}

double max_abs(const CMatrix& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

} // namespace

// ---------------------------------------------------------------------------
// FdCStarAlgebra

FdCStarAlgebra::FdCStarAlgebra(std::vector<Index> block_sizes) : blocks_(std::move(block_sizes))
{
    if (blocks_.empty())
        fail(ErrorKind::invalid_correspondence, "algebra needs at least one block");
    for (Index k : blocks_) {
        if (k < 1)
            fail(ErrorKind::invalid_correspondence, "algebra block sizes must be positive");
        offsets_.push_back(size_);
        unit_offsets_.push_back(dim_);
        size_ += k;
        dim_ += k * k;
    }
}

bool FdCStarAlgebra::is_commutative() const
{
    return std::all_of(blocks_.begin(), blocks_.end(), [](Index k) { return k == 1; });
}

FdCStarAlgebra::Unit FdCStarAlgebra::unit(Index basis) const
{
    if (basis < 0 || basis >= dim_)
        fail(ErrorKind::dimension, "algebra basis index out of range");
    Index i = block_count() - 1;
    while (unit_offsets_[at(i)] > basis)
        --i;
    const Index k = blocks_[at(i)];
    const Index local = basis - unit_offsets_[at(i)];
    return {i, local / k, local % k};
}

Index FdCStarAlgebra::unit_index(Index block, Index row, Index col) const
{
    return unit_offsets_[at(block)] + row * blocks_[at(block)] + col;
}

Index FdCStarAlgebra::adjoint_index(Index basis) const
{
    const Unit u = unit(basis);
    return unit_index(u.block, u.col, u.row);
}

CMatrix FdCStarAlgebra::basis_matrix(Index basis) const
{
    const Unit u = unit(basis);
    CMatrix m = CMatrix::Zero(size_, size_);
    m(offsets_[at(u.block)] + u.row, offsets_[at(u.block)] + u.col) = 1.0;
    return m;
}

CVector FdCStarAlgebra::coefficients(const CMatrix& a) const
{
    if (a.rows() != size_ || a.cols() != size_)
        fail(ErrorKind::dimension, "algebra element has the wrong shape");
    CVector c(dim_);
    for (Index i = 0; i < block_count(); ++i) {
        const Index k = blocks_[at(i)];
        const Index o = offsets_[at(i)];
        for (Index p = 0; p < k; ++p)
            for (Index q = 0; q < k; ++q)
                c(unit_index(i, p, q)) = a(o + p, o + q);
    }
    return c;
}

CMatrix FdCStarAlgebra::element(const CVector& coefficients) const
{
    if (coefficients.size() != dim_)
        fail(ErrorKind::dimension, "coefficient vector has the wrong length");
    CMatrix m = CMatrix::Zero(size_, size_);
    for (Index b = 0; b < dim_; ++b) {
        const Unit u = unit(b);
        m(offsets_[at(u.block)] + u.row, offsets_[at(u.block)] + u.col) = coefficients(b);
    }
    return m;
}

CMatrix FdCStarAlgebra::identity() const
{
    return CMatrix::Identity(size_, size_);
}

bool FdCStarAlgebra::contains(const CMatrix& a, double tol) const
{
    if (a.rows() != size_ || a.cols() != size_)
        return false;
    return max_abs(a - element(coefficients(a))) <= tol;
}

// ---------------------------------------------------------------------------
// StarRepresentation

StarRepresentation::StarRepresentation(FdCStarAlgebra algebra, std::vector<Index> multiplicities)
    : algebra_(std::move(algebra)), mult_(std::move(multiplicities))
{
    if (static_cast<Index>(mult_.size()) != algebra_.block_count())
        fail(ErrorKind::dimension, "representation needs one multiplicity per algebra block");
    for (Index i = 0; i < algebra_.block_count(); ++i) {
        if (mult_[at(i)] < 0)
            fail(ErrorKind::dimension, "multiplicities must be nonnegative");
        offsets_.push_back(dim_);
        dim_ += algebra_.block_size(i) * mult_[at(i)];
    }
    images_.reserve(at(algebra_.dim()));
    for (Index b = 0; b < algebra_.dim(); ++b) {
        const FdCStarAlgebra::Unit u = algebra_.unit(b);
        const Index m = mult_[at(u.block)];
        CMatrix img = CMatrix::Zero(dim_, dim_);
        const Index o = offsets_[at(u.block)];
        for (Index r = 0; r < m; ++r)
            img(o + u.row * m + r, o + u.col * m + r) = 1.0;
        images_.push_back(std::move(img));
    }
}

CMatrix StarRepresentation::operator()(const CMatrix& a) const
{
    if (!algebra_.contains(a, 0.0) && !algebra_.contains(a, 1e-12 * std::max(1.0, max_abs(a))))
        fail(ErrorKind::domain, "element is not block diagonal for this algebra");
    CMatrix out = CMatrix::Zero(dim_, dim_);
    for (Index i = 0; i < algebra_.block_count(); ++i) {
        const Index k = algebra_.block_size(i);
        const Index m = mult_[at(i)];
        if (m == 0)
            continue;
        const Index ao = algebra_.block_offset(i);
        out.block(offsets_[at(i)], offsets_[at(i)], k * m, k * m) =
            kron(a.block(ao, ao, k, k), CMatrix::Identity(m, m));
    }
    return out;
}

double StarRepresentation::homomorphism_residual() const
{
    double worst = 0.0;
    CMatrix unit = CMatrix::Zero(dim_, dim_);
    for (Index b = 0; b < algebra_.dim(); ++b) {
        const auto ub = algebra_.unit(b);
        if (ub.row == ub.col)
            unit += images_[at(b)];
        worst = std::max(worst, max_abs(images_[at(b)].adjoint() - images_[at(algebra_.adjoint_index(b))]));
        for (Index c = 0; c < algebra_.dim(); ++c) {
            const auto uc = algebra_.unit(c);
            CMatrix expected = CMatrix::Zero(dim_, dim_);
            if (ub.block == uc.block && ub.col == uc.row)
                expected = images_[at(algebra_.unit_index(ub.block, ub.row, uc.col))];
            worst = std::max(worst, max_abs(images_[at(b)] * images_[at(c)] - expected));
        }
    }
    worst = std::max(worst, max_abs(unit - CMatrix::Identity(dim_, dim_)));
    return worst;
}

// ---------------------------------------------------------------------------
// FdCorrespondence

FdCorrespondence::FdCorrespondence(FdCStarAlgebra algebra, Index module_dim, std::vector<CMatrix> gram,
                                   std::vector<CMatrix> left_action, std::vector<CMatrix> right_action)
    : algebra_(std::move(algebra)), n_(module_dim), gram_(std::move(gram)), left_(std::move(left_action)),
      right_(std::move(right_action))
{
    if (n_ < 0)
        fail(ErrorKind::invalid_correspondence, "module dimension must be nonnegative");
    if (static_cast<Index>(gram_.size()) != n_ * n_)
        fail(ErrorKind::invalid_correspondence, "gram must hold module_dim^2 algebra elements");
    if (static_cast<Index>(left_.size()) != algebra_.dim() || static_cast<Index>(right_.size()) != algebra_.dim())
        fail(ErrorKind::invalid_correspondence, "left and right actions need one matrix per algebra basis element");
    const Index k = algebra_.matrix_size();
    for (const CMatrix& g : gram_) {
        if (g.rows() != k || g.cols() != k)
            fail(ErrorKind::invalid_correspondence, "gram entry has the wrong shape for the algebra");
        require_finite(g, "gram entry");
    }
    for (const auto* actions : {&left_, &right_}) {
        for (const CMatrix& a : *actions) {
            if (a.rows() != n_ || a.cols() != n_)
                fail(ErrorKind::invalid_correspondence, "action matrix must be module_dim x module_dim");
            require_finite(a, "action matrix");
        }
    }
}

CMatrix FdCorrespondence::left_action_of(const CMatrix& a) const
{
    const CVector c = algebra_.coefficients(a);
    CMatrix out = CMatrix::Zero(n_, n_);
    for (Index b = 0; b < algebra_.dim(); ++b)
        if (c(b) != cplx(0.0))
            out += c(b) * left_[at(b)];
    return out;
}

void FdCorrespondence::validate(const Tolerance& tol) const
{
    const auto bad = [](const std::string& what) { fail(ErrorKind::invalid_correspondence, what); };
    const Index dim_a = algebra_.dim();
    const Index k = algebra_.matrix_size();

    double gscale = 1.0;
    for (const CMatrix& g : gram_)
        gscale = std::max(gscale, max_abs(g));
    const double eps = tol.eq_rel * gscale;

    for (const CMatrix& g : gram_)
        if (!algebra_.contains(g, eps))
            bad("gram entry is not an element of the algebra");
    for (Index a = 0; a < n_; ++a)
        for (Index b = 0; b < n_; ++b)
            if (max_abs(gram(a, b).adjoint() - gram(b, a)) > eps)
                bad("gram is not hermitian");

    // Scalar form through the identity representation of A.
    if (n_ > 0) {
        CMatrix big(n_ * k, n_ * k);
        for (Index a = 0; a < n_; ++a)
            for (Index b = 0; b < n_; ++b)
                big.block(a * k, b * k, k, k) = gram(a, b);
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (big + big.adjoint()), Eigen::EigenvaluesOnly);
        const RVector lambda = eig.eigenvalues();
        if (lambda(0) < -10.0 * tol.eq_rel * std::max(1.0, lambda(lambda.size() - 1)))
            bad("scalar gram form is not positive semidefinite");
    }

    const CMatrix id_n = CMatrix::Identity(n_, n_);
    CMatrix left_unit = CMatrix::Zero(n_, n_);
    CMatrix right_unit = CMatrix::Zero(n_, n_);
    for (Index c = 0; c < dim_a; ++c) {
        const auto uc = algebra_.unit(c);
        if (uc.row == uc.col) {
            left_unit += left_[at(c)];
            right_unit += right_[at(c)];
        }
        const CMatrix ec = algebra_.basis_matrix(c);
        const Index cstar = algebra_.adjoint_index(c);
        for (Index a = 0; a < n_; ++a) {
            for (Index b = 0; b < n_; ++b) {
                // <ξ_a, ξ_b c> = <ξ_a, ξ_b> c
                CMatrix lhs = CMatrix::Zero(k, k);
                for (Index r = 0; r < n_; ++r)
                    if (right_[at(c)](r, b) != cplx(0.0))
                        lhs += right_[at(c)](r, b) * gram(a, r);
                if (max_abs(lhs - gram(a, b) * ec) > eps)
                    bad("right action is not compatible with the inner product");
                // <φ(c) ξ_a, ξ_b> = <ξ_a, φ(c*) ξ_b>
                CMatrix l2 = CMatrix::Zero(k, k);
                CMatrix r2 = CMatrix::Zero(k, k);
                for (Index r = 0; r < n_; ++r) {
                    if (left_[at(c)](r, a) != cplx(0.0))
                        l2 += std::conj(left_[at(c)](r, a)) * gram(r, b);
                    if (left_[at(cstar)](r, b) != cplx(0.0))
                        r2 += left_[at(cstar)](r, b) * gram(a, r);
                }
                if (max_abs(l2 - r2) > eps)
                    bad("left action is not adjointable");
            }
        }
        for (Index d = 0; d < dim_a; ++d) {
            const auto ud = algebra_.unit(d);
            const bool chain = uc.block == ud.block && uc.col == ud.row;
            CMatrix expected_l = CMatrix::Zero(n_, n_);
            if (chain)
                expected_l = left_[at(algebra_.unit_index(uc.block, uc.row, ud.col))];
            if (max_abs(left_[at(c)] * left_[at(d)] - expected_l) > tol.eq_rel)
                bad("left action is not multiplicative");
            // ξ (c d) = (ξ c) d
            CMatrix expected_r = CMatrix::Zero(n_, n_);
            if (chain)
                expected_r = right_[at(algebra_.unit_index(uc.block, uc.row, ud.col))];
            if (max_abs(right_[at(d)] * right_[at(c)] - expected_r) > tol.eq_rel)
                bad("right action is not multiplicative");
            if (max_abs(left_[at(c)] * right_[at(d)] - right_[at(d)] * left_[at(c)]) > tol.eq_rel)
                bad("left and right actions do not commute");
        }
    }
    if (max_abs(left_unit - id_n) > tol.eq_rel)
        bad("left action is not unital");
    if (max_abs(right_unit - id_n) > tol.eq_rel)
        bad("right action is not unital");
}

// ---------------------------------------------------------------------------
// Constructions

std::vector<BimoduleUnit> bimodule_basis(const FdCStarAlgebra& algebra, const MultiplicityMatrix& mu)
{
    const Index r = algebra.block_count();
    if (static_cast<Index>(mu.size()) != r)
        fail(ErrorKind::invalid_correspondence, "multiplicity matrix must be square in the number of blocks");
    std::vector<BimoduleUnit> basis;
    for (Index i = 0; i < r; ++i) {
        if (static_cast<Index>(mu[at(i)].size()) != r)
            fail(ErrorKind::invalid_correspondence, "multiplicity matrix must be square in the number of blocks");
        for (Index j = 0; j < r; ++j) {
            if (mu[at(i)][at(j)] < 0)
                fail(ErrorKind::invalid_correspondence, "multiplicities must be nonnegative");
            for (Index t = 0; t < mu[at(i)][at(j)]; ++t)
                for (Index p = 0; p < algebra.block_size(i); ++p)
                    for (Index q = 0; q < algebra.block_size(j); ++q)
                        basis.push_back({i, j, t, p, q});
        }
    }
    return basis;
}

FdCorrespondence bimodule_correspondence(const FdCStarAlgebra& algebra, const MultiplicityMatrix& mu)
{
    const std::vector<BimoduleUnit> basis = bimodule_basis(algebra, mu);
    const Index n = static_cast<Index>(basis.size());
    const Index k = algebra.matrix_size();

    // index of (i, j, t, p, q): group offset + p * k_j + q
    std::vector<std::vector<std::vector<Index>>> group(at(algebra.block_count()));
    {
        Index idx = 0;
        for (Index i = 0; i < algebra.block_count(); ++i) {
            group[at(i)].resize(at(algebra.block_count()));
            for (Index j = 0; j < algebra.block_count(); ++j)
                for (Index t = 0; t < mu[at(i)][at(j)]; ++t) {
                    group[at(i)][at(j)].push_back(idx);
                    idx += algebra.block_size(i) * algebra.block_size(j);
                }
        }
    }
    const auto index_of = [&](Index i, Index j, Index t, Index p, Index q) {
        return group[at(i)][at(j)][at(t)] + p * algebra.block_size(j) + q;
    };

    std::vector<CMatrix> gram(at(n * n), CMatrix::Zero(k, k));
    for (Index a = 0; a < n; ++a) {
        const BimoduleUnit& x = basis[at(a)];
        for (Index b = 0; b < n; ++b) {
            const BimoduleUnit& y = basis[at(b)];
            if (x.left_block == y.left_block && x.right_block == y.right_block && x.copy == y.copy && x.row == y.row) {
                const Index o = algebra.block_offset(x.right_block);
                gram[at(a * n + b)](o + x.col, o + y.col) = 1.0;
            }
        }
    }

    std::vector<CMatrix> left(at(algebra.dim()), CMatrix::Zero(n, n));
    std::vector<CMatrix> right(at(algebra.dim()), CMatrix::Zero(n, n));
    for (Index c = 0; c < algebra.dim(); ++c) {
        const auto u = algebra.unit(c);
        for (Index a = 0; a < n; ++a) {
            const BimoduleUnit& x = basis[at(a)];
            if (x.left_block == u.block && x.row == u.col)
                left[at(c)](index_of(x.left_block, x.right_block, x.copy, u.row, x.col), a) = 1.0;
            if (x.right_block == u.block && x.col == u.row)
                right[at(c)](index_of(x.left_block, x.right_block, x.copy, x.row, u.col), a) = 1.0;
        }
    }
    return FdCorrespondence(algebra, n, std::move(gram), std::move(left), std::move(right));
}

FdCorrespondence scalar_correspondence(Index n)
{
    return bimodule_correspondence(FdCStarAlgebra::scalars(), {{n}});
}

FdCorrespondence trivial_correspondence(const FdCStarAlgebra& algebra)
{
    MultiplicityMatrix mu(at(algebra.block_count()), std::vector<Index>(at(algebra.block_count()), 0));
    for (Index i = 0; i < algebra.block_count(); ++i)
        mu[at(i)][at(i)] = 1;
    return bimodule_correspondence(algebra, mu);
}

FdCorrespondence tensor_product(const FdCorrespondence& f, const FdCorrespondence& e)
{
    if (!(f.algebra() == e.algebra()))
        fail(ErrorKind::composition, "tensor product needs correspondences over the same algebra");
    const FdCStarAlgebra& alg = f.algebra();
    const Index nf = f.module_dim();
    const Index ne = e.module_dim();
    const Index k = alg.matrix_size();
    const Index dim_a = alg.dim();

    // twisted[c][e * ne + e'] = <e, φ(unit c) e'>
    std::vector<std::vector<CMatrix>> twisted(at(dim_a));
    for (Index c = 0; c < dim_a; ++c) {
        twisted[at(c)].assign(at(ne * ne), CMatrix::Zero(k, k));
        const CMatrix& l = e.left_action(c);
        for (Index a = 0; a < ne; ++a)
            for (Index b = 0; b < ne; ++b) {
                CMatrix& slot = twisted[at(c)][at(a * ne + b)];
                for (Index r = 0; r < ne; ++r)
                    if (l(r, b) != cplx(0.0))
                        slot += l(r, b) * e.gram(a, r);
            }
    }

    const Index n = nf * ne;
    std::vector<CMatrix> gram(at(n * n), CMatrix::Zero(k, k));
    for (Index fa = 0; fa < nf; ++fa)
        for (Index fb = 0; fb < nf; ++fb) {
            const CVector coef = alg.coefficients(f.gram(fa, fb));
            for (Index c = 0; c < dim_a; ++c) {
                if (coef(c) == cplx(0.0))
                    continue;
                for (Index ea = 0; ea < ne; ++ea)
                    for (Index eb = 0; eb < ne; ++eb)
                        gram[at((fa * ne + ea) * n + fb * ne + eb)] += coef(c) * twisted[at(c)][at(ea * ne + eb)];
            }
        }

    std::vector<CMatrix> left;
    std::vector<CMatrix> right;
    const CMatrix id_f = CMatrix::Identity(nf, nf);
    const CMatrix id_e = CMatrix::Identity(ne, ne);
    for (Index c = 0; c < dim_a; ++c) {
        left.push_back(kron(f.left_action(c), id_e));
        right.push_back(kron(id_f, e.right_action(c)));
    }
    return FdCorrespondence(alg, n, std::move(gram), std::move(left), std::move(right));
}

FdCorrespondence tensor_power(const FdCorrespondence& e, int m)
{
    if (m < 0)
        fail(ErrorKind::domain, "tensor power exponent must be nonnegative");
    if (m == 0)
        return trivial_correspondence(e.algebra());
    if (m == 1)
        return e;
    return tensor_product(e, tensor_power(e, m - 1));
}

bool is_full(const FdCorrespondence& e, const Tolerance& tol)
{
    const Index dim_a = e.algebra().dim();
    const Index n = e.module_dim();
    if (n == 0)
        return false;
    CMatrix span(dim_a, n * n);
    for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b)
            span.col(a * n + b) = e.algebra().coefficients(e.gram(a, b));
    return numerical_rank(span, tol) == dim_a;
}

// ---------------------------------------------------------------------------
// TensorSpace

TensorSpace TensorSpace::base(const StarRepresentation& sigma)
{
    TensorSpace s(nullptr, sigma);
    s.dim_ = sigma.dim();
    s.formal_dim_ = sigma.dim();
    s.diagonal_ = true;
    s.support_.resize(at(s.dim_));
    for (Index i = 0; i < s.dim_; ++i)
        s.support_[at(i)] = i;
    s.scale_ = RVector::Ones(s.dim_);
    return s;
}

void TensorSpace::set_diagonal(const RVector& diag, const Tolerance& tol)
{
    diagonal_ = true;
    const double diag_max = diag.size() > 0 ? std::max(0.0, diag.maxCoeff()) : 0.0;
    const double cutoff = tol.rank_rel * diag_max * static_cast<double>(formal_dim_);
    std::vector<double> scale;
    for (Index i = 0; i < diag.size(); ++i) {
        const double v = diag(i);
        if (v < -10.0 * tol.eq_rel * diag_max)
            fail(ErrorKind::invalid_correspondence, "gram form of the interior tensor product is not positive");
        if (v > cutoff) {
            support_.push_back(i);
            scale.push_back(std::sqrt(v));
        }
    }
    dim_ = static_cast<Index>(support_.size());
    scale_ = Eigen::Map<RVector>(scale.data(), static_cast<Index>(scale.size()));
}

TensorSpace TensorSpace::interior(std::shared_ptr<const FdCorrespondence> module, const StarRepresentation& sigma,
                                  const Tolerance& tol)
{
    if (!module)
        return base(sigma);
    if (!(module->algebra() == sigma.algebra()))
        fail(ErrorKind::composition, "interior tensor product needs the correspondence and representation to share the algebra");
    TensorSpace s(module, sigma);
    const Index n = module->module_dim();
    const Index d = sigma.dim();
    s.formal_dim_ = n * d;
    const Index fd = s.formal_dim_;
    if (fd == 0) {
        s.scale_ = RVector(0);
        return s;
    }

    // A diagonal module Gram gives a diagonal formal Gram without forming it.
    bool module_diagonal = true;
    for (Index a = 0; a < n && module_diagonal; ++a)
        for (Index b = 0; b < n && module_diagonal; ++b) {
            const CMatrix& entry = module->gram(a, b);
            if (a != b)
                module_diagonal = entry.isZero(0.0);
            else
                module_diagonal = CMatrix(entry.diagonal().asDiagonal()) == entry;
        }
    if (module_diagonal) {
        RVector diag(fd);
        for (Index a = 0; a < n; ++a)
            diag.segment(a * d, d) = sigma(module->gram(a, a)).diagonal().real();
        s.set_diagonal(diag, tol);
        return s;
    }

    const CMatrix g = s.formal_gram();
    double diag_max = 0.0;
    double off_max = 0.0;
    for (Index j = 0; j < fd; ++j)
        for (Index i = 0; i < fd; ++i) {
            const double v = std::abs(g(i, j));
            if (i == j)
                diag_max = std::max(diag_max, v);
            else
                off_max = std::max(off_max, v);
        }

    if (off_max <= 1e-14 * diag_max) {
        s.set_diagonal(g.diagonal().real(), tol);
        return s;
    }

    // Pivoted Cholesky G ≈ L L* on the numerical support, then the eigenbasis of
    // G from the small matrix L* L = W Λ W*: embed = W* L*, lift = L W Λ^{-1}.
    s.diagonal_ = false;
    const double cutoff = tol.rank_rel * diag_max * static_cast<double>(fd);
    RVector remaining(fd);
    for (Index i = 0; i < fd; ++i)
        remaining(i) = g(i, i).real();
    if (remaining.minCoeff() < -10.0 * tol.eq_rel * diag_max)
        fail(ErrorKind::invalid_correspondence, "gram form of the interior tensor product is not positive");
    CMatrix l(fd, 0);
    std::vector<CVector> cols;
    for (;;) {
        Index p = 0;
        const double top = remaining.maxCoeff(&p);
        if (top <= cutoff || static_cast<Index>(cols.size()) == fd)
            break;
        CVector col = g.col(p);
        for (const CVector& prev : cols)
            col -= std::conj(prev(p)) * prev;
        col /= std::sqrt(top);
        for (Index i = 0; i < fd; ++i)
            remaining(i) -= std::norm(col(i));
        remaining(p) = 0.0;
        cols.push_back(std::move(col));
    }
    l.resize(fd, static_cast<Index>(cols.size()));
    for (size_t c = 0; c < cols.size(); ++c)
        l.col(static_cast<Index>(c)) = cols[c];
    if (max_abs(g - l * l.adjoint()) > 10.0 * tol.eq_rel * std::max(1.0, diag_max))
        fail(ErrorKind::invalid_correspondence, "gram form of the interior tensor product is not positive");

    Eigen::SelfAdjointEigenSolver<CMatrix> eig(l.adjoint() * l);
    if (eig.info() != Eigen::Success)
        fail(ErrorKind::numeric_failure, "eigenvalue decomposition of the tensor gram failed");
    const RVector& lambda = eig.eigenvalues();
    const Index r = lambda.size();
    const double lmax = r > 0 ? std::max(0.0, lambda(r - 1)) : 0.0;
    const double eig_cutoff = tol.rank_rel * lmax * static_cast<double>(fd);
    std::vector<Index> keep;
    for (Index i = r - 1; i >= 0; --i)
        if (lambda(i) > eig_cutoff)
            keep.push_back(i);
    s.dim_ = static_cast<Index>(keep.size());
    s.embed_ = CMatrix(s.dim_, fd);
    s.lift_ = CMatrix(fd, s.dim_);
    for (Index c = 0; c < s.dim_; ++c) {
        const Index i = keep[at(c)];
        const CVector lw = l * eig.eigenvectors().col(i);
        s.embed_.row(c) = lw.adjoint();
        s.lift_.col(c) = lw / lambda(i);
    }
    return s;
}

CMatrix TensorSpace::formal_gram() const
{
    if (!module_)
        return CMatrix::Identity(formal_dim_, formal_dim_);
    const Index n = module_->module_dim();
    const Index d = sigma_.dim();
    CMatrix g = CMatrix::Zero(n * d, n * d);
    for (Index a = 0; a < n; ++a)
        for (Index b = 0; b < n; ++b) {
            const CMatrix& entry = module_->gram(a, b);
            if (!entry.isZero(0.0))
                g.block(a * d, b * d, d, d) = sigma_(entry);
        }
    return g;
}

CMatrix TensorSpace::embed() const
{
    return embed_rows(CMatrix::Identity(formal_dim_, formal_dim_));
}

CMatrix TensorSpace::lift() const
{
    return lift_rows(CMatrix::Identity(dim_, dim_));
}

CMatrix TensorSpace::embed_rows(const CMatrix& formal) const
{
    if (formal.rows() != formal_dim_)
        fail(ErrorKind::dimension, "embed: row count does not match the formal dimension");
    if (!diagonal_)
        return embed_ * formal;
    CMatrix out(dim_, formal.cols());
    for (Index r = 0; r < dim_; ++r)
        out.row(r) = scale_(r) * formal.row(support_[at(r)]);
    return out;
}

CMatrix TensorSpace::lift_rows(const CMatrix& quotient) const
{
    if (quotient.rows() != dim_)
        fail(ErrorKind::dimension, "lift: row count does not match the space dimension");
    if (!diagonal_)
        return lift_ * quotient;
    CMatrix out = CMatrix::Zero(formal_dim_, quotient.cols());
    for (Index r = 0; r < dim_; ++r)
        out.row(support_[at(r)]) = quotient.row(r) / scale_(r);
    return out;
}

CMatrix TensorSpace::embed_cols(const CMatrix& x) const
{
    if (x.cols() != dim_)
        fail(ErrorKind::dimension, "embed: column count does not match the space dimension");
    if (!diagonal_)
        return x * embed_;
    CMatrix out = CMatrix::Zero(x.rows(), formal_dim_);
    for (Index c = 0; c < dim_; ++c)
        out.col(support_[at(c)]) = scale_(c) * x.col(c);
    return out;
}

CMatrix TensorSpace::lift_cols(const CMatrix& x) const
{
    if (x.cols() != formal_dim_)
        fail(ErrorKind::dimension, "lift: column count does not match the formal dimension");
    if (!diagonal_)
        return x * lift_;
    CMatrix out(x.rows(), dim_);
    for (Index c = 0; c < dim_; ++c)
        out.col(c) = x.col(support_[at(c)]) / scale_(c);
    return out;
}

CMatrix TensorSpace::left_action(Index basis) const
{
    if (!module_)
        return sigma_.basis_image(basis);
    const CMatrix& l = module_->left_action(basis);
    const Index d = sigma_.dim();
    if (!diagonal_)
        return embed_ * kron(l, CMatrix::Identity(d, d)) * lift_;
    CMatrix out = CMatrix::Zero(dim_, dim_);
    for (Index r = 0; r < dim_; ++r) {
        const Index fr = support_[at(r)];
        for (Index c = 0; c < dim_; ++c) {
            const Index fc = support_[at(c)];
            if (fr % d != fc % d)
                continue;
            const cplx v = l(fr / d, fc / d);
            if (v != cplx(0.0))
                out(r, c) = scale_(r) * v / scale_(c);
        }
    }
    return out;
}

double intertwining_residual(const TensorSpace& dom, const TensorSpace& cod, const CMatrix& x)
{
    if (!(dom.sigma() == cod.sigma()))
        fail(ErrorKind::composition, "spaces are built over different representations");
    double worst = 0.0;
    const FdCStarAlgebra& alg = dom.sigma().algebra();
    if (alg.is_scalar())
        return 0.0;
    for (Index c = 0; c < alg.dim(); ++c)
        worst = std::max(worst, op_norm(x * dom.left_action(c) - cod.left_action(c) * x));
    return worst;
}

CMatrix amplify(const TensorSpace& outer_dom, const TensorSpace& outer_cod, const TensorSpace& inner_dom,
                const TensorSpace& inner_cod, const CMatrix& x, const Tolerance& tol)
{
    require_finite(x, "amplify");
    if (x.rows() != inner_cod.dim() || x.cols() != inner_dom.dim())
        fail(ErrorKind::dimension, "amplify: operator shape does not match its spaces");
    const Index fd_in = inner_dom.formal_dim();
    const Index fc_in = inner_cod.formal_dim();
    if (fd_in == 0 || fc_in == 0 || outer_dom.formal_dim() % fd_in != 0 || outer_cod.formal_dim() % fc_in != 0)
        fail(ErrorKind::dimension, "amplify: outer spaces are not tensor products with the inner spaces");
    const Index nf = outer_dom.formal_dim() / fd_in;
    if (outer_cod.formal_dim() / fc_in != nf)
        fail(ErrorKind::dimension, "amplify: outer spaces use different amplifying modules");

    const double resid = intertwining_residual(inner_dom, inner_cod, x);
    if (resid > tol.eq_rel * std::max(1.0, op_norm(x)))
        fail(ErrorKind::intertwiner, "amplify: operator does not intertwine the left actions (residual "
                                         + std::to_string(resid) + ")");

    const CMatrix xf = inner_cod.lift_rows(inner_dom.embed_cols(x));

    if (outer_dom.diagonal() && outer_cod.diagonal()) {
        const auto& sup_r = outer_cod.support();
        const auto& sup_c = outer_dom.support();
        std::vector<std::vector<Index>> cols_by_factor(at(nf));
        for (Index c = 0; c < outer_dom.dim(); ++c)
            cols_by_factor[at(sup_c[at(c)] / fd_in)].push_back(c);
        CMatrix out = CMatrix::Zero(outer_cod.dim(), outer_dom.dim());
        for (Index r = 0; r < outer_cod.dim(); ++r) {
            const Index f = sup_r[at(r)] / fc_in;
            const Index u = sup_r[at(r)] % fc_in;
            const double sr = outer_cod.scale()(r);
            for (Index c : cols_by_factor[at(f)])
                out(r, c) = sr * xf(u, sup_c[at(c)] % fd_in) / outer_dom.scale()(c);
        }
        return out;
    }
    return outer_cod.embed_rows(outer_dom.lift_cols(kron_identity(nf, xf)));
}

CMatrix amplify(const FdCorrespondence& f, const StarRepresentation& sigma, const CMatrix& x,
                std::shared_ptr<const FdCorrespondence> dom, std::shared_ptr<const FdCorrespondence> cod,
                const Tolerance& tol)
{
    auto fptr = std::make_shared<const FdCorrespondence>(f);
    const auto outer = [&](const std::shared_ptr<const FdCorrespondence>& inner) {
        if (!inner)
            return TensorSpace::interior(fptr, sigma, tol);
        return TensorSpace::interior(std::make_shared<const FdCorrespondence>(tensor_product(f, *inner)), sigma, tol);
    };
    const TensorSpace inner_dom = TensorSpace::interior(dom, sigma, tol);
    const TensorSpace inner_cod = TensorSpace::interior(cod, sigma, tol);
    return amplify(outer(dom), outer(cod), inner_dom, inner_cod, x, tol);
}

} // namespace pirep
