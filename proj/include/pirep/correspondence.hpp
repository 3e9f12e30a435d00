#pragma once

#include "pirep/numerics.hpp"

#include <memory>
#include <vector>

namespace pirep {

/// A = M_{k_1} ⊕ ... ⊕ M_{k_r}. Elements are block-diagonal matrices of size
/// sum k_i. The vector-space basis is the set of matrix units, ordered by
/// block and then row-major inside the block.
class FdCStarAlgebra {
public:
    struct Unit {
        Index block;
        Index row;
        Index col;
    };

    explicit FdCStarAlgebra(std::vector<Index> block_sizes);
    static FdCStarAlgebra scalars() { return FdCStarAlgebra({1}); }

    const std::vector<Index>& block_sizes() const { return blocks_; }
    Index block_count() const { return static_cast<Index>(blocks_.size()); }
    Index block_size(Index i) const { return blocks_[static_cast<size_t>(i)]; }
    Index block_offset(Index i) const { return offsets_[static_cast<size_t>(i)]; }
    Index matrix_size() const { return size_; }
    Index dim() const { return dim_; }
    bool is_scalar() const { return blocks_.size() == 1 && blocks_[0] == 1; }
    bool is_commutative() const;

    Unit unit(Index basis) const;
    Index unit_index(Index block, Index row, Index col) const;
    /// Basis index of the adjoint matrix unit.
    Index adjoint_index(Index basis) const;
    CMatrix basis_matrix(Index basis) const;
    CVector coefficients(const CMatrix& a) const;
    CMatrix element(const CVector& coefficients) const;
    CMatrix identity() const;
    /// Zero outside the diagonal blocks, within tol.
    bool contains(const CMatrix& a, double tol) const;

    bool operator==(const FdCStarAlgebra& other) const { return blocks_ == other.blocks_; }

private:
    std::vector<Index> blocks_;
    std::vector<Index> offsets_;
    std::vector<Index> unit_offsets_;
    Index size_ = 0;
    Index dim_ = 0;
};

/// sigma(a) = ⊕_i a_i ⊗ I_{m_i} on H = ⊕_i C^{k_i} ⊗ C^{m_i}. Unital and
/// nondegenerate by construction.
class StarRepresentation {
public:
    StarRepresentation(FdCStarAlgebra algebra, std::vector<Index> multiplicities);

    const FdCStarAlgebra& algebra() const { return algebra_; }
    const std::vector<Index>& multiplicities() const { return mult_; }
    Index multiplicity(Index i) const { return mult_[static_cast<size_t>(i)]; }
    Index dim() const { return dim_; }
    Index block_offset(Index i) const { return offsets_[static_cast<size_t>(i)]; }

    CMatrix operator()(const CMatrix& a) const;
    const CMatrix& basis_image(Index basis) const { return images_[static_cast<size_t>(basis)]; }

    /// Max deviation from multiplicativity, *-preservation and unitality over
    /// the matrix units.
    double homomorphism_residual() const;

    bool operator==(const StarRepresentation& other) const
    {
        return algebra_ == other.algebra_ && mult_ == other.mult_;
    }

private:
    FdCStarAlgebra algebra_;
    std::vector<Index> mult_;
    std::vector<Index> offsets_;
    Index dim_ = 0;
    std::vector<CMatrix> images_;
};

/// A C*-correspondence over a finite-dimensional algebra, given by structure
/// data on a complex basis ξ_1..ξ_N:
///   gram(a, b)      = <ξ_a, ξ_b> in A
///   right_action(c) : ξ_b · c = sum_r R_c(r, b) ξ_r
///   left_action(c)  : φ(c) ξ_b = sum_r L_c(r, b) ξ_r
/// for every matrix unit c. The scalar Gram form may be degenerate; the null
/// vectors are quotiented out when tensoring with a representation.
class FdCorrespondence {
public:
    FdCorrespondence(FdCStarAlgebra algebra, Index module_dim, std::vector<CMatrix> gram,
                     std::vector<CMatrix> left_action, std::vector<CMatrix> right_action);

    const FdCStarAlgebra& algebra() const { return algebra_; }
    Index module_dim() const { return n_; }
    const CMatrix& gram(Index a, Index b) const { return gram_[static_cast<size_t>(a * n_ + b)]; }
    const std::vector<CMatrix>& gram_entries() const { return gram_; }
    const CMatrix& left_action(Index basis) const { return left_[static_cast<size_t>(basis)]; }
    const CMatrix& right_action(Index basis) const { return right_[static_cast<size_t>(basis)]; }
    const std::vector<CMatrix>& left_actions() const { return left_; }
    const std::vector<CMatrix>& right_actions() const { return right_; }

    /// φ(a) for a general algebra element.
    CMatrix left_action_of(const CMatrix& a) const;

    /// Throws invalid_correspondence when any structural identity fails.
    void validate(const Tolerance& tol) const;

private:
    FdCStarAlgebra algebra_;
    Index n_ = 0;
    std::vector<CMatrix> gram_;
    std::vector<CMatrix> left_;
    std::vector<CMatrix> right_;
};

/// Basis element of a bimodule correspondence: matrix unit (row, col) of the
/// `copy`-th copy of M_{k_left x k_right}.
struct BimoduleUnit {
    Index left_block;
    Index right_block;
    Index copy;
    Index row;
    Index col;
};

using MultiplicityMatrix = std::vector<std::vector<Index>>;

/// E = ⊕_{i,j} mu[i][j] copies of M_{k_i x k_j} with <x, y> = x* y and the
/// obvious left/right multiplications. Every correspondence over a
/// finite-dimensional algebra is of this form up to isomorphism.
FdCorrespondence bimodule_correspondence(const FdCStarAlgebra& algebra, const MultiplicityMatrix& mu);
std::vector<BimoduleUnit> bimodule_basis(const FdCStarAlgebra& algebra, const MultiplicityMatrix& mu);

/// C^n over C with the standard inner product.
FdCorrespondence scalar_correspondence(Index n);

/// A as a correspondence over itself (the zeroth tensor power).
FdCorrespondence trivial_correspondence(const FdCStarAlgebra& algebra);

/// F ⊗_φ E with <f⊗e, f'⊗e'> = <e, φ(<f, f'>) e'>, left action on the first
/// factor and right action on the second. Basis index f * N_E + e.
FdCorrespondence tensor_product(const FdCorrespondence& f, const FdCorrespondence& e);

FdCorrespondence tensor_power(const FdCorrespondence& e, int m);

bool is_full(const FdCorrespondence& e, const Tolerance& tol);

/// E ⊗_σ H realised in orthonormal coordinates, or H itself when there is no
/// module. Formal vectors live in C^N ⊗ C^{dim H} (index a * dim H + j); the
/// quotient coordinates satisfy <embed x, embed y> = <x, y>_formal.
class TensorSpace {
public:
    static TensorSpace base(const StarRepresentation& sigma);
    static TensorSpace interior(std::shared_ptr<const FdCorrespondence> module, const StarRepresentation& sigma,
                                const Tolerance& tol);

    bool is_base() const { return module_ == nullptr; }
    const FdCorrespondence* module() const { return module_.get(); }
    const std::shared_ptr<const FdCorrespondence>& module_ptr() const { return module_; }
    const StarRepresentation& sigma() const { return sigma_; }

    Index dim() const { return dim_; }
    Index formal_dim() const { return formal_dim_; }
    Index factor_dim() const { return module_ ? module_->module_dim() : 1; }
    bool diagonal() const { return diagonal_; }

    CMatrix embed() const;
    CMatrix lift() const;
    /// embed * x
    CMatrix embed_rows(const CMatrix& formal) const;
    /// lift * x
    CMatrix lift_rows(const CMatrix& quotient) const;
    /// x * embed
    CMatrix embed_cols(const CMatrix& x) const;
    /// x * lift
    CMatrix lift_cols(const CMatrix& x) const;

    CMatrix formal_gram() const;

    /// (φ(c) ⊗ I_H) in quotient coordinates; σ(c) for the base space.
    CMatrix left_action(Index basis) const;

    const std::vector<Index>& support() const { return support_; }
    const RVector& scale() const { return scale_; }

private:
    TensorSpace(std::shared_ptr<const FdCorrespondence> module, StarRepresentation sigma)
        : module_(std::move(module)), sigma_(std::move(sigma))
    {
    }

    void set_diagonal(const RVector& diag, const Tolerance& tol);

    std::shared_ptr<const FdCorrespondence> module_;
    StarRepresentation sigma_;
    Index dim_ = 0;
    Index formal_dim_ = 0;
    bool diagonal_ = true;
    // Diagonal Gram: quotient coordinate c is formal vector support_[c] scaled by scale_[c].
    std::vector<Index> support_;
    RVector scale_;
    // General Gram: embed_ = Λ^{1/2} U*, lift_ = U Λ^{-1/2}.
    CMatrix embed_;
    CMatrix lift_;
};

/// I_F ⊗ x, where x maps inner_dom to inner_cod and the outer spaces are
/// F ⊗ inner_dom and F ⊗ inner_cod (canonically F ⊗ (E ⊗ H) = (F ⊗ E) ⊗ H).
/// x must intertwine the left actions; otherwise the amplification is not
/// well defined and an intertwiner error is thrown.
CMatrix amplify(const TensorSpace& outer_dom, const TensorSpace& outer_cod, const TensorSpace& inner_dom,
                const TensorSpace& inner_cod, const CMatrix& x, const Tolerance& tol);

/// Convenience form building the spaces: x maps (dom ⊗ H) to (cod ⊗ H), where
/// a null module stands for H itself.
CMatrix amplify(const FdCorrespondence& f, const StarRepresentation& sigma, const CMatrix& x,
                std::shared_ptr<const FdCorrespondence> dom, std::shared_ptr<const FdCorrespondence> cod,
                const Tolerance& tol);

/// ||x L_dom(c) - L_cod(c) x|| maximised over matrix units.
double intertwining_residual(const TensorSpace& dom, const TensorSpace& cod, const CMatrix& x);

} // namespace pirep
