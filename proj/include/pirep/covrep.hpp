#pragma once

#include "pirep/correspondence.hpp"
#include "pirep/subspace.hpp"

#include <memory>
#include <vector>

namespace pirep {

inline constexpr Index kDefaultTensorCap = Index{1} << 18;

/// A covariant representation (σ, V) of E on H, with Ṽ : E ⊗_σ H -> H and its
/// tensor powers. Immutable after construction; the power caches are shared
/// between copies and are safe under concurrent readers.
class CovariantRep {
public:
    /// Throws invalid_representation when V is not covariant or does not
    /// vanish on the null vectors of E ⊗ H.
    CovariantRep(std::shared_ptr<const FdCorrespondence> e, StarRepresentation sigma, std::vector<CMatrix> v_on_basis,
                 const Tolerance& tol = {}, Index tensor_cap = kDefaultTensorCap);

    /// Rebuilds V(ξ_a) from the columns of Ṽ · embed.
    static CovariantRep from_tilde(std::shared_ptr<const FdCorrespondence> e, StarRepresentation sigma,
                                   const CMatrix& tilde, const Tolerance& tol = {},
                                   Index tensor_cap = kDefaultTensorCap);

    const FdCorrespondence& correspondence() const { return *e_; }
    const std::shared_ptr<const FdCorrespondence>& correspondence_ptr() const { return e_; }
    const StarRepresentation& sigma() const { return sigma_; }
    const std::vector<CMatrix>& v_on_basis() const { return v_; }
    const Tolerance& tolerance() const { return tol_; }
    Index tensor_cap() const { return cap_; }
    Index hilbert_dim() const { return sigma_.dim(); }

    /// [V(ξ_1) ... V(ξ_N)] on the formal tensor space.
    const CMatrix& tilde_formal() const { return formal_; }
    const CMatrix& tilde() const { return tilde_; }
    /// max over matrix units of ||V(φ(c)ξ) - σ(c)V(ξ)|| and ||V(ξc) - V(ξ)σ(c)||.
    double covariance_residual() const { return covariance_residual_; }
    /// max over matrix units of ||Ṽ(φ(c) ⊗ I) - σ(c)Ṽ||.
    double intertwining_residual() const { return intertwining_residual_; }

    /// E^{⊗m}; m = 0 gives A.
    std::shared_ptr<const FdCorrespondence> power_module(int m) const;
    /// E^{⊗m} ⊗ H; m = 0 gives H. Resource error past the tensor cap.
    const TensorSpace& space(int m) const;
    /// I_{E^{⊗m}} ⊗ x for x : E^{⊗dom} ⊗ H -> E^{⊗cod} ⊗ H.
    CMatrix amplify(int m, const CMatrix& x, int dom, int cod) const;

    /// Ṽ_m = Ṽ (I_E ⊗ Ṽ) ... (I_{E^{⊗m-1}} ⊗ Ṽ); Ṽ_0 = I_H. The result is
    /// checked against V(ξ_1)...V(ξ_m)h on 20 random simple tensors.
    const CMatrix& tilde_power(int m) const;
    const CMatrix& pinv() const;
    /// (I_{E^{⊗m-1}} ⊗ Ṽ†) ... (I_E ⊗ Ṽ†) Ṽ†; identity for m = 0.
    CMatrix pinv_chain(int m) const;

    /// N(Ṽ_m) inside E^{⊗m} ⊗ H and R(Ṽ_m) inside H.
    Subspace kernel(int m) const;
    Subspace range(int m) const;

private:
    struct Cache;

    std::shared_ptr<const FdCorrespondence> e_;
    StarRepresentation sigma_;
    std::vector<CMatrix> v_;
    Tolerance tol_;
    Index cap_;
    CMatrix formal_;
    CMatrix tilde_;
    double covariance_residual_ = 0.0;
    double intertwining_residual_ = 0.0;
    std::shared_ptr<Cache> cache_;
};

struct ClassificationReport {
    bool is_contractive = false;
    bool is_isometric = false;
    bool is_coisometric = false;
    /// ṼṼ*Ṽ = Ṽ; the other five conditions are diagnostics.
    bool is_partial_isometric = false;
    double norm = 0.0;
    double isometry_residual = 0.0;
    PartialIsometryConditions conditions;
    /// False when the six conditions disagree at tolerance.
    bool consistent = true;
};

ClassificationReport classify(const CMatrix& tilde, const Tolerance& tol);
ClassificationReport classify(const CovariantRep& rep);

/// Compression to a reducing subspace K, in a σ-adapted orthonormal basis of K.
/// Domain error naming the first inclusion that fails.
CovariantRep restrict(const CovariantRep& rep, const Subspace& k);

/// The σ-invariance and the two Ṽ inclusions that make K reducing.
struct ReducingCheck {
    double sigma_invariance = 0.0;
    double forward = 0.0;
    double adjoint = 0.0;
    bool reducing(const Tolerance& tol) const
    {
        return sigma_invariance <= tol.incl_abs && forward <= tol.incl_abs && adjoint <= tol.incl_abs;
    }
};
ReducingCheck reducing_check(const CovariantRep& rep, const Subspace& k);

/// (σ1 ⊕ σ2, V1 ⊕ V2), with H1 ⊕ H2 reordered into the standard form of σ1 ⊕ σ2.
CovariantRep direct_sum(const CovariantRep& a, const CovariantRep& b);
/// The unitary H1 ⊕ H2 -> H of direct_sum.
CMatrix direct_sum_embedding(const StarRepresentation& a, const StarRepresentation& b);

/// Covariant reps of a bimodule correspondence ⊕ mu[i][j] M_{k_i x k_j} are
/// determined by row blocks R_i : ⊕_{(j,t)} C^{m_j} -> C^{m_i}, column order
/// (j, t) lexicographic. V of copy t of unit (p, q) in (i, j) is e_pq ⊗ T_ijt
/// where T_ijt is the (j, t) column block of R_i, and Ṽ ≅ ⊕_i I_{k_i} ⊗ R_i.
struct BlockShape {
    FdCStarAlgebra algebra;
    MultiplicityMatrix mu;
    std::vector<Index> multiplicities;

    Index row_count(Index i) const;
    Index column_count(Index i) const;
};

CovariantRep rep_from_row_blocks(const BlockShape& shape, const std::vector<CMatrix>& row_blocks,
                                 const Tolerance& tol = {}, Index tensor_cap = kDefaultTensorCap);

} // namespace pirep
