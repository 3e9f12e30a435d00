#pragma once

#include "pirep/covrep.hpp"
#include "pirep/random.hpp"

#include <utility>

namespace pirep {

/// Bounds for random shapes. Algebras are C or a direct sum of up to
/// max_blocks matrix blocks of size at most max_block_size.
struct ShapeLimits {
    Index max_hilbert_dim = 8;
    Index max_module_dim = 4;
    Index max_blocks = 2;
    Index max_block_size = 2;
    Index max_multiplicity = 3;
    bool scalar_only = false;
};

/// U diag(1..1, 0..0) W* with Haar U, W; rank < 0 draws it uniformly.
CMatrix random_partial_isometry(Rng& rng, Index rows, Index cols, Index rank = -1);
/// Singular values s / s_max mapped to 1 when at least 1/2, else 0.
CMatrix project_to_partial_isometry(const CMatrix& m, const Tolerance& tol);
/// U from m = U|m| restricted to the numerical support.
CMatrix polar_part(const CMatrix& m, const Tolerance& tol);

/// A random algebra, σ and bimodule with dim H ≤ max_hilbert_dim.
BlockShape random_block_shape(Rng& rng, const ShapeLimits& limits);
/// Same algebra and σ, freshly drawn bimodule multiplicities.
BlockShape redraw_module(Rng& rng, const BlockShape& shape, const ShapeLimits& limits);
/// The shape of the scalar algebra acting on C^d through E = C^n.
BlockShape scalar_shape(Index d, Index n);

/// Gaussian row blocks projected to {0, 1} spectra; the result is partial
/// isometric. A nonnegative rank forces every row block to that rank (capped
/// by its shape).
CovariantRep random_pi_rep(Rng& rng, const BlockShape& shape, const Tolerance& tol = {},
                           Index tensor_cap = kDefaultTensorCap, Index rank = -1);
/// Row blocks with independent spectra in [0, 1]; norm at most 1.
CovariantRep random_contractive_rep(Rng& rng, const BlockShape& shape, const Tolerance& tol = {},
                                    Index tensor_cap = kDefaultTensorCap);
/// A partial isometric rep whose initial projection commutes with
/// I_E ⊗ Ṽ'Ṽ'* for the given second factor, so the product is partial isometric.
CovariantRep random_commuting_first_factor(Rng& rng, const BlockShape& shape, const CovariantRep& second);
/// Two partial isometric reps on a shared σ with independently drawn modules;
/// one draw in three builds the first factor with random_commuting_first_factor.
std::pair<CovariantRep, CovariantRep> random_pi_pair(Rng& rng, const ShapeLimits& limits, const Tolerance& tol = {},
                                                     Index tensor_cap = kDefaultTensorCap);

/// Σ_i (1/k_i) Σ_{p,q} L_cod(e^i_pq) z L_dom(e^i_qp): the average over the
/// unitary group of A, which fixes exactly the intertwiners.
CMatrix project_to_intertwiners(const TensorSpace& dom, const TensorSpace& cod, const CMatrix& z);

/// S = (Ṽ† + P_{N(Ṽ)} Y) Ṽ (Ṽ† + X P_{R(Ṽ)⊥}) with random intertwiners X, Y
/// from H to E ⊗ H; every such S satisfies SṼS = S and ṼSṼ = Ṽ.
CMatrix random_generalized_inverse(Rng& rng, const CovariantRep& rep);

/// Scalar E = C on C^d with V e_k = e_{k-1} and V e_0 = 0.
CovariantRep truncated_shift(Index d, const Tolerance& tol = {});
/// Scalar E = C on C^d with V a Haar unitary.
CovariantRep scalar_unitary(Rng& rng, Index d, const Tolerance& tol = {});

/// Regular representations of a commutative algebra C^r: a chain of blocks
/// joined by injective edges (nilpotent part, all of it generated by the
/// wandering space) beside loop blocks with surjective self-edges (the part
/// inside R^∞). With partial_isometric the edges are isometries and the loops
/// co-isometries, giving a regular PI rep; otherwise their spectra lie in
/// [0.3, 0.9] away from 1.
CovariantRep random_regular_rep(Rng& rng, const ShapeLimits& limits, bool partial_isometric,
                                const Tolerance& tol = {});

/// The same draw with its block layout: H = chain ⊕ loops, the chain taking
/// the first chain_dim coordinates.
struct RegularFixture {
    CovariantRep rep;
    Index chain_dim = 0;
};
RegularFixture random_regular_fixture(Rng& rng, const ShapeLimits& limits, bool partial_isometric,
                                      const Tolerance& tol = {});

/// A contractive rep with Ṽ_2 partial isometric: a square-zero part mapping
/// one level of each multiplicity space into another, beside an optional
/// co-isometric part. The square-zero block is PI when pi_block is set and a
/// contraction with spectrum in [0.2, 0.8] otherwise. E is full.
CovariantRep random_root_fixture(Rng& rng, const ShapeLimits& limits, bool pi_block, const Tolerance& tol = {});

/// Scalar E = C with V a partial isometry whose initial and final spaces
/// coincide (W (U ⊕ 0) W*), so N(V) = N(V^2).
CovariantRep random_aligned_kernel_rep(Rng& rng, Index d, const Tolerance& tol = {});

} // namespace pirep
