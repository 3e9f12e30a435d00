#pragma once

#include "pirep/covrep.hpp"
#include "pirep/products.hpp"

#include <string>
#include <vector>

namespace pirep {

/// Ṽ' = Ṽ (Ṽ*Ṽ)†, defined for any finite-rank Ṽ.
CMatrix cauchy_dual(const CMatrix& tilde, const Tolerance& tol);
/// As above; numeric_failure when the rep is PI but Ṽ' differs from Ṽ.
CMatrix cauchy_dual(const CovariantRep& rep);

struct BiRegularityReport {
    /// not_applicable unless the rep is regular.
    Outcome applicable = Outcome::not_applicable;
    int n_max = 0;
    bool bi_regular = false;
    /// ||(I - P_{R(Ṽ^{†(n)})}) F_{N(I_{E^{⊗n}} ⊗ Ṽ†)}|| for n = 1..n_max.
    std::vector<double> residuals;
    /// N(I_{E^{⊗n}} ⊗ Ṽ*) ⊆ R(Ṽ_n*), the companion inclusion for regular reps.
    bool adjoint_regular = false;
    std::vector<double> adjoint_residuals;
};
/// n_max is clipped so that E^{⊗n_max+1} ⊗ H fits under the tensor cap.
BiRegularityReport bi_regularity(const CovariantRep& rep, int n_max = 3);
bool is_bi_regular(const CovariantRep& rep, int n_max = 3);

/// [W]_X: the span of X_m(E^{⊗m} ⊗ W) over m = 0..bound with X_0 = I and
/// X_{m+1} = X (I_E ⊗ X_m), grown as G_{j+1} = W + X(E ⊗ G_j) until the
/// dimension stops increasing. W is first replaced by σ(A)W so that E ⊗ W is
/// defined. A negative bound means dim H.
Subspace generated_invariant_subspace(const CovariantRep& rep, const CMatrix& x, const Subspace& w, int bound = -1);

struct WoldResult {
    Subspace wandering;
    Subspace generated;
    Subspace residual;
    /// ||P_generated + P_residual - I||
    double direct_sum_residual = 0.0;
    /// ||P_generated P_residual||
    double orthogonality_residual = 0.0;
    bool valid(const Tolerance& tol) const
    {
        return direct_sum_residual <= tol.eq_rel && orthogonality_residual <= tol.incl_abs;
    }
};

struct WoldReport {
    /// holds when the rep is bi-regular (two-sided form); the corollary form
    /// additionally needs regular and PI.
    Outcome applicable = Outcome::not_applicable;
    std::string reason;
    bool regular = false;
    bool bi_regular = false;
    bool is_pi = false;
    /// [H ⊖ R(Ṽ)]_Ṽ beside R^∞(Ṽ').
    WoldResult primal;
    /// [H ⊖ R(Ṽ)]_Ṽ' beside R^∞(Ṽ).
    WoldResult dual;
    /// Largest projector gap between the primal and dual subspaces.
    double form_gap = 0.0;
};
/// Both forms are always computed; applicable records whether the
/// decomposition is claimed.
WoldReport wold_decompose(const CovariantRep& rep, int bound = -1);

} // namespace pirep
