#pragma once

#include "pirep/covrep.hpp"
#include "pirep/products.hpp"

#include <string>
#include <vector>

namespace pirep {

inline constexpr int kDefaultPowerBound = 4;

struct InclusionCheck {
    bool holds = true;
    double residual = 0.0;
};

/// (I_{E^{⊗m-1}} ⊗ Ṽ) N(Ṽ_m)^⊥ ⊆ N(Ṽ_{m-1})^⊥ with N(Ṽ_0)^⊥ = H.
InclusionCheck kernel_chain_condition(const CovariantRep& rep, int m);
/// (I_{E^{⊗m-1}} ⊗ ṼṼ*) N(Ṽ_{m-1}) ⊆ N(Ṽ_{m-1}).
InclusionCheck range_invariance_condition(const CovariantRep& rep, int m);

/// Per-power flags for m = 1..n_max (index m - 1). Power partial isometry is
/// certified only up to n_max.
struct PowerReport {
    int n_max = 0;
    /// not_applicable when Ṽ itself is not partial isometric.
    Outcome applicable = Outcome::not_applicable;
    std::vector<bool> pi_flags;
    std::vector<bool> chain_flags;
    std::vector<bool> range_flags;
    std::vector<double> pi_residuals;
    std::vector<double> chain_residuals;
    std::vector<double> range_residuals;

    /// For every n: (Ṽ_1..Ṽ_n all PI) iff (chain holds at 1..n), and the
    /// chain and range forms agree at every m.
    bool consistent() const;
};
PowerReport power_report(const CovariantRep& rep, int n_max = kDefaultPowerBound);

/// Largest m with E^{⊗m} ⊗ H inside the rep's tensor cap (64 when dim E <= 1).
int max_tensor_power(const CovariantRep& rep);

/// ∩_n R(Ṽ_n), via R_{n+1} = Ṽ(E ⊗ R_n) until the dimension stops dropping.
Subspace generalized_range(const CovariantRep& rep);
/// The same for any intertwiner x : E ⊗ H -> H in place of Ṽ.
Subspace generalized_range(const CovariantRep& rep, const CMatrix& x);

struct RegularityCheck {
    bool regular = false;
    /// ||(I - P_{E ⊗ R^∞}) F_{N(Ṽ)}||
    double residual = 0.0;
    Subspace generalized_range;
};
/// N(Ṽ) ⊆ E ⊗ R^∞(Ṽ); the range is closed in finite dimension.
RegularityCheck regularity(const CovariantRep& rep);
bool is_regular(const CovariantRep& rep);

/// SṼS = S and ṼSṼ = Ṽ for S : H -> E ⊗ H; when the rep is regular, also
/// (I_{E^{⊗m}} ⊗ S) N(Ṽ_m) ⊆ N(Ṽ_{m+1}) for m = 1..bound. S must intertwine
/// the left actions for the amplification to exist.
struct GeneralizedInverseReport {
    bool is_gen_inverse = false;
    double svs_residual = 0.0;
    double vsv_residual = 0.0;
    bool regular = false;
    /// Largest m with the inclusion verified for 1..m; 0 when not attempted
    /// or failing at m = 1.
    int lemma_holds_up_to = 0;
    int lemma_bound = 0;
    std::vector<double> lemma_residuals;
};
GeneralizedInverseReport generalized_inverse_check(const CovariantRep& rep, const CMatrix& s, int bound = 3);

/// For regular reps: PI iff power PI, certified up to the bound.
struct RegularPowerReport {
    Outcome applicable = Outcome::not_applicable;
    bool is_pi = false;
    int bound = 0;
    int power_pi_up_to = 0;
    /// is_pi implies power_pi_up_to == bound.
    bool consistent = true;
};
RegularPowerReport regular_pi_iff_power_pi(const CovariantRep& rep, int bound = kDefaultPowerBound);

/// The root criterion for a contractive rep of a full E with Ṽ_k partial
/// isometric. With X = I_{E^{⊗k-1}} ⊗ Ṽ and D = N(Ṽ_k) ⊖ N(X):
///   a: X is isometric on D                 (frame Gram ||F_D* X* X F_D - I||)
///   b: X N(Ṽ_k)^⊥ is orthogonal to X D      (||P P'|| of the image subspaces)
struct RootReport {
    Outcome applicable = Outcome::not_applicable;
    std::string reason;
    int k = 0;
    bool cond_a = false;
    bool cond_b = false;
    bool rep_is_pi = false;
    double residual_a = 0.0;
    double residual_b = 0.0;
    double rep_residual = 0.0;
    /// ||(I - P_{N(Ṽ_k)}) F_{N(X)}||, zero in exact arithmetic.
    double kernel_inclusion_residual = 0.0;
    /// The chain inclusion X N(Ṽ_k)^⊥ ⊆ N(Ṽ_{k-1})^⊥, which with a forces b.
    bool chain_holds = false;

    bool equivalence_holds() const { return (cond_a && cond_b) == rep_is_pi; }
};
RootReport root_criterion(const CovariantRep& rep, int k);

/// N(I_E ⊗ Ṽ) = N(Ṽ_2) under the root hypotheses forces Ṽ to be PI.
struct GuptaReport {
    Outcome applicable = Outcome::not_applicable;
    std::string reason;
    bool kernels_equal = false;
    double kernel_residual = 0.0;
    bool rep_is_pi = false;
    /// False only when the kernels agree but Ṽ is not PI.
    bool consistent = true;
};
GuptaReport gupta_criterion(const CovariantRep& rep, int k);

} // namespace pirep
