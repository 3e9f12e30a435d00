#pragma once

#include "pirep/covrep.hpp"

#include <array>
#include <string>
#include <vector>

namespace pirep {

/// Result of a check whose hypotheses may fail. Hypothesis failure is never
/// reported as a failed conclusion.
enum class Outcome { holds, fails, not_applicable };
const char* to_string(Outcome o);

/// Factors (σ, V^{(i)}) of E_1, ..., E_n on a common H, with the stages
/// T̃^{(i)} = T̃^{(i-1)} (I_{E_1 ⊗ ... ⊗ E_{i-1}} ⊗ Ṽ^{(i)}) computed eagerly.
/// Stage indices are 1-based; stage 0 is I_H on the space H.
class ProductRep {
public:
    /// Composition error when the factors disagree on σ; resource error past
    /// the smallest tensor cap of the factors.
    explicit ProductRep(std::vector<CovariantRep> factors);

    int size() const { return static_cast<int>(factors_.size()); }
    const CovariantRep& factor(int i) const { return factors_[static_cast<size_t>(i - 1)]; }
    const std::vector<CovariantRep>& factors() const { return factors_; }
    const StarRepresentation& sigma() const { return factors_.front().sigma(); }
    const Tolerance& tolerance() const { return factors_.front().tolerance(); }

    /// E_1 ⊗ ... ⊗ E_i; A for i = 0.
    const std::shared_ptr<const FdCorrespondence>& module(int i) const;
    /// (E_1 ⊗ ... ⊗ E_i) ⊗ H; H for i = 0.
    const TensorSpace& space(int i) const;
    const CMatrix& stage(int i) const;
    /// I_{E_1 ⊗ ... ⊗ E_{i-1}} ⊗ Ṽ^{(i)} : space(i) -> space(i - 1).
    const CMatrix& amplified_factor(int i) const;
    /// I_{E_1 ⊗ ... ⊗ E_{i-1}} ⊗ Ṽ^{(i)†} : space(i - 1) -> space(i).
    CMatrix amplified_factor_pinv(int i) const;
    /// I_{E_1 ⊗ ... ⊗ E_i} ⊗ x for x on H.
    CMatrix amplify_on_h(int i, const CMatrix& x) const;

    /// (σ, T^{(i)}) as a representation of E_1 ⊗ ... ⊗ E_i.
    CovariantRep as_rep(int i) const;

private:
    std::vector<CovariantRep> factors_;
    std::vector<std::shared_ptr<const FdCorrespondence>> modules_;
    std::vector<TensorSpace> spaces_;
    std::vector<CMatrix> amplified_;
    std::vector<CMatrix> stages_;
};

/// Ṽ¹(I ⊗ Ṽ²Ṽ²*) = Ṽ²Ṽ²*Ṽ¹, which forces the product to be partial isometric.
struct IntertwiningReport {
    Outcome condition = Outcome::not_applicable;
    double residual = 0.0;
    bool product_is_pi = false;
    double product_residual = 0.0;
    /// False only when the condition holds but the product is not PI.
    bool conclusion_consistent = true;
};
IntertwiningReport sufficient_intertwining_check(const CovariantRep& rep1, const CovariantRep& rep2);

/// 𝔈 = Ṽ¹*Ṽ¹ and 𝔉 = I_{E_1} ⊗ Ṽ²Ṽ²*. Precondition error unless both factors
/// are partial isometric.
struct CommutingProjectionReport {
    bool product_is_pi = false;
    bool projections_commute = false;
    double product_residual = 0.0;
    double commutator_norm = 0.0;
    /// ||𝔈𝔉||; a value above 1 marks a borderline verdict.
    double ef_norm = 0.0;
};
CommutingProjectionReport commuting_projection_test(const CovariantRep& rep1, const CovariantRep& rep2);

/// The four chain conditions for the passage from stage j - 1 to stage j,
/// j = 2..n:
///   1: T̃^{(j)} is a partial isometry
///   2: (I ⊗ Ṽ^{(j)}Ṽ^{(j)*}) R(T̃^{(j-1)*}) ⊆ R(T̃^{(j-1)*})
///   3: T̃^{(j-1)*}T̃^{(j-1)} R(I ⊗ Ṽ^{(j)}) ⊆ R(I ⊗ Ṽ^{(j)})
///   4: P_{R(T̃^{(j-1)*})} P_{R(I ⊗ Ṽ^{(j)})} is idempotent
/// The equivalence at stage j presumes stage j - 1 is partial isometric, so
/// the comparable verdicts are the cumulative ones: condition k holds up to j.
struct ChainReport {
    std::vector<int> stages;
    std::array<std::vector<double>, 4> residuals;
    std::array<std::vector<bool>, 4> stagewise;
    std::array<std::vector<bool>, 4> cumulative;

    bool verdicts_agree() const;
    double max_residual() const;
};
/// Precondition error unless every factor is partial isometric.
ChainReport erdelyi_chain_test(const ProductRep& product);

/// pseudoinverse(T̃^{(n)}) against (I ⊗ Ṽ^{(n)†}) ... (I_{E_1} ⊗ Ṽ^{(2)†}) Ṽ^{(1)†}.
struct PinvChainReport {
    bool factors_pi = false;
    bool is_pi = false;
    bool pinv_factors_match = false;
    double product_residual = 0.0;
    double chain_residual = 0.0;
};
PinvChainReport product_pinv_test(const ProductRep& product);

/// [[Ṽ, (I - ṼṼ*)^{1/2}], [0, 0]] on (E ⊗ H) ⊕ H -> H ⊕ H.
CMatrix contractive_dilation(const CMatrix& tilde, const Tolerance& tol);

/// M = [[Ṽ¹(I ⊗ Ṽ²), Ṽ¹(I ⊗ (I - Ṽ²Ṽ²*))^{1/2}], [0, 0]] on
/// (E_1 ⊗ E_2 ⊗ H) ⊕ (E_1 ⊗ H) -> H ⊕ H. Precondition error unless both
/// factors are contractive.
struct DefectDilationReport {
    CMatrix m;
    bool m_is_pi = false;
    bool rep1_is_pi = false;
    double m_residual = 0.0;
    double rep1_residual = 0.0;
    bool single_dilation_is_pi = false;
    double single_dilation_residual = 0.0;
};
DefectDilationReport defect_dilation_test(const CovariantRep& rep1, const CovariantRep& rep2);

} // namespace pirep
