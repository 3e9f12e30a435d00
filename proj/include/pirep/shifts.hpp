#pragma once

#include "pirep/covrep.hpp"

#include <map>
#include <set>
#include <utility>
#include <vector>

namespace pirep {

/// Unilateral weighted shift of E = C^n on span{e_0, ..., e_M}:
/// V_i e_m = w_{i,m} α_m e_{nm+i} for i = 1..n, with α_m = 0 exactly on B.
/// Entries with nm + i > M are dropped by the truncation.
struct WeightedShiftSpec {
    Index n = 1;
    /// Sparse overrides keyed by (i, m); unlisted weights are 1.
    std::map<std::pair<Index, Index>, double> weights;
    std::set<Index> zero_set;
    /// Negative selects the smallest M whose window supports k = 3.
    Index trunc = -1;

    double weight(Index i, Index m) const;
    double alpha(Index m) const { return zero_set.count(m) != 0 ? 0.0 : 1.0; }
    Index resolved_trunc() const;
    /// Domain error for n < 1, i outside 1..n, negative m or negative/non-finite weights.
    void validate() const;
};

/// n + n² + ... + n^k: the smallest M for which e_0 stays in the window of
/// V_n^k.
Index minimal_trunc(Index n, int k);

/// m_k = n^k m + i(1 + n + ... + n^{k-1}), the index reached by V_i^k from e_m.
Index orbit_end(Index n, Index i, Index m, int k);

/// {m : orbit_end(n, i, m, k) <= M}, where the truncated V_i^k is exact.
std::vector<Index> faithful_window(const WeightedShiftSpec& spec, Index i, int k);
/// Intersection of the windows over i = 1..n (the binding one is i = n).
std::vector<Index> faithful_window(const WeightedShiftSpec& spec, int k);

/// Truncated V_i on C^{M+1}.
CMatrix shift_component(const WeightedShiftSpec& spec, Index i);

struct ShiftRealization {
    WeightedShiftSpec spec;
    CovariantRep rep;
    /// Pairs (i, m) with nm + i > M whose image the truncation dropped.
    std::vector<std::pair<Index, Index>> out_of_window;
};
/// Scalar algebra, E = C^n with its standard basis δ_1..δ_n, H = C^{M+1}.
ShiftRealization build_shift(const WeightedShiftSpec& spec, const Tolerance& tol = {});

/// {m ∈ W_k(i) : n^{p-1} m + Σ_{l=2}^{p} n^{p-l} i ∈ B for some p <= k}.
/// Window error when W_k(i) is empty.
std::vector<Index> kernel_formula(const WeightedShiftSpec& spec, Index i, int k);
/// The m ∈ W_k(i) with e_m numerically in the kernel of the truncated V_i^k.
std::vector<Index> brute_force_kernel(const WeightedShiftSpec& spec, Index i, int k, const Tolerance& tol = {});

struct ShiftPiReport {
    bool is_pi = false;
    double pi_residual = 0.0;
    bool weights_unit_off_B = false;
    /// The stated equivalence presumes w_{i,m} > 0 off B; a zero weight there
    /// acts like an extra element of B.
    bool weights_positive_off_B = true;
    bool equivalence_holds = true;
    /// Largest k with W_k nonempty, capped by the requested bound.
    int power_bound = 0;
    /// Largest k <= power_bound with Ṽ_k PI for all smaller powers too; zero
    /// when is_pi is false.
    int power_pi_up_to = 0;
};
ShiftPiReport shift_pi_criterion(const WeightedShiftSpec& spec, int max_power = 4, const Tolerance& tol = {});

struct ChainInclusionReport {
    bool holds = true;
    /// Worst ||(I - P_{N(V_i^k)^⊥}) V_i F|| over i.
    double residual = 0.0;
};
/// V_i (N(V_i^{k+1})^⊥ ∩ window) ⊆ N(V_i^k)^⊥ for every i. Window error when
/// M does not support k + 1.
ChainInclusionReport chain_inclusion_check(const WeightedShiftSpec& spec, int k, const Tolerance& tol = {});

} // namespace pirep
