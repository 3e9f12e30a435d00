#include "pirep/shifts.hpp"

#include "pirep/errors.hpp"

#include <cmath>
#include <string>

namespace pirep {

double WeightedShiftSpec::weight(Index i, Index m) const
{
    const auto it = weights.find({i, m});
    return it == weights.end() ? 1.0 : it->second;
}

Index WeightedShiftSpec::resolved_trunc() const
{
    return trunc < 0 ? minimal_trunc(n, 3) : trunc;
}

void WeightedShiftSpec::validate() const
{
    if (n < 1)
        fail(ErrorKind::domain, "a weighted shift needs n >= 1, got " + std::to_string(n));
    for (const auto& [key, w] : weights) {
        if (key.first < 1 || key.first > n)
            fail(ErrorKind::domain, "weight index i = " + std::to_string(key.first) + " is outside 1.."
                                        + std::to_string(n));
        if (key.second < 0)
            fail(ErrorKind::domain, "weight index m must be nonnegative");
        if (!std::isfinite(w) || w < 0.0)
            fail(ErrorKind::domain, "weights must be finite and nonnegative");
    }
    for (Index m : zero_set)
        if (m < 0)
            fail(ErrorKind::domain, "B must contain nonnegative integers");
}

Index minimal_trunc(Index n, int k)
{
    return orbit_end(n, n, 0, k);
}

Index orbit_end(Index n, Index i, Index m, int k)
{
    Index out = m;
    for (int p = 0; p < k; ++p)
        out = n * out + i;
    return out;
}

std::vector<Index> faithful_window(const WeightedShiftSpec& spec, Index i, int k)
{
    const Index top = spec.resolved_trunc();
    std::vector<Index> out;
    for (Index m = 0; orbit_end(spec.n, i, m, k) <= top; ++m)
        out.push_back(m);
    return out;
}

std::vector<Index> faithful_window(const WeightedShiftSpec& spec, int k)
{
    return faithful_window(spec, spec.n, k);
}

CMatrix shift_component(const WeightedShiftSpec& spec, Index i)
{
    const Index top = spec.resolved_trunc();
    CMatrix v = CMatrix::Zero(top + 1, top + 1);
    for (Index m = 0; spec.n * m + i <= top; ++m)
        v(spec.n * m + i, m) = spec.weight(i, m) * spec.alpha(m);
    return v;
}

ShiftRealization build_shift(const WeightedShiftSpec& spec, const Tolerance& tol)
{
    spec.validate();
    const Index top = spec.resolved_trunc();
    std::vector<CMatrix> v;
    std::vector<std::pair<Index, Index>> dropped;
    for (Index i = 1; i <= spec.n; ++i) {
        v.push_back(shift_component(spec, i));
        for (Index m = 0; m <= top; ++m)
            if (spec.n * m + i > top)
                dropped.emplace_back(i, m);
    }
    auto e = std::make_shared<const FdCorrespondence>(scalar_correspondence(spec.n));
    CovariantRep rep(std::move(e), StarRepresentation(FdCStarAlgebra::scalars(), {top + 1}), std::move(v), tol);
    return {spec, std::move(rep), std::move(dropped)};
}

namespace {

void require_window(const WeightedShiftSpec& spec, Index i, int k)
{
    if (k < 1)
        fail(ErrorKind::domain, "power k must be at least 1, got " + std::to_string(k));
    if (i < 1 || i > spec.n)
        fail(ErrorKind::domain, "i = " + std::to_string(i) + " is outside 1.." + std::to_string(spec.n));
    const Index need = orbit_end(spec.n, i, 0, k);
    if (spec.resolved_trunc() < need)
        fail(ErrorKind::window, "M = " + std::to_string(spec.resolved_trunc()) + " leaves no faithful window for V_"
                                    + std::to_string(i) + "^" + std::to_string(k) + "; use M >= "
                                    + std::to_string(need));
}

CMatrix power(const CMatrix& v, int k)
{
    CMatrix out = CMatrix::Identity(v.rows(), v.cols());
    for (int p = 0; p < k; ++p)
        out = v * out;
    return out;
}

} // namespace

std::vector<Index> kernel_formula(const WeightedShiftSpec& spec, Index i, int k)
{
    spec.validate();
    require_window(spec, i, k);
    std::vector<Index> out;
    for (Index m : faithful_window(spec, i, k)) {
        // n^{p-1} m + Σ_{l=2}^{p} n^{p-l} i is the orbit index after p - 1 steps.
        for (int p = 1; p <= k; ++p)
            if (spec.zero_set.count(orbit_end(spec.n, i, m, p - 1)) != 0) {
                out.push_back(m);
                break;
            }
    }
    return out;
}

std::vector<Index> brute_force_kernel(const WeightedShiftSpec& spec, Index i, int k, const Tolerance& tol)
{
    spec.validate();
    require_window(spec, i, k);
    const Subspace kernel = kernel_of(power(shift_component(spec, i), k), tol);
    std::vector<Index> out;
    for (Index m : faithful_window(spec, i, k)) {
        // ||(I - P_N) e_m||² = 1 - ||row m of the frame||².
        const double rest = 1.0 - kernel.frame().row(m).squaredNorm();
        if (rest <= tol.incl_abs * tol.incl_abs)
            out.push_back(m);
    }
    return out;
}

ShiftPiReport shift_pi_criterion(const WeightedShiftSpec& spec, int max_power, const Tolerance& tol)
{
    spec.validate();
    if (max_power < 1)
        fail(ErrorKind::usage, "max_power must be at least 1");
    const Index top = spec.resolved_trunc();
    std::vector<CMatrix> v;
    for (Index i = 1; i <= spec.n; ++i)
        v.push_back(shift_component(spec, i));

    ShiftPiReport out;
    CMatrix tilde(top + 1, spec.n * (top + 1));
    for (Index i = 0; i < spec.n; ++i)
        tilde.middleCols(i * (top + 1), top + 1) = v[static_cast<size_t>(i)];
    out.pi_residual = partial_isometry_residual(tilde);
    out.is_pi = out.pi_residual <= tol.eq_rel;

    out.weights_unit_off_B = true;
    for (Index i = 1; i <= spec.n; ++i)
        for (Index m = 0; spec.n * m + i <= top; ++m) {
            if (spec.zero_set.count(m) != 0)
                continue;
            const double w = spec.weight(i, m);
            out.weights_unit_off_B = out.weights_unit_off_B && std::abs(w - 1.0) <= tol.eq_rel;
            out.weights_positive_off_B = out.weights_positive_off_B && w > 0.0;
        }
    out.equivalence_holds = !out.weights_positive_off_B || out.is_pi == out.weights_unit_off_B;

    while (out.power_bound < max_power && orbit_end(spec.n, spec.n, 0, out.power_bound + 1) <= top)
        ++out.power_bound;
    if (!out.is_pi)
        return out;
    // Ṽ_k Ṽ_k* = Σ_i V_i (Ṽ_{k-1} Ṽ_{k-1}*) V_i*, and Ṽ_k is PI iff this is a projection.
    CMatrix gram = CMatrix::Identity(top + 1, top + 1);
    for (int k = 1; k <= out.power_bound; ++k) {
        CMatrix next = CMatrix::Zero(top + 1, top + 1);
        for (const CMatrix& vi : v)
            next += vi * gram * vi.adjoint();
        gram = std::move(next);
        if (op_norm(gram * gram - gram) > tol.eq_rel * std::max(1.0, op_norm(gram)))
            break;
        out.power_pi_up_to = k;
    }
    return out;
}

ChainInclusionReport chain_inclusion_check(const WeightedShiftSpec& spec, int k, const Tolerance& tol)
{
    spec.validate();
    if (k < 1)
        fail(ErrorKind::domain, "power k must be at least 1, got " + std::to_string(k));
    ChainInclusionReport out;
    for (Index i = 1; i <= spec.n; ++i) {
        require_window(spec, i, k + 1);
        const CMatrix vi = shift_component(spec, i);
        const std::vector<Index> window = faithful_window(spec, i, k + 1);
        CMatrix frame = CMatrix::Zero(vi.rows(), static_cast<Index>(window.size()));
        for (size_t c = 0; c < window.size(); ++c)
            frame(window[c], static_cast<Index>(c)) = 1.0;
        const Subspace source = intersect(Subspace::from_frame(frame, tol),
                                          ortho_complement(kernel_of(power(vi, k + 1), tol)), tol);
        const Subspace target = ortho_complement(kernel_of(power(vi, k), tol));
        out.residual = std::max(out.residual, invariance_residual(vi, source, target));
    }
    out.holds = out.residual <= tol.incl_abs;
    return out;
}

} // namespace pirep
