#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <string_view>

namespace pirep {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Numeric policy for every rank, projector and inclusion decision.
///
/// A singular value s is treated as zero iff
/// s <= rank_rel * max(s_max, 1) * max(rows, cols); operators here are
/// contractions or close to them, so scale 1 is the floor. Identity checks
/// compare a residual against eq_rel (scaled by max(norm, 1) where the check
/// is homogeneous), and subspace inclusions compare ||(I - P_target) F_source||
/// against incl_abs.
struct Tolerance {
    double rank_rel = 1e-10;
    double eq_rel = 1e-8;
    double incl_abs = 1e-8;

    void validate() const;
};

void require_finite(const CMatrix& m, std::string_view what);

/// Largest singular value; zero for empty matrices.
double op_norm(const CMatrix& m);

/// Thin SVD with singular values in descending order; `rank` applies the
/// tolerance cutoff.
struct SvdResult {
    CMatrix u;
    RVector s;
    CMatrix v;
    Index rank = 0;
};

SvdResult thin_svd(const CMatrix& m, const Tolerance& tol);

Index numerical_rank(const CMatrix& m, const Tolerance& tol);

CMatrix pseudoinverse(const CMatrix& m, const Tolerance& tol);

/// Orthonormal columns spanning R(m) / N(m).
CMatrix range_frame(const CMatrix& m, const Tolerance& tol);
CMatrix kernel_frame(const CMatrix& m, const Tolerance& tol);

CMatrix range_projector(const CMatrix& m, const Tolerance& tol);
CMatrix kernel_projector(const CMatrix& m, const Tolerance& tol);

/// Columns completing an orthonormal frame to a basis of the ambient space.
CMatrix orthonormal_complement(const CMatrix& frame);

/// Square root of a positive semidefinite matrix. Eigenvalues down to
/// -eq_rel * ||m|| are clamped to zero silently; anything below ten times
/// that is a domain error.
CMatrix psd_sqrt(const CMatrix& m, const Tolerance& tol);

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// I_n (x) m, block diagonal.
CMatrix kron_identity(Index n, const CMatrix& m);

bool is_partial_isometry(const CMatrix& m, const Tolerance& tol);
bool is_isometry(const CMatrix& m, const Tolerance& tol);
bool is_projection(const CMatrix& m, const Tolerance& tol);
bool is_contraction(const CMatrix& m, const Tolerance& tol);

/// The six classical characterisations of a partial isometry, evaluated
/// independently:
///   0: ||m x|| = ||x|| on N(m)^perp      (frame Gram  F* m* m F = I)
///   1: m* is a partial isometry          (frame Gram  G* m m* G = I)
///   2: m m* m = m
///   3: m* m is the projection onto R(m*)
///   4: m m* is the projection onto R(m)
///   5: m^dagger = m*
/// The verdict is condition 2; the others are diagnostics.
struct PartialIsometryConditions {
    static constexpr int count = 6;

    std::array<double, count> residuals{};
    std::array<bool, count> holds{};
    double norm = 0.0;

    bool verdict() const { return holds[2]; }
    bool consistent() const;
    double max_residual() const;
};

PartialIsometryConditions partial_isometry_conditions(const CMatrix& m, const Tolerance& tol);

/// ||m m* m - m|| / max(||m||, 1), the residual behind every partial-isometry verdict.
double partial_isometry_residual(const CMatrix& m);

} // namespace pirep
