#include "pirep/numerics.hpp"

#include "pirep/errors.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <sstream>

#ifdef PIREP_HAVE_LAPACKE
#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>
#endif

namespace pirep {

namespace {

// Thin SVD through LAPACK's divide and conquer driver when available, with
// Eigen as the fallback. Returns false when neither converges.
bool svd_backend(const CMatrix& m, bool vectors, CMatrix& u, RVector& s, CMatrix& v)
{
    const Index k = std::min(m.rows(), m.cols());
#ifdef PIREP_HAVE_LAPACKE
    {
        CMatrix a = m;
        s.resize(k);
        CMatrix ut(vectors ? m.rows() : 1, vectors ? k : 1);
        CMatrix vt(vectors ? k : 1, vectors ? m.cols() : 1);
        const lapack_int info =
            LAPACKE_zgesdd(LAPACK_COL_MAJOR, vectors ? 'S' : 'N', static_cast<lapack_int>(m.rows()),
                           static_cast<lapack_int>(m.cols()), a.data(), static_cast<lapack_int>(a.outerStride()),
                           s.data(), ut.data(), static_cast<lapack_int>(ut.rows()), vt.data(),
                           static_cast<lapack_int>(vt.rows()));
        if (info == 0) {
            if (vectors) {
                u = std::move(ut);
                v = vt.adjoint();
            }
            return true;
        }
    }
#endif
    if (vectors) {
        Eigen::BDCSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.info() != Eigen::Success)
            return false;
        u = svd.matrixU();
        v = svd.matrixV();
        s = svd.singularValues();
    } else {
        Eigen::BDCSVD<CMatrix> svd(m);
        if (svd.info() != Eigen::Success)
            return false;
        s = svd.singularValues();
    }
    return true;
}

std::string shape(const CMatrix& m)
{
    std::ostringstream os;
    os << m.rows() << "x" << m.cols();
    return os.str();
}

// Frame Gram residual ||F* A F - I||, zero for an empty frame.
double gram_identity_residual(const CMatrix& a, const CMatrix& frame)
{
    if (frame.cols() == 0)
        return 0.0;
    const CMatrix g = frame.adjoint() * a * frame;
    return op_norm(g - CMatrix::Identity(g.rows(), g.cols()));
}

} // namespace

void Tolerance::validate() const
{
    if (!(rank_rel > 0.0) || !(rank_rel < 1.0))
        fail(ErrorKind::usage, "rank tolerance must lie in (0, 1)");
    if (!(eq_rel > 0.0))
        fail(ErrorKind::usage, "equality tolerance must be positive");
    if (!(incl_abs > 0.0))
        fail(ErrorKind::usage, "inclusion tolerance must be positive");
}

void require_finite(const CMatrix& m, std::string_view what)
{
    if (!m.allFinite())
        fail(ErrorKind::domain, std::string(what) + ": matrix " + shape(m) + " has non-finite entries");
}

double op_norm(const CMatrix& m)
{
    if (m.size() == 0)
        return 0.0;
    if (m.cols() == 1)
        return m.norm();
    CMatrix u;
    CMatrix v;
    RVector s;
    if (!svd_backend(m, false, u, s, v))
        fail(ErrorKind::numeric_failure, "singular value computation did not converge for " + shape(m));
    return s(0);
}

SvdResult thin_svd(const CMatrix& m, const Tolerance& tol)
{
    require_finite(m, "svd");
    SvdResult out;
    const Index k = std::min(m.rows(), m.cols());
    if (k == 0) {
        out.u = CMatrix(m.rows(), 0);
        out.v = CMatrix(m.cols(), 0);
        out.s = RVector(0);
        return out;
    }
    if (!svd_backend(m, true, out.u, out.s, out.v))
        fail(ErrorKind::numeric_failure, "singular value decomposition did not converge for " + shape(m));
    const double smax = out.s(0);
    const double cutoff = tol.rank_rel * std::max(smax, 1.0) * static_cast<double>(std::max(m.rows(), m.cols()));
    out.rank = 0;
    if (smax > 0.0) {
        while (out.rank < k && out.s(out.rank) > cutoff)
            ++out.rank;
    }
    return out;
}

Index numerical_rank(const CMatrix& m, const Tolerance& tol)
{
    return thin_svd(m, tol).rank;
}

CMatrix pseudoinverse(const CMatrix& m, const Tolerance& tol)
{
    const SvdResult svd = thin_svd(m, tol);
    const Index r = svd.rank;
    CMatrix out = CMatrix::Zero(m.cols(), m.rows());
    if (r == 0)
        return out;
    const RVector inv = svd.s.head(r).cwiseInverse();
    out.noalias() = svd.v.leftCols(r) * inv.asDiagonal() * svd.u.leftCols(r).adjoint();
    return out;
}

CMatrix range_frame(const CMatrix& m, const Tolerance& tol)
{
    const SvdResult svd = thin_svd(m, tol);
    return svd.u.leftCols(svd.rank);
}

CMatrix orthonormal_complement(const CMatrix& frame)
{
    const Index n = frame.rows();
    const Index r = frame.cols();
    if (r == 0)
        return CMatrix::Identity(n, n);
    if (r >= n)
        return CMatrix(n, 0);
    Eigen::HouseholderQR<CMatrix> qr(frame);
    const CMatrix q = qr.householderQ() * CMatrix::Identity(n, n);
    return q.rightCols(n - r);
}

CMatrix kernel_frame(const CMatrix& m, const Tolerance& tol)
{
    const SvdResult svd = thin_svd(m, tol);
    return orthonormal_complement(svd.v.leftCols(svd.rank));
}

CMatrix range_projector(const CMatrix& m, const Tolerance& tol)
{
    const CMatrix f = range_frame(m, tol);
    return f * f.adjoint();
}

CMatrix kernel_projector(const CMatrix& m, const Tolerance& tol)
{
    const SvdResult svd = thin_svd(m, tol);
    const CMatrix v = svd.v.leftCols(svd.rank);
    return CMatrix::Identity(m.cols(), m.cols()) - v * v.adjoint();
}

CMatrix psd_sqrt(const CMatrix& m, const Tolerance& tol)
{
    require_finite(m, "psd_sqrt");
    if (m.rows() != m.cols())
        fail(ErrorKind::dimension, "psd_sqrt needs a square matrix, got " + shape(m));
    if (m.size() == 0)
        return m;
    const double norm = op_norm(m);
    if (op_norm(m - m.adjoint()) > tol.eq_rel * std::max(norm, 1.0))
        fail(ErrorKind::domain, "psd_sqrt: matrix is not self-adjoint");
    const CMatrix herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(herm);
    if (eig.info() != Eigen::Success)
        fail(ErrorKind::numeric_failure, "eigenvalue decomposition did not converge for " + shape(m));
    RVector lambda = eig.eigenvalues();
    const double floor = -tol.eq_rel * std::max(norm, 1.0);
    if (lambda.minCoeff() < 10.0 * floor)
        fail(ErrorKind::domain, "psd_sqrt: matrix has a materially negative eigenvalue");
    for (Index i = 0; i < lambda.size(); ++i)
        lambda(i) = lambda(i) > 0.0 ? std::sqrt(lambda(i)) : 0.0;
    const CMatrix& u = eig.eigenvectors();
    return u * lambda.asDiagonal() * u.adjoint();
}

CMatrix kron(const CMatrix& a, const CMatrix& b)
{
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Index i = 0; i < a.rows(); ++i)
        for (Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CMatrix kron_identity(Index n, const CMatrix& m)
{
    CMatrix out = CMatrix::Zero(n * m.rows(), n * m.cols());
    for (Index i = 0; i < n; ++i)
        out.block(i * m.rows(), i * m.cols(), m.rows(), m.cols()) = m;
    return out;
}

bool is_partial_isometry(const CMatrix& m, const Tolerance& tol)
{
    require_finite(m, "is_partial_isometry");
    return partial_isometry_residual(m) <= tol.eq_rel;
}

bool is_isometry(const CMatrix& m, const Tolerance& tol)
{
    require_finite(m, "is_isometry");
    return op_norm(m.adjoint() * m - CMatrix::Identity(m.cols(), m.cols())) <= tol.eq_rel;
}

bool is_projection(const CMatrix& m, const Tolerance& tol)
{
    require_finite(m, "is_projection");
    if (m.rows() != m.cols())
        return false;
    const double scale = std::max(1.0, op_norm(m));
    return op_norm(m * m - m) <= tol.eq_rel * scale && op_norm(m - m.adjoint()) <= tol.eq_rel * scale;
}

bool is_contraction(const CMatrix& m, const Tolerance& tol)
{
    require_finite(m, "is_contraction");
    return op_norm(m) <= 1.0 + tol.eq_rel;
}

bool PartialIsometryConditions::consistent() const
{
    return std::all_of(holds.begin(), holds.end(), [&](bool b) { return b == holds[0]; });
}

double PartialIsometryConditions::max_residual() const
{
    return *std::max_element(residuals.begin(), residuals.end());
}

PartialIsometryConditions partial_isometry_conditions(const CMatrix& m, const Tolerance& tol)
{
    PartialIsometryConditions out;
    const SvdResult svd = thin_svd(m, tol);
    const Index r = svd.rank;
    const CMatrix initial = svd.v.leftCols(r);
    const CMatrix final_ = svd.u.leftCols(r);
    const CMatrix mh = m.adjoint();
    out.norm = svd.s.size() > 0 ? svd.s(0) : 0.0;

    out.residuals[0] = gram_identity_residual(mh * m, initial);
    out.residuals[1] = gram_identity_residual(m * mh, final_);
    out.residuals[2] = op_norm(m * mh * m - m) / std::max(1.0, out.norm);
    out.residuals[3] = op_norm(mh * m - initial * initial.adjoint());
    out.residuals[4] = op_norm(m * mh - final_ * final_.adjoint());

    CMatrix pinv = CMatrix::Zero(m.cols(), m.rows());
    if (r > 0)
        pinv = initial * svd.s.head(r).cwiseInverse().asDiagonal() * final_.adjoint();
    out.residuals[5] = op_norm(pinv - mh) / std::max(1.0, out.norm);

    for (int i = 0; i < PartialIsometryConditions::count; ++i)
        out.holds[i] = out.residuals[i] <= tol.eq_rel;
    return out;
}

double partial_isometry_residual(const CMatrix& m)
{
    if (m.size() == 0)
        return 0.0;
    return op_norm(m * m.adjoint() * m - m) / std::max(1.0, op_norm(m));
}

} // namespace pirep
